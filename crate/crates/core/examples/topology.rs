//! Sample communication graphs from each link model.

use timecoord::mission::Vec3;
use timecoord::netsim::{LinkModel, TopologySampler};

fn main() -> timecoord::Result<()> {
    let positions: Vec<Vec3> = (0..6).map(|i| Vec3::new(1.5 * i as f64, 0.0, 2.0)).collect();
    let models = [
        LinkModel::Full,
        LinkModel::DistanceSmoothed { p1: 2.0, p2: 4.0 },
        LinkModel::RandomBernoulli {
            p_up: 0.6,
            refresh_period: 0.5,
        },
        LinkModel::Composite {
            p1: 2.0,
            p2: 4.0,
            p_up: 0.6,
            refresh_period: 0.5,
        },
    ];
    for model in models {
        let mut sampler = TopologySampler::new(model, positions.len(), 7)?;
        println!("{model:?}");
        for t in [0.0, 0.5, 1.0] {
            let g = sampler.update(&positions, t);
            let weights: Vec<String> = g.upper_triangle().iter().map(|w| format!("{w:.2}")).collect();
            println!("  t={t:.1} density {:.2} components {:?}", g.density(), g.components());
            println!("        {}", weights.join(" "));
        }
    }
    Ok(())
}
