//! Closed-form equilibrium of the unconstrained coordination game.

use timecoord::analytic::solve_unconstrained_game;
use timecoord::harness::scenarios::SIX_GAMMA0;
use timecoord::mission::GameWeights;

fn main() -> timecoord::Result<()> {
    let w = GameWeights::new(0.2, 0.5, 0.3, 0.7)?;
    let sol = solve_unconstrained_game(&w, &SIX_GAMMA0)?;
    println!("{}", sol.report());
    println!("    t virtual time of each agent");
    for t in [0.0, 1.0, 2.0, 5.0, 10.0, 20.0] {
        let g: Vec<String> = (0..sol.agents())
            .map(|i| format!("{:7.3}", t + sol.eval(i, t, 0)))
            .collect();
        println!("{t:>5.1} {}", g.join(" "));
    }
    println!("gap 0-1 at t = 3: {:.4}", sol.pairwise_gap(0, 1, 3.0)?);
    Ok(())
}
