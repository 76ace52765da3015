use proptest::prelude::*;

use timecoord::mission::Vec3;
use timecoord::mpc::MpcStepSolution;
use timecoord::netsim::{bootstrap_tables, exchange, update_topology, CommGraph, LinkModel, TopologySampler};

fn ring(n: usize, radius: f64) -> Vec<Vec3> {
    (0..n)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / n as f64;
            Vec3::new(radius * a.cos(), radius * a.sin(), 0.0)
        })
        .collect()
}

fn plan(start: f64, k: usize, h: f64) -> MpcStepSolution {
    MpcStepSolution {
        s: (0..=k).map(|t| start + t as f64 * h).collect(),
        l: vec![1.0; k + 1],
        u: vec![0.0; k],
        kkt_residual: 0.0,
        solve_time: 0.0,
        active: vec![],
        objective: 0.0,
    }
}

#[test]
fn bernoulli_density_over_many_refreshes() {
    let model = LinkModel::RandomBernoulli {
        p_up: 0.7,
        refresh_period: 0.5,
    };
    let mut sampler = TopologySampler::new(model, 6, 11).unwrap();
    let pos = ring(6, 1.0);
    let refreshes = 10_000;
    let mut total = 0.0;
    for k in 0..refreshes {
        total += update_topology(&mut sampler, &pos, k as f64 * 0.5).density();
    }
    let density = total / refreshes as f64;
    assert!((density - 0.7).abs() < 0.02, "density {density}");
}

#[test]
fn draws_are_held_between_refreshes() {
    let model = LinkModel::RandomBernoulli {
        p_up: 0.5,
        refresh_period: 0.5,
    };
    let mut sampler = TopologySampler::new(model, 8, 3).unwrap();
    let pos = ring(8, 1.0);
    for epoch in 0..20 {
        let first = sampler.update(&pos, epoch as f64 * 0.5);
        for sub in 1..10 {
            assert_eq!(sampler.update(&pos, epoch as f64 * 0.5 + sub as f64 * 0.05), first);
        }
    }
}

#[test]
fn separated_clusters_exchange_nothing() {
    let model = LinkModel::DistanceSmoothed { p1: 2.0, p2: 4.0 };
    let mut sampler = TopologySampler::new(model, 6, 0).unwrap();
    let mut pos = ring(3, 0.5);
    pos.extend(ring(3, 0.5).into_iter().map(|p| p + Vec3::new(50.0, 0.0, 0.0)));
    let g = sampler.update(&pos, 0.0);
    let comp = g.components();
    assert_eq!(comp[0], comp[1]);
    assert_eq!(comp[3], comp[5]);
    assert_ne!(comp[0], comp[3]);
    let sols: Vec<_> = (0..6).map(|i| plan(i as f64, 10, 0.05)).collect();
    let tables = exchange(&sols, &g, 0.05);
    for (receiver, table) in tables.iter().enumerate() {
        assert_eq!(table.len(), 2);
        assert!(table.iter().all(|p| comp[p.agent] == comp[receiver]));
    }
}

#[test]
fn complete_graph_exchange_carries_shifted_plans() {
    let n = 5;
    let k = 10;
    let h = 0.05;
    let g = CommGraph::complete(n);
    let sols: Vec<_> = (0..n).map(|i| plan(0.3 * i as f64, k, h)).collect();
    let tables = exchange(&sols, &g, h);
    for (receiver, table) in tables.iter().enumerate() {
        assert_eq!(table.len(), n - 1);
        for p in table {
            assert_ne!(p.agent, receiver);
            assert_eq!(p.weight, 1.0);
            assert_eq!(p.current, sols[p.agent].s[1]);
            assert_eq!(p.s.len(), k);
            assert_eq!(p.s[0], sols[p.agent].s[2]);
            assert!((p.s[k - 1] - (sols[p.agent].s[k] + h)).abs() < 1e-15);
        }
    }
    let boot = bootstrap_tables(&[0.0, 1.0, 2.0, 3.0, 4.0], &g, k, h);
    assert!(boot.iter().all(|t| t.len() == n - 1));
    assert_eq!(boot[0][0].current, 1.0);
    assert!((boot[0][0].s[0] - (1.0 + h)).abs() < 1e-15);
}

#[test]
fn empty_graph_isolates_every_agent() {
    let g = CommGraph::empty(4);
    assert_eq!(g.density(), 0.0);
    assert_eq!(g.components(), vec![0, 1, 2, 3]);
    let tables = exchange(&(0..4).map(|i| plan(i as f64, 3, 0.1)).collect::<Vec<_>>(), &g, 0.1);
    assert!(tables.iter().all(|t| t.is_empty()));
}

fn model() -> impl Strategy<Value = LinkModel> {
    prop_oneof![
        Just(LinkModel::Full),
        (0.5f64..3.0, 0.1f64..3.0).prop_map(|(p1, w)| LinkModel::DistanceSmoothed { p1, p2: p1 + w }),
        (0.0f64..=1.0, 0.05f64..1.0)
            .prop_map(|(p_up, refresh_period)| LinkModel::RandomBernoulli { p_up, refresh_period }),
        (0.5f64..3.0, 0.1f64..3.0, 0.0f64..=1.0, 0.05f64..1.0).prop_map(|(p1, w, p_up, refresh_period)| {
            LinkModel::Composite {
                p1,
                p2: p1 + w,
                p_up,
                refresh_period,
            }
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graphs_are_symmetric_weighted_and_reproducible(m in model(), n in 2usize..9, seed in any::<u64>(), spread in 0.5f64..6.0) {
        let pos = ring(n, spread);
        let mut a = TopologySampler::new(m, n, seed).unwrap();
        let mut b = TopologySampler::new(m, n, seed).unwrap();
        for step in 0..40 {
            let t = step as f64 * 0.05;
            let ga = a.update(&pos, t);
            let gb = b.update(&pos, t);
            prop_assert_eq!(&ga, &gb);
            prop_assert!(ga.is_symmetric());
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((0.0..=1.0).contains(&ga.weight(i, j)));
                }
            }
        }
    }

    #[test]
    fn distance_gate_never_exceeds_the_link_draw(n in 2usize..7, seed in any::<u64>(), spread in 0.5f64..6.0) {
        let pos = ring(n, spread);
        let gated = LinkModel::Composite { p1: 1.0, p2: 3.0, p_up: 0.6, refresh_period: 0.5 };
        let plain = LinkModel::RandomBernoulli { p_up: 0.6, refresh_period: 0.5 };
        let mut a = TopologySampler::new(gated, n, seed).unwrap();
        let mut b = TopologySampler::new(plain, n, seed).unwrap();
        for step in 0..20 {
            let t = step as f64 * 0.25;
            let (ga, gb) = (a.update(&pos, t), b.update(&pos, t));
            for i in 0..n {
                for j in 0..n {
                    prop_assert!(ga.weight(i, j) <= gb.weight(i, j));
                }
            }
        }
    }
}

#[test]
fn invalid_models_are_rejected() {
    for m in [
        LinkModel::DistanceSmoothed { p1: 2.0, p2: 2.0 },
        LinkModel::RandomBernoulli {
            p_up: 1.5,
            refresh_period: 1.0,
        },
        LinkModel::RandomBernoulli {
            p_up: 0.5,
            refresh_period: 0.0,
        },
    ] {
        assert!(TopologySampler::new(m, 3, 0).is_err());
    }
}
