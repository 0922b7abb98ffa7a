use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qltt::envs::{run_episode, QosClass, SchedulerConfig};
use qltt::{calibrate, CalibrationResult, ControlSpec, HyperGrid, HyperPoint, Method, RiskMatrix};

fn matrix(width: usize, rows: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..=1.0, width), rows)
}

fn grid(k: usize) -> HyperGrid {
    HyperGrid::from_params((0..k).map(|i| vec![i as f64, 0.5 * i as f64])).unwrap()
}

fn spec(method: Method, alpha: f64) -> ControlSpec {
    match method {
        Method::Mean => ControlSpec::mean(alpha, 0.1),
        Method::Quantile => ControlSpec::quantile(alpha, 0.1, 0.2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serde_round_trips_are_exact(rows in matrix(3, 1..20), alpha in 0.0f64..1.0, seed in any::<u64>()) {
        let m = RiskMatrix::new(rows, true).unwrap();
        let g = grid(3);
        let s = spec(Method::Mean, alpha).with_fst(Some(vec![2, 0, 1]));
        let r = calibrate(&m, &g, &s, None).unwrap();
        let r = CalibrationResult { seed: Some(seed), ..r };

        let m2: RiskMatrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        let g2: HyperGrid = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        let s2: ControlSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        let r2: CalibrationResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(m2, m);
        prop_assert_eq!(g2, g);
        prop_assert_eq!(s2, s);
        prop_assert_eq!(r2, r);
    }

    #[test]
    fn column_permutation_permutes_p_values(rows in matrix(5, 60..120), seed in any::<u64>(), quantile in any::<bool>()) {
        let method = if quantile { Method::Quantile } else { Method::Mean };
        let m = RiskMatrix::new(rows, true).unwrap();
        let mut perm: Vec<usize> = (0..5).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let permuted = RiskMatrix::new(
            m.rows().iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect(),
            true,
        ).unwrap();
        let s = spec(method, 0.7);
        let a = calibrate(&m, &grid(5), &s, None).unwrap();
        let b = calibrate(&permuted, &grid(5), &s, None).unwrap();
        for (k, &j) in perm.iter().enumerate() {
            prop_assert_eq!(b.p_values[k], a.p_values[j]);
        }
    }

    #[test]
    fn shuffling_episodes_leaves_p_values_unchanged(rows in matrix(3, 60..120), seed in any::<u64>()) {
        let m = RiskMatrix::new(rows.clone(), true).unwrap();
        let mut shuffled = rows;
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let m2 = RiskMatrix::new(shuffled, true).unwrap();
        for method in [Method::Mean, Method::Quantile] {
            let s = spec(method, 0.7);
            let a = calibrate(&m, &grid(3), &s, None).unwrap();
            let b = calibrate(&m2, &grid(3), &s, None).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn results_satisfy_their_invariants(rows in matrix(6, 1..200), alpha in 0.0f64..1.0, fst in any::<bool>(), quantile in any::<bool>()) {
        let method = if quantile { Method::Quantile } else { Method::Mean };
        let m = RiskMatrix::new(rows, true).unwrap();
        let mut s = spec(method, alpha);
        if fst {
            s = s.with_fst(Some(vec![5, 4, 3, 2, 1, 0]));
        }
        let r = calibrate(&m, &grid(6), &s, None).unwrap();
        r.check_invariants().unwrap();
        prop_assert!(r.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert_eq!(r.selected.is_some(), !r.certified.is_empty());
        prop_assert_eq!(calibrate(&m, &grid(6), &s, None).unwrap(), r);
    }

    #[test]
    fn scheduler_conservation(
        n_ue in 1usize..6,
        n_rb in 1usize..4,
        p in 0.0f64..1.0,
        cap in 1usize..20,
        w in prop::array::uniform4(0.0f64..3.0),
        seed in any::<u64>(),
    ) {
        prop_assume!(w.iter().any(|&x| x > 0.0));
        let cfg = SchedulerConfig {
            n_ue,
            n_rb,
            n_tti: 200,
            buffer_cap: cap,
            classes: vec![
                QosClass { arrival_prob: p, budget_ms: 3.0 },
                QosClass { arrival_prob: p / 2.0, budget_ms: 8.0 },
            ],
            ..SchedulerConfig::default()
        };
        let tr = run_episode(&cfg, &HyperPoint::new(0, w.to_vec()), seed).unwrap();
        let c = tr.counters;
        prop_assert_eq!(c.arrived, c.served + c.dropped + c.residual);
        prop_assert!(c.max_blocks_per_tti <= n_rb);
        prop_assert!(c.max_queue <= cap);
        prop_assert!(tr.class_delays.iter().flatten().all(|&d| (0.0..=200.0).contains(&d)));
        prop_assert!(tr.reward <= 0.0);
        prop_assert_eq!(tr.class1_empty, tr.class1_delays.is_empty());
    }
}
