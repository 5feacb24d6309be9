use nalgebra::DMatrix;
use proptest::prelude::*;

use stable_embed::bounds::{m_main, m_two_stage, BoundInputs};
use stable_embed::embeddings::{sample_dist, DistSpec, MeasurementMap, StageOne, StageOneMap};
use stable_embed::haar_fourier::residual_curve;
use stable_embed::model_sets::{
    correlated_sequence, greedy_net, model_secants, secant_alpha_bruteforce, secant_alpha_formula, ModelSpec,
    DEFAULT_MIN_GAP,
};
use stable_embed::rip_estimator::{empirical_delta, rip_sweep, secant_mu_pnorms, MapFamily, MuNormMode, MuNormSpec, SweepConfig};
use stable_embed::tail_probes::psi_norm_mc;
use stable_embed::Vector;

fn cloud(dim: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, dim), 2..60)
        .prop_map(|rows| rows.into_iter().map(|r| Vector::new(r).unwrap()).collect())
}

fn model() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (2usize..10, 1usize..4).prop_map(|(n, k)| ModelSpec::Sparse { n, k: k.min(n) }),
        (2usize..5, 2usize..5).prop_map(|(n1, n2)| ModelSpec::LowRank { n1, n2, r: 1 }),
        (0.1f64..0.9, 0.2f64..3.0, 2usize..20).prop_map(|(r, b, i_max)| ModelSpec::CorrelatedSeq { r, b, i_max }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn secants_are_unit_differences_of_points(model in model(), seed in any::<u64>()) {
        let set = model_secants(&model, 40, DEFAULT_MIN_GAP, seed).unwrap();
        for s in &set.secants {
            prop_assert!((s.direction.norm() - 1.0).abs() < 1e-12);
            let (i, j) = s.pair_ids;
            let diff = set.points[i].sub(&set.points[j]);
            let rebuilt = diff.normalized().unwrap();
            prop_assert!(rebuilt.distance(&s.direction) < 1e-12);
        }
    }

    #[test]
    fn greedy_net_covers_and_separates(points in cloud(3), eps in 0.05f64..2.0) {
        let net = greedy_net(&points, eps).unwrap();
        for p in &points {
            prop_assert!(net.centers.iter().any(|c| p.distance(c) <= eps));
        }
        for (i, a) in net.centers.iter().enumerate() {
            for b in &net.centers[i + 1..] {
                prop_assert!(a.distance(b) > eps);
            }
            prop_assert!(points.contains(a));
        }
    }

    #[test]
    fn alpha_scan_decreases_to_formula(r in 0.05f64..0.95, b in 0.1f64..4.0) {
        let formula = secant_alpha_formula(r, b).unwrap();
        let mut prev = f64::INFINITY;
        for i_max in 2..=(formula.minimizing_gap + 6) {
            let a = secant_alpha_bruteforce(r, b, i_max).unwrap().alpha;
            prop_assert!(a <= prev + 1e-15);
            prev = a;
            if i_max > formula.minimizing_gap {
                prop_assert!((a - formula.alpha_exact).abs() < 1e-12);
            }
        }
        prop_assert!(formula.alpha_exact >= formula.alpha_lb - 1e-15);
    }

    #[test]
    fn correlated_norms_shrink_by_r(r in 0.05f64..0.99, b in 0.0f64..5.0, i_max in 2usize..40) {
        let xs = correlated_sequence(r, b, i_max).unwrap();
        for w in xs.windows(2) {
            prop_assert!((w[0].norm() / w[1].norm() - 1.0 / r).abs() < 1e-12 / r);
        }
    }

    #[test]
    fn b_norm_is_contractive(d in 1usize..6, extra in 0usize..6, seed in any::<u64>(), x in prop::collection::vec(-3.0f64..3.0, 12)) {
        let ambient = d + extra;
        let Ok(map) = StageOneMap::new(sample_dist(DistSpec::Gaussian, d, ambient, seed).unwrap()) else {
            return Ok(());
        };
        let x = &x[..ambient];
        let b = map.b_norm(map.apply(x).unwrap().as_slice()).unwrap();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let slack = 1e-14 * map.condition().sqrt().max(1.0);
        prop_assert!(b <= norm * (1.0 + slack) + 1e-15);
    }

    #[test]
    fn maps_are_linear(m in 1usize..20, n in 1usize..10, seed in any::<u64>(), c in -3.0f64..3.0,
                       x in prop::collection::vec(-2.0f64..2.0, 9), y in prop::collection::vec(-2.0f64..2.0, 9)) {
        let map = MeasurementMap::two_stage(StageOne::Identity { dim: n.min(9) }, DistSpec::SparsePm { q: 3.0 }, m, 1, seed).unwrap();
        let (x, y) = (&x[..n.min(9)], &y[..n.min(9)]);
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + c * b).collect();
        let lhs = map.apply(&sum).unwrap();
        let (lx, ly) = (map.apply(x).unwrap(), map.apply(y).unwrap());
        for i in 0..m {
            prop_assert!((lhs[i] - (lx[i] + c * ly[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_one_storage(m in 1usize..40, n1 in 1usize..8, n2 in 1usize..8, seed in any::<u64>()) {
        let map = MeasurementMap::rank_one(m, n1, n2, DistSpec::Gaussian, seed).unwrap();
        prop_assert_eq!(map.storage_len(), m * (n1 + n2));
    }

    #[test]
    fn balancing_residual_never_grows(log_n in 0u32..5, d_max in 1usize..80) {
        let curve = residual_curve(1 << log_n, d_max).unwrap();
        for w in curve.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn delta_grows_with_sample_and_sandwiches(n in 3usize..8, m in 2usize..30, p in 1u8..=2, seed in any::<u64>()) {
        let family = MapFamily::TwoStage { stage_one: StageOne::Identity { dim: n }, dist: DistSpec::Gaussian, m, p };
        let secants = model_secants(&ModelSpec::Sparse { n, k: 2 }, 30, DEFAULT_MIN_GAP, seed).unwrap().secants;
        let spec = MuNormSpec { family: family.clone(), p, mode: MuNormMode::Analytic };
        let mu = secant_mu_pnorms(&spec, &secants).unwrap();
        let map = family.draw(seed ^ 1).unwrap();
        let mut prev = 0.0;
        for len in [5, 15, 30] {
            let r = empirical_delta(&map, &secants[..len], p, &mu[..len]).unwrap();
            prop_assert!(r.delta_p >= prev);
            prop_assert!(r.under_delta - r.delta_p <= r.min_measured + 1e-12);
            prop_assert!(r.max_measured <= r.bar_delta + r.delta_p + 1e-12);
            prev = r.delta_p;
        }
    }

    #[test]
    fn psi1_statistic_below_psi2(samples in prop::collection::vec(-5.0f64..5.0, 10..200)) {
        let a = psi_norm_mc(&samples, 1, 12).unwrap();
        let b = psi_norm_mc(&samples, 2, 12).unwrap();
        for (x, y) in a.per_q.iter().zip(&b.per_q) {
            prop_assert!(x <= &(y * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn sample_complexity_is_monotone(s in 1.0f64..16.0, eps in 0.01f64..0.45, delta in 0.05f64..0.9, xi in 0.001f64..0.9, f in 1.05f64..2.0) {
        let base = BoundInputs { s, eps_s: eps, delta, xi, ..Default::default() };
        let m = |i: BoundInputs| m_main(&i).unwrap().pre_ceiling;
        let m0 = m(base);
        let shifted = [
            m(BoundInputs { delta: delta / f, ..base }),
            m(BoundInputs { xi: xi / f, ..base }),
            m(BoundInputs { s: s * f, ..base }),
            m(BoundInputs { eps_s: eps / f, ..base }),
        ];
        prop_assert!(shifted.iter().all(|v| *v >= m0));
        for p in [1, 2] {
            let t0 = m_two_stage(p, 1.5, s, eps, delta, xi, 1.0).unwrap().pre_ceiling;
            prop_assert!(m_two_stage(p, 1.5, s, eps, delta / f, xi, 1.0).unwrap().pre_ceiling >= t0);
            prop_assert!(m_two_stage(p, 1.5, s, eps, delta, xi / f, 1.0).unwrap().pre_ceiling >= t0);
            prop_assert!(m_two_stage(p, 1.5, s * f, eps, delta, xi, 1.0).unwrap().pre_ceiling >= t0);
            prop_assert!(m_two_stage(p, 1.5, s, eps / f, delta, xi, 1.0).unwrap().pre_ceiling >= t0);
        }
    }

    #[test]
    fn vectors_and_maps_round_trip(m in 1usize..8, n in 1usize..8, seed in any::<u64>()) {
        let map = MeasurementMap::two_stage(StageOne::Identity { dim: n }, DistSpec::Gaussian, m, 2, seed).unwrap();
        let text = serde_json::to_string(&map.descriptor()).unwrap();
        let back = MeasurementMap::from_descriptor(&serde_json::from_str(&text).unwrap()).unwrap();
        let x = Vector::basis(n, n - 1);
        prop_assert_eq!(map.apply(x.as_slice()).unwrap(), back.apply(x.as_slice()).unwrap());
        let explicit = MeasurementMap::explicit(DMatrix::from_fn(m, n, |i, j| (i * n + j) as f64)).unwrap();
        let back = MeasurementMap::from_descriptor(&serde_json::from_str(&serde_json::to_string(&explicit.descriptor()).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(explicit.apply(x.as_slice()).unwrap(), back.apply(x.as_slice()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn sweeps_do_not_depend_on_thread_count(seed in any::<u64>()) {
        let model = ModelSpec::Sparse { n: 10, k: 2 };
        let family = MapFamily::TwoStage { stage_one: StageOne::Identity { dim: 10 }, dist: DistSpec::Gaussian, m: 8, p: 1 };
        let cfg = SweepConfig { model: &model, family: &family, m_list: &[8, 16], p: 1, n_secants: 100, trials: 3, seed, mu_mode: MuNormMode::Analytic };
        let pooled = rip_sweep(&cfg).unwrap();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| rip_sweep(&cfg)).unwrap();
        prop_assert_eq!(pooled, single);
    }
}
