#[allow(dead_code)]
mod counterexample {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/counterexample.rs"));
}
#[allow(dead_code)]
mod covering_nets {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/covering_nets.rs"));
}
#[allow(dead_code)]
mod two_stage_embedding {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/two_stage_embedding.rs"));
}
#[allow(dead_code)]
mod rank_one_projections {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rank_one_projections.rs"));
}
#[allow(dead_code)]
mod haar_fourier_sampling {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/haar_fourier_sampling.rs"));
}
#[allow(dead_code)]
mod sample_complexity_bounds {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sample_complexity_bounds.rs"));
}
#[allow(dead_code)]
mod concentration_tails {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/concentration_tails.rs"));
}
#[allow(dead_code)]
mod rip_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rip_sweep.rs"));
}

#[test]
fn counterexample_runs() {
    let s = counterexample::run_example().unwrap();
    assert!((s.alpha_bruteforce - s.alpha_exact).abs() < 1e-12);
    assert!(s.alpha_exact > s.alpha_lb);
    assert!(s.vk_min >= s.vk_bound);
    assert!(s.point_slope < 0.5);
}

#[test]
fn covering_nets_runs() {
    for row in covering_nets::run_example().unwrap() {
        assert!(row.covered && row.separated);
        assert!(row.count as f64 <= row.bound);
    }
}

#[test]
fn two_stage_embedding_runs() {
    let s = two_stage_embedding::run_example().unwrap();
    assert_eq!(s.stage_one_dim, 3);
    assert!(s.min_b_norm >= 1.0 - s.eps_star);
    assert!(s.delta < 1.0);
}

#[test]
fn rank_one_projections_runs() {
    let s = rank_one_projections::run_example().unwrap();
    assert!((s.mean_1000 - 2.0 / std::f64::consts::PI).abs() < 0.02);
    assert!(s.sd_ratio > 1.0 && s.sd_ratio < 4.0);
    for (q, mean) in s.sparse_means {
        assert!((mean - 1.0 / q).abs() < 1e-12);
    }
}

#[test]
fn haar_fourier_sampling_runs() {
    let s = haar_fourier_sampling::run_example().unwrap();
    assert_eq!(s.min_d, vec![(2, 7), (4, 13), (8, 27), (16, 53)]);
    assert!(s.energy_kept > 0.9 - 1e-12);
}

#[test]
fn sample_complexity_bounds_runs() {
    let s = sample_complexity_bounds::run_example().unwrap();
    assert_eq!(s.m_sparse, 498_811);
    assert!((s.halving_ratio - 4.0).abs() < 1e-12);
    assert!((s.s1 - 2.9225).abs() < 1e-4);
}

#[test]
fn concentration_tails_runs() {
    let s = concentration_tails::run_example().unwrap();
    assert!((s.psi2_normal - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-10);
    assert!((s.psi2_normal_mc - s.psi2_normal).abs() < 0.05);
    assert!(s.bernstein_rate.unwrap() > 0.0);
    assert!(s.increment_rate.unwrap() > 0.0);
}

#[test]
fn rip_sweep_runs() {
    let table = rip_sweep::run_example().unwrap();
    let scaled: Vec<f64> = table.rows.iter().map(|r| r.delta_median * (r.m as f64).sqrt()).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(hi / lo < 2.0);
}
