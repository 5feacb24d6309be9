// Rank-one projections `L(M)_i = a_i^T M b_i / m` of matrices.
//
// Gaussian vectors give `E|L(M)|_1 = (2/pi) |M|_F` for rank-one `M`, with
// fluctuations shrinking like `1/sqrt(m)`. Sparse ± vectors with parameter
// `q` have a much smaller mean on `e_1 e_1^T`, which limits their isometry
// constant.

use stable_embed::bounds::{alpha_x, rop_psi1_bound, sparse_rop_delta1_floor, MomentSource};
use stable_embed::embeddings::DistSpec;
use stable_embed::rip_estimator::{analytic_mu_pnorm, measurement_spread, MapFamily};
use stable_embed::Vector;

pub struct Summary {
    pub mean_1000: f64,
    pub sd_ratio: f64,
    pub sparse_means: Vec<(f64, f64)>,
}

pub fn run_example() -> Result<Summary, Box<dyn std::error::Error>> {
    let (n1, n2) = (16, 16);
    let e11 = Vector::basis(n1 * n2, 0);

    let mut sds = Vec::new();
    let mut mean_1000 = 0.0;
    for m in [250, 1000] {
        let family = MapFamily::RankOne { dist: DistSpec::Gaussian, m, n1, n2 };
        let spread = measurement_spread(&family, e11.as_slice(), 1, 200, 5)?;
        println!("Gaussian, m = {m:>4}: mean {:.5} (2/pi = {:.5}), sd {:.5}", spread.mean, 2.0 / std::f64::consts::PI, spread.std_dev);
        sds.push(spread.std_dev);
        mean_1000 = spread.mean;
    }
    let sd_ratio = sds[0] / sds[1];
    println!("sd ratio m=250 / m=1000: {sd_ratio:.3} (CLT: 2)");

    let mut sparse_means = Vec::new();
    for q in [2.0, 4.0, 16.0] {
        let family = MapFamily::RankOne { dist: DistSpec::SparsePm { q }, m: 1, n1, n2 };
        let mean = analytic_mu_pnorm(&family, e11.as_slice(), 1)?;
        let ax = alpha_x(MomentSource::SparsePm { q }, 32)?;
        println!(
            "sparse q = {q:>4}: E|a^T M b| = {mean:.5}, alpha = {:.4}, delta_1 floor (D = 1) = {:.4}",
            ax.value,
            sparse_rop_delta1_floor(q, 1.0)?
        );
        sparse_means.push((q, mean));
    }
    println!("psi_1 bound on a^T M b for Gaussian vectors, |M|_F = 1: {:.5}", rop_psi1_bound(1.0, 1.0)?);

    Ok(Summary { mean_1000, sd_ratio, sparse_means })
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
