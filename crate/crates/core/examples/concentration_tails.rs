// Orlicz norms and concentration of measurement increments.
//
// `psi_alpha` norms come from absolute moments; Bernstein's inequality is
// checked on averages of centered exponentials; the increment tail of a
// Gaussian two-stage map is fitted with sub-Gaussian and sub-exponential
// rates.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use stable_embed::embeddings::{DistSpec, StageOne};
use stable_embed::model_sets::ModelSpec;
use stable_embed::rip_estimator::{analytic_mu_pnorm, MapFamily};
use stable_embed::rng::substream;
use stable_embed::tail_probes::{
    bernstein_tail_check, increment_tail_fit, ln_abs_moment_exponential, ln_abs_moment_normal, psi_norm_exact,
    psi_norm_mc, IncrementProbe,
};

pub struct Summary {
    pub psi2_normal: f64,
    pub psi2_normal_mc: f64,
    pub bernstein_rate: Option<f64>,
    pub increment_rate: Option<f64>,
}

pub fn run_example() -> Result<Summary, Box<dyn std::error::Error>> {
    let psi2 = psi_norm_exact(ln_abs_moment_normal, 2, 20)?;
    let mut rng = substream(1, &[]);
    let draws: Vec<f64> = (0..200_000).map(|_| rng.sample(StandardNormal)).collect();
    let psi2_mc = psi_norm_mc(&draws, 2, 20)?;
    let psi1_exp = psi_norm_exact(ln_abs_moment_exponential, 1, 20)?;
    println!("psi_2(N(0,1)) = {:.6} exact, {:.4} from samples", psi2.value, psi2_mc.value);
    println!("psi_1(Exp(1)) = {:.6}", psi1_exp.value);

    let grid = [0.0, 0.05, 0.1, 0.2, 0.3, 0.5];
    let bern = bernstein_tail_check(|r| r.sample::<f64, _>(Exp1) - 1.0, 2.0, 50, &grid, 4000, 2)?;
    println!("Bernstein, m = 50: tail {:?}, rates {:?} / {:?}", bern.tail, bern.c1, bern.c2);

    let n = 16;
    let family = MapFamily::TwoStage { stage_one: StageOne::Identity { dim: n }, dist: DistSpec::Gaussian, m: 64, p: 2 };
    let pts = ModelSpec::Sparse { n, k: 2 }.points(2, 3)?;
    let mu = |i: usize| analytic_mu_pnorm(&family, pts[i].as_slice(), 2);
    let fit = increment_tail_fit(&IncrementProbe {
        family: &family,
        p: 2,
        y: &pts[0],
        z: &pts[1],
        mu_y: mu(0)?,
        mu_z: mu(1)?,
        lambda_grid: &[0.0, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8],
        trials: 2000,
        seed: 4,
    })?;
    println!("increment tail, m = 64: {:?}", fit.tail);
    println!("rates: c1 = {:?}, c2 = {:?}, crossover {:.3}", fit.c1, fit.c2, fit.crossover);

    Ok(Summary {
        psi2_normal: psi2.value,
        psi2_normal_mc: psi2_mc.value,
        bernstein_rate: bern.combined_rate(),
        increment_rate: fit.combined_rate(),
    })
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
