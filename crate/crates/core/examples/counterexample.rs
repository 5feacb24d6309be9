// A finite-dimensional set whose normalized secants are not: the correlated
// sequence `x_i = r^i e_1 + b r^i e_{i+1}`.
//
// Its points accumulate at the origin, so the box dimension of the set is 0,
// yet the secants `v_k` stay a fixed distance apart and no finite net covers
// them. Any stable embedding of the set must therefore fail.

use stable_embed::model_sets::{
    boxdim_fit, correlated_sequence, secant_alpha_bruteforce, secant_alpha_formula, vk_min_separation,
    vk_pairwise_min,
};

pub struct Summary {
    pub alpha_bruteforce: f64,
    pub alpha_exact: f64,
    pub alpha_lb: f64,
    pub vk_bound: f64,
    pub vk_min: f64,
    pub point_slope: f64,
}

pub fn run_example() -> Result<Summary, Box<dyn std::error::Error>> {
    let (r, b) = (0.5, 1.0);

    let scan = secant_alpha_bruteforce(r, b, 30)?;
    let formula = secant_alpha_formula(r, b)?;
    println!("alpha by scanning all pairs up to i = 30: {:.6} at {:?}", scan.alpha, scan.witness);
    println!("alpha from the gap formula:               {:.6} (gap {})", formula.alpha_exact, formula.minimizing_gap);
    println!("closed-form lower bound:                  {:.6}", formula.alpha_lb);

    let vk_bound = vk_min_separation(r, b)?;
    let vk_min = vk_pairwise_min(r, b, 20)?;
    println!("secant separation: min |v_k - v_k'| = {vk_min:.6} >= {vk_bound:.6}");

    let points = correlated_sequence(r, b, 60)?;
    let fit = boxdim_fit(&points, &[0.2, 0.1, 0.05, 0.025])?;
    println!("box-dimension slope of the points: {:.3} (counts {:?})", fit.slope, fit.counts);

    Ok(Summary {
        alpha_bruteforce: scan.alpha,
        alpha_exact: formula.alpha_exact,
        alpha_lb: formula.alpha_lb,
        vk_bound,
        vk_min,
        point_slope: fit.slope,
    })
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
