// Two-stage embedding: project onto the span of a greedy net of the model
// set, then apply a random matrix to the coordinates.
//
// The data live near a 3-dimensional subspace of `R^40`; a net at radius
// `eps_*` spans a space `V` with `|b(x)|_b >= 1 - eps_*` on the set.

use nalgebra::DMatrix;
use stable_embed::embeddings::{DistSpec, MeasurementMap, StageOne, StageOneMap};
use stable_embed::model_sets::{greedy_net, normalized_secants, DEFAULT_MIN_GAP};
use stable_embed::rip_estimator::{analytic_mu_pnorm, empirical_delta, MapFamily};
use stable_embed::Vector;

pub struct Summary {
    pub stage_one_dim: usize,
    pub min_b_norm: f64,
    pub eps_star: f64,
    pub delta: f64,
}

pub fn run_example() -> Result<Summary, Box<dyn std::error::Error>> {
    let ambient = 40;
    let frame = stable_embed::embeddings::sample_dist(DistSpec::Gaussian, 3, ambient, 1)?;
    let mix = stable_embed::embeddings::sample_dist(DistSpec::Gaussian, 600, 3, 2)?;
    let points: Vec<Vector> = (&mix * &frame)
        .row_iter()
        .map(|r| Vector::new(r.iter().copied().collect()).map(|v| v.normalized().unwrap()))
        .collect::<Result<_, _>>()?;

    let eps_star = 0.3;
    let net = greedy_net(&points, eps_star)?;
    let spanning = StageOneMap::from_spanning_set(&net.centers, 1e-8)?;
    println!("net of {} centers spans a {}-dimensional V (condition {:.1e})", net.len(), spanning.dim(), spanning.condition());

    // an orthonormal basis of V makes |b(x)|_2 = |P_V x|, so the mu-norm is 1 on the set
    let q = spanning.basis_block().transpose().qr().q();
    let stage_one = StageOneMap::new(q.transpose())?;

    let min_b_norm = points
        .iter()
        .map(|x| stage_one.apply(x.as_slice()).and_then(|y| stage_one.b_norm(y.as_slice())))
        .collect::<Result<Vec<f64>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    println!("min |b(x)|_b over the set: {min_b_norm:.6} (>= 1 - eps_* = {:.2})", 1.0 - eps_star);

    let stage_one = StageOne::basis(stage_one);
    let family = MapFamily::TwoStage { stage_one: stage_one.clone(), dist: DistSpec::Gaussian, m: 64, p: 2 };
    let map = family.draw(3)?;
    let secants = normalized_secants(&points, 2000, DEFAULT_MIN_GAP, 4)?;
    let mu = secants
        .iter()
        .map(|s| analytic_mu_pnorm(&family, s.direction.as_slice(), 2))
        .collect::<Result<Vec<f64>, _>>()?;
    let report = empirical_delta(&map, &secants, 2, &mu)?;
    println!(
        "m = {}: delta = {:.4}, mu-norms in [{:.4}, {:.4}], RIP on the sample: {}",
        report.m, report.delta_p, report.under_delta, report.bar_delta, report.rip_holds
    );

    let dense = MeasurementMap::explicit(DMatrix::identity(ambient, ambient))?;
    println!("storage: two-stage {} floats vs identity {}", map.storage_len(), dense.storage_len());

    Ok(Summary { stage_one_dim: stage_one.output_dim(), min_b_norm, eps_star, delta: report.delta_p })
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
