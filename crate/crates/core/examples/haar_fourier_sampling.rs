// Fourier sampling of signals that are sparse in the Haar basis.
//
// Measuring the first `d` Fourier frequencies of `n` Haar functions loses
// little energy once the balancing residual `|Re(U^* U) - I|` is small. The
// search below finds the smallest such `d`, then embeds Haar-sparse signals
// by selecting those Fourier coordinates and applying a random matrix.

use stable_embed::embeddings::{DistSpec, StageOne, StageOneMap};
use stable_embed::haar_fourier::{build_u_block, min_d_for_eps, real_stacked_dim, residual_curve};
use stable_embed::model_sets::ModelSpec;
use stable_embed::rip_estimator::MapFamily;

pub struct Summary {
    pub min_d: Vec<(usize, usize)>,
    pub energy_kept: f64,
}

pub fn run_example() -> Result<Summary, Box<dyn std::error::Error>> {
    let curve = residual_curve(8, 64)?;
    for d in [1, 2, 4, 8, 16, 32, 64] {
        println!("n = 8, d = {d:>2}: residual {:.4}", curve[d - 1]);
    }

    let mut min_d = Vec::new();
    for n in [2, 4, 8, 16] {
        let found = min_d_for_eps(n, 0.1, 4096)?;
        println!("n = {n:>2}: smallest d with residual <= 0.1 is {}", found.d);
        min_d.push((n, found.d));
    }

    // Haar-sparse signals seen through a long Fourier block, then truncated
    let (n, d_long) = (16, 512);
    let d = min_d.iter().find(|(m, _)| *m == n).map(|(_, d)| *d).unwrap();
    let u = build_u_block(d_long, n)?;
    let signals = ModelSpec::HaarSparse { n, k: 2 }.points(200, 3)?;
    let stacked = signals.iter().map(|a| u.real_stacked(a.as_slice())).collect::<Result<Vec<_>, _>>()?;
    let select = StageOneMap::coordinate_selection(real_stacked_dim(d), real_stacked_dim(d_long))?;
    let energy_kept = stacked
        .iter()
        .map(|y| select.apply(y.as_slice()).map(|v| v.norm_squared()))
        .collect::<Result<Vec<f64>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    println!("smallest energy kept by the first {d} frequencies over 200 signals: {energy_kept:.4}");

    let family = MapFamily::TwoStage { stage_one: StageOne::basis(select), dist: DistSpec::Gaussian, m: 24, p: 2 };
    let map = family.draw(9)?;
    let y = map.apply(stacked[0].as_slice())?;
    println!("measured {} numbers from a signal with {} Fourier coordinates", y.len(), stacked[0].dim());

    Ok(Summary { min_d, energy_kept })
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
