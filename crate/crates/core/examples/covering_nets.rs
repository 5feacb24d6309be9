// Greedy epsilon-nets of normalized secants and a box-counting estimate.
//
// For `k`-sparse vectors in `R^n` the secants are `2k`-sparse, and their
// covering numbers obey `N(eps) <= (3en / (2k eps))^{2k}`.

use stable_embed::model_sets::{boxdim_fit, greedy_net, model_secants, ModelSpec, DEFAULT_MIN_GAP};
use stable_embed::Vector;

pub struct NetRow {
    pub eps: f64,
    pub count: usize,
    pub bound: f64,
    pub covered: bool,
    pub separated: bool,
}

pub fn run_example() -> Result<Vec<NetRow>, Box<dyn std::error::Error>> {
    let (n, k) = (8, 1);
    let model = ModelSpec::Sparse { n, k };
    let secants: Vec<Vector> = model_secants(&model, 4000, DEFAULT_MIN_GAP, 7)?.directions().cloned().collect();

    let mut rows = Vec::new();
    println!("{:>6} {:>6} {:>12}", "eps", "count", "bound");
    for eps in [0.5, 0.25] {
        let net = greedy_net(&secants, eps)?;
        let covered = secants.iter().all(|p| net.centers.iter().any(|c| p.distance(c) <= eps));
        let separated = net.centers.iter().enumerate().all(|(i, a)| net.centers[i + 1..].iter().all(|b| a.distance(b) > eps));
        let bound = (3.0 * std::f64::consts::E * n as f64 / (2.0 * k as f64 * eps)).powi(2 * k as i32);
        println!("{eps:>6} {:>6} {bound:>12.1}", net.len());
        rows.push(NetRow { eps, count: net.len(), bound, covered, separated });
    }

    let sphere = ModelSpec::Sparse { n: 3, k: 3 }.points(5000, 11)?;
    let fit = boxdim_fit(&sphere, &[0.4, 0.2, 0.1, 0.05])?;
    println!("unit sphere in R^3: slope {:.2}, counts {:?}", fit.slope, fit.counts);
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
