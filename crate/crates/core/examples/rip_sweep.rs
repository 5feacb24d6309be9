// Empirical isometry constant against the number of measurements.
//
// For Gaussian maps on sparse secants `delta` falls like `1/sqrt(m)`, so
// `delta * sqrt(m)` stays roughly flat. The table is written as CSV.

use stable_embed::embeddings::{DistSpec, StageOne};
use stable_embed::model_sets::ModelSpec;
use stable_embed::rip_estimator::{rip_sweep, MapFamily, MuNormMode, SweepConfig, SweepTable};

pub fn run_example() -> Result<SweepTable, Box<dyn std::error::Error>> {
    let model = ModelSpec::Sparse { n: 32, k: 2 };
    let family = MapFamily::TwoStage { stage_one: StageOne::Identity { dim: 32 }, dist: DistSpec::Gaussian, m: 64, p: 2 };
    let table = rip_sweep(&SweepConfig {
        model: &model,
        family: &family,
        m_list: &[32, 64, 128, 256],
        p: 2,
        n_secants: 2000,
        trials: 8,
        seed: 2024,
        mu_mode: MuNormMode::Analytic,
    })?;
    table.write_csv(std::io::stdout())?;
    for row in &table.rows {
        println!("m = {:>3}: delta * sqrt(m) = {:.3}", row.m, row.delta_median * (row.m as f64).sqrt());
    }
    Ok(table)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
