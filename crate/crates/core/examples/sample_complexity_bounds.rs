// How many measurements the theory asks for.
//
// `k`-sparse vectors in `R^n` have secant covering constants `s = 4k`,
// `eps_S = 2k / (3en)`. With the universal constant 3200 the required `m`
// is large even for small problems; the chaining sums behind it stay below
// their closed-form bounds.

use stable_embed::bounds::{
    bound_report, chaining_sums, concentration_constants, m_main, sparse_model_constants, BoundInputs,
};

pub struct Summary {
    pub m_sparse: u64,
    pub halving_ratio: f64,
    pub s1: f64,
}

pub fn run_example() -> Result<Summary, Box<dyn std::error::Error>> {
    let (s, eps_s) = sparse_model_constants(2, 64)?;
    println!("k = 2, n = 64: s = {s}, eps_S = {eps_s:.7}");

    let inputs = BoundInputs { s, eps_s, delta: 0.5, xi: 0.1, ..Default::default() };
    let base = m_main(&inputs)?;
    let half = m_main(&BoundInputs { delta: 0.25, ..inputs })?;
    let m_sparse = base.m.expect("finite rates");
    println!("generic bound: m = {m_sparse} (delta = 0.5), {} (delta = 0.25)", half.m.unwrap());
    let halving_ratio = half.pre_ceiling / base.pre_ceiling;

    let sums = chaining_sums(4.0, 0.25, 0.1, 64)?;
    println!(
        "chaining sums at s = 4, eps_S = 0.25, xi = 0.1: S1 = {:.4} <= {:.4}, S2 = {:.3} <= {:.3}, S3 = {:.3} <= {:.3}",
        sums.s1, sums.s1_bound, sums.s2, sums.s2_bound, sums.s3, sums.s3_bound
    );

    for p in [1, 2] {
        let c = concentration_constants(p, 1.5, 1.0)?;
        println!("p = {p}, Lambda = 1.5: c1 = {:.4}, c2 = {:.4}", c.c1, c.c2);
    }
    let report = bound_report(2, &BoundInputs { c_abs: 1.0, lambda: 1.5, ..inputs }, 64)?;
    println!("two-stage p = 1 bound ({}): m = {:?}", report.constant_label, report.m_required);

    Ok(Summary { m_sparse, halving_ratio, s1: sums.s1 })
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
