//! Closed-form constants and sample-complexity bounds.
//!
//! Unnamed absolute constants are explicit parameters. Only the main theorem
//! fixes its constant ([`MAIN_THEOREM_CONSTANT`]); everything else defaults to
//! 1 and reports are labelled "per unit constant".

use std::f64::consts::{E, LN_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAIN_THEOREM_CONSTANT: f64 = 3200.0;

/// `2^{3/2} / e`, the constant of the rank-one subexponential norm bound.
pub const ROP_PSI1_CONSTANT: f64 = 2.0 * std::f64::consts::SQRT_2 / E;

/// Smallest truncation index accepted by [`chaining_sums`].
pub const MIN_J_MAX: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Dimension bound `s >= 1`.
    pub s: f64,
    /// Model constant in `(0, 1/2)`.
    pub eps_s: f64,
    /// Target RIP constant in `(0, 1)`.
    pub delta: f64,
    /// Failure probability in `(0, 1)`.
    pub xi: f64,
    /// Subgaussian rate; may be infinite.
    pub c1: f64,
    /// Subexponential rate; may be infinite.
    pub c2: f64,
    pub lambda: f64,
    pub c_abs: f64,
}

impl Default for BoundInputs {
    fn default() -> Self {
        BoundInputs {
            s: 1.0,
            eps_s: 0.25,
            delta: 0.5,
            xi: 0.1,
            c1: 1.0,
            c2: 1.0,
            lambda: 1.0,
            c_abs: MAIN_THEOREM_CONSTANT,
        }
    }
}

fn check_model(s: f64, eps_s: f64, xi: f64) -> Result<()> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::invalid(format!("s = {s} must be finite and at least 1")));
    }
    if !(eps_s > 0.0 && eps_s < 0.5) {
        return Err(Error::invalid(format!("eps_s = {eps_s} must lie in (0, 1/2)")));
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::invalid(format!("xi = {xi} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta = {delta} must lie in (0, 1)")));
    }
    Ok(())
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        check_model(self.s, self.eps_s, self.xi)?;
        check_delta(self.delta)?;
        if self.c1.is_nan() || self.c2.is_nan() || self.c1 < 0.0 || self.c2 < 0.0 {
            return Err(Error::invalid("c1 and c2 must be nonnegative"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda must be positive"));
        }
        if !(self.c_abs > 0.0 && self.c_abs.is_finite()) {
            return Err(Error::invalid("absolute constant must be positive"));
        }
        Ok(())
    }
}

/// Dimension bound and model constant for unit-norm `2k`-sparse signals in
/// `R^n`: `s = 4k`, `eps_s = 2k / (3 e n)`.
pub fn sparse_model_constants(k: usize, n: usize) -> Result<(f64, f64)> {
    if k == 0 || 2 * k > n {
        return Err(Error::invalid(format!("need 1 <= 2k <= n, got k = {k}, n = {n}")));
    }
    Ok((4.0 * k as f64, 2.0 * k as f64 / (3.0 * E * n as f64)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainingSums {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s1_bound: f64,
    pub s2_bound: f64,
    pub s3_bound: f64,
    pub j_max: usize,
    /// Remainder added for the terms beyond `j_max` (S2, S3).
    pub s2_tail: f64,
    pub s3_tail: f64,
}

impl ChainingSums {
    pub fn within_bounds(&self) -> bool {
        self.s1 <= self.s1_bound && self.s2 <= self.s2_bound && self.s3 <= self.s3_bound
    }
}

/// Chaining sums evaluated on the covering majorant
/// `N(eps_s / 2^{j+1}) <= 2^{(j+1)s} eps_s^{-s}`, truncated at `j_max` with the
/// remainder beyond it added in closed form, next to their closed-form bounds.
pub fn chaining_sums(s: f64, eps_s: f64, xi: f64, j_max: usize) -> Result<ChainingSums> {
    check_model(s, eps_s, xi)?;
    if j_max < MIN_J_MAX {
        return Err(Error::invalid(format!("j_max = {j_max} must be at least {MIN_J_MAX}")));
    }
    let log_inv_eps = (1.0 / eps_s).ln();
    let log2xi = (2.0 / xi).ln();
    // log(2^{j+1}/xi * N^2) = c0 + c1 (j + 1)
    let c0 = (1.0 / xi).ln() + 2.0 * s * log_inv_eps;
    let c1 = LN_2 * (1.0 + 2.0 * s);
    let (mut s2, mut s3) = (0.0, 0.0);
    for j in 0..=j_max {
        let w = 2f64.powi(1 - j as i32);
        let t = c0 + c1 * (j as f64 + 1.0);
        s2 += w * t.sqrt();
        s3 += w * t;
    }
    let jf = j_max as f64;
    let s3_tail = c0 * 2f64.powf(1.0 - jf) + c1 * 2f64.powf(-jf) * (2.0 * jf + 6.0);
    // Cauchy-Schwarz against the weights 2^{-j+1}, j > j_max
    let s2_tail = (2f64.powf(1.0 - jf) * s3_tail).sqrt();
    Ok(ChainingSums {
        s1: (log2xi + s * log_inv_eps).sqrt(),
        s2: s2 + s2_tail,
        s3: s3 + s3_tail,
        s1_bound: log2xi.sqrt() + (s * log_inv_eps).sqrt(),
        s2_bound: 8.0 * log2xi.sqrt() + 8.0 * (2.0 * s * LN_2).sqrt() + 4.0 * (2.0 * s * log_inv_eps).sqrt(),
        s3_bound: 8.0 * log2xi + 16.0 * s * LN_2 + 8.0 * s * log_inv_eps,
        j_max,
        s2_tail,
        s3_tail,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexity {
    /// Value before rounding up; infinite when a rate is zero.
    pub pre_ceiling: f64,
    /// Rounded-up number of measurements, `None` when infinite.
    pub m: Option<u64>,
    /// `max{s log(1/eps_s), log(6/xi)}`.
    pub complexity_term: f64,
    /// True when `log(6/xi)` is the larger branch.
    pub xi_dominated: bool,
}

impl SampleComplexity {
    fn from_factor(factor: f64, s: f64, eps_s: f64, xi: f64) -> Self {
        let model = s * (1.0 / eps_s).ln();
        let prob = (6.0 / xi).ln();
        let complexity_term = model.max(prob);
        let pre_ceiling = factor * complexity_term;
        let m = pre_ceiling.is_finite().then(|| pre_ceiling.ceil() as u64);
        SampleComplexity {
            pre_ceiling,
            m,
            complexity_term,
            xi_dominated: prob > model,
        }
    }
}

/// `m = ceil(C / (min(c1, c2) delta^2) * max{s log(1/eps_s), log(6/xi)})`.
pub fn m_main(inputs: &BoundInputs) -> Result<SampleComplexity> {
    inputs.validate()?;
    let rate = inputs.c1.min(inputs.c2);
    let factor = inputs.c_abs / (rate * inputs.delta * inputs.delta);
    Ok(SampleComplexity::from_factor(factor, inputs.s, inputs.eps_s, inputs.xi))
}

/// Measurement count for two-stage maps: factor `max(2L^2, L)` for `p = 1`
/// and `max(8L^4, L^2)` for `p = 2`, in units of the absolute constant `c_abs`.
pub fn m_two_stage(p: u8, lambda: f64, s: f64, eps_s: f64, delta: f64, xi: f64, c_abs: f64) -> Result<SampleComplexity> {
    check_model(s, eps_s, xi)?;
    check_delta(delta)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda must be positive"));
    }
    if !(c_abs > 0.0) {
        return Err(Error::invalid("absolute constant must be positive"));
    }
    let shape = match p {
        1 => (2.0 * lambda * lambda).max(lambda),
        2 => (8.0 * lambda.powi(4)).max(lambda * lambda),
        _ => return Err(Error::invalid(format!("p = {p} must be 1 or 2"))),
    };
    Ok(SampleComplexity::from_factor(c_abs / (delta * delta) * shape, s, eps_s, xi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationConstants {
    pub c1: f64,
    pub c2: f64,
    /// `c2 / c1`, the end of the subgaussian regime.
    pub crossover: f64,
}

/// Rates `(c1, c2)` implied by a ψ-norm ratio bound `lambda`.
pub fn concentration_constants(p: u8, lambda: f64, c_abs: f64) -> Result<ConcentrationConstants> {
    if !(lambda > 0.0 && c_abs > 0.0) {
        return Err(Error::invalid("lambda and the absolute constant must be positive"));
    }
    let (c1, c2) = match p {
        1 => (c_abs / (4.0 * lambda * lambda), c_abs / (2.0 * lambda)),
        2 => (c_abs / (64.0 * lambda.powi(4)), c_abs / (8.0 * lambda * lambda)),
        _ => return Err(Error::invalid(format!("p = {p} must be 1 or 2"))),
    };
    Ok(ConcentrationConstants { c1, c2, crossover: c2 / c1 })
}

/// `ln (2k - 1)!!`.
pub fn ln_double_factorial_odd(k: usize) -> f64 {
    (1..=k).map(|i| ((2 * i - 1) as f64).ln()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleFactorialBracket {
    pub k: usize,
    pub ln_exact: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
}

impl DoubleFactorialBracket {
    pub fn exact(&self) -> f64 {
        self.ln_exact.exp()
    }

    pub fn lower(&self) -> f64 {
        self.ln_lower.exp()
    }

    pub fn upper(&self) -> f64 {
        self.ln_upper.exp()
    }

    pub fn contains_exact(&self) -> bool {
        self.ln_lower <= self.ln_exact && self.ln_exact <= self.ln_upper
    }
}

/// `(2k-1)!! = sqrt(2) 2^k (k/e)^k e^{l_{2k} - l_k}` with Stirling remainders
/// `1/(12k+1) <= l_k <= 1/(12k)`; the bracket takes the extreme remainders.
/// Everything is in log domain.
pub fn double_factorial_bracket(k: usize) -> Result<DoubleFactorialBracket> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let kf = k as f64;
    let base = 0.5 * LN_2 + kf * LN_2 + kf * (kf.ln() - 1.0);
    Ok(DoubleFactorialBracket {
        k,
        ln_exact: ln_double_factorial_odd(k),
        ln_lower: base + 1.0 / (24.0 * kf + 1.0) - 1.0 / (12.0 * kf),
        ln_upper: base + 1.0 / (24.0 * kf) - 1.0 / (12.0 * kf + 1.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MomentSource {
    Gaussian,
    SparsePm { q: f64 },
}

impl MomentSource {
    /// `ln E X^{2k}`.
    pub fn ln_even_moment(&self, k: usize) -> f64 {
        match *self {
            MomentSource::Gaussian => ln_double_factorial_odd(k),
            MomentSource::SparsePm { q } => (k as f64 - 1.0) * q.ln(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaX {
    pub value: f64,
    pub argmax_k: usize,
    /// Ratio `[E X^{2k} / (2k-1)!!]^{1/(2k)}` for `k = 1..=k_max`.
    pub ratios: Vec<f64>,
    /// The maximum sits at `k_max`, so the supremum may be larger.
    pub truncated: bool,
}

/// Smallest `k_max` accepted by [`alpha_x`].
pub const MIN_K_MAX: usize = 8;

/// `sup_k [E X^{2k} / (2k-1)!!]^{1/(2k)}` over `k <= k_max`, from the log even
/// moments `k -> ln E X^{2k}`.
pub fn alpha_x_from_moments(ln_even_moment: impl Fn(usize) -> f64, k_max: usize) -> Result<AlphaX> {
    if k_max < MIN_K_MAX {
        return Err(Error::invalid(format!("k_max = {k_max} must be at least {MIN_K_MAX}")));
    }
    let ratios: Vec<f64> = (1..=k_max)
        .map(|k| ((ln_even_moment(k) - ln_double_factorial_odd(k)) / (2.0 * k as f64)).exp())
        .collect();
    let (idx, value) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    Ok(AlphaX {
        value,
        argmax_k: idx + 1,
        truncated: idx + 1 == k_max,
        ratios,
    })
}

pub fn alpha_x(source: MomentSource, k_max: usize) -> Result<AlphaX> {
    if let MomentSource::SparsePm { q } = source {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::invalid(format!("q = {q} must be at least 1")));
        }
    }
    alpha_x_from_moments(|k| source.ln_even_moment(k), k_max)
}

/// `2^{3/2} e^{-1} alpha^2 |M|_F`.
pub fn rop_psi1_bound(alpha: f64, frobenius_norm: f64) -> Result<f64> {
    if !(alpha >= 0.0 && frobenius_norm >= 0.0) {
        return Err(Error::invalid("inputs must be nonnegative"));
    }
    Ok(ROP_PSI1_CONSTANT * alpha * alpha * frobenius_norm)
}

/// Multiplier `1 / (2 e^3 C (1 + log C))` such that `E|a^T x| >= multiplier * |x|`.
pub fn abs_mean_lower(c_psi: f64) -> Result<f64> {
    if !(c_psi >= 2.0 && c_psi.is_finite()) {
        return Err(Error::invalid(format!("constant C = {c_psi} must be at least 2")));
    }
    Ok(1.0 / (2.0 * E.powi(3) * c_psi * (1.0 + c_psi.ln())))
}

/// `D / (q (1 + log q))`.
pub fn sparse_rop_delta1_floor(q: f64, d_param: f64) -> Result<f64> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::invalid(format!("q = {q} must be at least 2")));
    }
    if !(d_param > 0.0) {
        return Err(Error::invalid("D must be positive"));
    }
    Ok(d_param / (q * (1.0 + q.ln())))
}

/// Largest `D` for which the floor stays below an observed lower value.
pub fn fit_sparse_floor_d(q: f64, observed: f64) -> Result<f64> {
    let unit = sparse_rop_delta1_floor(q, 1.0)?;
    if !(observed > 0.0) {
        return Err(Error::invalid("observed value must be positive"));
    }
    Ok(observed / unit)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: u8,
    pub p: Option<u8>,
    pub inputs: BoundInputs,
    pub m_required: Option<u64>,
    pub m_pre_ceiling: f64,
    pub complexity_term: f64,
    pub xi_dominated: bool,
    pub concentration: Option<ConcentrationConstants>,
    pub sums: ChainingSums,
    /// Set when the absolute constant is a placeholder.
    pub constant_label: String,
}

/// Bundles the sample-complexity bound for theorem 1 (generic RIP), 2 (two
/// stage, `p = 1`) or 3 (two stage, `p = 2`) with the chaining sums.
pub fn bound_report(theorem: u8, inputs: &BoundInputs, j_max: usize) -> Result<BoundReport> {
    inputs.validate()?;
    let sums = chaining_sums(inputs.s, inputs.eps_s, inputs.xi, j_max)?;
    let (p, sc, concentration) = match theorem {
        1 => (None, m_main(inputs)?, None),
        2 | 3 => {
            let p = theorem - 1;
            let sc = m_two_stage(p, inputs.lambda, inputs.s, inputs.eps_s, inputs.delta, inputs.xi, inputs.c_abs)?;
            (Some(p), sc, Some(concentration_constants(p, inputs.lambda, 1.0)?))
        }
        _ => return Err(Error::invalid(format!("theorem = {theorem} must be 1, 2 or 3"))),
    };
    let constant_label = if theorem == 1 && inputs.c_abs == MAIN_THEOREM_CONSTANT {
        "fixed constant".to_string()
    } else {
        "per unit constant".to_string()
    };
    Ok(BoundReport {
        theorem,
        p,
        inputs: *inputs,
        m_required: sc.m,
        m_pre_ceiling: sc.pre_ceiling,
        complexity_term: sc.complexity_term,
        xi_dominated: sc.xi_dominated,
        concentration,
        sums,
        constant_label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn chaining_sums_reference_point() {
        let c = chaining_sums(4.0, 0.25, 0.1, 64).unwrap();
        assert_abs_diff_eq!(c.s1, 2.922483, epsilon = 1e-6);
        assert_abs_diff_eq!(c.s1_bound, 4.085638, epsilon = 1e-6);
        assert_abs_diff_eq!(c.s3_bound, 112.6887, epsilon = 1e-4);
        assert!(c.within_bounds());
    }

    #[test]
    fn chaining_tail_matches_long_sum() {
        // brute-force oracle: the series summed far past j_max
        let (s, eps, xi) = (4.0, 0.25, 0.1);
        let c = chaining_sums(s, eps, xi, 32).unwrap();
        let mut s2 = 0.0;
        let mut s3 = 0.0;
        for j in 0..400 {
            let ln_n = (j as f64 + 1.0) * s * 2f64.ln() - s * eps.ln();
            let t = (j as f64 + 1.0) * 2f64.ln() - xi.ln() + 2.0 * ln_n;
            s2 += 2f64.powi(1 - j) * t.sqrt();
            s3 += 2f64.powi(1 - j) * t;
        }
        assert_abs_diff_eq!(c.s3, s3, epsilon = 1e-9 * s3);
        assert!(c.s2 >= s2 - 1e-12 && c.s2 <= s2 * (1.0 + 1e-6));
        let long = chaining_sums(s, eps, xi, 64).unwrap();
        assert!(long.s3_tail < 1e-9 * long.s3);
    }

    #[test]
    fn chaining_sums_decrease_in_xi() {
        let a = chaining_sums(4.0, 0.25, 0.1, 40).unwrap();
        let b = chaining_sums(4.0, 0.25, 0.5, 40).unwrap();
        assert!(b.s1 < a.s1 && b.s2 < a.s2 && b.s3 < a.s3);
        assert!(chaining_sums(4.0, 0.25, 0.1, 8).is_err());
        assert!(chaining_sums(4.0, 0.5, 0.1, 40).is_err());
    }

    #[test]
    fn m_main_scaling() {
        let inputs = BoundInputs { s: 8.0, eps_s: 0.0076638, ..Default::default() };
        let a = m_main(&inputs).unwrap();
        let b = m_main(&BoundInputs { delta: 0.25, ..inputs }).unwrap();
        assert_abs_diff_eq!(b.pre_ceiling, 4.0 * a.pre_ceiling, epsilon = 1e-6);
        assert_eq!(a.m, Some(a.pre_ceiling.ceil() as u64));
    }

    #[test]
    fn m_main_xi_dominated() {
        let inputs = BoundInputs { s: 1.0, eps_s: 0.49, xi: 1e-6, ..Default::default() };
        let r = m_main(&inputs).unwrap();
        assert!(r.xi_dominated);
        assert_abs_diff_eq!(r.complexity_term, 15.607, epsilon = 1e-3);
    }

    #[test]
    fn m_main_zero_rate_is_infinite() {
        let r = m_main(&BoundInputs { c1: 0.0, ..Default::default() }).unwrap();
        assert!(r.m.is_none() && r.pre_ceiling.is_infinite());
    }

    #[test]
    fn m_two_stage_values() {
        let p1 = m_two_stage(1, 1.0, 4.0, 0.25, 0.5, 0.1, 1.0).unwrap();
        assert_eq!(p1.m, Some(45));
        let p2 = m_two_stage(2, 1.0, 4.0, 0.25, 0.5, 0.1, 1.0).unwrap();
        assert_abs_diff_eq!(p2.pre_ceiling, 4.0 * p1.pre_ceiling, epsilon = 1e-9);
        let half = m_two_stage(1, 0.5, 4.0, 0.25, 0.5, 0.1, 1.0).unwrap();
        assert_abs_diff_eq!(half.pre_ceiling, 4.0 * 0.5 * p1.complexity_term, epsilon = 1e-12);
        assert!(m_two_stage(3, 1.0, 4.0, 0.25, 0.5, 0.1, 1.0).is_err());
    }

    #[test]
    fn concentration_values() {
        let c = concentration_constants(1, 1.0, 1.0).unwrap();
        assert_eq!((c.c1, c.c2, c.crossover), (0.25, 0.5, 2.0));
        let c = concentration_constants(2, 1.0, 1.0).unwrap();
        assert_eq!((c.c1, c.c2, c.crossover), (1.0 / 64.0, 0.125, 8.0));
        assert_abs_diff_eq!(concentration_constants(1, 2.0, 1.0).unwrap().crossover, 4.0);
    }

    #[test]
    fn double_factorial_values() {
        let b = double_factorial_bracket(1).unwrap();
        assert_abs_diff_eq!(b.exact(), 1.0, epsilon = 1e-12);
        assert!(b.contains_exact());
        let b = double_factorial_bracket(3).unwrap();
        assert_abs_diff_eq!(b.exact(), 15.0, epsilon = 1e-10);
        assert!(b.lower() > 14.99 && b.upper() < 15.01);
        let b = double_factorial_bracket(10).unwrap();
        assert_abs_diff_eq!(b.exact(), 654_729_075.0, epsilon = 1e-3);
        assert!(b.contains_exact());
        for k in 1..=50 {
            assert!(double_factorial_bracket(k).unwrap().contains_exact(), "k = {k}");
        }
    }

    #[test]
    fn alpha_values() {
        let g = alpha_x(MomentSource::Gaussian, 64).unwrap();
        assert!(g.ratios.iter().all(|r| (r - 1.0).abs() < 1e-12));
        let p = alpha_x(MomentSource::SparsePm { q: 4.0 }, 64).unwrap();
        assert_abs_diff_eq!(p.value, (4.0f64 / 3.0).powf(0.25), epsilon = 1e-12);
        assert_eq!(p.argmax_k, 2);
        assert!(!p.truncated);
        for q in [2.0, 4.0, 16.0, 64.0] {
            let a = alpha_x(MomentSource::SparsePm { q }, 64).unwrap().value;
            assert!(a >= 1.0 && a <= 1.39 * q.sqrt());
        }
        assert!(alpha_x(MomentSource::Gaussian, 4).is_err());
    }

    #[test]
    fn rop_and_lower_constants() {
        assert_abs_diff_eq!(rop_psi1_bound(1.0, 1.0).unwrap(), 1.040520, epsilon = 1e-6);
        assert_abs_diff_eq!(rop_psi1_bound(1.07457, 1.0).unwrap(), 1.201489, epsilon = 1e-5);
        assert_eq!(rop_psi1_bound(1.3, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(abs_mean_lower(2.0).unwrap(), 0.0073513, epsilon = 1e-7);
        assert_abs_diff_eq!(abs_mean_lower(E).unwrap(), 1.0 / (4.0 * E.powi(4)), epsilon = 1e-15);
        assert!(abs_mean_lower(3.0).unwrap() < abs_mean_lower(2.5).unwrap());
        assert!(abs_mean_lower(1.9).is_err());
    }

    #[test]
    fn sparse_floor_values() {
        assert_abs_diff_eq!(sparse_rop_delta1_floor(2.0, 1.0).unwrap(), 0.2953081, epsilon = 1e-7);
        assert_abs_diff_eq!(sparse_rop_delta1_floor(4.0, 1.0).unwrap(), 0.1047649, epsilon = 1e-7);
        assert!(sparse_rop_delta1_floor(1.5, 1.0).is_err());
        let d = fit_sparse_floor_d(4.0, 0.25).unwrap();
        assert_abs_diff_eq!(d, 1.0 + 4f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn sparse_constants() {
        let (s, eps) = sparse_model_constants(2, 64).unwrap();
        assert_eq!(s, 8.0);
        assert_abs_diff_eq!(eps, 4.0 / (192.0 * E), epsilon = 1e-15);
    }

    #[test]
    fn report_labels() {
        let r = bound_report(1, &BoundInputs { s: 4.0, ..Default::default() }, 64).unwrap();
        assert_eq!(r.constant_label, "fixed constant");
        let r = bound_report(3, &BoundInputs { s: 4.0, c_abs: 1.0, ..Default::default() }, 64).unwrap();
        assert_eq!(r.constant_label, "per unit constant");
        assert_eq!(r.p, Some(2));
        assert!(bound_report(4, &BoundInputs::default(), 64).is_err());
    }
}
