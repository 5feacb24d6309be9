//! Moment-method ψ-norms and empirical concentration tails.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rip_estimator::MapFamily;
use crate::rng::{derive, substream, StreamRng};
use crate::stats::mean_and_se;
use crate::vector::Vector;

pub const DEFAULT_Q_MAX: u32 = 20;

/// Smallest number of Monte-Carlo trials accepted by the tail estimators.
pub const MIN_TRIALS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiNorm {
    pub value: f64,
    pub argmax_q: u32,
    /// `q^{-1/alpha} (E|X|^q)^{1/q}` for `q = 1..=q_max`.
    pub per_q: Vec<f64>,
    /// The maximum sits at `q_max`, so the supremum may be larger.
    pub truncated: bool,
}

fn check_psi(alpha: u8, q_max: u32) -> Result<()> {
    if alpha != 1 && alpha != 2 {
        return Err(Error::invalid(format!("alpha = {alpha} must be 1 or 2")));
    }
    if q_max < 2 {
        return Err(Error::invalid("q_max must be at least 2"));
    }
    Ok(())
}

fn psi_from_ln_moments(ln_moment: impl Fn(u32) -> f64, alpha: u8, q_max: u32) -> PsiNorm {
    let per_q: Vec<f64> = (1..=q_max)
        .map(|q| {
            let qf = q as f64;
            (ln_moment(q) / qf - qf.ln() / alpha as f64).exp()
        })
        .collect();
    let (idx, value) = per_q
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    PsiNorm {
        value,
        argmax_q: idx as u32 + 1,
        truncated: idx as u32 + 1 == q_max,
        per_q,
    }
}

/// ψ-norm from exact absolute moments, given as `q -> ln E|X|^q`.
pub fn psi_norm_exact(ln_abs_moment: impl Fn(u32) -> f64, alpha: u8, q_max: u32) -> Result<PsiNorm> {
    check_psi(alpha, q_max)?;
    Ok(psi_from_ln_moments(ln_abs_moment, alpha, q_max))
}

/// ψ-norm from empirical absolute moments of `samples`.
pub fn psi_norm_mc(samples: &[f64], alpha: u8, q_max: u32) -> Result<PsiNorm> {
    check_psi(alpha, q_max)?;
    if samples.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    let n = samples.len() as f64;
    // log-sum-exp keeps high moments finite
    let ln_moment = |q: u32| {
        let logs: Vec<f64> = samples.iter().map(|x| q as f64 * x.abs().ln()).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        top + (logs.iter().map(|l| (l - top).exp()).sum::<f64>() / n).ln()
    };
    Ok(psi_from_ln_moments(ln_moment, alpha, q_max))
}

/// `ln E|N|^q`: `(q-1)!!` for even `q`, `2^{q/2} ((q-1)/2)! / sqrt(pi)` for odd `q`.
pub fn ln_abs_moment_normal(q: u32) -> f64 {
    if q.is_multiple_of(2) {
        (1..q).step_by(2).map(|i| (i as f64).ln()).sum()
    } else {
        let half_fact: f64 = (1..=(q - 1) / 2).map(|i| (i as f64).ln()).sum();
        q as f64 / 2.0 * std::f64::consts::LN_2 + half_fact - 0.5 * std::f64::consts::PI.ln()
    }
}

pub fn ln_abs_moment_rademacher(_q: u32) -> f64 {
    0.0
}

/// `ln E X^q = ln q!` for `X ~ Exp(1)`.
pub fn ln_abs_moment_exponential(q: u32) -> f64 {
    (1..=q).map(|i| (i as f64).ln()).sum()
}

/// `ln E|P|^j = ln(q^{j/2} / q)` for the sparse ± variable with parameter `q`.
pub fn ln_abs_moment_sparse_pm(q: f64) -> impl Fn(u32) -> f64 {
    move |j| (j as f64 / 2.0 - 1.0) * q.ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rate {
    Finite(f64),
    /// The regime's empirical tail is identically zero on the grid.
    Unbounded,
    /// No grid point falls in the regime.
    NoData,
}

impl Rate {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Rate::Finite(c) => Some(*c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub lambda_grid: Vec<f64>,
    pub tail: Vec<f64>,
    pub c1: Rate,
    pub c2: Rate,
    /// Boundary between the two regimes used by the final fit.
    pub crossover: f64,
    pub trials: usize,
    pub m: usize,
}

impl TailFit {
    /// The smaller finite rate, the single constant of a one-parameter bound.
    pub fn combined_rate(&self) -> Option<f64> {
        match (self.c1.finite(), self.c2.finite()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::invalid("grid needs at least two points"));
    }
    if grid.iter().any(|l| !(*l >= 0.0 && l.is_finite())) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid must be nonnegative and strictly ascending"));
    }
    Ok(())
}

fn empirical_tail(stats: &[f64], grid: &[f64]) -> Vec<f64> {
    let mut sorted = stats.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    grid.iter()
        .map(|l| {
            let below = sorted.partition_point(|v| v < l);
            (sorted.len() - below) as f64 / n
        })
        .collect()
}

/// Largest rate `c` with `tail <= 2 exp(-c m g(lambda))` at every grid point
/// of the regime that has a positive tail.
fn majorant_rate(grid: &[f64], tail: &[f64], m: usize, shape: impl Fn(f64) -> f64, in_regime: impl Fn(f64) -> bool) -> Rate {
    let pts: Vec<(f64, f64)> = grid.iter().zip(tail).filter(|(l, _)| **l > 0.0 && in_regime(**l)).map(|(l, t)| (*l, *t)).collect();
    if pts.is_empty() {
        return Rate::NoData;
    }
    pts.iter()
        .filter(|(_, t)| *t > 0.0)
        .map(|(l, t)| -(t / 2.0).ln() / (m as f64 * shape(*l)))
        .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.min(c))))
        .map_or(Rate::Unbounded, Rate::Finite)
}

/// Fits `tail <= 2 exp(-c1 m l^2)` below the crossover and
/// `tail <= 2 exp(-c2 m l)` above it. The crossover starts at the grid median
/// and is moved to `c2 / c1` twice.
fn fit_two_regimes(grid: &[f64], tail: &[f64], m: usize) -> Result<(Rate, Rate, f64)> {
    if grid.iter().zip(tail).all(|(l, t)| *l == 0.0 || *t == 0.0) {
        return Err(Error::FitFailure("empirical tail is zero at every positive grid point".into()));
    }
    let positive: Vec<f64> = grid.iter().copied().filter(|l| *l > 0.0).collect();
    let mut split = positive[positive.len() / 2];
    for _ in 0..2 {
        let c1 = majorant_rate(grid, tail, m, |l| l * l, |l| l <= split);
        let c2 = majorant_rate(grid, tail, m, |l| l, |l| l > split);
        if let (Rate::Finite(a), Rate::Finite(b)) = (c1, c2) {
            split = b / a;
        }
    }
    let c1 = majorant_rate(grid, tail, m, |l| l * l, |l| l <= split);
    let c2 = majorant_rate(grid, tail, m, |l| l, |l| l > split);
    Ok((c1, c2, split))
}

pub struct IncrementProbe<'a> {
    pub family: &'a MapFamily,
    pub p: u8,
    pub y: &'a Vector,
    pub z: &'a Vector,
    /// μ-norms of `y` and `z`.
    pub mu_y: f64,
    pub mu_z: f64,
    pub lambda_grid: &'a [f64],
    pub trials: usize,
    pub seed: u64,
}

/// Empirical `P{|h(y) - h(z)| >= lambda |y - z|}` with
/// `h(x) = |L(x)|_p^p - |x|_{mu,p}^p`, over `trials` independent maps.
pub fn increment_tail_fit(probe: &IncrementProbe) -> Result<TailFit> {
    check_grid(probe.lambda_grid)?;
    if probe.trials < MIN_TRIALS {
        return Err(Error::invalid(format!("trials must be at least {MIN_TRIALS}")));
    }
    let gap = probe.y.distance(probe.z);
    if gap == 0.0 {
        return Err(Error::invalid("y and z must differ"));
    }
    let stats = (0..probe.trials as u64)
        .into_par_iter()
        .map(|t| {
            let map = probe.family.draw(derive(probe.seed, &[t]))?;
            let hy = map.pnorm_p(probe.y.as_slice(), probe.p)? - probe.mu_y;
            let hz = map.pnorm_p(probe.z.as_slice(), probe.p)? - probe.mu_z;
            Ok((hy - hz).abs() / gap)
        })
        .collect::<Result<Vec<f64>>>()?;
    let tail = empirical_tail(&stats, probe.lambda_grid);
    let m = probe.family.m();
    let (c1, c2, crossover) = fit_two_regimes(probe.lambda_grid, &tail, m)?;
    Ok(TailFit { lambda_grid: probe.lambda_grid.to_vec(), tail, c1, c2, crossover, trials: probe.trials, m })
}

/// Empirical `P{|mean of m draws| >= t}`. Rates are reported in the form
/// `2 exp(-c m t^2 / K^2)` for `t <= K` (`c1`) and `2 exp(-c m t / K)` for
/// `t > K` (`c2`).
pub fn bernstein_tail_check<F>(sampler: F, k_psi: f64, m: usize, t_grid: &[f64], trials: usize, seed: u64) -> Result<TailFit>
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    check_grid(t_grid)?;
    if !(k_psi > 0.0) {
        return Err(Error::invalid("K must be positive"));
    }
    if m == 0 || trials < MIN_TRIALS {
        return Err(Error::invalid(format!("need m >= 1 and trials >= {MIN_TRIALS}")));
    }
    let means: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, &[t]);
            (0..m).map(|_| sampler(&mut rng)).sum::<f64>() / m as f64
        })
        .collect();
    let (mean, std_error) = mean_and_se(&means);
    if mean.abs() > 3.0 * std_error {
        return Err(Error::NotCentered { mean, std_error });
    }
    let abs: Vec<f64> = means.iter().map(|v| v.abs()).collect();
    let tail = empirical_tail(&abs, t_grid);
    if t_grid.iter().zip(&tail).all(|(l, t)| *l == 0.0 || *t == 0.0) {
        return Err(Error::FitFailure("empirical tail is zero at every positive grid point".into()));
    }
    let k2 = k_psi * k_psi;
    let c1 = majorant_rate(t_grid, &tail, m, |t| t * t / k2, |t| t <= k_psi);
    let c2 = majorant_rate(t_grid, &tail, m, |t| t / k_psi, |t| t > k_psi);
    Ok(TailFit { lambda_grid: t_grid.to_vec(), tail, c1, c2, crossover: k_psi, trials, m })
}
