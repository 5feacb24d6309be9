//! Empirical restricted-isometry constants.
//!
//! The supremum over a model set is replaced by a maximum over sampled
//! secants, so every reported constant is a lower bound on the true one.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embeddings::{DistSpec, MeasurementMap, StageOne};
use crate::error::{Error, Result};
use crate::model_sets::{model_secants, unflatten, ModelSpec, SecantSample, DEFAULT_MIN_GAP};
use crate::rng::derive;
use crate::stats::{mean_and_se, quantile, std_dev};

pub const DEFAULT_N_RESAMPLE: usize = 2000;

/// Largest `|rows| + |cols|` support enumerated exactly for discrete rank-one
/// expectations.
pub const MAX_ENUMERATED_SUPPORT: usize = 10;

const MU_KEY: u64 = 0x6d75;
const SECANT_KEY: u64 = 0x7365;

/// A distribution over measurement maps; [`MapFamily::draw`] picks one.
#[derive(Clone, Debug)]
pub enum MapFamily {
    TwoStage { stage_one: StageOne, dist: DistSpec, m: usize, p: u8 },
    RankOne { dist: DistSpec, m: usize, n1: usize, n2: usize },
}

impl MapFamily {
    pub fn draw(&self, seed: u64) -> Result<MeasurementMap> {
        match self {
            MapFamily::TwoStage { stage_one, dist, m, p } => MeasurementMap::two_stage(stage_one.clone(), *dist, *m, *p, seed),
            MapFamily::RankOne { dist, m, n1, n2 } => MeasurementMap::rank_one(*m, *n1, *n2, *dist, seed),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            MapFamily::TwoStage { m, .. } | MapFamily::RankOne { m, .. } => *m,
        }
    }

    pub fn with_m(&self, m: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            MapFamily::TwoStage { m: mm, .. } | MapFamily::RankOne { m: mm, .. } => *mm = m,
        }
        out
    }

    pub fn dist(&self) -> DistSpec {
        match self {
            MapFamily::TwoStage { dist, .. } | MapFamily::RankOne { dist, .. } => *dist,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MuNormMode {
    Analytic,
    MonteCarlo { n_resample: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct MuNormSpec {
    pub family: MapFamily,
    pub p: u8,
    pub mode: MuNormMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuNorm {
    /// `E |L(x)|_p^p`.
    pub value: f64,
    /// Standard error for Monte-Carlo estimates.
    pub std_error: Option<f64>,
}

fn check_p(p: u8) -> Result<()> {
    if p != 1 && p != 2 {
        return Err(Error::invalid(format!("p = {p} must be 1 or 2")));
    }
    Ok(())
}

/// Closed-form `E|L(x)|_p^p` for the supported (distribution, family, p)
/// combinations:
///
/// - two-stage, any unit-variance distribution, `p = 2`: `|b(x)|_2^2`;
/// - two-stage, Gaussian, `p = 1`: `sqrt(2/pi) |b(x)|_2`;
/// - rank-one, any unit-variance distribution, `p = 2`: `|M|_F^2 / m`;
/// - rank-one, Gaussian, `p = 1`, `M` of rank one: `(2/pi) |M|_F`;
/// - rank-one, sparse ±, `p = 1`, small support: exact enumeration.
pub fn analytic_mu_pnorm(family: &MapFamily, x: &[f64], p: u8) -> Result<f64> {
    check_p(p)?;
    match (family, p) {
        (MapFamily::TwoStage { p: fp, .. }, _) if *fp != p => {
            Err(Error::invalid(format!("family scaling p = {fp} differs from requested p = {p}")))
        }
        (MapFamily::TwoStage { stage_one, .. }, 2) => Ok(stage_one.apply(x)?.norm_squared()),
        (MapFamily::TwoStage { stage_one, dist: DistSpec::Gaussian, .. }, 1) => {
            Ok((2.0 / PI).sqrt() * stage_one.apply(x)?.norm())
        }
        (MapFamily::RankOne { m, n1, n2, .. }, 2) => {
            let mat = unflatten(x, *n1, *n2)?;
            Ok(mat.norm_squared() / *m as f64)
        }
        (MapFamily::RankOne { dist: DistSpec::Gaussian, n1, n2, .. }, 1) => {
            let mat = unflatten(x, *n1, *n2)?;
            let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            let top = sv[0];
            let rest = sv.get(1).copied().unwrap_or(0.0);
            if top == 0.0 {
                return Ok(0.0);
            }
            if rest > 1e-12 * top {
                return Err(Error::UnsupportedAnalytic("Gaussian rank-one p = 1 with rank above one".into()));
            }
            Ok(2.0 / PI * top)
        }
        (MapFamily::RankOne { dist: dist @ DistSpec::SparsePm { .. }, n1, n2, .. }, 1) => {
            sparse_rank_one_abs_mean(*dist, x, *n1, *n2)
        }
        _ => Err(Error::UnsupportedAnalytic(format!("{:?} with p = {p}", family.dist()))),
    }
}

/// `E|a^T M b|` for discrete `a, b` by enumerating the atoms on the rows and
/// columns that carry nonzero entries of `M`.
fn sparse_rank_one_abs_mean(dist: DistSpec, x: &[f64], n1: usize, n2: usize) -> Result<f64> {
    let mat = unflatten(x, n1, n2)?;
    let rows: Vec<usize> = (0..n1).filter(|&i| mat.row(i).iter().any(|v| *v != 0.0)).collect();
    let cols: Vec<usize> = (0..n2).filter(|&j| mat.column(j).iter().any(|v| *v != 0.0)).collect();
    if rows.len() + cols.len() > MAX_ENUMERATED_SUPPORT {
        return Err(Error::UnsupportedAnalytic(format!(
            "support of {} rows and {} columns is too large to enumerate",
            rows.len(),
            cols.len()
        )));
    }
    let atoms = dist.atoms().ok_or_else(|| Error::UnsupportedAnalytic("continuous distribution".into()))?;
    let vars = rows.len() + cols.len();
    let mut total = 0.0;
    let mut idx = vec![0usize; vars];
    loop {
        let mut prob = 1.0;
        let mut vals = Vec::with_capacity(vars);
        for &i in &idx {
            prob *= atoms[i].1;
            vals.push(atoms[i].0);
        }
        let (a, b) = vals.split_at(rows.len());
        let mut form = 0.0;
        for (ai, &r) in a.iter().zip(&rows) {
            for (bj, &c) in b.iter().zip(&cols) {
                form += ai * mat[(r, c)] * bj;
            }
        }
        total += prob * form.abs();
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == vars {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < atoms.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Monte-Carlo `E|L(x)|_p^p` over `n_resample` independent map draws.
pub fn monte_carlo_mu_pnorm(family: &MapFamily, x: &[f64], p: u8, n_resample: usize, seed: u64) -> Result<MuNorm> {
    check_p(p)?;
    if n_resample < 2 {
        return Err(Error::invalid("n_resample must be at least 2"));
    }
    let values = (0..n_resample as u64)
        .into_par_iter()
        .map(|j| family.draw(derive(seed, &[MU_KEY, j]))?.pnorm_p(x, p))
        .collect::<Result<Vec<f64>>>()?;
    let (value, se) = mean_and_se(&values);
    Ok(MuNorm { value, std_error: Some(se) })
}

pub fn mu_pnorm(spec: &MuNormSpec, x: &[f64]) -> Result<MuNorm> {
    match spec.mode {
        MuNormMode::Analytic => Ok(MuNorm { value: analytic_mu_pnorm(&spec.family, x, spec.p)?, std_error: None }),
        MuNormMode::MonteCarlo { n_resample, seed } => monte_carlo_mu_pnorm(&spec.family, x, spec.p, n_resample, seed),
    }
}

/// μ-norms of every secant.
pub fn secant_mu_pnorms(spec: &MuNormSpec, secants: &[SecantSample]) -> Result<Vec<f64>> {
    secants.par_iter().map(|s| mu_pnorm(spec, s.direction.as_slice()).map(|m| m.value)).collect()
}

/// `(min, max)` of the μ-norm over the sampled secants.
pub fn delta_extremes(spec: &MuNormSpec, secants: &[SecantSample]) -> Result<(f64, f64)> {
    let mu = secant_mu_pnorms(spec, secants)?;
    extremes(&mu)
}

fn extremes(mu: &[f64]) -> Result<(f64, f64)> {
    if mu.is_empty() {
        return Err(Error::invalid("no secants"));
    }
    Ok(mu.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipReport {
    /// Largest deviation `| |L(z)|_p^p - |z|_{mu,p}^p |` over the sample.
    pub delta_p: f64,
    pub witness: SecantSample,
    pub witness_index: usize,
    pub under_delta: f64,
    pub bar_delta: f64,
    /// Smallest and largest measured `|L(z)|_p^p`.
    pub min_measured: f64,
    pub max_measured: f64,
    pub m: usize,
    pub p: u8,
    pub n_secants: usize,
    pub trials: usize,
    pub seed: Option<u64>,
    /// `delta_p < under_delta` on the sample; no probabilistic guarantee.
    pub rip_holds: bool,
}

/// Sample-based restricted-isometry constant of a fixed map.
pub fn empirical_delta(map: &MeasurementMap, secants: &[SecantSample], p: u8, mu: &[f64]) -> Result<RipReport> {
    check_p(p)?;
    if secants.is_empty() {
        return Err(Error::invalid("no secants"));
    }
    if mu.len() != secants.len() {
        return Err(Error::DimensionMismatch { expected: secants.len(), found: mu.len() });
    }
    let measured = secants
        .par_iter()
        .map(|s| map.pnorm_p(s.direction.as_slice(), p))
        .collect::<Result<Vec<f64>>>()?;
    let (mut delta, mut witness_index) = (f64::NEG_INFINITY, 0);
    for (i, (l, u)) in measured.iter().zip(mu).enumerate() {
        let dev = (l - u).abs();
        if dev > delta {
            delta = dev;
            witness_index = i;
        }
    }
    let (under_delta, bar_delta) = extremes(mu)?;
    let (min_measured, max_measured) = extremes(&measured)?;
    Ok(RipReport {
        delta_p: delta,
        witness: secants[witness_index].clone(),
        witness_index,
        under_delta,
        bar_delta,
        min_measured,
        max_measured,
        m: map.m(),
        p,
        n_secants: secants.len(),
        trials: 1,
        seed: map.descriptor().seed,
        rip_holds: delta < under_delta,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub delta_median: f64,
    pub delta_q1: f64,
    pub delta_q3: f64,
    pub trials: usize,
    pub p: u8,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Per-row δ of every trial, in trial order.
    pub deltas: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub struct SweepConfig<'a> {
    pub model: &'a ModelSpec,
    /// Family template; its `m` is replaced by each entry of `m_list`.
    pub family: &'a MapFamily,
    pub m_list: &'a [usize],
    pub p: u8,
    pub n_secants: usize,
    pub trials: usize,
    pub seed: u64,
    pub mu_mode: MuNormMode,
}

/// δ across a grid of `m`: the same secant sample for every map, `trials`
/// independent maps per `m` drawn from the substream `(seed, m, trial)`.
pub fn rip_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    check_p(cfg.p)?;
    if cfg.m_list.is_empty() || cfg.m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("m_list must be non-empty and strictly ascending"));
    }
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let set = model_secants(cfg.model, cfg.n_secants, DEFAULT_MIN_GAP, derive(cfg.seed, &[SECANT_KEY]))?;
    let mut rows = Vec::with_capacity(cfg.m_list.len());
    let mut deltas = Vec::with_capacity(cfg.m_list.len());
    for &m in cfg.m_list {
        let family = cfg.family.with_m(m);
        let spec = MuNormSpec { family: family.clone(), p: cfg.p, mode: cfg.mu_mode };
        let mu = secant_mu_pnorms(&spec, &set.secants)?;
        let ds = (0..cfg.trials as u64)
            .map(|t| {
                let map = family.draw(derive(cfg.seed, &[m as u64, t]))?;
                Ok(empirical_delta(&map, &set.secants, cfg.p, &mu)?.delta_p)
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(SweepRow {
            m,
            delta_median: quantile(&ds, 0.5),
            delta_q1: quantile(&ds, 0.25),
            delta_q3: quantile(&ds, 0.75),
            trials: cfg.trials,
            p: cfg.p,
            seed: cfg.seed,
        });
        deltas.push(ds);
    }
    Ok(SweepTable { rows, deltas })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub std_dev: f64,
    pub maps: usize,
}

/// Mean and standard deviation of `|L(x)|_p^p` across `maps` independent draws.
pub fn measurement_spread(family: &MapFamily, x: &[f64], p: u8, maps: usize, seed: u64) -> Result<Spread> {
    check_p(p)?;
    if maps < 2 {
        return Err(Error::invalid("maps must be at least 2"));
    }
    let values = (0..maps as u64)
        .into_par_iter()
        .map(|j| family.draw(derive(seed, &[family.m() as u64, j]))?.pnorm_p(x, p))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Spread { mean: mean_and_se(&values).0, std_dev: std_dev(&values), maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::StageOneMap;
    use crate::model_sets::{all_pair_secants, normalized_secants, sample_sparse_unit};
    use crate::vector::Vector;
    use approx::assert_abs_diff_eq;

    fn gaussian_family(n: usize, m: usize, p: u8) -> MapFamily {
        MapFamily::TwoStage { stage_one: StageOne::Identity { dim: n }, dist: DistSpec::Gaussian, m, p }
    }

    fn sparse_secants(n: usize, k: usize, count: usize, seed: u64) -> Vec<SecantSample> {
        let pts = sample_sparse_unit(n, k, 200, seed).unwrap();
        normalized_secants(&pts, count, DEFAULT_MIN_GAP, seed).unwrap()
    }

    fn e11(n1: usize, n2: usize) -> Vec<f64> {
        let mut x = vec![0.0; n1 * n2];
        x[0] = 1.0;
        x
    }

    #[test]
    fn identity_map_has_zero_delta() {
        let secants = sparse_secants(6, 2, 50, 1);
        let mu: Vec<f64> = secants.iter().map(|s| s.direction.norm().powi(2)).collect();
        let r = empirical_delta(&MeasurementMap::identity(6).unwrap(), &secants, 2, &mu).unwrap();
        assert!(r.delta_p < 1e-12);
    }

    #[test]
    fn zero_map_delta_equals_mu() {
        let secants = sparse_secants(6, 2, 50, 2);
        let mu = vec![1.0; secants.len()];
        let r = empirical_delta(&MeasurementMap::zero(3, 6).unwrap(), &secants, 2, &mu).unwrap();
        assert_eq!(r.delta_p, 1.0);
        assert!(!r.rip_holds);
    }

    #[test]
    fn analytic_two_stage_values() {
        let fam = gaussian_family(4, 10, 2);
        let x = [0.5, -0.5, 0.5, 0.5];
        assert_abs_diff_eq!(analytic_mu_pnorm(&fam, &x, 2).unwrap(), 1.0, epsilon = 1e-15);
        let fam1 = gaussian_family(4, 10, 1);
        assert_abs_diff_eq!(analytic_mu_pnorm(&fam1, &x, 1).unwrap(), (2.0 / PI).sqrt(), epsilon = 1e-15);
        assert!(analytic_mu_pnorm(&fam, &x, 1).is_err());
        let sparse1 = MapFamily::TwoStage { stage_one: StageOne::Identity { dim: 4 }, dist: DistSpec::SparsePm { q: 2.0 }, m: 5, p: 1 };
        assert!(matches!(analytic_mu_pnorm(&sparse1, &x, 1), Err(Error::UnsupportedAnalytic(_))));
    }

    #[test]
    fn analytic_rank_one_values() {
        let g = MapFamily::RankOne { dist: DistSpec::Gaussian, m: 8, n1: 3, n2: 3 };
        assert_abs_diff_eq!(analytic_mu_pnorm(&g, &e11(3, 3), 1).unwrap(), 2.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(analytic_mu_pnorm(&g, &e11(3, 3), 2).unwrap(), 1.0 / 8.0, epsilon = 1e-15);
        let mut full = e11(3, 3);
        full[4] = 1.0;
        assert!(matches!(analytic_mu_pnorm(&g, &full, 1), Err(Error::UnsupportedAnalytic(_))));
        for q in [2.0, 4.0] {
            let s = MapFamily::RankOne { dist: DistSpec::SparsePm { q }, m: 8, n1: 3, n2: 3 };
            assert_abs_diff_eq!(analytic_mu_pnorm(&s, &e11(3, 3), 1).unwrap(), 1.0 / q, epsilon = 1e-12);
        }
    }

    #[test]
    fn sparse_enumeration_matches_brute_force() {
        // independent oracle: sum over all joint atom choices of a and b
        let q: f64 = 3.0;
        let atoms = [(q.sqrt(), 0.5 / q), (-q.sqrt(), 0.5 / q), (0.0, (q - 1.0) / q)];
        let m = [0.3, -0.7, 0.2, 0.5];
        let mut expect = 0.0;
        for a0 in atoms {
            for a1 in atoms {
                for b0 in atoms {
                    for b1 in atoms {
                        let v = a0.0 * (m[0] * b0.0 + m[1] * b1.0) + a1.0 * (m[2] * b0.0 + m[3] * b1.0);
                        expect += a0.1 * a1.1 * b0.1 * b1.1 * v.abs();
                    }
                }
            }
        }
        let got = sparse_rank_one_abs_mean(DistSpec::SparsePm { q }, &m, 2, 2).unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-14);
    }

    #[test]
    fn analytic_agrees_with_monte_carlo() {
        let x = Vector::new(vec![0.6, 0.0, -0.8, 0.0]).unwrap();
        let cases = [
            (gaussian_family(4, 16, 2), 2u8, x.as_slice().to_vec()),
            (gaussian_family(4, 16, 1), 1, x.as_slice().to_vec()),
            (MapFamily::RankOne { dist: DistSpec::Gaussian, m: 16, n1: 2, n2: 2 }, 1, x.as_slice().to_vec()),
            (MapFamily::RankOne { dist: DistSpec::Gaussian, m: 16, n1: 2, n2: 2 }, 2, x.as_slice().to_vec()),
            (MapFamily::RankOne { dist: DistSpec::SparsePm { q: 2.0 }, m: 16, n1: 2, n2: 2 }, 1, x.as_slice().to_vec()),
        ];
        for (i, (fam, p, x)) in cases.iter().enumerate() {
            let exact = analytic_mu_pnorm(fam, x, *p).unwrap();
            let mc = monte_carlo_mu_pnorm(fam, x, *p, DEFAULT_N_RESAMPLE, 5).unwrap();
            let se = mc.std_error.unwrap();
            assert!((mc.value - exact).abs() <= 4.0 * se, "case {i}: {} vs {exact} (se {se})", mc.value);
        }
    }

    #[test]
    fn delta_is_monotone_in_sample() {
        let secants = sparse_secants(10, 2, 200, 3);
        let fam = gaussian_family(10, 20, 2);
        let map = fam.draw(9).unwrap();
        let spec = MuNormSpec { family: fam, p: 2, mode: MuNormMode::Analytic };
        let mu = secant_mu_pnorms(&spec, &secants).unwrap();
        let mut prev = 0.0;
        for n in [10, 50, 100, 200] {
            let d = empirical_delta(&map, &secants[..n], 2, &mu[..n]).unwrap().delta_p;
            assert!(d >= prev);
            prev = d;
        }
    }

    #[test]
    fn sandwich_holds() {
        let secants = sparse_secants(10, 2, 300, 4);
        let fam = gaussian_family(10, 12, 1);
        let spec = MuNormSpec { family: fam.clone(), p: 1, mode: MuNormMode::Analytic };
        let mu = secant_mu_pnorms(&spec, &secants).unwrap();
        let r = empirical_delta(&fam.draw(2).unwrap(), &secants, 1, &mu).unwrap();
        assert!(r.under_delta - r.delta_p <= r.min_measured + 1e-12);
        assert!(r.max_measured <= r.bar_delta + r.delta_p + 1e-12);
        assert!(r.under_delta <= r.bar_delta);
    }

    #[test]
    fn extremes_for_isotropic_maps() {
        let secants = sparse_secants(8, 2, 100, 5);
        let spec = MuNormSpec { family: gaussian_family(8, 10, 2), p: 2, mode: MuNormMode::Analytic };
        let (lo, hi) = delta_extremes(&spec, &secants).unwrap();
        assert_abs_diff_eq!(lo, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stage_one_mu_norm_is_euclidean_image() {
        let s1 = StageOneMap::new(nalgebra::DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0])).unwrap();
        let fam = MapFamily::TwoStage { stage_one: StageOne::basis(s1), dist: DistSpec::Gaussian, m: 4, p: 2 };
        let x = [1.0, 0.0, 0.0];
        assert_abs_diff_eq!(analytic_mu_pnorm(&fam, &x, 2).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn sweep_single_row_matches_delta() {
        let model = ModelSpec::Sparse { n: 8, k: 2 };
        let fam = gaussian_family(8, 16, 2);
        let cfg = SweepConfig {
            model: &model,
            family: &fam,
            m_list: &[16],
            p: 2,
            n_secants: 100,
            trials: 1,
            seed: 3,
            mu_mode: MuNormMode::Analytic,
        };
        let table = rip_sweep(&cfg).unwrap();
        let set = model_secants(&model, 100, DEFAULT_MIN_GAP, derive(3, &[SECANT_KEY])).unwrap();
        let map = fam.draw(derive(3, &[16, 0])).unwrap();
        let mu = vec![1.0; 100];
        let r = empirical_delta(&map, &set.secants, 2, &mu).unwrap();
        assert_abs_diff_eq!(table.rows[0].delta_median, r.delta_p, epsilon = 1e-12);
        assert_abs_diff_eq!(table.rows[0].delta_q1, r.delta_p, epsilon = 1e-12);

        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("m,delta_median,delta_q1,delta_q3,trials,p,seed\n"));
    }

    #[test]
    fn sweep_rejects_unsorted_grid() {
        let model = ModelSpec::Sparse { n: 8, k: 2 };
        let fam = gaussian_family(8, 16, 2);
        let cfg = SweepConfig {
            model: &model,
            family: &fam,
            m_list: &[32, 16],
            p: 2,
            n_secants: 10,
            trials: 1,
            seed: 3,
            mu_mode: MuNormMode::Analytic,
        };
        assert!(rip_sweep(&cfg).is_err());
    }

    #[test]
    fn exhaustive_secants_on_one_sparse_plane() {
        let pts = vec![
            Vector::basis(2, 0),
            Vector::basis(2, 0).scaled(-1.0),
            Vector::basis(2, 1),
            Vector::basis(2, 1).scaled(-1.0),
        ];
        let secants = all_pair_secants(&pts, DEFAULT_MIN_GAP).unwrap();
        let r = empirical_delta(&MeasurementMap::identity(2).unwrap(), &secants, 2, &vec![1.0; secants.len()]).unwrap();
        assert!(r.delta_p < 1e-12);
    }

    #[test]
    fn spread_of_rank_one_measurements() {
        let fam = MapFamily::RankOne { dist: DistSpec::Gaussian, m: 200, n1: 4, n2: 4 };
        let s = measurement_spread(&fam, &e11(4, 4), 1, 100, 6).unwrap();
        assert!((s.mean - 2.0 / PI).abs() < 0.05);
        // CLT: sd of the mean of m products |g h| is sqrt((1 - 4/pi^2) / m)
        let predicted = ((1.0 - 4.0 / (PI * PI)) / 200.0).sqrt();
        assert!(s.std_dev > 0.5 * predicted && s.std_dev < 2.0 * predicted);
    }
}
