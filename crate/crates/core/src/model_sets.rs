//! Model sets, normalized secants, greedy nets and box-counting estimates.
//!
//! Infinite-dimensional ambient spaces are represented by finite truncations:
//! every model declares its ambient dimension, and the correlated sequence is
//! cut at `i_max`.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;
use crate::stats::linear_fit;
use crate::vector::{squared_distance, Vector};

/// Default relative threshold below which a pair difference counts as zero.
pub const DEFAULT_MIN_GAP: f64 = 1e-9;

/// Maximum fraction of rejected candidate pairs before secant sampling gives up.
pub const MAX_REJECTION_RATE: f64 = 0.99;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Unit-norm `k`-sparse vectors of `R^n`.
    Sparse { n: usize, k: usize },
    /// Unit-Frobenius `n1 x n2` matrices of rank at most `r`, flattened row-major.
    LowRank { n1: usize, n2: usize, r: usize },
    /// The sequence `x_i = r^i (e_i + b e_0)`, `1 <= i <= i_max`.
    CorrelatedSeq { r: f64, b: f64, i_max: usize },
    /// Unit-norm `k`-sparse vectors of Haar coefficients (`n` coefficients).
    HaarSparse { n: usize, k: usize },
    /// An explicit finite set of points.
    PointCloud { points: Vec<Vector> },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::Sparse { n, k } | ModelSpec::HaarSparse { n, k } => {
                if k == 0 || k > n {
                    return Err(Error::invalid(format!("sparsity k = {k} must satisfy 1 <= k <= n = {n}")));
                }
            }
            ModelSpec::LowRank { n1, n2, r } => {
                if r == 0 || r > n1.min(n2) {
                    return Err(Error::invalid(format!(
                        "rank r = {r} must satisfy 1 <= r <= min({n1}, {n2})"
                    )));
                }
            }
            ModelSpec::CorrelatedSeq { r, b, i_max } => check_correlated(r, b, i_max)?,
            ModelSpec::PointCloud { ref points } => {
                let dim = points.first().map(Vector::dim).ok_or_else(|| Error::invalid("empty point cloud"))?;
                if let Some(p) = points.iter().find(|p| p.dim() != dim) {
                    return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
                }
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            ModelSpec::Sparse { n, .. } | ModelSpec::HaarSparse { n, .. } => *n,
            ModelSpec::LowRank { n1, n2, .. } => n1 * n2,
            ModelSpec::CorrelatedSeq { i_max, .. } => i_max + 1,
            ModelSpec::PointCloud { points } => points.first().map_or(0, Vector::dim),
        }
    }

    /// True when the model is a fixed finite list of points.
    pub fn is_finite(&self) -> bool {
        matches!(self, ModelSpec::CorrelatedSeq { .. } | ModelSpec::PointCloud { .. })
    }

    /// Draws `count` model points. Finite models return all their points and
    /// ignore `count` and `seed`.
    pub fn points(&self, count: usize, seed: u64) -> Result<Vec<Vector>> {
        self.validate()?;
        match self {
            ModelSpec::Sparse { n, k } | ModelSpec::HaarSparse { n, k } => sample_sparse_unit(*n, *k, count, seed),
            ModelSpec::LowRank { n1, n2, r } => sample_lowrank_unit(*n1, *n2, *r, count, seed),
            ModelSpec::CorrelatedSeq { r, b, i_max } => correlated_sequence(*r, *b, *i_max),
            ModelSpec::PointCloud { points } => Ok(points.clone()),
        }
    }
}

fn check_correlated(r: f64, b: f64, i_max: usize) -> Result<()> {
    check_rb(r, b)?;
    if i_max < 2 {
        return Err(Error::invalid(format!("i_max = {i_max} must be at least 2")));
    }
    Ok(())
}

fn check_rb(r: f64, b: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid(format!("ratio r = {r} must lie in (0, 1)")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::invalid(format!("offset b = {b} must be positive")));
    }
    Ok(())
}

/// Unit vectors with exactly `k` nonzero entries on a uniformly random support,
/// values standard normal before normalization.
pub fn sample_sparse_unit(n: usize, k: usize, count: usize, seed: u64) -> Result<Vec<Vector>> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("sparsity k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    (0..count as u64)
        .map(|item| {
            let mut rng = substream(seed, &[item]);
            loop {
                let support = index::sample(&mut rng, n, k);
                let mut coords = vec![0.0; n];
                for i in support.iter() {
                    coords[i] = rng.sample(StandardNormal);
                }
                // a zero draw has probability zero; a zero coordinate would
                // break the exact-k-nonzero guarantee, so redraw both cases
                if coords.iter().filter(|c| **c != 0.0).count() == k {
                    let v = Vector::new(coords)?;
                    return Ok(v.normalized().expect("nonzero by construction"));
                }
            }
        })
        .collect()
}

/// Unit-Frobenius matrices `G1 G2^T` with Gaussian factors of inner dimension
/// `r`, flattened row-major.
pub fn sample_lowrank_unit(n1: usize, n2: usize, r: usize, count: usize, seed: u64) -> Result<Vec<Vector>> {
    if r == 0 || r > n1.min(n2) {
        return Err(Error::invalid(format!("rank r = {r} must satisfy 1 <= r <= min({n1}, {n2})")));
    }
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    (0..count as u64)
        .map(|item| {
            let mut rng = substream(seed, &[item]);
            loop {
                let g1 = DMatrix::<f64>::from_fn(n1, r, |_, _| rng.sample(StandardNormal));
                let g2 = DMatrix::<f64>::from_fn(n2, r, |_, _| rng.sample(StandardNormal));
                let m = g1 * g2.transpose();
                let fro = m.norm();
                if fro > 0.0 {
                    let flat: Vec<f64> = (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).map(|(i, j)| m[(i, j)] / fro).collect();
                    return Vector::new(flat);
                }
            }
        })
        .collect()
}

/// Reshapes a row-major flattened matrix.
pub fn unflatten(x: &[f64], n1: usize, n2: usize) -> Result<DMatrix<f64>> {
    if x.len() != n1 * n2 {
        return Err(Error::DimensionMismatch { expected: n1 * n2, found: x.len() });
    }
    Ok(DMatrix::from_row_slice(n1, n2, x))
}

/// The correlated sequence `x_i = r^i (e_i + b e_0)` for `i = 1..=i_max`,
/// in ambient dimension `i_max + 1` (coordinate 0 is `e_0`).
pub fn correlated_sequence(r: f64, b: f64, i_max: usize) -> Result<Vec<Vector>> {
    check_rb(r, b)?;
    if i_max == 0 {
        return Err(Error::invalid("i_max must be at least 1"));
    }
    (1..=i_max)
        .map(|i| {
            let scale = r.powi(i as i32);
            let mut coords = vec![0.0; i_max + 1];
            coords[0] = b * scale;
            coords[i] = scale;
            Vector::new(coords)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecantSample {
    pub direction: Vector,
    /// Indices of the two generating points; `direction ∝ p[i] - p[j]`.
    pub pair_ids: (usize, usize),
}

impl SecantSample {
    fn from_pair(points: &[Vector], i: usize, j: usize, min_gap: f64) -> Option<Self> {
        let (a, b) = (&points[i], &points[j]);
        let diff = a.sub(b);
        let gap = diff.norm();
        let scale = a.norm().max(b.norm()).max(1.0);
        (gap > min_gap * scale).then(|| SecantSample {
            direction: diff.scaled(1.0 / gap),
            pair_ids: (i, j),
        })
    }
}

/// Normalized secants together with the points they index into.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecantSet {
    pub points: Vec<Vector>,
    pub secants: Vec<SecantSample>,
}

impl SecantSet {
    pub fn directions(&self) -> impl Iterator<Item = &Vector> {
        self.secants.iter().map(|s| &s.direction)
    }
}

fn check_points(points: &[Vector]) -> Result<usize> {
    let dim = points.first().map(Vector::dim).ok_or_else(|| Error::invalid("no points"))?;
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
    }
    Ok(dim)
}

/// Samples `count` normalized secants from uniformly random ordered pairs of
/// distinct indices, rejecting pairs whose difference is below
/// `min_gap * max(|x1|, |x2|, 1)`.
pub fn normalized_secants(points: &[Vector], count: usize, min_gap: f64, seed: u64) -> Result<Vec<SecantSample>> {
    check_points(points)?;
    if points.len() < 2 {
        return Err(Error::invalid("at least two points are needed to form a secant"));
    }
    if !(min_gap > 0.0) {
        return Err(Error::invalid("min_gap must be positive"));
    }
    let n = points.len();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0u64;
    let max_attempts = (count as u64).max(1) * 100;
    while out.len() < count {
        if attempts >= max_attempts {
            let rate = 1.0 - out.len() as f64 / attempts as f64;
            return Err(Error::RejectionRate { rate });
        }
        let mut rng = substream(seed, &[attempts]);
        attempts += 1;
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        if let Some(s) = SecantSample::from_pair(points, i, j, min_gap) {
            out.push(s);
        }
    }
    let rate = 1.0 - out.len() as f64 / attempts as f64;
    if rate > MAX_REJECTION_RATE {
        return Err(Error::RejectionRate { rate });
    }
    Ok(out)
}

/// Every ordered pair `(i, j)`, `i != j`, whose difference is not negligible.
pub fn all_pair_secants(points: &[Vector], min_gap: f64) -> Result<Vec<SecantSample>> {
    check_points(points)?;
    let n = points.len();
    let secants: Vec<_> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .filter_map(|(i, j)| SecantSample::from_pair(points, i, j, min_gap))
        .collect();
    if secants.is_empty() {
        return Err(Error::RejectionRate { rate: 1.0 });
    }
    Ok(secants)
}

/// Normalized secants of a model. Random models draw a fresh pair of points
/// per secant; finite models sample pairs from their point list.
pub fn model_secants(model: &ModelSpec, count: usize, min_gap: f64, seed: u64) -> Result<SecantSet> {
    model.validate()?;
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    if model.is_finite() {
        let points = model.points(0, seed)?;
        let secants = normalized_secants(&points, count, min_gap, seed)?;
        return Ok(SecantSet { points, secants });
    }
    let mut points = Vec::with_capacity(2 * count);
    let mut secants = Vec::with_capacity(count);
    let mut attempts = 0u64;
    while secants.len() < count {
        if attempts >= 100 * count as u64 {
            let rate = 1.0 - secants.len() as f64 / attempts as f64;
            return Err(Error::RejectionRate { rate });
        }
        let pair = model.points(2, crate::rng::derive(seed, &[attempts]))?;
        attempts += 1;
        let base = points.len();
        if let Some(mut s) = SecantSample::from_pair(&pair, 0, 1, min_gap) {
            s.pair_ids = (base, base + 1);
            points.extend(pair);
            secants.push(s);
        }
    }
    Ok(SecantSet { points, secants })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetResult {
    pub radius: f64,
    pub centers: Vec<Vector>,
    /// Number of input points covered (always every input point).
    pub covered_count: usize,
    #[serde(skip)]
    pub center_indices: Vec<usize>,
}

impl NetResult {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Farthest-point greedy net: starting from the first point, repeatedly
/// promote the point farthest from the current centers until every point lies
/// within `eps` of a center. Ties go to the lowest index.
pub fn greedy_net(points: &[Vector], eps: f64) -> Result<NetResult> {
    check_points(points)?;
    if !(eps > 0.0) {
        return Err(Error::invalid("net radius must be positive"));
    }
    let eps2 = eps * eps;
    let mut min_d2: Vec<f64> = vec![f64::INFINITY; points.len()];
    let mut centers = vec![0usize];
    let mut current = 0usize;
    loop {
        let c = points[current].as_slice();
        let mut far = 0usize;
        let mut far_d2 = -1.0;
        for (i, (p, d)) in points.iter().zip(min_d2.iter_mut()).enumerate() {
            let d2 = squared_distance(p.as_slice(), c);
            if d2 < *d {
                *d = d2;
            }
            if *d > far_d2 {
                far_d2 = *d;
                far = i;
            }
        }
        if far_d2 <= eps2 {
            break;
        }
        centers.push(far);
        current = far;
    }
    Ok(NetResult {
        radius: eps,
        centers: centers.iter().map(|&i| points[i].clone()).collect(),
        covered_count: points.len(),
        center_indices: centers,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimFit {
    pub eps_grid: Vec<f64>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `log N(eps)` against `log(1/eps)`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// False when a smaller radius produced a smaller net (greedy noise).
    pub monotone: bool,
}

impl BoxDimFit {
    /// Checks `N(eps) <= eps^{-s}` at every grid radius.
    pub fn satisfies_dimension_bound(&self, s: f64) -> bool {
        self.eps_grid.iter().zip(&self.counts).all(|(e, &c)| c as f64 <= e.powf(-s))
    }
}

/// Estimates the box-counting dimension from greedy net sizes over a
/// decreasing grid of radii.
pub fn boxdim_fit(points: &[Vector], eps_grid: &[f64]) -> Result<BoxDimFit> {
    if eps_grid.len() < 3 {
        return Err(Error::invalid("eps_grid needs at least three radii"));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::invalid("radii must lie in (0, 1)"));
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("eps_grid must be strictly decreasing"));
    }
    let counts = eps_grid
        .iter()
        .map(|&e| greedy_net(points, e).map(|n| n.len()))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = eps_grid.iter().map(|e| (1.0 / e).ln()).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, intercept, residual) = linear_fit(&x, &y);
    let monotone = counts.windows(2).all(|w| w[1] >= w[0]);
    Ok(BoxDimFit {
        eps_grid: eps_grid.to_vec(),
        counts,
        slope,
        intercept,
        residual,
        monotone,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaFormula {
    /// `sqrt(b^2 (1-r)^2 / (1 + r^2 + b^2))`, a strict lower bound.
    pub alpha_lb: f64,
    /// `sqrt(min_t f(t))` over index gaps `t >= 1`.
    pub alpha_exact: f64,
    pub minimizing_gap: usize,
}

/// Largest gap scanned when minimizing over index gaps.
pub const ALPHA_GAP_SCAN: usize = 60;

/// Squared isometry ratio of the correlated sequence for an index gap `t`.
pub fn secant_ratio_sq(r: f64, b: f64, t: usize) -> f64 {
    let rt = r.powi(t as i32);
    let num = b * b * (1.0 - rt).powi(2);
    num / (1.0 + rt * rt + num)
}

pub fn secant_alpha_formula(r: f64, b: f64) -> Result<AlphaFormula> {
    check_rb(r, b)?;
    let alpha_lb = (b * b * (1.0 - r).powi(2) / (1.0 + r * r + b * b)).sqrt();
    let (minimizing_gap, f) = (1..=ALPHA_GAP_SCAN)
        .map(|t| (t, secant_ratio_sq(r, b, t)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan");
    Ok(AlphaFormula {
        alpha_lb,
        alpha_exact: f.sqrt(),
        minimizing_gap,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaScan {
    pub alpha: f64,
    pub witness: (usize, usize),
}

/// Exact minimum of `|<x_i - x_j, e_0>| / |x_i - x_j|` over `1 <= i < j <= i_max`,
/// evaluated on the explicit sequence vectors.
pub fn secant_alpha_bruteforce(r: f64, b: f64, i_max: usize) -> Result<AlphaScan> {
    check_correlated(r, b, i_max)?;
    let xs = correlated_sequence(r, b, i_max)?;
    let mut best = AlphaScan { alpha: f64::INFINITY, witness: (0, 0) };
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let d = xs[i].sub(&xs[j]);
            let ratio = d.as_slice()[0].abs() / d.norm();
            if ratio < best.alpha {
                best = AlphaScan { alpha: ratio, witness: (i + 1, j + 1) };
            }
        }
    }
    Ok(best)
}

/// Lower bound `1 / sqrt(1 + r^2 + b^2 (1-r)^2)` on the pairwise distance of
/// the normalized consecutive secants `v_k`.
pub fn vk_min_separation(r: f64, b: f64) -> Result<f64> {
    check_rb(r, b)?;
    Ok(1.0 / (1.0 + r * r + b * b * (1.0 - r).powi(2)).sqrt())
}

/// `v_k = (x_{2k} - x_{2k+1}) / |x_{2k} - x_{2k+1}|` for `k = 1..=k_max`,
/// built from the explicit sequence vectors.
pub fn vk_vectors(r: f64, b: f64, k_max: usize) -> Result<Vec<Vector>> {
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let xs = correlated_sequence(r, b, 2 * k_max + 1)?;
    Ok((1..=k_max)
        .map(|k| {
            xs[2 * k - 1]
                .sub(&xs[2 * k])
                .normalized()
                .expect("distinct sequence points")
        })
        .collect())
}

/// Smallest pairwise distance among `v_1..v_{k_max}`.
pub fn vk_pairwise_min(r: f64, b: f64, k_max: usize) -> Result<f64> {
    let vs = vk_vectors(r, b, k_max)?;
    let mut best = f64::INFINITY;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            best = best.min(vs[i].distance(&vs[j]));
        }
    }
    Ok(best)
}
