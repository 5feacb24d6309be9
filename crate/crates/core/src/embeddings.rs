//! Measurement maps: two-stage maps (a projection `b` onto a finite subspace
//! followed by a random matrix) and rank-one projections.
//!
//! Random rows are drawn from the substream `(seed, row)`, so a map is fully
//! determined by its descriptor and growing `m` keeps the earlier rows.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, StreamRng};
use crate::vector::Vector;

/// Gram matrices with a larger condition number are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Tolerance used to flag a Gram matrix as the identity.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum DistSpec {
    Gaussian,
    /// `0` with probability `(q-1)/q`, `±sqrt(q)` with probability `1/(2q)` each.
    SparsePm { q: f64 },
}

impl DistSpec {
    pub fn validate(&self) -> Result<()> {
        if let DistSpec::SparsePm { q } = *self {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(Error::invalid(format!("q = {q} must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            DistSpec::Gaussian => rng.sample(StandardNormal),
            DistSpec::SparsePm { q } => {
                let u: f64 = rng.random();
                if u < 0.5 / q {
                    q.sqrt()
                } else if u < 1.0 / q {
                    -q.sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    /// Support points and probabilities for discrete distributions.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            DistSpec::Gaussian => None,
            DistSpec::SparsePm { q } => {
                let mut atoms = vec![(q.sqrt(), 0.5 / q), (-q.sqrt(), 0.5 / q)];
                if q > 1.0 {
                    atoms.push((0.0, (q - 1.0) / q));
                }
                Some(atoms)
            }
        }
    }
}

/// `rows x cols` i.i.d. draws; row `r` comes from the substream `(seed, r)`.
pub fn sample_dist(dist: DistSpec, rows: usize, cols: usize, seed: u64) -> Result<DMatrix<f64>> {
    dist.validate()?;
    let data: Vec<f64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|r| {
            let mut rng = substream(seed, &[r as u64]);
            (0..cols).map(move |_| dist.sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

/// Projection `x -> (<b_i, x>)_i` onto the span of `d` ambient vectors.
#[derive(Clone, Debug)]
pub struct StageOneMap {
    basis_block: DMatrix<f64>,
    gram: DMatrix<f64>,
    /// Lower-triangular `L` with `G = L L^T`, from a QR of the transposed block.
    l: DMatrix<f64>,
    is_orthonormal: bool,
    condition: f64,
}

impl StageOneMap {
    /// Builds the map from a `d x D` block whose rows are the basis vectors.
    pub fn new(basis_block: DMatrix<f64>) -> Result<Self> {
        if basis_block.nrows() == 0 || basis_block.ncols() == 0 {
            return Err(Error::invalid("basis block must be non-empty"));
        }
        if basis_block.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("basis block has non-finite entries"));
        }
        let gram = &basis_block * basis_block.transpose();
        let eig = SymmetricEigen::new(gram.clone());
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        if !(condition <= MAX_GRAM_CONDITION) {
            return Err(Error::SingularGram { condition });
        }
        let l = basis_block.transpose().qr().r().transpose();
        let d = gram.nrows();
        let is_orthonormal = (&gram - DMatrix::<f64>::identity(d, d)).amax() <= ORTHONORMAL_TOL;
        Ok(StageOneMap { basis_block, gram, l, is_orthonormal, condition })
    }

    pub fn from_rows(rows: &[Vector]) -> Result<Self> {
        let dim = rows.first().map(Vector::dim).ok_or_else(|| Error::invalid("no basis vectors"))?;
        if let Some(r) = rows.iter().find(|r| r.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: r.dim() });
        }
        Self::new(DMatrix::from_fn(rows.len(), dim, |i, j| rows[i].as_slice()[j]))
    }

    /// Keeps a linearly independent subset of `vectors` (in order), dropping
    /// any vector whose distance to the span of those kept is below
    /// `tol * |v|`. Nets typically contain antipodal or otherwise dependent
    /// centers.
    pub fn from_spanning_set(vectors: &[Vector], tol: f64) -> Result<Self> {
        let mut kept: Vec<Vector> = Vec::new();
        let mut ortho: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            let mut r = v.as_slice().to_vec();
            for _ in 0..2 {
                for q in &ortho {
                    let c: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
                    r.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            let norm = r.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > tol * v.norm() && norm > 0.0 {
                ortho.push(r.into_iter().map(|a| a / norm).collect());
                kept.push(v.clone());
            }
        }
        Self::from_rows(&kept)
    }

    /// Orthonormal selection of the first `d` coordinates of `R^ambient`.
    pub fn coordinate_selection(d: usize, ambient: usize) -> Result<Self> {
        if d == 0 || d > ambient {
            return Err(Error::invalid(format!("need 1 <= d <= {ambient}, got {d}")));
        }
        Self::new(DMatrix::from_fn(d, ambient, |i, j| if i == j { 1.0 } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        self.basis_block.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis_block.ncols()
    }

    pub fn basis_block(&self) -> &DMatrix<f64> {
        &self.basis_block
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn is_orthonormal(&self) -> bool {
        self.is_orthonormal
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn apply(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: x.len() });
        }
        Ok(&self.basis_block * DVector::from_column_slice(x))
    }

    fn check_dim(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.len() });
        }
        Ok(())
    }

    /// `|y|_b = sqrt(y^T G^{-1} y)`, the smallest norm of a preimage of `y`.
    pub fn b_norm(&self, y: &[f64]) -> Result<f64> {
        self.check_dim(y)?;
        if self.is_orthonormal {
            return Ok(y.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        Ok(self.whiten(&DVector::from_column_slice(y)).norm())
    }

    /// Dual norm `sqrt(a^T G a)`.
    pub fn b_dual_norm(&self, a: &[f64]) -> Result<f64> {
        self.check_dim(a)?;
        let a = DVector::from_column_slice(a);
        Ok(a.dot(&(&self.gram * &a)).max(0.0).sqrt())
    }

    /// Orthogonal projection of `x` onto the span of the basis vectors.
    pub fn project(&self, x: &[f64]) -> Result<DVector<f64>> {
        let z = self.whiten(&self.apply(x)?);
        let w = self.l.transpose().solve_upper_triangular(&z).ok_or(Error::SingularGram { condition: self.condition })?;
        Ok(self.basis_block.transpose() * w)
    }

    /// `L^{-1} y`; its norm is the b-norm of `y`.
    fn whiten(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut z = y.clone();
        self.l.solve_lower_triangular_mut(&mut z);
        z
    }
}

#[derive(Clone, Debug)]
pub enum StageOne {
    Identity { dim: usize },
    Basis(Arc<StageOneMap>),
}

impl StageOne {
    pub fn basis(map: StageOneMap) -> Self {
        StageOne::Basis(Arc::new(map))
    }

    pub fn input_dim(&self) -> usize {
        match self {
            StageOne::Identity { dim } => *dim,
            StageOne::Basis(m) => m.ambient_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            StageOne::Identity { dim } => *dim,
            StageOne::Basis(m) => m.dim(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<DVector<f64>> {
        match self {
            StageOne::Identity { dim } => {
                if x.len() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, found: x.len() });
                }
                Ok(DVector::from_column_slice(x))
            }
            StageOne::Basis(m) => m.apply(x),
        }
    }

    pub fn b_norm(&self, y: &[f64]) -> Result<f64> {
        match self {
            StageOne::Identity { .. } => Ok(y.iter().map(|v| v * v).sum::<f64>().sqrt()),
            StageOne::Basis(m) => m.b_norm(y),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TwoStageMap {
    stage_one: StageOne,
    dist: DistSpec,
    p: u8,
    seed: u64,
    matrix: DMatrix<f64>,
}

impl TwoStageMap {
    pub fn stage_one(&self) -> &StageOne {
        &self.stage_one
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Divisor applied to every measurement: `m` for `p = 1`, `sqrt(m)` for `p = 2`.
    pub fn scale(&self) -> f64 {
        let m = self.matrix.nrows() as f64;
        if self.p == 1 {
            m
        } else {
            m.sqrt()
        }
    }
}

#[derive(Clone, Debug)]
pub struct RankOneMap {
    dist: DistSpec,
    n1: usize,
    n2: usize,
    seed: u64,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl RankOneMap {
    pub fn a_vecs(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b_vecs(&self) -> &DMatrix<f64> {
        &self.b
    }
}

#[derive(Clone, Debug)]
pub enum MeasurementMap {
    TwoStage(TwoStageMap),
    RankOne(RankOneMap),
    /// A fixed matrix, for deterministic maps such as the identity.
    Explicit(DMatrix<f64>),
}

fn check_p(p: u8) -> Result<()> {
    if p != 1 && p != 2 {
        return Err(Error::invalid(format!("p = {p} must be 1 or 2")));
    }
    Ok(())
}

impl MeasurementMap {
    /// `m` rows i.i.d. from `dist` acting on `b(x)`, scaled by `1/m` (`p = 1`)
    /// or `1/sqrt(m)` (`p = 2`).
    pub fn two_stage(stage_one: StageOne, dist: DistSpec, m: usize, p: u8, seed: u64) -> Result<Self> {
        check_p(p)?;
        if m == 0 {
            return Err(Error::invalid("m must be at least 1"));
        }
        let matrix = sample_dist(dist, m, stage_one.output_dim(), seed)?;
        Ok(MeasurementMap::TwoStage(TwoStageMap { stage_one, dist, p, seed, matrix }))
    }

    /// Measurements `a_i^T M b_i / m` of an `n1 x n2` matrix `M`.
    pub fn rank_one(m: usize, n1: usize, n2: usize, dist: DistSpec, seed: u64) -> Result<Self> {
        if m == 0 || n1 == 0 || n2 == 0 {
            return Err(Error::invalid("m, n1 and n2 must be at least 1"));
        }
        let ab = sample_dist(dist, m, n1 + n2, seed)?;
        let a = ab.columns(0, n1).into_owned();
        let b = ab.columns(n1, n2).into_owned();
        Ok(MeasurementMap::RankOne(RankOneMap { dist, n1, n2, seed, a, b }))
    }

    pub fn explicit(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::invalid("matrix must be non-empty"));
        }
        Ok(MeasurementMap::Explicit(matrix))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::explicit(DMatrix::identity(n, n))
    }

    pub fn zero(m: usize, n: usize) -> Result<Self> {
        Self::explicit(DMatrix::zeros(m, n))
    }

    pub fn m(&self) -> usize {
        match self {
            MeasurementMap::TwoStage(t) => t.matrix.nrows(),
            MeasurementMap::RankOne(r) => r.a.nrows(),
            MeasurementMap::Explicit(a) => a.nrows(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            MeasurementMap::TwoStage(t) => t.stage_one.input_dim(),
            MeasurementMap::RankOne(r) => r.n1 * r.n2,
            MeasurementMap::Explicit(a) => a.ncols(),
        }
    }

    /// Number of stored random coefficients; `m (n1 + n2)` for rank-one maps.
    pub fn storage_len(&self) -> usize {
        match self {
            MeasurementMap::TwoStage(t) => t.matrix.len(),
            MeasurementMap::RankOne(r) => r.a.len() + r.b.len(),
            MeasurementMap::Explicit(a) => a.len(),
        }
    }

    /// Applies the map to `x`; matrices are flattened row-major.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), found: x.len() });
        }
        match self {
            MeasurementMap::TwoStage(t) => {
                let y = t.stage_one.apply(x)?;
                let scale = t.scale();
                Ok((&t.matrix * y).iter().map(|v| v / scale).collect())
            }
            MeasurementMap::RankOne(r) => {
                let mat = DMatrix::from_row_slice(r.n1, r.n2, x);
                let m = r.a.nrows() as f64;
                // row i of (B M^T) is (M b_i)^T
                let mb = &r.b * mat.transpose();
                Ok((0..r.a.nrows()).map(|i| r.a.row(i).dot(&mb.row(i)) / m).collect())
            }
            MeasurementMap::Explicit(a) => Ok((a * DVector::from_column_slice(x)).iter().copied().collect()),
        }
    }

    pub fn apply_batch(&self, xs: &[Vector]) -> Result<Vec<Vec<f64>>> {
        xs.par_iter().map(|x| self.apply(x.as_slice())).collect()
    }

    /// `|L(x)|_p^p`.
    pub fn pnorm_p(&self, x: &[f64], p: u8) -> Result<f64> {
        check_p(p)?;
        let y = self.apply(x)?;
        Ok(match p {
            1 => y.iter().map(|v| v.abs()).sum(),
            _ => y.iter().map(|v| v * v).sum(),
        })
    }

    pub fn descriptor(&self) -> MapDescriptor {
        match self {
            MeasurementMap::TwoStage(t) => MapDescriptor {
                variant: MapVariant::TwoStage,
                m: self.m(),
                dims: vec![t.stage_one.input_dim()],
                dist: Some(t.dist),
                seed: Some(t.seed),
                p_scale: Some(t.p),
                stage_one: match &t.stage_one {
                    StageOne::Identity { .. } => None,
                    StageOne::Basis(b) => Some(matrix_rows(b.basis_block())),
                },
                matrix: None,
            },
            MeasurementMap::RankOne(r) => MapDescriptor {
                variant: MapVariant::RankOne,
                m: self.m(),
                dims: vec![r.n1, r.n2],
                dist: Some(r.dist),
                seed: Some(r.seed),
                p_scale: Some(1),
                stage_one: None,
                matrix: None,
            },
            MeasurementMap::Explicit(a) => MapDescriptor {
                variant: MapVariant::Explicit,
                m: a.nrows(),
                dims: vec![a.ncols()],
                dist: None,
                seed: None,
                p_scale: None,
                stage_one: None,
                matrix: Some(matrix_rows(a)),
            },
        }
    }

    /// Rebuilds a map, regenerating random matrices from `(dist, seed)`.
    pub fn from_descriptor(d: &MapDescriptor) -> Result<Self> {
        let missing = |f: &str| Error::Config(format!("descriptor is missing `{f}`"));
        match d.variant {
            MapVariant::TwoStage => {
                let dim = *d.dims.first().ok_or_else(|| missing("dims"))?;
                let stage_one = match &d.stage_one {
                    None => StageOne::Identity { dim },
                    Some(rows) => StageOne::basis(StageOneMap::new(rows_matrix(rows)?)?),
                };
                Self::two_stage(
                    stage_one,
                    d.dist.ok_or_else(|| missing("dist"))?,
                    d.m,
                    d.p_scale.ok_or_else(|| missing("p_scale"))?,
                    d.seed.ok_or_else(|| missing("seed"))?,
                )
            }
            MapVariant::RankOne => {
                let [n1, n2] = d.dims[..] else {
                    return Err(Error::Config("rank-one descriptor needs dims [n1, n2]".into()));
                };
                Self::rank_one(d.m, n1, n2, d.dist.ok_or_else(|| missing("dist"))?, d.seed.ok_or_else(|| missing("seed"))?)
            }
            MapVariant::Explicit => Self::explicit(rows_matrix(d.matrix.as_ref().ok_or_else(|| missing("matrix"))?)?),
        }
    }
}

fn matrix_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn rows_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(Error::Config("empty matrix".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapVariant {
    TwoStage,
    RankOne,
    Explicit,
}

/// Serialized form of a [`MeasurementMap`]. Random matrices are not stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub variant: MapVariant,
    pub m: usize,
    pub dims: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dist: Option<DistSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_scale: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stage_one: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<f64>>>,
}
