//! Seed-driven experiment runner behind the `stable-embed` binary.
//!
//! Every subcommand resolves its options (command-line flags over an optional
//! TOML file over defaults) into an [`ExperimentConfig`], runs it, and emits a
//! [`Report`] that records the resolved config and seed next to the result.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{bound_report, sparse_model_constants, BoundInputs, BoundReport, MAIN_THEOREM_CONSTANT};
use crate::embeddings::{DistSpec, StageOne};
use crate::error::{Error, Result};
use crate::haar_fourier::{min_d_for_eps, MinD};
use crate::io::load_points;
use crate::model_sets::{
    boxdim_fit, greedy_net, model_secants, sample_lowrank_unit, secant_alpha_bruteforce, secant_alpha_formula,
    vk_min_separation, vk_pairwise_min, BoxDimFit, ModelSpec, NetResult, DEFAULT_MIN_GAP,
};
use crate::rip_estimator::{
    analytic_mu_pnorm, measurement_spread, rip_sweep, MapFamily, MuNormMode, Spread, SweepConfig, SweepTable,
    DEFAULT_N_RESAMPLE,
};
use crate::rng::derive;
use crate::tail_probes::{
    bernstein_tail_check, increment_tail_fit, ln_abs_moment_exponential, ln_abs_moment_normal,
    ln_abs_moment_rademacher, ln_abs_moment_sparse_pm, psi_norm_exact, IncrementProbe, PsiNorm, TailFit,
    DEFAULT_Q_MAX,
};
use crate::vector::Vector;

pub const SEED_ENV: &str = "STABLE_EMBED_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Sparse,
    LowRank,
    Correlated,
    HaarSparse,
    Cloud,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    Gaussian,
    SparsePm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuKind {
    Analytic,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RopMatrix {
    /// `e_1 e_1^T`.
    E11,
    /// A random unit-Frobenius rank-one matrix.
    Rank1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    Increment,
    Bernstein,
    Psi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiSource {
    Normal,
    Rademacher,
    Exponential,
    SparsePm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ModelOpts {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Ambient dimension (sparse and Haar-sparse models).
    #[arg(long)]
    pub n: Option<usize>,
    /// Sparsity.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// Ratio of the correlated sequence.
    #[arg(long)]
    pub r: Option<f64>,
    /// Offset of the correlated sequence.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub i_max: Option<usize>,
    /// Point-cloud file (`.csv` or `.json`).
    #[arg(long)]
    pub points: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct NetOpts {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelOpts,
    /// Number of points (or secants) drawn from random models.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Cover the normalized secants instead of the model points.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub secants: Option<bool>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoxDimOpts {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelOpts,
    #[arg(long)]
    pub count: Option<usize>,
    /// Decreasing radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub secants: Option<bool>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RipSweepOpts {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelOpts,
    #[arg(long, value_enum)]
    pub dist: Option<DistKind>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Ascending measurement counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    #[arg(long)]
    pub p: Option<u8>,
    #[arg(long)]
    pub n_secants: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum)]
    pub mu_mode: Option<MuKind>,
    #[arg(long)]
    pub n_resample: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RopOpts {
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of independent maps.
    #[arg(long)]
    pub maps: Option<usize>,
    #[arg(long, value_enum)]
    pub dist: Option<DistKind>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub p: Option<u8>,
    #[arg(long, value_enum)]
    pub matrix: Option<RopMatrix>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HaarOpts {
    /// Number of Haar functions (a power of two).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub eps_star: Option<f64>,
    #[arg(long)]
    pub d_max: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundsOpts {
    /// 1: generic maps, 2: two-stage with p = 1, 3: two-stage with p = 2.
    #[arg(long)]
    pub theorem: Option<u8>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub eps_s: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub c_abs: Option<f64>,
    #[arg(long)]
    pub j_max: Option<usize>,
    /// Derive `s` and `eps_s` for `2k`-sparse signals in `R^n`.
    #[arg(long)]
    pub sparse_k: Option<usize>,
    #[arg(long)]
    pub sparse_n: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TailsOpts {
    #[arg(long, value_enum)]
    pub mode: Option<TailMode>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub p: Option<u8>,
    #[arg(long, value_enum)]
    pub dist: Option<DistKind>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Ascending thresholds, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// ψ1 bound of the centered exponential sampler.
    #[arg(long)]
    pub k_psi: Option<f64>,
    #[arg(long, value_enum)]
    pub source: Option<PsiSource>,
    #[arg(long)]
    pub q_max: Option<u32>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CounterexampleOpts {
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub i_max: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Greedy epsilon-net of model points or secants.
    Net(NetOpts),
    /// Box-counting dimension estimate.
    Boxdim(BoxDimOpts),
    /// Empirical RIP constant over a grid of m.
    RipSweep(RipSweepOpts),
    /// Concentration of rank-one projection measurements.
    Rop(RopOpts),
    /// Minimal number of Fourier frequencies for the balancing property.
    HaarFourier(HaarOpts),
    /// Sample-complexity bounds and chaining sums.
    Bounds(BoundsOpts),
    /// ψ-norms and concentration tails.
    Tails(TailsOpts),
    /// Isometry constants of the correlated-sequence counterexample.
    Counterexample(CounterexampleOpts),
}

#[derive(Parser, Clone, Debug)]
#[command(name = "stable-embed", version, about = "Stable linear embeddings workbench")]
pub struct Cli {
    /// Seed for every random draw; a random seed is chosen and recorded when absent.
    #[arg(long, global = true, env = SEED_ENV)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with options for the subcommand; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub model: ModelSpec,
    pub count: usize,
    pub eps: f64,
    pub secants: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimConfig {
    pub model: ModelSpec,
    pub count: usize,
    pub eps_grid: Vec<f64>,
    pub secants: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipSweepConfig {
    pub model: ModelSpec,
    pub dist: DistSpec,
    pub m_list: Vec<usize>,
    pub p: u8,
    pub n_secants: usize,
    pub trials: usize,
    pub mu_mode: MuKind,
    pub n_resample: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RopConfig {
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub maps: usize,
    pub dist: DistSpec,
    pub p: u8,
    pub matrix: RopMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarConfig {
    pub n: usize,
    pub eps_star: f64,
    pub d_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub theorem: u8,
    pub inputs: BoundInputs,
    pub j_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailsConfig {
    pub mode: TailMode,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub p: u8,
    pub dist: DistSpec,
    pub trials: usize,
    pub grid: Vec<f64>,
    pub k_psi: f64,
    pub source: PsiSource,
    pub q_max: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleConfig {
    pub r: f64,
    pub b: f64,
    pub i_max: usize,
    pub k_max: usize,
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Net(NetConfig),
    Boxdim(BoxDimConfig),
    RipSweep(RipSweepConfig),
    Rop(RopConfig),
    HaarFourier(HaarConfig),
    Bounds(BoundsConfig),
    Tails(TailsConfig),
    Counterexample(CounterexampleConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub n_points: usize,
    pub net: NetResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RopReport {
    pub storage_len: usize,
    /// Closed-form `E|L(M)|_p^p` when available.
    pub mu_analytic: Option<f64>,
    pub spread: Spread,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiReport {
    pub psi1: PsiNorm,
    pub psi2: PsiNorm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub alpha_bruteforce: f64,
    pub witness: (usize, usize),
    pub alpha_formula_lb: f64,
    pub alpha_formula_exact: f64,
    pub minimizing_gap: usize,
    pub vk_bound: f64,
    pub vk_min_pairwise: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportBody {
    Net(NetReport),
    Boxdim(BoxDimFit),
    RipSweep(SweepTable),
    Rop(RopReport),
    HaarFourier(MinD),
    Bounds(BoundReport),
    TailFit(TailFit),
    Psi(PsiReport),
    Counterexample(CounterexampleReport),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub config: ExperimentConfig,
    pub result: ReportBody,
}

fn dist_spec(kind: Option<DistKind>, q: Option<f64>) -> Result<DistSpec> {
    let dist = match kind.unwrap_or(DistKind::Gaussian) {
        DistKind::Gaussian => DistSpec::Gaussian,
        DistKind::SparsePm => DistSpec::SparsePm { q: q.unwrap_or(2.0) },
    };
    dist.validate()?;
    Ok(dist)
}

impl ModelOpts {
    fn resolve(&self) -> Result<ModelSpec> {
        let spec = match self.model.unwrap_or(ModelKind::Sparse) {
            ModelKind::Sparse => ModelSpec::Sparse { n: self.n.unwrap_or(16), k: self.k.unwrap_or(2) },
            ModelKind::HaarSparse => ModelSpec::HaarSparse { n: self.n.unwrap_or(16), k: self.k.unwrap_or(2) },
            ModelKind::LowRank => ModelSpec::LowRank {
                n1: self.n1.unwrap_or(8),
                n2: self.n2.unwrap_or(8),
                r: self.rank.unwrap_or(1),
            },
            ModelKind::Correlated => ModelSpec::CorrelatedSeq {
                r: self.r.unwrap_or(0.5),
                b: self.b.unwrap_or(1.0),
                i_max: self.i_max.unwrap_or(30),
            },
            ModelKind::Cloud => {
                let path = self.points.as_ref().ok_or_else(|| Error::Config("the cloud model needs --points".into()))?;
                ModelSpec::PointCloud { points: load_points(path)? }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Net(_) => "net",
            Command::Boxdim(_) => "boxdim",
            Command::RipSweep(_) => "rip-sweep",
            Command::Rop(_) => "rop",
            Command::HaarFourier(_) => "haar-fourier",
            Command::Bounds(_) => "bounds",
            Command::Tails(_) => "tails",
            Command::Counterexample(_) => "counterexample",
        }
    }

    fn opts_value(&self) -> Result<Value> {
        Ok(match self {
            Command::Net(o) => serde_json::to_value(o)?,
            Command::Boxdim(o) => serde_json::to_value(o)?,
            Command::RipSweep(o) => serde_json::to_value(o)?,
            Command::Rop(o) => serde_json::to_value(o)?,
            Command::HaarFourier(o) => serde_json::to_value(o)?,
            Command::Bounds(o) => serde_json::to_value(o)?,
            Command::Tails(o) => serde_json::to_value(o)?,
            Command::Counterexample(o) => serde_json::to_value(o)?,
        })
    }

    fn with_value(&self, v: Value) -> Result<Command> {
        let bad = |e: serde_json::Error| Error::Config(e.to_string());
        Ok(match self {
            Command::Net(_) => Command::Net(serde_json::from_value(v).map_err(bad)?),
            Command::Boxdim(_) => Command::Boxdim(serde_json::from_value(v).map_err(bad)?),
            Command::RipSweep(_) => Command::RipSweep(serde_json::from_value(v).map_err(bad)?),
            Command::Rop(_) => Command::Rop(serde_json::from_value(v).map_err(bad)?),
            Command::HaarFourier(_) => Command::HaarFourier(serde_json::from_value(v).map_err(bad)?),
            Command::Bounds(_) => Command::Bounds(serde_json::from_value(v).map_err(bad)?),
            Command::Tails(_) => Command::Tails(serde_json::from_value(v).map_err(bad)?),
            Command::Counterexample(_) => Command::Counterexample(serde_json::from_value(v).map_err(bad)?),
        })
    }

    /// Overlays the options given on the command line onto a config file's.
    /// Returns the merged command and the file's `seed`, if any.
    pub fn merge_file(&self, text: &str) -> Result<(Command, Option<u64>)> {
        let file: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut file = serde_json::to_value(file)?;
        let obj = file.as_object_mut().expect("toml table is an object");
        let seed = match obj.remove("seed") {
            None => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| Error::Config("seed must be a nonnegative integer".into()))?),
        };
        let cli = self.opts_value()?;
        let known = cli.as_object().expect("options serialize to an object");
        if let Some(key) = obj.keys().find(|k| !known.contains_key(*k)) {
            return Err(Error::Config(format!("unknown key `{key}` for `{}`", self.name())));
        }
        for (k, v) in known {
            if !v.is_null() {
                obj.insert(k.clone(), v.clone());
            }
        }
        Ok((self.with_value(file)?, seed))
    }

    /// Fills defaults and validates.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        Ok(match self {
            Command::Net(o) => ExperimentConfig::Net(NetConfig {
                model: o.model.resolve()?,
                count: o.count.unwrap_or(500),
                eps: o.eps.unwrap_or(0.5),
                secants: o.secants.unwrap_or(false),
            }),
            Command::Boxdim(o) => ExperimentConfig::Boxdim(BoxDimConfig {
                model: o.model.resolve()?,
                count: o.count.unwrap_or(2000),
                eps_grid: o.eps_grid.clone().unwrap_or_else(|| vec![0.4, 0.2, 0.1, 0.05]),
                secants: o.secants.unwrap_or(false),
            }),
            Command::RipSweep(o) => ExperimentConfig::RipSweep(RipSweepConfig {
                model: o.model.resolve()?,
                dist: dist_spec(o.dist, o.q)?,
                m_list: o.m_list.clone().unwrap_or_else(|| vec![16, 32, 64]),
                p: o.p.unwrap_or(2),
                n_secants: o.n_secants.unwrap_or(1000),
                trials: o.trials.unwrap_or(10),
                mu_mode: o.mu_mode.unwrap_or(MuKind::Analytic),
                n_resample: o.n_resample.unwrap_or(DEFAULT_N_RESAMPLE),
            }),
            Command::Rop(o) => ExperimentConfig::Rop(RopConfig {
                n1: o.n1.unwrap_or(16),
                n2: o.n2.unwrap_or(16),
                m: o.m.unwrap_or(1000),
                maps: o.maps.unwrap_or(200),
                dist: dist_spec(o.dist, o.q)?,
                p: o.p.unwrap_or(1),
                matrix: o.matrix.unwrap_or(RopMatrix::E11),
            }),
            Command::HaarFourier(o) => ExperimentConfig::HaarFourier(HaarConfig {
                n: o.n.unwrap_or(8),
                eps_star: o.eps_star.unwrap_or(0.1),
                d_max: o.d_max.unwrap_or(4096),
            }),
            Command::Bounds(o) => {
                let theorem = o.theorem.unwrap_or(1);
                let (s, eps_s) = match (o.sparse_k, o.sparse_n) {
                    (Some(k), Some(n)) => sparse_model_constants(k, n)?,
                    (None, None) => (o.s.unwrap_or(4.0), o.eps_s.unwrap_or(0.25)),
                    _ => return Err(Error::Config("--sparse-k and --sparse-n go together".into())),
                };
                let default_c = if theorem == 1 { MAIN_THEOREM_CONSTANT } else { 1.0 };
                ExperimentConfig::Bounds(BoundsConfig {
                    theorem,
                    inputs: BoundInputs {
                        s,
                        eps_s,
                        delta: o.delta.unwrap_or(0.5),
                        xi: o.xi.unwrap_or(0.1),
                        c1: o.c1.unwrap_or(1.0),
                        c2: o.c2.unwrap_or(1.0),
                        lambda: o.lambda.unwrap_or(1.0),
                        c_abs: o.c_abs.unwrap_or(default_c),
                    },
                    j_max: o.j_max.unwrap_or(64),
                })
            }
            Command::Tails(o) => ExperimentConfig::Tails(TailsConfig {
                mode: o.mode.unwrap_or(TailMode::Increment),
                n: o.n.unwrap_or(16),
                k: o.k.unwrap_or(2),
                m: o.m.unwrap_or(64),
                p: o.p.unwrap_or(2),
                dist: dist_spec(o.dist, o.q)?,
                trials: o.trials.unwrap_or(2000),
                grid: o.grid.clone().unwrap_or_else(|| vec![0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8]),
                k_psi: o.k_psi.unwrap_or(2.0),
                source: o.source.unwrap_or(PsiSource::Normal),
                q_max: o.q_max.unwrap_or(DEFAULT_Q_MAX),
            }),
            Command::Counterexample(o) => ExperimentConfig::Counterexample(CounterexampleConfig {
                r: o.r.unwrap_or(0.5),
                b: o.b.unwrap_or(1.0),
                i_max: o.i_max.unwrap_or(30),
                k_max: o.k_max.unwrap_or(20),
            }),
        })
    }
}

fn model_family(model: &ModelSpec, dist: DistSpec, m: usize, p: u8) -> MapFamily {
    match model {
        ModelSpec::LowRank { n1, n2, .. } => MapFamily::RankOne { dist, m, n1: *n1, n2: *n2 },
        other => MapFamily::TwoStage { stage_one: StageOne::Identity { dim: other.ambient_dim() }, dist, m, p },
    }
}

fn cover_points(model: &ModelSpec, count: usize, secants: bool, seed: u64) -> Result<Vec<Vector>> {
    if secants {
        let set = model_secants(model, count, DEFAULT_MIN_GAP, seed)?;
        Ok(set.secants.into_iter().map(|s| s.direction).collect())
    } else {
        model.points(count, seed)
    }
}

/// Runs a resolved configuration.
pub fn run(config: &ExperimentConfig, seed: u64) -> Result<Report> {
    let result = match config {
        ExperimentConfig::Net(c) => {
            let pts = cover_points(&c.model, c.count, c.secants, seed)?;
            ReportBody::Net(NetReport { n_points: pts.len(), net: greedy_net(&pts, c.eps)? })
        }
        ExperimentConfig::Boxdim(c) => {
            let pts = cover_points(&c.model, c.count, c.secants, seed)?;
            ReportBody::Boxdim(boxdim_fit(&pts, &c.eps_grid)?)
        }
        ExperimentConfig::RipSweep(c) => {
            let family = model_family(&c.model, c.dist, c.m_list[0], c.p);
            let mu_mode = match c.mu_mode {
                MuKind::Analytic => MuNormMode::Analytic,
                MuKind::MonteCarlo => MuNormMode::MonteCarlo { n_resample: c.n_resample, seed: derive(seed, &[1]) },
            };
            ReportBody::RipSweep(rip_sweep(&SweepConfig {
                model: &c.model,
                family: &family,
                m_list: &c.m_list,
                p: c.p,
                n_secants: c.n_secants,
                trials: c.trials,
                seed,
                mu_mode,
            })?)
        }
        ExperimentConfig::Rop(c) => {
            let family = MapFamily::RankOne { dist: c.dist, m: c.m, n1: c.n1, n2: c.n2 };
            let x = match c.matrix {
                RopMatrix::E11 => Vector::basis(c.n1 * c.n2, 0),
                RopMatrix::Rank1 => sample_lowrank_unit(c.n1, c.n2, 1, 1, derive(seed, &[2]))?.remove(0),
            };
            let mu_analytic = match analytic_mu_pnorm(&family, x.as_slice(), c.p) {
                Ok(v) => Some(v),
                Err(Error::UnsupportedAnalytic(_)) => None,
                Err(e) => return Err(e),
            };
            ReportBody::Rop(RopReport {
                storage_len: c.m * (c.n1 + c.n2),
                mu_analytic,
                spread: measurement_spread(&family, x.as_slice(), c.p, c.maps, seed)?,
            })
        }
        ExperimentConfig::HaarFourier(c) => ReportBody::HaarFourier(min_d_for_eps(c.n, c.eps_star, c.d_max)?),
        ExperimentConfig::Bounds(c) => ReportBody::Bounds(bound_report(c.theorem, &c.inputs, c.j_max)?),
        ExperimentConfig::Tails(c) => match c.mode {
            TailMode::Increment => {
                let family = MapFamily::TwoStage { stage_one: StageOne::Identity { dim: c.n }, dist: c.dist, m: c.m, p: c.p };
                let pts = ModelSpec::Sparse { n: c.n, k: c.k }.points(2, derive(seed, &[3]))?;
                let mu = |x: &Vector| analytic_mu_pnorm(&family, x.as_slice(), c.p);
                ReportBody::TailFit(increment_tail_fit(&IncrementProbe {
                    family: &family,
                    p: c.p,
                    y: &pts[0],
                    z: &pts[1],
                    mu_y: mu(&pts[0])?,
                    mu_z: mu(&pts[1])?,
                    lambda_grid: &c.grid,
                    trials: c.trials,
                    seed,
                })?)
            }
            TailMode::Bernstein => ReportBody::TailFit(bernstein_tail_check(
                |r| r.sample::<f64, _>(Exp1) - 1.0,
                c.k_psi,
                c.m,
                &c.grid,
                c.trials,
                seed,
            )?),
            TailMode::Psi => {
                let moments: Box<dyn Fn(u32) -> f64> = match c.source {
                    PsiSource::Normal => Box::new(ln_abs_moment_normal),
                    PsiSource::Rademacher => Box::new(ln_abs_moment_rademacher),
                    PsiSource::Exponential => Box::new(ln_abs_moment_exponential),
                    PsiSource::SparsePm => match c.dist {
                        DistSpec::SparsePm { q } => Box::new(ln_abs_moment_sparse_pm(q)),
                        DistSpec::Gaussian => return Err(Error::Config("--source sparse-pm needs --dist sparse-pm".into())),
                    },
                };
                ReportBody::Psi(PsiReport {
                    psi1: psi_norm_exact(&moments, 1, c.q_max)?,
                    psi2: psi_norm_exact(&moments, 2, c.q_max)?,
                })
            }
        },
        ExperimentConfig::Counterexample(c) => {
            let scan = secant_alpha_bruteforce(c.r, c.b, c.i_max)?;
            let formula = secant_alpha_formula(c.r, c.b)?;
            ReportBody::Counterexample(CounterexampleReport {
                alpha_bruteforce: scan.alpha,
                witness: scan.witness,
                alpha_formula_lb: formula.alpha_lb,
                alpha_formula_exact: formula.alpha_exact,
                minimizing_gap: formula.minimizing_gap,
                vk_bound: vk_min_separation(c.r, c.b)?,
                vk_min_pairwise: vk_pairwise_min(c.r, c.b, c.k_max)?,
            })
        }
    };
    Ok(Report { seed, config: config.clone(), result })
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        Value::Array(items) => {
            let joined: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push((prefix.to_string(), joined.join(";")));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Serializes a report. JSON keeps declaration order; CSV gives sweep tables
/// their fixed header and flattens everything else to `field,value` rows.
pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let mut buf = Vec::new();
            if let ReportBody::RipSweep(table) = &report.result {
                table.write_csv(&mut buf)?;
            } else {
                let mut rows = Vec::new();
                flatten("", &serde_json::to_value(report)?, &mut rows);
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(["field", "value"])?;
                for (k, v) in rows {
                    w.write_record([k, v])?;
                }
                w.flush()?;
            }
            String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
        }
    }
}

/// Writes a rendered report to `path`, or to `stdout` when no path is given.
pub fn emit(report: &Report, format: Format, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = render(report, format)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Process exit code for an error: 3 for searches or fits that came back
/// empty, 1 for I/O failures, 2 for everything else (invalid configuration).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotFound { .. } | Error::FitFailure(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::SingularGram { .. } => "singular_gram",
        Error::RejectionRate { .. } => "rejection_rate",
        Error::NotFound { .. } => "not_found",
        Error::FitFailure(_) => "fit_failure",
        Error::NotCentered { .. } => "not_centered",
        Error::UnsupportedAnalytic(_) => "unsupported_analytic",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
        Error::Config(_) => "config",
    }
}

fn error_record(err: &Error) -> String {
    let rec = ErrorRecord {
        error: error_kind(err),
        message: err.to_string(),
        exit_code: exit_code(err),
        residual: match err {
            Error::NotFound { residual, .. } => Some(*residual),
            _ => None,
        },
    };
    serde_json::to_string(&rec).expect("error record serializes")
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let (command, file_seed) = match &cli.config {
        Some(path) => cli.command.merge_file(&fs::read_to_string(path)?)?,
        None => (cli.command.clone(), None),
    };
    let seed = cli.seed.or(file_seed).unwrap_or_else(rand::random);
    let config = command.resolve()?;
    let report = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| run(&config, seed))?,
        None => run(&config, seed)?,
    };
    emit(&report, cli.format, cli.out.as_deref(), stdout)
}

/// Parses `args`, runs the subcommand and returns the process exit code.
/// Errors are written to `stderr` as a one-line JSON record.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let out: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "{}", error_record(&err));
            exit_code(&err)
        }
    }
}
