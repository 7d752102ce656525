//! Run configuration: built-in defaults per subcommand, then an optional
//! JSON file, then command-line flags. Later sources win.

use std::path::{Path, PathBuf};

use abstain_core::prob::kl_divergence;
use abstain_core::{BernoulliRate, ContaminationModel, DetectorSpec, Distribution, SolverSettings};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommandKind {
    Exponent,
    Region,
    Figure4,
    Figure5,
    FiniteN,
    Simulate,
    Validate,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exponent => "exponent",
            Self::Region => "region",
            Self::Figure4 => "figure4",
            Self::Figure5 => "figure5",
            Self::FiniteN => "finite-n",
            Self::Simulate => "simulate",
            Self::Validate => "validate",
        }
    }

    fn needs_detector(self) -> bool {
        matches!(self, Self::FiniteN | Self::Simulate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Memoryless ingress.
    #[serde(alias = "memoryless")]
    #[value(alias = "memoryless")]
    Ber,
    /// Fixed-weight uniform ingress.
    #[serde(alias = "fixed-weight")]
    #[value(alias = "fixed-weight")]
    Fw,
    /// Strong contamination.
    #[serde(alias = "strong")]
    #[value(alias = "strong")]
    Adv,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Ber, ModelKind::Fw, ModelKind::Adv];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Ber => "ber",
            Self::Fw => "fw",
            Self::Adv => "adv",
        }
    }

    pub fn model(self, eps: f64) -> abstain_core::Result<ContaminationModel> {
        match self {
            Self::Ber => ContaminationModel::memoryless(eps),
            Self::Fw => ContaminationModel::fixed_weight(eps),
            Self::Adv => ContaminationModel::strong(eps),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    /// Best response seeing samples and mask.
    Omniscient,
    /// I.i.d. replacements drawn from the opposite hypothesis.
    Oblivious,
    /// The strong-contamination converse attack.
    Converse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub grid_resolution: usize,
    pub refine_tolerance: f64,
    pub feasibility_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            grid_resolution: s.grid_resolution,
            refine_tolerance: s.refine_tolerance,
            feasibility_tolerance: s.feasibility_tolerance,
            max_iterations: s.max_iterations,
        }
    }
}

impl From<SolverConfig> for SolverSettings {
    fn from(c: SolverConfig) -> Self {
        SolverSettings {
            grid_resolution: c.grid_resolution,
            refine_tolerance: c.refine_tolerance,
            feasibility_tolerance: c.feasibility_tolerance,
            max_iterations: c.max_iterations,
        }
    }
}

/// A probability vector, or a single number meaning `Ber(p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbSpec {
    Mean(f64),
    Pmf(Vec<f64>),
}

impl ProbSpec {
    pub fn from_values(v: Vec<f64>) -> Self {
        match v.as_slice() {
            [p] => Self::Mean(*p),
            _ => Self::Pmf(v),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Self::Mean(p) => vec![1.0 - p, *p],
            Self::Pmf(v) => v.clone(),
        }
    }
}

/// A single value or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            Self::One(x) => vec![x],
            Self::Many(v) => v,
        }
    }
}

/// Settings that may come from a file or from flags. Absent fields keep
/// the value of the previous layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub p0: Option<ProbSpec>,
    pub p1: Option<ProbSpec>,
    pub eps: Option<OneOrMany<f64>>,
    pub lambda01: Option<OneOrMany<f64>>,
    pub lambda10: Option<f64>,
    pub delta: Option<f64>,
    pub models: Option<Vec<ModelKind>>,
    pub solver: Option<SolverConfig>,
    #[serde(alias = "n")]
    pub n_grid: Option<OneOrMany<u32>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub tolerance: Option<f64>,
    pub adversary: Option<AdversaryKind>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}

/// Everything a subcommand needs. Serialised (without `out`) to form the
/// configuration hash written into output headers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub eps: Vec<f64>,
    pub lambda01: Vec<f64>,
    /// Detector radius around `P0`; defaults to `lambda01[0]`. For the
    /// `exponent` command it also adds the `0|1` direction.
    pub lambda10: Option<f64>,
    pub delta: f64,
    pub models: Vec<ModelKind>,
    pub solver: SolverConfig,
    pub n_grid: Vec<u32>,
    pub samples: u64,
    pub seed: u64,
    /// Sweep points for `region` when `lambda01` holds a single value.
    pub points: usize,
    /// Absolute tolerance for `validate`.
    pub tolerance: f64,
    pub adversary: AdversaryKind,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// `0.01, 0.02, ..., 0.40`.
pub fn figure5_eps_grid() -> Vec<f64> {
    (1..=40).map(|i| i as f64 / 100.0).collect()
}

impl RunConfig {
    /// Built-in defaults. The figure commands embed the figure parameters.
    pub fn defaults(cmd: CommandKind) -> Self {
        let mut c = Self {
            p0: vec![0.9, 0.1],
            p1: vec![0.5, 0.5],
            eps: vec![0.1],
            lambda01: vec![0.05],
            lambda10: None,
            delta: abstain_core::detector::DEFAULT_DELTA,
            models: ModelKind::ALL.to_vec(),
            solver: SolverConfig::default(),
            n_grid: vec![50, 100, 200, 300, 400, 500],
            samples: 100_000,
            seed: 0,
            points: 100,
            tolerance: 1e-4,
            adversary: AdversaryKind::Omniscient,
            out: None,
        };
        match cmd {
            CommandKind::Figure5 => {
                c.p1 = vec![0.1, 0.9];
                c.lambda01 = vec![0.1];
                c.eps = figure5_eps_grid();
            }
            CommandKind::Validate => {
                c.eps = vec![0.05, 0.1, 0.2, 0.3];
                c.lambda01 = vec![0.01, 0.05, 0.1, 0.2];
            }
            CommandKind::Simulate => c.n_grid = vec![50],
            _ => {}
        }
        c
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(v) = o.p0 {
            self.p0 = v.to_vec();
        }
        if let Some(v) = o.p1 {
            self.p1 = v.to_vec();
        }
        if let Some(v) = o.eps {
            self.eps = v.into_vec();
        }
        if let Some(v) = o.lambda01 {
            self.lambda01 = v.into_vec();
        }
        if o.lambda10.is_some() {
            self.lambda10 = o.lambda10;
        }
        if let Some(v) = o.delta {
            self.delta = v;
        }
        if let Some(v) = o.models {
            self.models = v;
        }
        if let Some(v) = o.solver {
            self.solver = v;
        }
        if let Some(v) = o.n_grid {
            self.n_grid = v.into_vec();
        }
        if let Some(v) = o.samples {
            self.samples = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.points {
            self.points = v;
        }
        if let Some(v) = o.tolerance {
            self.tolerance = v;
        }
        if let Some(v) = o.adversary {
            self.adversary = v;
        }
    }

    /// Defaults, then the file (if any), then the flags.
    pub fn resolve(cmd: CommandKind, file: Option<&Path>, flags: Overrides) -> Result<Self> {
        let mut c = Self::defaults(cmd);
        if let Some(path) = file {
            c.apply(Overrides::from_file(path)?);
        }
        c.apply(flags);
        Ok(c)
    }

    pub fn settings(&self) -> SolverSettings {
        self.solver.into()
    }

    /// The detector radius around `P0`.
    pub fn l10(&self) -> f64 {
        self.lambda10.unwrap_or(self.lambda01[0])
    }

    /// Checks every precondition and reports all problems at once.
    pub fn validate(&self, cmd: CommandKind) -> Result<Validated> {
        let mut errs = Vec::new();
        let p0 = Distribution::new(self.p0.clone()).map_err(|e| errs.push(format!("p0: {e}"))).ok();
        let p1 = Distribution::new(self.p1.clone()).map_err(|e| errs.push(format!("p1: {e}"))).ok();
        let mut pair = None;
        if let (Some(p0), Some(p1)) = (p0, p1) {
            if p0.alphabet_size() != p1.alphabet_size() {
                errs.push(format!("p0 and p1 have alphabet sizes {} and {}", p0.alphabet_size(), p1.alphabet_size()));
            } else if !p0.is_full_support() || !p1.is_full_support() {
                errs.push("p0 and p1 must have full support".into());
            } else if p0 == p1 {
                errs.push("p0 and p1 must differ".into());
            } else {
                pair = Some((p0, p1));
            }
        }
        if self.eps.is_empty() {
            errs.push("eps: grid is empty".into());
        }
        let eps_floor_open = cmd != CommandKind::Exponent;
        for &e in &self.eps {
            let ok = if eps_floor_open { e > 0.0 && e < 1.0 } else { (0.0..1.0).contains(&e) };
            if !ok {
                let lo = if eps_floor_open { "(0" } else { "[0" };
                errs.push(format!("eps = {e} is outside {lo}, 1)"));
            }
        }
        if self.lambda01.is_empty() {
            errs.push("lambda01: grid is empty".into());
        }
        if let Some((p0, p1)) = &pair {
            let d01 = kl_divergence(p0, p1).bits();
            let d10 = kl_divergence(p1, p0).bits();
            for &l in &self.lambda01 {
                if !(l > 0.0 && l <= d01) {
                    errs.push(format!("lambda01 = {l} is outside (0, {d01}] = (0, D(P0||P1)]"));
                }
            }
            if let Some(l) = self.lambda10 {
                if !(l > 0.0 && l <= d10) {
                    errs.push(format!("lambda10 = {l} is outside (0, {d10}] = (0, D(P1||P0)]"));
                }
            }
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            errs.push(format!("delta = {} must be finite and non-negative", self.delta));
        }
        if self.models.is_empty() {
            errs.push("models: list is empty".into());
        }
        let settings = self.settings();
        if let Err(e) = settings.validate() {
            errs.push(format!("solver: {e}"));
        }
        if self.n_grid.is_empty() {
            errs.push("n: grid is empty".into());
        }
        if self.n_grid.contains(&0) {
            errs.push("n: sample sizes must be positive".into());
        }
        if self.samples < 1000 {
            errs.push(format!("samples = {} is below the minimum of 1000", self.samples));
        }
        if self.points < 2 {
            errs.push(format!("points = {} must be at least 2", self.points));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            errs.push(format!("tolerance = {} must be positive", self.tolerance));
        }
        let mut detector = None;
        if cmd.needs_detector() {
            if let (Some((p0, p1)), Some(&l01)) = (&pair, self.lambda01.first()) {
                match DetectorSpec::new(p0.clone(), p1.clone(), self.l10(), l01, self.delta) {
                    Ok(d) => detector = Some(d),
                    Err(e) => errs.push(format!("detector: {e}")),
                }
            }
            if self.adversary == AdversaryKind::Converse && cmd == CommandKind::Simulate {
                let cap = self.eps.iter().copied().fold(f64::INFINITY, f64::min).min(self.l10()).min(self.lambda01[0]);
                if abstain_core::adversary::DEFAULT_CONVERSE_DELTA >= cap {
                    errs.push(format!(
                        "converse attack needs eps and both radii above {}",
                        abstain_core::adversary::DEFAULT_CONVERSE_DELTA
                    ));
                }
            }
        }
        match (errs.is_empty(), pair) {
            (true, Some((p0, p1))) => Ok(Validated { p0, p1, settings, detector }),
            _ => Err(CliError::Config(errs)),
        }
    }
}

/// Typed values of a configuration that passed [`RunConfig::validate`].
#[derive(Debug, Clone)]
pub struct Validated {
    pub p0: Distribution,
    pub p1: Distribution,
    pub settings: SolverSettings,
    /// Present for commands that run the detector.
    pub detector: Option<DetectorSpec>,
}

pub fn rate(eps: f64) -> abstain_core::Result<BernoulliRate> {
    BernoulliRate::new(eps)
}
