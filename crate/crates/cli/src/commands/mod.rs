//! One module per subcommand. Each command validates its configuration,
//! computes in parallel and returns rendered files; writing them out is the
//! caller's job, so output order never depends on scheduling.

use abstain_core::exponents::{fixed_weight_exponent, memoryless_exponent, strong_contamination_exponent};
use abstain_core::{Distribution, SolverResult, SolverSettings};
use rayon::prelude::*;

use crate::config::{rate, CommandKind, ModelKind, RunConfig};
use crate::error::Result;
use crate::output::{render_csv, Artifact, Header, Table};

pub mod exponent;
pub mod figures;
pub mod finite_n;
pub mod region;
pub mod simulate;
pub mod validate;

/// Files produced by a command, plus anything that should change the exit
/// status after they are written.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// `(failed, total)` for commands that run checks.
    pub checks: Option<(usize, usize)>,
    pub refusals: Vec<String>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn artifact(&self, file_name: &str) -> Option<&str> {
        self.artifacts.iter().find(|a| a.file_name == file_name).map(|a| a.contents.as_str())
    }
}

pub fn run(cmd: CommandKind, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        CommandKind::Exponent => exponent::cmd_exponent(cfg),
        CommandKind::Region => region::cmd_region(cfg),
        CommandKind::Figure4 => figures::cmd_figure4(cfg),
        CommandKind::Figure5 => figures::cmd_figure5(cfg),
        CommandKind::FiniteN => finite_n::cmd_finite_n(cfg),
        CommandKind::Simulate => simulate::cmd_simulate(cfg),
        CommandKind::Validate => validate::cmd_validate(cfg),
    }
}

/// The adversarial exponent of `kind` for data from `p` against the ball of
/// radius `lambda` around `r`. `eps = 0` is allowed.
pub(crate) fn solve(
    kind: ModelKind,
    p: &Distribution,
    r: &Distribution,
    eps: f64,
    lambda: f64,
    s: &SolverSettings,
) -> abstain_core::Result<SolverResult> {
    let e = rate(eps)?;
    match kind {
        ModelKind::Ber => memoryless_exponent(p, r, e, lambda, s),
        ModelKind::Fw => fixed_weight_exponent(p, r, e, lambda, s),
        ModelKind::Adv => strong_contamination_exponent(p, r, e, lambda, s),
    }
}

/// Order-preserving parallel map.
pub(crate) fn par_map<T: Sync, R: Send, E: Send>(
    items: &[T],
    f: impl Fn(&T) -> std::result::Result<R, E> + Sync + Send,
) -> std::result::Result<Vec<R>, E> {
    items.par_iter().map(f).collect()
}

pub(crate) fn csv_artifact(cmd: CommandKind, cfg: &RunConfig, file_name: &str, table: &Table) -> Result<Artifact> {
    Ok(Artifact { file_name: file_name.to_owned(), contents: render_csv(&Header::new(cmd, cfg), table)? })
}
