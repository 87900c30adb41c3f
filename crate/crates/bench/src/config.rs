//! Run configuration with three layers: built-in defaults, a `key = value`
//! config file, and command-line flags, later layers winning.

use crate::{BenchError, Result};
use caprsoc::model::{lipschitz_estimate, SparseRegressionProblem};
use caprsoc::solvers::{SolverConfig, StoppingRule};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    ProjBench,
    RegSolve,
    GroupSolve,
    Trace,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "proj-bench" => Ok(Command::ProjBench),
            "reg-solve" => Ok(Command::RegSolve),
            "group-solve" => Ok(Command::GroupSolve),
            "trace" => Ok(Command::Trace),
            other => Err(BenchError::Config(format!(
                "unknown command {other:?}; expected proj-bench, reg-solve, group-solve, or trace"
            ))),
        }
    }

    /// Subdirectory name under the output directory.
    pub fn dir_name(&self) -> &'static str {
        match self {
            Command::ProjBench => "proj-bench",
            Command::RegSolve => "reg-solve",
            Command::GroupSolve => "group-solve",
            Command::Trace => "trace",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodOpt {
    Pg,
    Fista,
}

impl MethodOpt {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pg" => Ok(MethodOpt::Pg),
            "fista" => Ok(MethodOpt::Fista),
            other => Err(BenchError::Config(format!(
                "unknown method {other:?}; expected pg or fista"
            ))),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            MethodOpt::Pg => "pg",
            MethodOpt::Fista => "fista",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOpt {
    Const,
    Backtrack,
}

impl StepOpt {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "const" => Ok(StepOpt::Const),
            "backtrack" => Ok(StepOpt::Backtrack),
            other => Err(BenchError::Config(format!(
                "unknown step mode {other:?}; expected const or backtrack"
            ))),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            StepOpt::Const => "const",
            StepOpt::Backtrack => "backtrack",
        }
    }
}

/// Flag-layer values; `None` means the flag was not given.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub cmd: Option<String>,
    pub n: Option<String>,
    pub t: Option<usize>,
    pub q: Option<usize>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub step: Option<String>,
    pub max_iter: Option<u32>,
    pub stop_gap: Option<f64>,
    pub data: Option<PathBuf>,
    pub schema: Option<String>,
    pub out: Option<PathBuf>,
}

/// Fully resolved configuration for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Batch sizes for proj-bench (one CSV row each); the regression
    /// commands require exactly one entry, the column count.
    pub n: Vec<usize>,
    /// Observation count for synthetic regression instances.
    pub t: usize,
    /// Group count for group-solve.
    pub q: usize,
    pub seed: u64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub method: MethodOpt,
    pub step: StepOpt,
    pub max_iter: u32,
    /// Stop once the fixed-point residual drops below this; `None` runs to
    /// the iteration cap.
    pub stop_gap: Option<f64>,
    /// Nonzero count of the synthetic ground truth; `None` derives
    /// `max(1, n/10)`.
    pub sparsity: Option<usize>,
    /// Gaussian noise scale on the synthetic response.
    pub noise: f64,
    /// CSV dataset for reg-solve; requires `schema`.
    pub data: Option<PathBuf>,
    /// Column kinds as `name:kind,...` with kinds numeric, categorical,
    /// id, or target (exactly one target).
    pub schema: Option<String>,
    pub out: PathBuf,
}

/// Accumulates the three layers, then validates into a [`RunConfig`].
#[derive(Clone, Debug)]
pub struct RunConfigBuilder {
    command: Option<Command>,
    n: Vec<usize>,
    t: usize,
    q: usize,
    seed: u64,
    gamma1: f64,
    gamma2: f64,
    method: MethodOpt,
    step: StepOpt,
    max_iter: u32,
    stop_gap: Option<f64>,
    sparsity: Option<usize>,
    noise: f64,
    data: Option<PathBuf>,
    schema: Option<String>,
    out: PathBuf,
}

impl Default for RunConfigBuilder {
    fn default() -> Self {
        Self {
            command: None,
            n: Vec::new(),
            t: 100,
            q: 2,
            seed: 0,
            gamma1: 0.5,
            gamma2: 0.5,
            method: MethodOpt::Fista,
            step: StepOpt::Backtrack,
            max_iter: 500,
            stop_gap: None,
            sparsity: None,
            noise: 0.1,
            data: None,
            schema: None,
            out: PathBuf::from("bench-out"),
        }
    }
}

fn parse_n_list(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| BenchError::Config(format!("bad size {part:?} in n list")))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| BenchError::Config(format!("bad value {value:?} for {key}")))
}

impl RunConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies one `key = value` setting; both the config file and the flag
    /// layer funnel through here so they accept the same keys.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "cmd" => self.command = Some(Command::parse(value)?),
            "n" => self.n = parse_n_list(value)?,
            "t" => self.t = parse_num(key, value)?,
            "q" => self.q = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "gamma1" => self.gamma1 = parse_num(key, value)?,
            "gamma2" => self.gamma2 = parse_num(key, value)?,
            "method" => self.method = MethodOpt::parse(value)?,
            "step" => self.step = StepOpt::parse(value)?,
            "max-iter" => self.max_iter = parse_num(key, value)?,
            "stop-gap" => self.stop_gap = Some(parse_num(key, value)?),
            "sparsity" => self.sparsity = Some(parse_num(key, value)?),
            "noise" => self.noise = parse_num(key, value)?,
            "data" => self.data = Some(PathBuf::from(value)),
            "schema" => self.schema = Some(value.to_string()),
            "out" => self.out = PathBuf::from(value),
            other => {
                return Err(BenchError::Config(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    /// Applies a config file: `key = value` lines, `#` comments, blank
    /// lines ignored.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                BenchError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.apply(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) -> Result<()> {
        if let Some(v) = &ov.cmd {
            self.apply("cmd", v)?;
        }
        if let Some(v) = &ov.n {
            self.apply("n", v)?;
        }
        if let Some(v) = ov.t {
            self.t = v;
        }
        if let Some(v) = ov.q {
            self.q = v;
        }
        if let Some(v) = ov.gamma1 {
            self.gamma1 = v;
        }
        if let Some(v) = ov.gamma2 {
            self.gamma2 = v;
        }
        if let Some(v) = ov.seed {
            self.seed = v;
        }
        if let Some(v) = &ov.method {
            self.apply("method", v)?;
        }
        if let Some(v) = &ov.step {
            self.apply("step", v)?;
        }
        if let Some(v) = ov.max_iter {
            self.max_iter = v;
        }
        if let Some(v) = ov.stop_gap {
            self.stop_gap = Some(v);
        }
        if let Some(v) = &ov.data {
            self.data = Some(v.clone());
        }
        if let Some(v) = &ov.schema {
            self.schema = Some(v.clone());
        }
        if let Some(v) = &ov.out {
            self.out = v.clone();
        }
        Ok(())
    }

    pub fn finish(self) -> Result<RunConfig> {
        let command = self
            .command
            .ok_or_else(|| BenchError::Config("no command given (set --cmd)".into()))?;
        let n = if self.n.is_empty() {
            match command {
                Command::ProjBench => vec![10, 100, 1000],
                _ => vec![200],
            }
        } else {
            self.n
        };
        if n.iter().any(|&v| v == 0) {
            return Err(BenchError::Config("sizes in n must be positive".into()));
        }
        if self.t == 0 {
            return Err(BenchError::Config("t must be positive".into()));
        }
        if self.q == 0 {
            return Err(BenchError::Config("q must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(BenchError::Config("max-iter must be positive".into()));
        }
        for (name, g) in [("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if !(g >= 0.0) || !g.is_finite() {
                return Err(BenchError::Config(format!("{name} must be finite and >= 0")));
            }
        }
        if let Some(tol) = self.stop_gap {
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(BenchError::Config("stop-gap must be finite and positive".into()));
            }
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(BenchError::Config("noise must be finite and >= 0".into()));
        }
        if self.data.is_some() != self.schema.is_some() {
            return Err(BenchError::Config("data and schema must be given together".into()));
        }
        Ok(RunConfig {
            command,
            n,
            t: self.t,
            q: self.q,
            seed: self.seed,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            method: self.method,
            step: self.step,
            max_iter: self.max_iter,
            stop_gap: self.stop_gap,
            sparsity: self.sparsity,
            noise: self.noise,
            data: self.data,
            schema: self.schema,
            out: self.out,
        })
    }
}

/// Builds the resolved config from the three layers.
pub fn build_config(file: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut builder = RunConfigBuilder::new();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)?;
        builder.apply_file_text(&text)?;
    }
    builder.apply_overrides(overrides)?;
    builder.finish()
}

impl RunConfig {
    /// The single size required by the regression commands.
    pub fn scalar_n(&self) -> Result<usize> {
        match self.n.as_slice() {
            [one] => Ok(*one),
            _ => Err(BenchError::Config(format!(
                "{} takes a single n, got {:?}",
                self.command.dir_name(),
                self.n
            ))),
        }
    }

    /// Synthetic ground-truth nonzero count.
    pub fn effective_sparsity(&self, n: usize) -> usize {
        self.sparsity.unwrap_or_else(|| (n / 10).max(1)).min(n)
    }

    /// Assembles the solver configuration, estimating the gradient
    /// Lipschitz constant when the constant step rule needs it.
    pub fn solver_config(&self, p: &SparseRegressionProblem) -> Result<SolverConfig> {
        self.solver_config_for(self.method, self.step, p)
    }

    pub fn solver_config_for(
        &self,
        method: MethodOpt,
        step: StepOpt,
        p: &SparseRegressionProblem,
    ) -> Result<SolverConfig> {
        let mut cfg = match (method, step) {
            (MethodOpt::Pg, StepOpt::Backtrack) => SolverConfig::pg_backtracking(self.max_iter),
            (MethodOpt::Fista, StepOpt::Backtrack) => {
                SolverConfig::fista_backtracking(self.max_iter)
            }
            (MethodOpt::Pg, StepOpt::Const) => {
                SolverConfig::pg_constant(lipschitz_estimate(p, 300, self.seed)?, self.max_iter)
            }
            (MethodOpt::Fista, StepOpt::Const) => {
                SolverConfig::fista_constant(lipschitz_estimate(p, 300, self.seed)?, self.max_iter)
            }
        };
        cfg.seed = self.seed;
        if let Some(tol) = self.stop_gap {
            cfg.stop = StoppingRule::FixedPointResidual { tol };
        }
        Ok(cfg)
    }

    /// Echo of every effective setting, one `key = value` per line, written
    /// next to the results so a run can be reproduced from its output.
    pub fn render(&self) -> String {
        let n_list = self.n.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        let mut lines = vec![
            format!("cmd = {}", self.command.dir_name()),
            format!("n = {n_list}"),
            format!("t = {}", self.t),
            format!("q = {}", self.q),
            format!("seed = {}", self.seed),
            format!("gamma1 = {}", self.gamma1),
            format!("gamma2 = {}", self.gamma2),
            format!("method = {}", self.method.as_str()),
            format!("step = {}", self.step.as_str()),
            format!("max-iter = {}", self.max_iter),
            format!("noise = {}", self.noise),
        ];
        if let Some(tol) = self.stop_gap {
            lines.push(format!("stop-gap = {tol}"));
        }
        if let Some(s) = self.sparsity {
            lines.push(format!("sparsity = {s}"));
        }
        if let Some(p) = &self.data {
            lines.push(format!("data = {}", p.display()));
        }
        if let Some(s) = &self.schema {
            lines.push(format!("schema = {s}"));
        }
        lines.push(format!("out = {}", self.out.display()));
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in_per_command() {
        let mut b = RunConfigBuilder::new();
        b.apply("cmd", "proj-bench").unwrap();
        let cfg = b.finish().unwrap();
        assert_eq!(cfg.n, vec![10, 100, 1000]);
        assert_eq!(cfg.gamma1, 0.5);
        assert_eq!(cfg.method, MethodOpt::Fista);

        let mut b = RunConfigBuilder::new();
        b.apply("cmd", "reg-solve").unwrap();
        let cfg = b.finish().unwrap();
        assert_eq!(cfg.n, vec![200]);
        assert_eq!(cfg.t, 100);
    }

    #[test]
    fn file_overrides_defaults_and_flags_override_file() {
        let mut b = RunConfigBuilder::new();
        b.apply_file_text("# comment\ncmd = reg-solve\nseed = 7\nmax-iter = 50\n").unwrap();
        let ov = Overrides { seed: Some(9), ..Overrides::default() };
        b.apply_overrides(&ov).unwrap();
        let cfg = b.finish().unwrap();
        assert_eq!(cfg.seed, 9, "flag beats file");
        assert_eq!(cfg.max_iter, 50, "file beats default");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut b = RunConfigBuilder::new();
        assert!(b.apply("frobnicate", "1").is_err());
        assert!(b.apply("n", "10,zero").is_err());
        assert!(b.apply_file_text("cmd reg-solve\n").is_err(), "missing equals sign");
    }

    #[test]
    fn validates_ranges() {
        let mut b = RunConfigBuilder::new();
        b.apply("cmd", "reg-solve").unwrap();
        b.apply("gamma1", "-1").unwrap();
        assert!(b.finish().is_err());

        let mut b = RunConfigBuilder::new();
        b.apply("cmd", "reg-solve").unwrap();
        b.apply("data", "somewhere.csv").unwrap();
        assert!(b.finish().is_err(), "data without schema");
    }

    #[test]
    fn render_round_trips_through_the_parser() {
        let mut b = RunConfigBuilder::new();
        b.apply_file_text("cmd = group-solve\nn = 40\nq = 4\nstop-gap = 1e-6\n").unwrap();
        let cfg = b.finish().unwrap();
        let mut again = RunConfigBuilder::new();
        again.apply_file_text(&cfg.render()).unwrap();
        assert_eq!(again.finish().unwrap(), cfg);
    }
}
