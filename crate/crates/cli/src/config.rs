//! Run configuration: defaults, then a `key = value` file, then flags.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use annealdp::anneal::{
    GreedySampler, HeuristicSampler, Sampler, StateVectorSampler, TimingModel, DEFAULT_PROGRAM_US,
    DEFAULT_READOUT_US,
};
use annealdp::rbc::{
    CombinatorialConfig, IterationMode, MergedConfig, DEFAULT_INIT, DEFAULT_K_NODES, DEFAULT_TOL,
};
use clap::ValueEnum;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// Analytic policy step, least-squares valuation.
    #[value(alias = "1")]
    Classical,
    /// Analytic policy step, exhaustive search over the encoded valuation.
    #[value(alias = "2")]
    Combinatorial,
    /// Analytic policy step, sampled valuation QUBO.
    #[value(alias = "3")]
    Hybrid,
    /// Merged program, reads chained through both parameter groups.
    #[value(alias = "4")]
    MultiAnneal,
    /// Merged program, independent reads with several cycles each.
    #[value(alias = "5")]
    OneShot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Statevector,
    Heuristic,
    Greedy,
}

impl Engine {
    pub fn sampler(self) -> Box<dyn Sampler> {
        match self {
            Engine::Statevector => Box::new(StateVectorSampler::default()),
            Engine::Heuristic => Box::new(HeuristicSampler::default()),
            Engine::Greedy => Box::new(GreedySampler),
        }
    }
}

pub fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub engine: Engine,
    /// Top bit index shared by the three merged-problem encodings.
    pub width: usize,
    pub j1: Option<usize>,
    pub j2: Option<usize>,
    pub j3: Option<usize>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub s3: Option<f64>,
    /// Per-algorithm default when unset.
    pub reads: Option<usize>,
    pub cycles: usize,
    pub reversal: f64,
    /// Forward anneal time, or segment time of the cyclic schedules (us).
    pub anneal_time: f64,
    pub seed: u64,
    pub keep_fraction: f64,
    pub k_nodes: usize,
    /// Fixed iteration count; unset runs until converged.
    pub iterations: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub executions: usize,
    pub init: [f64; 3],
    pub init_true: bool,
    pub program_us: f64,
    pub readout_us: f64,
    pub out_dir: PathBuf,
    pub shock_index: usize,
    pub periods: usize,
    pub x1: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Combinatorial,
            engine: Engine::Greedy,
            width: 6,
            j1: None,
            j2: None,
            j3: None,
            s1: None,
            s2: None,
            s3: None,
            reads: None,
            cycles: 3,
            reversal: 0.0,
            anneal_time: 20.0,
            seed: 0,
            keep_fraction: 0.1,
            k_nodes: DEFAULT_K_NODES,
            iterations: None,
            tol: DEFAULT_TOL,
            max_iter: 10,
            executions: 1,
            init: DEFAULT_INIT,
            init_true: false,
            program_us: DEFAULT_PROGRAM_US,
            readout_us: DEFAULT_READOUT_US,
            out_dir: PathBuf::from("out"),
            shock_index: 0,
            periods: 10,
            x1: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| CliError::usage(format!("invalid value `{value}` for `{key}`: {e}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T> {
    T::from_str(value, true)
        .map_err(|_| CliError::usage(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Sets one key. Hyphens and underscores are interchangeable; unknown
    /// keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let k = key.as_str();
        let v = value.trim();
        match k {
            "algorithm" => self.algorithm = parse_enum(k, v)?,
            "engine" => self.engine = parse_enum(k, v)?,
            "width" => self.width = parse(k, v)?,
            "j1" => self.j1 = Some(parse(k, v)?),
            "j2" => self.j2 = Some(parse(k, v)?),
            "j3" => self.j3 = Some(parse(k, v)?),
            "s1" => self.s1 = Some(parse(k, v)?),
            "s2" => self.s2 = Some(parse(k, v)?),
            "s3" => self.s3 = Some(parse(k, v)?),
            "reads" => self.reads = Some(parse(k, v)?),
            "cycles" => self.cycles = parse(k, v)?,
            "reversal" => self.reversal = parse(k, v)?,
            "anneal_time" => self.anneal_time = parse(k, v)?,
            "seed" => self.seed = parse(k, v)?,
            "keep_fraction" => self.keep_fraction = parse(k, v)?,
            "k_nodes" => self.k_nodes = parse(k, v)?,
            "iterations" => self.iterations = Some(parse(k, v)?),
            "tol" => self.tol = parse(k, v)?,
            "max_iter" => self.max_iter = parse(k, v)?,
            "executions" => self.executions = parse(k, v)?,
            "init" => {
                let parts: Vec<f64> = v
                    .split(',')
                    .map(|p| parse(k, p.trim()))
                    .collect::<Result<_>>()?;
                self.init = parts.try_into().map_err(|_| {
                    CliError::usage(format!(
                        "`init` needs three comma-separated values, got `{v}`"
                    ))
                })?;
            }
            "init_true" => self.init_true = parse(k, v)?,
            "program_us" => self.program_us = parse(k, v)?,
            "readout_us" => self.readout_us = parse(k, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "shock_index" => self.shock_index = parse(k, v)?,
            "periods" => self.periods = parse(k, v)?,
            "x1" => self.x1 = Some(parse(k, v)?),
            _ => return Err(CliError::usage(format!("unknown config key `{k}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document. Blank lines and `#` comments are
    /// skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected `key = value`", n + 1))
            })?;
            self.set(k, v).map_err(|e| match e {
                CliError::Usage(m) => CliError::Usage(format!("config line {}: {m}", n + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_text(&text)
    }

    /// `key=value` overrides from the command line.
    pub fn apply_pairs(&mut self, pairs: &[String]) -> Result<()> {
        for p in pairs {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("expected key=value, got `{p}`")))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(CliError::usage(format!("{field}: {msg}")));
        if !(1..=20).contains(&self.width) {
            return bad("width", format!("must lie in 1..=20, got {}", self.width));
        }
        for (name, j) in [("j1", self.j1), ("j2", self.j2), ("j3", self.j3)] {
            if let Some(j) = j {
                if !(1..=20).contains(&j) {
                    return bad(name, format!("must lie in 1..=20, got {j}"));
                }
            }
        }
        for (name, s) in [("s1", self.s1), ("s2", self.s2), ("s3", self.s3)] {
            if let Some(s) = s {
                if !(s.is_finite() && s != 0.0) {
                    return bad(name, format!("must be finite and nonzero, got {s}"));
                }
            }
        }
        if self.s1.is_some_and(|s| s < 0.0) {
            return bad("s1", "the savings rate scale must be positive".into());
        }
        if self.reads == Some(0) {
            return bad("reads", "must be positive".into());
        }
        if self.cycles == 0 {
            return bad("cycles", "must be positive".into());
        }
        if !(0.0..1.0).contains(&self.reversal) {
            return bad(
                "reversal",
                format!("must lie in [0, 1), got {}", self.reversal),
            );
        }
        if !(self.anneal_time > 0.0 && self.anneal_time.is_finite()) {
            return bad(
                "anneal_time",
                format!("must be positive, got {}", self.anneal_time),
            );
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return bad(
                "keep_fraction",
                format!("must lie in (0, 1], got {}", self.keep_fraction),
            );
        }
        if self.k_nodes < 2 {
            return bad(
                "k_nodes",
                format!("needs at least 2 nodes, got {}", self.k_nodes),
            );
        }
        if self.iterations == Some(0) {
            return bad("iterations", "must be positive".into());
        }
        if !(self.tol > 0.0) {
            return bad("tol", format!("must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter", "must be positive".into());
        }
        if self.executions == 0 {
            return bad("executions", "must be positive".into());
        }
        if !(self.init[0] > 0.0 && self.init[0] < 1.0) {
            return bad(
                "init",
                format!("x1 must lie in (0, 1), got {}", self.init[0]),
            );
        }
        if !(self.init[2] > 0.0) {
            return bad("init", format!("x3 must be positive, got {}", self.init[2]));
        }
        if !(self.program_us >= 0.0 && self.readout_us >= 0.0) {
            return bad("program_us", "timing overrides must be nonnegative".into());
        }
        if self.periods == 0 {
            return bad("periods", "must be positive".into());
        }
        if let Some(x1) = self.x1 {
            if !(x1 > 0.0 && x1 < 1.0) {
                return bad("x1", format!("must lie in (0, 1), got {x1}"));
            }
        }
        Ok(())
    }

    /// Reads per anneal call, defaulting per algorithm.
    pub fn reads_or_default(&self) -> usize {
        self.reads.unwrap_or(match self.algorithm {
            Algorithm::Hybrid => 100,
            Algorithm::MultiAnneal => 50,
            _ => 200,
        })
    }

    pub fn mode(&self) -> IterationMode {
        match self.iterations {
            Some(n) => IterationMode::Fixed(n),
            None if self.algorithm == Algorithm::Hybrid => IterationMode::Fixed(2),
            None => IterationMode::UntilConverged {
                tol: self.tol,
                max_iter: self.max_iter,
            },
        }
    }

    pub fn timing(&self) -> TimingModel {
        TimingModel {
            t_program: self.program_us,
            t_readout: self.readout_us,
        }
    }

    /// Value encodings of the combinatorial and hybrid runs.
    pub fn combinatorial(&self) -> CombinatorialConfig {
        let d = CombinatorialConfig::default();
        CombinatorialConfig {
            j2: self.j2.unwrap_or(d.j2),
            j3: self.j3.unwrap_or(d.j3),
            s2: self.s2.unwrap_or(d.s2),
            s3: self.s3.unwrap_or(d.s3),
        }
    }

    /// Merged-problem encodings: each width falls back to `width` and each
    /// scale to the one that keeps the default range at that width.
    pub fn merged(&self) -> MergedConfig {
        let j = [self.j1, self.j2, self.j3].map(|j| j.unwrap_or(self.width));
        let mut m = MergedConfig::with_width(self.width);
        m.j1 = j[0];
        m.j2 = j[1];
        m.j3 = j[2];
        m.s1 = self.s1.unwrap_or(MergedConfig::with_width(j[0]).s1);
        m.s2 = self.s2.unwrap_or(MergedConfig::with_width(j[1]).s2);
        m.s3 = self.s3.unwrap_or(MergedConfig::with_width(j[2]).s3);
        m
    }

    /// The resolved configuration as `key = value` lines, readable by
    /// [`RunConfig::apply_text`].
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("algorithm = {}", value_name(self.algorithm)),
            format!("engine = {}", value_name(self.engine)),
            format!("width = {}", self.width),
        ];
        let opt = |name: &str, v: Option<String>| v.map(|v| format!("{name} = {v}"));
        lines.extend(opt("j1", self.j1.map(|v| v.to_string())));
        lines.extend(opt("j2", self.j2.map(|v| v.to_string())));
        lines.extend(opt("j3", self.j3.map(|v| v.to_string())));
        lines.extend(opt("s1", self.s1.map(|v| v.to_string())));
        lines.extend(opt("s2", self.s2.map(|v| v.to_string())));
        lines.extend(opt("s3", self.s3.map(|v| v.to_string())));
        lines.extend(opt("reads", self.reads.map(|v| v.to_string())));
        lines.extend(opt("iterations", self.iterations.map(|v| v.to_string())));
        lines.extend(opt("x1", self.x1.map(|v| v.to_string())));
        lines.extend([
            format!("cycles = {}", self.cycles),
            format!("reversal = {}", self.reversal),
            format!("anneal_time = {}", self.anneal_time),
            format!("seed = {}", self.seed),
            format!("keep_fraction = {}", self.keep_fraction),
            format!("k_nodes = {}", self.k_nodes),
            format!("tol = {}", self.tol),
            format!("max_iter = {}", self.max_iter),
            format!("executions = {}", self.executions),
            format!("init = {},{},{}", self.init[0], self.init[1], self.init[2]),
            format!("init_true = {}", self.init_true),
            format!("program_us = {}", self.program_us),
            format!("readout_us = {}", self.readout_us),
            format!("out_dir = {}", self.out_dir.display()),
            format!("shock_index = {}", self.shock_index),
            format!("periods = {}", self.periods),
        ]);
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_unknown_keys() {
        let mut c = RunConfig::default();
        c.apply_text("# run\nalgorithm = one-shot\nreads=12\nanneal-time = 30 # us\n")
            .unwrap();
        assert_eq!(c.algorithm, Algorithm::OneShot);
        assert_eq!(c.reads, Some(12));
        assert_eq!(c.anneal_time, 30.0);
        let err = c.apply_text("\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(err.to_string().contains("bogus"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn algorithms_accept_numbers() {
        let mut c = RunConfig::default();
        c.set("algorithm", "3").unwrap();
        assert_eq!(c.algorithm, Algorithm::Hybrid);
        assert!(c.set("algorithm", "6").is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = RunConfig::default();
        c.keep_fraction = 0.0;
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("keep_fraction"));
        let mut c = RunConfig::default();
        c.init = [1.5, 0.0, 1.0];
        assert!(c.validate().unwrap_err().to_string().contains("init"));
    }

    #[test]
    fn text_round_trip() {
        let mut c = RunConfig::default();
        c.set("algorithm", "hybrid").unwrap();
        c.set("s2", "-0.04").unwrap();
        c.set("init", "0.4, -1, 0.7").unwrap();
        let mut d = RunConfig::default();
        d.apply_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn merged_scales_follow_the_widths() {
        let mut c = RunConfig::default();
        c.j3 = Some(4);
        let m = c.merged();
        assert_eq!(m.j1, 6);
        assert_eq!(m.j3, 4);
        assert_eq!(m.s3, MergedConfig::with_width(4).s3);
        assert_eq!(m.s2, MergedConfig::with_width(6).s2);
    }
}
