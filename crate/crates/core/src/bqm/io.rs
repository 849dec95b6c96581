//! Line-oriented text format for models.
//!
//! ```text
//! # comment
//! qubo n=3
//! 0 0 1.5
//! 0 2 -2
//! ```
//!
//! Each term line is `i j coefficient`; `i == j` is a linear term (a bias in
//! the Ising form). Repeated pairs accumulate.

use std::fmt::Write;

use super::{IsingModel, QuboModel};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel<F> {
    Ising(IsingModel<F>),
    Qubo(QuboModel<F>),
}

impl<F: Scalar> AnyModel<F> {
    pub fn num_vars(&self) -> usize {
        match self {
            AnyModel::Ising(m) => m.num_vars(),
            AnyModel::Qubo(m) => m.num_vars(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            AnyModel::Ising(m) => ising_to_text(m),
            AnyModel::Qubo(m) => qubo_to_text(m),
        }
    }
}

pub fn qubo_to_text<F: Scalar>(m: &QuboModel<F>) -> String {
    let mut out = format!("qubo n={}\n", m.num_vars());
    for ((i, j), v) in m.entries() {
        let _ = writeln!(out, "{i} {j} {v}");
    }
    out
}

pub fn ising_to_text<F: Scalar>(m: &IsingModel<F>) -> String {
    let mut out = format!("ising n={}\n", m.num_vars());
    for (i, &h) in m.biases().iter().enumerate() {
        if h != F::zero() {
            let _ = writeln!(out, "{i} {i} {h}");
        }
    }
    for ((i, j), v) in m.couplings() {
        let _ = writeln!(out, "{i} {j} {v}");
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_model<F: Scalar>(text: &str) -> Result<AnyModel<F>> {
    let mut model: Option<AnyModel<F>> = None;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(m) = model.as_mut() else {
            model = Some(parse_header(line, line_no)?);
            continue;
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, "expected `i j coefficient`"));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad index `{}`", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad index `{}`", fields[1])))?;
        let v: F = fields[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad coefficient `{}`", fields[2])))?;
        let res = match m {
            AnyModel::Qubo(q) => q.add(i, j, v),
            AnyModel::Ising(s) if i == j => s.add_bias(i, v),
            AnyModel::Ising(s) => s.add_coupling(i, j, v),
        };
        res.map_err(|e| parse_err(line_no, e.to_string()))?;
    }
    model.ok_or_else(|| parse_err(0, "missing `qubo n=<N>` or `ising n=<N>` header"))
}

fn parse_header<F: Scalar>(line: &str, line_no: usize) -> Result<AnyModel<F>> {
    let mut parts = line.split_whitespace();
    let kind = parts.next().unwrap_or("");
    let n = parts
        .next()
        .and_then(|p| p.strip_prefix("n="))
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| parse_err(line_no, "header must be `qubo n=<N>` or `ising n=<N>`"))?;
    if parts.next().is_some() {
        return Err(parse_err(line_no, "trailing text after header"));
    }
    match kind {
        "qubo" => Ok(AnyModel::Qubo(QuboModel::new(n))),
        "ising" => Ok(AnyModel::Ising(IsingModel::new(n))),
        other => Err(parse_err(line_no, format!("unknown model kind `{other}`"))),
    }
}
