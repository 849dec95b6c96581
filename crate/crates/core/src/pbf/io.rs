//! Polynomial text format: one monomial per line as `coeff v1 v2 ...`, an
//! empty variable list for the constant, `#` starting a comment.

use std::fmt::Write;

use super::Polynomial;
use crate::{Error, Result, Scalar};

pub fn poly_to_text<F: Scalar>(p: &Polynomial<F>) -> String {
    let mut out = String::new();
    for (vars, c) in p.terms() {
        let _ = write!(out, "{c}");
        for v in vars {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_poly<F: Scalar>(text: &str) -> Result<Polynomial<F>> {
    let mut p = Polynomial::zero();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: k + 1,
            message,
        };
        let mut fields = line.split_whitespace();
        let c = fields.next().unwrap_or("");
        let coeff: F = c
            .parse()
            .map_err(|_| err(format!("bad coefficient `{c}`")))?;
        let vars = fields
            .map(|f| {
                f.parse::<usize>()
                    .map_err(|_| err(format!("bad variable `{f}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        p.add_term(vars, coeff);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_errors() {
        let p = Polynomial::<f64>::from_terms([
            (vec![], 1.25),
            (vec![0, 2], -3.0),
            (vec![1, 2, 4], 0.5),
        ]);
        assert_eq!(parse_poly::<f64>(&poly_to_text(&p)).unwrap(), p);
        let parsed = parse_poly::<f64>("# c\n2 1 1\n-1 1 # trailing\n").unwrap();
        assert_eq!(parsed, Polynomial::term([1], 1.0));
        assert!(matches!(
            parse_poly::<f64>("1 0\nx 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_poly::<f64>("1 -2\n").is_err());
    }
}
