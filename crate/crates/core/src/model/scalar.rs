//! Numeric entries of bundle files: plain numbers, exact rationals such as
//! `"1/3"`, or affine forms over named parameters such as `"1+s"` or `"-2*s"`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::ModelError;

/// A probability as it was written in the source file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Probability {
    Exact(Ratio<i64>),
    Float(f64),
}

impl Probability {
    pub fn value(&self) -> f64 {
        match self {
            Probability::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Probability::Float(x) => *x,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Probability::Exact(r) => *r.numer() > 0,
            Probability::Float(x) => *x > 0.0,
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Probability::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Raw scalar as found in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Number(x)
    }
}

impl Scalar {
    pub fn eval(&self, params: &BTreeMap<String, f64>) -> Result<f64, ModelError> {
        match self {
            Scalar::Number(x) => Ok(*x),
            Scalar::Text(s) => {
                if let Some(r) = parse_ratio(s) {
                    return Ok(*r.numer() as f64 / *r.denom() as f64);
                }
                eval_affine(s, params)
            }
        }
    }

    pub fn probability(&self, params: &BTreeMap<String, f64>) -> Result<Probability, ModelError> {
        match self {
            Scalar::Text(s) => match parse_ratio(s) {
                Some(r) => Ok(Probability::Exact(r)),
                None => Ok(Probability::Float(eval_affine(s, params)?)),
            },
            Scalar::Number(x) => Ok(Probability::Float(*x)),
        }
    }
}

fn parse_ratio(s: &str) -> Option<Ratio<i64>> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
        None => (s.parse::<i64>().ok()?, 1),
    };
    (den != 0).then(|| Ratio::new(num, den))
}

/// Evaluates `c0 + c1*name1 - name2 + ...`. Only sums of constants and
/// constant multiples of parameters are accepted.
fn eval_affine(src: &str, params: &BTreeMap<String, f64>) -> Result<f64, ModelError> {
    let bad = |why: &str| ModelError::Parse(format!("cannot evaluate `{src}`: {why}"));
    let text: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(bad("empty expression"));
    }
    // split into signed terms
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = text.as_bytes();
    for i in 1..bytes.len() {
        let c = bytes[i];
        let prev = bytes[i - 1];
        if (c == b'+' || c == b'-') && prev != b'e' && prev != b'E' && prev != b'*' {
            terms.push(&text[start..i]);
            start = i;
        }
    }
    terms.push(&text[start..]);

    let mut total = 0.0;
    for term in terms {
        let (sign, body) = match term.as_bytes().first() {
            Some(b'-') => (-1.0, &term[1..]),
            Some(b'+') => (1.0, &term[1..]),
            _ => (1.0, term),
        };
        if body.is_empty() {
            return Err(bad("dangling sign"));
        }
        let mut value = sign;
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(bad("empty factor"));
            }
            if let Ok(x) = factor.parse::<f64>() {
                value *= x;
            } else if let Some(x) = params.get(factor) {
                value *= x;
            } else {
                return Err(bad(&format!("unknown parameter `{factor}`")));
            }
        }
        total += value;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BTreeMap<String, f64> {
        BTreeMap::from([("s".to_string(), 0.1)])
    }

    #[test]
    fn affine_forms() {
        let p = params();
        assert_eq!(Scalar::Text("1+s".into()).eval(&p).unwrap(), 1.1);
        assert_eq!(Scalar::Text("-2*s + 3".into()).eval(&p).unwrap(), 2.8);
        assert_eq!(Scalar::Text("1e-3".into()).eval(&p).unwrap(), 1e-3);
        assert_eq!(Scalar::Number(4.0).eval(&p).unwrap(), 4.0);
        assert!(Scalar::Text("1+t".into()).eval(&p).is_err());
        assert!(Scalar::Text("1+".into()).eval(&p).is_err());
    }

    #[test]
    fn rationals_stay_exact() {
        let p = Scalar::Text("1/3".into()).probability(&params()).unwrap();
        assert_eq!(p, Probability::Exact(Ratio::new(1, 3)));
        assert!((p.value() - 1.0 / 3.0).abs() < 1e-16);
    }
}
