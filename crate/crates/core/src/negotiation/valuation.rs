//! Per-issue valuation functions mapping an issue value into `[0, 1]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::domain::{Issue, IssueKind, Value};
use crate::error::{Error, Result};
use crate::Flagged;

/// Piecewise-affine valuation on `[a, b]`: monotone ramps or a single peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum TriangularFn {
    /// `t(a) = 0`, `t(b) = 1`.
    Increasing { a: f64, b: f64 },
    /// `t(a) = 1`, `t(b) = 0`.
    Decreasing { a: f64, b: f64 },
    /// `t(a) = 0`, `t(c) = 1`, `t(b) = 0`.
    Peaked { a: f64, c: f64, b: f64 },
}

impl TriangularFn {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            TriangularFn::Increasing { a, b }
            | TriangularFn::Decreasing { a, b }
            | TriangularFn::Peaked { a, b, .. } => (a, b),
        }
    }

    pub fn check(&self) -> Result<()> {
        let (a, b) = self.bounds();
        if !(a < b) {
            return Err(Error::InvalidProfile(format!("triangular bounds {a} < {b} violated")));
        }
        if let TriangularFn::Peaked { c, .. } = *self {
            if !(a <= c && c <= b) {
                return Err(Error::InvalidProfile(format!("peak {c} outside [{a}, {b}]")));
            }
        }
        Ok(())
    }

    /// Evaluate, clamping `v` into `[a, b]`; the flag records that a clamp happened.
    pub fn eval_flagged(&self, v: f64) -> Flagged<f64> {
        let (a, b) = self.bounds();
        let clamped = v.clamp(a, b);
        let value = match *self {
            TriangularFn::Increasing { .. } => (clamped - a) / (b - a),
            TriangularFn::Decreasing { .. } => (b - clamped) / (b - a),
            TriangularFn::Peaked { c, .. } => {
                if clamped == c {
                    1.0
                } else if clamped < c {
                    (clamped - a) / (c - a)
                } else {
                    (b - clamped) / (b - c)
                }
            }
        };
        Flagged { value: value.clamp(0.0, 1.0), flagged: clamped != v }
    }

    pub fn eval(&self, v: f64) -> f64 {
        self.eval_flagged(v).value
    }
}

/// How one issue value is scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "lowercase")]
pub enum Valuation {
    /// Affine ramp with `from -> 0` and `to -> 1`, clamped outside.
    Linear { from: f64, to: f64 },
    Triangular(TriangularFn),
    /// Explicit score per value; keys are the value's text form.
    Table { scores: BTreeMap<String, f64> },
    /// Polynomial `c0 + c1 v + c2 v^2 + ...`, clamped into `[0, 1]`.
    Poly { coefficients: Vec<f64> },
    /// Linear interpolation through `(x, y)` breakpoints sorted by `x`;
    /// constant beyond the outer breakpoints.
    Piecewise { points: Vec<(f64, f64)> },
}

impl Valuation {
    /// Check the valuation is well formed and can score every value of `issue`.
    pub fn check_for(&self, issue: &Issue) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidProfile(format!("issue {}: {msg}", issue.name)));
        let categorical = matches!(issue.kind, IssueKind::Categorical { .. });
        match self {
            Valuation::Table { scores } => {
                if let Some((k, s)) = scores.iter().find(|(_, s)| !(0.0..=1.0).contains(*s)) {
                    return err(format!("table score {s} for {k} outside [0, 1]"));
                }
                match issue.enumerate() {
                    None => return err("table valuation needs a finite issue".into()),
                    Some(values) => {
                        if let Some(missing) = values.iter().find(|v| !scores.contains_key(&v.key())) {
                            return err(format!("table has no score for value {missing}"));
                        }
                    }
                }
            }
            _ if categorical => return err("categorical issues need a table valuation".into()),
            Valuation::Linear { from, to } => {
                if from == to || !from.is_finite() || !to.is_finite() {
                    return err(format!("degenerate linear valuation {from} -> {to}"));
                }
            }
            Valuation::Triangular(t) => t.check()?,
            Valuation::Poly { coefficients } => {
                if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
                    return err("polynomial needs finite coefficients".into());
                }
            }
            Valuation::Piecewise { points } => {
                if points.len() < 2 {
                    return err("piecewise valuation needs two breakpoints".into());
                }
                if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return err("piecewise breakpoints must be strictly increasing".into());
                }
                if points.iter().any(|(_, y)| !(0.0..=1.0).contains(y)) {
                    return err("piecewise values must lie in [0, 1]".into());
                }
            }
        }
        Ok(())
    }

    /// Score for a value; always inside `[0, 1]`.
    pub fn score(&self, value: &Value) -> f64 {
        let raw = match self {
            Valuation::Table { scores } => scores.get(&value.key()).copied().unwrap_or(0.0),
            numeric => {
                let Some(x) = value.as_f64() else { return 0.0 };
                numeric.score_numeric(x)
            }
        };
        raw.clamp(0.0, 1.0)
    }

    fn score_numeric(&self, x: f64) -> f64 {
        match self {
            Valuation::Linear { from, to } => (x - from) / (to - from),
            Valuation::Triangular(t) => t.eval(x),
            Valuation::Poly { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Valuation::Piecewise { points } => piecewise(points, x),
            Valuation::Table { .. } => unreachable!("tables are keyed, not numeric"),
        }
    }
}

fn piecewise(points: &[(f64, f64)], x: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = points.partition_point(|p| p.0 <= x);
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
