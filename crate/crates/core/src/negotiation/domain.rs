use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The value space of one negotiable issue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IssueKind {
    Integer { lo: i64, hi: i64 },
    Continuous { lo: f64, hi: f64 },
    Categorical { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub name: String,
    #[serde(flatten)]
    pub kind: IssueKind,
}

impl Issue {
    pub fn integer(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        Self { name: name.into(), kind: IssueKind::Integer { lo, hi } }
    }

    pub fn continuous(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), kind: IssueKind::Continuous { lo, hi } }
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, categories: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            kind: IssueKind::Categorical { categories: categories.into_iter().map(Into::into).collect() },
        }
    }

    fn check(&self) -> Result<()> {
        match &self.kind {
            IssueKind::Integer { lo, hi } if lo >= hi => {
                Err(Error::InvalidDomain(format!("issue {}: lo {lo} must be below hi {hi}", self.name)))
            }
            IssueKind::Continuous { lo, hi } if !(lo < hi) || !lo.is_finite() || !hi.is_finite() => {
                Err(Error::InvalidDomain(format!("issue {}: lo {lo} must be below hi {hi}", self.name)))
            }
            IssueKind::Categorical { categories } => {
                if categories.is_empty() {
                    return Err(Error::InvalidDomain(format!("issue {}: no categories", self.name)));
                }
                let distinct: HashSet<&String> = categories.iter().collect();
                if distinct.len() != categories.len() {
                    return Err(Error::InvalidDomain(format!("issue {}: duplicate categories", self.name)));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, value: &Value) -> bool {
        match (&self.kind, value) {
            (IssueKind::Integer { lo, hi }, Value::Int(v)) => lo <= v && v <= hi,
            (IssueKind::Continuous { lo, hi }, Value::Real(v)) => *lo <= *v && *v <= *hi,
            // Integral reals are accepted on continuous issues after JSON round-trips.
            (IssueKind::Continuous { lo, hi }, Value::Int(v)) => *lo <= *v as f64 && (*v as f64) <= *hi,
            (IssueKind::Categorical { categories }, Value::Cat(c)) => categories.contains(c),
            _ => false,
        }
    }

    /// Numeric bounds used by regressors and triangular hypotheses.
    /// Categorical issues map onto category indices `0..k-1`.
    pub fn numeric_range(&self) -> (f64, f64) {
        match &self.kind {
            IssueKind::Integer { lo, hi } => (*lo as f64, *hi as f64),
            IssueKind::Continuous { lo, hi } => (*lo, *hi),
            IssueKind::Categorical { categories } => (0.0, (categories.len() - 1) as f64),
        }
    }

    /// Numeric coordinate of a value on this issue.
    pub fn to_numeric(&self, value: &Value) -> Option<f64> {
        match (&self.kind, value) {
            (IssueKind::Categorical { categories }, Value::Cat(c)) => {
                categories.iter().position(|x| x == c).map(|i| i as f64)
            }
            (IssueKind::Categorical { .. }, _) => None,
            (_, v) => v.as_f64(),
        }
    }

    /// Map an arbitrary real onto the closest legal value of this issue.
    pub fn clamp_numeric(&self, x: f64) -> Value {
        let x = if x.is_finite() { x } else { self.numeric_range().0 };
        match &self.kind {
            IssueKind::Integer { lo, hi } => Value::Int((x.round() as i64).clamp(*lo, *hi)),
            IssueKind::Continuous { lo, hi } => Value::Real(x.clamp(*lo, *hi)),
            IssueKind::Categorical { categories } => {
                let idx = (x.round().max(0.0) as usize).min(categories.len() - 1);
                Value::Cat(categories[idx].clone())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Value {
        match &self.kind {
            IssueKind::Integer { lo, hi } => Value::Int(rng.random_range(*lo..=*hi)),
            IssueKind::Continuous { lo, hi } => Value::Real(rng.random_range(*lo..=*hi)),
            IssueKind::Categorical { categories } => {
                Value::Cat(categories.choose(rng).expect("non-empty categories").clone())
            }
        }
    }

    /// Every legal value, when the issue is finite.
    pub fn enumerate(&self) -> Option<Vec<Value>> {
        match &self.kind {
            IssueKind::Integer { lo, hi } => Some((*lo..=*hi).map(Value::Int).collect()),
            IssueKind::Continuous { .. } => None,
            IssueKind::Categorical { categories } => Some(categories.iter().cloned().map(Value::Cat).collect()),
        }
    }
}

/// One issue value inside a bid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Cat(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Real(v) => Some(*v),
            Value::Cat(_) => None,
        }
    }

    /// Key used by table valuations.
    pub fn key(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => v.to_string(),
            Value::Cat(c) => c.clone(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v}"),
            Value::Cat(c) => f.write_str(c),
        }
    }
}

/// An assignment of one value to every issue, keyed by issue name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bid {
    pub values: BTreeMap<String, Value>,
}

impl Bid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, issue: impl Into<String>, value: Value) -> Self {
        self.values.insert(issue.into(), value);
        self
    }

    pub fn get(&self, issue: &str) -> Option<&Value> {
        self.values.get(issue)
    }

    pub fn set(&mut self, issue: impl Into<String>, value: Value) {
        self.values.insert(issue.into(), value);
    }
}

impl fmt::Display for Bid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// A reason a bid does not fit its domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MissingIssue(String),
    ExtraIssue(String),
    OutOfRange { issue: String, value: Value },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingIssue(name) => write!(f, "missing issue {name}"),
            Violation::ExtraIssue(name) => write!(f, "extra issue {name}"),
            Violation::OutOfRange { issue, value } => write!(f, "out of range value {value} for issue {issue}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegotiationDomain {
    issues: Vec<Issue>,
}

impl NegotiationDomain {
    pub fn new(issues: Vec<Issue>) -> Result<Self> {
        if issues.is_empty() {
            return Err(Error::InvalidDomain("a domain needs at least one issue".into()));
        }
        let mut seen = HashSet::new();
        for issue in &issues {
            issue.check()?;
            if !seen.insert(issue.name.as_str()) {
                return Err(Error::InvalidDomain(format!("duplicate issue name {}", issue.name)));
            }
        }
        Ok(Self { issues })
    }

    /// `count` integer issues named `issue1..issueN`, each on `[lo, hi]`.
    pub fn integer_issues(count: usize, lo: i64, hi: i64) -> Result<Self> {
        Self::new((1..=count).map(|i| Issue::integer(format!("issue{i}"), lo, hi)).collect())
    }

    pub fn issues(&self) -> &[Issue] {
        &self.issues
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.issues.iter().position(|i| i.name == name)
    }

    /// Empty list iff the bid assigns exactly one in-range value to every issue.
    pub fn validate_bid(&self, bid: &Bid) -> Vec<Violation> {
        let mut violations = Vec::new();
        for issue in &self.issues {
            match bid.get(&issue.name) {
                None => violations.push(Violation::MissingIssue(issue.name.clone())),
                Some(v) if !issue.contains(v) => {
                    violations.push(Violation::OutOfRange { issue: issue.name.clone(), value: v.clone() })
                }
                Some(_) => {}
            }
        }
        for name in bid.values.keys() {
            if self.index_of(name).is_none() {
                violations.push(Violation::ExtraIssue(name.clone()));
            }
        }
        violations
    }

    pub fn check_bid(&self, bid: &Bid) -> Result<()> {
        let violations = self.validate_bid(bid);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidBid(violations))
        }
    }

    /// Bid values in domain issue order.
    pub fn resolve<'b>(&self, bid: &'b Bid) -> Result<Vec<&'b Value>> {
        self.check_bid(bid)?;
        Ok(self.issues.iter().map(|i| &bid.values[&i.name]).collect())
    }

    /// Uniform draw, independently per issue.
    pub fn random_bid<R: Rng + ?Sized>(&self, rng: &mut R) -> Bid {
        Bid { values: self.issues.iter().map(|i| (i.name.clone(), i.sample(rng))).collect() }
    }

    /// Bid from values given in domain issue order.
    pub fn bid_from_values(&self, values: Vec<Value>) -> Bid {
        assert_eq!(values.len(), self.issues.len(), "one value per issue");
        Bid { values: self.issues.iter().map(|i| i.name.clone()).zip(values).collect() }
    }

    /// Numeric coordinates of a bid in issue order (categories as indices).
    pub fn to_vector(&self, bid: &Bid) -> Result<Vec<f64>> {
        self.check_bid(bid)?;
        Ok(self
            .issues
            .iter()
            .map(|i| i.to_numeric(&bid.values[&i.name]).expect("validated value"))
            .collect())
    }

    /// Closest legal bid to a numeric vector (rounded and clamped per issue).
    pub fn from_vector(&self, coords: &[f64]) -> Bid {
        Bid {
            values: self
                .issues
                .iter()
                .zip(coords)
                .map(|(i, x)| (i.name.clone(), i.clamp_numeric(*x)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn domain() -> NegotiationDomain {
        NegotiationDomain::new(vec![
            Issue::integer("price", 0, 10),
            Issue::continuous("delivery", 0.0, 1.0),
            Issue::categorical("colour", ["red", "green"]),
        ])
        .unwrap()
    }

    fn full_bid() -> Bid {
        Bid::new()
            .with("price", Value::Int(4))
            .with("delivery", Value::Real(0.5))
            .with("colour", Value::Cat("red".into()))
    }

    #[test]
    fn matching_bid_is_valid() {
        assert!(domain().validate_bid(&full_bid()).is_empty());
    }

    #[test]
    fn missing_issue_reported() {
        let mut bid = full_bid();
        bid.values.remove("delivery");
        assert_eq!(domain().validate_bid(&bid), vec![Violation::MissingIssue("delivery".into())]);
    }

    #[test]
    fn out_of_range_reported() {
        let mut bid = full_bid();
        bid.set("price", Value::Int(11));
        assert_eq!(
            domain().validate_bid(&bid),
            vec![Violation::OutOfRange { issue: "price".into(), value: Value::Int(11) }]
        );
    }

    #[test]
    fn extra_issue_and_wrong_type_reported() {
        let bid = full_bid().with("bonus", Value::Int(1)).with("colour", Value::Int(0));
        let v = domain().validate_bid(&bid);
        assert_eq!(v.len(), 2);
        assert!(v.contains(&Violation::ExtraIssue("bonus".into())));
    }

    #[test]
    fn invalid_domains_rejected() {
        assert!(NegotiationDomain::new(vec![]).is_err());
        assert!(NegotiationDomain::new(vec![Issue::integer("a", 3, 3)]).is_err());
        assert!(NegotiationDomain::new(vec![Issue::integer("a", 0, 1), Issue::integer("a", 0, 2)]).is_err());
        assert!(NegotiationDomain::new(vec![Issue::categorical("c", ["x", "x"])]).is_err());
        assert!(NegotiationDomain::new(vec![Issue::categorical("c", Vec::<String>::new())]).is_err());
    }

    #[test]
    fn random_bids_are_valid() {
        let d = domain();
        let mut rng = seeded(1);
        for _ in 0..200 {
            assert!(d.validate_bid(&d.random_bid(&mut rng)).is_empty());
        }
    }

    #[test]
    fn vector_round_trip_clamps() {
        let d = domain();
        let bid = d.from_vector(&[12.7, -3.0, 0.6]);
        assert_eq!(bid.get("price"), Some(&Value::Int(10)));
        assert_eq!(bid.get("delivery"), Some(&Value::Real(0.0)));
        assert_eq!(bid.get("colour"), Some(&Value::Cat("green".into())));
        assert_eq!(d.to_vector(&bid).unwrap(), vec![10.0, 0.0, 1.0]);
    }

    #[test]
    fn bid_serializes_as_map() {
        let json = serde_json::to_string(&full_bid()).unwrap();
        assert_eq!(json, r#"{"colour":"red","delivery":0.5,"price":4}"#);
        let back: Bid = serde_json::from_str(&json).unwrap();
        assert_eq!(back, full_bid());
    }
}
