//! JSON file holding a negotiation domain and its utility profiles.
//!
//! See `docs/domain-format.md` for the schema.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::domain::{Issue, NegotiationDomain};
use super::utility::UtilityFunction;
use super::valuation::Valuation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub weights: BTreeMap<String, f64>,
    pub valuations: BTreeMap<String, Valuation>,
    #[serde(default)]
    pub reject_utility: f64,
    #[serde(default)]
    pub no_agreement_utility: f64,
}

impl ProfileSpec {
    pub fn from_utility(u: &UtilityFunction) -> Self {
        Self {
            weights: u.issues().iter().cloned().zip(u.weights().iter().copied()).collect(),
            valuations: u.issues().iter().cloned().zip(u.valuations().iter().cloned()).collect(),
            reject_utility: u.reject_utility,
            no_agreement_utility: u.no_agreement_utility,
        }
    }

    pub fn build(&self, domain: &NegotiationDomain) -> Result<UtilityFunction> {
        let mut u = UtilityFunction::from_maps(domain, &self.weights, &self.valuations)?;
        u.reject_utility = self.reject_utility;
        u.no_agreement_utility = self.no_agreement_utility;
        Ok(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub issues: Vec<Issue>,
    pub profiles: Vec<ProfileSpec>,
}

/// A parsed and validated domain file.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub domain: NegotiationDomain,
    pub profiles: Vec<UtilityFunction>,
}

impl Scenario {
    pub fn new(domain: NegotiationDomain, profiles: Vec<UtilityFunction>) -> Self {
        Self { domain, profiles }
    }

    pub fn from_file_data(file: &DomainFile) -> Result<Self> {
        let domain = NegotiationDomain::new(file.issues.clone())?;
        let profiles = file.profiles.iter().map(|p| p.build(&domain)).collect::<Result<Vec<_>>>()?;
        Ok(Self { domain, profiles })
    }

    pub fn to_file_data(&self) -> DomainFile {
        DomainFile {
            issues: self.domain.issues().to_vec(),
            profiles: self.profiles.iter().map(ProfileSpec::from_utility).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file_data(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file_data())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// The two profiles a bilateral session needs.
    pub fn pair(&self) -> Result<[&UtilityFunction; 2]> {
        match self.profiles.as_slice() {
            [a, b, ..] => Ok([a, b]),
            _ => Err(Error::InvalidProfile(format!(
                "a bilateral session needs two profiles, found {}",
                self.profiles.len()
            ))),
        }
    }
}
