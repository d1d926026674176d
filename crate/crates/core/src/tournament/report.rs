use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One negotiation of a tournament. `u1`/`u2` belong to the agents in
/// slots 1 and 2, whichever profile they held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRow {
    pub session: usize,
    pub seed: u64,
    pub agent1: String,
    pub agent2: String,
    /// Profiles were swapped for this session.
    pub swapped: bool,
    pub outcome: String,
    pub rounds: usize,
    pub u1: f64,
    pub u2: f64,
}

impl SessionRow {
    pub fn is_agreement(&self) -> bool {
        self.outcome == "agreement"
    }
}

/// `None` is written as the string `"N.A"`.
mod not_available {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub const LABEL: &str = "N.A";

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => x.serialize(s),
            None => s.serialize_str(LABEL),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(Some(x)),
            Raw::Text(t) if t == LABEL => Ok(None),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"{LABEL}\", got \"{t}\""))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSummary {
    pub slot: u8,
    pub name: String,
    /// Mean utility over agreed sessions only.
    #[serde(with = "not_available")]
    pub mean_utility: Option<f64>,
    /// Population standard deviation over agreed sessions.
    #[serde(with = "not_available")]
    pub std_utility: Option<f64>,
    pub agreement_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentSummary {
    pub sessions: usize,
    pub agreements: usize,
    pub agreement_rate: f64,
    pub agents: Vec<AgentSummary>,
}

/// Population mean and standard deviation; `None` for an empty sample.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

impl TournamentSummary {
    /// Aggregate session rows; also used to re-derive the summary from a CSV.
    pub fn from_rows(rows: &[SessionRow]) -> Self {
        let agreed: Vec<&SessionRow> = rows.iter().filter(|r| r.is_agreement()).collect();
        let rate = if rows.is_empty() { 0.0 } else { agreed.len() as f64 / rows.len() as f64 };
        let names = rows.first().map(|r| [r.agent1.clone(), r.agent2.clone()]).unwrap_or_default();
        let agents = (0..2)
            .map(|k| {
                let utilities: Vec<f64> = agreed.iter().map(|r| if k == 0 { r.u1 } else { r.u2 }).collect();
                let stats = mean_std(&utilities);
                AgentSummary {
                    slot: k as u8 + 1,
                    name: names[k].clone(),
                    mean_utility: stats.map(|s| s.0),
                    std_utility: stats.map(|s| s.1),
                    agreement_rate: rate,
                }
            })
            .collect();
        Self { sessions: rows.len(), agreements: agreed.len(), agreement_rate: rate, agents }
    }

    /// Plain-text table: `mean(±std)` per agent, `N.A` without agreements.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<6} {:<24} {:>18} {:>15}", "slot", "agent", "utility", "agreement rate");
        for a in &self.agents {
            let score = match (a.mean_utility, a.std_utility) {
                (Some(m), Some(s)) => format!("{m:.3}(±{s:.3})"),
                _ => not_available::LABEL.to_string(),
            };
            let _ = writeln!(out, "{:<6} {:<24} {:>18} {:>15.3}", a.slot, a.name, score, a.agreement_rate);
        }
        let _ = write!(out, "{} sessions, {} agreements", self.sessions, self.agreements);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TournamentReport {
    pub rows: Vec<SessionRow>,
    pub summary: TournamentSummary,
}

impl TournamentReport {
    pub fn new(rows: Vec<SessionRow>) -> Self {
        let summary = TournamentSummary::from_rows(&rows);
        Self { rows, summary }
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(["session", "seed", "agent1", "agent2", "swapped", "outcome", "rounds", "u1", "u2"])?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)?)
    }

    /// Write the per-session CSV and the JSON summary.
    pub fn emit(&self, csv_path: impl AsRef<Path>, json_path: impl AsRef<Path>) -> Result<()> {
        fs::write(csv_path, self.csv_string()?)?;
        fs::write(json_path, self.json_string()? + "\n")?;
        Ok(())
    }
}

pub fn read_rows(path: impl AsRef<Path>) -> Result<Vec<SessionRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<SessionRow>, _>>()?)
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<TournamentSummary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(session: usize, outcome: &str, u1: f64, u2: f64) -> SessionRow {
        SessionRow {
            session,
            seed: session as u64 * 31,
            agent1: "a".into(),
            agent2: "b".into(),
            swapped: false,
            outcome: outcome.into(),
            rounds: 4,
            u1,
            u2,
        }
    }

    #[test]
    fn hand_computed_mean_and_population_std() {
        let (m, s) = mean_std(&[0.5, 0.9]).unwrap();
        assert!((m - 0.7).abs() < 1e-15);
        assert!((s - 0.2).abs() < 1e-15);
        assert!(mean_std(&[]).is_none());
    }

    #[test]
    fn means_ignore_failed_sessions() {
        let rows = vec![row(0, "agreement", 0.5, 0.1), row(1, "bound", 0.0, 0.0), row(2, "agreement", 0.9, 0.3)];
        let s = TournamentSummary::from_rows(&rows);
        assert_eq!((s.sessions, s.agreements), (3, 2));
        assert!((s.agreement_rate - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.agents[0].mean_utility.unwrap() - 0.7).abs() < 1e-15);
        assert!((s.agents[1].mean_utility.unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_agreements_report_not_available() {
        let rows = vec![row(0, "bound", 0.0, 0.0), row(1, "reject", 0.0, 0.0)];
        let report = TournamentReport::new(rows);
        assert_eq!(report.summary.agreement_rate, 0.0);
        assert_eq!(report.summary.agents[0].mean_utility, None);
        let json = report.json_string().unwrap();
        assert!(json.contains("\"mean_utility\": \"N.A\""));
        let back: TournamentSummary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report.summary);
        assert!(report.summary.table().contains("N.A"));
    }

    #[test]
    fn empty_tournament_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (c, j) = (dir.path().join("s.csv"), dir.path().join("s.json"));
        let report = TournamentReport::new(Vec::new());
        report.emit(&c, &j).unwrap();
        assert!(read_rows(&c).unwrap().is_empty());
        let summary = read_summary(&j).unwrap();
        assert_eq!(summary.sessions, 0);
        assert_eq!(summary.agreement_rate, 0.0);
        assert_eq!(TournamentSummary::from_rows(&read_rows(&c).unwrap()), summary);
    }

    #[test]
    fn csv_reaggregation_is_exact() {
        let rows: Vec<SessionRow> = (0..9)
            .map(|k| {
                let u = (k as f64 * 0.1371).sin().abs() / 3.0;
                row(k, if k % 3 == 0 { "bound" } else { "agreement" }, u, 1.0 / (k as f64 + 3.0))
            })
            .collect();
        let report = TournamentReport::new(rows);
        let dir = tempfile::tempdir().unwrap();
        let (c, j) = (dir.path().join("s.csv"), dir.path().join("s.json"));
        report.emit(&c, &j).unwrap();
        assert_eq!(read_rows(&c).unwrap(), report.rows);
        assert_eq!(TournamentSummary::from_rows(&read_rows(&c).unwrap()), read_summary(&j).unwrap());
    }

    #[test]
    fn rejects_garbage_statistic() {
        let bad = r#"{"sessions":1,"agreements":0,"agreement_rate":0.0,"agents":[{"slot":1,"name":"a","mean_utility":"none","std_utility":"N.A","agreement_rate":0.0}]}"#;
        assert!(serde_json::from_str::<TournamentSummary>(bad).is_err());
    }
}
