use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gp::{repeat_last_distance, walk_forward_distance, KernelChoice, KernelFamily};
use crate::rng::child_rng;

/// Offers of one negotiation in order, each as issue coordinates.
pub type OfferSeries = Vec<Vec<f64>>;

/// Concession-like offer streams: every issue moves monotonically from a
/// start to an end value along a random power curve, with small noise.
pub fn synthetic_concession_series(count: usize, length: usize, dims: usize, seed: u64) -> Vec<OfferSeries> {
    (0..count)
        .map(|k| {
            let mut rng = child_rng(seed, k as u64);
            let curves: Vec<(f64, f64, f64)> = (0..dims)
                .map(|_| {
                    let (start, end) = (rng.random_range(6.0..10.0), rng.random_range(0.0..4.0));
                    let (start, end) = if rng.random::<bool>() { (start, end) } else { (end, start) };
                    (start, end, rng.random_range(0.5..2.5))
                })
                .collect();
            (0..length)
                .map(|t| {
                    let s = t as f64 / (length.max(2) - 1) as f64;
                    curves
                        .iter()
                        .map(|(a, b, shape)| {
                            let noise: f64 = rng.sample(StandardNormal);
                            a + (b - a) * s.powf(*shape) + 0.02 * noise
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SeriesFile {
    Many(Vec<OfferSeries>),
    One(OfferSeries),
}

/// Read a JSON file holding one series (`[[x, y], ...]`) or a list of them.
pub fn load_series(path: impl AsRef<Path>) -> Result<Vec<OfferSeries>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let parsed: SeriesFile = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: not an offer series file: {e}", path.as_ref().display())))?;
    Ok(match parsed {
        SeriesFile::Many(v) => v,
        SeriesFile::One(s) => vec![s],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    /// Mean walk-forward distance per kernel family.
    pub rows: Vec<(KernelFamily, f64)>,
    /// Same metric for predicting a repeat of the last offer.
    pub baseline: f64,
    pub series: usize,
}

impl BenchmarkTable {
    pub fn distance(&self, family: KernelFamily) -> Option<f64> {
        self.rows.iter().find(|(f, _)| *f == family).map(|(_, d)| *d)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<22} {:>14}", "Kernel", "Mean distance");
        for (family, d) in &self.rows {
            let _ = writeln!(out, "{:<22} {:>14.4}", family.label(), d);
        }
        let _ = write!(out, "{:<22} {:>14.4}", "Repeat last offer", self.baseline);
        out
    }
}

/// Mean walk-forward distance of each family across `series`, next to the
/// repeat-last baseline. Every series needs at least 3 offers.
pub fn kernel_benchmark(series: &[OfferSeries], families: &[KernelFamily]) -> Result<BenchmarkTable> {
    if series.is_empty() {
        return Err(Error::InsufficientData("kernel benchmark needs at least one series".into()));
    }
    let mean = |xs: Vec<f64>| xs.iter().sum::<f64>() / xs.len() as f64;
    let baseline = mean(series.iter().map(|s| repeat_last_distance(s)).collect::<Result<_>>()?);
    let rows = families
        .iter()
        .map(|f| {
            let d: Vec<f64> = series
                .par_iter()
                .map(|s| walk_forward_distance(s, &KernelChoice::Fitted(*f)))
                .collect::<Result<_>>()?;
            Ok((*f, mean(d)))
        })
        .collect::<Result<_>>()?;
    Ok(BenchmarkTable { rows, baseline, series: series.len() })
}
