//! Experiment driver: domain generation, seeded tournaments with swapped
//! profiles, per-session and aggregate reporting, and the kernel benchmark.

mod generator;
mod kernel_bench;
mod report;
mod runner;

pub use generator::generate_anac_domain;
pub use kernel_bench::{kernel_benchmark, load_series, synthetic_concession_series, BenchmarkTable, OfferSeries};
pub use report::{mean_std, read_rows, read_summary, AgentSummary, SessionRow, TournamentReport, TournamentSummary};
pub use runner::{run_session_row, run_tournament, TournamentConfig};
