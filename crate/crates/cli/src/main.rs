use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mocana_core::agents::{AgentSpec, MocanaConfig};
use mocana_core::gp::KernelFamily;
use mocana_core::mcts::{MctsConfig, Pruning};
use mocana_core::negotiation::{run_session, Message, OutcomeKind, Scenario, SessionConfig};
use mocana_core::opponent::{StrategyModelConfig, UtilityModelConfig};
use mocana_core::tournament::{
    generate_anac_domain, kernel_benchmark, load_series, run_tournament, synthetic_concession_series, TournamentConfig,
};

#[derive(Parser)]
#[command(name = "mocana", version, about = "Bilateral negotiation sessions, tournaments and kernel benchmarks")]
struct Cli {
    /// Directory for output files written by default.
    #[arg(long, global = true, env = "MOCANA_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tournament and write per-session CSV and JSON summary.
    Run(RunArgs),
    /// Run one negotiation and print its transcript.
    Session(SessionArgs),
    /// Generate a random integer domain with two nonlinear profiles.
    GenDomain(GenDomainArgs),
    /// Compare GP kernels by walk-forward prediction error.
    KernelBench(KernelBenchArgs),
}

#[derive(Args, Clone)]
struct DomainArgs {
    /// Domain file (JSON); a domain is generated when absent.
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Issues of the generated domain.
    #[arg(long, default_value_t = 10)]
    issues: usize,
    #[arg(long, default_value_t = 0)]
    value_lo: i64,
    #[arg(long, default_value_t = 10)]
    value_hi: i64,
    /// Seed of the generated domain.
    #[arg(long, default_value_t = 0)]
    domain_seed: u64,
}

impl DomainArgs {
    fn scenario(&self) -> Result<Scenario> {
        match &self.domain {
            Some(path) => Scenario::load(path).with_context(|| format!("loading domain {}", path.display())),
            None => Ok(generate_anac_domain(self.issues, self.value_lo, self.value_hi, self.domain_seed)?),
        }
    }
}

#[derive(Args, Clone)]
struct AgentArgs {
    /// mocana, random-walker, scripted:<file> or conceder:<rate>.
    #[arg(long, default_value = "mocana")]
    agent1: String,
    #[arg(long, default_value = "random-walker")]
    agent2: String,

    /// Progressive-widening exponent.
    #[arg(long, default_value_t = 0.489)]
    alpha: f64,
    /// Exploration constant.
    #[arg(long, default_value_t = 1.0)]
    exploration: f64,
    /// Simulations per decision.
    #[arg(long, default_value_t = 500)]
    budget: usize,
    /// Rollout depth cap in plies.
    #[arg(long, default_value_t = 40)]
    max_depth: usize,
    /// Maximum candidate bids at the root.
    #[arg(long, default_value_t = 200)]
    root_cap: usize,
    /// none, fixed:<threshold> or variable.
    #[arg(long, default_value = "none")]
    pruning: String,
    /// Threads per search; 1 is reproducible.
    #[arg(long, default_value_t = 1)]
    search_workers: usize,
    /// Uniform draws per own-bid expansion.
    #[arg(long, default_value_t = 100)]
    expansion_retries: usize,
    /// Skip expansions instead of repairing bids after the retries fail.
    #[arg(long)]
    no_repair: bool,
    /// Opponent-profile hypotheses.
    #[arg(long, default_value_t = 128)]
    hypotheses: usize,
    #[arg(long, default_value_t = 0.002)]
    concession_rate: f64,
    #[arg(long, default_value_t = 0.25)]
    likelihood_sigma: f64,
    /// Kernel of the opponent strategy model: rbf, rq, matern or expsine.
    #[arg(long, default_value = "rq")]
    kernel: String,
}

impl AgentArgs {
    fn mocana(&self) -> Result<MocanaConfig> {
        let mcts = MctsConfig {
            alpha: self.alpha,
            c: self.exploration,
            simulation_budget: self.budget,
            max_rollout_depth: self.max_depth,
            root_candidate_cap: self.root_cap,
            pruning: self.pruning.parse::<Pruning>()?,
            workers: self.search_workers,
            expansion_retries: self.expansion_retries,
            repair_on_exhaustion: !self.no_repair,
        };
        mcts.validate()?;
        Ok(MocanaConfig {
            mcts,
            utility_model: UtilityModelConfig {
                hypotheses: self.hypotheses,
                concession_rate: self.concession_rate,
                likelihood_sigma: self.likelihood_sigma,
            },
            strategy_model: StrategyModelConfig { family: self.kernel.parse::<KernelFamily>()?, ..Default::default() },
        })
    }

    fn specs(&self) -> Result<[AgentSpec; 2]> {
        let m = self.mocana()?;
        Ok([AgentSpec::parse(&self.agent1, m)?, AgentSpec::parse(&self.agent2, m)?])
    }
}

#[derive(Args, Clone)]
struct BoundArgs {
    /// Maximum number of messages per session.
    #[arg(long, default_value_t = 200)]
    round_bound: usize,
    /// Wall-clock bound per session in seconds.
    #[arg(long)]
    time_bound_secs: Option<f64>,
    /// Utility each agent gets without agreement.
    #[arg(long, default_value_t = 0.0)]
    reservation: f64,
}

impl BoundArgs {
    fn config(&self) -> Result<SessionConfig> {
        let mut c = SessionConfig::with_round_bound(self.round_bound);
        if let Some(t) = self.time_bound_secs {
            if !(t > 0.0) || !t.is_finite() {
                bail!("time bound must be a positive number of seconds");
            }
            c.time_bound = Some(Duration::from_secs_f64(t));
        }
        c.reservation_utility = [self.reservation; 2];
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    agents: AgentArgs,
    #[command(flatten)]
    bounds: BoundArgs,
    /// Sessions per profile assignment (total is twice this).
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    /// Master seed; session seeds derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sessions run in parallel.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Per-session CSV (default: <out-dir>/sessions.csv).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON summary (default: <out-dir>/summary.json).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SessionArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    agents: AgentArgs,
    #[command(flatten)]
    bounds: BoundArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Give agent 1 the second profile.
    #[arg(long)]
    swap: bool,
}

#[derive(Args)]
struct GenDomainArgs {
    #[arg(long, default_value_t = 10)]
    issues: usize,
    #[arg(long, default_value_t = 0)]
    value_lo: i64,
    #[arg(long, default_value_t = 10)]
    value_hi: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; `-` prints to stdout (default: <out-dir>/domain.json).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KernelBenchArgs {
    /// JSON offer-series files; synthetic series are used when none is given.
    #[arg(long = "series")]
    series: Vec<PathBuf>,
    #[arg(long, default_value_t = 50)]
    synthetic: usize,
    #[arg(long, default_value_t = 15)]
    length: usize,
    #[arg(long, default_value_t = 3)]
    dims: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated kernel families.
    #[arg(long, value_delimiter = ',', default_value = "rbf,rq,matern,expsine")]
    families: Vec<String>,
}

fn prepare_out(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(())
}

fn run(out_dir: &Path, args: RunArgs) -> Result<()> {
    let config = TournamentConfig {
        scenario: args.domain.scenario()?,
        agents: args.agents.specs()?,
        repetitions: args.repetitions,
        session: args.bounds.config()?,
        seed: args.seed,
        workers: args.workers,
    };
    let report = run_tournament(&config)?;
    let csv = args.csv.unwrap_or_else(|| out_dir.join("sessions.csv"));
    let json = args.json.unwrap_or_else(|| out_dir.join("summary.json"));
    prepare_out(&csv)?;
    prepare_out(&json)?;
    report.emit(&csv, &json).with_context(|| format!("writing {} and {}", csv.display(), json.display()))?;
    println!("{}", report.summary.table());
    println!("sessions: {}\nsummary: {}", csv.display(), json.display());
    Ok(())
}

fn session(args: SessionArgs) -> Result<()> {
    let scenario = args.domain.scenario()?;
    let [a, b] = scenario.pair()?;
    let ufuns = if args.swap { [b, a] } else { [a, b] };
    let [s1, s2] = args.agents.specs()?;
    let (mut agent1, mut agent2) = (s1.build()?, s2.build()?);
    let config = args.bounds.config()?;
    let outcome = run_session(agent1.as_mut(), agent2.as_mut(), &scenario.domain, ufuns, &config, args.seed)?;
    for (k, m) in outcome.history.messages().iter().enumerate() {
        let who = if k % 2 == 0 { s1.to_string() } else { s2.to_string() };
        match m {
            Message::Propose(bid) => println!(
                "{k:>4} {who}: propose {bid}  (u1 {:.4}, u2 {:.4})",
                ufuns[0].utility(bid)?,
                ufuns[1].utility(bid)?
            ),
            other => println!("{k:>4} {who}: {other}"),
        }
    }
    let detail = match &outcome.result {
        OutcomeKind::Agreement { bid } => format!("agreement on {bid}"),
        OutcomeKind::Reject { by } => format!("rejected by {by}"),
        OutcomeKind::BoundReached => "bound reached".to_string(),
        OutcomeKind::ProtocolViolation { offender, reason } => format!("protocol violation by {offender}: {reason}"),
    };
    println!(
        "outcome: {detail}\nmessages: {}\nutilities: {:.6} {:.6}",
        outcome.rounds_used, outcome.utilities[0], outcome.utilities[1]
    );
    Ok(())
}

fn gen_domain(out_dir: &Path, args: GenDomainArgs) -> Result<()> {
    let scenario = generate_anac_domain(args.issues, args.value_lo, args.value_hi, args.seed)?;
    let text = scenario.to_json()?;
    match args.output {
        Some(p) if p.as_os_str() == "-" => println!("{text}"),
        other => {
            let path = other.unwrap_or_else(|| out_dir.join("domain.json"));
            prepare_out(&path)?;
            fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn kernel_bench(args: KernelBenchArgs) -> Result<()> {
    let families = args.families.iter().map(|f| f.parse::<KernelFamily>()).collect::<mocana_core::Result<Vec<_>>>()?;
    let series = if args.series.is_empty() {
        synthetic_concession_series(args.synthetic, args.length, args.dims, args.seed)
    } else {
        let mut all = Vec::new();
        for p in &args.series {
            all.extend(load_series(p)?);
        }
        all
    };
    let table = kernel_benchmark(&series, &families)?;
    println!("{}\n({} series)", table.table(), table.series);
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(a) => run(&cli.out_dir, a),
        Command::Session(a) => session(a),
        Command::GenDomain(a) => gen_domain(&cli.out_dir, a),
        Command::KernelBench(a) => kernel_bench(a),
    }
}
