use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use degcrit::compare::{compare_theory, SLACK};
use degcrit::config::{parse_list, ExperimentConfig, Format, Points};
use degcrit::experiment::run_experiment;
use degcrit::io;
use degcrit_core::asymptotics::{excess_distribution, twopath_constants, variant_report, Variant};
use degcrit_core::critical::critical_point;
use degcrit_core::degset::DegreeSet;
use degcrit_core::sampler::{edges_for_mu, realized_mu, trial_rng, Sampler, DEFAULT_MAX_ATTEMPTS};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "degcrit", version, about = "Critical window of random graphs with degree constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical point and constants of a degree set.
    Threshold {
        #[arg(long)]
        degrees: String,
    },
    /// Predicted excess distribution, survival and planarity.
    Predict {
        #[arg(long)]
        degrees: String,
        /// Comma-separated window parameters.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        mu: String,
        #[arg(long, default_value_t = Variant::ScaledArgument)]
        variant: Variant,
        #[arg(long, default_value_t = 20)]
        qmax: usize,
        #[arg(long, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Draw graphs and write them as JSONL.
    Sample {
        #[arg(long)]
        degrees: String,
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "mu")]
        m: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo trials over a grid, with optional comparison to theory.
    Experiment(ExperimentArgs),
    /// Invariant suite; exits with 3 when a check fails.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    degrees: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, conflicts_with = "mu")]
    m: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    qmax: Option<usize>,
    /// Print the comparison with the predictions.
    #[arg(long)]
    compare: bool,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(d) = &self.degrees {
            cfg.degrees = d.clone();
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(mu) = &self.mu {
            cfg.points = Points::Mu(parse_list("mu", mu)?);
        }
        if let Some(m) = &self.m {
            cfg.points = Points::M(parse_list("m", m)?);
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(q) = self.qmax {
            cfg.q_max = q;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn is_infeasible(e: &anyhow::Error) -> bool {
    e.chain().any(|c| matches!(c.downcast_ref::<degcrit_core::Error>(), Some(degcrit_core::Error::Infeasible(_))))
        || e.chain().any(|c| {
            matches!(
                c.downcast_ref::<degcrit::experiment::ExperimentError>(),
                Some(degcrit::experiment::ExperimentError::Core(degcrit_core::Error::Infeasible(_)))
            )
        })
}

fn threshold(degrees: &str) -> Result<u8> {
    let ds = DegreeSet::parse(degrees)?;
    let cp = critical_point(&ds)?;
    println!("degrees      {ds}");
    println!("periodicity  {}", ds.periodicity());
    println!("zhat         {:.12}", cp.zhat);
    println!("alpha        {:.12}", cp.alpha);
    println!("t3           {:.12}", cp.t3);
    println!("c2           {:.12}", cp.c2);
    println!("c3           {:.12}", cp.c3);
    println!("rho          {:.12}", cp.rho);
    Ok(0)
}

fn predict(degrees: &str, mu: &str, variant: Variant, qmax: usize, format: Format) -> Result<u8> {
    let ds = DegreeSet::parse(degrees)?;
    let cp = critical_point(&ds)?;
    let mus: Vec<f64> = parse_list("mu", mu)?;
    let mut rows = Vec::new();
    for &mu in &mus {
        let p = excess_distribution(&cp, mu, variant, qmax)?;
        let two = twopath_constants(&cp, mu, 0).ok();
        if p.truncation_warning() {
            eprintln!("warning: μ = {mu}: weight {:.2e} at q = {qmax}; raise --qmax", p.tail_weight);
        }
        rows.push((p, two));
    }
    match format {
        Format::Csv => {
            let q_cols: Vec<String> = (0..=qmax).map(|q| format!("p_excess_{q}")).collect();
            println!("mu,variant,survival,planarity,b1,b2,{}", q_cols.join(","));
            for (p, two) in &rows {
                let qs: Vec<String> = p.excess_dist.iter().map(|&x| io::format_float(x)).collect();
                let (b1, b2) = two.map_or((f64::NAN, f64::NAN), |t| (t.b1, t.b2()));
                println!(
                    "{},{},{},{},{},{},{}",
                    io::format_float(p.mu),
                    p.variant,
                    io::format_float(p.survival),
                    io::format_float(p.planarity),
                    io::format_float(b1),
                    io::format_float(b2),
                    qs.join(",")
                );
            }
        }
        Format::Json => {
            let out: Vec<serde_json::Value> = rows
                .iter()
                .map(|(p, two)| {
                    serde_json::json!({
                        "mu": p.mu,
                        "variant": p.variant.to_string(),
                        "survival": p.survival,
                        "planarity": p.planarity,
                        "excess_distribution": p.excess_dist,
                        "tail_weight": p.tail_weight,
                        "b1": two.map(|t| t.b1),
                        "b2": two.map(|t| t.b2()),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn sample(degrees: &str, n: usize, m: Option<u64>, mu: Option<f64>, seed: u64, count: u64, out: Option<PathBuf>) -> Result<u8> {
    let ds = DegreeSet::parse(degrees)?;
    let cp = critical_point(&ds)?;
    let m = match (m, mu) {
        (Some(m), _) => m,
        (None, Some(mu)) => {
            let t = edges_for_mu(&ds, &cp, n as u64, mu)?;
            if t.adjusted() {
                eprintln!("note: m moved from {} to {} for feasibility", t.raw_m, t.m);
            }
            t.m
        }
        (None, None) => anyhow::bail!("give --m or --mu"),
    };
    eprintln!("n = {n}, m = {m}, realized μ = {:.6}", realized_mu(cp.alpha, n as u64, m));
    let mut sampler = Sampler::new(&ds, n, m as usize)?;
    sampler.max_attempts = DEFAULT_MAX_ATTEMPTS;
    let mut graphs = Vec::with_capacity(count as usize);
    for t in 0..count {
        let (g, attempts) = sampler.sample(&mut trial_rng(seed, t))?;
        eprintln!("graph {t}: {attempts} attempt(s)");
        graphs.push(g);
    }
    match out {
        Some(p) => io::save_jsonl(&graphs, &p)?,
        None => io::write_jsonl(&graphs, std::io::stdout().lock())?,
    }
    Ok(0)
}

fn experiment(args: &ExperimentArgs) -> Result<u8> {
    let cfg = args.config()?;
    let table = run_experiment(&cfg)?;
    match (&cfg.out, cfg.format) {
        (Some(p), Format::Csv) => io::save_csv(&table, p)?,
        (Some(p), Format::Json) => io::save_json(&table, p)?,
        (None, Format::Csv) => io::write_csv(table.rows(), std::io::stdout().lock())?,
        (None, Format::Json) => println!("{}", serde_json::to_string_pretty(&table)?),
    }
    for p in &table.points {
        if let Some(e) = &p.error {
            eprintln!("point {:?} (m = {}): {e}", p.mu, p.m);
        }
    }
    if args.compare {
        let ds = cfg.degree_set()?;
        let cp = critical_point(&ds)?;
        for c in compare_theory(&table, &cp, cfg.variant, cfg.q_max)? {
            eprint!("{c}");
            eprintln!("  within 3σ + {SLACK}: {}", c.passes(SLACK, 1e-3));
        }
        if let Ok(v) = variant_report(&cp, 0.5, table.points.first().map_or(0.0, |p| p.realized_mu)) {
            eprintln!("{v}");
        }
    }
    Ok(if table.has_infeasible() { EXIT_INFEASIBLE } else { 0 })
}

fn verify(seed: u64) -> Result<u8> {
    let report = degcrit::verify::run(seed);
    println!("{report}");
    Ok(if report.passed() { 0 } else { EXIT_VERIFY_FAILED })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Threshold { degrees } => threshold(&degrees),
        Command::Predict { degrees, mu, variant, qmax, format } => predict(&degrees, &mu, variant, qmax, format),
        Command::Sample { degrees, n, m, mu, seed, count, out } => sample(&degrees, n, m, mu, seed, count, out),
        Command::Experiment(args) => experiment(&args).context("experiment failed"),
        Command::Verify { seed } => verify(seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_infeasible(&e) { EXIT_INFEASIBLE } else { 1 })
        }
    }
}
