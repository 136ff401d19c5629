//! Command-line harness: run experiments from a TOML config, evaluate the
//! closed-form envelopes, verify the geometric and scheduling invariants at
//! the configured scale, and merge finished reports into comparison tables.
//!
//! Exit codes: 0 success, 1 validation failure, 2 runtime error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use adhoc_capacity::analysis;
use adhoc_capacity::deployment::max_injection_rate;
use adhoc_capacity::phy::LinkModel;
use adhoc_capacity::scheduling::{self, Policy};
use adhoc_capacity::sim::{
    fit_scaling_slope, run_experiment, write_csv, ExperimentConfig, SimReport,
    REPORT_SCHEMA_VERSION,
};

mod verify;

#[derive(Parser)]
#[command(name = "adhoc-capacity", version, about = "Ad hoc network capacity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write report, CSV, and manifest.
    Run(RunArgs),
    /// Evaluate the closed-form bounds over the configured grid.
    Analyze(AnalyzeArgs),
    /// Run the invariant suites (tessellation, routing, scheduling) at the
    /// configured scale.
    Verify(VerifyArgs),
    /// Merge finished reports into a comparison table.
    Report(ReportArgs),
}

#[derive(Args)]
struct Overrides {
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread count (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated node counts replacing the configured grid.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    /// Scheduling policy: pi1 or pi2.
    #[arg(long)]
    policy: Option<String>,
    /// Path loss exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Link model: threshold:<beta>, continuous:<kappa>, or fixed:<p>.
    #[arg(long)]
    link_model: Option<String>,
    /// End-to-end loss target.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct ReportArgs {
    /// Finished SimReport JSON files.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn validation<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Validation(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn run() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(e @ CliError::Validation(_)) => {
            eprintln!("{e}");
            1
        }
        Err(e @ CliError::Runtime(_)) => {
            eprintln!("{e}");
            2
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => verify::cmd_verify(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn load_config(path: &Path, ov: &Overrides) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: ExperimentConfig = toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if let Some(seed) = ov.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = &ov.n_grid {
        cfg.n_grid = grid.clone();
    }
    if let Some(policy) = &ov.policy {
        cfg.policy = match policy.as_str() {
            "pi1" => Policy::Pi1,
            "pi2" => Policy::Pi2,
            other => return Err(CliError::Validation(format!("unknown policy {other:?}"))),
        };
    }
    if let Some(alpha) = ov.alpha {
        cfg.alpha = alpha;
    }
    if let Some(spec) = &ov.link_model {
        cfg.link_model = parse_link_model(spec)?;
    }
    if let Some(eps) = ov.epsilon {
        cfg.epsilon = eps;
    }
    cfg.validate().map_err(validation)?;
    if let Some(jobs) = ov.jobs {
        if jobs > 0 {
            rayon_pool(jobs)?;
        }
    }
    Ok(cfg)
}

fn rayon_pool(jobs: usize) -> CliResult<()> {
    adhoc_capacity::sim::install_thread_limit(jobs).map_err(runtime)
}

fn parse_link_model(spec: &str) -> CliResult<LinkModel> {
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Validation(format!("link model {spec:?}: expected kind:value")))?;
    let v: f64 = value
        .parse()
        .map_err(|e| CliError::Validation(format!("link model {spec:?}: {e}")))?;
    let lm = match kind {
        "threshold" => LinkModel::threshold(v),
        "continuous" => LinkModel::continuous(v),
        "fixed" => LinkModel::fixed(v),
        other => {
            return Err(CliError::Validation(format!(
                "unknown link model kind {other:?}"
            )))
        }
    };
    lm.validate().map_err(validation)?;
    Ok(lm)
}

pub(crate) fn config_hash(cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let mut h = Sha256::new();
    h.update(json.as_bytes());
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Manifest {
    config_hash: String,
    seed: u64,
    report_schema_version: u32,
    tool_version: String,
    files: Vec<String>,
}

fn cmd_run(args: RunArgs) -> CliResult<()> {
    let cfg = load_config(&args.config, &args.overrides)?;
    std::fs::create_dir_all(&args.out).map_err(runtime)?;
    let report = run_experiment(&cfg).map_err(runtime)?;

    let json_path = args.out.join("report.json");
    let csv_path = args.out.join("results.csv");
    let manifest_path = args.out.join("manifest.json");

    let json = serde_json::to_string_pretty(&report).map_err(runtime)?;
    std::fs::write(&json_path, json).map_err(runtime)?;
    let mut csv = Vec::new();
    write_csv(&report, &mut csv).map_err(runtime)?;
    std::fs::write(&csv_path, csv).map_err(runtime)?;

    let manifest = Manifest {
        config_hash: config_hash(&cfg),
        seed: cfg.seed,
        report_schema_version: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        files: vec!["report.json".into(), "results.csv".into()],
    };
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).map_err(runtime)?,
    )
    .map_err(runtime)?;

    if let Some(fit) = &report.slope {
        println!(
            "slope {:.4} +/- {:.4} over {} grid points",
            fit.slope, fit.stderr, fit.points
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult<()> {
    let cfg = load_config(&args.config, &args.overrides)?;
    std::fs::create_dir_all(&args.out).map_err(runtime)?;
    let path = args.out.join("analysis.csv");
    let mut rows = String::new();
    rows.push_str(
        "n,alpha,epsilon,rho_n,lambda_cap,exclusion_radius,exclusion_radius_classic,v_n,k_n,\
beta_n,per_link_loss_budget,throughput_lower_pi2\n",
    );
    for &n in &cfg.n_grid {
        let nf = n as f64;
        let rho = cfg.rho_convention.rho(nf);
        let lambda = max_injection_rate(nf).map_err(runtime)?;
        let r = scheduling::exclusion_radius_for_rho(rho, nf, cfg.alpha).map_err(runtime)?;
        let r_classic = scheduling::exclusion_radius(nf, cfg.alpha).map_err(runtime)?;
        let v = scheduling::max_degree_bound(nf, cfg.alpha).map_err(runtime)?;
        let beta_n = cfg
            .beta_n_override
            .unwrap_or_else(|| scheduling::required_sinr(nf));
        let budget = analysis::per_link_loss_budget(cfg.epsilon, nf, rho);
        let lower =
            analysis::throughput_lower_pi2(nf, cfg.alpha, cfg.epsilon, 1.0, cfg.c5)
                .map_err(runtime)?;
        rows.push_str(&format!(
            "{n},{},{},{rho},{lambda},{r},{r_classic},{v},{},{beta_n},{budget},{lower}\n",
            cfg.alpha,
            cfg.epsilon,
            v + 1.0,
        ));
    }
    std::fs::write(&path, rows).map_err(runtime)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_report(path: &Path) -> CliResult<SimReport> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let report: SimReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "{}: schema version {} (tool expects {})",
            path.display(),
            report.schema_version,
            REPORT_SCHEMA_VERSION
        )));
    }
    Ok(report)
}

fn cmd_report(args: ReportArgs) -> CliResult<()> {
    let reports: Vec<(PathBuf, SimReport)> = args
        .reports
        .iter()
        .map(|p| load_report(p).map(|r| (p.clone(), r)))
        .collect::<CliResult<_>>()?;

    let alphas: std::collections::BTreeSet<String> = reports
        .iter()
        .map(|(_, r)| format!("{}", r.config.alpha))
        .collect();
    if alphas.len() > 1 {
        eprintln!(
            "warning: mixing reports with different alpha ({})",
            alphas.into_iter().collect::<Vec<_>>().join(", ")
        );
    }

    // Per-report mean goodput by n.
    let mut tables = Vec::new();
    for (path, r) in &reports {
        let mut by_n: std::collections::BTreeMap<u64, (f64, u32)> = Default::default();
        for rec in &r.records {
            if rec.error.is_none() && rec.goodput.is_finite() {
                let e = by_n.entry(rec.n).or_insert((0.0, 0));
                e.0 += rec.goodput;
                e.1 += 1;
            }
        }
        let slope = fit_scaling_slope(r).ok();
        tables.push((path, r, by_n, slope));
    }

    let mut out = String::new();
    let two_same_grid = tables.len() == 2 && tables[0].2.keys().eq(tables[1].2.keys());
    if two_same_grid {
        out.push_str("n,goodput_a,goodput_b,ratio_b_over_a,alpha_a,alpha_b,hash_a,hash_b\n");
        let (pa, ra, ta, _) = &tables[0];
        let (pb, rb, tb, _) = &tables[1];
        eprintln!("a = {}, b = {}", pa.display(), pb.display());
        let ha = config_hash(&ra.config);
        let hb = config_hash(&rb.config);
        for (n, (sa, ca)) in ta {
            let (sb, cb) = &tb[n];
            let ga = sa / *ca as f64;
            let gb = sb / *cb as f64;
            out.push_str(&format!(
                "{n},{ga},{gb},{},{},{},{},{}\n",
                gb / ga,
                ra.config.alpha,
                rb.config.alpha,
                &ha[..12],
                &hb[..12]
            ));
        }
    } else {
        out.push_str("report,n,goodput,slope,alpha,policy,config_hash\n");
        for (path, r, by_n, slope) in &tables {
            let h = config_hash(&r.config);
            let s = slope.map(|f| f.slope.to_string()).unwrap_or_default();
            for (n, (sum, c)) in by_n {
                out.push_str(&format!(
                    "{},{n},{},{s},{},{:?},{}\n",
                    path.display(),
                    sum / *c as f64,
                    r.config.alpha,
                    r.config.policy,
                    &h[..12]
                ));
            }
        }
    }
    match &args.out {
        Some(p) => std::fs::write(p, out).map_err(runtime)?,
        None => print!("{out}"),
    }
    Ok(())
}
