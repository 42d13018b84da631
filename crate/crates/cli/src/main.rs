use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rpm_core::csvio::{format_vector, parse_matrix, parse_vector};
use rpm_core::heatmap::render_heatmap;
use rpm_core::lemmas::{run_lemma_suite, LemmaCheck, LemmaSuiteConfig};
use rpm_core::lp::{write_lp_dump, SolveOptions};
use rpm_core::measurements::{CorruptionModel, CorruptionSpec, SensingMatrix, Signal};
use rpm_core::rpm::{build_formulation, solve_rpm, Formulation, LambdaMode, RpmConfig, DEFAULT_SUCCESS_TOL};
use rpm_core::sweep::{parse_sweep_config, run_sweep, summary_csv_string, SweepGrid};
use rpm_core::trial::{run_trial, trial_csv_string, AnchorMode, TrialConfig};
use rpm_core::Error;

#[derive(Parser)]
#[command(name = "rpm", version, about = "Robust PhaseMax solver and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance given as headerless CSV files.
    Solve(SolveArgs),
    /// Run one seeded recovery trial and print its CSV row.
    Simulate(SimulateArgs),
    /// Run a grid of trials; writes per-trial and per-cell CSVs.
    Sweep(SweepArgs),
    /// Run the Monte Carlo lemma checks.
    VerifyLemmas(LemmaArgs),
    /// Render a success-rate heatmap from a sweep summary CSV.
    Heatmap(HeatmapArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// m×n sensing matrix, one row per line.
    #[arg(long)]
    matrix: PathBuf,
    /// Magnitudes b (length m).
    #[arg(long)]
    b: PathBuf,
    /// Anchor φ (length n).
    #[arg(long)]
    phi: PathBuf,
    /// Penalty λ; implies --lambda-mode explicit unless a mode is given.
    #[arg(long)]
    lambda: Option<f64>,
    /// explicit | auto7 | auto-scaled:M | multiplier:K
    #[arg(long)]
    lambda_mode: Option<LambdaMode>,
    /// nonneg-slack | l1-split | plain
    #[arg(long, default_value = "nonneg-slack")]
    formulation: Formulation,
    /// Write x̂ here instead of stdout.
    #[arg(long)]
    out_x: Option<PathBuf>,
    /// Write ê here.
    #[arg(long)]
    out_e: Option<PathBuf>,
    /// Write the assembled LP in text form.
    #[arg(long)]
    lp_dump: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnchorKind {
    Oracle,
    Spectral,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 400)]
    m: usize,
    /// Corrupted fraction δ.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// shrink | inflate | mixed | worst
    #[arg(long, default_value = "shrink")]
    model: CorruptionModel,
    #[arg(long, default_value_t = 1.0)]
    magnitude_scale: f64,
    #[arg(long, value_enum, default_value = "oracle")]
    anchor: AnchorKind,
    /// Relative error of the oracle anchor.
    #[arg(long, default_value_t = 0.3)]
    anchor_err: f64,
    /// Truncation factor of the spectral anchor.
    #[arg(long, default_value_t = 3.0)]
    truncation: f64,
    /// λ = κ·norm_estimate(b)/m. Ignored when --lambda-mode is given.
    #[arg(long, default_value_t = 7.0)]
    kappa: f64,
    #[arg(long)]
    lambda_mode: Option<LambdaMode>,
    /// Used with --lambda-mode explicit.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value = "nonneg-slack")]
    formulation: Formulation,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SUCCESS_TOL)]
    success_tol: f64,
    /// Fill the runtime_ms column.
    #[arg(long)]
    timings: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// key = value grid file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated m/n ratios.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    anchor_errs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    kappas: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    model: Option<CorruptionModel>,
    #[arg(long)]
    formulation: Option<Formulation>,
    /// Use the spectral anchor with this truncation factor.
    #[arg(long)]
    spectral: Option<f64>,
    #[arg(long)]
    magnitude_scale: Option<f64>,
    #[arg(long)]
    success_tol: Option<f64>,
    /// Per-trial data CSV.
    #[arg(long)]
    out: PathBuf,
    /// Per-cell summary CSV [default: <out stem>_summary.csv].
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Also write an SVG heatmap of the summary.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, default_value = "ratio")]
    x_axis: String,
    #[arg(long, default_value = "delta")]
    y_axis: String,
    /// Fill the runtime_ms column (breaks byte-identical reruns).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Csv,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, value_enum, default_value = "table")]
    report: ReportFormat,
    #[arg(long, default_value_t = LemmaSuiteConfig::default().seed)]
    seed: u64,
    /// Rows m for the operator-norm and lower-bound checks.
    #[arg(long, default_value_t = LemmaSuiteConfig::default().m_large)]
    m: usize,
    /// Samples per θ for the expectation checks.
    #[arg(long, default_value_t = LemmaSuiteConfig::default().theta_samples)]
    samples: usize,
}

#[derive(Args)]
struct HeatmapArgs {
    #[arg(long)]
    summary: PathBuf,
    #[arg(long, default_value = "ratio")]
    x_axis: String,
    #[arg(long, default_value = "delta")]
    y_axis: String,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    /// Bad flags, files or values: exit 2.
    Config(String),
    /// The run completed but reported failure: exit 1.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn with_context(path: &Path, e: Error) -> Failure {
    Failure::Config(format!("{}: {e}", path.display()))
}

fn solve(args: SolveArgs) -> CliResult {
    let a = parse_matrix(&read(&args.matrix)?).map_err(|e| with_context(&args.matrix, e))?;
    let b = parse_vector(&read(&args.b)?).map_err(|e| with_context(&args.b, e))?;
    let phi = parse_vector(&read(&args.phi)?).map_err(|e| with_context(&args.phi, e))?;
    let a = SensingMatrix::new(a)?;
    let phi = Signal::new(phi)?;
    let lambda_mode = match (args.lambda_mode, args.lambda) {
        (Some(mode), _) => mode,
        (None, Some(_)) => LambdaMode::Explicit,
        (None, None) => LambdaMode::AutoSeven,
    };
    if lambda_mode == LambdaMode::Explicit && args.lambda.is_none() {
        return Err(Failure::Config("--lambda-mode explicit needs --lambda".into()));
    }
    let config = RpmConfig {
        lambda: args.lambda.unwrap_or(0.0),
        lambda_mode,
        formulation: args.formulation,
    };
    config.validate()?;

    let report = solve_rpm(&a, &b, &phi, &config, &SolveOptions::default(), None)?;
    if let Some(path) = &args.lp_dump {
        let lp = build_formulation(&a, &b, &phi, config.formulation, report.lambda)?;
        write(path, &write_lp_dump(&lp))?;
    }
    match &args.out_x {
        Some(path) => write(path, &format_vector(&report.x_hat))?,
        None => print!("{}", format_vector(&report.x_hat)),
    }
    if let Some(path) = &args.out_e {
        write(path, &format_vector(&report.e_hat))?;
    }
    let line = format!(
        "status={} objective={:?} lambda={:?} iterations={} formulation={}",
        report.status, report.objective, report.lambda, report.iterations, config.formulation
    );
    if args.out_x.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> CliResult {
    let lambda_mode = match args.lambda_mode {
        Some(m) => m,
        None if args.lambda.is_some() => LambdaMode::Explicit,
        None => LambdaMode::from_kappa(args.kappa),
    };
    let cfg = TrialConfig {
        n: args.n,
        m: args.m,
        corruption: CorruptionSpec {
            fraction: args.delta,
            model: args.model,
            magnitude_scale: args.magnitude_scale,
        },
        anchor: match args.anchor {
            AnchorKind::Oracle => AnchorMode::Oracle(args.anchor_err),
            AnchorKind::Spectral => AnchorMode::Spectral(args.truncation),
        },
        rpm: RpmConfig {
            lambda: args.lambda.unwrap_or(0.0),
            lambda_mode,
            formulation: args.formulation,
        },
        seed: args.seed,
        success_tol: args.success_tol,
    };
    let result = run_trial(&cfg)?;
    let text = trial_csv_string(std::slice::from_ref(&result), args.timings)?;
    match &args.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sweep_grid(args: &SweepArgs) -> Result<SweepGrid, Failure> {
    let mut g = match &args.config {
        Some(path) => parse_sweep_config(&read(path)?).map_err(|e| with_context(path, e))?,
        None => SweepGrid::default(),
    };
    if let Some(v) = args.n {
        g.n = v;
    }
    if let Some(v) = &args.ratios {
        g.ratios = v.clone();
    }
    if let Some(v) = &args.deltas {
        g.deltas = v.clone();
    }
    if let Some(v) = &args.anchor_errs {
        g.anchor_errs = v.clone();
    }
    if let Some(v) = &args.kappas {
        g.kappas = v.clone();
    }
    if let Some(v) = args.trials {
        g.trials = v;
    }
    if let Some(v) = args.seed {
        g.base_seed = v;
    }
    if let Some(v) = args.model {
        g.model = v;
    }
    if let Some(v) = args.formulation {
        g.formulation = v;
    }
    if args.spectral.is_some() {
        g.spectral = args.spectral;
    }
    if let Some(v) = args.magnitude_scale {
        g.magnitude_scale = v;
    }
    if let Some(v) = args.success_tol {
        g.success_tol = v;
    }
    g.validate()?;
    Ok(g)
}

fn default_summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    out.with_file_name(format!("{stem}_summary.csv"))
}

fn sweep(args: SweepArgs) -> CliResult {
    let grid = sweep_grid(&args)?;
    let out = run_sweep(&grid)?;
    write(&args.out, &trial_csv_string(&out.results, args.timings)?)?;
    let summary_path = args.summary.clone().unwrap_or_else(|| default_summary_path(&args.out));
    let summary = summary_csv_string(&out.summary)?;
    write(&summary_path, &summary)?;
    if let Some(path) = &args.plot {
        write(path, &render_heatmap(&summary, &args.x_axis, &args.y_axis)?)?;
    }
    let successes: usize = out.summary.iter().map(|s| s.successes).sum();
    println!(
        "{} cells, {} trials, {} successes; data {}, summary {}",
        out.summary.len(),
        out.results.len(),
        successes,
        args.out.display(),
        summary_path.display()
    );
    Ok(())
}

fn lemma_table(checks: &[LemmaCheck]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<width$}  {:>12}  {:<2}  {:>10}  {:>8}  result\n", "check", "observed", "", "target", "tol");
    for c in checks {
        s += &format!(
            "{:<width$}  {:>12.6}  {:<2}  {:>10.6}  {:>8.1e}  {}\n",
            c.name,
            c.observed,
            c.relation.symbol(),
            c.target,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    s
}

fn lemma_csv(checks: &[LemmaCheck]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "observed", "relation", "target", "tolerance", "passed"])
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    for c in checks {
        w.write_record([
            c.name.clone(),
            format!("{:?}", c.observed),
            c.relation.symbol().to_string(),
            format!("{:?}", c.target),
            format!("{:?}", c.tolerance),
            c.passed.to_string(),
        ])
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Runtime(e.to_string()))
}

fn verify_lemmas(args: LemmaArgs) -> CliResult {
    let cfg = LemmaSuiteConfig {
        seed: args.seed,
        m_large: args.m,
        theta_samples: args.samples,
        ..LemmaSuiteConfig::default()
    };
    let checks = run_lemma_suite(&cfg)?;
    let text = match args.report {
        ReportFormat::Table => lemma_table(&checks),
        ReportFormat::Csv => lemma_csv(&checks)?,
    };
    print!("{text}");
    let _ = std::io::stdout().flush();
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} of {} lemma checks failed", checks.len())));
    }
    Ok(())
}

fn heatmap(args: HeatmapArgs) -> CliResult {
    let text = read(&args.summary)?;
    let svg = render_heatmap(&text, &args.x_axis, &args.y_axis).map_err(|e| with_context(&args.summary, e))?;
    write(&args.out, &svg)
}

fn configure_threads() -> CliResult {
    let Ok(raw) = std::env::var("RPM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Config(format!("RPM_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Solve(a) => solve(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::VerifyLemmas(a) => verify_lemmas(a),
        Command::Heatmap(a) => heatmap(a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(msg)) => {
            eprintln!("rpm: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("rpm: {msg}");
            ExitCode::from(2)
        }
    }
}
