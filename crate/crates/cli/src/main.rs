//! `geomdim`: intrinsic dimension, NID scores, feature selection and sweeps.
//!
//! Exit codes: 0 success, 1 oracle mismatch, 2 usage or input error,
//! 3 degenerate (infinite) result with the report still written.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use geomdim::approx::{
    default_support_sequence, id_auto, id_bounds, DEFAULT_EXACT_THRESHOLD, DEFAULT_SUPPORT_LENGTH,
};
use geomdim::io::{self, MatrixFormat, Report, ReportFormat};
use geomdim::ontology;
use geomdim::oracle;
use geomdim::rng::SplitMix64;
use geomdim::scores::{score_features_approx, score_features_exact, FeatureScore};
use geomdim::selection::{apply_selection, plan_selection, Policy, ShareMode};
use geomdim::sweep::{
    generate_synthetic, parse_grid, run_sweep, split_label_column, SweepConfig, DEFAULT_GRID,
};
use geomdim::{delta_exact, id_exact, nid_curve, DatasetMatrix};

#[derive(Parser)]
#[command(name = "geomdim", version, about)]
struct Cli {
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Intrinsic dimension of a data set.
    Id(IdArgs),
    /// Per-feature normalized intrinsic dimensionality and the ranked curve.
    Nid(NidArgs),
    /// Discard features by NID rank and write the reduced data set.
    Select(SelectArgs),
    /// Discard sweep over fractions, policies and seeds.
    Sweep(SweepArgs),
    /// Compare the fast kernels with brute-force enumeration.
    Oracle(OracleArgs),
    /// Reproducibility attribute schema and formal-context export.
    #[command(subcommand)]
    Ontology(OntologyCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Bin,
}

impl From<FormatArg> for MatrixFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => MatrixFormat::Csv,
            FormatArg::Bin => MatrixFormat::Binary,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Auto,
    Exact,
    Support,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Json,
    Csv,
}

impl From<ReportArg> for ReportFormat {
    fn from(r: ReportArg) -> Self {
        match r {
            ReportArg::Json => ReportFormat::Json,
            ReportArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShareArg {
    Discriminability,
    Nid,
}

#[derive(Args)]
struct InputArgs {
    /// Data matrix (CSV or GDM1 binary).
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

impl InputArgs {
    fn format(&self) -> MatrixFormat {
        self.format
            .map(Into::into)
            .unwrap_or_else(|| infer_format(&self.input))
    }

    fn load(&self) -> Result<DatasetMatrix> {
        io::read_matrix(&self.input, self.format())
            .with_context(|| format!("reading {}", self.input.display()))
    }
}

fn infer_format(path: &Path) -> MatrixFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin" | "gdm" | "gdm1") => MatrixFormat::Binary,
        _ => MatrixFormat::Csv,
    }
}

#[derive(Args)]
struct ScoringArgs {
    #[arg(long, value_enum, default_value = "auto")]
    mode: Mode,
    /// Row count at or above which `auto` uses support-sequence bounds.
    #[arg(long, default_value_t = DEFAULT_EXACT_THRESHOLD)]
    threshold: usize,
    /// Length of the geometric support sequence.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_LENGTH)]
    support_length: usize,
}

impl ScoringArgs {
    fn uses_support(&self, rows: usize) -> bool {
        match self.mode {
            Mode::Exact => false,
            Mode::Support => true,
            Mode::Auto => rows >= self.threshold,
        }
    }

    fn scores(&self, data: &DatasetMatrix) -> Result<Vec<FeatureScore>> {
        Ok(if self.uses_support(data.rows()) {
            let s = default_support_sequence(data.rows(), self.support_length)?;
            score_features_approx(data, &s)?
        } else {
            score_features_exact(data)?
        })
    }
}

#[derive(Args)]
struct IdArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scoring: ScoringArgs,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    report: ReportArg,
}

#[derive(Args)]
struct NidArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scoring: ScoringArgs,
    /// Ranked curve CSV (`rank,rel_rank,feature_index,nid,rel_nid`).
    #[arg(long)]
    curve_out: Option<PathBuf>,
    /// Per-feature scores; stdout when neither output is given.
    #[arg(long)]
    scores_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    report: ReportArg,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scoring: ScoringArgs,
    #[arg(long, default_value = "top")]
    policy: Policy,
    /// Fraction of features to discard, in [0, 1).
    #[arg(long)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reduced data set.
    #[arg(long)]
    out: PathBuf,
    /// Output format; defaults to the input format.
    #[arg(long, value_enum)]
    out_format: Option<FormatArg>,
    /// Selection plan as JSON.
    #[arg(long)]
    plan_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Data matrix; omit together with --synthetic to use generated data.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Zero-based column holding integer class labels.
    #[arg(long)]
    label_column: Option<usize>,
    /// Use the built-in labeled generator instead of --input.
    #[arg(long, conflicts_with = "input")]
    synthetic: bool,
    #[arg(long, default_value_t = 400)]
    synth_n: usize,
    #[arg(long, default_value_t = 4)]
    synth_signal: usize,
    #[arg(long, default_value_t = 16)]
    synth_noise: usize,
    #[arg(long, default_value_t = 0)]
    synth_seed: u64,
    #[command(flatten)]
    scoring: ScoringArgs,
    /// Comma separated `start:stop:step` segments or single values.
    #[arg(long, default_value = DEFAULT_GRID)]
    grid: String,
    #[arg(long, default_value = "top,reversed,random", value_delimiter = ',')]
    policies: Vec<Policy>,
    /// Number of seeds; seeds 0..N are used.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Record nearest-centroid accuracy per cell (needs labels).
    #[arg(long)]
    evaluate: bool,
    #[arg(long, value_enum, default_value = "discriminability")]
    share: ShareArg,
    /// Sweep table; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    report: ReportArg,
    /// Ranked NID curve of the swept data.
    #[arg(long)]
    curve_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Data matrix to check (at most 12 rows and 6 columns).
    #[arg(long, conflicts_with = "random_rows")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Check a random uniform [0, 1) matrix with this many rows.
    #[arg(long)]
    random_rows: Option<usize>,
    #[arg(long, default_value_t = 3)]
    random_cols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum OntologyCommand {
    /// Print every attribute as `id<TAB>category<TAB>question`.
    List,
    /// Check that records only use known attribute ids.
    Validate {
        #[arg(long)]
        records: PathBuf,
    },
    /// Write records as a Burmeister .cxt formal context.
    Export {
        /// Records file; the bundled survey records when omitted.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Ok,
    Degenerate,
    Mismatch,
}

fn emit(path: Option<&Path>, text: &[u8]) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text)?;
            Ok(())
        }
    }
}

fn run_id(args: IdArgs) -> Result<Outcome> {
    let data = args.input.load()?;
    let estimate = match args.scoring.mode {
        Mode::Exact => id_exact(&data)?,
        Mode::Support => {
            let s = default_support_sequence(data.rows(), args.scoring.support_length)?;
            id_bounds(&data, &s)?
        }
        Mode::Auto => id_auto(&data, args.scoring.threshold, args.scoring.support_length)?,
    };
    let text = io::render_report(Report::Estimate(&estimate), args.report.into())?;
    emit(args.output.as_deref(), text.as_bytes())?;
    Ok(if estimate.is_infinite() {
        Outcome::Degenerate
    } else {
        Outcome::Ok
    })
}

fn run_nid(args: NidArgs) -> Result<Outcome> {
    let data = args.input.load()?;
    let scores = args.scoring.scores(&data)?;
    if let Some(path) = &args.curve_out {
        let curve = nid_curve(&scores)?;
        io::write_report(Report::Curve(&curve), path, ReportFormat::Csv)?;
    }
    if args.scores_out.is_some() || args.curve_out.is_none() {
        let text = io::render_report(Report::Scores(&scores), args.report.into())?;
        emit(args.scores_out.as_deref(), text.as_bytes())?;
    }
    Ok(Outcome::Ok)
}

fn run_select(args: SelectArgs) -> Result<Outcome> {
    let data = args.input.load()?;
    let scores = args.scoring.scores(&data)?;
    let plan = plan_selection(&scores, args.policy, args.fraction, args.seed)?;
    let reduced = apply_selection(&data, &plan)?;
    let format = args
        .out_format
        .map(Into::into)
        .unwrap_or_else(|| args.input.format());
    io::write_matrix(&reduced, &args.out, format)?;
    if let Some(path) = &args.plan_out {
        io::write_atomic(path, (plan.to_json()? + "\n").as_bytes())?;
    }
    Ok(Outcome::Ok)
}

fn run_sweep_cmd(args: SweepArgs) -> Result<Outcome> {
    let (data, labels) = if args.synthetic {
        let (d, l) = generate_synthetic(
            args.synth_n,
            args.synth_signal,
            args.synth_noise,
            args.synth_seed,
        )?;
        (d, Some(l))
    } else {
        let input = args
            .input
            .as_ref()
            .ok_or_else(|| anyhow!("either --input or --synthetic is required"))?;
        let format = args
            .format
            .map(Into::into)
            .unwrap_or_else(|| infer_format(input));
        let data = io::read_matrix(input, format)
            .with_context(|| format!("reading {}", input.display()))?;
        match args.label_column {
            Some(c) => {
                let (d, l) = split_label_column(&data, c)?;
                (d, Some(l))
            }
            None => (data, None),
        }
    };
    if args.evaluate && labels.is_none() {
        bail!("--evaluate needs --label-column or --synthetic");
    }
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let config = SweepConfig {
        grid: parse_grid(&args.grid)?,
        policies: args.policies.clone(),
        seeds: (0..args.seeds).collect(),
        evaluate: args.evaluate,
        exact_threshold: match args.scoring.mode {
            Mode::Exact => usize::MAX,
            Mode::Support => 0,
            Mode::Auto => args.scoring.threshold,
        },
        support_length: args.scoring.support_length,
        share_mode: match args.share {
            ShareArg::Discriminability => ShareMode::Discriminability,
            ShareArg::Nid => ShareMode::Nid,
        },
    };
    let result = run_sweep(&data, labels.as_deref(), &config)?;
    let text = io::render_report(Report::Sweep(&result), args.report.into())?;
    emit(args.out.as_deref(), text.as_bytes())?;
    if let Some(path) = &args.curve_out {
        let scores = args.scoring.scores(&data)?;
        io::write_report(Report::Curve(&nid_curve(&scores)?), path, ReportFormat::Csv)?;
    }
    Ok(Outcome::Ok)
}

fn run_oracle(args: OracleArgs) -> Result<Outcome> {
    let data = match (&args.input, args.random_rows) {
        (Some(path), _) => {
            let format = args
                .format
                .map(Into::into)
                .unwrap_or_else(|| infer_format(path));
            io::read_matrix(path, format)?
        }
        (None, Some(rows)) => {
            let mut rng = SplitMix64::new(args.seed);
            let values = (0..rows * args.random_cols)
                .map(|_| rng.next_f64())
                .collect();
            DatasetMatrix::new(rows, args.random_cols, values)?
        }
        (None, None) => bail!("either --input or --random-rows is required"),
    };
    let fast = delta_exact(&data)?;
    let slow = oracle::brute_delta(&data)?;
    let mut max_diff = (fast - slow).abs();
    let fast_scores = score_features_exact(&data)?;
    for (a, b) in fast_scores.iter().zip(oracle::brute_feature_scores(&data)?) {
        max_diff = max_diff
            .max((a.delta_star - b.delta_star).abs())
            .max((a.delta_norm - b.delta_norm).abs());
    }
    let ok = max_diff <= 1e-12;
    println!(
        "{{\"rows\":{},\"cols\":{},\"delta\":{},\"delta_oracle\":{},\"max_abs_diff\":{},\"match\":{}}}",
        data.rows(),
        data.cols(),
        io::format_g17(fast),
        io::format_g17(slow),
        io::format_g17(max_diff),
        ok
    );
    Ok(if ok { Outcome::Ok } else { Outcome::Mismatch })
}

fn run_ontology(cmd: OntologyCommand) -> Result<Outcome> {
    let schema = ontology::builtin_schema();
    let load = |path: &Path| -> Result<Vec<ontology::ReproRecord>> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(ontology::parse_records(&text)?)
    };
    match cmd {
        OntologyCommand::List => {
            for a in &schema {
                println!("{}\t{}\t{}", a.id, a.category, a.question);
            }
        }
        OntologyCommand::Validate { records } => {
            let mut bad = 0;
            for r in load(&records)? {
                match ontology::validate_record(&r, &schema) {
                    Ok(()) => println!("{}: ok", r.label),
                    Err(ids) => {
                        bad += 1;
                        println!("{}: unknown {}", r.label, ids.join(", "));
                    }
                }
            }
            if bad > 0 {
                bail!("{bad} record(s) use unknown attribute ids");
            }
        }
        OntologyCommand::Export { records, out } => {
            let records = match records {
                Some(p) => load(&p)?,
                None => ontology::bundled_records(),
            };
            let ctx = ontology::FormalContext::from_records(&records, &schema)?;
            emit(out.as_deref(), &ontology::export_cxt(&ctx)?)?;
        }
    }
    Ok(Outcome::Ok)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Id(a) => run_id(a),
        Command::Nid(a) => run_nid(a),
        Command::Select(a) => run_select(a),
        Command::Sweep(a) => run_sweep_cmd(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Ontology(c) => run_ontology(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Degenerate) => {
            eprintln!("warning: every feature is constant; intrinsic dimension is infinite");
            ExitCode::from(3)
        }
        Ok(Outcome::Mismatch) => {
            eprintln!("error: fast kernels disagree with the oracle");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
