use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use cyclocode::baseline::{DEFAULT_PRNS, FALLBACK_PRNS};
use cyclocode::correlation::{metrics_with, Method, MetricsOptions, MetricsSummary, DEFAULT_DEVIATION_THRESHOLD};
use cyclocode::experiments::{
    compare_gps_with, comparison_csv, primes_in_range, sweep, sweep_csv, table1_primes, table3_primes, table_csv,
    table_row, TableSpec,
};
use cyclocode::io::{
    bounds_csv, codebook_from_json, codebook_from_text, codebook_to_json, codebook_to_text, metrics_csv_header,
    metrics_csv_row, plan_from_json,
};
use cyclocode::numtheory::{is_prime, FieldContext};
use cyclocode::plans::{plan_subset, walsh_plan, CyclotomicPlan};
use cyclocode::sequences::{instantiate_with_fill, Codebook, RotationSpec};
use cyclocode::theory::{
    asymptotic_adjusted_df, asymptotic_cdf, asymptotic_cdf_per_pattern, minimum_asymptotic_cdf, peak_bounds,
    BoundReport,
};

#[derive(Parser)]
#[command(name = "cyclocode", version, about = "Cyclotomic sequence codebooks and their correlation measures")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "CYCLOCODE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the p-instance of a plan and write it as a codebook file.
    Generate(GenerateArgs),
    /// Measure the correlation properties of a codebook file.
    Analyze(AnalyzeArgs),
    /// Adjusted demerit factor as a function of the advancement r.
    Sweep(SweepArgs),
    /// One metrics row per prime.
    Table(TableArgs),
    /// Limiting demerit factors as p grows.
    Limit(LimitArgs),
    /// GPS C/A codebook against the Walsh-Hadamard codebook at p = 1153.
    CompareGps(CompareArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CodebookFormat {
    Json,
    Text,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Direct,
    Fft,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Preset {
    Table1,
    Table3,
}

#[derive(Args)]
struct MeasureArgs {
    /// How correlations are computed.
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Largest tolerated distance of an FFT value from the nearest integer.
    #[arg(long, default_value_t = DEFAULT_DEVIATION_THRESHOLD)]
    threshold: f64,
}

impl MeasureArgs {
    fn options(&self) -> MetricsOptions {
        let method = match self.method {
            MethodArg::Auto => Method::Auto,
            MethodArg::Direct => Method::Direct,
            MethodArg::Fft => Method::Fft,
        };
        MetricsOptions { method, threshold: self.threshold, ..MetricsOptions::default() }
    }
}

#[derive(Args)]
#[group(multiple = false)]
struct RotationArgs {
    /// Advance every sequence by R.
    #[arg(long, value_name = "R", allow_hyphen_values = true)]
    rotate_uniform: Option<i64>,
    /// Advance every sequence by floor(RHO * p); RHO is reduced into [0, 1).
    #[arg(long, value_name = "RHO")]
    rotate_fraction: Option<f64>,
    /// JSON array with one advancement per pattern.
    #[arg(long, value_name = "FILE")]
    rotate_map: Option<PathBuf>,
}

impl RotationArgs {
    fn spec(&self, default: RotationSpec) -> Result<RotationSpec, Failure> {
        if let Some(r) = self.rotate_uniform {
            return Ok(RotationSpec::Uniform(r));
        }
        if let Some(rho) = self.rotate_fraction {
            if !rho.is_finite() {
                return Err(Failure::invalid(format!("rotation fraction {rho} is not finite")));
            }
            return Ok(RotationSpec::Fraction(rho.rem_euclid(1.0)));
        }
        if let Some(path) = &self.rotate_map {
            let rs: Vec<i64> =
                serde_json::from_str(&read(path)?).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            return Ok(RotationSpec::PerPattern(rs));
        }
        Ok(default)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// walsh:K, walsh:K[rows] or a plan JSON file.
    #[arg(long)]
    plan: String,
    #[arg(long)]
    prime: u64,
    #[command(flatten)]
    rotation: RotationArgs,
    /// Replace the zero entry of each sequence with the fill value.
    #[arg(long)]
    unimodularize: bool,
    /// Fill value: a real number or RE,IM.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    fill: String,
    #[arg(long, value_enum, default_value = "json")]
    format: CodebookFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Codebook file (JSON or +/- text).
    file: PathBuf,
    /// Also evaluate the peak bounds of this plan.
    #[arg(long)]
    plan: Option<String>,
    /// Prime for the bounds, when the codebook does not record one.
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    #[command(flatten)]
    measure: MeasureArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    plan: String,
    #[arg(long)]
    prime: u64,
    /// Step between advancements.
    #[arg(long, default_value_t = 1)]
    stride: u64,
    #[arg(long)]
    unimodularize: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    #[command(flatten)]
    measure: MeasureArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    plan: String,
    #[arg(long, value_enum, conflicts_with_all = ["primes", "range"])]
    preset: Option<Preset>,
    /// Smallest k for the table3 preset.
    #[arg(long, default_value_t = 4)]
    k_min: u32,
    /// Largest k for the table3 preset.
    #[arg(long, default_value_t = 25)]
    k_max: u32,
    /// Comma-separated list of primes.
    #[arg(long, value_delimiter = ',', conflicts_with = "range")]
    primes: Vec<u64>,
    /// LO..HI; every prime in range that is 1 mod the plan index.
    #[arg(long)]
    range: Option<String>,
    #[command(flatten)]
    rotation: RotationArgs,
    #[arg(long)]
    unimodularize: bool,
    /// Add the GUC bound and limiting adjusted DF columns.
    #[arg(long)]
    theory: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    #[command(flatten)]
    measure: MeasureArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct LimitArgs {
    /// Plan index; taken from --plan when that is given.
    #[arg(long, required_unless_present = "plan")]
    n: Option<usize>,
    /// Rotation fraction.
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    rho: f64,
    /// Hadamard plan for a per-pattern limit.
    #[arg(long, requires = "rho_map")]
    plan: Option<String>,
    /// JSON array with one rotation fraction per pattern.
    #[arg(long, requires = "plan")]
    rho_map: Option<PathBuf>,
    /// Parity of (p - 1)/n for the per-pattern limit.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    sigma: u8,
    #[arg(long, value_enum, default_value = "text")]
    format: LimitFormat,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LimitFormat {
    Text,
    Json,
}

#[derive(Args)]
struct CompareArgs {
    /// Use PRN 1-37 without 34 instead of PRN 1-36.
    #[arg(long)]
    fallback: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    #[command(flatten)]
    measure: MeasureArgs,
    #[command(flatten)]
    out: OutputArgs,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<cyclocode::Error> for Failure {
    fn from(e: cyclocode::Error) -> Self {
        let code = if matches!(e, cyclocode::Error::Precision { .. }) { 2 } else { 1 };
        Failure { code, message: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// `walsh:K`, `walsh:K[r1,r2,...]`, or a path to a plan JSON file.
fn parse_plan(spec: &str) -> Result<CyclotomicPlan, Failure> {
    let Some(rest) = spec.strip_prefix("walsh:") else {
        return Ok(plan_from_json(&read(Path::new(spec))?)?);
    };
    let (order, rows) = match rest.split_once('[') {
        Some((k, rows)) => {
            let rows =
                rows.strip_suffix(']').ok_or_else(|| Failure::invalid(format!("unterminated row list in {spec}")))?;
            (k, Some(rows))
        }
        None => (rest, None),
    };
    let k: u32 = order.trim().parse().map_err(|_| Failure::invalid(format!("bad Walsh order in {spec}")))?;
    let plan = walsh_plan(k)?;
    match rows {
        None => Ok(plan),
        Some(rows) => {
            let rows = rows
                .split(',')
                .map(|r| r.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::invalid(format!("bad row list in {spec}")))?;
            Ok(plan_subset(&plan, &rows)?)
        }
    }
}

fn parse_fill(text: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::invalid(format!("bad fill value {text:?}"));
    let (re, im) = match text.split_once(',') {
        Some((re, im)) => (re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?),
        None => (text.trim().parse().map_err(|_| bad())?, 0.0),
    };
    Ok(Complex64::new(re, im))
}

fn load_codebook(path: &Path) -> Result<Codebook, Failure> {
    let text = read(path)?;
    let book = if text.trim_start().starts_with('{') { codebook_from_json(&text)? } else { codebook_from_text(&text)? };
    if book.is_empty() {
        return Err(cyclocode::Error::EmptyCodebook.into());
    }
    Ok(book)
}

fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    let plan = parse_plan(&args.plan)?;
    let ctx = FieldContext::new(args.prime)?;
    let rotation = args.rotation.spec(RotationSpec::Uniform(0))?;
    let fill = args.unimodularize.then(|| parse_fill(&args.fill)).transpose()?;
    let inst = instantiate_with_fill(&ctx, &plan, &rotation, fill)?;
    for w in &inst.warnings {
        eprintln!("warning: {w}");
    }
    let text = match args.format {
        CodebookFormat::Json => {
            let mut s = codebook_to_json(&inst.codebook);
            s.push('\n');
            s
        }
        CodebookFormat::Text => codebook_to_text(&inst.codebook)?,
    };
    emit(&args.out, &text)
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    metrics: &'a MetricsSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<&'a [BoundReport]>,
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let book = load_codebook(&args.file)?;
    let summary = metrics_with(&book, &args.measure.options())?;
    let bounds = match &args.plan {
        Some(spec) => {
            let plan = parse_plan(spec)?;
            let p =
                args.prime.or(book.meta().p).ok_or_else(|| Failure::invalid("bounds need a prime; pass --prime"))?;
            Some(peak_bounds(&plan, p, book.meta().unimodularized, Some(&summary))?)
        }
        None => None,
    };
    let text = match args.format {
        ReportFormat::Json => to_json(&AnalyzeReport { metrics: &summary, bounds: bounds.as_deref() }),
        ReportFormat::Csv => {
            let mut s = format!("{}\n{}\n", metrics_csv_header("codebook"), metrics_csv_row(&summary.label, &summary));
            if let Some(b) = &bounds {
                s.push('\n');
                s.push_str(&bounds_csv(b));
            }
            s
        }
    };
    emit(&args.out, &text)
}

fn run_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let plan = parse_plan(&args.plan)?;
    let result = sweep(&plan, args.prime, args.stride, args.unimodularize, &args.measure.options())?;
    let list = |rs: &[u64]| rs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
    eprintln!("min {:.6} at r = {}", result.min, list(&result.argmin));
    eprintln!("max {:.6} at r = {}", result.max, list(&result.argmax));
    let text = match args.format {
        ReportFormat::Csv => sweep_csv(&result),
        ReportFormat::Json => to_json(&result),
    };
    emit(&args.out, &text)
}

fn table_primes(args: &TableArgs, n: u64) -> Result<Vec<u64>, Failure> {
    if let Some(preset) = args.preset {
        return Ok(match preset {
            Preset::Table1 => table1_primes(),
            Preset::Table3 => {
                if args.k_min > args.k_max || args.k_max > 39 {
                    return Err(Failure::invalid(format!("bad k range {}..={}", args.k_min, args.k_max)));
                }
                table3_primes(args.k_min..=args.k_max)?
            }
        });
    }
    if let Some(range) = &args.range {
        let (lo, hi) = range
            .split_once("..")
            .and_then(|(a, b)| Some((a.trim().parse::<u64>().ok()?, b.trim().parse::<u64>().ok()?)))
            .ok_or_else(|| Failure::invalid(format!("bad range {range:?}; expected LO..HI")))?;
        return Ok(primes_in_range(lo, hi, n)?);
    }
    if args.primes.is_empty() {
        return Err(Failure::invalid("choose primes with --preset, --primes or --range"));
    }
    Ok(args.primes.clone())
}

fn run_table(args: &TableArgs) -> Result<(), Failure> {
    let plan = parse_plan(&args.plan)?;
    let primes = table_primes(args, plan.n() as u64)?;
    let spec = TableSpec {
        plan: &plan,
        rotation: args.rotation.spec(RotationSpec::Fraction(0.25))?,
        unimodularize: args.unimodularize,
        options: args.measure.options(),
    };
    let mut rows = Vec::with_capacity(primes.len());
    for (i, &p) in primes.iter().enumerate() {
        if !is_prime(p) {
            eprintln!("warning: {p} is not prime; skipped");
        } else if (p - 1) % plan.n() as u64 != 0 {
            eprintln!("warning: {p} is not 1 mod {}; skipped", plan.n());
        } else {
            let row = table_row(&spec, p)?;
            for w in &row.warnings {
                eprintln!("warning: p={p}: {w}");
            }
            rows.push(row);
        }
        eprintln!("[{}/{}] p={p}", i + 1, primes.len());
    }
    let text = match args.format {
        ReportFormat::Csv => table_csv(&rows, args.theory),
        ReportFormat::Json => to_json(&rows),
    };
    emit(&args.out, &text)
}

#[derive(Serialize)]
struct LimitReport {
    n: usize,
    rho: Option<f64>,
    cdf: f64,
    adjusted_df: f64,
    min_cdf: f64,
    min_adjusted_df: f64,
    minimizers: &'static str,
}

fn limit(args: &LimitArgs) -> Result<(), Failure> {
    let report = match (&args.plan, &args.rho_map) {
        (Some(spec), Some(path)) => {
            let plan = parse_plan(spec)?;
            let rho: Vec<f64> =
                serde_json::from_str(&read(path)?).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            let n = plan.n();
            let cdf = asymptotic_cdf_per_pattern(&plan, &rho, args.sigma)?;
            LimitReport {
                n,
                rho: None,
                cdf,
                adjusted_df: (n - 1) as f64 * (cdf - 1.0),
                min_cdf: minimum_asymptotic_cdf(n)?,
                min_adjusted_df: 1.0 / 6.0,
                minimizers: "(2k+1)/4",
            }
        }
        _ => {
            let n = args.n.expect("clap enforces --n");
            LimitReport {
                n,
                rho: Some(args.rho),
                cdf: asymptotic_cdf(n, args.rho)?,
                adjusted_df: asymptotic_adjusted_df(n, args.rho)?,
                min_cdf: minimum_asymptotic_cdf(n)?,
                min_adjusted_df: 1.0 / 6.0,
                minimizers: "(2k+1)/4",
            }
        }
    };
    let text = match args.format {
        LimitFormat::Json => to_json(&report),
        LimitFormat::Text => {
            let rho = report.rho.map_or("per pattern".to_string(), |r| r.to_string());
            format!(
                "n = {}\nrho = {rho}\nasymptotic CDF = {:.6}\nadjusted DF = {:.6}\nminimum CDF = {:.6} (adjusted DF {:.6}) at rho = {}\n",
                report.n, report.cdf, report.adjusted_df, report.min_cdf, report.min_adjusted_df, report.minimizers
            )
        }
    };
    emit(&args.out, &text)
}

fn compare(args: &CompareArgs) -> Result<(), Failure> {
    let prns: &[u32] = if args.fallback { &FALLBACK_PRNS } else { &DEFAULT_PRNS };
    let cmp = compare_gps_with(prns, &args.measure.options())?;
    let text = match args.format {
        ReportFormat::Csv => comparison_csv(&cmp),
        ReportFormat::Json => to_json(&cmp),
    };
    emit(&args.out, &text)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::invalid("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure::invalid(e.to_string()))?;
    }
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Table(a) => run_table(a),
        Command::Limit(a) => limit(a),
        Command::CompareGps(a) => compare(a),
    }
}

fn main() -> ExitCode {
    // usage errors are validation errors; exit code 2 is kept for precision breaches
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
