//! The `endpointkit` command line.
//!
//! ```text
//! endpointkit estimate --input data.txt [--kstar 2,4,8 | --k 1,2 | --r 2] [--alpha 0.05] [--lambda 0]
//! endpointkit simulate --model negfrechet --beta 0.5 --n 1000 --reps 1000 --seed 7 [--kstar 2,4]
//! endpointkit simulate --full-grid --reps 1000 --seed 7
//! endpointkit plot --input study.csv --output-dir figures/
//! endpointkit check [--model tanexp] [--beta 0.5]
//! ```
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or data error.
//! `ENDPOINTKIT_THREADS` sets the worker count of `simulate` unless
//! `--threads` is given.

pub mod format;
pub mod plot;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::asymptotics::{self, CheckOptions, CheckSummary};
use crate::estimator::{confidence_band, estimate_endpoint, suggest_k, SortedSample};
use crate::models::{Family, ModelSpec};
use crate::montecarlo::{default_kstar_grid, run_study, StudyConfig, StudyRow};

use self::format::{format_number, parse_observations};
use self::plot::{Figure, Panel, Series};

pub const THREADS_ENV: &str = "ENDPOINTKIT_THREADS";

pub const ESTIMATE_HEADER: &str = "kstar,k,xhat,qhat,ahat,ci_lower,ci_upper,alpha,lambda";
pub const SIMULATE_HEADER: &str = "model,beta,n,kstar,mean_xhat,mse_xhat,bias,reps,seed";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            _ => 2,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "endpointkit", version, about = "Right-endpoint estimation in the Gumbel domain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the endpoint of a data file (one value per line).
    Estimate(EstimateArgs),
    /// Run the Monte Carlo study and write a CSV table.
    Simulate(SimulateArgs),
    /// Draw SVG figures from a CSV written by `simulate` or `estimate`.
    Plot(PlotArgs),
    /// Verify the limit relations of the simulation models numerically.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Comma-separated even k* values.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["k", "r"])]
    pub kstar: Option<Vec<usize>>,
    /// Comma-separated threshold indices k (k* = 2k).
    #[arg(long, value_delimiter = ',', conflicts_with = "r")]
    pub k: Option<Vec<usize>>,
    /// Use k = round((log n)^r), r in (0, 2].
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Second-order bias constant; assumed 0 unless known.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// negfrechet, tanexp or arcsinexp.
    #[arg(long, required_unless_present = "full_grid")]
    pub model: Option<String>,
    #[arg(long, required_unless_present = "full_grid")]
    pub beta: Option<f64>,
    #[arg(long, required_unless_present = "full_grid")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated even k* values (default grid depends on n).
    #[arg(long, value_delimiter = ',')]
    pub kstar: Option<Vec<usize>>,
    /// Endpoint of the negative Fréchet model.
    #[arg(long, allow_negative_numbers = true)]
    pub xf: Option<f64>,
    /// Every family × β ∈ {1, 1/2, 1/4} × n ∈ {100, 1000, 10000}.
    #[arg(long, conflicts_with_all = ["model", "beta", "n", "kstar", "xf"])]
    pub full_grid: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (overrides ENDPOINTKIT_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Restrict to one family.
    #[arg(long)]
    pub model: Option<String>,
    /// Restrict to one β (default 1/4, 1/2, 1).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Evaluation point x of the relations.
    #[arg(long, default_value_t = 2.0)]
    pub x: f64,
    #[arg(long, hide = true)]
    pub negate_second_order: bool,
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Plot(a) => cmd_plot(a, out),
        Command::Check(a) => cmd_check(a, out),
    }
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn estimate_grid(args: &EstimateArgs, n: usize) -> Result<Vec<usize>, CliError> {
    let ks: Vec<usize> = if let Some(kstar) = &args.kstar {
        if let Some(bad) = kstar.iter().find(|&&v| v < 2 || !v.is_multiple_of(2)) {
            return Err(CliError::Usage(format!("k* must be even and >= 2, got {bad}")));
        }
        kstar.iter().map(|v| v / 2).collect()
    } else if let Some(k) = &args.k {
        k.clone()
    } else if let Some(r) = args.r {
        vec![suggest_k(n, r)?]
    } else {
        default_kstar_grid(n).into_iter().map(|v| v / 2).collect()
    };
    if ks.is_empty() {
        return Err(CliError::Data(format!("no feasible k* for n = {n}")));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || 2 * k > n) {
        return Err(CliError::Data(format!(
            "k* = {} is infeasible for n = {n} (needs 2 <= k* <= n)",
            2 * k
        )));
    }
    Ok(ks)
}

pub fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", args.input.display())))?;
    let values = parse_observations(&text)?;
    if values.len() < 3 {
        return Err(CliError::Data(format!(
            "need at least 3 observations, found {}",
            values.len()
        )));
    }
    let sample = SortedSample::from_unsorted(values)?;
    let grid = estimate_grid(args, sample.len())?;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!("alpha must lie in (0, 1), got {}", args.alpha)));
    }

    let mut csv = format!("# max={}\n{ESTIMATE_HEADER}\n", format_number(sample.max()));
    for k in grid {
        let est = confidence_band(&estimate_endpoint(&sample, k)?, args.alpha, args.lambda)?;
        let ci = est.ci.expect("band attached");
        let fields = [
            est.kstar.to_string(),
            est.k.to_string(),
            format_number(est.xhat),
            format_number(est.qhat),
            format_number(est.ahat),
            format_number(ci.lower),
            format_number(ci.upper),
            format_number(ci.alpha),
            format_number(ci.lambda),
        ];
        csv.push_str(&fields.join(","));
        csv.push('\n');
    }
    emit(args.output.as_deref(), &csv, out)
}

fn worker_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(t) = flag {
        return if t == 0 {
            Err(CliError::Usage("--threads must be positive".into()))
        } else {
            Ok(Some(t))
        };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

fn parse_family(name: &str) -> Result<Family, CliError> {
    name.parse::<Family>().map_err(|e| CliError::Usage(e.to_string()))
}

fn simulation_configs(args: &SimulateArgs, workers: Option<usize>) -> Result<Vec<StudyConfig>, CliError> {
    let mut configs = Vec::new();
    if args.full_grid {
        for family in Family::ALL {
            for beta in [1.0, 0.5, 0.25] {
                for n in [100, 1000, 10_000] {
                    configs.push(StudyConfig::new(ModelSpec::new(family, beta)?, n, args.reps, args.seed));
                }
            }
        }
    } else {
        let family = parse_family(args.model.as_deref().expect("required by clap"))?;
        let mut model = ModelSpec::new(family, args.beta.expect("required by clap"))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(xf) = args.xf {
            model = model.with_endpoint(xf).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        let n = args.n.expect("required by clap");
        let mut config = StudyConfig::new(model, n, args.reps, args.seed);
        if let Some(grid) = &args.kstar {
            config = config.with_grid(grid.clone());
        }
        configs.push(config);
    }
    for c in &mut configs {
        c.workers = workers;
        c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(configs)
}

/// CSV line for one study row.
pub fn format_study_row(row: &StudyRow) -> String {
    [
        row.model.family().name().to_string(),
        format_number(row.model.beta()),
        row.n.to_string(),
        row.kstar.to_string(),
        format_number(row.mean_xhat),
        format_number(row.mse_xhat),
        format_number(row.bias),
        row.reps.to_string(),
        row.master_seed.to_string(),
    ]
    .join(",")
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let workers = worker_count(args.threads)?;
    let configs = simulation_configs(args, workers)?;
    let mut csv = format!("{SIMULATE_HEADER}\n");
    for config in &configs {
        csv.push_str(&format!(
            "# cell model={} beta={} n={} xf={}\n",
            config.model.family(),
            format_number(config.model.beta()),
            config.n,
            format_number(config.model.endpoint())
        ));
        for row in run_study(config)? {
            csv.push_str(&format_study_row(&row));
            csv.push('\n');
        }
    }
    emit(args.output.as_deref(), &csv, out)
}

/// Data rows tagged with their line number.
type Rows = Vec<(usize, csv::StringRecord)>;

fn read_records(text: &str) -> Result<(Vec<String>, Rows), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(format!("malformed CSV header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows.push((line, record));
    }
    Ok((headers, rows))
}

fn column(headers: &[String], name: &str) -> Result<usize, CliError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Data(format!("CSV lacks column '{name}'")))
}

fn number(record: &csv::StringRecord, idx: usize, line: usize) -> Result<f64, CliError> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse::<f64>()
        .map_err(|_| CliError::Data(format!("row at line {line}: '{raw}' is not a number: {}", record.iter().collect::<Vec<_>>().join(","))))
}

/// `(model, beta, n)` group key of a simulate CSV row.
type CellKey = (String, String, String);

fn study_figures(headers: &[String], rows: &[(usize, csv::StringRecord)]) -> Result<Vec<(String, Figure)>, CliError> {
    let cols = ["model", "beta", "n", "kstar", "mean_xhat", "mse_xhat", "bias"]
        .map(|c| column(headers, c))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut groups: BTreeMap<CellKey, Vec<(f64, f64, f64, f64)>> = BTreeMap::new();
    let mut order = Vec::new();
    for (line, rec) in rows {
        let text = |i: usize| rec.get(cols[i]).unwrap_or("").to_string();
        let key = (text(0), text(1), text(2));
        if key.0.parse::<Family>().is_err() || key.2.parse::<usize>().is_err() {
            return Err(CliError::Data(format!(
                "row at line {line} has an invalid model or n: {}",
                rec.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let values = (
            number(rec, cols[3], *line)?,
            number(rec, cols[4], *line)?,
            number(rec, cols[5], *line)?,
            number(rec, cols[6], *line)?,
        );
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(values);
    }
    let mut figures = Vec::new();
    for key in order {
        let points = &groups[&key];
        let (model, beta, n) = &key;
        // true endpoint recovered as mean − bias, rounded like the CSV itself
        let (_, mean0, _, bias0) = points[0];
        let reference: f64 = format_number(mean0 - bias0).parse().expect("formatted number");
        let figure = Figure {
            title: format!("{model}, beta = {beta}, n = {n}"),
            x_label: "k* = 2k".into(),
            panels: vec![
                Panel {
                    title: "mean estimate".into(),
                    y_label: "mean of estimate".into(),
                    series: vec![Series {
                        label: "mean_xhat".into(),
                        points: points.iter().map(|p| (p.0, p.1)).collect(),
                        dashed: false,
                    }],
                    reference: Some(reference),
                },
                Panel {
                    title: "empirical MSE".into(),
                    y_label: "MSE".into(),
                    series: vec![Series {
                        label: "mse_xhat".into(),
                        points: points.iter().map(|p| (p.0, p.2)).collect(),
                        dashed: false,
                    }],
                    reference: None,
                },
            ],
        };
        figures.push((format!("{model}_beta{beta}_n{n}.svg"), figure));
    }
    Ok(figures)
}

fn estimate_figure(text: &str, headers: &[String], rows: &[(usize, csv::StringRecord)]) -> Result<Figure, CliError> {
    let cols = ["kstar", "xhat", "ahat", "ci_lower", "ci_upper"]
        .map(|c| column(headers, c))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let max = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("# max="))
        .and_then(|v| v.trim().parse::<f64>().ok());
    let mut series: [Vec<(f64, f64)>; 4] = Default::default();
    for (line, rec) in rows {
        let kstar = number(rec, cols[0], *line)?;
        for (s, &c) in series.iter_mut().zip(&cols[1..]) {
            s.push((kstar, number(rec, c, *line)?));
        }
    }
    let [xhat, ahat, lower, upper] = series;
    let line = |label: &str, points: Vec<(f64, f64)>, dashed| Series {
        label: label.into(),
        points,
        dashed,
    };
    Ok(Figure {
        title: "endpoint estimate".into(),
        x_label: "k* = 2k".into(),
        panels: vec![
            Panel {
                title: "estimate with confidence band".into(),
                y_label: "endpoint".into(),
                series: vec![
                    line("xhat", xhat, false),
                    line("ci_lower", lower, true),
                    line("ci_upper", upper, true),
                ],
                reference: max,
            },
            Panel {
                title: "scale estimate".into(),
                y_label: "ahat".into(),
                series: vec![line("ahat", ahat, false)],
                reference: None,
            },
        ],
    })
}

pub fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", args.input.display())))?;
    let (headers, rows) = read_records(&text)?;
    if rows.is_empty() {
        return Err(CliError::Data("CSV has no data rows".into()));
    }
    let figures = if headers.iter().any(|h| h == "mean_xhat") {
        study_figures(&headers, &rows)?
    } else if headers.iter().any(|h| h == "xhat") {
        vec![("estimate.svg".to_string(), estimate_figure(&text, &headers, &rows)?)]
    } else {
        return Err(CliError::Data(format!(
            "unrecognised CSV header: {}",
            headers.join(",")
        )));
    };
    fs::create_dir_all(&args.output_dir)?;
    for (name, figure) in figures {
        let path = args.output_dir.join(&name);
        fs::write(&path, plot::render(&figure))?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn check_models(args: &CheckArgs) -> Result<Vec<ModelSpec>, CliError> {
    let families = match &args.model {
        Some(name) => vec![parse_family(name)?],
        None => Family::ALL.to_vec(),
    };
    let betas = match args.beta {
        Some(b) => vec![b],
        None => vec![0.25, 0.5, 1.0],
    };
    let mut models = Vec::new();
    for f in families {
        for &b in &betas {
            models.push(ModelSpec::new(f, b).map_err(|e| CliError::Usage(e.to_string()))?);
        }
    }
    Ok(models)
}

/// Human-readable report of a check run.
pub fn format_check(summary: &CheckSummary) -> String {
    let mut s = String::new();
    for r in &summary.reports {
        let status = if r.is_eventually_decreasing() { "PASS" } else { "FAIL" };
        let pairs: Vec<String> = r
            .t_grid
            .iter()
            .zip(&r.residuals)
            .map(|(t, v)| format!("{}:{}", format_number(*t), format_number(*v)))
            .collect();
        s.push_str(&format!(
            "{status} {} {} x={} [{}]\n",
            r.relation,
            r.model,
            format_number(r.x),
            pairs.join(" ")
        ));
    }
    for (model, relation) in &summary.unsupported {
        s.push_str(&format!("UNSUPPORTED {relation} {model}\n"));
    }
    for c in &summary.identities {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        s.push_str(&format!(
            "{status} {} {} t={} rel_err={} tol={}\n",
            c.name,
            c.model,
            format_number(c.t),
            format_number(c.relative_error),
            format_number(c.tolerance)
        ));
    }
    s
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let models = check_models(args)?;
    let options = CheckOptions {
        x: args.x,
        negate_second_order: args.negate_second_order,
    };
    let summary = asymptotics::run_check(&models, options)?;
    out.write_all(format_check(&summary).as_bytes())?;
    if summary.passed() {
        writeln!(out, "check passed")?;
        Ok(())
    } else {
        let mut failed: Vec<String> = summary
            .reports
            .iter()
            .filter(|r| !r.is_eventually_decreasing())
            .map(|r| format!("{} for {}", r.relation, r.model))
            .collect();
        failed.extend(
            summary
                .identities
                .iter()
                .filter(|c| !c.passed())
                .map(|c| format!("{} for {} at t={}", c.name, c.model, format_number(c.t))),
        );
        writeln!(out, "check FAILED")?;
        Err(CliError::CheckFailed(failed.join("; ")))
    }
}
