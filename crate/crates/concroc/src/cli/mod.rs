//! Command-line front end: argument parsing, dataset loading, command
//! dispatch, and machine-readable error reporting on stderr.

mod dataset;
mod report;
mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use concroc::boot::{boot_ci, BootSpec};
use concroc::error::{Error, Result};
use concroc::logcon::{fit_logconcave, LogConcaveFit, SolverOptions};
use concroc::roc::{binormal_auc, fit_roc, RocKind};
use concroc::sample::preprocess;
use concroc::sim::{run_scenario, ScenarioSpec};
use concroc::smooth::{smooth_fit, SmoothedFit};

use dataset::{load_csv, CsvOptions, Dataset};
use report::{
    AucReport, CiRow, ConfintReport, FitGroup, FitReport, InputInfo, MethodAuc, SimulateReport,
};

#[derive(Parser)]
#[command(
    name = "concroc",
    version,
    about = "Smooth ROC curves from log-concave density estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit log-concave densities to one or both groups.
    Fit(FitArgs),
    /// Evaluate ROC curves on a grid and write them as CSV.
    Roc(RocArgs),
    /// Print the area under each requested curve as JSON.
    Auc(AucArgs),
    /// Bootstrap pointwise confidence intervals for R(t).
    Confint(ConfintArgs),
    /// Run a Monte Carlo scenario comparing estimators.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct InputOpts {
    /// CSV file with value and status columns; '#' lines are comments.
    #[arg(long)]
    input: PathBuf,
    /// Natural-log transform the values before fitting.
    #[arg(long)]
    log_transform: bool,
    /// Header name of the marker column.
    #[arg(long, default_value = "value")]
    value_col: String,
    /// Header name of the 0/1 status column (0 = control, 1 = case).
    #[arg(long, default_value = "status")]
    status_col: String,
    /// Field delimiter, a single byte.
    #[arg(long, default_value = ",")]
    delimiter: String,
}

impl InputOpts {
    fn load(&self) -> Result<Dataset> {
        let delim = self.delimiter.as_bytes();
        if delim.len() != 1 {
            return Err(Error::Usage(format!(
                "--delimiter must be a single byte, got '{}'",
                self.delimiter
            )));
        }
        let opts = CsvOptions {
            log_transform: self.log_transform,
            value_col: self.value_col.clone(),
            status_col: self.status_col.clone(),
            delimiter: delim[0],
        };
        load_csv(&self.input, &opts)
    }

    fn info(&self, data: &Dataset) -> InputInfo {
        InputInfo {
            path: self.input.display().to_string(),
            digest: data.digest.clone(),
        }
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputOpts,
    /// Which group to fit: controls, cases, or both.
    #[arg(long, default_value = "both")]
    group: String,
    /// Also match the sample variance with a Gaussian-smoothed fit.
    #[arg(long)]
    smoothed: bool,
    /// Output path for the fitted-model JSON.
    #[arg(long)]
    output: PathBuf,
    /// Optional CSV of fitted densities on a regular grid.
    #[arg(long)]
    density_grid: Option<PathBuf>,
    /// Number of points for --density-grid.
    #[arg(long, default_value_t = 512)]
    grid_n: usize,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    input: InputOpts,
    /// Comma-separated estimators: empirical, logcon, logcon-smooth, binormal.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "empirical,logcon,logcon-smooth,binormal"
    )]
    methods: Vec<String>,
    /// Number of grid points on [0, 1].
    #[arg(long, default_value_t = 1000)]
    grid_n: usize,
    /// Output path for the (t, curves...) CSV.
    #[arg(long)]
    output: PathBuf,
    /// Optional SVG plot overlaying the requested curves.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct AucArgs {
    #[command(flatten)]
    input: InputOpts,
    /// Comma-separated estimators: empirical, logcon, logcon-smooth, binormal.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "empirical,logcon,logcon-smooth,binormal"
    )]
    methods: Vec<String>,
}

#[derive(Args)]
struct ConfintArgs {
    #[command(flatten)]
    input: InputOpts,
    /// Comma-separated false-positive fractions, each strictly in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.7,0.9")]
    t: Vec<f64>,
    /// Bootstrap replicates.
    #[arg(long = "B", default_value_t = 500)]
    b: usize,
    /// Miscoverage level of the percentile intervals.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// RNG seed; fixed seed means byte-identical output.
    #[arg(long)]
    seed: u64,
    /// Estimator to bootstrap.
    #[arg(long, default_value = "logcon")]
    method: String,
    /// Output path for the interval JSON.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario id from the standard table, 1 through 12.
    #[arg(long)]
    scenario: usize,
    /// Monte Carlo replications.
    #[arg(long = "M", default_value_t = 500)]
    reps: usize,
    /// RNG seed; fixed seed means byte-identical output.
    #[arg(long)]
    seed: u64,
    /// Comma-separated estimators to compare against the truth.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "empirical,logcon,logcon-smooth,binormal"
    )]
    estimators: Vec<String>,
    /// Output path for the simulation report JSON.
    #[arg(long)]
    output: PathBuf,
}

/// Parse, configure the thread pool, dispatch, and map errors to the
/// documented exit codes with a JSON report on stderr.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => return fail(&Error::Usage(e.to_string())),
    };
    match configure_threads().and_then(|_| dispatch(cli)) {
        Ok(()) => 0,
        Err(e) => fail(&e),
    }
}

fn fail(err: &Error) -> i32 {
    let payload = serde_json::json!({
        "error": err.kind(),
        "message": err.to_string(),
    });
    eprintln!("{payload}");
    err.exit_code()
}

/// CONCROC_THREADS caps internal parallelism; 0 or unset means automatic.
fn configure_threads() -> Result<()> {
    let raw = match std::env::var("CONCROC_THREADS") {
        Ok(v) => v,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(Error::Usage(
                "CONCROC_THREADS must be a nonnegative integer".into(),
            ))
        }
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Error::Usage(format!(
            "CONCROC_THREADS must be a nonnegative integer, got '{raw}'"
        ))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Roc(a) => cmd_roc(a),
        Command::Auc(a) => cmd_auc(a),
        Command::Confint(a) => cmd_confint(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn parse_methods(names: &[String]) -> Result<Vec<RocKind>> {
    let mut kinds = Vec::new();
    for name in names {
        let kind = RocKind::from_name(name)?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    if kinds.is_empty() {
        return Err(Error::Usage("at least one method is required".into()));
    }
    Ok(kinds)
}

fn require_grid(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParam {
            name: "grid-n",
            reason: "need at least 2 grid points".into(),
        });
    }
    Ok(())
}

/// One fitted group, plain or smoothed, for the fit command.
enum Fitted {
    Plain(LogConcaveFit),
    Smooth(SmoothedFit),
}

impl Fitted {
    fn pdf(&self, x: f64) -> f64 {
        match self {
            Fitted::Plain(f) => f.pdf(x),
            Fitted::Smooth(s) => s.pdf(x),
        }
    }

    /// Support to tabulate: knot span, widened by 4 gamma when smoothed.
    fn range(&self) -> (f64, f64) {
        match self {
            Fitted::Plain(f) => (f.knots()[0], *f.knots().last().expect("fits have knots")),
            Fitted::Smooth(s) => {
                let k = s.base().knots();
                let pad = 4.0 * s.gamma();
                (k[0] - pad, k.last().expect("fits have knots") + pad)
            }
        }
    }

    fn group(&self) -> FitGroup {
        match self {
            Fitted::Plain(f) => FitGroup::from_fit(f),
            Fitted::Smooth(s) => FitGroup::from_smoothed(s),
        }
    }
}

fn fit_group(values: &[f64], smoothed: bool) -> Result<Fitted> {
    let sample = preprocess(values)?;
    let fit = fit_logconcave(&sample, &SolverOptions::default())?;
    if smoothed {
        Ok(Fitted::Smooth(smooth_fit(&fit, &sample)?))
    } else {
        Ok(Fitted::Plain(fit))
    }
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let (want_controls, want_cases) = match a.group.as_str() {
        "controls" => (true, false),
        "cases" => (false, true),
        "both" => (true, true),
        other => {
            return Err(Error::Usage(format!(
                "--group must be controls, cases, or both, got '{other}'"
            )))
        }
    };
    if a.density_grid.is_some() {
        require_grid(a.grid_n)?;
    }
    let data = a.input.load()?;
    let controls = want_controls
        .then(|| fit_group(&data.controls, a.smoothed))
        .transpose()?;
    let cases = want_cases
        .then(|| fit_group(&data.cases, a.smoothed))
        .transpose()?;
    let rep = FitReport {
        version: env!("CARGO_PKG_VERSION"),
        input: a.input.info(&data),
        group: a.group.clone(),
        log_transform: a.input.log_transform,
        smoothed: a.smoothed,
        controls: controls.as_ref().map(Fitted::group),
        cases: cases.as_ref().map(Fitted::group),
    };
    std::fs::write(&a.output, report::to_json_string(&rep))?;
    if let Some(grid_path) = &a.density_grid {
        let cols: Vec<(&str, &Fitted)> = [("controls", &controls), ("cases", &cases)]
            .into_iter()
            .filter_map(|(name, f)| f.as_ref().map(|f| (name, f)))
            .collect();
        write_density_grid(grid_path, a.grid_n, &cols)?;
    }
    Ok(())
}

fn write_density_grid(path: &Path, n: usize, cols: &[(&str, &Fitted)]) -> Result<()> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, f) in cols {
        let (l, h) = f.range();
        lo = lo.min(l);
        hi = hi.max(h);
    }
    let mut out = String::from("x");
    for (name, _) in cols {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let _ = write!(out, "{x}");
        for (_, f) in cols {
            let _ = write!(out, ",{}", f.pdf(x));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn cmd_roc(a: RocArgs) -> Result<()> {
    require_grid(a.grid_n)?;
    let kinds = parse_methods(&a.methods)?;
    let data = a.input.load()?;
    let ts: Vec<f64> = (0..a.grid_n)
        .map(|j| j as f64 / (a.grid_n - 1) as f64)
        .collect();
    let mut curves: Vec<(String, Vec<f64>)> = Vec::new();
    for &kind in &kinds {
        let curve = fit_roc(&data.controls, &data.cases, kind)?;
        let ys = ts
            .iter()
            .map(|&t| curve.eval(t))
            .collect::<Result<Vec<f64>>>()?;
        curves.push((kind.label().to_string(), ys));
    }
    let mut out = String::from("t");
    for (name, _) in &curves {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (j, &t) in ts.iter().enumerate() {
        let _ = write!(out, "{t}");
        for (_, ys) in &curves {
            let _ = write!(out, ",{}", ys[j]);
        }
        out.push('\n');
    }
    std::fs::write(&a.output, out)?;
    if let Some(svg_path) = &a.svg {
        svg::emit_svg(&ts, &curves, svg_path)?;
    }
    Ok(())
}

fn cmd_auc(a: AucArgs) -> Result<()> {
    let kinds = parse_methods(&a.methods)?;
    let data = a.input.load()?;
    let mut rows = Vec::new();
    for &kind in &kinds {
        let curve = fit_roc(&data.controls, &data.cases, kind)?;
        let closed_form = curve
            .binormal_params()
            .map(|(pa, pb)| binormal_auc(pa, pb));
        rows.push(MethodAuc {
            method: kind.label(),
            auc: curve.auc(),
            closed_form,
        });
    }
    let rep = AucReport {
        version: env!("CARGO_PKG_VERSION"),
        input: a.input.info(&data),
        log_transform: a.input.log_transform,
        auc: rows,
    };
    print!("{}", report::to_json_string(&rep));
    Ok(())
}

fn cmd_confint(a: ConfintArgs) -> Result<()> {
    let method = RocKind::from_name(&a.method)?;
    let data = a.input.load()?;
    let spec = BootSpec {
        t_list: a.t.clone(),
        b: a.b,
        alpha: a.alpha,
        seed: a.seed,
        method,
    };
    let res = boot_ci(&data.controls, &data.cases, &spec)?;
    let rep = ConfintReport {
        version: env!("CARGO_PKG_VERSION"),
        input: a.input.info(&data),
        method: res.method.label(),
        b: a.b,
        alpha: res.alpha,
        seed: res.seed,
        log_transform: a.input.log_transform,
        entries: res
            .entries
            .iter()
            .map(|e| CiRow {
                t: e.t,
                estimate: e.estimate,
                lower: e.lower,
                upper: e.upper,
                replicates: e.replicates,
                redraws: e.redraws,
            })
            .collect(),
    };
    std::fs::write(&a.output, report::to_json_string(&rep))?;
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let kinds = parse_methods(&a.estimators)?;
    let spec = ScenarioSpec::standard(a.scenario)?;
    let rep = run_scenario(&spec, a.reps, a.seed, &kinds)?;
    std::fs::write(&a.output, report::to_json_string(&SimulateReport::from_sim(&rep)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_match_the_documented_surface() {
        let cli = Cli::try_parse_from([
            "concroc", "confint", "--input", "f.csv", "--t", "0.1,0.5", "--B", "200", "--alpha",
            "0.1", "--seed", "7", "--output", "ci.json",
        ])
        .unwrap();
        match cli.command {
            Command::Confint(a) => {
                assert_eq!(a.t, vec![0.1, 0.5]);
                assert_eq!(a.b, 200);
                assert_eq!(a.alpha, 0.1);
                assert_eq!(a.seed, 7);
                assert_eq!(a.method, "logcon");
            }
            _ => panic!("parsed the wrong command"),
        }

        let cli = Cli::try_parse_from([
            "concroc", "simulate", "--scenario", "3", "--M", "100", "--seed", "9", "--output",
            "r.json",
        ])
        .unwrap();
        match cli.command {
            Command::Simulate(a) => {
                assert_eq!(a.scenario, 3);
                assert_eq!(a.reps, 100);
                assert_eq!(a.estimators.len(), 4);
            }
            _ => panic!("parsed the wrong command"),
        }

        let cli = Cli::try_parse_from([
            "concroc",
            "fit",
            "--input",
            "f.csv",
            "--log-transform",
            "--group",
            "controls",
            "--smoothed",
            "--output",
            "fit.json",
            "--density-grid",
            "d.csv",
            "--grid-n",
            "256",
        ])
        .unwrap();
        match cli.command {
            Command::Fit(a) => {
                assert!(a.input.log_transform);
                assert!(a.smoothed);
                assert_eq!(a.group, "controls");
                assert_eq!(a.grid_n, 256);
                assert_eq!(a.density_grid.as_deref(), Some(Path::new("d.csv")));
            }
            _ => panic!("parsed the wrong command"),
        }
    }

    #[test]
    fn methods_deduplicate_and_reject_unknown_names() {
        let kinds = parse_methods(&[
            "logcon".into(),
            "empirical".into(),
            "logcon".into(),
            "logcon-smooth".into(),
        ])
        .unwrap();
        assert_eq!(
            kinds,
            vec![
                RocKind::LogConcave,
                RocKind::Empirical,
                RocKind::SmoothedLogConcave
            ]
        );
        assert!(parse_methods(&["true".into()]).is_err());
        assert!(parse_methods(&[]).is_err());
    }
}
