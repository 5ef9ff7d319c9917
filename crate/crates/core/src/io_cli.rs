//! Command-line front end: argument parsing, run orchestration and the
//! CSV/JSON writers.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::correlation::{ChannelParams, DEFAULT_TOLERANCE, MAX_TOLERANCE, MIN_TOLERANCE};
use crate::error::Error;
use crate::spectra::{
    pdc_marginal, read_tabulated_csv, Power, SpectrumEnvelope, SpectrumKind,
    DOUBLE_GAUSSIAN_SEPARATION, DOUBLE_LORENTZIAN_SEPARATION,
};
use crate::states::{PairAmplitudes, SingleAmplitudes};
use crate::sweep::{
    figure_curves, run_sweep, CorrelationMode, FigureId, LengthGrid, PolarizationState,
    SweepConfig, SweepResult, DEFAULT_K, DEFAULT_PUMP_FREQUENCY, DEFAULT_WIDTH, REVIVAL_PROMINENCE,
    ZERO_THRESHOLD,
};

/// Overrides the quadrature tolerance.
pub const TOLERANCE_ENV: &str = "DEPHASIM_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_OUTPUT: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

pub const CSV_HEADER: [&str; 6] = ["l_m", "re_F", "im_F", "abs_F", "S_L", "C"];
const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(String),
    #[error("output: {0}")]
    Output(String),
    #[error("numerical: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Output(_) => EXIT_OUTPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::TabulatedInput { .. } => CliError::Input(msg),
            Error::OracleMismatch { .. }
            | Error::NotConverged { .. }
            | Error::EigenNotConverged(_)
            | Error::InvalidDensityMatrix(_)
            | Error::CorrelationOutOfRange(_) => CliError::Numerical(msg),
            _ => CliError::Usage(msg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Closed,
    Quad,
    Both,
}

impl From<ModeArg> for CorrelationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Closed => CorrelationMode::ClosedForm,
            ModeArg::Quad => CorrelationMode::Quadrature,
            ModeArg::Both => CorrelationMode::Both,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dephasim",
    version,
    about = "Polarization decoherence in birefringent dephasing channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan crystal length for one spectrum and state.
    Sweep(SweepArgs),
    /// Reproduce the curves of a figure (fig1, fig2, fig3a, fig3b).
    Figure(FigureArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Largest crystal length in meters.
    #[arg(long, default_value_t = 0.02)]
    lmax: f64,
    /// Number of grid points, including l = 0.
    #[arg(long, default_value_t = 2001)]
    points: usize,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Output file; sweeps default to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// white, gaussian, lorentzian, rectangular, multidelta,
    /// double-gaussian, double-lorentzian or tabulated:<path>
    #[arg(long, default_value = "gaussian")]
    spectrum: String,
    /// Δn·Δω/c in 1/m.
    #[arg(long, default_value_t = DEFAULT_K)]
    k: f64,
    /// Peak separation as a multiple of the width.
    #[arg(long)]
    sep: Option<f64>,
    /// |α|² of the single photon.
    #[arg(long, conflicts_with = "a2")]
    alpha2: Option<f64>,
    /// |a|² of the pair a|HH⟩ + b|VV⟩; implies --pair.
    #[arg(long)]
    a2: Option<f64>,
    /// Photon pair from down-conversion instead of a single photon.
    #[arg(long)]
    pair: bool,
    /// Birefringence Δn; overrides --k.
    #[arg(long)]
    delta_n: Option<f64>,
    /// Spectral width Δω in rad/s.
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    width: f64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct FigureArgs {
    id: FigureId,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum RunTarget {
    Sweep {
        sweep: SweepConfig,
    },
    Figure {
        figure: FigureId,
        grid: LengthGrid,
        mode: Option<CorrelationMode>,
        tolerance: f64,
    },
}

/// Everything needed to repeat a run. Written verbatim into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub run: RunTarget,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn oracle(&self) -> bool {
        let mode = match &self.run {
            RunTarget::Sweep { sweep } => sweep.mode,
            RunTarget::Figure { mode, .. } => *mode,
        };
        mode == Some(CorrelationMode::Both)
    }
}

fn tolerance_from(value: Option<String>) -> Result<f64, CliError> {
    let Some(raw) = value else {
        return Ok(DEFAULT_TOLERANCE);
    };
    let tol: f64 = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{TOLERANCE_ENV}={raw} is not a number")))?;
    if !(MIN_TOLERANCE..=MAX_TOLERANCE).contains(&tol) {
        return Err(CliError::Usage(format!(
            "{TOLERANCE_ENV}={raw} outside [{MIN_TOLERANCE:e}, {MAX_TOLERANCE:e}]"
        )));
    }
    Ok(tol)
}

fn grid_from(args: &GridArgs) -> Result<LengthGrid, CliError> {
    let grid = LengthGrid {
        start: 0.0,
        stop: args.lmax,
        count: args.points,
    };
    grid.validate()?;
    Ok(grid)
}

fn population(name: &str, value: f64) -> Result<f64, CliError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(CliError::Usage(format!("--{name} {value} outside [0, 1]")));
    }
    Ok(value)
}

fn spectrum_from(args: &SweepArgs, pair: bool) -> Result<SpectrumEnvelope, CliError> {
    let width = args.width;
    if let Some(sep) = args.sep {
        if !(sep.is_finite() && sep >= 0.0) {
            return Err(CliError::Usage(format!(
                "--sep {sep} must be a non-negative multiple"
            )));
        }
    }
    if let Some(path) = args.spectrum.strip_prefix("tabulated:") {
        return Ok(read_tabulated_csv(Path::new(path))?);
    }
    let kind = match args.spectrum.as_str() {
        "white" => SpectrumKind::White,
        "gaussian" => SpectrumKind::Gaussian,
        "lorentzian" => SpectrumKind::Lorentzian,
        "rectangular" => SpectrumKind::Rectangular,
        "multidelta" => SpectrumKind::MultiDelta,
        "double-gaussian" => SpectrumKind::DoubleGaussian,
        "double-lorentzian" => SpectrumKind::DoubleLorentzian,
        other => return Err(CliError::Usage(format!("unknown spectrum `{other}`"))),
    };
    let separation = args.sep.map(|s| s * width);
    let spectrum = match kind {
        SpectrumKind::White => SpectrumEnvelope::White,
        SpectrumKind::MultiDelta => {
            let half = 0.5 * separation.unwrap_or(DOUBLE_GAUSSIAN_SEPARATION * width);
            SpectrumEnvelope::multi_delta(&[-half, half])?
        }
        _ if pair => pdc_marginal(kind, DEFAULT_PUMP_FREQUENCY, width, separation)?.marginal,
        SpectrumKind::Gaussian => SpectrumEnvelope::gaussian(0.0, width, Power::Single)?,
        SpectrumKind::Lorentzian => SpectrumEnvelope::lorentzian(0.0, width, Power::Single)?,
        SpectrumKind::Rectangular => SpectrumEnvelope::rectangular(0.0, width)?,
        SpectrumKind::DoubleGaussian => SpectrumEnvelope::double_gaussian(
            0.0,
            width,
            separation.unwrap_or(DOUBLE_GAUSSIAN_SEPARATION * width),
            Power::Single,
        )?,
        SpectrumKind::DoubleLorentzian => SpectrumEnvelope::double_lorentzian(
            0.0,
            width,
            separation.unwrap_or(DOUBLE_LORENTZIAN_SEPARATION * width),
            Power::Single,
        )?,
        SpectrumKind::Tabulated => unreachable!("handled by the prefix"),
    };
    Ok(spectrum)
}

/// Parses `argv` (including the program name) into a run configuration.
/// `tolerance_env` is the raw value of [`TOLERANCE_ENV`], if set.
pub fn parse_cli<I, T>(argv: I, tolerance_env: Option<String>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let tolerance = tolerance_from(tolerance_env)?;
    match cli.command {
        Command::Sweep(args) => {
            let grid = grid_from(&args.grid)?;
            let pair = args.pair || args.a2.is_some();
            let state = if pair {
                let a2 = population("a2", args.a2.or(args.alpha2).unwrap_or(0.5))?;
                PolarizationState::Pair(PairAmplitudes::from_population(a2)?)
            } else {
                let alpha2 = population("alpha2", args.alpha2.unwrap_or(0.5))?;
                PolarizationState::Single(SingleAmplitudes::from_population(alpha2)?)
            };
            if !(args.width.is_finite() && args.width > 0.0) {
                return Err(CliError::Usage(format!(
                    "--width {} must be positive",
                    args.width
                )));
            }
            let channel = match args.delta_n {
                Some(dn) => ChannelParams::new(dn)?,
                None => ChannelParams::from_k(args.k, args.width)?,
            };
            let spectrum = spectrum_from(&args, pair)?;
            let sweep = SweepConfig {
                spectrum,
                channel,
                state,
                grid,
                mode: args.grid.mode.map(Into::into),
                tolerance,
            };
            Ok(RunConfig {
                run: RunTarget::Sweep { sweep },
                out: args.grid.out,
                format: args.grid.format,
            })
        }
        Command::Figure(args) => {
            let grid = grid_from(&args.grid)?;
            Ok(RunConfig {
                run: RunTarget::Figure {
                    figure: args.id,
                    grid,
                    mode: args.grid.mode.map(Into::into),
                    tolerance,
                },
                out: args.grid.out,
                format: args.grid.format,
            })
        }
    }
}

fn tidy(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn number(x: f64) -> String {
    format!("{:?}", tidy(x))
}

#[derive(Serialize)]
struct RowRecord {
    l_m: f64,
    #[serde(rename = "re_F")]
    re_f: f64,
    #[serde(rename = "im_F")]
    im_f: f64,
    #[serde(rename = "abs_F")]
    abs_f: f64,
    #[serde(rename = "S_L")]
    s_l: f64,
    #[serde(rename = "C")]
    c: Option<f64>,
}

#[derive(Serialize)]
struct EventRecord {
    kind: String,
    l_m: f64,
    amplitude: f64,
}

#[derive(Serialize)]
struct Thresholds {
    zero: f64,
    revival_prominence: f64,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    curve: Option<&'a str>,
    rows: Vec<RowRecord>,
    events: Vec<EventRecord>,
    thresholds: Thresholds,
    config: &'a RunConfig,
}

fn row_records(result: &SweepResult) -> Vec<RowRecord> {
    result
        .rows
        .iter()
        .map(|r| RowRecord {
            l_m: tidy(r.length),
            re_f: tidy(r.correlation.re()),
            im_f: tidy(r.correlation.im()),
            abs_f: tidy(r.correlation.abs()),
            s_l: tidy(r.entropy),
            c: r.concurrence.map(tidy),
        })
        .collect()
}

fn event_records(result: &SweepResult) -> Vec<EventRecord> {
    result
        .events
        .iter()
        .map(|e| EventRecord {
            kind: e.kind.to_string(),
            l_m: tidy(e.length),
            amplitude: tidy(e.amplitude),
        })
        .collect()
}

fn config_json(config: &RunConfig) -> Result<String, CliError> {
    serde_json::to_string(config).map_err(|e| CliError::Output(e.to_string()))
}

pub fn render_csv(
    result: &SweepResult,
    config: &RunConfig,
    curve: Option<&str>,
) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Output(e.to_string());
    writer.write_record(CSV_HEADER).map_err(io)?;
    for r in row_records(result) {
        writer
            .write_record([
                number(r.l_m),
                number(r.re_f),
                number(r.im_f),
                number(r.abs_f),
                number(r.s_l),
                r.c.map(number).unwrap_or_default(),
            ])
            .map_err(io)?;
    }
    let mut out = writer
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out, "# events: kind,l_m,amplitude").map_err(|e| CliError::Output(e.to_string()))?;
    for e in event_records(result) {
        writeln!(
            out,
            "# {},{},{}",
            e.kind,
            number(e.l_m),
            number(e.amplitude)
        )
        .map_err(|e| CliError::Output(e.to_string()))?;
    }
    let mut text = String::from_utf8(out).map_err(|e| CliError::Output(e.to_string()))?;
    text.push_str(&format!(
        "# thresholds: zero={ZERO_THRESHOLD:e},revival_prominence={REVIVAL_PROMINENCE:e}\n"
    ));
    if let Some(curve) = curve {
        text.push_str(&format!("# curve: {curve}\n"));
    }
    text.push_str(CONFIG_PREFIX);
    text.push_str(&config_json(config)?);
    text.push('\n');
    Ok(text)
}

pub fn render_json(
    result: &SweepResult,
    config: &RunConfig,
    curve: Option<&str>,
) -> Result<String, CliError> {
    let doc = JsonDocument {
        curve,
        rows: row_records(result),
        events: event_records(result),
        thresholds: Thresholds {
            zero: ZERO_THRESHOLD,
            revival_prominence: REVIVAL_PROMINENCE,
        },
        config,
    };
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Recovers the run configuration embedded in a CSV or JSON output.
pub fn read_config(text: &str) -> Result<RunConfig, CliError> {
    let bad = |e: serde_json::Error| CliError::Input(e.to_string());
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix(CONFIG_PREFIX)) {
        return serde_json::from_str(line).map_err(bad);
    }
    let value: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
    let config = value
        .get("config")
        .cloned()
        .ok_or_else(|| CliError::Input("no config in document".into()))?;
    serde_json::from_value(config).map_err(bad)
}

/// `fig1.csv` + `alpha2_0.1` → `fig1_alpha2_0.1.csv`.
pub fn suffixed_path(path: &Path, label: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{label}"),
    };
    path.with_file_name(name)
}

fn render(
    result: &SweepResult,
    config: &RunConfig,
    curve: Option<&str>,
) -> Result<String, CliError> {
    match config.format {
        OutputFormat::Csv => render_csv(result, config, curve),
        OutputFormat::Json => render_json(result, config, curve),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes one curve in the configured format. `curve` labels a figure curve.
pub fn write_output(
    result: &SweepResult,
    config: &RunConfig,
    path: &Path,
    curve: Option<&str>,
) -> Result<(), CliError> {
    if result.rows.is_empty() {
        return Err(CliError::Output("no rows to write".into()));
    }
    write_file(path, &render(result, config, curve)?)
}

/// Runs the configuration and writes its outputs. Returns the files written;
/// a sweep without `out` goes to `stdout` instead.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    match &config.run {
        RunTarget::Sweep { sweep } => {
            let result = run_sweep(sweep)?;
            match &config.out {
                Some(path) => {
                    write_output(&result, config, path, None)?;
                    Ok(vec![path.clone()])
                }
                None => {
                    let text = render(&result, config, None)?;
                    stdout
                        .write_all(text.as_bytes())
                        .map_err(|e| CliError::Output(e.to_string()))?;
                    Ok(Vec::new())
                }
            }
        }
        RunTarget::Figure {
            figure,
            grid,
            mode,
            tolerance,
        } => {
            let base = config.out.clone().unwrap_or_else(|| {
                PathBuf::from(format!("{figure}.{}", config.format.extension()))
            });
            let mut written = Vec::new();
            for mut curve in figure_curves(*figure, *grid)? {
                curve.config.mode = *mode;
                curve.config.tolerance = *tolerance;
                let result = run_sweep(&curve.config)?;
                let path = suffixed_path(&base, &curve.label);
                write_output(&result, config, &path, Some(&curve.label))?;
                written.push(path);
            }
            Ok(written)
        }
    }
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run<I, T>(
    argv: I,
    tolerance_env: Option<String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = parse_cli(argv, tolerance_env).and_then(|cfg| execute(&cfg, stdout));
    match outcome {
        Ok(_) => EXIT_OK,
        Err(CliError::Clap(e)) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            e.exit_code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "dephasim: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        parse_cli(
            std::iter::once("dephasim").chain(args.iter().copied()),
            None,
        )
    }

    #[test]
    fn default_sweep() {
        let cfg = parse(&[
            "sweep",
            "--spectrum",
            "gaussian",
            "--k",
            "500",
            "--alpha2",
            "0.5",
            "--lmax",
            "0.02",
            "--points",
            "2001",
        ])
        .unwrap();
        let RunTarget::Sweep { sweep } = &cfg.run else {
            panic!("expected a sweep")
        };
        assert_eq!(sweep.grid, LengthGrid::default());
        assert_eq!(
            sweep.spectrum,
            SpectrumEnvelope::gaussian(0.0, DEFAULT_WIDTH, Power::Single).unwrap()
        );
        assert!((sweep.channel.k(DEFAULT_WIDTH) - 500.0).abs() < 1e-12);
        assert!(matches!(sweep.state, PolarizationState::Single(_)));
        assert_eq!(sweep.tolerance, DEFAULT_TOLERANCE);
        assert!(!cfg.oracle());
        assert_eq!(cfg.out, None);
    }

    #[test]
    fn figure_command() {
        let cfg = parse(&["figure", "fig1", "--out", "fig1.csv"]).unwrap();
        assert_eq!(
            cfg.run,
            RunTarget::Figure {
                figure: FigureId::Fig1,
                grid: LengthGrid::default(),
                mode: None,
                tolerance: DEFAULT_TOLERANCE
            }
        );
        assert_eq!(cfg.out, Some(PathBuf::from("fig1.csv")));
    }

    #[test]
    fn usage_errors() {
        for args in [
            &["sweep", "--alpha2", "1.5"][..],
            &["sweep", "--a2", "-0.1"],
            &["sweep", "--bogus"],
            &["sweep", "--spectrum", "voigt"],
            &["sweep", "--points", "1"],
            &["sweep", "--lmax", "-1"],
            &["sweep", "--mode", "fast"],
            &["figure", "fig9"],
            &["sweep", "--alpha2", "0.3", "--a2", "0.3"],
        ] {
            let err = parse(args).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{args:?}: {err}");
        }
    }

    #[test]
    fn missing_tabulated_file() {
        let err =
            parse(&["sweep", "--spectrum", "tabulated:/nonexistent/spectrum.csv"]).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn tolerance_environment() {
        let argv = ["dephasim", "sweep"];
        let cfg = parse_cli(argv, Some("1e-9".into())).unwrap();
        let RunTarget::Sweep { sweep } = cfg.run else {
            panic!()
        };
        assert_eq!(sweep.tolerance, 1e-9);
        for bad in ["1e-3", "1e-14", "abc", ""] {
            assert_eq!(
                parse_cli(argv, Some(bad.into())).unwrap_err().exit_code(),
                EXIT_USAGE,
                "{bad}"
            );
        }
    }

    #[test]
    fn pair_maps_to_down_conversion_marginals() {
        let cfg = parse(&["sweep", "--spectrum", "lorentzian", "--pair"]).unwrap();
        let RunTarget::Sweep { sweep } = cfg.run else {
            panic!()
        };
        assert_eq!(sweep.spectrum.power(), Power::Squared);
        assert!(matches!(sweep.state, PolarizationState::Pair(_)));

        let cfg = parse(&[
            "sweep",
            "--spectrum",
            "double-gaussian",
            "--a2",
            "0.3",
            "--sep",
            "4",
        ])
        .unwrap();
        let RunTarget::Sweep { sweep } = cfg.run else {
            panic!()
        };
        assert_eq!(
            sweep.spectrum,
            SpectrumEnvelope::double_gaussian(
                0.0,
                DEFAULT_WIDTH,
                4.0 * DEFAULT_WIDTH,
                Power::Squared
            )
            .unwrap()
        );
    }

    #[test]
    fn explicit_delta_n_overrides_k() {
        let cfg = parse(&["sweep", "--delta-n", "0.03", "--k", "1"]).unwrap();
        let RunTarget::Sweep { sweep } = cfg.run else {
            panic!()
        };
        assert_eq!(sweep.channel.delta_n(), 0.03);
    }

    #[test]
    fn suffixes() {
        assert_eq!(
            suffixed_path(Path::new("out/fig1.csv"), "alpha2_0.1"),
            PathBuf::from("out/fig1_alpha2_0.1.csv")
        );
        assert_eq!(
            suffixed_path(Path::new("fig3b"), "gaussian"),
            PathBuf::from("fig3b_gaussian")
        );
    }

    #[test]
    fn csv_layout_and_config_round_trip() {
        let cfg = parse(&[
            "sweep",
            "--spectrum",
            "rectangular",
            "--pair",
            "--points",
            "11",
            "--lmax",
            "0.01",
        ])
        .unwrap();
        let RunTarget::Sweep { sweep } = &cfg.run else {
            panic!()
        };
        let result = run_sweep(sweep).unwrap();
        let text = render_csv(&result, &cfg, None).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("l_m,re_F,im_F,abs_F,S_L,C"));
        assert_eq!(lines.next(), Some("0.0,1.0,0.0,1.0,0.0,1.0"));
        assert!(text.contains("# events: kind,l_m,amplitude\n# CoherenceZero,0.0063"));
        assert!(text.contains("\n# Disentangled,0.0063"));
        assert!(text.contains("# thresholds: zero=1e-12,revival_prominence=1e-6\n"));
        assert_eq!(read_config(&text).unwrap(), cfg);

        let json = render_json(&result, &cfg, None).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["rows"].as_array().unwrap().len(), 11);
        assert_eq!(value["rows"][0]["C"], serde_json::json!(1.0));
        assert_eq!(read_config(&json).unwrap(), cfg);
    }

    #[test]
    fn single_photon_rows_leave_c_empty() {
        let cfg = parse(&["sweep", "--points", "3"]).unwrap();
        let RunTarget::Sweep { sweep } = &cfg.run else {
            panic!()
        };
        let text = render_csv(&run_sweep(sweep).unwrap(), &cfg, None).unwrap();
        assert!(text.lines().skip(1).take(3).all(|l| l.ends_with(',')));
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(number(-0.0), "0.0");
        assert_eq!(number(1e-20), "1e-20");
        assert_eq!(number(0.1), "0.1");
    }
}
