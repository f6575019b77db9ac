//! Batch front end: curve fitting, staged calibration, pricing, surface tables and the
//! oracle suite. Data goes to files; stderr carries one JSON diagnostic line per run.

mod instruments;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affine_rates::affine::ProcessDocument;
use affine_rates::calibration::{calibrate_inflation, calibrate_nominal, CalibrationConfig};
use affine_rates::error::RatesError;
use affine_rates::market::MarketSnapshot;
use affine_rates::surface::{
    cosh_caplet_surface, forward_inflation_curve, inflation_option_surface, nominal_caplet_surface, write_surface,
};
use affine_rates::verify::{self, Check};
use affine_rates::{Component, CoshLiborModel, FourierOptions, PricingOptions, ProcessSpec, TenorGrid};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use instruments::{Instrument, Model, Priced};

#[derive(Debug, Parser)]
#[command(name = "affine-rates", version, about = "Affine LIBOR and inflation market models")]
struct Cli {
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Model JSON to load.
    #[arg(long, global = true)]
    model_in: Option<PathBuf>,
    /// Where to write the resulting model JSON.
    #[arg(long, global = true)]
    model_out: Option<PathBuf>,
    /// Directory for output tables and reports.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Seed for the optimiser restarts and Monte Carlo streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a cosh LIBOR model to `curve.csv`. The config names the process and the
    /// number of semiannual periods.
    FitCurve {
        /// Directory holding `curve.csv`.
        #[arg(long)]
        market: PathBuf,
    },
    /// Stagewise calibration of the nominal factors to the curve and caplet volatilities.
    CalibrateNominal {
        /// Directory holding `curve.csv` and `caplet_vols.csv`.
        #[arg(long)]
        market: PathBuf,
    },
    /// Stagewise calibration of the inflation factors on top of a nominal model (`--model-in`).
    CalibrateInflation {
        /// Directory holding `curve.csv`, `zciis.csv` and `infl_options.csv`.
        #[arg(long)]
        market: PathBuf,
    },
    /// Price the instruments listed in a JSON array under the `--model-in` model.
    Price {
        #[arg(long)]
        instruments: PathBuf,
    },
    /// Implied-volatility, forward-inflation and option-price tables.
    Surface {
        /// Built-in one-factor model on the flat 3.5% curve, used when no `--model-in` is given.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// Table to produce; all tables the model supports by default.
        #[arg(long, value_enum)]
        kind: Option<SurfaceKind>,
        /// Comma-separated strikes.
        #[arg(long, value_delimiter = ',')]
        strikes: Option<Vec<f64>>,
        /// Comma-separated fixing indices on the semiannual grid (cosh model).
        #[arg(long, value_delimiter = ',')]
        fixings: Option<Vec<usize>>,
        /// Comma-separated maturities in years (inflation model).
        #[arg(long, value_delimiter = ',')]
        years: Option<Vec<usize>>,
        /// Inflation strikes below this level are priced as floorlets, the rest as caplets.
        #[arg(long)]
        floor_below: Option<f64>,
        /// Shift of the Black model for inflation implied volatilities.
        #[arg(long)]
        shift: Option<f64>,
    },
    /// Run the oracle suite; exits 0 iff every check passes.
    Verify {
        #[arg(long, default_value_t = 1_000_000)]
        mc_paths: usize,
        /// Also run the surface-shape checks.
        #[arg(long)]
        shapes: bool,
        /// Also run the five-year calibration round trip.
        #[arg(long)]
        calibration: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    Skew,
    Smile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SurfaceKind {
    Caplet,
    NominalCaplet,
    ForwardInflation,
    InflationOptions,
}

enum Failure {
    Usage(String),
    Rates(RatesError),
    ChecksFailed(usize),
}

impl From<RatesError> for Failure {
    fn from(e: RatesError) -> Self {
        Failure::Rates(e)
    }
}

type Outcome = std::result::Result<Vec<PathBuf>, Failure>;

/// Input and specification problems exit 2, infeasible fits 3, numerical failures 4.
fn exit_code(e: &RatesError) -> u8 {
    match e {
        RatesError::Infeasible(_) | RatesError::StageInfeasible { .. } => 3,
        RatesError::Domain(_)
        | RatesError::Contour(_)
        | RatesError::Pole(_)
        | RatesError::OdeBlowup(_)
        | RatesError::Numerical(_)
        | RatesError::NotUnimodal(_)
        | RatesError::OutOfBounds(_)
        | RatesError::DegenerateVariance => 4,
        _ => 2,
    }
}

fn diagnose(kind: &str, code: u8, message: &str) {
    eprintln!(
        "{}",
        json!({"status": "error", "kind": kind, "exit": code, "message": message})
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            // clap's message runs from the `error:` line to the first blank line.
            let body: Vec<&str> = text
                .lines()
                .skip_while(|l| !l.starts_with("error: "))
                .take_while(|l| !l.trim().is_empty())
                .map(|l| l.trim().trim_start_matches("error: "))
                .collect();
            let message = match body.is_empty() {
                true => "missing subcommand or required argument".to_string(),
                false => body.join(" "),
            };
            diagnose("UsageError", 2, &message);
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = configure_threads() {
        diagnose("UsageError", 2, &msg);
        return ExitCode::from(2);
    }
    let name = command_name(&cli.command);
    match run(&cli) {
        Ok(outputs) => {
            eprintln!("{}", json!({"status": "ok", "command": name, "outputs": outputs}));
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            diagnose("UsageError", 2, &msg);
            ExitCode::from(2)
        }
        Err(Failure::Rates(e)) => {
            let code = exit_code(&e);
            diagnose(e.kind(), code, &e.to_string());
            ExitCode::from(code)
        }
        Err(Failure::ChecksFailed(n)) => {
            diagnose("VerificationFailed", 1, &format!("{n} checks failed"));
            ExitCode::from(1)
        }
    }
}

/// `RATES_THREADS` caps the worker pool used by pricing grids and Monte Carlo.
fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("RATES_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or(format!("RATES_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::FitCurve { .. } => "fit-curve",
        Command::CalibrateNominal { .. } => "calibrate-nominal",
        Command::CalibrateInflation { .. } => "calibrate-inflation",
        Command::Price { .. } => "price",
        Command::Surface { .. } => "surface",
        Command::Verify { .. } => "verify",
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::FitCurve { market } => fit_curve(cli, market),
        Command::CalibrateNominal { market } => run_calibrate_nominal(cli, market),
        Command::CalibrateInflation { market } => run_calibrate_inflation(cli, market),
        Command::Price { instruments } => price(cli, instruments),
        Command::Surface {
            preset,
            kind,
            strikes,
            fixings,
            years,
            floor_below,
            shift,
        } => {
            let flags = GridSpec {
                kind: *kind,
                strikes: strikes.clone(),
                fixings: fixings.clone(),
                years: years.clone(),
                floor_below: *floor_below,
                shift: *shift,
            };
            surface(cli, *preset, flags)
        }
        Command::Verify {
            mc_paths,
            shapes,
            calibration,
        } => run_verify(cli, *mc_paths, *shapes, *calibration),
    }
}

fn read(path: &Path) -> Result<String, RatesError> {
    std::fs::read_to_string(path).map_err(|e| RatesError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<PathBuf, RatesError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).map_err(|e| RatesError::Io(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

fn out_path(cli: &Cli, name: &str) -> Result<PathBuf, RatesError> {
    std::fs::create_dir_all(&cli.out_dir)?;
    Ok(cli.out_dir.join(name))
}

fn model_in(cli: &Cli) -> std::result::Result<Model, Failure> {
    let path = cli
        .model_in
        .as_ref()
        .ok_or_else(|| Failure::Usage("--model-in is required".into()))?;
    Ok(Model::from_json(&read(path)?)?)
}

fn save_model(cli: &Cli, model: &Model, default_name: &str) -> Result<PathBuf, RatesError> {
    let path = match &cli.model_out {
        Some(p) => p.clone(),
        None => out_path(cli, default_name)?,
    };
    write(&path, &model.to_json()?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitConfig {
    /// Process document; its horizon defaults to the end of the tenor grid.
    process: ProcessDocument,
    /// Semiannual periods; defaults to the whole half-years covered by the curve.
    periods: Option<usize>,
}

fn fit_curve(cli: &Cli, market: &Path) -> Outcome {
    let config = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Usage("fit-curve needs --config".into()))?;
    let config: FitConfig = serde_json::from_str(&read(config)?).map_err(RatesError::from)?;
    let snap = MarketSnapshot::from_dir(market)?;
    let n = config
        .periods
        .unwrap_or((2.0 * snap.curve_horizon() + 1e-9).floor() as usize);
    let grid = TenorGrid::semiannual(n)?;
    let horizon = config.process.horizon.unwrap_or(grid.last());
    let component = Component::from_document(&config.process)?;
    let discounts = (1..=n)
        .map(|k| snap.discount(grid.date(k)))
        .collect::<Result<Vec<_>, _>>()?;
    let model = CoshLiborModel::fit(ProcessSpec::single(component, horizon)?, grid, &discounts)?;
    Ok(vec![save_model(cli, &Model::Cosh(model), "model.json")?])
}

fn calibration_config(cli: &Cli) -> Result<CalibrationConfig, RatesError> {
    let mut config = match &cli.config {
        Some(p) => CalibrationConfig::from_json(&read(p)?)?,
        None => CalibrationConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run_calibrate_nominal(cli: &Cli, market: &Path) -> Outcome {
    let config = calibration_config(cli)?;
    let snap = MarketSnapshot::from_dir(market)?;
    let (model, report) = calibrate_nominal(&snap, &config)?;
    report.write(&cli.out_dir)?;
    let mut out = vec![cli.out_dir.join("report.json")];
    out.push(save_model(cli, &Model::Inflation(model), "nominal_model.json")?);
    Ok(out)
}

fn run_calibrate_inflation(cli: &Cli, market: &Path) -> Outcome {
    let config = calibration_config(cli)?;
    let Model::Inflation(nominal) = model_in(cli)? else {
        return Err(Failure::Usage(
            "calibrate-inflation needs a nominal inflation-model document".into(),
        ));
    };
    let snap = MarketSnapshot::from_dir(market)?;
    let (model, report) = calibrate_inflation(&snap, &nominal, &config)?;
    report.write(&cli.out_dir)?;
    let mut out = vec![cli.out_dir.join("report.json")];
    out.push(save_model(cli, &Model::Inflation(model), "inflation_model.json")?);
    Ok(out)
}

fn price(cli: &Cli, instruments: &Path) -> Outcome {
    let model = model_in(cli)?;
    let list: Vec<Instrument> = serde_json::from_str(&read(instruments)?).map_err(RatesError::from)?;
    let priced = list
        .into_iter()
        .map(|instrument| {
            Ok(Priced {
                value: model.price(&instrument)?,
                instrument,
            })
        })
        .collect::<Result<Vec<_>, RatesError>>()?;
    let text = serde_json::to_string_pretty(&priced).map_err(RatesError::from)?;
    let mut out = vec![write(&out_path(cli, "prices.json")?, &text)?];
    if cli.model_out.is_some() {
        out.push(save_model(cli, &model, "model.json")?);
    }
    Ok(out)
}

/// Grid of a `surface` run; read from `--config`, with flags taking precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GridSpec {
    kind: Option<SurfaceKind>,
    strikes: Option<Vec<f64>>,
    fixings: Option<Vec<usize>>,
    years: Option<Vec<usize>>,
    floor_below: Option<f64>,
    shift: Option<f64>,
}

impl GridSpec {
    fn overlay(self, flags: GridSpec) -> GridSpec {
        GridSpec {
            kind: flags.kind.or(self.kind),
            strikes: flags.strikes.or(self.strikes),
            fixings: flags.fixings.or(self.fixings),
            years: flags.years.or(self.years),
            floor_below: flags.floor_below.or(self.floor_below),
            shift: flags.shift.or(self.shift),
        }
    }
}

fn steps(from: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| from + step * i as f64).collect()
}

#[derive(Serialize)]
struct LowerBoundPoint {
    maturity_years: f64,
    lower_bound: f64,
}

fn surface(cli: &Cli, preset: Option<Preset>, flags: GridSpec) -> Outcome {
    let spec = match &cli.config {
        Some(p) => serde_json::from_str::<GridSpec>(&read(p)?).map_err(RatesError::from)?,
        None => GridSpec::default(),
    }
    .overlay(flags);
    let model = match (&cli.model_in, preset) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --model-in or --preset".into())),
        (Some(_), None) => model_in(cli)?,
        (None, Some(Preset::Skew)) => Model::Cosh(verify::flat_cosh_model(verify::skew_component())?),
        (None, Some(Preset::Smile)) => Model::Cosh(verify::flat_cosh_model(verify::smile_component())?),
        (None, None) => return Err(Failure::Usage("surface needs --model-in or --preset".into())),
    };
    let mut out = Vec::new();
    if cli.model_out.is_some() {
        out.push(save_model(cli, &model, "model.json")?);
    }
    let wants = |k: SurfaceKind| spec.kind.is_none() || spec.kind == Some(k);
    match &model {
        Model::Cosh(m) => {
            if spec.kind.is_some_and(|k| k != SurfaceKind::Caplet) {
                return Err(Failure::Usage("the cosh model only produces caplet surfaces".into()));
            }
            let fixings = spec
                .fixings
                .clone()
                .unwrap_or_else(|| (1..m.grid().len().min(11)).collect());
            let strikes = spec.strikes.clone().unwrap_or_else(|| steps(0.02, 0.005, 11));
            let rows = cosh_caplet_surface(m, &fixings, &strikes, None, &PricingOptions::default())?;
            let path = out_path(cli, "vol_surface.csv")?;
            write_surface(&path, &rows)?;
            out.push(path);
            let bounds = fixings
                .iter()
                .map(|&k| {
                    let lower_bound = m.forward_rate_lower_bound(k + 1, m.grid().date(k))?;
                    Ok(LowerBoundPoint {
                        maturity_years: m.grid().date(k),
                        lower_bound,
                    })
                })
                .collect::<Result<Vec<_>, RatesError>>()?;
            let path = out_path(cli, "lower_bounds.csv")?;
            write_surface(&path, &bounds)?;
            out.push(path);
        }
        Model::Inflation(m) => {
            if spec.kind == Some(SurfaceKind::Caplet) {
                return Err(Failure::Usage("use nominal-caplet for inflation-model caplets".into()));
            }
            let years = spec.years.clone().unwrap_or_else(|| (1..=m.years()).collect());
            let opts = FourierOptions::default();
            if wants(SurfaceKind::NominalCaplet) {
                let strikes = spec.strikes.clone().unwrap_or_else(|| steps(0.01, 0.005, 11));
                let path = out_path(cli, "vol_surface.csv")?;
                write_surface(&path, &nominal_caplet_surface(m, &years, &strikes, &opts)?)?;
                out.push(path);
            }
            if wants(SurfaceKind::ForwardInflation) && m.has_inflation() {
                let path = out_path(cli, "forward_inflation.csv")?;
                write_surface(&path, &forward_inflation_curve(m, &years)?)?;
                out.push(path);
            }
            if wants(SurfaceKind::InflationOptions) && m.has_inflation() {
                let strikes = spec.strikes.clone().unwrap_or_else(|| steps(-0.02, 0.01, 9));
                let (floor_below, shift) = (spec.floor_below.unwrap_or(0.015), spec.shift.unwrap_or(1.0));
                let rows = inflation_option_surface(m, &years, &strikes, floor_below, shift, &opts)?;
                let path = out_path(cli, "inflation_options.csv")?;
                write_surface(&path, &rows)?;
                out.push(path);
            }
            if out.is_empty() {
                return Err(Failure::Usage(
                    "the model has no inflation factors for this table".into(),
                ));
            }
        }
    }
    Ok(out)
}

fn run_verify(cli: &Cli, mc_paths: usize, shapes: bool, calibration: bool) -> Outcome {
    if mc_paths < 2 {
        return Err(Failure::Usage("--mc-paths must be at least 2".into()));
    }
    let mut checks: Vec<Check> = verify::oracle_suite(mc_paths, cli.seed.unwrap_or(42));
    if shapes {
        checks.extend(verify::surface_shapes());
    }
    if calibration {
        checks.push(verify::calibration_round_trip());
    }
    for c in &checks {
        eprintln!("{}", c.line());
    }
    let verdicts = verify::verdicts(&checks);
    let text =
        serde_json::to_string_pretty(&json!({"checks": checks, "criteria": verdicts})).map_err(RatesError::from)?;
    let path = write(&out_path(cli, "verify.json")?, &text)?;
    match verdicts.iter().filter(|v| !v.passed).count() {
        0 => Ok(vec![path]),
        n => Err(Failure::ChecksFailed(n)),
    }
}
