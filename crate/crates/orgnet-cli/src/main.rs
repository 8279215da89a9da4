//! Command-line front end for the orgnet engines.
//!
//! Every subcommand reads a JSON config (`--config`), runs one engine, and
//! emits a machine-readable artifact as JSON (default) or CSV.  Exit codes:
//! 0 success, 1 config parse error, 2 domain error from the engines,
//! 3 I/O error.

mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{require, DepthCfg, FileConfig, GridCfg, CONFIG_VERSION};
use orgnet::{
    assess_fragility, choose_culture, compute_envelope, estimate_reliability, find_discontinuities,
    rho_at_depth, sample_curve, selected_symmetric_equilibrium, solve_heterogeneous_equilibrium,
    zero_equilibrium, Depth, EquilibriumResult64, GameConfig64, SimConfig,
};
use output::{cell, csv_table, json_envelope};
use serde_json::{json, Value};
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "orgnet",
    version,
    about = "Reliability and culture-investment analysis of tree-structured collaboration networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Overrides the `seed` key of the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the `grid` key of the config file, as start:step:end.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Reliability at one culture strength.
    Rho(Common),
    /// Reliability over a culture grid, with discontinuity marks.
    RhoCurve(Common),
    /// Discontinuities of infinite-depth reliability.
    Critical(Common),
    /// Monte Carlo reliability estimate on a finite tree.
    Simulate(Common),
    /// Investment-game equilibrium: symmetric at finite depth, heterogeneous
    /// at infinite depth.
    Equilibrium(Common),
    /// Equilibrium reliability under culture shocks.
    Fragility(Common),
    /// Simple-vs-complex project values over a baseline grid.
    Envelope(Common),
    /// Argmax culture choice among labeled baselines.
    Leadership(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Rho(c)
            | Command::RhoCurve(c)
            | Command::Critical(c)
            | Command::Simulate(c)
            | Command::Equilibrium(c)
            | Command::Fragility(c)
            | Command::Envelope(c)
            | Command::Leadership(c) => c,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Rho(_) => "rho",
            Command::RhoCurve(_) => "rho-curve",
            Command::Critical(_) => "critical",
            Command::Simulate(_) => "simulate",
            Command::Equilibrium(_) => "equilibrium",
            Command::Fragility(_) => "fragility",
            Command::Envelope(_) => "envelope",
            Command::Leadership(_) => "leadership",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Exit 1: the config file (or a run flag) did not parse.
    Config(String),
    /// Exit 2: the engines rejected the inputs.
    Engine(orgnet::Error),
    /// Exit 3: reading the config or writing the output failed.
    Io(std::io::Error),
}

impl From<orgnet::Error> for CliError {
    fn from(e: orgnet::Error) -> Self {
        CliError::Engine(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Engine(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Engine(e) => write!(f, "domain error: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("orgnet: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    let common = command.common();
    let raw = fs::read_to_string(&common.config)?;
    let mut de = serde_json::Deserializer::from_str(&raw);
    let file: FileConfig = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| CliError::Config(format!("{} (key path `{}`)", e.inner(), e.path())))?;
    if file.version != CONFIG_VERSION {
        return Err(CliError::Config(format!(
            "unsupported config version {}, expected {CONFIG_VERSION}",
            file.version
        )));
    }

    let seed = common.seed.or(file.seed);
    let grid = match &common.grid {
        Some(flag) => Some(parse_grid_flag(flag)?),
        None => file.grid,
    };

    let (result, csv) = dispatch(command, &file, seed, grid)?;
    let text = match common.format {
        Format::Csv => csv,
        Format::Json => json_envelope(command.name(), seed, grid, &file, result),
    };
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_grid_flag(flag: &str) -> Result<GridCfg, CliError> {
    let bad = || CliError::Config(format!("invalid --grid `{flag}`, expected start:step:end"));
    let parts: Vec<&str> = flag.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut nums = [0.0; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| bad())?;
    }
    Ok(GridCfg {
        start: nums[0],
        step: nums[1],
        end: nums[2],
    })
}

fn expand_grid(grid: Option<GridCfg>) -> Result<(GridCfg, Vec<f64>), CliError> {
    let grid = grid
        .ok_or_else(|| CliError::Config("missing required key `grid` (or pass --grid)".into()))?;
    let points = grid.expand().map_err(CliError::Config)?;
    Ok((grid, points))
}

fn dispatch(
    command: &Command,
    file: &FileConfig,
    seed: Option<u64>,
    grid: Option<GridCfg>,
) -> Result<(Value, String), CliError> {
    match command {
        Command::Rho(_) => cmd_rho(file),
        Command::RhoCurve(_) => cmd_rho_curve(file, grid),
        Command::Critical(_) => cmd_critical(file),
        Command::Simulate(_) => cmd_simulate(file, seed),
        Command::Equilibrium(_) => cmd_equilibrium(file),
        Command::Fragility(_) => cmd_fragility(file),
        Command::Envelope(_) => cmd_envelope(file, grid),
        Command::Leadership(_) => cmd_leadership(file),
    }
}

fn depth_value(depth: Depth) -> Value {
    let cfg = match depth {
        Depth::Infinite => DepthCfg::Infinite,
        Depth::Finite(l) => DepthCfg::Finite(l),
    };
    serde_json::to_value(cfg).expect("depth serializes")
}

fn cmd_rho(file: &FileConfig) -> Result<(Value, String), CliError> {
    let spec = require(&file.spec, "spec")?.build()?;
    let pi = *require(&file.pi, "pi")?;
    let rho = rho_at_depth(&spec, pi, spec.depth())?;
    let result = json!({ "pi": pi, "rho": rho, "depth": depth_value(spec.depth()) });
    let csv = csv_table("pi,rho", vec![format!("{},{}", cell(pi), cell(rho))]);
    Ok((result, csv))
}

fn cmd_rho_curve(file: &FileConfig, grid: Option<GridCfg>) -> Result<(Value, String), CliError> {
    let spec = require(&file.spec, "spec")?.build()?;
    let (grid, pis) = expand_grid(grid)?;
    let curve = sample_curve(&spec, &pis, spec.depth())?;
    let mut rows = Vec::with_capacity(curve.points.len());
    let mut json_points = Vec::with_capacity(curve.points.len());
    for (i, point) in curve.points.iter().enumerate() {
        let prev = if i == 0 {
            point.pi - grid.step
        } else {
            curve.points[i - 1].pi
        };
        let marked = curve
            .discontinuities
            .iter()
            .any(|c| c.pi > prev && c.pi <= point.pi);
        rows.push(format!("{},{},{}", cell(point.pi), cell(point.rho), marked));
        json_points.push(json!({
            "pi": point.pi,
            "rho": point.rho,
            "is_discontinuity": marked,
        }));
    }
    let result = json!({
        "points": json_points,
        "discontinuities": serde_json::to_value(&curve.discontinuities).expect("serializes"),
        "depth": depth_value(spec.depth()),
    });
    Ok((result, csv_table("pi,rho,is_discontinuity", rows)))
}

fn cmd_critical(file: &FileConfig) -> Result<(Value, String), CliError> {
    let spec = require(&file.spec, "spec")?.build()?;
    let points = find_discontinuities(&spec)?;
    let rows = points
        .iter()
        .map(|c| format!("{},{}", cell(c.pi), cell(c.r)))
        .collect();
    let result = json!({ "discontinuities": serde_json::to_value(&points).expect("serializes") });
    Ok((result, csv_table("pi,r", rows)))
}

fn cmd_simulate(file: &FileConfig, seed: Option<u64>) -> Result<(Value, String), CliError> {
    let spec = require(&file.spec, "spec")?.build()?;
    let pi = *require(&file.pi, "pi")?;
    let trials = *require(&file.trials, "trials")?;
    let seed = seed
        .ok_or_else(|| CliError::Config("missing required key `seed` (or pass --seed)".into()))?;
    let sim = estimate_reliability(&SimConfig {
        spec,
        pi,
        trials,
        seed,
    })?;
    let row = format!(
        "{},{},{},{},{}",
        sim.successes,
        sim.trials,
        cell(sim.estimate),
        cell(sim.std_error),
        sim.seed
    );
    let result = serde_json::to_value(sim).expect("serializes");
    Ok((
        result,
        csv_table("successes,trials,estimate,std_error,seed", vec![row]),
    ))
}

/// Equilibrium dispatch shared by `equilibrium` and `fragility`: finite
/// depth runs the symmetric solver at that depth, infinite depth runs the
/// heterogeneous solver and falls back to the zero profile when no positive
/// equilibrium survives.
fn solve_equilibrium(file: &FileConfig) -> Result<(GameConfig64, EquilibriumResult64), CliError> {
    let config = file.game_config()?;
    let eq = match config.spec().depth() {
        Depth::Finite(l) => selected_symmetric_equilibrium(&config, l)?,
        Depth::Infinite => match solve_heterogeneous_equilibrium(&config)? {
            Some(eq) => eq,
            None => zero_equilibrium(&config)?,
        },
    };
    Ok((config, eq))
}

fn equilibrium_rows(eq: &EquilibriumResult64) -> Vec<String> {
    (0..eq.x_star.len())
        .map(|i| {
            format!(
                "{},{},{},{}",
                i,
                cell(eq.x_star[i]),
                cell(eq.foc_residuals[i]),
                cell(eq.payoffs[i])
            )
        })
        .collect()
}

fn cmd_equilibrium(file: &FileConfig) -> Result<(Value, String), CliError> {
    let (_, eq) = solve_equilibrium(file)?;
    let rows = equilibrium_rows(&eq);
    let result = serde_json::to_value(&eq).expect("serializes");
    Ok((result, csv_table("worker,x_star,foc_residual,payoff", rows)))
}

fn cmd_fragility(file: &FileConfig) -> Result<(Value, String), CliError> {
    let (config, eq) = solve_equilibrium(file)?;
    let shock_grid = require(&file.shock_grid, "shock_grid")?;
    let report = assess_fragility(&config, &eq, shock_grid)?;
    let rows = report
        .shock_grid
        .iter()
        .zip(&report.rho_after_shock)
        .map(|(s, rho)| format!("{},{}", cell(*s), cell(*rho)))
        .collect();
    let result = serde_json::to_value(&report).expect("serializes");
    Ok((result, csv_table("s,rho_after_shock", rows)))
}

fn cmd_envelope(file: &FileConfig, grid: Option<GridCfg>) -> Result<(Value, String), CliError> {
    let menu = require(&file.menu, "menu")?.build()?;
    let (_, baselines) = expand_grid(grid)?;
    let report = compute_envelope(&menu, &baselines)?;
    let rows = (0..report.baseline_grid.len())
        .map(|i| {
            format!(
                "{},{},{},{},{}",
                cell(report.baseline_grid[i]),
                cell(report.output_no_invest[i]),
                cell(report.output_equilibrium[i]),
                report.chosen_project[i],
                cell(report.eq_culture[i])
            )
        })
        .collect();
    let result = serde_json::to_value(&report).expect("serializes");
    Ok((
        result,
        csv_table(
            "baseline_pi,output_panel_a,output_panel_b,chosen_project,eq_culture",
            rows,
        ),
    ))
}

fn cmd_leadership(file: &FileConfig) -> Result<(Value, String), CliError> {
    let cultures = require(&file.cultures, "cultures")?;
    let chosen = choose_culture(cultures)?;
    let rows = cultures
        .iter()
        .map(|(label, pi)| format!("{},{},{}", label, cell(*pi), *label == chosen))
        .collect();
    let result = json!({ "chosen": chosen, "cultures": cultures });
    Ok((result, csv_table("label,culture,chosen", rows)))
}
