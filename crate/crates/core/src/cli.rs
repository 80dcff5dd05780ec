//! Command-line front end.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 configuration or usage
//! error, 3 simulation fault.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::allocation::Variant;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::scenarios::{self, trace, ScenarioName, ScenarioReport, StepAxis};
use crate::selftest;
use crate::sim::Fidelity;
use crate::VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FAULT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tailsim", version, about = "Dual-rotor tail-sitter simulator (SEA and CEA actuation)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write trace.csv, stats.txt and manifest.txt.
    Run(RunArgs),
    /// Run a scenario for both variants and write a delta table.
    Compare(RunArgs),
    /// Run the built-in property suite.
    Selftest(SelftestArgs),
    /// Print the fully resolved configuration.
    PrintConfig(ConfigArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML configuration file; defaults are used for missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// takeoff, fig8, hover_gust, step or transition. Defaults to the config value.
    #[arg(long)]
    pub scenario: Option<String>,
    /// sea or cea. Defaults to the config value; ignored by compare.
    #[arg(long)]
    pub variant: Option<String>,
    /// averaged or cyclic.
    #[arg(long)]
    pub fidelity: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the stats as JSON on stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print a JSON result object instead of text.
    #[arg(long)]
    pub json: bool,
}

/// What a `run` writes into manifest.txt.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub scenario: ScenarioName,
    pub variant: Variant,
    pub fidelity: Fidelity,
    pub seed: u64,
    pub version: &'static str,
}

impl RunManifest {
    fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert(
            "config".into(),
            self.config.as_ref().map_or("<defaults>".into(), |p| p.display().to_string()),
        );
        m.insert("out".into(), self.out.display().to_string());
        m.insert("scenario".into(), self.scenario.name().into());
        m.insert("variant".into(), self.variant.name().into());
        m.insert("fidelity".into(), self.fidelity.name().into());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("version".into(), self.version.into());
        m
    }
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    match path {
        Some(p) => Config::from_path(p).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("cannot read {}: {io}", p.display())),
            other => other,
        }),
        None => Ok(Config::default()),
    }
}

/// Config with command-line overrides applied.
fn resolve(args: &RunArgs) -> Result<Config> {
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(s) = &args.scenario {
        cfg.scenario.name = s.parse()?;
    }
    if let Some(v) = &args.variant {
        cfg.sim.variant = v.parse()?;
    }
    if let Some(f) = &args.fidelity {
        cfg.sim.fidelity = f.parse()?;
    }
    if let Some(seed) = args.seed {
        cfg.sim.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SimulationFault { .. } => EXIT_FAULT,
        _ => EXIT_CONFIG,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Write trace.csv and stats.txt for one report.
pub fn write_report(dir: &Path, report: &ScenarioReport, trace_rate_hz: f64) -> Result<()> {
    create_dir(dir)?;
    let stride = (1000.0 / trace_rate_hz).round().max(1.0) as usize;
    write_file(&dir.join("trace.csv"), |w| trace::write_csv(w, &report.trace, stride))?;
    write_file(&dir.join("stats.txt"), |w| trace::write_stats(w, &report.stats()))?;
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = resolve(args)?;
    let manifest = RunManifest {
        config: args.config.clone(),
        out: args.out.clone(),
        scenario: cfg.scenario.name,
        variant: cfg.sim.variant,
        fidelity: cfg.sim.fidelity,
        seed: cfg.sim.seed,
        version: VERSION,
    };
    info!("running {} ({})", manifest.scenario, manifest.variant);
    let report = scenarios::run(cfg.sim.variant, &cfg)?;
    write_report(&args.out, &report, cfg.sim.trace_rate_hz)?;
    write_file(&args.out.join("manifest.txt"), |w| trace::write_stats(w, &manifest.to_map()))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report.stats()).expect("string map serializes"));
    } else {
        println!("{} {}: wrote {}", manifest.scenario, manifest.variant, args.out.display());
    }
    Ok(())
}

/// Reference values for a metric, shown next to the simulated pair.
pub fn reference_values(cfg: &Config, key: &str) -> Option<&'static str> {
    use ScenarioName::*;
    match (cfg.scenario.name, key) {
        (Takeoff, "pitch_err_max_deg") => Some("8.6°/2.1°/1.4° (CEA ground / CEA pedestal / SEA ground)"),
        (Takeoff, "x_err_max_m") => Some("0.04 m / 0.79 m"),
        (Fig8, "yaw_err_median_deg") => Some("19.5° / 27.1°"),
        (Fig8, "pos_err_median_m") => Some("14.17 cm / 15.35 cm"),
        (HoverGust, "x_err_max_m") => Some("6.60 cm / 7.92 cm"),
        (Step, "yaw_err_return_max_deg") => match cfg.scenario.axis {
            StepAxis::X => Some("- / 31.2°"),
            StepAxis::Y => Some("8.4° / 22.1°"),
        },
        (Transition, "final_airspeed_m_s") => Some("9.6 m/s / -"),
        (Transition, "pitch_overshoot_deg") => Some("0° / -"),
        _ => None,
    }
}

/// Delta table of two reports (SEA first).
pub fn delta_table(cfg: &Config, sea: &ScenarioReport, cea: &ScenarioReport) -> String {
    let mut rows = vec![[
        "metric".to_string(),
        "SEA".to_string(),
        "CEA".to_string(),
        "CEA/SEA".to_string(),
        "reference (SEA / CEA)".to_string(),
    ]];
    for (key, s) in &sea.metrics {
        let Some(c) = cea.metrics.get(key) else { continue };
        let ratio = if s.abs() > 1e-12 { format!("{:.3}", c / s) } else { "-".into() };
        rows.push([
            key.clone(),
            format!("{s:.4}"),
            format!("{c:.4}"),
            ratio,
            reference_values(cfg, key).unwrap_or("").to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..5).map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
    let mut out = format!("# {} compare, {} fidelity\n", cfg.scenario.name, cfg.sim.fidelity.name());
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn cmd_compare(args: &RunArgs) -> Result<()> {
    let cfg = resolve(args)?;
    info!("comparing {}", cfg.scenario.name);
    let (sea, cea) = std::thread::scope(|s| {
        let a = s.spawn(|| scenarios::run(Variant::Sea, &cfg));
        let b = s.spawn(|| scenarios::run(Variant::Cea, &cfg));
        (
            a.join().expect("simulation thread panicked"),
            b.join().expect("simulation thread panicked"),
        )
    });
    let (sea, cea) = (sea?, cea?);
    write_report(&args.out.join("sea"), &sea, cfg.sim.trace_rate_hz)?;
    write_report(&args.out.join("cea"), &cea, cfg.sim.trace_rate_hz)?;
    let table = delta_table(&cfg, &sea, &cea);
    write_file(&args.out.join("compare.txt"), |w| w.write_all(table.as_bytes()))?;
    if args.json {
        let mut m = BTreeMap::new();
        m.insert("sea", sea.stats());
        m.insert("cea", cea.stats());
        println!("{}", serde_json::to_string_pretty(&m).expect("string map serializes"));
    } else {
        print!("{table}");
    }
    Ok(())
}

fn cmd_selftest(args: &SelftestArgs) -> Result<bool> {
    let cfg = load_config(args.config.as_deref())?;
    let results = selftest::run_all(&cfg);
    let passed = results.iter().all(|r| r.passed);
    if args.json {
        let obj = serde_json::json!({ "passed": passed, "results": results });
        println!("{}", serde_json::to_string_pretty(&obj).expect("json value serializes"));
    } else {
        for r in &results {
            println!(
                "{} {:<20} {} ({:.2} s)",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail,
                r.seconds
            );
        }
    }
    Ok(passed)
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("TAILSIM_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).try_init();
}

/// Run the CLI on explicit arguments (first element is the program name).
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a).map(|_| EXIT_OK),
        Command::Compare(a) => cmd_compare(a).map(|_| EXIT_OK),
        Command::Selftest(a) => cmd_selftest(a).map(|ok| if ok { EXIT_OK } else { EXIT_SELFTEST_FAILED }),
        Command::PrintConfig(a) => load_config(a.config.as_deref()).map(|cfg| {
            print!("{}", cfg.to_toml_string());
            EXIT_OK
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
