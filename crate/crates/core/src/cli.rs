//! `vsa-lab` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use crate::config::{self, Config, Scenario};
use crate::control::MixingMode;
use crate::experiments::{
    self, run_trials, ExperimentError, Report, StiffnessPreset, SummaryRow, TORQUE_AMPLITUDE,
};
use crate::units::{mm, to_mm};

/// Output directory used when neither `--out`, the config nor
/// `VSA_LAB_OUT` names one.
pub const DEFAULT_OUT: &str = "vsa-lab-out";

#[derive(Debug, Parser)]
#[command(name = "vsa-lab", version, about = "Variable stiffness actuator simulation bench")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Cmd {
    /// Quasi-static torque/deflection sweep at every calibration position.
    Calibrate,
    /// Pivot position sine and step.
    Regulate,
    /// Torque sine and step at the low and high stiffness presets.
    Torque,
    /// Constant stiffness under a torque sine, against the coupled baseline.
    Decouple,
    /// Ring and sun gear torque shares.
    Loadshare,
    /// Stiffness and deflection limit against pivot position.
    Curves,
    /// Every scenario listed in the config.
    All,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Opts {
    /// JSON config file, or `defaults`.
    #[arg(long, global = true, default_value = "defaults")]
    pub config: String,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Override the configured mixing mode.
    #[arg(long, global = true)]
    pub mode: Option<MixingMode>,
    /// Override the configured friction switch.
    #[arg(long, global = true, value_enum)]
    pub friction: Option<OnOff>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
    fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match run(&cli) {
        Ok(_) => 0,
        Err(e @ CliError::Config(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Loads the config named by `--config` and applies the overrides.
pub fn resolve_config(opts: &Opts) -> Result<Config, config::ConfigError> {
    let mut cfg = if opts.config == "defaults" {
        Config::default()
    } else {
        config::load_config(&opts.config)?
    };
    if let Some(m) = opts.mode {
        cfg.controller.mixing = m;
    }
    if let Some(f) = opts.friction {
        cfg.plant.friction.enabled = f == OnOff::On;
    }
    Ok(cfg)
}

/// `--out`, then the config, then `VSA_LAB_OUT`, then [`DEFAULT_OUT`].
pub fn output_dir(opts: &Opts, cfg: &Config) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os("VSA_LAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Runs the selected scenarios and writes their artifacts. Returns the
/// reports written.
pub fn run(cli: &Cli) -> Result<Vec<Report>, CliError> {
    let cfg = resolve_config(&cli.opts)?;
    let out = output_dir(&cli.opts, &cfg);
    let scenarios = match cli.command {
        Cmd::Calibrate => vec![Scenario::Calibrate],
        Cmd::Regulate => vec![Scenario::Regulate],
        Cmd::Torque => vec![Scenario::Torque],
        Cmd::Decouple => vec![Scenario::Decouple],
        Cmd::Loadshare => vec![Scenario::Loadshare],
        Cmd::Curves => vec![Scenario::Curves],
        Cmd::All => cfg.scenarios.clone(),
    };
    let mut reports = Vec::new();
    for s in scenarios {
        info!("running {}", s.name());
        reports.extend(run_scenario(s, &cfg)?);
    }
    fs::create_dir_all(&out).map_err(|source| CliError::Io {
        path: out.clone(),
        source,
    })?;
    for r in &reports {
        write_report(r, &out, cli.opts.format)?;
    }
    let summary = summary_text(&cfg, &reports);
    print!("{summary}");
    let _ = std::io::stdout().flush();
    let path = out.join("summary.txt");
    fs::write(&path, summary).map_err(|source| CliError::Io { path, source })?;
    Ok(reports)
}

fn mixing_name(m: MixingMode) -> &'static str {
    match m {
        MixingMode::Consistent => "consistent",
        MixingMode::PaperLiteral => "paper-literal",
    }
}

/// Runs one scenario, with repeated-trial rows where the scenario has a
/// hardware spread to compare against.
pub fn run_scenario(scenario: Scenario, cfg: &Config) -> Result<Vec<Report>, ExperimentError> {
    let setup = cfg.setup();
    let trial_row = |name: &str, stats: experiments::TrialStats, unit: &str| {
        SummaryRow::new(format!("{name} ({} trials)", stats.n), format!("{stats:.4} {unit}"), "")
    };
    Ok(match scenario {
        Scenario::Curves => vec![experiments::run_stiffness_curves(&cfg.plant.vsm).report()],
        Scenario::Calibrate => {
            vec![experiments::run_calibration(&setup, &experiments::default_sweep())?.report()]
        }
        Scenario::Regulate => {
            let amplitude = mm(30.0);
            let mut report = experiments::run_stiffness_regulation(&setup, amplitude)?.report();
            let stats = run_trials(&setup, |s| {
                let r = experiments::run_stiffness_regulation(s, amplitude)?;
                Ok(vec![to_mm(r.rms_error), r.rise_time.unwrap_or(f64::NAN)])
            })?;
            report.rows.push(trial_row("l_s sine RMS error", stats[0], "mm"));
            report.rows.push(trial_row("l_s step 90% rise", stats[1], "s"));
            vec![report]
        }
        Scenario::Torque => {
            let tag = format!("torque_{}", mixing_name(cfg.controller.mixing));
            let mut reports = Vec::new();
            for preset in [StiffnessPreset::Low, StiffnessPreset::High] {
                let mut report = experiments::run_torque_control(&setup, preset, TORQUE_AMPLITUDE)?.report(&tag);
                let stats = run_trials(&setup, |s| {
                    let r = experiments::run_torque_control(s, preset, TORQUE_AMPLITUDE)?;
                    Ok(vec![
                        r.rms_error,
                        r.rise_time.unwrap_or(f64::NAN),
                        r.fall_time.unwrap_or(f64::NAN),
                    ])
                })?;
                report.rows.push(trial_row("sine RMS error", stats[0], "N·m"));
                report.rows.push(trial_row("step 90% rise", stats[1], "s"));
                report.rows.push(trial_row("step 90% fall", stats[2], "s"));
                reports.push(report);
            }
            reports
        }
        Scenario::Decouple => vec![experiments::run_decoupling_comparison(&setup, cfg.baseline)?.report()],
        Scenario::Loadshare => {
            let ratio = cfg.plant.dtm.ring_radius / cfg.plant.dtm.sun_radius;
            vec![experiments::run_load_sharing(&setup)?.report(ratio)]
        }
    })
}

fn write_report(r: &Report, dir: &Path, format: Format) -> Result<(), CliError> {
    let write = |name: String, body: String| {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|source| CliError::Io { path, source })
    };
    if format.csv() {
        for (name, trace) in &r.traces {
            write(format!("{name}.csv"), trace.to_csv())?;
        }
        for (name, table) in &r.tables {
            write(format!("{name}.csv"), table.to_csv())?;
        }
    }
    if format.svg() {
        for (name, chart) in &r.charts {
            write(format!("{name}.svg"), chart.render())?;
        }
    }
    Ok(())
}

/// Plain-text summary table of `reports`.
pub fn summary_text(cfg: &Config, reports: &[Report]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "mixing: {}  friction: {}  dt: {} s  trials: {}  seed: {}",
        mixing_name(cfg.controller.mixing),
        if cfg.plant.friction.enabled { "on" } else { "off" },
        cfg.dt,
        cfg.trials,
        cfg.seed
    );
    let w_metric = reports
        .iter()
        .flat_map(|r| r.rows.iter().map(|row| row.metric.chars().count()))
        .max()
        .unwrap_or(0);
    let w_value = reports
        .iter()
        .flat_map(|r| r.rows.iter().map(|row| row.value.chars().count()))
        .max()
        .unwrap_or(0);
    for r in reports {
        let _ = writeln!(s, "\n[{}]", r.scenario);
        for row in &r.rows {
            let pad_m = w_metric - row.metric.chars().count();
            let pad_v = w_value - row.value.chars().count();
            let line = format!(
                "  {}{}  {}{}  {}",
                row.metric,
                " ".repeat(pad_m),
                row.value,
                " ".repeat(pad_v),
                row.reference
            );
            let _ = writeln!(s, "{}", line.trim_end());
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(args: &[&str]) -> Opts {
        let mut v = vec!["vsa-lab", "curves"];
        v.extend_from_slice(args);
        Cli::try_parse_from(v).unwrap().opts
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(cli_main(["vsa-lab"]), 2);
        assert_eq!(cli_main(["vsa-lab", "frobnicate"]), 2);
        assert_eq!(cli_main(["vsa-lab", "torque", "--mode", "sideways"]), 2);
        assert_eq!(cli_main(["vsa-lab", "curves", "--config", "/nonexistent/cfg.json"]), 2);
    }

    #[test]
    fn overrides_apply() {
        let cfg = resolve_config(&opts(&["--mode", "paper-literal", "--friction", "on"])).unwrap();
        assert_eq!(cfg.controller.mixing, MixingMode::PaperLiteral);
        assert!(cfg.plant.friction.enabled);
    }

    #[test]
    fn out_flag_wins_over_config() {
        let mut cfg = Config::default();
        cfg.output_dir = Some("from-config".into());
        assert_eq!(output_dir(&opts(&["--out", "flag"]), &cfg), PathBuf::from("flag"));
        assert_eq!(output_dir(&opts(&[]), &cfg), PathBuf::from("from-config"));
    }

    #[test]
    fn summary_lists_every_row() {
        let cfg = Config::default();
        let reports = run_scenario(Scenario::Curves, &cfg).unwrap();
        let text = summary_text(&cfg, &reports);
        assert!(text.contains("[curves]"));
        assert_eq!(text.lines().filter(|l| l.starts_with("  ")).count(), reports[0].rows.len());
    }
}
