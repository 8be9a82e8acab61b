mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Angle, CutRange, RateUnit, Settings};

/// Kerr-state tables, Wigner fields, pulse schedules and sweeps.
#[derive(Debug, Parser)]
#[command(name = "kerr-forge", version, about)]
struct Cli {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, env = "KERR_FORGE_CONFIG", global = true)]
    config: Option<PathBuf>,
    /// Directory for output files [config: out_dir, default: .]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// csv or json [config: format, default: csv]
    #[arg(long, global = true)]
    format: Option<commands::Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Isoline, agreement and error tables of truncated Kerr states.
    Tables {
        #[arg(long)]
        alpha: Option<f64>,
        /// Kerr parameter; accepts `pi` forms such as `2pi` [default: 2pi]
        #[arg(long)]
        tau: Option<Angle>,
        /// Truncations, e.g. `9..16` [default: 9..16]
        #[arg(long)]
        m: Option<CutRange>,
        /// Grid spacing [default: 0.04]
        #[arg(long)]
        step: Option<f64>,
        /// Half width of the square grid around α [default: 2]
        #[arg(long)]
        half: Option<f64>,
    },
    /// Wigner function of an exact or truncated Kerr state on a grid.
    Wigner {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        tau: Option<Angle>,
        /// Truncation M; the exact state when absent.
        #[arg(long)]
        m_cut: Option<usize>,
        #[arg(long)]
        step: Option<f64>,
        /// Half width of the square grid around the origin [default: |α| + 2]
        #[arg(long)]
        half: Option<f64>,
    },
    /// Carrier / red-sideband pulse schedule preparing a truncated Kerr state.
    Schedule {
        #[arg(long)]
        alpha: Option<f64>,
        /// [default: pi/2]
        #[arg(long)]
        tau: Option<Angle>,
        /// [default: 10]
        #[arg(long)]
        m_cut: Option<usize>,
        /// Carrier Rabi rate [default: 1e6]
        #[arg(long)]
        omega_c: Option<f64>,
        /// Red-sideband Rabi rate [default: 1e5]
        #[arg(long)]
        omega_r: Option<f64>,
        /// Unit of the Rabi rates: rad/s or hz [default: rad/s]
        #[arg(long)]
        rate_unit: Option<RateUnit>,
        #[arg(long)]
        eta: Option<f64>,
        /// Highest trapped level [default: 17]
        #[arg(long)]
        m_max: Option<usize>,
        /// Vibrational coherence time, s [default: 0.19]
        #[arg(long)]
        vib_coherence: Option<f64>,
        /// Electronic coherence time, s [default: 1.4e-3]
        #[arg(long)]
        elec_coherence: Option<f64>,
    },
    /// One-pulse durations against τ for several Lamb-Dicke parameters.
    Durations {
        /// Comma-separated η values [default: 0.1,0.3,0.02,0.03]
        #[arg(long, value_delimiter = ',')]
        etas: Option<Vec<f64>>,
        /// Rabi rate [default: 1e7]
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        rate_unit: Option<RateUnit>,
        /// Largest τ of the sweep [default: pi]
        #[arg(long)]
        tau_max: Option<Angle>,
        /// Sweep points [default: 101]
        #[arg(long)]
        points: Option<usize>,
        /// τ at which single durations are reported [default: pi/3]
        #[arg(long)]
        tau_mark: Option<Angle>,
    },
    /// Cat-state weak-force readout against the displacement ε.
    Weakforce {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        eps_min: Option<f64>,
        /// [default: 0.1]
        #[arg(long)]
        eps_max: Option<f64>,
        /// [default: 51]
        #[arg(long)]
        points: Option<usize>,
        /// excited or ground [default: excited]
        #[arg(long)]
        port: Option<commands::Port>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let out = commands::Output {
        dir: settings.pick("out_dir", cli.out_dir, PathBuf::from("."))?,
        format: settings.pick("format", cli.format, commands::Format::Csv)?,
    };
    let s = &settings;
    match cli.command {
        Command::Tables { alpha, tau, m, step, half } => commands::tables(
            &out,
            &commands::TablesArgs {
                alpha: s.pick("alpha", alpha, 2.0)?,
                tau: s.pick("tau", tau, Angle(std::f64::consts::TAU))?.0,
                m: s.pick("m", m, CutRange { lo: 9, hi: 16 })?,
                step: s.pick("step", step, 0.04)?,
                half: s.pick("half", half, 2.0)?,
            },
        ),
        Command::Wigner { alpha, tau, m_cut, step, half } => {
            let alpha = s.pick("alpha", alpha, 2.0)?;
            commands::wigner(
                &out,
                &commands::WignerArgs {
                    alpha,
                    tau: s.pick("tau", tau, Angle(std::f64::consts::TAU))?.0,
                    m_cut: s.pick_opt("m_cut", m_cut)?,
                    step: s.pick("step", step, 0.04)?,
                    half: s.pick("half", half, alpha.abs() + 2.0)?,
                },
            )
        }
        Command::Schedule {
            alpha,
            tau,
            m_cut,
            omega_c,
            omega_r,
            rate_unit,
            eta,
            m_max,
            vib_coherence,
            elec_coherence,
        } => {
            let unit = s.pick("rate_unit", rate_unit, RateUnit::RadPerSecond)?;
            let defaults = kerr_core::pulse::TrapConfig::default();
            commands::schedule(
                &out,
                &commands::ScheduleArgs {
                    alpha: s.pick("alpha", alpha, 2.0)?,
                    tau: s.pick("tau", tau, Angle(std::f64::consts::FRAC_PI_2))?.0,
                    m_cut: s.pick("m_cut", m_cut, 10)?,
                    trap: kerr_core::pulse::TrapConfig {
                        omega_c: unit.to_rad_per_s(s.pick("omega_c", omega_c, defaults.omega_c)?),
                        omega_r: unit.to_rad_per_s(s.pick("omega_r", omega_r, defaults.omega_r)?),
                        eta: s.pick("eta", eta, defaults.eta)?,
                        vib_coherence: s.pick("vib_coherence", vib_coherence, defaults.vib_coherence)?,
                        elec_coherence: s.pick("elec_coherence", elec_coherence, defaults.elec_coherence)?,
                        m_max: s.pick("m_max", m_max, defaults.m_max)?,
                    },
                },
            )
        }
        Command::Durations { etas, omega, rate_unit, tau_max, points, tau_mark } => {
            let unit = s.pick("rate_unit", rate_unit, RateUnit::RadPerSecond)?;
            commands::durations(
                &out,
                &commands::DurationsArgs {
                    etas: s.pick_list("etas", etas, &[0.1, 0.3, 0.02, 0.03])?,
                    omega: unit.to_rad_per_s(s.pick("omega", omega, 1e7)?),
                    tau_max: s.pick("tau_max", tau_max, Angle(std::f64::consts::PI))?.0,
                    points: s.pick("points", points, 101)?,
                    tau_mark: s.pick("tau_mark", tau_mark, Angle(std::f64::consts::FRAC_PI_3))?.0,
                },
            )
        }
        Command::Weakforce { alpha, eps_min, eps_max, points, port } => commands::weakforce(
            &out,
            &commands::WeakforceArgs {
                alpha: s.pick("alpha", alpha, 2.0)?,
                eps_min: s.pick("eps_min", eps_min, 0.0)?,
                eps_max: s.pick("eps_max", eps_max, 0.1)?,
                points: s.pick("points", points, 51)?,
                port: s.pick("port", port, commands::Port::default())?,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kerr-forge: {e:#}");
            ExitCode::FAILURE
        }
    }
}
