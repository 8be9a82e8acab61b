use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use kerr_core::fock::{default_dim, kerr_state, truncated_kerr_state, KerrParams};
use kerr_core::metrology::{
    epsilon_min, p_plus_approx, protocol_exact_at, sensitivity, ReadoutPort, WeakForceSetup,
};
use kerr_core::one_pulse::{is_long_pulse, pulse_duration, OnePulseConfig};
use kerr_core::pulse::{budget_check, synthesize, BudgetReport, PulseSchedule, TrapConfig};
use kerr_core::wigner::tables::{agreement_rows, criteria_sweep, error_rows, isoline_rows, Compared};
use kerr_core::wigner::{wigner_grid, CriteriaOptions, Region, WignerField};
use kerr_core::C64;
use serde::Serialize;

use crate::config::CutRange;
use crate::io::{field_csv, field_pgm, fmt_sig, Csv, OutputSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (use csv or json)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Port(pub ReadoutPort);

impl FromStr for Port {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "excited" | "e" => Ok(Port(ReadoutPort::Excited)),
            "ground" | "g" => Ok(Port(ReadoutPort::Ground)),
            other => Err(format!("unknown readout port `{other}` (use excited or ground)")),
        }
    }
}

pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
}

impl Output {
    fn commit(&self, files: OutputSet) -> Result<()> {
        for path in files.commit(&self.dir)? {
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).context("serializing JSON")?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

fn compared_cells(c: &Compared) -> [String; 2] {
    [fmt_sig(c.computed), opt_cell(c.reference)]
}

fn real_alpha(alpha: f64) -> C64 {
    C64::new(alpha, 0.0)
}

pub struct TablesArgs {
    pub alpha: f64,
    pub tau: f64,
    pub m: CutRange,
    pub step: f64,
    pub half: f64,
}

pub fn tables(out: &Output, args: &TablesArgs) -> Result<()> {
    let alpha = real_alpha(args.alpha);
    let options = CriteriaOptions::default();
    let region = Region::around(alpha, args.half);
    let reports = criteria_sweep(alpha, args.tau, args.m.lo..=args.m.hi, region, args.step, &options)?;
    let (iso, agr, err) = (isoline_rows(&reports), agreement_rows(&reports), error_rows(&reports));

    let mut files = OutputSet::default();
    match out.format {
        Format::Json => {
            files.add("isoline_table.json", json(&iso)?);
            files.add("agreement_table.json", json(&agr)?);
            files.add("error_table.json", json(&err)?);
        }
        Format::Csv => {
            let mut header = vec!["m".to_string()];
            for l in &options.levels {
                header.push(format!("ratio_{}", fmt_sig(*l)));
                header.push(format!("ref_{}", fmt_sig(*l)));
            }
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            for row in &iso {
                let mut cells = vec![row.m_cut.to_string()];
                row.ratios.iter().for_each(|(_, c)| cells.extend(compared_cells(c)));
                csv.push_raw(cells);
            }
            files.add("isoline_table.csv", csv.into_bytes());

            let mut header = vec!["m".to_string()];
            for p in &options.precisions {
                header.push(format!("percent_{}", fmt_sig(*p)));
                header.push(format!("ref_{}", fmt_sig(*p)));
            }
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            for row in &agr {
                let mut cells = vec![row.m_cut.to_string()];
                row.percent.iter().for_each(|(_, c)| cells.extend(compared_cells(c)));
                csv.push_raw(cells);
            }
            files.add("agreement_table.csv", csv.into_bytes());

            let mut csv = Csv::new(&["m", "avg_percent", "ref_avg_percent", "max_percent", "ref_max_percent"]);
            for row in &err {
                let mut cells = vec![row.m_cut.to_string()];
                cells.extend(compared_cells(&row.avg_percent));
                cells.extend(compared_cells(&row.max_percent));
                csv.push_raw(cells);
            }
            files.add("error_table.csv", csv.into_bytes());
        }
    }

    for (i, row) in iso.iter().enumerate() {
        let mut line = format!("M={:>2}", row.m_cut);
        for (l, c) in &row.ratios {
            line += &format!("  ratio@{l}: {}", fmt_sig(c.computed));
            if let Some(d) = c.delta() {
                line += &format!(" ({:+.3})", d);
            }
        }
        for (p, c) in &agr[i].percent {
            line += &format!("  agree@{p:e}: {}%", fmt_sig(c.computed));
        }
        line += &format!(
            "  err avg/max: {}% / {}%",
            fmt_sig(err[i].avg_percent.computed),
            fmt_sig(err[i].max_percent.computed)
        );
        println!("{line}");
    }
    out.commit(files)
}

pub struct WignerArgs {
    pub alpha: f64,
    pub tau: f64,
    pub m_cut: Option<usize>,
    pub step: f64,
    pub half: f64,
}

pub fn wigner_field(args: &WignerArgs) -> Result<WignerField> {
    let alpha = real_alpha(args.alpha);
    let base = default_dim(alpha.norm());
    let state = match args.m_cut {
        Some(m) => truncated_kerr_state(&KerrParams::truncated(alpha, args.tau, m), base.max(m + 1))?,
        None => kerr_state(alpha, args.tau, base)?,
    };
    Ok(wigner_grid(&state, Region::around(C64::new(0.0, 0.0), args.half), args.step)?)
}

pub fn wigner(out: &Output, args: &WignerArgs) -> Result<()> {
    let field = wigner_field(args)?;
    let mut files = OutputSet::default();
    match out.format {
        Format::Csv => files.add("wigner.csv", field_csv(&field)),
        Format::Json => files.add("wigner.json", json(&field)?),
    }
    files.add("wigner.pgm", field_pgm(&field));
    let (n_re, n_im) = field.shape();
    println!(
        "grid {n_re}x{n_im}, min {}, max {}, integral {}",
        fmt_sig(field.min()),
        fmt_sig(field.max()),
        fmt_sig(field.integral())
    );
    out.commit(files)
}

pub struct ScheduleArgs {
    pub alpha: f64,
    pub tau: f64,
    pub m_cut: usize,
    pub trap: TrapConfig,
}

#[derive(Serialize)]
struct ScheduleDoc<'a> {
    schedule: &'a PulseSchedule,
    budget: &'a BudgetReport,
}

pub fn schedule(out: &Output, args: &ScheduleArgs) -> Result<()> {
    let target =
        truncated_kerr_state(&KerrParams::truncated(real_alpha(args.alpha), args.tau, args.m_cut), args.m_cut + 1)?;
    let schedule = synthesize(&target, &args.trap)?;
    let budget = budget_check(&schedule, &args.trap);

    let mut files = OutputSet::default();
    match out.format {
        Format::Json => files.add("schedule.json", json(&ScheduleDoc { schedule: &schedule, budget: &budget })?),
        Format::Csv => {
            let mut csv = Csv::new(&["index", "kind", "label", "phase_rad", "duration_s"]);
            for p in &schedule.pulses {
                csv.push_raw([
                    p.index.to_string(),
                    p.kind.to_string(),
                    p.label(),
                    fmt_sig(p.reduced_phase()),
                    fmt_sig(p.duration),
                ]);
            }
            files.add("schedule.csv", csv.into_bytes());
            let mut csv = Csv::new(&["quantity", "value"]);
            let b = &budget;
            for (k, v) in [
                ("total_time_s", fmt_sig(b.total_time)),
                ("longest_pulse_s", fmt_sig(b.longest_pulse)),
                ("vib_coherence_s", fmt_sig(b.vib_coherence)),
                ("vib_ok", b.vib_ok.to_string()),
                ("elec_coherence_s", fmt_sig(b.elec_coherence)),
                ("elec_ok", b.elec_ok.to_string()),
                ("max_level", b.max_level.to_string()),
                ("m_max", b.m_max.to_string()),
                ("level_ok", b.level_ok.to_string()),
            ] {
                csv.push_raw([k.to_string(), v]);
            }
            files.add("budget.csv", csv.into_bytes());
        }
    }

    for p in &schedule.pulses {
        println!("{:>4}  phase {:>9} rad  {:>11} s", p.label(), fmt_sig(p.reduced_phase()), fmt_sig(p.duration));
    }
    println!(
        "{} pulses, total {} s (vibrational budget {}), longest {} s (electronic budget {}), top level {} (trap {})",
        schedule.len(),
        fmt_sig(budget.total_time),
        if budget.vib_ok { "ok" } else { "EXCEEDED" },
        fmt_sig(budget.longest_pulse),
        if budget.elec_ok { "ok" } else { "EXCEEDED" },
        budget.max_level,
        if budget.level_ok { "ok" } else { "EXCEEDED" },
    );
    out.commit(files)
}

pub struct DurationsArgs {
    pub etas: Vec<f64>,
    pub omega: f64,
    pub tau_max: f64,
    pub points: usize,
    pub tau_mark: f64,
}

#[derive(Serialize)]
struct DurationPoint {
    eta: f64,
    tau: f64,
    duration_s: f64,
    long_pulse: bool,
}

pub fn durations(out: &Output, args: &DurationsArgs) -> Result<()> {
    ensure!(args.points >= 2, "need at least 2 sweep points");
    ensure!(args.tau_max > 0.0, "tau_max must be positive");
    let configs = args
        .etas
        .iter()
        .map(|&eta| OnePulseConfig::new(args.omega, eta, C64::new(0.0, 0.0)))
        .collect::<kerr_core::Result<Vec<_>>>()?;
    let point = |cfg: &OnePulseConfig, tau: f64| {
        let t = pulse_duration(cfg, tau);
        DurationPoint { eta: cfg.eta, tau, duration_s: t, long_pulse: is_long_pulse(t) }
    };
    let mut curve = Vec::new();
    for cfg in &configs {
        for k in 0..args.points {
            curve.push(point(cfg, args.tau_max * k as f64 / (args.points - 1) as f64));
        }
    }
    let marks: Vec<DurationPoint> = configs.iter().map(|c| point(c, args.tau_mark)).collect();

    let mut files = OutputSet::default();
    match out.format {
        Format::Json => {
            files.add("durations.json", json(&curve)?);
            files.add("durations_mark.json", json(&marks)?);
        }
        Format::Csv => {
            for (name, rows) in [("durations.csv", &curve), ("durations_mark.csv", &marks)] {
                let mut csv = Csv::new(&["eta", "tau", "duration_s", "long_pulse"]);
                for r in rows.iter() {
                    csv.push_raw([fmt_sig(r.eta), fmt_sig(r.tau), fmt_sig(r.duration_s), r.long_pulse.to_string()]);
                }
                files.add(name, csv.into_bytes());
            }
        }
    }
    for m in &marks {
        println!(
            "eta {}: tau {} needs {} s{}",
            fmt_sig(m.eta),
            fmt_sig(m.tau),
            fmt_sig(m.duration_s),
            if m.long_pulse { "  (longer than 1 s)" } else { "" }
        );
    }
    out.commit(files)
}

pub struct WeakforceArgs {
    pub alpha: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub points: usize,
    pub port: Port,
}

#[derive(Serialize)]
struct ReadoutPoint {
    epsilon: f64,
    p_exact: f64,
    p_approx: f64,
    sensitivity: f64,
}

pub fn weakforce(out: &Output, args: &WeakforceArgs) -> Result<()> {
    ensure!(args.points >= 1, "need at least 1 sweep point");
    if !(args.eps_min >= 0.0 && args.eps_max >= args.eps_min) {
        bail!("need 0 <= eps_min <= eps_max");
    }
    let mut rows = Vec::with_capacity(args.points);
    let mut warned = false;
    for k in 0..args.points {
        let eps = if args.points == 1 {
            args.eps_min
        } else {
            args.eps_min + (args.eps_max - args.eps_min) * k as f64 / (args.points - 1) as f64
        };
        let setup = WeakForceSetup::new(args.alpha, eps)?;
        if setup.outside_small_epsilon() && !warned {
            eprintln!("warning: epsilon {} exceeds alpha/10; the small-epsilon form is unreliable there", fmt_sig(eps));
            warned = true;
        }
        rows.push(ReadoutPoint {
            epsilon: eps,
            p_exact: protocol_exact_at(&setup, args.port.0)?,
            p_approx: p_plus_approx(args.alpha, eps),
            sensitivity: sensitivity(args.alpha, eps),
        });
    }
    let mut files = OutputSet::default();
    match out.format {
        Format::Json => files.add("weakforce.json", json(&rows)?),
        Format::Csv => {
            let mut csv = Csv::new(&["epsilon", "p_exact", "p_approx", "dp_deps"]);
            for r in &rows {
                csv.push_raw([fmt_sig(r.epsilon), fmt_sig(r.p_exact), fmt_sig(r.p_approx), fmt_sig(r.sensitivity)]);
            }
            files.add("weakforce.csv", csv.into_bytes());
        }
    }
    let (sql, fringe) = epsilon_min(args.alpha)?;
    println!("epsilon_min: 1/(2 alpha) = {}, pi/(4 alpha) = {}", fmt_sig(sql), fmt_sig(fringe));
    out.commit(files)
}
