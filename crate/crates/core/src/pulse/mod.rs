//! Carrier / red-sideband pulse sequences acting on the ion's electronic and
//! motional state: couplings, forward simulation, inverse synthesis of a
//! target motional superposition, and coherence-budget checks.
//!
//! Rabi rates are angular frequencies in rad/s and durations are seconds. A
//! pulse of phase `φ` and duration `t` on a pair with coupling `Ω_n` applies,
//! in the `(excited, ground)` basis,
//!
//! ```text
//!  ⎡ cos θ            −i e^{iφ} sin θ ⎤
//!  ⎣ −i e^{−iφ} sin θ  cos θ          ⎦     θ = Ω_n t / 2
//! ```
//!
//! i.e. the phase enters as `e^{iφ}` on the raising part of the coupling.

mod synth;

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::fock::{ln_factorial, FockVector};
use crate::wigner::laguerre_assoc;

pub use synth::synthesize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    /// `|n,g⟩ ↔ |n,e⟩`
    Carrier,
    /// `|n,g⟩ ↔ |n−1,e⟩`
    RedSideband,
}

impl PulseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PulseKind::Carrier => "carrier",
            PulseKind::RedSideband => "red_sideband",
        }
    }
}

impl fmt::Display for PulseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One square laser pulse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub kind: PulseKind,
    /// Phase in radians, not reduced.
    pub phase: f64,
    /// Duration in seconds.
    pub duration: f64,
    /// Bare Rabi rate in rad/s.
    pub rabi: f64,
    /// Position in the sequence.
    pub index: usize,
    /// Motional label `j` of `C_j` / `R_j`.
    pub level: usize,
}

impl PulseSpec {
    /// Phase reduced into `(−π, π]`.
    pub fn reduced_phase(&self) -> f64 {
        let p = self.phase.rem_euclid(std::f64::consts::TAU);
        if p > std::f64::consts::PI {
            p - std::f64::consts::TAU
        } else {
            p
        }
    }

    /// The pulse that undoes this one.
    pub fn inverse(&self) -> PulseSpec {
        PulseSpec { phase: self.phase + std::f64::consts::PI, ..*self }
    }

    pub fn label(&self) -> String {
        match self.kind {
            PulseKind::Carrier => format!("C{}", self.level),
            PulseKind::RedSideband => format!("R{}", self.level),
        }
    }
}

/// Ordered pulses, first applied first.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub pulses: Vec<PulseSpec>,
}

impl PulseSchedule {
    pub fn new(pulses: Vec<PulseSpec>) -> Self {
        Self { pulses }
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration).sum()
    }

    pub fn longest_pulse(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration).fold(0.0, f64::max)
    }

    pub fn red_count(&self) -> usize {
        self.pulses.iter().filter(|p| p.kind == PulseKind::RedSideband).count()
    }

    /// Reversed sequence of inverse pulses; undoes `self`.
    pub fn inverse(&self) -> PulseSchedule {
        let pulses = self
            .pulses
            .iter()
            .rev()
            .enumerate()
            .map(|(i, p)| PulseSpec { index: i, ..p.inverse() })
            .collect();
        PulseSchedule { pulses }
    }
}

/// Trap and laser parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Carrier Rabi rate, rad/s.
    pub omega_c: f64,
    /// Red-sideband Rabi rate, rad/s.
    pub omega_r: f64,
    /// Lamb-Dicke parameter.
    pub eta: f64,
    /// Vibrational coherence time, s.
    pub vib_coherence: f64,
    /// Electronic coherence time, s.
    pub elec_coherence: f64,
    /// Highest motional level the trap holds.
    pub m_max: usize,
}

impl Default for TrapConfig {
    fn default() -> Self {
        Self {
            omega_c: 1e6,
            omega_r: 1e5,
            eta: 0.02,
            vib_coherence: 190e-3,
            elec_coherence: 1.4e-3,
            m_max: 17,
        }
    }
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(KerrError::InvalidParameter(format!("eta {} not in (0, 1)", self.eta)));
        }
        if !(self.omega_c > 0.0 && self.omega_r > 0.0) {
            return Err(KerrError::InvalidParameter("Rabi rates must be positive".into()));
        }
        if self.m_max < 1 {
            return Err(KerrError::InvalidParameter("m_max must be at least 1".into()));
        }
        if !(self.vib_coherence > 0.0 && self.elec_coherence > 0.0) {
            return Err(KerrError::InvalidParameter("coherence times must be positive".into()));
        }
        Ok(())
    }

    pub fn rabi(&self, kind: PulseKind) -> f64 {
        match kind {
            PulseKind::Carrier => self.omega_c,
            PulseKind::RedSideband => self.omega_r,
        }
    }
}

/// Effective two-level coupling at motional level `n`:
/// `Ω e^{−η²/2} η^{|Δn|} √(n_<!/n_>!) L_{n_<}^{|Δn|}(η²)`.
///
/// For the red sideband `n` labels the upper phonon number (`|n,g⟩ ↔ |n−1,e⟩`).
pub fn rabi_coupling(cfg: &TrapConfig, n: usize, kind: PulseKind) -> Result<f64> {
    let eta2 = cfg.eta * cfg.eta;
    let env = (-0.5 * eta2).exp();
    match kind {
        PulseKind::Carrier => Ok(cfg.omega_c * env * laguerre_assoc(n, 0, eta2)),
        PulseKind::RedSideband => {
            if n == 0 {
                return Err(KerrError::NoLowerLevel);
            }
            let ratio = (0.5 * (ln_factorial(n - 1) - ln_factorial(n))).exp();
            Ok(cfg.omega_r * env * cfg.eta * ratio * laguerre_assoc(n - 1, 1, eta2))
        }
    }
}

/// Electronic ⊗ motional state: `|ψ_g⟩|g⟩ + |ψ_e⟩|e⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IonState {
    pub g: FockVector,
    pub e: FockVector,
}

impl IonState {
    pub fn new(g: FockVector, e: FockVector) -> Result<Self> {
        if g.dim() != e.dim() {
            return Err(KerrError::DimensionMismatch(g.dim(), e.dim()));
        }
        Ok(Self { g, e })
    }

    /// `|0, g⟩`.
    pub fn ground(dim: usize) -> Result<Self> {
        Self::new(FockVector::vacuum(dim)?, FockVector::zeros(dim)?)
    }

    /// `|ψ⟩|g⟩`.
    pub fn in_ground(motion: FockVector) -> Self {
        let e = FockVector::zeros(motion.dim()).expect("nonempty");
        Self { g: motion, e }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.g.norm_sqr() + self.e.norm_sqr()
    }

    pub fn excited_population(&self) -> f64 {
        self.e.norm_sqr()
    }

    /// `|⟨target, g|self⟩|²`, normalized by both norms.
    pub fn fidelity_with_ground(&self, target: &FockVector) -> f64 {
        let denom = self.norm_sqr() * target.norm_sqr();
        if denom == 0.0 {
            return 0.0;
        }
        target.overlap(&self.g).norm_sqr() / denom
    }

    /// Phonon-number distribution summed over both electronic branches.
    pub fn phonon_distribution(&self) -> Vec<f64> {
        self.g
            .amps()
            .iter()
            .zip(self.e.amps())
            .map(|(g, e)| g.norm_sqr() + e.norm_sqr())
            .collect()
    }
}

fn rotate(theta: f64, phase: f64, e: C64, g: C64) -> (C64, C64) {
    let (s, c) = theta.sin_cos();
    let raise = C64::new(0.0, -1.0) * C64::from_polar(s, phase);
    let lower = C64::new(0.0, -1.0) * C64::from_polar(s, -phase);
    (e * c + raise * g, lower * e + g * c)
}

/// Applies one pulse to every coupled pair of `state`.
pub fn apply_pulse(state: &IonState, pulse: &PulseSpec, cfg: &TrapConfig) -> Result<IonState> {
    if pulse.duration == 0.0 {
        return Ok(state.clone());
    }
    // the pulse carries its own bare Rabi rate
    let cfg = TrapConfig { omega_c: pulse.rabi, omega_r: pulse.rabi, ..*cfg };
    let (gs, es) = (state.g.amps(), state.e.amps());
    let mut g = gs.to_vec();
    let mut e = es.to_vec();
    match pulse.kind {
        PulseKind::Carrier => {
            for n in 0..state.dim() {
                let theta = 0.5 * rabi_coupling(&cfg, n, PulseKind::Carrier)? * pulse.duration;
                (e[n], g[n]) = rotate(theta, pulse.phase, es[n], gs[n]);
            }
        }
        PulseKind::RedSideband => {
            for n in 1..state.dim() {
                let theta = 0.5 * rabi_coupling(&cfg, n, PulseKind::RedSideband)? * pulse.duration;
                (e[n - 1], g[n]) = rotate(theta, pulse.phase, es[n - 1], gs[n]);
            }
        }
    }
    IonState::new(FockVector::new(g)?, FockVector::new(e)?)
}

/// Applies `schedule` to `initial`, first pulse first.
pub fn run_schedule(initial: &IonState, schedule: &PulseSchedule, cfg: &TrapConfig) -> Result<IonState> {
    schedule
        .pulses
        .iter()
        .try_fold(initial.clone(), |s, p| apply_pulse(&s, p, cfg))
}

/// Applies `schedule` to `|0, g⟩` in a cutoff one above the highest reachable level.
pub fn simulate_schedule(schedule: &PulseSchedule, cfg: &TrapConfig) -> Result<IonState> {
    run_schedule(&IonState::ground(schedule.red_count() + 1)?, schedule, cfg)
}

/// Timing and trap-limit check of a schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub total_time: f64,
    pub longest_pulse: f64,
    pub vib_coherence: f64,
    /// Total time within the vibrational coherence.
    pub vib_ok: bool,
    pub elec_coherence: f64,
    /// Every single pulse within the electronic coherence.
    pub elec_ok: bool,
    pub max_level: usize,
    pub m_max: usize,
    pub level_ok: bool,
}

impl BudgetReport {
    pub fn all_ok(&self) -> bool {
        self.vib_ok && self.elec_ok && self.level_ok
    }
}

pub fn budget_check(schedule: &PulseSchedule, cfg: &TrapConfig) -> BudgetReport {
    let total_time = schedule.total_duration();
    let longest_pulse = schedule.longest_pulse();
    let max_level = schedule.red_count();
    BudgetReport {
        total_time,
        longest_pulse,
        vib_coherence: cfg.vib_coherence,
        vib_ok: total_time <= cfg.vib_coherence,
        elec_coherence: cfg.elec_coherence,
        elec_ok: longest_pulse <= cfg.elec_coherence,
        max_level,
        m_max: cfg.m_max,
        level_ok: max_level <= cfg.m_max,
    }
}
