use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;

use super::{apply_pulse, rabi_coupling, IonState, PulseKind, PulseSchedule, PulseSpec, TrapConfig};
use crate::error::{KerrError, Result};
use crate::fock::FockVector;

/// Below this magnitude the amplitude to be moved counts as already empty.
const EMPTY_AMPLITUDE: f64 = 1e-15;

/// Solves the one pulse of `kind` whose forward action maps a pair with
/// `source` emptied onto the observed `(source, dest)` amplitudes.
///
/// Undoing it empties `source` into `dest`. The rotation angle is the
/// principal one in `[0, π/2]`; a negative coupling flips the phase by π.
fn solve_step(
    kind: PulseKind,
    level: usize,
    source: C64,
    dest: C64,
    cfg: &TrapConfig,
) -> Result<(f64, f64)> {
    if source.norm() <= EMPTY_AMPLITUDE {
        return Ok((0.0, 0.0));
    }
    let theta = source.norm().atan2(dest.norm());
    // with dest empty the step is a full transfer and any phase works
    let mut phase = if dest.norm() <= EMPTY_AMPLITUDE {
        0.0
    } else {
        match kind {
            PulseKind::RedSideband => dest.arg() - source.arg() - FRAC_PI_2,
            PulseKind::Carrier => source.arg() - dest.arg() + FRAC_PI_2,
        }
    };
    let coupling = rabi_coupling(cfg, level, kind)?;
    if coupling == 0.0 {
        return Err(KerrError::VanishingCoupling { kind: kind.as_str(), level });
    }
    if coupling < 0.0 {
        phase += std::f64::consts::PI;
    }
    Ok((phase, 2.0 * theta / coupling.abs()))
}

/// Compiles `target ⊗ |g⟩` into the alternating sequence
/// `C_0, R_1, C_1, …, C_{M−1}, R_M` acting on `|0, g⟩`.
///
/// Works downward from the highest occupied level `M`: undoing `R_k` moves
/// `|k,g⟩` into `|k−1,e⟩`, undoing `C_{k−1}` moves `|k−1,e⟩` into
/// `|k−1,g⟩`. Each step is a single 2×2 rotation on a pair that nothing
/// else feeds, so the result is exact. Always returns `2M` pulses; steps with
/// nothing to move become zero-duration pulses.
pub fn synthesize(target: &FockVector, cfg: &TrapConfig) -> Result<PulseSchedule> {
    cfg.validate()?;
    let norm = target.norm_sqr();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(KerrError::InvalidParameter(format!("target norm² {norm} is not 1")));
    }
    let Some(top) = target.highest_occupied(0.0) else {
        return Err(KerrError::InvalidParameter("target is the zero vector".into()));
    };
    if top > cfg.m_max {
        return Err(KerrError::SupportExceedsTrapLimit { level: top, m_max: cfg.m_max });
    }
    let dim = top + 1;
    let mut state = IonState::in_ground(target.resized(dim)?);
    let mut backwards = Vec::with_capacity(2 * top);
    let mut elapsed = 0.0;

    for k in (1..=top).rev() {
        for (kind, level) in [(PulseKind::RedSideband, k), (PulseKind::Carrier, k - 1)] {
            let (source, dest) = match kind {
                PulseKind::RedSideband => (state.g.get(k), state.e.get(k - 1)),
                PulseKind::Carrier => (state.e.get(k - 1), state.g.get(k - 1)),
            };
            let (phase, duration) = solve_step(kind, level, source, dest, cfg)?;
            elapsed += duration;
            if elapsed > cfg.vib_coherence {
                return Err(KerrError::CoherenceBudgetExceeded { total: elapsed, limit: cfg.vib_coherence });
            }
            let pulse = PulseSpec { kind, phase, duration, rabi: cfg.rabi(kind), index: 0, level };
            state = apply_pulse(&state, &pulse.inverse(), cfg)?;
            backwards.push(pulse);
        }
    }

    let pulses = backwards
        .into_iter()
        .rev()
        .enumerate()
        .map(|(index, p)| PulseSpec { index, ..p })
        .collect();
    Ok(PulseSchedule::new(pulses))
}
