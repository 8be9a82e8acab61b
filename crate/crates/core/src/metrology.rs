//! Weak-force sensing with a cat state: displacement by `iε`, a Ramsey
//! sequence around a parity-controlled rotation, and excited-state readout.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::fock::{coherent_state, default_dim, displace, FockVector};
use crate::pulse::IonState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakForceSetup {
    /// Real cat amplitude.
    pub alpha: f64,
    /// Displacement `ε` produced by the force.
    pub epsilon: f64,
    /// Fock cutoff.
    pub dim: usize,
}

impl WeakForceSetup {
    /// Setup with a cutoff wide enough for the cat and its displacement.
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        let dim = default_dim(alpha) + (8.0 * epsilon.abs()).ceil() as usize + 4;
        let s = Self { alpha, epsilon, dim };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(KerrError::InvalidParameter(format!("alpha {} must be positive", self.alpha)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(KerrError::InvalidParameter(format!("epsilon {} must be non-negative", self.epsilon)));
        }
        Ok(())
    }

    /// The small-displacement picture needs `ε ≪ α`; true once `ε > α/10`.
    pub fn outside_small_epsilon(&self) -> bool {
        self.epsilon > self.alpha / 10.0
    }
}

/// Which electronic level the final measurement counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutPort {
    #[default]
    Excited,
    Ground,
}

/// `(e^{iπ/4}|α⟩ + e^{−iπ/4}|−α⟩)/√2`, renormalized inside the cutoff.
pub fn cat_state(alpha: f64, dim: usize) -> Result<FockVector> {
    let plus = coherent_state(C64::new(alpha, 0.0), dim)?;
    let minus = coherent_state(C64::new(-alpha, 0.0), dim)?;
    let cat = plus
        .scale(C64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4))
        .add(&minus.scale(C64::from_polar(FRAC_1_SQRT_2, -FRAC_PI_4)));
    Ok(cat.normalize())
}

/// `(|g⟩, |e⟩) → ((|g⟩ + |e⟩)/√2, (−|g⟩ + |e⟩)/√2)`.
fn half_rotation(state: &IonState) -> IonState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let g = state.g.clone().scale(h).add(&state.e.clone().scale(-h));
    let e = state.g.clone().scale(h).add(&state.e.clone().scale(h));
    IonState { g, e }
}

/// `e^{−iπ n σ_z/2}` with `σ_z|e⟩ = |e⟩`: the relative operator between the
/// branches is the parity `e^{−iπn}`.
fn controlled_parity(state: &IonState) -> IonState {
    let phase = |v: &FockVector, sign: f64| {
        let amps = v
            .amps()
            .iter()
            .enumerate()
            .map(|(n, c)| c * C64::from_polar(1.0, sign * FRAC_PI_2 * n as f64))
            .collect();
        FockVector::new(amps).expect("nonempty")
    };
    IonState { g: phase(&state.g, 1.0), e: phase(&state.e, -1.0) }
}

/// Full simulation of the protocol on `cat ⊗ |g⟩`, read out at `port`.
pub fn protocol_exact_at(setup: &WeakForceSetup, port: ReadoutPort) -> Result<f64> {
    setup.validate()?;
    let cat = cat_state(setup.alpha, setup.dim)?;
    let pushed = displace(&cat, C64::new(0.0, setup.epsilon))?;
    let state = half_rotation(&controlled_parity(&half_rotation(&IonState::in_ground(pushed))));
    let p = match port {
        ReadoutPort::Excited => state.e.norm_sqr(),
        ReadoutPort::Ground => state.g.norm_sqr(),
    };
    Ok((p / state.norm_sqr()).clamp(0.0, 1.0))
}

/// Excited-state probability after the protocol.
pub fn protocol_exact(setup: &WeakForceSetup) -> Result<f64> {
    protocol_exact_at(setup, ReadoutPort::Excited)
}

/// Small-`ε` readout `½(1 − sin 2αε)`.
pub fn p_plus_approx(alpha: f64, epsilon: f64) -> f64 {
    0.5 * (1.0 - (2.0 * alpha * epsilon).sin())
}

/// `(1/(2α), π/(4α))`: the bound beating the standard limit and the one-fringe shift.
pub fn epsilon_min(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(KerrError::InvalidParameter(format!("alpha {alpha} must be positive")));
    }
    Ok((1.0 / (2.0 * alpha), PI / (4.0 * alpha)))
}

/// Slope `dP₊/dε = −α cos 2αε` of the small-`ε` readout.
pub fn sensitivity(alpha: f64, epsilon: f64) -> f64 {
    -alpha * (2.0 * alpha * epsilon).cos()
}

/// `1 − F` between `D(iε)|ψ_i⟩` and `cos(π/4+αε)|+⟩ + i sin(π/4+αε)|−⟩`,
/// with `|±⟩ = (|α⟩ ± |−α⟩)/√2`.
pub fn rotated_state_check(setup: &WeakForceSetup) -> Result<f64> {
    setup.validate()?;
    let a = coherent_state(C64::new(setup.alpha, 0.0), setup.dim)?;
    let b = coherent_state(C64::new(-setup.alpha, 0.0), setup.dim)?;
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let even = a.add(&b).scale(h);
    let odd = a.add(&b.scale(-C64::new(1.0, 0.0))).scale(h);
    let angle = FRAC_PI_4 + setup.alpha * setup.epsilon;
    let approx = even
        .scale(C64::new(angle.cos(), 0.0))
        .add(&odd.scale(C64::new(0.0, angle.sin())))
        .normalize();
    let exact = displace(&cat_state(setup.alpha, setup.dim)?, C64::new(0.0, setup.epsilon))?;
    Ok((1.0 - exact.fidelity(&approx)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `½(1 + e^{−2ε²}(e^{−2α²} − sin 4αε))`, from coherent-state overlaps.
    fn readout_oracle(alpha: f64, eps: f64) -> f64 {
        0.5 * (1.0 + (-2.0 * eps * eps).exp() * ((-2.0 * alpha * alpha).exp() - (4.0 * alpha * eps).sin()))
    }

    #[test]
    fn cat_parity_weights() {
        let alpha = 2.0;
        let dim = default_dim(alpha);
        let cat = cat_state(alpha, dim).unwrap();
        let a = coherent_state(C64::new(alpha, 0.0), dim).unwrap();
        let b = coherent_state(C64::new(-alpha, 0.0), dim).unwrap();
        let even = a.add(&b).normalize();
        let odd = a.add(&b.scale(C64::new(-1.0, 0.0))).normalize();
        let pe = even.overlap(&cat).norm_sqr();
        let po = odd.overlap(&cat).norm_sqr();
        assert!((pe + po - 1.0).abs() < 1e-12);
        // even weight from the amplitudes directly
        let even_mass: f64 = cat.amps().iter().step_by(2).map(|c| c.norm_sqr()).sum();
        assert!((pe - even_mass).abs() < 1e-12);
    }

    #[test]
    fn cat_degenerate_and_large() {
        let vac = cat_state(1e-12, 5).unwrap();
        assert!((vac.get(0).norm() - 1.0).abs() < 1e-12);
        let big = cat_state(6.0, default_dim(6.0)).unwrap();
        let a = coherent_state(C64::new(6.0, 0.0), default_dim(6.0)).unwrap();
        assert!((a.overlap(&big).norm() - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn protocol_against_overlap_oracle() {
        for (alpha, eps) in [(2.0, 0.0), (2.0, 0.01), (2.0, PI / 16.0), (1.3, 0.07), (3.0, 0.2)] {
            let setup = WeakForceSetup::new(alpha, eps).unwrap();
            let got = protocol_exact(&setup).unwrap();
            assert!((got - readout_oracle(alpha, eps)).abs() < 1e-10, "{alpha} {eps}: {got}");
            let other = protocol_exact_at(&setup, ReadoutPort::Ground).unwrap();
            assert!((got + other - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn parity_states_survive_controlled_rotation() {
        let dim = 20;
        let a = coherent_state(C64::new(1.5, 0.0), dim).unwrap();
        let b = coherent_state(C64::new(-1.5, 0.0), dim).unwrap();
        for sign in [1.0, -1.0] {
            let cat = a.add(&b.clone().scale(C64::new(sign, 0.0))).normalize();
            let out = controlled_parity(&IonState { g: cat.clone(), e: cat.clone() });
            // branch-relative operator is the parity, eigenvalue ±1 on the cats
            let rel = out.g.overlap(&out.e);
            assert!((rel - C64::new(sign, 0.0)).norm() < 1e-12, "{rel}");
        }
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(p_plus_approx(2.0, 0.0), 0.5);
        assert!(p_plus_approx(2.0, PI / 8.0).abs() < 1e-15);
        assert!((p_plus_approx(2.0, 0.25) - 0.5 * (1.0 - 1f64.sin())).abs() < 1e-15);
        assert!((p_plus_approx(2.0, 0.25) - 0.0793).abs() < 1e-4);
        assert_eq!(epsilon_min(2.0).unwrap(), (0.25, PI / 8.0));
        assert_eq!(epsilon_min(1.0).unwrap(), (0.5, PI / 4.0));
        assert!(epsilon_min(0.0).is_err());
        assert_eq!(sensitivity(2.0, 0.0), -2.0);
    }

    #[test]
    fn rotated_state_defect() {
        let zero = WeakForceSetup::new(2.0, 0.0).unwrap();
        assert!(rotated_state_check(&zero).unwrap() <= 1e-10);
        let small = WeakForceSetup::new(2.0, 0.01).unwrap();
        assert!(rotated_state_check(&small).unwrap() <= 1e-3);
        let mut last = 0.0;
        for k in 1..=10 {
            let d = rotated_state_check(&WeakForceSetup::new(2.0, 0.02 * k as f64).unwrap()).unwrap();
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn setup_checks() {
        assert!(WeakForceSetup::new(0.0, 0.1).is_err());
        assert!(WeakForceSetup::new(2.0, -0.1).is_err());
        assert!(WeakForceSetup::new(2.0, 0.3).unwrap().outside_small_epsilon());
        assert!(!WeakForceSetup::new(2.0, 0.1).unwrap().outside_small_epsilon());
    }
}
