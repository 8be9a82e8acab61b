//! Truncated Fock-space states: coherent and Kerr states, truncation,
//! overlaps and displacement.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};

/// Tail mass a coherent state may leave beyond the cutoff.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-10;

/// Tail mass a state may carry in the guard band of a displacement.
pub const DISPLACEMENT_TAIL_LIMIT: f64 = 1e-8;

/// `ln(n!)` by cumulative summation of `ln k`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln(0!), ln(1!), ..., ln((len-1)!)`.
pub fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for k in 0..len {
        if k > 1 {
            acc += (k as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Default cutoff `⌈|α|² + 8|α| + 10⌉`.
pub fn default_dim(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 8.0 * alpha_abs + 10.0).ceil() as usize
}

/// Probability a coherent state of amplitude `alpha_abs` puts on levels `n >= dim`.
pub fn coherent_tail_mass(alpha_abs: f64, dim: usize) -> f64 {
    if alpha_abs == 0.0 {
        return if dim == 0 { 1.0 } else { 0.0 };
    }
    let x = alpha_abs * alpha_abs;
    let ln_x = x.ln();
    let mut log_term = -x + dim as f64 * ln_x - ln_factorial(dim);
    let mut tail = 0.0;
    let mut n = dim;
    // Poisson terms fall off geometrically once n > x
    loop {
        let term = log_term.exp();
        tail += term;
        n += 1;
        log_term += ln_x - (n as f64).ln();
        if (n as f64) > x && term < tail * 1e-17 {
            break;
        }
        if n > dim + 10_000 {
            break;
        }
    }
    tail
}

/// Complex amplitudes `c_0..c_{N-1}` over the Fock basis.
///
/// Amplitudes beyond `dim()` are implicitly zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(KerrError::EmptyState);
        }
        Ok(Self { amps })
    }

    /// `|n⟩` inside a cutoff `dim > n`.
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(KerrError::TruncationExceedsDim { m_cut: n, dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::basis(0, dim)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    /// Amplitude of `|n⟩`, zero past the cutoff.
    pub fn get(&self, n: usize) -> C64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm. A zero vector is returned unchanged.
    pub fn normalize(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            self.amps.iter_mut().for_each(|c| *c /= norm);
        }
        self
    }

    /// Highest level with a nonzero amplitude (`None` for the zero vector).
    pub fn highest_occupied(&self, tol: f64) -> Option<usize> {
        self.amps.iter().rposition(|c| c.norm() > tol)
    }

    /// Same state with the cutoff moved to `dim`; dropped amplitudes are discarded.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        let mut amps = self.amps.clone();
        amps.resize(dim, C64::new(0.0, 0.0));
        Self::new(amps)
    }

    /// `⟨self|other⟩`, treating the shorter vector as zero-padded.
    pub fn overlap(&self, other: &FockVector) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Phase-insensitive `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
    pub fn fidelity(&self, other: &FockVector) -> f64 {
        let denom = self.norm_sqr() * other.norm_sqr();
        if denom == 0.0 {
            return 0.0;
        }
        self.overlap(other).norm_sqr() / denom
    }

    /// Probability carried by levels `n >= from`.
    pub fn tail_mass(&self, from: usize) -> f64 {
        self.amps.iter().skip(from).map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(mut self, factor: C64) -> Self {
        self.amps.iter_mut().for_each(|c| *c *= factor);
        self
    }

    /// `self + other`, zero-padding to the larger cutoff.
    pub fn add(&self, other: &FockVector) -> FockVector {
        let dim = self.dim().max(other.dim());
        let amps = (0..dim).map(|n| self.get(n) + other.get(n)).collect();
        FockVector { amps }
    }

    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        let dim = self.dim().max(other.dim());
        (0..dim)
            .map(|n| (self.get(n) - other.get(n)).norm())
            .fold(0.0, f64::max)
    }
}

/// Amplitude, evolution parameter and optional truncation of a Kerr state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KerrParams {
    pub alpha: C64,
    pub tau: f64,
    pub m_cut: Option<usize>,
}

impl KerrParams {
    pub fn new(alpha: C64, tau: f64) -> Self {
        Self { alpha, tau, m_cut: None }
    }

    pub fn truncated(alpha: C64, tau: f64, m_cut: usize) -> Self {
        Self { alpha, tau, m_cut: Some(m_cut) }
    }
}

/// Unnormalized-prefactor-free amplitudes `α^n/√(n!)` for `n < len`, in log-polar form.
fn poisson_amplitudes(alpha: C64, len: usize) -> Vec<C64> {
    let r = alpha.norm();
    let phase = alpha.arg();
    let ln_fact = ln_factorials(len);
    (0..len)
        .map(|n| {
            if n == 0 {
                C64::new(1.0, 0.0)
            } else if r == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                let mag = (n as f64 * r.ln() - 0.5 * ln_fact[n]).exp();
                C64::from_polar(mag, n as f64 * phase)
            }
        })
        .collect()
}

/// Coherent state `|α⟩` truncated at `dim` and renormalized over the cutoff.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<FockVector> {
    if dim == 0 {
        return Err(KerrError::EmptyState);
    }
    let tail = coherent_tail_mass(alpha.norm(), dim);
    if tail >= COHERENT_TAIL_LIMIT {
        return Err(KerrError::CutoffTooSmall {
            alpha_abs: alpha.norm(),
            dim,
            tail,
            limit: COHERENT_TAIL_LIMIT,
        });
    }
    let prefactor = (-0.5 * alpha.norm_sqr()).exp();
    let amps = poisson_amplitudes(alpha, dim)
        .into_iter()
        .map(|c| c * prefactor)
        .collect();
    Ok(FockVector::new(amps)?.normalize())
}

/// Kerr phase `e^{iτ n(n-1)/2}` of level `n`.
pub fn kerr_phase(n: usize, tau: f64) -> C64 {
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    let tau = tau.rem_euclid(TAU);
    C64::from_polar(1.0, tau * pairs)
}

/// Multiplies each `c_n` by `e^{iτ n(n-1)/2}`.
pub fn apply_kerr_phase(state: &FockVector, tau: f64) -> FockVector {
    let amps = state
        .amps()
        .iter()
        .enumerate()
        .map(|(n, c)| c * kerr_phase(n, tau))
        .collect();
    FockVector { amps }
}

/// Untruncated Kerr state (coherent state with Kerr phases) inside the cutoff.
pub fn kerr_state(alpha: C64, tau: f64, dim: usize) -> Result<FockVector> {
    Ok(apply_kerr_phase(&coherent_state(alpha, dim)?, tau))
}

/// `S_M = Σ_{k=0}^{M} |α|^{2k}/k!`, returned as `ln S_M`.
fn ln_partial_sum(alpha_abs: f64, m_cut: usize) -> f64 {
    if alpha_abs == 0.0 {
        return 0.0;
    }
    let x = alpha_abs * alpha_abs;
    let ln_x = x.ln();
    let ln_fact = ln_factorials(m_cut + 1);
    let logs: Vec<f64> = (0..=m_cut).map(|k| k as f64 * ln_x - ln_fact[k]).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

/// Finite superposition with support `n ≤ M`, normalized by `S_M^{-1/2}`.
pub fn truncated_kerr_state(params: &KerrParams, dim: usize) -> Result<FockVector> {
    let m_cut = params.m_cut.ok_or(KerrError::MissingTruncation)?;
    if m_cut >= dim {
        return Err(KerrError::TruncationExceedsDim { m_cut, dim });
    }
    let norm = (-0.5 * ln_partial_sum(params.alpha.norm(), m_cut)).exp();
    let mut amps = poisson_amplitudes(params.alpha, m_cut + 1);
    for (n, c) in amps.iter_mut().enumerate() {
        *c *= norm * kerr_phase(n, params.tau);
    }
    amps.resize(dim, C64::new(0.0, 0.0));
    FockVector::new(amps)
}

/// Overlap figure `e^{-2|α|²} S_M²` as quoted for the truncated Kerr states.
pub fn fidelity_paper(alpha: C64, m_cut: usize) -> f64 {
    let x = alpha.norm_sqr();
    (2.0 * ln_partial_sum(alpha.norm(), m_cut) - 2.0 * x).exp().min(1.0)
}

/// `e^{-|α|²} S_M`: squared overlap of the exact Kerr state with the
/// *normalized* truncated state.
pub fn fidelity_normalized(alpha: C64, m_cut: usize) -> f64 {
    let x = alpha.norm_sqr();
    (ln_partial_sum(alpha.norm(), m_cut) - x).exp().min(1.0)
}

/// Generator `βa† − β*a` in the truncated basis.
fn displacement_generator(beta: C64, dim: usize) -> DMatrix<C64> {
    let mut gen = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for n in 1..dim {
        let s = (n as f64).sqrt();
        // ⟨n|a†|n-1⟩ = √n, ⟨n-1|a|n⟩ = √n
        gen[(n, n - 1)] += beta * s;
        gen[(n - 1, n)] -= beta.conj() * s;
    }
    gen
}

/// `D(β)|ψ⟩` by matrix exponential of the truncated generator.
///
/// The state must leave less than [`DISPLACEMENT_TAIL_LIMIT`] of its mass on
/// the top `⌈8|β|⌉` levels; otherwise the truncated exponential would reflect
/// probability off the cutoff.
pub fn displace(state: &FockVector, beta: C64) -> Result<FockVector> {
    if beta.norm() == 0.0 {
        return Ok(state.clone());
    }
    let dim = state.dim();
    let band = (8.0 * beta.norm()).ceil() as usize;
    if band >= dim {
        return Err(KerrError::DisplacementLeak { beta_abs: beta.norm(), tail: state.norm_sqr(), guard: 0 });
    }
    let guard = dim - band;
    let tail = state.tail_mass(guard);
    if tail >= DISPLACEMENT_TAIL_LIMIT {
        return Err(KerrError::DisplacementLeak { beta_abs: beta.norm(), tail, guard });
    }
    let op = displacement_generator(beta, dim).exp();
    let out = op * DVector::from_column_slice(state.amps());
    FockVector::new(out.iter().copied().collect())
}

/// Smallest and largest `n` whose untruncated Kerr coefficient satisfies `|w_n| ≥ threshold`.
pub fn significant_range(alpha: C64, threshold: f64) -> Result<(usize, usize)> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(KerrError::InvalidParameter(format!("threshold {threshold} not in (0, 1)")));
    }
    let r = alpha.norm();
    if r == 0.0 {
        return Ok((0, 0));
    }
    let len = 2 * default_dim(r) + 20;
    let ln_fact = ln_factorials(len);
    let ln_thr = threshold.ln();
    let hits: Vec<usize> = (0..len)
        .filter(|&n| -0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_fact[n] >= ln_thr)
        .collect();
    match (hits.first(), hits.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(KerrError::InvalidParameter(format!(
            "no coefficient reaches {threshold} for |alpha| = {r}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_from_zero_amplitude() {
        let s = coherent_state(c(0.0, 0.0), 8).unwrap();
        assert_eq!(s.get(0), c(1.0, 0.0));
        assert!(s.amps()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn coherent_ground_amplitude() {
        let s = coherent_state(c(2.0, 0.0), 40).unwrap();
        assert!((s.get(0).re - (-2.0f64).exp()).abs() < 1e-10);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_rejects_small_cutoff() {
        let err = coherent_state(c(3.0, 0.0), 10).unwrap_err();
        assert!(matches!(err, KerrError::CutoffTooSmall { .. }));
        assert!(coherent_state(c(3.0, 0.0), default_dim(3.0)).is_ok());
    }

    #[test]
    fn default_dim_meets_tail_bound() {
        for &a in &[0.0, 0.5, 1.0, 2.0, 3.5, 5.0] {
            assert!(coherent_tail_mass(a, default_dim(a)) < COHERENT_TAIL_LIMIT, "alpha {a}");
        }
    }

    #[test]
    fn kerr_identity_at_zero_and_two_pi() {
        let s = coherent_state(c(1.3, -0.4), 30).unwrap();
        assert!(apply_kerr_phase(&s, 0.0).max_abs_diff(&s) < 1e-15);
        assert!(apply_kerr_phase(&s, 2.0 * PI).max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn kerr_at_pi_is_cat() {
        let alpha = 2.0;
        let dim = default_dim(alpha);
        let kerr = kerr_state(c(alpha, 0.0), PI, dim).unwrap();
        let plus = coherent_state(c(0.0, alpha), dim).unwrap().scale(C64::from_polar(1.0, -FRAC_PI_4));
        let minus = coherent_state(c(0.0, -alpha), dim).unwrap().scale(C64::from_polar(1.0, FRAC_PI_4));
        let cat = plus.add(&minus);
        assert!(1.0 - kerr.fidelity(&cat) < 1e-12);
    }

    #[test]
    fn truncated_support() {
        let p = KerrParams::truncated(c(2.0, 0.0), 2.0 * PI, 16);
        let s = truncated_kerr_state(&p, 30).unwrap();
        assert_eq!(s.highest_occupied(0.0), Some(16));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_rejects_m_at_cutoff() {
        let p = KerrParams::truncated(c(2.0, 0.0), 0.0, 30);
        assert_eq!(
            truncated_kerr_state(&p, 30).unwrap_err(),
            KerrError::TruncationExceedsDim { m_cut: 30, dim: 30 }
        );
        let untruncated = KerrParams::new(c(2.0, 0.0), 0.0);
        assert_eq!(truncated_kerr_state(&untruncated, 30).unwrap_err(), KerrError::MissingTruncation);
    }

    #[test]
    fn truncated_converges_to_untruncated() {
        let dim = 60;
        let p = KerrParams::truncated(c(2.0, 0.0), 0.7, dim - 1);
        let trunc = truncated_kerr_state(&p, dim).unwrap();
        let full = kerr_state(c(2.0, 0.0), 0.7, dim).unwrap();
        let diff = trunc.add(&full.scale(c(-1.0, 0.0))).norm();
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn truncated_magnitudes_ignore_tau() {
        let a = truncated_kerr_state(&KerrParams::truncated(c(2.0, 0.0), 0.0, 10), 20).unwrap();
        let b = truncated_kerr_state(&KerrParams::truncated(c(2.0, 0.0), 1.234, 10), 20).unwrap();
        for n in 0..20 {
            assert!((a.get(n).norm() - b.get(n).norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn quoted_fidelities() {
        let a = c(2.0, 0.0);
        assert!((fidelity_paper(a, 9) - 0.9838).abs() < 5e-4);
        assert!((fidelity_paper(a, 10) - 0.9943).abs() < 5e-4);
        assert!((fidelity_paper(a, 14) - 0.9999).abs() < 5e-4);
        assert!((fidelity_paper(a, 80) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_fidelity_is_overlap_with_normalized_truncation() {
        let a = c(2.0, 0.0);
        for m in [3, 9, 12] {
            let trunc = truncated_kerr_state(&KerrParams::truncated(a, 0.4, m), 40).unwrap();
            let full = kerr_state(a, 0.4, 40).unwrap();
            assert!((trunc.fidelity(&full) - fidelity_normalized(a, m)).abs() < 1e-10);
        }
    }

    #[test]
    fn displaced_vacuum_is_coherent() {
        let beta = c(0.7, -1.1);
        let dim = 40;
        let d = displace(&FockVector::vacuum(dim).unwrap(), beta).unwrap();
        let coh = coherent_state(beta, dim).unwrap();
        assert!(d.max_abs_diff(&coh) < 1e-10);
    }

    #[test]
    fn displacement_adds_phase_and_shift() {
        // D(iε)|α⟩ = e^{i Im(iαε)} |α + iε⟩ for real α
        let (alpha, eps) = (1.5, 0.3);
        let dim = 40;
        let out = displace(&coherent_state(c(alpha, 0.0), dim).unwrap(), c(0.0, eps)).unwrap();
        let expected = coherent_state(c(alpha, eps), dim)
            .unwrap()
            .scale(C64::from_polar(1.0, (c(0.0, 1.0) * alpha * eps).im));
        assert!(out.max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn displacement_leak_rejected() {
        let s = FockVector::basis(18, 20).unwrap();
        assert!(matches!(displace(&s, c(0.5, 0.0)), Err(KerrError::DisplacementLeak { .. })));
    }

    #[test]
    fn displacement_matches_laguerre_matrix_elements() {
        use crate::wigner::laguerre_assoc;
        let beta = c(0.4, 0.9);
        let dim = 40;
        let lf = ln_factorials(dim);
        for n in 0..6 {
            let col = displace(&FockVector::basis(n, dim).unwrap(), beta).unwrap();
            for m in 0..12 {
                let x = beta.norm_sqr();
                let env = (-0.5 * x).exp();
                let expected = if m >= n {
                    let k = (m - n) as i32;
                    (0.5 * (lf[n] - lf[m])).exp() * beta.powi(k) * env * laguerre_assoc(n, m - n, x)
                } else {
                    let k = (n - m) as i32;
                    (0.5 * (lf[m] - lf[n])).exp() * (-beta.conj()).powi(k) * env * laguerre_assoc(m, n - m, x)
                };
                assert!((col.get(m) - expected).norm() < 1e-10, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn fig1_ranges() {
        assert_eq!(significant_range(c(2.0, 0.0), 1e-3).unwrap(), (0, 16));
        assert_eq!(significant_range(c(5.0, 0.0), 1e-3).unwrap(), (5, 51));
        assert_eq!(significant_range(c(0.0, 0.0), 1e-3).unwrap(), (0, 0));
        assert!(significant_range(c(2.0, 0.0), 1.5).is_err());
    }
}
