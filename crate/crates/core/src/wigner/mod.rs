//! Wigner functions of pure Fock superpositions on rectangular phase-space
//! grids, and the isoline / relative-error / agreement criteria used to score
//! truncated Kerr states against the exact ones.

mod criteria;
mod laguerre;
pub mod tables;

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::fock::{ln_factorials, FockVector};

pub use criteria::{
    agreement_fraction, criteria_report, error_stats, isoline_ratio, isoline_ratio_with, CriteriaOptions,
    CriteriaReport, ErrorDenominator, ErrorStats, IsolineCenter, LevelScale,
};
pub use laguerre::{laguerre_assoc, laguerre_column};

/// Largest magnitude a pure-state Wigner function can reach.
pub const WIGNER_BOUND: f64 = FRAC_2_PI;

/// Evaluates `W(γ) = (2/π) Tr[ρ D(γ) Π D†(γ)]` for a fixed pure state.
///
/// Each coherence `c_m c_n*` with `m ≥ n` contributes
/// `(−1)^n √(n!/m!) (2γ*)^{m−n} e^{−2|γ|²} L_n^{m−n}(4|γ|²)`.
#[derive(Clone, Debug)]
pub struct WignerEvaluator {
    amps: Vec<C64>,
    ln_fact: Vec<f64>,
}

impl WignerEvaluator {
    pub fn new(state: &FockVector) -> Self {
        let top = state.highest_occupied(0.0).map_or(0, |n| n + 1);
        let amps = state.amps()[..top].to_vec();
        Self { ln_fact: ln_factorials(top.max(1)), amps }
    }

    pub fn eval(&self, gamma: C64) -> f64 {
        let len = self.amps.len();
        if len == 0 {
            return 0.0;
        }
        let r2 = gamma.norm_sqr();
        let x = 4.0 * r2;
        let ln_two_r = (2.0 * gamma.norm()).ln();
        let arg = -gamma.arg();
        let mut total = 0.0;
        for k in 0..len {
            if k > 0 && r2 == 0.0 {
                break;
            }
            let lag = laguerre_column(len - k, k, x);
            let mut diag = C64::new(0.0, 0.0);
            for n in 0..len - k {
                let m = n + k;
                let coh = self.amps[m] * self.amps[n].conj();
                if coh.norm_sqr() == 0.0 {
                    continue;
                }
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let ln_mag = 0.5 * (self.ln_fact[n] - self.ln_fact[m]) - 2.0 * r2
                    + if k > 0 { k as f64 * ln_two_r } else { 0.0 };
                diag += coh * (sign * ln_mag.exp() * lag[n]);
            }
            let phase = C64::from_polar(1.0, k as f64 * arg);
            let term = (diag * phase).re;
            total += if k == 0 { term } else { 2.0 * term };
        }
        FRAC_2_PI * total
    }
}

/// Wigner value of `state` at `gamma`.
pub fn wigner_point(state: &FockVector, gamma: C64) -> f64 {
    WignerEvaluator::new(state).eval(gamma)
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` in phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self { re_min, re_max, im_min, im_max }
    }

    /// Square of half-width `half` centred on `center`.
    pub fn around(center: C64, half: f64) -> Self {
        Self::new(center.re - half, center.re + half, center.im - half, center.im + half)
    }

    /// Region used for the truncation criteria: `[α−2, α+2] × [−2, 2]` about the coherent peak.
    pub fn criteria_default(alpha: C64) -> Self {
        Self::around(alpha, 2.0)
    }

    pub fn contains(&self, gamma: C64) -> bool {
        gamma.re >= self.re_min && gamma.re <= self.re_max && gamma.im >= self.im_min && gamma.im <= self.im_max
    }
}

/// Wigner values on the nodes of a regular grid. Row-major, imaginary axis outer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerField {
    region: Region,
    step: f64,
    n_re: usize,
    n_im: usize,
    values: Vec<f64>,
}

fn node_count(lo: f64, hi: f64, step: f64, axis: &str) -> Result<usize> {
    let extent = hi - lo;
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(KerrError::DegenerateRegion(format!("{axis} extent {extent} must be positive")));
    }
    let cells = (extent / step).round();
    if (cells * step - extent).abs() > 1e-6 * step {
        return Err(KerrError::DegenerateRegion(format!(
            "{axis} extent {extent} is not a whole number of steps {step}"
        )));
    }
    Ok(cells as usize + 1)
}

impl WignerField {
    pub fn region(&self) -> Region {
        self.region
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `(n_re, n_im)` node counts.
    pub fn shape(&self) -> (usize, usize) {
        (self.n_re, self.n_im)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i_re: usize, j_im: usize) -> f64 {
        self.values[j_im * self.n_re + i_re]
    }

    pub fn node(&self, i_re: usize, j_im: usize) -> C64 {
        C64::new(
            self.region.re_min + i_re as f64 * self.step,
            self.region.im_min + j_im as f64 * self.step,
        )
    }

    /// Iterator over `(γ, W)` pairs, imaginary axis outer.
    pub fn nodes(&self) -> impl Iterator<Item = (C64, f64)> + '_ {
        (0..self.n_im).flat_map(move |j| (0..self.n_re).map(move |i| (self.node(i, j), self.value(i, j))))
    }

    pub fn same_grid(&self, other: &WignerField) -> bool {
        self.n_re == other.n_re
            && self.n_im == other.n_im
            && (self.step - other.step).abs() <= 1e-12 * self.step
            && (self.region.re_min - other.region.re_min).abs() <= 1e-12
            && (self.region.im_min - other.region.im_min).abs() <= 1e-12
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Riemann sum `Σ W Δγ²`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step * self.step
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn sample(&self, gamma: C64) -> Option<f64> {
        if !self.region.contains(gamma) {
            return None;
        }
        let u = (gamma.re - self.region.re_min) / self.step;
        let v = (gamma.im - self.region.im_min) / self.step;
        let i = (u.floor() as usize).min(self.n_re - 2);
        let j = (v.floor() as usize).min(self.n_im - 2);
        let (fu, fv) = (u - i as f64, v - j as f64);
        let w00 = self.value(i, j);
        let w10 = self.value(i + 1, j);
        let w01 = self.value(i, j + 1);
        let w11 = self.value(i + 1, j + 1);
        Some((1.0 - fv) * ((1.0 - fu) * w00 + fu * w10) + fv * ((1.0 - fu) * w01 + fu * w11))
    }

    /// Location of the maximum, refined by a parabola through the neighbouring nodes on each axis.
    pub fn peak_location(&self) -> C64 {
        let (idx, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
        let (i, j) = (idx % self.n_re, idx / self.n_re);
        let vertex = |lo: f64, mid: f64, hi: f64| {
            let curv = lo - 2.0 * mid + hi;
            if curv < 0.0 {
                0.5 * (lo - hi) / curv
            } else {
                0.0
            }
        };
        let di = if i > 0 && i + 1 < self.n_re {
            vertex(self.value(i - 1, j), self.value(i, j), self.value(i + 1, j))
        } else {
            0.0
        };
        let dj = if j > 0 && j + 1 < self.n_im {
            vertex(self.value(i, j - 1), self.value(i, j), self.value(i, j + 1))
        } else {
            0.0
        };
        self.node(i, j) + C64::new(di * self.step, dj * self.step)
    }

    /// Builds a field from precomputed node values.
    pub fn from_values(region: Region, step: f64, values: Vec<f64>) -> Result<Self> {
        let (n_re, n_im) = grid_shape(&region, step)?;
        if values.len() != n_re * n_im {
            return Err(KerrError::GridMismatch);
        }
        Ok(Self { region, step, n_re, n_im, values })
    }

    /// Evaluates `f` on every node; rows are computed in parallel and
    /// assembled in order, so the result does not depend on scheduling.
    pub fn tabulate<F>(region: Region, step: f64, f: F) -> Result<Self>
    where
        F: Fn(C64) -> f64 + Sync,
    {
        let (n_re, n_im) = grid_shape(&region, step)?;
        let values: Vec<f64> = (0..n_im)
            .into_par_iter()
            .flat_map_iter(|j| {
                let im = region.im_min + j as f64 * step;
                let f = &f;
                (0..n_re).map(move |i| f(C64::new(region.re_min + i as f64 * step, im)))
            })
            .collect();
        Ok(Self { region, step, n_re, n_im, values })
    }
}

fn grid_shape(region: &Region, step: f64) -> Result<(usize, usize)> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(KerrError::InvalidParameter(format!("grid step {step} must be positive")));
    }
    Ok((
        node_count(region.re_min, region.re_max, step, "real")?,
        node_count(region.im_min, region.im_max, step, "imaginary")?,
    ))
}

/// Wigner function of `state` on the grid spanned by `region` and `step`.
pub fn wigner_grid(state: &FockVector, region: Region, step: f64) -> Result<WignerField> {
    let eval = WignerEvaluator::new(state);
    WignerField::tabulate(region, step, |g| eval.eval(g))
}

/// `(2/π) e^{−2|γ−α|²}`, the Wigner function of a coherent state.
pub fn coherent_wigner(alpha: C64, gamma: C64) -> f64 {
    FRAC_2_PI * (-2.0 * (gamma - alpha).norm_sqr()).exp()
}

/// Scale that maps raw Wigner values onto a unit ideal peak.
pub const NORMALIZED_SCALE: f64 = PI / 2.0;
