use std::f64::consts::{FRAC_2_PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{wigner_grid, Region, WignerField, NORMALIZED_SCALE};
use crate::error::{KerrError, Result};
use crate::fock::{default_dim, fidelity_paper, kerr_state, truncated_kerr_state, KerrParams};

/// How isoline levels are read against the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelScale {
    /// Levels compared with `W` itself (ideal peak `2/π`).
    Raw,
    /// Levels compared with `(π/2) W` (ideal peak 1).
    Normalized,
}

impl LevelScale {
    fn factor(self) -> f64 {
        match self {
            LevelScale::Raw => 1.0,
            LevelScale::Normalized => NORMALIZED_SCALE,
        }
    }
}

/// Point the isoline distances are measured from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IsolineCenter {
    /// The approximate field's own maximum.
    FieldPeak,
    /// A fixed phase-space point.
    Point(C64),
}

/// Denominator of the relative Wigner error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ErrorDenominator {
    /// `|ΔW|` divided by the ideal peak value `2/π`, over every node.
    IdealPeak,
    /// `|ΔW|` divided by the ideal value at the same node, skipping nodes whose
    /// normalized ideal value `(π/2)W` is below `floor`.
    Pointwise { floor: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriteriaOptions {
    pub levels: Vec<f64>,
    pub precisions: Vec<f64>,
    pub level_scale: LevelScale,
    pub center: IsolineCenter,
    pub denominator: ErrorDenominator,
    pub rays: usize,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        Self {
            levels: vec![0.1, 0.3, 0.5],
            precisions: vec![1e-2, 1e-3],
            level_scale: LevelScale::Raw,
            center: IsolineCenter::FieldPeak,
            denominator: ErrorDenominator::IdealPeak,
            rays: 720,
        }
    }
}

/// The three truncation criteria plus the overlap figure for one `(α, τ, M)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub alpha: C64,
    pub tau: f64,
    pub m_cut: usize,
    /// `(level, max/min distance)` pairs.
    pub isoline_ratios: Vec<(f64, f64)>,
    pub max_rel_err: f64,
    pub avg_rel_err: f64,
    /// `(precision, fraction of nodes within it)` pairs.
    pub agreement: Vec<(f64, f64)>,
    pub fidelity: f64,
}

impl CriteriaReport {
    pub fn isoline_ratio(&self, level: f64) -> Option<f64> {
        lookup(&self.isoline_ratios, level)
    }

    pub fn agreement(&self, precision: f64) -> Option<f64> {
        lookup(&self.agreement, precision)
    }
}

fn lookup(pairs: &[(f64, f64)], key: f64) -> Option<f64> {
    pairs
        .iter()
        .find(|(k, _)| (k - key).abs() <= 1e-12 * key.abs().max(1e-300))
        .map(|&(_, v)| v)
}

/// Max / mean relative error of an approximate field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub max_rel: f64,
    pub avg_rel: f64,
}

fn undefined(level: f64, reason: impl Into<String>) -> KerrError {
    KerrError::IsolineUndefined { level, reason: reason.into() }
}

/// Ratio of the largest to the smallest distance from `center` to the level
/// set `{scale·W = level}`.
///
/// The level set is located on `rays` evenly spaced rays by marching outward
/// in quarter-step increments over the bilinear interpolant and bisecting the
/// first downward crossing. Every ray must cross exactly once inside the grid.
pub fn isoline_ratio_with(
    field: &WignerField,
    level: f64,
    center: C64,
    scale: LevelScale,
    rays: usize,
) -> Result<f64> {
    let k = scale.factor();
    let at = |g: C64| field.sample(g).map(|w| k * w);
    match at(center) {
        None => return Err(undefined(level, "center lies outside the grid")),
        Some(v) if v <= level => return Err(undefined(level, "field at center does not exceed the level")),
        _ => {}
    }
    if rays < 3 {
        return Err(KerrError::InvalidParameter(format!("need at least 3 rays, got {rays}")));
    }
    let dr = 0.25 * field.step();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for ray in 0..rays {
        let dir = C64::from_polar(1.0, TAU * ray as f64 / rays as f64);
        let mut r = 0.0;
        let mut crossing = None;
        loop {
            let next = r + dr;
            let Some(v) = at(center + dir * next) else { break };
            match crossing {
                None if v < level => {
                    let (mut a, mut b) = (r, next);
                    for _ in 0..40 {
                        let mid = 0.5 * (a + b);
                        match at(center + dir * mid) {
                            Some(w) if w >= level => a = mid,
                            _ => b = mid,
                        }
                    }
                    crossing = Some(0.5 * (a + b));
                }
                Some(_) if v >= level => {
                    return Err(undefined(level, "level set is not star-shaped about the center"));
                }
                _ => {}
            }
            r = next;
        }
        let d = crossing.ok_or_else(|| undefined(level, "level set reaches the grid boundary"))?;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok(hi / lo)
}

/// [`isoline_ratio_with`] using 720 rays.
pub fn isoline_ratio(field: &WignerField, level: f64, center: C64, scale: LevelScale) -> Result<f64> {
    isoline_ratio_with(field, level, center, scale, 720)
}

/// Relative error of `approx` against `exact`, maximum and mean over the
/// contributing nodes.
pub fn error_stats(approx: &WignerField, exact: &WignerField, denom: ErrorDenominator) -> Result<ErrorStats> {
    if !approx.same_grid(exact) {
        return Err(KerrError::GridMismatch);
    }
    let pairs = approx.values().iter().zip(exact.values());
    let rel: Vec<f64> = match denom {
        ErrorDenominator::IdealPeak => pairs.map(|(a, e)| (a - e).abs() / FRAC_2_PI).collect(),
        ErrorDenominator::Pointwise { floor } => pairs
            .filter(|(_, e)| NORMALIZED_SCALE * **e >= floor)
            .map(|(a, e)| (a - e).abs() / e.abs())
            .collect(),
    };
    if rel.is_empty() {
        return Ok(ErrorStats { max_rel: 0.0, avg_rel: 0.0 });
    }
    let max_rel = rel.iter().cloned().fold(0.0, f64::max);
    let avg_rel = rel.iter().sum::<f64>() / rel.len() as f64;
    Ok(ErrorStats { max_rel, avg_rel })
}

/// Fraction of nodes where the raw fields agree to within `precision`.
pub fn agreement_fraction(approx: &WignerField, exact: &WignerField, precision: f64) -> Result<f64> {
    if !approx.same_grid(exact) {
        return Err(KerrError::GridMismatch);
    }
    if !(precision > 0.0) {
        return Err(KerrError::InvalidParameter(format!("precision {precision} must be positive")));
    }
    let hits = approx
        .values()
        .iter()
        .zip(exact.values())
        .filter(|(a, e)| (*a - *e).abs() <= precision)
        .count();
    Ok(hits as f64 / approx.values().len() as f64)
}

/// Scores the truncation `M` of the Kerr state `(α, τ)` on the given grid.
pub fn criteria_report(
    alpha: C64,
    tau: f64,
    m_cut: usize,
    region: Region,
    step: f64,
    options: &CriteriaOptions,
) -> Result<CriteriaReport> {
    let dim = default_dim(alpha.norm()).max(m_cut + 1);
    let approx_state = truncated_kerr_state(&KerrParams::truncated(alpha, tau, m_cut), dim)?;
    let exact_state = kerr_state(alpha, tau, dim)?;
    let approx = wigner_grid(&approx_state, region, step)?;
    let exact = wigner_grid(&exact_state, region, step)?;

    let center = match options.center {
        IsolineCenter::FieldPeak => approx.peak_location(),
        IsolineCenter::Point(p) => p,
    };
    let isoline_ratios = options
        .levels
        .iter()
        .map(|&l| Ok((l, isoline_ratio_with(&approx, l, center, options.level_scale, options.rays)?)))
        .collect::<Result<Vec<_>>>()?;
    let stats = error_stats(&approx, &exact, options.denominator)?;
    let agreement = options
        .precisions
        .iter()
        .map(|&p| Ok((p, agreement_fraction(&approx, &exact, p)?)))
        .collect::<Result<Vec<_>>>()?;

    Ok(CriteriaReport {
        alpha,
        tau,
        m_cut,
        isoline_ratios,
        max_rel_err: stats.max_rel,
        avg_rel_err: stats.avg_rel,
        agreement,
        fidelity: fidelity_paper(alpha, m_cut),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;
    use crate::wigner::coherent_wigner;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ideal_field() -> WignerField {
        WignerField::tabulate(Region::criteria_default(c(2.0, 0.0)), 0.04, |g| coherent_wigner(c(2.0, 0.0), g))
            .unwrap()
    }

    #[test]
    fn ideal_isolines_are_circles() {
        let f = ideal_field();
        for scale in [LevelScale::Raw, LevelScale::Normalized] {
            for level in [0.1, 0.3, 0.5] {
                let r = isoline_ratio(&f, level, c(2.0, 0.0), scale).unwrap();
                assert!((r - 1.0).abs() < 5e-3, "{scale:?} {level} {r}");
            }
        }
    }

    #[test]
    fn off_center_circle_ratio() {
        // circle of radius R seen from a point offset by d: (R + d) / (R − d)
        let f = WignerField::tabulate(Region::new(-2.0, 2.0, -2.0, 2.0), 0.01, |g| 1.0 - g.norm()).unwrap();
        let r = isoline_ratio(&f, 0.0, c(0.2, 0.0), LevelScale::Raw).unwrap();
        assert!((r - 1.2 / 0.8).abs() < 1e-3, "{r}");
    }

    #[test]
    fn isoline_errors() {
        let f = ideal_field();
        let raw_peak = FRAC_2_PI;
        assert!(matches!(
            isoline_ratio(&f, raw_peak + 0.01, c(2.0, 0.0), LevelScale::Raw),
            Err(KerrError::IsolineUndefined { .. })
        ));
        // level so low the set leaves the grid
        assert!(matches!(
            isoline_ratio(&f, 1e-12, c(2.0, 0.0), LevelScale::Raw),
            Err(KerrError::IsolineUndefined { .. })
        ));
        // two separated bumps: rays from the first hit the second
        let two = WignerField::tabulate(Region::new(-2.0, 2.0, -1.0, 1.0), 0.02, |g| {
            (-8.0 * (g - c(-1.0, 0.0)).norm_sqr()).exp() + (-8.0 * (g - c(1.0, 0.0)).norm_sqr()).exp()
        })
        .unwrap();
        assert!(matches!(
            isoline_ratio(&two, 0.5, c(-1.0, 0.0), LevelScale::Raw),
            Err(KerrError::IsolineUndefined { .. })
        ));
    }

    #[test]
    fn identical_fields_score_perfectly() {
        let f = ideal_field();
        let stats = error_stats(&f, &f, ErrorDenominator::IdealPeak).unwrap();
        assert_eq!((stats.max_rel, stats.avg_rel), (0.0, 0.0));
        let stats = error_stats(&f, &f, ErrorDenominator::Pointwise { floor: 1e-3 }).unwrap();
        assert_eq!((stats.max_rel, stats.avg_rel), (0.0, 0.0));
        for p in [1e-6, 1e-3, 1e-2] {
            assert_eq!(agreement_fraction(&f, &f, p).unwrap(), 1.0);
        }
    }

    #[test]
    fn grid_mismatch_detected() {
        let a = ideal_field();
        let b = WignerField::tabulate(Region::new(0.0, 4.0, -2.0, 2.0), 0.05, |_| 0.0).unwrap();
        assert_eq!(error_stats(&a, &b, ErrorDenominator::IdealPeak), Err(KerrError::GridMismatch));
        assert_eq!(agreement_fraction(&a, &b, 1e-2), Err(KerrError::GridMismatch));
        assert!(agreement_fraction(&a, &a, 0.0).is_err());
    }

    #[test]
    fn vacuum_report_is_perfect() {
        let rep = criteria_report(c(0.0, 0.0), 2.0 * PI, 0, Region::around(c(0.0, 0.0), 2.0), 0.04, &CriteriaOptions::default())
            .unwrap();
        for &(_, r) in &rep.isoline_ratios {
            assert!((r - 1.0).abs() < 5e-3);
        }
        assert!(rep.max_rel_err < 1e-12 && rep.avg_rel_err < 1e-12);
        assert!(rep.agreement.iter().all(|&(_, a)| a == 1.0));
        assert_eq!(rep.fidelity, 1.0);
    }

    #[test]
    fn pointwise_floor_excludes_tails() {
        let exact = ideal_field();
        let s = coherent_state(c(2.05, 0.0), 30).unwrap();
        let approx = crate::wigner::wigner_grid(&s, exact.region(), exact.step()).unwrap();
        let loose = error_stats(&approx, &exact, ErrorDenominator::Pointwise { floor: 1e-3 }).unwrap();
        let tight = error_stats(&approx, &exact, ErrorDenominator::Pointwise { floor: 0.5 }).unwrap();
        assert!(tight.max_rel < loose.max_rel);
        assert!(loose.max_rel >= loose.avg_rel && loose.avg_rel >= 0.0);
    }
}
