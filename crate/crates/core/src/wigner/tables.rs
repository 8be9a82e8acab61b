//! Published reference values for the `α = 2, τ = 2π` truncation study and
//! helpers that lay computed criteria next to them.

use std::ops::RangeInclusive;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{criteria_report, CriteriaOptions, CriteriaReport, Region};
use crate::error::Result;

/// Cut-offs covered by the reference tables.
pub const REFERENCE_M: RangeInclusive<usize> = 9..=16;

/// Isoline levels of the ratio table.
pub const ISOLINE_LEVELS: [f64; 3] = [0.1, 0.3, 0.5];

/// Max/min distance ratios, one row per isoline level, columns `M = 9..=16`.
pub const ISOLINE_RATIOS: [[f64; 8]; 3] = [
    [1.33, 1.20, 1.10, 1.04, 1.01, 1.01, 1.00, 1.00],
    [1.23, 1.10, 1.04, 1.01, 1.00, 1.00, 1.01, 1.01],
    [1.19, 1.08, 1.01, 1.04, 1.04, 1.04, 1.04, 1.04],
];

/// Precisions of the agreement table.
pub const AGREEMENT_PRECISIONS: [f64; 2] = [1e-2, 1e-3];

/// Percent of grid points agreeing, one row per precision.
pub const AGREEMENT_PERCENT: [[f64; 8]; 2] = [
    [64.0, 76.0, 90.0, 99.0, 100.0, 100.0, 100.0, 100.0],
    [26.0, 36.0, 44.0, 53.0, 65.0, 80.0, 97.0, 100.0],
];

/// Average relative error in percent.
pub const AVG_ERROR_PERCENT: [f64; 8] = [1.67, 0.98, 0.55, 0.30, 0.15, 0.08, 0.04, 0.02];

/// Maximal relative error in percent.
pub const MAX_ERROR_PERCENT: [f64; 8] = [11.30, 6.39, 3.48, 1.84, 0.94, 0.47, 0.22, 0.11];

/// Quoted overlaps `(M, F)` for `α = 2`.
pub const QUOTED_FIDELITIES: [(usize, f64); 3] = [(9, 0.9838), (10, 0.9943), (14, 0.9999)];

fn column(m_cut: usize) -> Option<usize> {
    REFERENCE_M.contains(&m_cut).then(|| m_cut - REFERENCE_M.start())
}

fn row_of(keys: &[f64], key: f64) -> Option<usize> {
    keys.iter().position(|k| (k - key).abs() <= 1e-12)
}

pub fn reference_isoline(level: f64, m_cut: usize) -> Option<f64> {
    Some(ISOLINE_RATIOS[row_of(&ISOLINE_LEVELS, level)?][column(m_cut)?])
}

pub fn reference_agreement_percent(precision: f64, m_cut: usize) -> Option<f64> {
    Some(AGREEMENT_PERCENT[row_of(&AGREEMENT_PRECISIONS, precision)?][column(m_cut)?])
}

pub fn reference_errors_percent(m_cut: usize) -> Option<(f64, f64)> {
    let c = column(m_cut)?;
    Some((AVG_ERROR_PERCENT[c], MAX_ERROR_PERCENT[c]))
}

/// One computed value with its published counterpart, when there is one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compared {
    pub computed: f64,
    pub reference: Option<f64>,
}

impl Compared {
    pub fn delta(&self) -> Option<f64> {
        self.reference.map(|r| self.computed - r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolineRow {
    pub m_cut: usize,
    /// `(level, ratio)` for each level.
    pub ratios: Vec<(f64, Compared)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub m_cut: usize,
    /// `(precision, percent)` for each precision.
    pub percent: Vec<(f64, Compared)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub m_cut: usize,
    pub avg_percent: Compared,
    pub max_percent: Compared,
}

/// Criteria reports for every `M` in `m_range`, in ascending order.
pub fn criteria_sweep(
    alpha: C64,
    tau: f64,
    m_range: RangeInclusive<usize>,
    region: Region,
    step: f64,
    options: &CriteriaOptions,
) -> Result<Vec<CriteriaReport>> {
    m_range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| criteria_report(alpha, tau, m, region, step, options))
        .collect()
}

// Reference values only apply to the published α = 2, τ = 2π case.
fn is_reference_case(rep: &CriteriaReport) -> bool {
    (rep.alpha - C64::new(2.0, 0.0)).norm() < 1e-12
        && (rep.tau.rem_euclid(std::f64::consts::TAU)).min(std::f64::consts::TAU - rep.tau.rem_euclid(std::f64::consts::TAU)) < 1e-12
}

pub fn isoline_rows(reports: &[CriteriaReport]) -> Vec<IsolineRow> {
    reports
        .iter()
        .map(|rep| {
            let reference = is_reference_case(rep);
            IsolineRow {
                m_cut: rep.m_cut,
                ratios: rep
                    .isoline_ratios
                    .iter()
                    .map(|&(level, ratio)| {
                        let r = if reference { reference_isoline(level, rep.m_cut) } else { None };
                        (level, Compared { computed: ratio, reference: r })
                    })
                    .collect(),
            }
        })
        .collect()
}

pub fn agreement_rows(reports: &[CriteriaReport]) -> Vec<AgreementRow> {
    reports
        .iter()
        .map(|rep| {
            let reference = is_reference_case(rep);
            AgreementRow {
                m_cut: rep.m_cut,
                percent: rep
                    .agreement
                    .iter()
                    .map(|&(p, frac)| {
                        let r = if reference { reference_agreement_percent(p, rep.m_cut) } else { None };
                        (p, Compared { computed: 100.0 * frac, reference: r })
                    })
                    .collect(),
            }
        })
        .collect()
}

pub fn error_rows(reports: &[CriteriaReport]) -> Vec<ErrorRow> {
    reports
        .iter()
        .map(|rep| {
            let r = if is_reference_case(rep) { reference_errors_percent(rep.m_cut) } else { None };
            ErrorRow {
                m_cut: rep.m_cut,
                avg_percent: Compared { computed: 100.0 * rep.avg_rel_err, reference: r.map(|x| x.0) },
                max_percent: Compared { computed: 100.0 * rep.max_rel_err, reference: r.map(|x| x.1) },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_lookup() {
        assert_eq!(reference_isoline(0.1, 10), Some(1.20));
        assert_eq!(reference_isoline(0.5, 9), Some(1.19));
        assert_eq!(reference_isoline(0.2, 9), None);
        assert_eq!(reference_isoline(0.1, 17), None);
        assert_eq!(reference_agreement_percent(1e-3, 10), Some(36.0));
        assert_eq!(reference_errors_percent(9), Some((1.67, 11.30)));
    }
}
