use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::eigen::{sym_eigen, EigenDecomposition};
use super::model::{covariance, FactorModel};
use crate::error::FactorError;
use crate::panel::StandardizedPanel;

pub const DEFAULT_RMAX: usize = 15;

/// Mean squared residual at or below which a fit counts as exact.
///
/// A true zero never survives floating point; a panel of exact rank r leaves
/// residuals of order 1e-15, i.e. a mean square near 1e-30.
pub const EXACT_FIT_TOL: f64 = 1e-20;

/// Penalty functions g(q, T) for the information criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Penalty {
    G1,
    G2,
    G3,
}

impl Penalty {
    pub const ALL: [Penalty; 3] = [Penalty::G1, Penalty::G2, Penalty::G3];

    pub fn name(self) -> &'static str {
        match self {
            Penalty::G1 => "g1",
            Penalty::G2 => "g2",
            Penalty::G3 => "g3",
        }
    }

    /// Per-factor penalty for a q×T panel.
    pub fn value(self, q: usize, t: usize) -> f64 {
        let (q, t) = (q as f64, t as f64);
        let min = q.min(t);
        match self {
            Penalty::G1 => (q + t) / (q * t) * (q * t / (q + t)).ln(),
            Penalty::G2 => (q + t) / (q * t) * min.ln(),
            Penalty::G3 => min.ln() / min,
        }
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Penalty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g1" => Ok(Penalty::G1),
            "g2" => Ok(Penalty::G2),
            "g3" => Ok(Penalty::G3),
            other => Err(format!("unknown penalty {other:?} (expected g1, g2 or g3)")),
        }
    }
}

/// IC(r), or the sentinel for an exact fit where the log would diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IcValue {
    Finite(f64),
    ExactFit,
}

impl IcValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            IcValue::Finite(v) => Some(v),
            IcValue::ExactFit => None,
        }
    }

    /// `-inf` for an exact fit.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::NEG_INFINITY)
    }
}

impl fmt::Display for IcValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IcValue::Finite(v) => write!(f, "{v}"),
            IcValue::ExactFit => f.write_str("-inf"),
        }
    }
}

fn ic_from_ssr(ssr: f64, q: usize, t: usize, r: usize, penalty: Penalty) -> IcValue {
    let msr = ssr / (q * t) as f64;
    if msr <= EXACT_FIT_TOL {
        IcValue::ExactFit
    } else {
        IcValue::Finite(msr.ln() + r as f64 * penalty.value(q, t))
    }
}

/// `log(SSR / qT) + r g(q, T)` with residuals from the r-factor fit.
pub fn ic_value(z: &StandardizedPanel, r: usize, penalty: Penalty) -> Result<IcValue, FactorError> {
    let e = sym_eigen(&covariance(z)?)?;
    let m = FactorModel::from_eigen(z, &e, r)?;
    Ok(ic_from_ssr(m.ssr(), z.n_series(), z.n_periods(), r, penalty))
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 8.0 * f64::EPSILON * a.abs().max(b.abs())
}

/// Index of the minimum, preferring the earliest entry on ties. Exact fits sort
/// below every finite value; finite values within a few ulps count as tied.
pub fn argmin_ic(curve: &[IcValue]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in curve.iter().enumerate() {
        let better = match best.map(|b| (curve[b], *v)) {
            None => true,
            Some((IcValue::ExactFit, _)) => false,
            Some((IcValue::Finite(_), IcValue::ExactFit)) => true,
            Some((IcValue::Finite(b), IcValue::Finite(c))) => {
                !nearly_equal(b, c) && c.partial_cmp(&b) == Some(Ordering::Less)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// IC curves over r = 1..=rmax and the minimizing r per penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct IcReport {
    pub rmax: usize,
    pub q: usize,
    pub t: usize,
    /// SSR(r) for r = 1..=rmax.
    pub ssr: Vec<f64>,
    /// `(penalty, IC(1..=rmax))`, in the order requested.
    pub curves: Vec<(Penalty, Vec<IcValue>)>,
    /// `(penalty, r̂)`, in the order requested.
    pub selected: Vec<(Penalty, usize)>,
}

impl IcReport {
    pub fn selected_for(&self, penalty: Penalty) -> Option<usize> {
        self.selected.iter().find(|(p, _)| *p == penalty).map(|&(_, r)| r)
    }

    pub fn curve(&self, penalty: Penalty) -> Option<&[IcValue]> {
        self.curves
            .iter()
            .find(|(p, _)| *p == penalty)
            .map(|(_, c)| c.as_slice())
    }
}

/// Scores r = 1..=rmax under each penalty and picks the minimizer.
pub fn select_num_factors(
    z: &StandardizedPanel,
    rmax: usize,
    penalties: &[Penalty],
) -> Result<IcReport, FactorError> {
    if penalties.is_empty() {
        return Err(FactorError::NoPenalties);
    }
    let (q, t) = (z.n_series(), z.n_periods());
    let max = q.min(t);
    if rmax == 0 || rmax > max {
        return Err(FactorError::FactorCount { r: rmax, max });
    }
    let e = sym_eigen(&covariance(z)?)?;
    select_from_eigen(z, &e, rmax, penalties)
}

/// As [`select_num_factors`], reusing a decomposition of `covariance(z)`.
pub fn select_from_eigen(
    z: &StandardizedPanel,
    e: &EigenDecomposition,
    rmax: usize,
    penalties: &[Penalty],
) -> Result<IcReport, FactorError> {
    if penalties.is_empty() {
        return Err(FactorError::NoPenalties);
    }
    let (q, t) = (z.n_series(), z.n_periods());
    let max = q.min(t);
    if rmax == 0 || rmax > max {
        return Err(FactorError::FactorCount { r: rmax, max });
    }
    let ssr = (1..=rmax)
        .map(|r| FactorModel::from_eigen(z, e, r).map(|m| m.ssr()))
        .collect::<Result<Vec<_>, _>>()?;

    let mut curves = Vec::new();
    let mut selected = Vec::new();
    let mut seen = Vec::new();
    for &p in penalties {
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        let curve: Vec<IcValue> = ssr
            .iter()
            .enumerate()
            .map(|(k, &s)| ic_from_ssr(s, q, t, k + 1, p))
            .collect();
        let r_hat = argmin_ic(&curve).expect("rmax >= 1") + 1;
        curves.push((p, curve));
        selected.push((p, r_hat));
    }
    Ok(IcReport {
        rmax,
        q,
        t,
        ssr,
        curves,
        selected,
    })
}
