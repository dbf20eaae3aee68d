use std::cmp::Ordering;

use ndarray::{s, Array1, Array2, ArrayView1};

use crate::error::FactorError;
use crate::factor::FactorModel;
use crate::panel::StandardizedPanel;

/// Relative tolerance on the mean of a regression input.
const CENTER_TOL: f64 = 1e-8;

fn check_centered(x: ArrayView1<f64>) -> Result<(), FactorError> {
    let n = x.len() as f64;
    let mean = x.sum() / n;
    let rms = (x.dot(&x) / n).sqrt();
    if mean.abs() > CENTER_TOL * rms.max(1.0) {
        return Err(FactorError::NotCentered { mean: mean.abs() });
    }
    Ok(())
}

/// Solves `G β = b` for symmetric positive definite `G`.
fn cholesky_solve(g: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let k = g.nrows();
    let scale = (0..k).map(|i| g[[i, i]]).fold(0.0, f64::max);
    let mut l = Array2::<f64>::zeros((k, k));
    for i in 0..k {
        for j in 0..=i {
            let mut sum = g[[i, j]];
            for p in 0..j {
                sum -= l[[i, p]] * l[[j, p]];
            }
            if i == j {
                if !(sum > 1e-14 * scale) {
                    return None;
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    let mut y = Array1::zeros(k);
    for i in 0..k {
        let mut sum = b[i];
        for p in 0..i {
            sum -= l[[i, p]] * y[p];
        }
        y[i] = sum / l[[i, i]];
    }
    let mut x = Array1::zeros(k);
    for i in (0..k).rev() {
        let mut sum = y[i];
        for p in (i + 1)..k {
            sum -= l[[p, i]] * x[p];
        }
        x[i] = sum / l[[i, i]];
    }
    Some(x)
}

/// R² from regressing series `i` on the first `k` factors, without intercept.
///
/// Both sides must be mean-zero; this is checked rather than assumed.
pub fn r2_by_k(z: &StandardizedPanel, m: &FactorModel, i: usize, k: usize) -> Result<f64, FactorError> {
    let y = z.data();
    let (q, t) = y.dim();
    if i >= q {
        return Err(FactorError::SeriesIndex { index: i, q });
    }
    if k == 0 || k > m.r {
        return Err(FactorError::FactorCount { r: k, max: m.r });
    }
    if m.factors.ncols() != t {
        return Err(FactorError::Dimension(format!(
            "factors span {} periods, panel has {t}",
            m.factors.ncols()
        )));
    }
    let yi = y.row(i);
    let f = m.factors.slice(s![..k, ..]);
    check_centered(yi)?;
    for row in f.rows() {
        check_centered(row)?;
    }
    let g = f.dot(&f.t());
    let b = f.dot(&yi);
    let beta = cholesky_solve(&g, &b).ok_or(FactorError::Singular { k })?;
    let fitted = f.t().dot(&beta);
    let ssr: f64 = yi.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    let tss = yi.dot(&yi);
    Ok((1.0 - ssr / tss).clamp(0.0, 1.0))
}

/// Per-series explanatory power of the first k factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Mr2Row {
    pub mnemonic: String,
    pub id: Option<u32>,
    pub group: u8,
    /// R²(k) for k = 1..=r.
    pub r2: Vec<f64>,
    /// mR²(k) = R²(k) - R²(k-1), k = 1..=r.
    pub mr2: Vec<f64>,
}

/// Incremental R² of every series on every factor, with per-factor averages.
#[derive(Debug, Clone, PartialEq)]
pub struct Mr2Table {
    pub r: usize,
    pub rows: Vec<Mr2Row>,
    /// mR²(k) = q⁻¹ Σ_i mR_i²(k).
    pub avg_mr2: Vec<f64>,
    /// q⁻¹ Σ_i R_i²(k).
    pub avg_r2: Vec<f64>,
    /// Average R_i²(r).
    pub total: f64,
}

/// Builds the mR² table for a model fitted on `z`.
///
/// R²(k) is stored as the running sum of the increments, so the increments of
/// each series add up to its R²(r) exactly.
pub fn mr2_table(z: &StandardizedPanel, m: &FactorModel) -> Result<Mr2Table, FactorError> {
    let q = z.n_series();
    let mut rows = Vec::with_capacity(q);
    for (i, meta) in z.meta().iter().enumerate() {
        let mut r2 = Vec::with_capacity(m.r);
        let mut mr2 = Vec::with_capacity(m.r);
        let mut prev = 0.0;
        for k in 1..=m.r {
            let raw = r2_by_k(z, m, i, k)?;
            let inc = (raw - prev).max(0.0);
            prev += inc;
            mr2.push(inc);
            r2.push(prev);
        }
        rows.push(Mr2Row {
            mnemonic: meta.mnemonic.clone(),
            id: meta.id,
            group: meta.group,
            r2,
            mr2,
        });
    }
    let avg = |f: &dyn Fn(&Mr2Row) -> f64| rows.iter().map(f).sum::<f64>() / q as f64;
    let avg_mr2: Vec<f64> = (0..m.r).map(|k| avg(&|row| row.mr2[k])).collect();
    let avg_r2: Vec<f64> = (0..m.r).map(|k| avg(&|row| row.r2[k])).collect();
    let total = avg_r2.last().copied().unwrap_or(0.0);
    Ok(Mr2Table {
        r: m.r,
        rows,
        avg_mr2,
        avg_r2,
        total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedSeries {
    pub mnemonic: String,
    pub value: f64,
    pub group: u8,
}

fn ranked(t: &Mr2Table, value: impl Fn(&Mr2Row) -> f64) -> Vec<RankedSeries> {
    let mut out: Vec<RankedSeries> = t
        .rows
        .iter()
        .map(|row| RankedSeries {
            mnemonic: row.mnemonic.clone(),
            value: value(row),
            group: row.group,
        })
        .collect();
    out.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.mnemonic.cmp(&b.mnemonic))
    });
    out
}

/// The `n` series with the largest mR²(k), k counted from 1; ties by mnemonic.
pub fn top_n(t: &Mr2Table, k: usize, n: usize) -> Result<Vec<RankedSeries>, FactorError> {
    if k == 0 || k > t.r {
        return Err(FactorError::FactorCount { r: k, max: t.r });
    }
    let mut out = ranked(t, |row| row.mr2[k - 1]);
    out.truncate(n);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct R2Ranking {
    pub ranked: Vec<RankedSeries>,
    /// Series with R²(r) > 0.5.
    pub above_half: usize,
}

/// All series sorted by R²(r), descending.
pub fn r2_ranking(t: &Mr2Table) -> R2Ranking {
    let ranked = ranked(t, |row| row.r2.last().copied().unwrap_or(0.0));
    let above_half = ranked.iter().filter(|s| s.value > 0.5).count();
    R2Ranking { ranked, above_half }
}
