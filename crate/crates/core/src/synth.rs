//! Planted factor-model panels and recovery diagnostics.
//!
//! Generation is reproducible from the seed alone: a xoshiro256++ generator is
//! seeded through SplitMix64 (`seed_from_u64`), each uniform is
//! `(next_u64 >> 11) · 2⁻⁵³`, and standard normals come in pairs from the
//! Box–Muller transform `√(-2 ln(1 - u₁)) · (cos 2πu₂, sin 2πu₂)`.
//! Draws are consumed in order: loadings (q×r, row-major), factors (r×T,
//! row-major), then noise (q×T, row-major; drawn even when `noise_sd = 0`).

use ndarray::{Array2, ArrayView2, Axis};
use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{FactorError, SynthError};
use crate::factor::{covariance, select_from_eigen, sym_eigen, FactorModel, Penalty};
use crate::month::Month;
use crate::panel::{standardize, Panel, SeriesMeta, TransformCode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub q: usize,
    pub t: usize,
    pub r_true: usize,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.q < 2 || self.t < 2 {
            return Err(SynthError::TooSmall { q: self.q, t: self.t });
        }
        let max = self.q.min(self.t);
        if self.r_true == 0 || self.r_true > max {
            return Err(SynthError::FactorCount {
                r_true: self.r_true,
                max,
            });
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(SynthError::Noise(self.noise_sd));
        }
        Ok(())
    }
}

struct NormalStream {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl NormalStream {
    fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Array2<f64> {
        let mut m = Array2::zeros((rows, cols));
        for v in m.iter_mut() {
            *v = self.next();
        }
        m
    }
}

/// A generated panel with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPanel {
    pub panel: Panel,
    /// q×r
    pub loadings: Array2<f64>,
    /// r×T
    pub factors: Array2<f64>,
}

/// First month of every synthetic panel.
pub fn synth_start() -> Month {
    Month::new(2000, 1).expect("valid month")
}

/// `Y = Λ₀F₀ + noise_sd · ε`, all entries of Λ₀, F₀ and ε standard normal,
/// returned as a tcode-1 panel with series `S001`, `S002`, ...
pub fn generate(spec: &SynthSpec) -> Result<SynthPanel, SynthError> {
    spec.validate()?;
    let mut normals = NormalStream::new(spec.seed);
    let loadings = normals.matrix(spec.q, spec.r_true);
    let factors = normals.matrix(spec.r_true, spec.t);
    let noise = normals.matrix(spec.q, spec.t);
    let y = loadings.dot(&factors) + noise * spec.noise_sd;

    let mut dates = Vec::with_capacity(spec.t);
    let mut d = synth_start();
    for _ in 0..spec.t {
        dates.push(d);
        d = d.succ();
    }
    let width = spec.q.to_string().len().max(3);
    let meta = (0..spec.q)
        .map(|i| SeriesMeta::new(format!("S{:0width$}", i + 1), TransformCode::LEVEL))
        .collect();
    let values = y
        .rows()
        .into_iter()
        .map(|r| r.iter().copied().map(Some).collect())
        .collect();
    let panel = Panel::new(dates, meta, values).expect("generated panel is well formed");
    Ok(SynthPanel {
        panel,
        loadings,
        factors,
    })
}

fn centered(x: ArrayView2<f64>) -> Array2<f64> {
    let means = x.mean_axis(Axis(1)).expect("non-empty rows");
    let mut out = x.to_owned();
    for (mut row, m) in out.rows_mut().into_iter().zip(means.iter()) {
        row.mapv_inplace(|v| v - m);
    }
    out
}

/// Rows of `L⁻¹ x` where `x x' = L L'`, i.e. an orthonormal basis of the row space.
fn whiten(x: &Array2<f64>, label: &str) -> Result<Array2<f64>, FactorError> {
    let r = x.nrows();
    let g = x.dot(&x.t());
    let scale = (0..r).map(|i| g[[i, i]]).fold(0.0, f64::max);
    let mut l = Array2::<f64>::zeros((r, r));
    for i in 0..r {
        for j in 0..=i {
            let mut sum = g[[i, j]];
            for p in 0..j {
                sum -= l[[i, p]] * l[[j, p]];
            }
            if i == j {
                if !(sum > 1e-12 * scale) {
                    return Err(FactorError::RankDeficient(format!("{label} rows are linearly dependent")));
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    let mut w = x.clone();
    for i in 0..r {
        for p in 0..i {
            let lip = l[[i, p]];
            let (head, mut tail) = w.view_mut().split_at(Axis(0), i);
            tail.row_mut(0).scaled_add(-lip, &head.row(p));
        }
        let d = l[[i, i]];
        w.row_mut(i).mapv_inplace(|v| v / d);
    }
    Ok(w)
}

/// Mean squared canonical correlation between the row spaces of two r×T
/// matrices (rows are demeaned first). Equals 1 when the spaces coincide and
/// 0 when they are orthogonal; unaffected by invertible re-mixing of rows.
pub fn subspace_fit(truth: &Array2<f64>, estimate: &Array2<f64>) -> Result<f64, FactorError> {
    if truth.dim() != estimate.dim() {
        return Err(FactorError::Dimension(format!(
            "{:?} vs {:?}",
            truth.dim(),
            estimate.dim()
        )));
    }
    let (r, t) = truth.dim();
    if r == 0 || t < 2 {
        return Err(FactorError::RankDeficient("empty factor matrix".into()));
    }
    let a = whiten(&centered(truth.view()), "first")?;
    let b = whiten(&centered(estimate.view()), "second")?;
    let m = a.dot(&b.t());
    let fit = m.iter().map(|v| v * v).sum::<f64>() / r as f64;
    Ok(fit.min(1.0))
}

/// Outcome of estimating one synthetic panel.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOutcome {
    pub seed: u64,
    /// `(penalty, r̂)` in the order requested.
    pub selected: Vec<(Penalty, usize)>,
    /// Fit between true factors and the r_true-factor estimate.
    pub fit: f64,
}

/// Generates a panel, selects r̂ by each penalty and scores the r_true-factor estimate.
pub fn run_recovery(
    spec: &SynthSpec,
    rmax: usize,
    penalties: &[Penalty],
) -> Result<RecoveryOutcome, Box<dyn std::error::Error + Send + Sync>> {
    let synth = generate(spec)?;
    let z = standardize(&synth.panel)?;
    let e = sym_eigen(&covariance(&z)?)?;
    let report = select_from_eigen(&z, &e, rmax, penalties)?;
    let m = FactorModel::from_eigen(&z, &e, spec.r_true)?;
    let fit = subspace_fit(&synth.factors, &m.factors)?;
    Ok(RecoveryOutcome {
        seed: spec.seed,
        selected: report.selected,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> SynthSpec {
        SynthSpec {
            q: 12,
            t: 30,
            r_true: 2,
            noise_sd: 0.5,
            seed,
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate(&spec(9)).unwrap(), generate(&spec(9)).unwrap());
        assert_ne!(generate(&spec(9)).unwrap().panel, generate(&spec(10)).unwrap().panel);
    }

    #[test]
    fn normals_look_standard() {
        let mut s = NormalStream::new(1);
        let xs: Vec<f64> = (0..20000).map(|_| s.next()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03, "{mean}");
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec(1);
        s.r_true = 13;
        assert_eq!(s.validate(), Err(SynthError::FactorCount { r_true: 13, max: 12 }));
        s.r_true = 0;
        assert!(generate(&s).is_err());
        let mut s = spec(1);
        s.noise_sd = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn fit_extremes() {
        let t = 24;
        let a = Array2::from_shape_fn((2, t), |(i, j)| ((j + 1) as f64 * (i + 1) as f64 * 0.5).sin());
        assert!((subspace_fit(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        // harmonics over a full period are mutually orthogonal and mean-zero
        let w = std::f64::consts::TAU / t as f64;
        let x = Array2::from_shape_fn((2, t), |(i, j)| ((i + 1) as f64 * w * j as f64).sin());
        let y = Array2::from_shape_fn((2, t), |(i, j)| ((i + 1) as f64 * w * j as f64).cos());
        assert!(subspace_fit(&x, &y).unwrap() < 1e-12);
        let flat = Array2::from_shape_fn((2, t), |(i, j)| if i == 0 { j as f64 } else { 2.0 * j as f64 });
        assert!(matches!(subspace_fit(&flat, &a), Err(FactorError::RankDeficient(_))));
        assert!(subspace_fit(&a, &Array2::zeros((3, t))).is_err());
    }
}
