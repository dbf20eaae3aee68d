use ndarray::{s, Array2};

use super::eigen::{sym_eigen, EigenDecomposition};
use crate::error::FactorError;
use crate::panel::StandardizedPanel;

/// Sample covariance `YY'/T` of a standardized panel.
///
/// Each unordered pair is computed once and mirrored, so the result is exactly symmetric.
pub fn covariance(z: &StandardizedPanel) -> Result<Array2<f64>, FactorError> {
    let y = z.data();
    let (q, t) = y.dim();
    if q < 2 || t < 2 {
        return Err(FactorError::TooSmall { q, t });
    }
    let mut cov = Array2::zeros((q, q));
    for i in 0..q {
        let yi = y.row(i);
        for j in i..q {
            let v = yi.dot(&y.row(j)) / t as f64;
            cov[[i, j]] = v;
            cov[[j, i]] = v;
        }
    }
    Ok(cov)
}

/// Share of total variance carried by the leading `r` eigenvalues.
pub fn variance_explained(e: &EigenDecomposition, r: usize) -> Result<f64, FactorError> {
    let q = e.dim();
    if r == 0 || r > q {
        return Err(FactorError::FactorCount { r, max: q });
    }
    Ok(e.eigenvalues[..r].iter().sum::<f64>() / e.total())
}

/// A fitted r-factor model: `Y = loadings · factors + residuals`.
///
/// `loadings = √q · U_r` (q×r) and `factors = loadings' Y / q` (r×T), so
/// `loadings' loadings / q = I_r` and `factors factors' / T = diag(λ_1..λ_r) / q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    pub r: usize,
    pub loadings: Array2<f64>,
    pub factors: Array2<f64>,
    pub residuals: Array2<f64>,
    pub eigenvalues: Vec<f64>,
}

impl FactorModel {
    /// Builds the model from a precomputed decomposition of `covariance(z)`.
    pub fn from_eigen(z: &StandardizedPanel, e: &EigenDecomposition, r: usize) -> Result<Self, FactorError> {
        let y = z.data();
        let (q, t) = y.dim();
        if e.dim() != q {
            return Err(FactorError::Dimension(format!(
                "decomposition of order {} for {q} series",
                e.dim()
            )));
        }
        let max = q.min(t);
        if r == 0 || r > max {
            return Err(FactorError::FactorCount { r, max });
        }
        let loadings = e.eigenvectors.slice(s![.., ..r]).to_owned() * (q as f64).sqrt();
        let factors = loadings.t().dot(y) / q as f64;
        let residuals = y - &loadings.dot(&factors);
        Ok(Self {
            r,
            loadings,
            factors,
            residuals,
            eigenvalues: e.eigenvalues.clone(),
        })
    }

    /// Sum of squared residuals.
    pub fn ssr(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }

    /// Rescales each factor to unit variance over time, moving the scale into
    /// the loadings so the common component is unchanged. Factors with a
    /// non-positive eigenvalue are left as they are.
    pub fn unit_variance(&self) -> Self {
        let q = self.loadings.nrows() as f64;
        let mut out = self.clone();
        for j in 0..self.r {
            let var = self.eigenvalues[j] / q;
            if var > 0.0 {
                let sd = var.sqrt();
                out.factors.row_mut(j).mapv_inplace(|f| f / sd);
                out.loadings.column_mut(j).mapv_inplace(|l| l * sd);
            }
        }
        out
    }
}

/// Fits an r-factor model by principal components of `YY'/T`.
pub fn estimate_factors(z: &StandardizedPanel, r: usize) -> Result<FactorModel, FactorError> {
    let e = sym_eigen(&covariance(z)?)?;
    FactorModel::from_eigen(z, &e, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::month::Month;
    use crate::panel::{standardize_matrix, SeriesMeta, TransformCode};
    use ndarray::array;

    fn panel(x: Array2<f64>) -> StandardizedPanel {
        let mut d = vec![Month::new(2000, 1).unwrap()];
        while d.len() < x.ncols() {
            d.push(d.last().unwrap().succ());
        }
        let meta = (0..x.nrows())
            .map(|i| SeriesMeta::new(format!("X{i}"), TransformCode::LEVEL))
            .collect();
        standardize_matrix(d, meta, &x).unwrap()
    }

    #[test]
    fn identical_rows() {
        let z = panel(array![[1.0, 2.0, 4.0, 3.0], [1.0, 2.0, 4.0, 3.0]]);
        let s = covariance(&z).unwrap();
        for v in s.iter() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mirrored_rows() {
        let z = panel(array![[1.0, 2.0, 4.0, 3.0], [-1.0, -2.0, -4.0, -3.0]]);
        let s = covariance(&z).unwrap();
        assert!((s[[0, 1]] + 1.0).abs() < 1e-12);
        assert_eq!(s[[0, 1]], s[[1, 0]]);
    }

    #[test]
    fn too_small() {
        let z = panel(array![[1.0, 2.0, 4.0]]);
        assert_eq!(covariance(&z), Err(FactorError::TooSmall { q: 1, t: 3 }));
    }

    #[test]
    fn rank_one_panel() {
        let a = [1.0, -2.0, 0.5, 3.0];
        let b = [0.3, 1.2, -0.7, 2.0, -1.1, 0.4];
        let x = Array2::from_shape_fn((4, 6), |(i, t)| a[i] * b[t]);
        let z = panel(x);
        let m = estimate_factors(&z, 1).unwrap();
        assert!((m.eigenvalues[0] - 4.0).abs() < 1e-10);
        assert!(m.residuals.iter().all(|e| e.abs() < 1e-10));
    }

    #[test]
    fn factor_count_bounds() {
        let z = panel(array![[1.0, 2.0, 4.0], [0.0, 1.0, 0.5]]);
        assert!(estimate_factors(&z, 0).is_err());
        assert_eq!(
            estimate_factors(&z, 3).unwrap_err(),
            FactorError::FactorCount { r: 3, max: 2 }
        );
        let e = sym_eigen(&covariance(&z).unwrap()).unwrap();
        assert!((variance_explained(&e, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(variance_explained(&e, 3).is_err());
    }

    #[test]
    fn unit_variance_keeps_common_component() {
        let z = panel(array![
            [1.0, 2.0, 4.0, 3.0, 0.0],
            [0.5, 1.0, -1.0, 2.0, 1.0],
            [3.0, 1.0, 2.0, 0.0, 1.5]
        ]);
        let m = estimate_factors(&z, 2).unwrap();
        let u = m.unit_variance();
        let t = z.n_periods() as f64;
        for j in 0..2 {
            let v = u.factors.row(j).dot(&u.factors.row(j)) / t;
            assert!((v - 1.0).abs() < 1e-10);
        }
        let c1 = m.loadings.dot(&m.factors);
        let c2 = u.loadings.dot(&u.factors);
        for (a, b) in c1.iter().zip(c2.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
