use ndarray::Array2;

use crate::error::FactorError;

/// Upper bound on full cyclic sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

const REL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;

/// Spectrum of a symmetric matrix: eigenvalues in descending order and the
/// matching orthonormal eigenvectors stored as columns.
///
/// Each eigenvector is signed so that its largest-magnitude entry is positive
/// (lowest index on ties), which makes the decomposition reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Array2<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn total(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// `V diag(λ) V'`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let n = self.dim();
        let v = &self.eigenvectors;
        Array2::from_shape_fn((n, n), |(i, j)| {
            (0..n).map(|k| v[[i, k]] * self.eigenvalues[k] * v[[j, k]]).sum()
        })
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps over every off-diagonal pair in row order until the largest
/// off-diagonal magnitude drops below `1e-12` times the Frobenius norm of the
/// input, or [`MAX_SWEEPS`] sweeps have run.
pub fn sym_eigen(s: &Array2<f64>) -> Result<EigenDecomposition, FactorError> {
    let (rows, cols) = s.dim();
    if rows != cols {
        return Err(FactorError::NotSquare { rows, cols });
    }
    let n = rows;
    let scale = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (s[[i, j]] - s[[j, i]]).abs();
            if !(gap <= SYMMETRY_TOL * scale.max(1.0)) {
                return Err(FactorError::NotSymmetric { i, j, gap });
            }
        }
    }

    // row-major working copies; a is kept symmetric, v accumulates rotations
    let mut a: Vec<f64> = s.iter().copied().collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = REL_TOL * scale;

    let max_off = |a: &[f64]| {
        let mut m = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                m = m.max(a[i * n + j].abs());
            }
        }
        m
    };

    let mut sweeps = 0;
    loop {
        if max_off(&a) <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += a[i * n + j] * a[i * n + j];
                    }
                }
            }
            return Err(FactorError::NoConvergence {
                sweeps,
                off_norm: off.sqrt(),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - sn * akq;
                    a[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sn * aqk;
                    a[q * n + k] = sn * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&k| a[k * n + k]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        let mut lead = 0;
        for i in 1..n {
            if v[i * n + k].abs() > v[lead * n + k].abs() {
                lead = i;
            }
        }
        let sign = if v[lead * n + k] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[[i, col]] = sign * v[i * n + k];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
