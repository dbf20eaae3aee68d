//! Variance attribution per factor and series, rankings, scree data and
//! diffusion indexes.

mod diffusion;
mod exact;
mod r2;

pub use diffusion::{diffusion_indexes, DiffusionIndexSet};
pub use exact::ExactSum;
pub use r2::{mr2_table, r2_by_k, r2_ranking, top_n, Mr2Row, Mr2Table, R2Ranking, RankedSeries};

use crate::factor::EigenDecomposition;

/// One bar of a scree plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreeRow {
    pub rank: usize,
    pub eigenvalue: f64,
    pub share: f64,
    pub cumulative: f64,
}

/// Eigenvalues with their individual and cumulative variance shares.
pub fn scree_data(e: &EigenDecomposition) -> Vec<ScreeRow> {
    let total = e.total();
    let mut running = 0.0;
    e.eigenvalues
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            running += lambda;
            ScreeRow {
                rank: j + 1,
                eigenvalue: lambda,
                share: lambda / total,
                cumulative: running / total,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::sym_eigen;
    use ndarray::Array2;

    #[test]
    fn identity_scree() {
        let rows = scree_data(&sym_eigen(&Array2::eye(4)).unwrap());
        let cum: Vec<f64> = rows.iter().map(|r| r.cumulative).collect();
        assert_eq!(cum, vec![0.25, 0.5, 0.75, 1.0]);
        assert!(rows.iter().all(|r| r.share == 0.25));
    }

    #[test]
    fn rank_one_scree() {
        let v = [1.0, 2.0, -1.0];
        let s = Array2::from_shape_fn((3, 3), |(i, j)| v[i] * v[j]);
        let rows = scree_data(&sym_eigen(&s).unwrap());
        assert!((rows[0].share - 1.0).abs() < 1e-12);
        assert!((rows[2].cumulative - 1.0).abs() < 1e-10);
    }
}
