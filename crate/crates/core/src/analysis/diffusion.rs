use ndarray::Array2;

use super::exact::ExactSum;
use crate::factor::FactorModel;

/// Cumulated factors: index k at time t is the sum of factor k over 1..=t.
///
/// Sums are accumulated exactly and rounded once per entry, so differencing
/// the stored sums recovers each factor value bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionIndexSet {
    /// r×T rounded index values.
    pub values: Array2<f64>,
    sums: Vec<Vec<ExactSum>>,
}

impl DiffusionIndexSet {
    pub fn n_factors(&self) -> usize {
        self.values.nrows()
    }

    /// First difference of index `k` (0-based), with the first period measured from zero.
    pub fn first_difference(&self, k: usize) -> Vec<f64> {
        let zero = ExactSum::new();
        let sums = &self.sums[k];
        (0..sums.len())
            .map(|t| {
                let prev = if t == 0 { &zero } else { &sums[t - 1] };
                sums[t].difference(prev).value()
            })
            .collect()
    }
}

pub fn diffusion_indexes(m: &FactorModel) -> DiffusionIndexSet {
    let (r, t) = m.factors.dim();
    let mut values = Array2::zeros((r, t));
    let mut sums = Vec::with_capacity(r);
    for k in 0..r {
        let mut acc = ExactSum::new();
        let mut row = Vec::with_capacity(t);
        for j in 0..t {
            acc.add(m.factors[[k, j]]);
            values[[k, j]] = acc.value();
            row.push(acc.clone());
        }
        sums.push(row);
    }
    DiffusionIndexSet { values, sums }
}
