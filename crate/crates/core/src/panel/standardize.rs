use ndarray::Array2;

use super::{Panel, SeriesMeta};
use crate::error::PanelError;
use crate::month::Month;

const MIN_SD: f64 = 1e-12;

/// A balanced panel with every row centred and scaled to unit second moment
/// (denominator T), so that `trace(YY'/T) = q`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedPanel {
    dates: Vec<Month>,
    meta: Vec<SeriesMeta>,
    data: Array2<f64>,
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl StandardizedPanel {
    /// The q×T matrix Y.
    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn dates(&self) -> &[Month] {
        &self.dates
    }

    pub fn meta(&self) -> &[SeriesMeta] {
        &self.meta
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sds(&self) -> &[f64] {
        &self.sds
    }

    pub fn n_series(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_periods(&self) -> usize {
        self.data.ncols()
    }

    /// Maps back to the original units: `z * sd + mean`.
    pub fn unstandardize(&self) -> Array2<f64> {
        let mut out = self.data.clone();
        for (i, mut row) in out.rows_mut().into_iter().enumerate() {
            row.mapv_inplace(|z| z * self.sds[i] + self.means[i]);
        }
        out
    }
}

/// Centres and scales each row of a balanced panel.
pub fn standardize(panel: &Panel) -> Result<StandardizedPanel, PanelError> {
    let q = panel.n_series();
    let t = panel.n_periods();
    if q == 0 || t == 0 {
        return Err(PanelError::Empty);
    }
    let mut data = Array2::zeros((q, t));
    let mut means = Vec::with_capacity(q);
    let mut sds = Vec::with_capacity(q);
    for (i, (row, m)) in panel.values().iter().zip(panel.meta()).enumerate() {
        let mut xs = Vec::with_capacity(t);
        for (k, v) in row.iter().enumerate() {
            match v {
                Some(x) => xs.push(*x),
                None => return Err(PanelError::MissingCells(vec![(m.mnemonic.clone(), panel.dates()[k])])),
            }
        }
        let mean = xs.iter().sum::<f64>() / t as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / t as f64;
        let sd = var.sqrt();
        if !(sd >= MIN_SD) {
            return Err(PanelError::ConstantSeries(m.mnemonic.clone()));
        }
        for (k, x) in xs.iter().enumerate() {
            data[[i, k]] = (x - mean) / sd;
        }
        means.push(mean);
        sds.push(sd);
    }
    let (dates, meta, _) = panel.clone().into_parts();
    Ok(StandardizedPanel {
        dates,
        meta,
        data,
        means,
        sds,
    })
}

/// Builds a standardized panel directly from a fully observed matrix (rows are series).
pub fn standardize_matrix(
    dates: Vec<Month>,
    meta: Vec<SeriesMeta>,
    data: &Array2<f64>,
) -> Result<StandardizedPanel, PanelError> {
    let values = data
        .rows()
        .into_iter()
        .map(|r| r.iter().copied().map(Some).collect())
        .collect();
    standardize(&Panel::new(dates, meta, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::TransformCode;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn months(n: usize) -> Vec<Month> {
        let mut d = vec![Month::new(2000, 1).unwrap()];
        while d.len() < n {
            d.push(d.last().unwrap().succ());
        }
        d
    }

    fn meta(q: usize) -> Vec<SeriesMeta> {
        (0..q).map(|i| SeriesMeta::new(format!("X{i}"), TransformCode::LEVEL)).collect()
    }

    #[test]
    fn two_point_row() {
        let z = standardize_matrix(months(2), meta(1), &ndarray::array![[-1.0, 1.0]]).unwrap();
        assert_eq!(z.data(), &ndarray::array![[-1.0, 1.0]]);
    }

    #[test]
    fn constant_row_is_rejected() {
        let err = standardize_matrix(months(3), meta(2), &ndarray::array![[1.0, 2.0, 4.0], [3.0, 3.0, 3.0]])
            .unwrap_err();
        assert_eq!(err, PanelError::ConstantSeries("X1".into()));
    }

    #[test]
    fn random_panel_moments_and_inverse() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        let x = Array2::from_shape_fn((5, 20), |_| rng.gen_range(-50.0..50.0) + 3.0);
        let z = standardize_matrix(months(20), meta(5), &x).unwrap();
        for i in 0..5 {
            let mut s = 0.0;
            let mut s2 = 0.0;
            for t in 0..20 {
                s += z.data()[[i, t]];
                s2 += z.data()[[i, t]] * z.data()[[i, t]];
            }
            assert!((s / 20.0).abs() < 1e-10);
            assert!((s2 / 20.0 - 1.0).abs() < 1e-10);
        }
        let back = z.unstandardize();
        for (a, b) in back.iter().zip(x.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
