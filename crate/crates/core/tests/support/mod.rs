#![allow(dead_code)]

pub mod oracle;

use ndarray::Array2;
use panelfactor::month::Month;
use panelfactor::panel::{standardize_matrix, SeriesMeta, StandardizedPanel, TransformCode};
use rand::Rng;

pub fn months(n: usize) -> Vec<Month> {
    let mut d = vec![Month::new(2001, 1).unwrap()];
    while d.len() < n {
        d.push(d.last().unwrap().succ());
    }
    d
}

pub fn standardized(x: &Array2<f64>) -> StandardizedPanel {
    let meta = (0..x.nrows())
        .map(|i| SeriesMeta::new(format!("V{i:03}"), TransformCode::LEVEL))
        .collect();
    standardize_matrix(months(x.ncols()), meta, x).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, q: usize, t: usize) -> Array2<f64> {
    Array2::from_shape_fn((q, t), |_| rng.gen_range(-1.0..1.0))
}

/// Random panel with a few strong common components so eigenvalues are well separated.
pub fn random_panel(rng: &mut impl Rng, q: usize, t: usize) -> StandardizedPanel {
    let k = 3.min(q);
    let l = random_matrix(rng, q, k);
    let f = random_matrix(rng, k, t);
    let noise = random_matrix(rng, q, t);
    standardized(&(l.dot(&f) * 2.0 + noise))
}
