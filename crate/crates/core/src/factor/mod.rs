//! Principal-components estimation of an approximate factor model and
//! selection of the factor count by information criteria.

mod eigen;
mod ic;
mod model;

pub use eigen::{sym_eigen, EigenDecomposition, MAX_SWEEPS};
pub use ic::{argmin_ic, ic_value, select_from_eigen, select_num_factors, IcReport, IcValue, Penalty, DEFAULT_RMAX, EXACT_FIT_TOL};
pub use model::{covariance, estimate_factors, variance_explained, FactorModel};
