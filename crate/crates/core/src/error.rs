use thiserror::Error;

use crate::month::Month;

/// Errors raised while reading or preparing a panel.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PanelError {
    #[error("empty input: expected a header row, a transform row and at least one date row")]
    Empty,
    #[error("row {row}: expected {expected} cells, found {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {col}: {message}")]
    Cell {
        row: usize,
        col: usize,
        message: String,
    },
    #[error("row {row}, column {col}: transform code {value:?} is not an integer in 1..=7")]
    BadTransformCode {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("column {col}: duplicate mnemonic {mnemonic:?}")]
    DuplicateMnemonic { col: usize, mnemonic: String },
    #[error("row {row}: date {found} does not follow {previous} (months must be consecutive)")]
    NonConsecutive {
        row: usize,
        previous: Month,
        found: Month,
    },
    #[error("metadata row {row}: {message}")]
    Metadata { row: usize, message: String },
    #[error("series {mnemonic}: non-positive value {value} at date index {index} under log transform code {code}")]
    NonPositive {
        mnemonic: String,
        index: usize,
        value: f64,
        code: u8,
    },
    #[error("window {start}..{end} is invalid for panel range {first}..{last}")]
    BadWindow {
        start: Month,
        end: Month,
        first: Month,
        last: Month,
    },
    #[error("unknown mnemonic in drop list: {0}")]
    UnknownMnemonic(String),
    #[error("balanced panel still has {} missing cell(s): {}", .0.len(), format_missing(.0))]
    MissingCells(Vec<(String, Month)>),
    #[error("series {0} is constant; cannot standardize")]
    ConstantSeries(String),
    #[error("panel has no series left after dropping")]
    NoSeries,
}

fn format_missing(cells: &[(String, Month)]) -> String {
    cells
        .iter()
        .map(|(m, d)| format!("{m}@{d}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Errors raised by the factor engine and downstream analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("factor count {r} outside 1..={max}")]
    FactorCount { r: usize, max: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: |S[{i},{j}] - S[{j},{i}]| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("panel too small: need at least 2 series and 2 periods, got {q}x{t}")]
    TooSmall { q: usize, t: usize },
    #[error("series index {index} out of range for {q} series")]
    SeriesIndex { index: usize, q: usize },
    #[error("factor cross-moment matrix is singular at k={k}")]
    Singular { k: usize },
    #[error("regression inputs are not mean-zero (|mean| = {mean:e})")]
    NotCentered { mean: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rank-deficient input: {0}")]
    RankDeficient(String),
    #[error("no penalties requested")]
    NoPenalties,
}

/// Errors raised while building a synthetic specification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("r_true = {r_true} must be in 1..=min(q, T) = {max}")]
    FactorCount { r_true: usize, max: usize },
    #[error("q and T must be at least 2 (got q={q}, T={t})")]
    TooSmall { q: usize, t: usize },
    #[error("noise_sd must be finite and non-negative (got {0})")]
    Noise(f64),
}
