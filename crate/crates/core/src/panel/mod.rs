//! Monthly macro panels: metadata, CSV ingestion, stationarity transforms,
//! balanced-window extraction and standardization.

mod balance;
mod io;
mod standardize;
mod transform;

use std::collections::HashSet;
use std::fmt;

pub use balance::extract_balanced;
pub use io::{parse_metadata_csv, parse_panel_csv, write_panel_csv, MetadataRecord, MetadataTable};
pub use standardize::{standardize, standardize_matrix, StandardizedPanel};
pub use transform::{apply_tcode, transform_panel, TransformError};

use crate::error::PanelError;
use crate::month::Month;

/// Stationarity transformation code, FRED-MD numbering.
///
/// | code | transform              |
/// |------|------------------------|
/// | 1    | x                      |
/// | 2    | Δx                     |
/// | 3    | Δ²x                    |
/// | 4    | log x                  |
/// | 5    | Δ log x                |
/// | 6    | Δ² log x               |
/// | 7    | Δ(x_t / x_{t-1} - 1)   |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransformCode(u8);

impl TransformCode {
    pub const LEVEL: Self = Self(1);

    pub fn new(code: u8) -> Option<Self> {
        (1..=7).contains(&code).then_some(Self(code))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Whether the transform takes logs, requiring strictly positive input.
    pub fn is_log(self) -> bool {
        self.0 >= 4
    }

    /// Number of leading observations consumed by differencing.
    pub fn lag(self) -> usize {
        match self.0 {
            1 | 4 => 0,
            2 | 5 => 1,
            _ => 2,
        }
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (1..=7).map(Self)
    }
}

impl fmt::Display for TransformCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identity of one series in the panel.
///
/// `group` is 1..=7 when known and 0 when no sidecar metadata covered the series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMeta {
    pub id: Option<u32>,
    pub mnemonic: String,
    pub tcode: TransformCode,
    pub group: u8,
}

impl SeriesMeta {
    pub fn new(mnemonic: impl Into<String>, tcode: TransformCode) -> Self {
        Self {
            id: None,
            mnemonic: mnemonic.into(),
            tcode,
            group: 0,
        }
    }
}

/// A dated q×T grid of observations, one row per series.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    dates: Vec<Month>,
    meta: Vec<SeriesMeta>,
    values: Vec<Vec<Option<f64>>>,
}

impl Panel {
    /// Builds a panel, checking shape, date continuity, mnemonic uniqueness and groups.
    pub fn new(
        dates: Vec<Month>,
        meta: Vec<SeriesMeta>,
        values: Vec<Vec<Option<f64>>>,
    ) -> Result<Self, PanelError> {
        if values.len() != meta.len() {
            return Err(PanelError::Cell {
                row: 0,
                col: 0,
                message: format!("{} metadata entries for {} series", meta.len(), values.len()),
            });
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != dates.len() {
                return Err(PanelError::Ragged {
                    row: i + 1,
                    expected: dates.len(),
                    found: row.len(),
                });
            }
        }
        for (t, w) in dates.windows(2).enumerate() {
            if w[0].succ() != w[1] {
                return Err(PanelError::NonConsecutive {
                    row: t + 2,
                    previous: w[0],
                    found: w[1],
                });
            }
        }
        let mut seen = HashSet::new();
        for (i, m) in meta.iter().enumerate() {
            if m.mnemonic.trim().is_empty() {
                return Err(PanelError::Cell {
                    row: 1,
                    col: i + 2,
                    message: "empty mnemonic".into(),
                });
            }
            if !seen.insert(m.mnemonic.as_str()) {
                return Err(PanelError::DuplicateMnemonic {
                    col: i + 2,
                    mnemonic: m.mnemonic.clone(),
                });
            }
            if m.group > 7 {
                return Err(PanelError::Metadata {
                    row: i + 1,
                    message: format!("group {} outside 1..=7", m.group),
                });
            }
        }
        Ok(Self {
            dates,
            meta,
            values,
        })
    }

    /// Number of series (q).
    pub fn n_series(&self) -> usize {
        self.meta.len()
    }

    /// Number of periods (T).
    pub fn n_periods(&self) -> usize {
        self.dates.len()
    }

    pub fn dates(&self) -> &[Month] {
        &self.dates
    }

    pub fn meta(&self) -> &[SeriesMeta] {
        &self.meta
    }

    pub fn values(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[Option<f64>] {
        &self.values[i]
    }

    pub fn index_of(&self, mnemonic: &str) -> Option<usize> {
        self.meta.iter().position(|m| m.mnemonic == mnemonic)
    }

    pub fn missing_count(&self, i: usize) -> usize {
        self.values[i].iter().filter(|v| v.is_none()).count()
    }

    pub(crate) fn into_parts(self) -> (Vec<Month>, Vec<SeriesMeta>, Vec<Vec<Option<f64>>>) {
        (self.dates, self.meta, self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tcode_range() {
        assert!(TransformCode::new(0).is_none());
        assert!(TransformCode::new(8).is_none());
        assert_eq!(TransformCode::all().count(), 7);
        let lags: Vec<usize> = TransformCode::all().map(TransformCode::lag).collect();
        assert_eq!(lags, vec![0, 1, 2, 0, 1, 2, 2]);
    }

    #[test]
    fn rejects_date_gap() {
        let d = vec![Month::new(2020, 1).unwrap(), Month::new(2020, 3).unwrap()];
        let err = Panel::new(d, vec![SeriesMeta::new("A", TransformCode::LEVEL)], vec![vec![Some(1.0), Some(2.0)]])
            .unwrap_err();
        assert!(matches!(err, PanelError::NonConsecutive { row: 2, .. }));
    }
}
