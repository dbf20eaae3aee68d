use super::{Panel, TransformCode};
use crate::error::PanelError;

/// A log-based transform met a non-positive observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformError {
    pub index: usize,
    pub value: f64,
    pub code: TransformCode,
}

fn diff(x: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut out = vec![None; x.len()];
    for t in 1..x.len() {
        out[t] = match (x[t], x[t - 1]) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        };
    }
    out
}

/// Applies a stationarity transform; output has the input's length with the
/// leading `code.lag()` positions missing.
pub fn apply_tcode(x: &[Option<f64>], code: TransformCode) -> Result<Vec<Option<f64>>, TransformError> {
    if code.is_log() {
        if let Some((index, value)) = x
            .iter()
            .enumerate()
            .find_map(|(t, v)| v.filter(|&v| v <= 0.0).map(|v| (t, v)))
        {
            return Err(TransformError { index, value, code });
        }
    }
    let logged = || x.iter().map(|v| v.map(f64::ln)).collect::<Vec<_>>();
    let out = match code.get() {
        1 => x.to_vec(),
        2 => diff(x),
        3 => diff(&diff(x)),
        4 => logged(),
        5 => diff(&logged()),
        6 => diff(&diff(&logged())),
        7 => {
            let mut growth = vec![None; x.len()];
            for t in 1..x.len() {
                growth[t] = match (x[t], x[t - 1]) {
                    (Some(a), Some(b)) => Some(a / b - 1.0),
                    _ => None,
                };
            }
            diff(&growth)
        }
        _ => unreachable!("TransformCode is validated on construction"),
    };
    Ok(out)
}

/// Applies each series' own tcode to its row.
pub fn transform_panel(panel: &Panel) -> Result<Panel, PanelError> {
    let values = panel
        .values()
        .iter()
        .zip(panel.meta())
        .map(|(row, m)| {
            apply_tcode(row, m.tcode).map_err(|e| PanelError::NonPositive {
                mnemonic: m.mnemonic.clone(),
                index: e.index,
                value: e.value,
                code: e.code.get(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Panel::new(panel.dates().to_vec(), panel.meta().to_vec(), values)
}
