use std::collections::HashSet;

use super::Panel;
use crate::error::PanelError;
use crate::month::Month;

/// Restricts `panel` to `[start, end]` minus the `drop` series and checks that no
/// cell is missing. Transform first, then window, so that differencing draws on
/// history before `start`.
pub fn extract_balanced(
    panel: &Panel,
    start: Month,
    end: Month,
    drop: &[String],
) -> Result<Panel, PanelError> {
    let (first, last) = match (panel.dates().first(), panel.dates().last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => {
            return Err(PanelError::Empty);
        }
    };
    if start > end || start < first || end > last {
        return Err(PanelError::BadWindow {
            start,
            end,
            first,
            last,
        });
    }
    for name in drop {
        if panel.index_of(name).is_none() {
            return Err(PanelError::UnknownMnemonic(name.clone()));
        }
    }
    let dropped: HashSet<&str> = drop.iter().map(String::as_str).collect();
    let lo = first.months_until(start) as usize;
    let hi = first.months_until(end) as usize + 1;

    let mut meta = Vec::new();
    let mut values = Vec::new();
    let mut offenders = Vec::new();
    for (m, row) in panel.meta().iter().zip(panel.values()) {
        if dropped.contains(m.mnemonic.as_str()) {
            continue;
        }
        let window = row[lo..hi].to_vec();
        for (t, v) in window.iter().enumerate() {
            if v.is_none() {
                offenders.push((m.mnemonic.clone(), panel.dates()[lo + t]));
            }
        }
        meta.push(m.clone());
        values.push(window);
    }
    if !offenders.is_empty() {
        return Err(PanelError::MissingCells(offenders));
    }
    if meta.is_empty() {
        return Err(PanelError::NoSeries);
    }
    Panel::new(panel.dates()[lo..hi].to_vec(), meta, values)
}
