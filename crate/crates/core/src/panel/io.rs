use std::collections::HashMap;

use csv::{ReaderBuilder, StringRecord};

use super::{Panel, SeriesMeta, TransformCode};
use crate::error::PanelError;
use crate::month::Month;

/// One row of the sidecar metadata table (`id,mnemonic,tcode,group,description`).
#[derive(Debug, Clone, PartialEq)]
pub struct MetadataRecord {
    pub id: u32,
    pub mnemonic: String,
    pub tcode: TransformCode,
    pub group: u8,
    pub description: String,
}

/// Sidecar metadata keyed by mnemonic.
#[derive(Debug, Clone, Default)]
pub struct MetadataTable {
    records: Vec<MetadataRecord>,
    by_mnemonic: HashMap<String, usize>,
}

impl MetadataTable {
    pub fn get(&self, mnemonic: &str) -> Option<&MetadataRecord> {
        self.by_mnemonic.get(mnemonic).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[MetadataRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "NA"
}

fn is_blank(rec: &StringRecord) -> bool {
    rec.iter().all(|c| c.trim().is_empty())
}

fn line_of(rec: &StringRecord, fallback: usize) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(fallback)
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> PanelError {
    let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
    PanelError::Cell {
        row,
        col: 0,
        message: e.to_string(),
    }
}

/// Parses the sidecar metadata table.
pub fn parse_metadata_csv(text: &str) -> Result<MetadataTable, PanelError> {
    let mut rdr = ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or(PanelError::Metadata {
            row: 1,
            message: format!("missing column {name:?}"),
        })
    };
    let (c_id, c_mn, c_tc, c_gr) = (col("id")?, col("mnemonic")?, col("tcode")?, col("group")?);
    let c_desc = headers.iter().position(|h| h == "description");

    let mut table = MetadataTable::default();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        if is_blank(&rec) {
            continue;
        }
        let row = line_of(&rec, k + 2);
        let field = |c: usize| rec.get(c).unwrap_or("");
        let bad = |what: &str, v: &str| PanelError::Metadata {
            row,
            message: format!("invalid {what} {v:?}"),
        };
        let id: u32 = field(c_id)
            .parse()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| bad("id", field(c_id)))?;
        let mnemonic = field(c_mn).to_string();
        if mnemonic.is_empty() {
            return Err(bad("mnemonic", ""));
        }
        let tcode = field(c_tc)
            .parse()
            .ok()
            .and_then(TransformCode::new)
            .ok_or_else(|| bad("tcode", field(c_tc)))?;
        let group: u8 = field(c_gr)
            .parse()
            .ok()
            .filter(|g| (1..=7).contains(g))
            .ok_or_else(|| bad("group", field(c_gr)))?;
        let description = c_desc.map(|c| field(c).to_string()).unwrap_or_default();
        if table.by_mnemonic.contains_key(&mnemonic) {
            return Err(PanelError::Metadata {
                row,
                message: format!("duplicate mnemonic {mnemonic:?}"),
            });
        }
        table.by_mnemonic.insert(mnemonic.clone(), table.records.len());
        table.records.push(MetadataRecord {
            id,
            mnemonic,
            tcode,
            group,
            description,
        });
    }
    Ok(table)
}

/// Parses a FRED-MD style panel.
///
/// Layout: a header row (date label, then mnemonics), a `Transform:` row of codes,
/// then one row per month stamped `M/D/YYYY`. Empty cells and `NA` are missing.
/// Fully blank lines are ignored. Row and column numbers in errors are 1-based.
///
/// When `metadata` is given, `id` and `group` are taken from it; series absent from
/// the table keep `group = 0`. A tcode that disagrees with the table is an error.
pub fn parse_panel_csv(text: &str, metadata: Option<&MetadataTable>) -> Result<Panel, PanelError> {
    let mut records = Vec::new();
    for rec in reader(text).records() {
        let rec = rec.map_err(csv_error)?;
        if !is_blank(&rec) {
            records.push(rec);
        }
    }
    let mut it = records.into_iter();
    let header = it.next().ok_or(PanelError::Empty)?;
    let width = header.len();
    if width < 2 {
        return Err(PanelError::Cell {
            row: line_of(&header, 1),
            col: 2,
            message: "header has no series columns".into(),
        });
    }
    let transform = it.next().ok_or(PanelError::Empty)?;
    let trow = line_of(&transform, 2);
    if transform.len() != width {
        return Err(PanelError::Ragged {
            row: trow,
            expected: width,
            found: transform.len(),
        });
    }
    if transform.get(0) != Some("Transform:") {
        return Err(PanelError::Cell {
            row: trow,
            col: 1,
            message: format!("expected \"Transform:\", found {:?}", transform.get(0).unwrap_or("")),
        });
    }

    let mut meta = Vec::with_capacity(width - 1);
    for c in 1..width {
        let mnemonic = header[c].to_string();
        if mnemonic.is_empty() {
            return Err(PanelError::Cell {
                row: line_of(&header, 1),
                col: c + 1,
                message: "empty mnemonic".into(),
            });
        }
        let raw = &transform[c];
        let tcode = raw
            .parse::<u8>()
            .ok()
            .and_then(TransformCode::new)
            .ok_or_else(|| PanelError::BadTransformCode {
                row: trow,
                col: c + 1,
                value: raw.to_string(),
            })?;
        let mut m = SeriesMeta::new(mnemonic, tcode);
        if let Some(rec) = metadata.and_then(|t| t.get(&m.mnemonic)) {
            if rec.tcode != tcode {
                return Err(PanelError::Cell {
                    row: trow,
                    col: c + 1,
                    message: format!(
                        "tcode {tcode} for {} disagrees with metadata tcode {}",
                        m.mnemonic, rec.tcode
                    ),
                });
            }
            m.id = Some(rec.id);
            m.group = rec.group;
        }
        meta.push(m);
    }

    let mut dates: Vec<Month> = Vec::new();
    let mut values = vec![Vec::new(); width - 1];
    for rec in it {
        let row = line_of(&rec, dates.len() + 3);
        if rec.len() != width {
            return Err(PanelError::Ragged {
                row,
                expected: width,
                found: rec.len(),
            });
        }
        let date = Month::parse_mdy(&rec[0]).ok_or_else(|| PanelError::Cell {
            row,
            col: 1,
            message: format!("invalid date {:?}, expected M/D/YYYY", &rec[0]),
        })?;
        if let Some(&prev) = dates.last() {
            if prev.succ() != date {
                return Err(PanelError::NonConsecutive {
                    row,
                    previous: prev,
                    found: date,
                });
            }
        }
        dates.push(date);
        for c in 1..width {
            let cell = &rec[c];
            let v = if is_missing(cell) {
                None
            } else {
                let x: f64 = cell
                    .parse()
                    .ok()
                    .filter(|x: &f64| x.is_finite())
                    .ok_or_else(|| PanelError::Cell {
                        row,
                        col: c + 1,
                        message: format!("non-numeric value {cell:?}"),
                    })?;
                Some(x)
            };
            values[c - 1].push(v);
        }
    }
    Panel::new(dates, meta, values)
}

/// Serializes a panel in the same layout [`parse_panel_csv`] reads.
pub fn write_panel_csv(panel: &Panel) -> String {
    let mut out = String::from("sasdate");
    for m in panel.meta() {
        out.push(',');
        out.push_str(&m.mnemonic);
    }
    out.push_str("\nTransform:");
    for m in panel.meta() {
        out.push(',');
        out.push_str(&m.tcode.to_string());
    }
    out.push('\n');
    for (t, d) in panel.dates().iter().enumerate() {
        out.push_str(&d.to_mdy());
        for row in panel.values() {
            out.push(',');
            if let Some(v) = row[t] {
                out.push_str(&format!("{v:?}"));
            }
        }
        out.push('\n');
    }
    out
}
