//! Approximate factor models for FRED-MD style monthly macro panels.
//!
//! The pipeline runs: [`panel::parse_panel_csv`] → [`panel::transform_panel`] →
//! [`panel::extract_balanced`] → [`panel::standardize`] → [`factor`] estimation
//! and selection → [`analysis`] of variance shares, rankings and diffusion indexes.
//! [`synth`] plants known factor structure for recovery checks.

pub mod analysis;
pub mod error;
pub mod factor;
pub mod month;
pub mod panel;
pub mod synth;

pub use error::{FactorError, PanelError, SynthError};
pub use month::Month;

/// Sidecar metadata (id, mnemonic, tcode, group, description) for the 88 KRED series.
pub const KRED_METADATA_CSV: &str = include_str!("../../../data/kred_meta.csv");

/// Series left out of the balanced 2009-09..2024-12 panel.
pub const KRED_DROPPED: [&str; 8] = [
    "HOUST", "HOUSTNE", "HOUSTMW", "HOUSTS", "HOUSTW", "RETAILx", "TOTRESNS", "EXCAUSx",
];
