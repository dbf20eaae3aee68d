use std::path::PathBuf;

use panelfactor::factor::{Penalty, DEFAULT_RMAX};
use panelfactor::{Month, KRED_DROPPED};

use crate::output::Format;

/// Effective settings for `validate` and `analyze`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub meta: Option<PathBuf>,
    pub start: Month,
    pub end: Month,
    pub drop: Vec<String>,
    pub rmax: usize,
    pub penalties: Vec<Penalty>,
    pub r: Option<usize>,
    pub out: PathBuf,
    pub format: Format,
    pub unit_variance: bool,
}

pub fn default_start() -> Month {
    Month::new(2009, 9).expect("valid month")
}

pub fn default_end() -> Month {
    Month::new(2024, 12).expect("valid month")
}

pub fn default_drop() -> Vec<String> {
    KRED_DROPPED.iter().map(|s| s.to_string()).collect()
}

impl RunConfig {
    /// Defaults reproduce the published run: 2009-09..2024-12, the eight
    /// incomplete series dropped, rmax 15, all penalties.
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            meta: None,
            start: default_start(),
            end: default_end(),
            drop: default_drop(),
            rmax: DEFAULT_RMAX,
            penalties: Penalty::ALL.to_vec(),
            r: None,
            out: out.into(),
            format: Format::Csv,
            unit_variance: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.start > self.end {
            return Err(format!("window start {} is after end {}", self.start, self.end));
        }
        if self.rmax == 0 {
            return Err("rmax must be at least 1".into());
        }
        if self.r == Some(0) {
            return Err("--r must be at least 1".into());
        }
        if self.penalties.is_empty() && self.r.is_none() {
            return Err("at least one penalty is required unless --r is given".into());
        }
        Ok(())
    }
}

/// Settings for `simulate`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub q: usize,
    pub t: usize,
    pub r_true: usize,
    pub noise_sd: f64,
    pub seed: u64,
    pub reps: usize,
    pub rmax: usize,
    pub penalties: Vec<Penalty>,
    pub out: PathBuf,
    pub format: Format,
}

impl SimConfig {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            q: 80,
            t: 184,
            r_true: 4,
            noise_sd: 1.0,
            seed: 0,
            reps: 1,
            rmax: DEFAULT_RMAX,
            penalties: Penalty::ALL.to_vec(),
            out: out.into(),
            format: Format::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.reps == 0 {
            return Err("reps must be at least 1".into());
        }
        if self.penalties.is_empty() {
            return Err("at least one penalty is required".into());
        }
        let max = self.q.min(self.t);
        if self.rmax == 0 || self.rmax > max {
            return Err(format!("rmax {} outside 1..={max}", self.rmax));
        }
        Ok(())
    }
}

/// Parses `a,b,c`; an empty string or `none` yields an empty list.
pub fn parse_list(s: &str) -> Vec<String> {
    if s.trim().is_empty() || s.trim().eq_ignore_ascii_case("none") {
        return Vec::new();
    }
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

pub fn parse_penalties(s: &str) -> Result<Vec<Penalty>, String> {
    parse_list(s).iter().map(|p| p.parse()).collect()
}
