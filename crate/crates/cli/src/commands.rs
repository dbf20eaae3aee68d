use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde_json::{json, Map, Value};

use panelfactor::analysis::{
    diffusion_indexes, mr2_table, r2_ranking, scree_data, top_n, DiffusionIndexSet, Mr2Table, R2Ranking, ScreeRow,
};
use panelfactor::factor::{covariance, select_from_eigen, sym_eigen, EigenDecomposition, FactorModel, IcReport};
use panelfactor::panel::{
    extract_balanced, parse_metadata_csv, parse_panel_csv, standardize, transform_panel, write_panel_csv, Panel,
    StandardizedPanel, TransformCode,
};
use panelfactor::synth::{generate, run_recovery, SynthSpec};

use crate::config::{RunConfig, SimConfig};
use crate::output::{num, pretty, write_file, Cell, Format, Table};

/// Series listed per factor in `mr2_top`.
pub const TOP_N: usize = 10;

/// A failed command with the process exit code it maps to:
/// 2 for unreadable or invalid input and configuration, 1 for everything else.
#[derive(Debug)]
pub struct Failure {
    pub exit_code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit_code: 2,
            error: error.into(),
        }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit_code: 1,
            error: error.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)
}

/// Reads and parses the panel, attaching sidecar metadata when given.
pub fn load_panel(input: &Path, meta: Option<&Path>) -> Result<Panel, Failure> {
    let table = match meta {
        Some(path) => Some(
            parse_metadata_csv(&read_text(path)?)
                .with_context(|| format!("parsing metadata {}", path.display()))
                .map_err(Failure::input)?,
        ),
        None => None,
    };
    parse_panel_csv(&read_text(input)?, table.as_ref())
        .with_context(|| format!("parsing {}", input.display()))
        .map_err(Failure::input)
}

/// Shape and completeness diagnostics for an input panel.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub q: usize,
    pub t: usize,
    pub first: Option<String>,
    pub last: Option<String>,
    /// `(mnemonic, tcode, group, missing cells)`
    pub series: Vec<(String, u8, u8, usize)>,
    /// Series count per tcode 1..=7.
    pub tcode_histogram: [usize; 7],
}

impl ValidationReport {
    pub fn missing(&self, mnemonic: &str) -> Option<usize> {
        self.series.iter().find(|s| s.0 == mnemonic).map(|s| s.3)
    }

    pub fn to_json(&self) -> Value {
        let hist: Map<String, Value> = TransformCode::all()
            .map(|c| (c.to_string(), json!(self.tcode_histogram[c.get() as usize - 1])))
            .collect();
        json!({
            "q": self.q,
            "T": self.t,
            "start": self.first,
            "end": self.last,
            "tcode_histogram": hist,
            "series": self.series.iter().map(|(m, c, g, n)| json!({
                "mnemonic": m, "tcode": c, "group": g, "missing": n
            })).collect::<Vec<_>>(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut s = format!(
            "series (q): {}\nperiods (T): {}\nrange: {} .. {}\ntcode histogram:",
            self.q,
            self.t,
            self.first.as_deref().unwrap_or("-"),
            self.last.as_deref().unwrap_or("-"),
        );
        for (i, n) in self.tcode_histogram.iter().enumerate() {
            s.push_str(&format!(" {}:{}", i + 1, n));
        }
        s.push_str("\nmissing cells per series:\n");
        for (m, c, g, n) in &self.series {
            s.push_str(&format!("  {m:<16} tcode {c} group {g} missing {n}\n"));
        }
        s
    }
}

pub fn cmd_validate(input: &Path, meta: Option<&Path>) -> Result<ValidationReport, Failure> {
    let panel = load_panel(input, meta)?;
    let mut tcode_histogram = [0; 7];
    let series = panel
        .meta()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            tcode_histogram[m.tcode.get() as usize - 1] += 1;
            (m.mnemonic.clone(), m.tcode.get(), m.group, panel.missing_count(i))
        })
        .collect();
    Ok(ValidationReport {
        q: panel.n_series(),
        t: panel.n_periods(),
        first: panel.dates().first().map(|d| d.to_string()),
        last: panel.dates().last().map(|d| d.to_string()),
        series,
        tcode_histogram,
    })
}

/// Everything `analyze` computes, before serialization.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub raw_series: usize,
    pub panel: StandardizedPanel,
    pub eigen: EigenDecomposition,
    pub ic: Option<IcReport>,
    pub r: usize,
    pub r_source: String,
    pub model: FactorModel,
    pub scree: Vec<ScreeRow>,
    pub mr2: Mr2Table,
    pub ranking: R2Ranking,
    pub diffusion: DiffusionIndexSet,
}

impl Analysis {
    pub fn r_hat(&self) -> BTreeMap<String, usize> {
        self.ic
            .iter()
            .flat_map(|ic| ic.selected.iter().map(|(p, r)| (p.to_string(), *r)))
            .collect()
    }

    pub fn variance_explained(&self) -> f64 {
        self.scree[self.r - 1].cumulative
    }
}

/// Runs the full pipeline in memory.
pub fn run_analysis(cfg: &RunConfig) -> Result<Analysis, Failure> {
    cfg.validate().map_err(|e| Failure::input(anyhow!(e)))?;
    let raw = load_panel(&cfg.input, cfg.meta.as_deref())?;
    let transformed = transform_panel(&raw).map_err(Failure::input)?;
    let balanced = extract_balanced(&transformed, cfg.start, cfg.end, &cfg.drop)
        .context("extracting balanced panel")
        .map_err(Failure::input)?;
    let z = standardize(&balanced).map_err(Failure::input)?;
    let eigen = covariance(&z)
        .and_then(|s| sym_eigen(&s))
        .map_err(Failure::runtime)?;

    let ic = if cfg.penalties.is_empty() {
        None
    } else {
        Some(select_from_eigen(&z, &eigen, cfg.rmax, &cfg.penalties).map_err(Failure::input)?)
    };
    let (r, r_source) = match (cfg.r, &ic) {
        (Some(r), _) => (r, "override".to_string()),
        (None, Some(ic)) => {
            // the g1 choice wins when penalties disagree
            let (p, r) = ic
                .selected
                .iter()
                .find(|(p, _)| p.name() == "g1")
                .or(ic.selected.first())
                .copied()
                .expect("non-empty penalties");
            (r, p.to_string())
        }
        (None, None) => unreachable!("validated config"),
    };

    let mut model = FactorModel::from_eigen(&z, &eigen, r).map_err(Failure::input)?;
    if cfg.unit_variance {
        model = model.unit_variance();
    }
    let mr2 = mr2_table(&z, &model).map_err(Failure::runtime)?;
    let ranking = r2_ranking(&mr2);
    let diffusion = diffusion_indexes(&model);
    let scree = scree_data(&eigen);
    Ok(Analysis {
        raw_series: raw.n_series(),
        panel: z,
        eigen,
        ic,
        r,
        r_source,
        model,
        scree,
        mr2,
        ranking,
        diffusion,
    })
}

fn config_json(cfg: &RunConfig) -> Value {
    json!({
        "input": cfg.input.display().to_string(),
        "meta": cfg.meta.as_ref().map(|p| p.display().to_string()),
        "start": cfg.start.to_string(),
        "end": cfg.end.to_string(),
        "drop": cfg.drop,
        "rmax": cfg.rmax,
        "penalties": cfg.penalties.iter().map(|p| p.name()).collect::<Vec<_>>(),
        "r": cfg.r,
        "out": cfg.out.display().to_string(),
        "format": cfg.format.extension(),
        "unit_variance": cfg.unit_variance,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::runtime)
}

/// Result tables of an analysis, keyed by file stem.
pub fn analysis_tables(a: &Analysis) -> Vec<(&'static str, Table)> {
    let z = &a.panel;
    let r = a.r;
    let dates: Vec<String> = z.dates().iter().map(|d| d.to_string()).collect();

    let mut factors = Table::new(std::iter::once("date".to_string()).chain((1..=r).map(|k| format!("F{k}"))));
    let mut diffusion = Table::new(std::iter::once("date".to_string()).chain((1..=r).map(|k| format!("DI{k}"))));
    for (t, d) in dates.iter().enumerate() {
        let mut row = vec![Cell::from(d.as_str())];
        row.extend((0..r).map(|k| Cell::from(a.model.factors[[k, t]])));
        factors.push(row);
        let mut row = vec![Cell::from(d.as_str())];
        row.extend((0..r).map(|k| Cell::from(a.diffusion.values[[k, t]])));
        diffusion.push(row);
    }

    let mut loadings = Table::new(
        ["mnemonic", "id", "group"]
            .into_iter()
            .map(String::from)
            .chain((1..=r).map(|k| format!("L{k}"))),
    );
    for (i, m) in z.meta().iter().enumerate() {
        let mut row = vec![Cell::from(m.mnemonic.as_str()), m.id.into(), m.group.into()];
        row.extend((0..r).map(|k| Cell::from(a.model.loadings[[i, k]])));
        loadings.push(row);
    }

    let mut scree = Table::new(["rank", "eigenvalue", "share", "cumulative"]);
    for s in &a.scree {
        scree.push(vec![s.rank.into(), s.eigenvalue.into(), s.share.into(), s.cumulative.into()]);
    }

    let mut mr2 = Table::new(
        ["mnemonic", "id", "group"]
            .into_iter()
            .map(String::from)
            .chain((1..=r).map(|k| format!("R2_{k}")))
            .chain((1..=r).map(|k| format!("mR2_{k}"))),
    );
    for row in &a.mr2.rows {
        let mut cells = vec![Cell::from(row.mnemonic.as_str()), row.id.into(), row.group.into()];
        cells.extend(row.r2.iter().map(|&v| Cell::from(v)));
        cells.extend(row.mr2.iter().map(|&v| Cell::from(v)));
        mr2.push(cells);
    }

    let mut top = Table::new(["factor", "rank", "mnemonic", "mR2", "group"]);
    for k in 1..=r {
        for (j, s) in top_n(&a.mr2, k, TOP_N).expect("k within 1..=r").into_iter().enumerate() {
            top.push(vec![k.into(), (j + 1).into(), s.mnemonic.into(), s.value.into(), s.group.into()]);
        }
    }

    let mut ranking = Table::new(["rank", "mnemonic", "group", "R2"]);
    for (j, s) in a.ranking.ranked.iter().enumerate() {
        ranking.push(vec![(j + 1).into(), s.mnemonic.as_str().into(), s.group.into(), s.value.into()]);
    }

    let mut tables = vec![
        ("factors", factors),
        ("loadings", loadings),
        ("scree", scree),
    ];
    if let Some(ic) = &a.ic {
        let mut t = Table::new(
            ["r", "ssr"]
                .into_iter()
                .map(String::from)
                .chain(ic.curves.iter().map(|(p, _)| p.to_string())),
        );
        for k in 0..ic.rmax {
            let mut row = vec![Cell::from(k + 1), Cell::from(ic.ssr[k])];
            row.extend(ic.curves.iter().map(|(_, c)| Cell::from(c[k].as_f64())));
            t.push(row);
        }
        tables.push(("ic_report", t));
    }
    tables.extend([
        ("mr2_table", mr2),
        ("mr2_top", top),
        ("r2_ranking", ranking),
        ("diffusion", diffusion),
    ]);
    tables
}

/// Run manifest: the effective configuration and headline results.
pub fn manifest(cfg: &RunConfig, a: &Analysis, files: &[String]) -> Value {
    let ssr = a.model.ssr();
    let ic = a.ic.as_ref().map(|ic| {
        let curves: Map<String, Value> = ic
            .curves
            .iter()
            .map(|(p, c)| (p.to_string(), Value::Array(c.iter().map(|v| num(v.as_f64())).collect())))
            .collect();
        json!({ "rmax": ic.rmax, "curves": curves })
    });
    json!({
        "command": "analyze",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config_json(cfg),
        "panel": {
            "series_in_file": a.raw_series,
            "q": a.panel.n_series(),
            "T": a.panel.n_periods(),
            "start": a.panel.dates().first().map(|d| d.to_string()),
            "end": a.panel.dates().last().map(|d| d.to_string()),
        },
        "r_hat": a.r_hat(),
        "ic": ic,
        "r": a.r,
        "r_source": a.r_source,
        "variance_explained": num(a.variance_explained()),
        "total_r2": num(a.mr2.total),
        "avg_mr2": a.mr2.avg_mr2.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "series_r2_above_half": a.ranking.above_half,
        "ssr": num(ssr),
        "residual_norm": num(ssr.sqrt()),
        "files": files,
    })
}

/// Runs the pipeline and writes every output file plus `manifest.json`.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<Value, Failure> {
    let a = run_analysis(cfg)?;
    ensure_dir(&cfg.out)?;
    let mut files = Vec::new();
    for (stem, table) in analysis_tables(&a) {
        files.push(table.write(&cfg.out, stem, cfg.format).map_err(Failure::runtime)?);
    }
    let m = manifest(cfg, &a, &files);
    write_file(&cfg.out.join("manifest.json"), &pretty(&m)).map_err(Failure::runtime)?;
    Ok(m)
}

/// Per-seed recovery results and their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub table: Table,
    pub manifest: Value,
}

/// Generates `reps` panels from consecutive seeds, runs selection and factor
/// estimation on each, and writes `recovery`, `panel.csv` (first seed) and `manifest.json`.
pub fn cmd_simulate(cfg: &SimConfig) -> Result<SimulationReport, Failure> {
    cfg.validate().map_err(|e| Failure::input(anyhow!(e)))?;
    let spec_for = |seed: u64| SynthSpec {
        q: cfg.q,
        t: cfg.t,
        r_true: cfg.r_true,
        noise_sd: cfg.noise_sd,
        seed,
    };
    spec_for(cfg.seed).validate().map_err(Failure::input)?;

    let mut table = Table::new(
        ["seed"]
            .into_iter()
            .map(String::from)
            .chain(cfg.penalties.iter().map(|p| format!("r_hat_{p}")))
            .chain(["fit".to_string()]),
    );
    let mut hits: BTreeMap<String, usize> = BTreeMap::new();
    let mut histogram: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut fits = Vec::with_capacity(cfg.reps);
    for k in 0..cfg.reps {
        let seed = cfg.seed.wrapping_add(k as u64);
        let outcome = run_recovery(&spec_for(seed), cfg.rmax, &cfg.penalties).map_err(|e| Failure::runtime(anyhow!(e)))?;
        let mut row = vec![Cell::Str(seed.to_string())];
        for (p, r) in &outcome.selected {
            row.push((*r).into());
            *hits.entry(p.to_string()).or_default() += usize::from(*r == cfg.r_true);
            *histogram.entry(p.to_string()).or_default().entry(*r).or_default() += 1;
        }
        row.push(outcome.fit.into());
        fits.push(outcome.fit);
        table.push(row);
    }

    ensure_dir(&cfg.out)?;
    let recovery = table.write(&cfg.out, "recovery", cfg.format).map_err(Failure::runtime)?;
    let first = generate(&spec_for(cfg.seed)).map_err(Failure::input)?;
    write_file(&cfg.out.join("panel.csv"), &write_panel_csv(&first.panel)).map_err(Failure::runtime)?;

    let reps = cfg.reps as f64;
    let rates: Map<String, Value> = hits.iter().map(|(p, &h)| (p.clone(), num(h as f64 / reps))).collect();
    let hist: Map<String, Value> = histogram
        .iter()
        .map(|(p, h)| {
            let inner: Map<String, Value> = h.iter().map(|(r, n)| (r.to_string(), json!(n))).collect();
            (p.clone(), Value::Object(inner))
        })
        .collect();
    let manifest = json!({
        "command": "simulate",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {
            "q": cfg.q,
            "T": cfg.t,
            "r_true": cfg.r_true,
            "noise_sd": num(cfg.noise_sd),
            "seed": cfg.seed,
            "reps": cfg.reps,
            "rmax": cfg.rmax,
            "penalties": cfg.penalties.iter().map(|p| p.name()).collect::<Vec<_>>(),
            "out": cfg.out.display().to_string(),
            "format": cfg.format.extension(),
        },
        "recovery_rate": rates,
        "r_hat_histogram": hist,
        "mean_fit": num(fits.iter().sum::<f64>() / reps),
        "min_fit": num(fits.iter().copied().fold(f64::INFINITY, f64::min)),
        "files": [recovery, "panel.csv"],
    });
    write_file(&cfg.out.join("manifest.json"), &pretty(&manifest)).map_err(Failure::runtime)?;
    Ok(SimulationReport { table, manifest })
}

/// Writes a report of `validate` as JSON when asked, otherwise returns text.
pub fn render_validation(report: &ValidationReport, format: Format) -> String {
    match format {
        Format::Json => pretty(&report.to_json()),
        Format::Csv => report.render_text(),
    }
}
