//! Baseline runs, one-parameter sensitivity sweeps and policy grids, plus
//! their CSV and SVG outputs.
//!
//! Welfare aggregates are window means of per-tick flows: the increments of
//! the cumulative surplus columns. Sweeps and grids both aggregate over the
//! long-term window `[horizon_split, steps)`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abm::{self, SimConfig, SimError};
use crate::metrics::{self, MetricsError, MetricsRow, ShockSummary, METRICS_COLUMNS};
use crate::model::ParamError;

/// Window length on each side of the AI introduction in [`run_baseline`].
pub const SHOCK_WINDOW: u64 = 50;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid spec: {field} {reason}")]
    Spec { field: &'static str, reason: String },
    #[error("{cell}, seed {seed}: {source}")]
    Cell {
        cell: String,
        seed: u64,
        #[source]
        source: CellFailure,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Why a single sweep or grid cell failed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CellFailure {
    #[error(transparent)]
    Config(#[from] ParamError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl ExperimentError {
    /// True when the failure is a rejected configuration rather than a
    /// failed run or I/O.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            ExperimentError::Spec { .. }
                | ExperimentError::Cell {
                    source: CellFailure::Config(_),
                    ..
                }
        )
    }
}

/// Mean per-tick welfare flows over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct WelfareMeans {
    pub w: f64,
    pub cs: f64,
    pub ps: f64,
}

/// Mean per-tick CS, PS and W flows over ticks `[start, end)`.
pub fn welfare_means(
    history: &[MetricsRow],
    start: u64,
    end: u64,
) -> Result<WelfareMeans, MetricsError> {
    let rows = metrics::window(history, start, end)?;
    let before = history
        .iter()
        .take_while(|r| r.tick < start)
        .last()
        .map_or((0.0, 0.0), |r| (r.consumer_surplus, r.producer_surplus));
    let last = rows[rows.len() - 1];
    let n = rows.len() as f64;
    let cs = (last.consumer_surplus - before.0) / n;
    let ps = (last.producer_surplus - before.1) / n;
    Ok(WelfareMeans { w: cs + ps, cs, ps })
}

/// Default tick separating the short-term from the long-term window.
pub fn default_horizon(steps: u64) -> u64 {
    steps / 2
}

/// First half of the long-term window, at least one tick long.
pub fn early_half(horizon_split: u64, steps: u64) -> (u64, u64) {
    let len = (steps.saturating_sub(horizon_split) / 2).max(1);
    (horizon_split, horizon_split + len)
}

/// Outcome of one run as used by sweeps and grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Means over `[horizon_split, steps)`.
    pub longterm: WelfareMeans,
    /// Means over the first half of the long-term window.
    pub early: WelfareMeans,
    /// Cumulative values at the last tick.
    pub cumulative: WelfareMeans,
    pub fees_collected: f64,
    pub subsidies_paid: f64,
    pub ledger_balance: f64,
}

/// Runs `config` to the end and summarizes it around `horizon_split`.
pub fn summarize_run(config: &SimConfig, horizon_split: u64) -> Result<RunSummary, CellFailure> {
    let state = abm::run(config)?;
    let steps = config.steps;
    let longterm = welfare_means(&state.history, horizon_split, steps)?;
    let (lo, hi) = early_half(horizon_split, steps);
    let early = welfare_means(&state.history, lo, hi)?;
    let last = state.history[state.history.len() - 1];
    Ok(RunSummary {
        longterm,
        early,
        cumulative: WelfareMeans {
            w: last.social_welfare,
            cs: last.consumer_surplus,
            ps: last.producer_surplus,
        },
        fees_collected: state.ledger.fees_collected,
        subsidies_paid: state.ledger.subsidies_paid,
        ledger_balance: state.ledger.balance(),
    })
}

#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub history: Vec<MetricsRow>,
    pub summary: Result<ShockSummary, MetricsError>,
}

/// Runs one simulation and compares [`SHOCK_WINDOW`] ticks either side of
/// the AI introduction.
pub fn run_baseline(config: &SimConfig) -> Result<BaselineResult, SimError> {
    let state = abm::run(config)?;
    let summary =
        metrics::welfare_shock_summary(&state.history, config.introduce_ai_step, SHOCK_WINDOW);
    Ok(BaselineResult {
        history: state.history,
        summary,
    })
}

/// Simulation parameter varied by a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    PlatformFee,
    RecommendBias,
    NAiCreators,
    Subsidy,
    IntroduceAiStep,
    PriceSensitivity,
    OverloadThreshold,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 7] = [
        SweepParameter::PlatformFee,
        SweepParameter::RecommendBias,
        SweepParameter::NAiCreators,
        SweepParameter::Subsidy,
        SweepParameter::IntroduceAiStep,
        SweepParameter::PriceSensitivity,
        SweepParameter::OverloadThreshold,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::PlatformFee => "platform_fee",
            SweepParameter::RecommendBias => "recommend_bias",
            SweepParameter::NAiCreators => "n_ai_creators",
            SweepParameter::Subsidy => "subsidy",
            SweepParameter::IntroduceAiStep => "introduce_ai_step",
            SweepParameter::PriceSensitivity => "price_sensitivity",
            SweepParameter::OverloadThreshold => "overload_threshold",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    fn is_count(self) -> bool {
        matches!(
            self,
            SweepParameter::NAiCreators | SweepParameter::IntroduceAiStep
        )
    }

    /// Sets this parameter on `config`. Count parameters must be
    /// nonnegative integers.
    pub fn apply(self, config: &mut SimConfig, value: f64) -> Result<(), ParamError> {
        if self.is_count() && !(value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
            return Err(ParamError {
                key: self.name(),
                constraint: "a nonnegative integer",
                value,
            });
        }
        match self {
            SweepParameter::PlatformFee => config.platform_fee = value,
            SweepParameter::RecommendBias => config.recommend_bias = value,
            SweepParameter::NAiCreators => config.n_ai_creators = value as usize,
            SweepParameter::Subsidy => config.subsidy = value,
            SweepParameter::IntroduceAiStep => config.introduce_ai_step = value as u64,
            SweepParameter::PriceSensitivity => config.price_sensitivity = value,
            SweepParameter::OverloadThreshold => config.overload_threshold = value,
        }
        Ok(())
    }
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub base_config: SimConfig,
}

/// One (value, seed) run of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub value: f64,
    pub seed: u64,
    pub summary: RunSummary,
}

/// Mean over seeds of the long-term window means for one value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub mean_w: f64,
    pub mean_cs: f64,
    pub mean_ps: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Value-major, seed-minor.
    pub cells: Vec<SweepCell>,
    pub rows: Vec<SweepRow>,
}

fn nonempty<T>(items: &[T], field: &'static str) -> Result<(), ExperimentError> {
    if items.is_empty() {
        return Err(ExperimentError::Spec {
            field,
            reason: "must be nonempty".to_string(),
        });
    }
    Ok(())
}

fn cell_configs<K: Copy>(
    keys: &[K],
    seeds: &[u64],
    base: &SimConfig,
    label: impl Fn(K) -> String,
    apply: impl Fn(&mut SimConfig, K) -> Result<(), ParamError>,
) -> Result<Vec<(String, SimConfig)>, ExperimentError> {
    let mut jobs = Vec::with_capacity(keys.len() * seeds.len());
    for &key in keys {
        for &seed in seeds {
            let mut config = base.clone();
            config.seed = seed;
            let checked = apply(&mut config, key).and_then(|_| config.validate());
            if let Err(e) = checked {
                return Err(ExperimentError::Cell {
                    cell: label(key),
                    seed,
                    source: CellFailure::Config(e),
                });
            }
            jobs.push((label(key), config));
        }
    }
    Ok(jobs)
}

/// Runs every job with `threads` workers (0 = one per core) and returns
/// summaries in job order. The first failing job wins.
fn run_jobs(
    jobs: &[(String, SimConfig)],
    horizon_split: u64,
    threads: usize,
) -> Result<Vec<RunSummary>, ExperimentError> {
    let run = |job: &(String, SimConfig)| summarize_run(&job.1, horizon_split);
    let results: Vec<Result<RunSummary, CellFailure>> = if threads == 1 {
        jobs.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?;
        pool.install(|| jobs.par_iter().map(run).collect())
    };
    results
        .into_iter()
        .zip(jobs)
        .map(|(r, (cell, config))| {
            r.map_err(|source| ExperimentError::Cell {
                cell: cell.clone(),
                seed: config.seed,
                source,
            })
        })
        .collect()
}

fn mean_of(summaries: &[RunSummary]) -> WelfareMeans {
    let n = summaries.len() as f64;
    let sum = summaries
        .iter()
        .fold(WelfareMeans::default(), |a, s| WelfareMeans {
            w: a.w + s.longterm.w,
            cs: a.cs + s.longterm.cs,
            ps: a.ps + s.longterm.ps,
        });
    WelfareMeans {
        w: sum.w / n,
        cs: sum.cs / n,
        ps: sum.ps / n,
    }
}

/// Runs every (value, seed) pair and averages the long-term welfare means
/// over seeds. The result does not depend on `threads`.
pub fn sensitivity_sweep(spec: &SweepSpec, threads: usize) -> Result<SweepResult, ExperimentError> {
    nonempty(&spec.values, "values")?;
    nonempty(&spec.seeds, "seeds")?;
    let parameter = spec.parameter;
    let jobs = cell_configs(
        &spec.values,
        &spec.seeds,
        &spec.base_config,
        |v| format!("{parameter}={v}"),
        |c, v| parameter.apply(c, v),
    )?;
    let summaries = run_jobs(&jobs, default_horizon(spec.base_config.steps), threads)?;
    let per_value = spec.seeds.len();
    let cells = summaries
        .iter()
        .enumerate()
        .map(|(i, s)| SweepCell {
            value: spec.values[i / per_value],
            seed: spec.seeds[i % per_value],
            summary: *s,
        })
        .collect();
    let rows = spec
        .values
        .iter()
        .zip(summaries.chunks(per_value))
        .map(|(&value, chunk)| {
            let m = mean_of(chunk);
            SweepRow {
                parameter: parameter.name().to_string(),
                value,
                mean_w: m.w,
                mean_cs: m.cs,
                mean_ps: m.ps,
                n_seeds: per_value,
            }
        })
        .collect();
    Ok(SweepResult { cells, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub fees: Vec<f64>,
    pub biases: Vec<f64>,
    pub subsidies: Vec<f64>,
    pub seeds: Vec<u64>,
    pub base_config: SimConfig,
    /// Defaults to half of `base_config.steps`.
    pub horizon_split: Option<u64>,
}

/// Policy levers of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub fee: f64,
    pub bias: f64,
    pub subsidy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub policy: Policy,
    pub seed: u64,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub fee: f64,
    pub bias: f64,
    pub subsidy: f64,
    pub longterm_w: f64,
    pub longterm_cs: f64,
    pub longterm_ps: f64,
    /// 1 for the highest long-term W.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    /// Fee-major, then bias, subsidy and seed.
    pub cells: Vec<GridCell>,
    /// Sorted by rank.
    pub rows: Vec<GridRow>,
}

/// Runs every policy combination for every seed and ranks combinations by
/// seed-averaged long-term W, ties broken by (fee, bias, subsidy).
pub fn policy_grid(spec: &GridSpec, threads: usize) -> Result<GridResult, ExperimentError> {
    nonempty(&spec.fees, "fees")?;
    nonempty(&spec.biases, "biases")?;
    nonempty(&spec.subsidies, "subsidies")?;
    nonempty(&spec.seeds, "seeds")?;
    let steps = spec.base_config.steps;
    let horizon_split = spec.horizon_split.unwrap_or_else(|| default_horizon(steps));
    if horizon_split >= steps {
        return Err(ExperimentError::Spec {
            field: "horizon_split",
            reason: format!("must be < steps ({steps}), got {horizon_split}"),
        });
    }
    let mut policies = Vec::new();
    for &fee in &spec.fees {
        for &bias in &spec.biases {
            for &subsidy in &spec.subsidies {
                policies.push(Policy { fee, bias, subsidy });
            }
        }
    }
    let jobs = cell_configs(
        &policies,
        &spec.seeds,
        &spec.base_config,
        |p| format!("fee={}, bias={}, subsidy={}", p.fee, p.bias, p.subsidy),
        |c, p| {
            c.platform_fee = p.fee;
            c.recommend_bias = p.bias;
            c.subsidy = p.subsidy;
            Ok(())
        },
    )?;
    let summaries = run_jobs(&jobs, horizon_split, threads)?;
    let per_policy = spec.seeds.len();
    let cells = summaries
        .iter()
        .enumerate()
        .map(|(i, s)| GridCell {
            policy: policies[i / per_policy],
            seed: spec.seeds[i % per_policy],
            summary: *s,
        })
        .collect();
    let mut rows: Vec<GridRow> = policies
        .iter()
        .zip(summaries.chunks(per_policy))
        .map(|(p, chunk)| {
            let m = mean_of(chunk);
            GridRow {
                fee: p.fee,
                bias: p.bias,
                subsidy: p.subsidy,
                longterm_w: m.w,
                longterm_cs: m.cs,
                longterm_ps: m.ps,
                rank: 0,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.longterm_w
            .total_cmp(&a.longterm_w)
            .then(a.fee.total_cmp(&b.fee))
            .then(a.bias.total_cmp(&b.bias))
            .then(a.subsidy.total_cmp(&b.subsidy))
    });
    for (i, row) in rows.iter_mut().enumerate() {
        row.rank = i + 1;
    }
    Ok(GridResult { cells, rows })
}

/// A row type with a fixed CSV schema.
pub trait CsvRecord {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl CsvRecord for MetricsRow {
    const HEADER: &'static [&'static str] = &METRICS_COLUMNS;
    fn fields(&self) -> Vec<String> {
        vec![
            self.tick.to_string(),
            self.total_content.to_string(),
            self.avg_quality.to_string(),
            self.avg_price.to_string(),
            self.avg_consumer_utility.to_string(),
            self.n_human_active.to_string(),
            self.n_ai_active.to_string(),
            self.total_revenue.to_string(),
            self.gini.to_string(),
            self.consumer_surplus.to_string(),
            self.producer_surplus.to_string(),
            self.social_welfare.to_string(),
        ]
    }
}

impl CsvRecord for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "parameter",
        "value",
        "mean_w",
        "mean_cs",
        "mean_ps",
        "n_seeds",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.parameter.clone(),
            self.value.to_string(),
            self.mean_w.to_string(),
            self.mean_cs.to_string(),
            self.mean_ps.to_string(),
            self.n_seeds.to_string(),
        ]
    }
}

impl CsvRecord for GridRow {
    const HEADER: &'static [&'static str] = &[
        "fee",
        "bias",
        "subsidy",
        "longterm_w",
        "longterm_cs",
        "longterm_ps",
        "rank",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.fee.to_string(),
            self.bias.to_string(),
            self.subsidy.to_string(),
            self.longterm_w.to_string(),
            self.longterm_cs.to_string(),
            self.longterm_ps.to_string(),
            self.rank.to_string(),
        ]
    }
}

/// Serializes rows with a header line. Floats use the shortest decimal
/// that parses back to the same value.
pub fn to_csv<R: CsvRecord>(rows: &[R]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = "writing to a Vec cannot fail";
    w.write_record(R::HEADER).expect(io);
    for row in rows {
        w.write_record(row.fields()).expect(io);
    }
    String::from_utf8(w.into_inner().expect(io)).expect("csv output is utf-8")
}

pub fn write_csv<R: CsvRecord>(rows: &[R], path: &Path) -> Result<(), ExperimentError> {
    fs::write(path, to_csv(rows)).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, ExperimentError> {
    let err = |source| ExperimentError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    r.deserialize().collect::<Result<_, _>>().map_err(err)
}

pub fn read_history_csv(path: &Path) -> Result<Vec<MetricsRow>, ExperimentError> {
    read_rows(path)
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, ExperimentError> {
    read_rows(path)
}

pub fn read_grid_csv(path: &Path) -> Result<Vec<GridRow>, ExperimentError> {
    read_rows(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// One line chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Draws a dashed vertical line at this x.
    pub marker: Option<f64>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

/// `[min, max]` of `values` widened by 5% of the span on each side. A zero
/// span is widened by 5% of the magnitude, or by 1 around zero.
pub fn padded_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold(None, |acc: Option<(f64, f64)>, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })?;
    let pad = if hi > lo {
        0.05 * (hi - lo)
    } else if lo != 0.0 {
        0.05 * lo.abs()
    } else {
        1.0
    };
    Some((lo - pad, hi + pad))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e6).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    }
}

/// Renders `plot` as a standalone SVG document.
pub fn render_svg(plot: &Plot) -> Result<String, ExperimentError> {
    if plot.series.is_empty() || plot.series.iter().all(|s| s.points.is_empty()) {
        return Err(ExperimentError::Spec {
            field: "series",
            reason: "must contain at least one point".to_string(),
        });
    }
    let points = || plot.series.iter().flat_map(|s| s.points.iter().copied());
    let xs = points().map(|p| p.0).chain(plot.marker);
    let (x0, x1) = padded_range(xs).unwrap_or((0.0, 1.0));
    let (y0, y1) = padded_range(points().map(|p| p.1)).unwrap_or((0.0, 1.0));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&plot.title)
    );
    let (bx, by) = (LEFT, TOP + ph);
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{bx}" y1="{by}" x2="{}" y2="{by}" stroke="black"/>"#,
        LEFT + pw
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{bx}" y1="{TOP}" x2="{bx}" y2="{by}" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{by}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            by + 5.0,
            by + 19.0,
            label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{py:.2}" x2="{bx}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            bx - 5.0,
            bx - 8.0,
            py + 4.0,
            label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label)
    );
    if let Some(m) = plot.marker {
        let px = sx(m);
        let _ = writeln!(
            s,
            r#"<line class="marker" x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{by}" stroke="gray" stroke-dasharray="6 4"/>"#
        );
    }
    for (i, series) in plot.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if !series.points.is_empty() {
            let coords: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{}" width="14" height="4" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            ly - 2.0,
            lx + 20.0,
            ly + 4.0,
            escape(&series.name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(plot: &Plot, path: &Path) -> Result<(), ExperimentError> {
    let svg = render_svg(plot)?;
    fs::write(path, svg).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The seven standard panels of a run, keyed by file stem.
pub fn history_panels(history: &[MetricsRow], introduce_ai_step: u64) -> Vec<(&'static str, Plot)> {
    let series = |name: &str, f: fn(&MetricsRow) -> f64| Series {
        name: name.to_string(),
        points: history.iter().map(|r| (r.tick as f64, f(r))).collect(),
    };
    let panel = |title: &str, y: &str, series: Vec<Series>| Plot {
        title: title.to_string(),
        x_label: "tick".to_string(),
        y_label: y.to_string(),
        series,
        marker: Some(introduce_ai_step as f64),
    };
    vec![
        (
            "total_content",
            panel(
                "Total content",
                "items",
                vec![series("total content", |r| r.total_content as f64)],
            ),
        ),
        (
            "avg_quality",
            panel(
                "Average quality",
                "quality",
                vec![series("avg quality", |r| r.avg_quality)],
            ),
        ),
        (
            "avg_price",
            panel(
                "Average price",
                "price",
                vec![series("avg price", |r| r.avg_price)],
            ),
        ),
        (
            "consumer_utility",
            panel(
                "Consumer utility",
                "utility per consumer",
                vec![series("avg utility", |r| r.avg_consumer_utility)],
            ),
        ),
        (
            "creators",
            panel(
                "Active creators",
                "creators",
                vec![
                    series("human", |r| r.n_human_active as f64),
                    series("AI", |r| r.n_ai_active as f64),
                ],
            ),
        ),
        (
            "revenue_gini",
            panel(
                "Revenue and inequality",
                "value",
                vec![
                    series("total revenue", |r| r.total_revenue),
                    series("gini", |r| r.gini),
                ],
            ),
        ),
        (
            "welfare",
            panel(
                "Cumulative welfare",
                "surplus",
                vec![
                    series("consumer surplus", |r| r.consumer_surplus),
                    series("producer surplus", |r| r.producer_surplus),
                    series("social welfare", |r| r.social_welfare),
                ],
            ),
        ),
    ]
}
