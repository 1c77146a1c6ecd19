//! Per-tick observables and the windowed before/after comparison around the
//! AI introduction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abm::{CreatorKind, GiniBasis, SimConfig, SimState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("gini of an empty income list")]
    Empty,
    #[error("negative income {value} at index {index}")]
    NegativeIncome { index: usize, value: f64 },
    #[error("history of {len} rows does not cover ticks {start}..{end}")]
    InsufficientHistory { len: usize, start: u64, end: u64 },
    #[error("window must be > 0")]
    ZeroWindow,
}

/// One tick of observables. Surplus columns are cumulative since tick 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub tick: u64,
    pub total_content: u64,
    pub avg_quality: f64,
    pub avg_price: f64,
    pub avg_consumer_utility: f64,
    pub n_human_active: u64,
    pub n_ai_active: u64,
    pub total_revenue: f64,
    pub gini: f64,
    pub consumer_surplus: f64,
    pub producer_surplus: f64,
    pub social_welfare: f64,
}

/// Column names of [`MetricsRow`] in declaration order.
pub const METRICS_COLUMNS: [&str; 12] = [
    "tick",
    "total_content",
    "avg_quality",
    "avg_price",
    "avg_consumer_utility",
    "n_human_active",
    "n_ai_active",
    "total_revenue",
    "gini",
    "consumer_surplus",
    "producer_surplus",
    "social_welfare",
];

impl MetricsRow {
    /// Every column as `f64`, in [`METRICS_COLUMNS`] order.
    pub fn values(&self) -> [f64; 12] {
        [
            self.tick as f64,
            self.total_content as f64,
            self.avg_quality,
            self.avg_price,
            self.avg_consumer_utility,
            self.n_human_active as f64,
            self.n_ai_active as f64,
            self.total_revenue,
            self.gini,
            self.consumer_surplus,
            self.producer_surplus,
            self.social_welfare,
        ]
    }
}

/// Population Gini coefficient, `sum (2i - n - 1) x_i / (n sum x)` over the
/// ascending sort with 1-based `i`. All-zero incomes give 0.
pub fn gini(incomes: &[f64]) -> Result<f64, MetricsError> {
    if incomes.is_empty() {
        return Err(MetricsError::Empty);
    }
    if let Some((index, &value)) = incomes.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
        return Err(MetricsError::NegativeIncome { index, value });
    }
    let mut sorted = incomes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let n = sorted.len() as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    Ok((weighted / (n * total)).clamp(0.0, 1.0))
}

/// Builds the row for the tick whose settlement just finished.
pub fn record_tick(state: &SimState, config: &SimConfig) -> MetricsRow {
    let acc = &state.last_accounts;
    let mean = |sum: f64, n: u64| if n == 0 { 0.0 } else { sum / n as f64 };
    let incomes: Vec<f64> = match config.gini_basis {
        GiniBasis::Cumulative => state
            .creators
            .iter()
            .filter(|c| c.ever_active)
            .map(|c| c.cumulative_revenue)
            .collect(),
        GiniBasis::PerTick => state
            .creators
            .iter()
            .filter(|c| c.active)
            .map(|c| c.last_gross)
            .collect(),
    };
    let gini = gini(&incomes).unwrap_or(0.0);
    MetricsRow {
        tick: state.tick,
        total_content: state.total_content,
        avg_quality: mean(acc.quality_sum, acc.items),
        avg_price: mean(acc.price_sum, acc.items),
        avg_consumer_utility: mean(acc.consumer_utility, state.consumers.len() as u64),
        n_human_active: state.n_active(CreatorKind::Human) as u64,
        n_ai_active: state.n_active(CreatorKind::Ai) as u64,
        total_revenue: acc.creator_gross,
        gini,
        consumer_surplus: state.consumer_surplus,
        producer_surplus: state.producer_surplus,
        social_welfare: state.consumer_surplus + state.producer_surplus,
    }
}

/// Column means over one window of ticks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeans(pub [f64; 12]);

impl ColumnMeans {
    pub fn get(&self, column: &str) -> Option<f64> {
        METRICS_COLUMNS
            .iter()
            .position(|c| *c == column)
            .map(|i| self.0[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockSummary {
    pub pre: ColumnMeans,
    pub post: ColumnMeans,
    /// `post - pre`, column by column.
    pub delta: ColumnMeans,
}

/// Rows whose tick lies in `[start, end)`, or an error when any is missing.
pub fn window(history: &[MetricsRow], start: u64, end: u64) -> Result<&[MetricsRow], MetricsError> {
    let missing = MetricsError::InsufficientHistory {
        len: history.len(),
        start,
        end,
    };
    let first = history.first().ok_or(missing.clone())?.tick;
    if start < first || end <= start {
        return Err(missing);
    }
    let lo = (start - first) as usize;
    let hi = (end - first) as usize;
    if hi > history.len() {
        return Err(missing);
    }
    Ok(&history[lo..hi])
}

pub fn column_means(rows: &[MetricsRow]) -> ColumnMeans {
    let mut sums = [0.0; 12];
    for row in rows {
        for (s, v) in sums.iter_mut().zip(row.values()) {
            *s += v;
        }
    }
    let n = rows.len().max(1) as f64;
    ColumnMeans(sums.map(|s| s / n))
}

/// Means of every column over `window` ticks before and after
/// `introduce_ai_step`, and their differences.
pub fn welfare_shock_summary(
    history: &[MetricsRow],
    introduce_ai_step: u64,
    window_len: u64,
) -> Result<ShockSummary, MetricsError> {
    if window_len == 0 {
        return Err(MetricsError::ZeroWindow);
    }
    let start =
        introduce_ai_step
            .checked_sub(window_len)
            .ok_or(MetricsError::InsufficientHistory {
                len: history.len(),
                start: 0,
                end: introduce_ai_step,
            })?;
    let pre = column_means(window(history, start, introduce_ai_step)?);
    let post = column_means(window(
        history,
        introduce_ai_step,
        introduce_ai_step + window_len,
    )?);
    let mut delta = [0.0; 12];
    for (i, d) in delta.iter_mut().enumerate() {
        *d = post.0[i] - pre.0[i];
    }
    Ok(ShockSummary {
        pre,
        post,
        delta: ColumnMeans(delta),
    })
}
