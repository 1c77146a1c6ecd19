//! Seeded discrete-time simulation of the content platform.
//!
//! Each tick runs a fixed sequence of phases: AI activation, production,
//! recommendation, consumption, settlement, creator adjustment, exit and
//! metrics. Agents are always visited in ascending id order and the only
//! randomness after initialisation is slate sampling, so a run is a pure
//! function of its [`SimConfig`].

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{self, MetricsRow};
use crate::model::{self, check, ModelParams, ParamError};

/// Smallest quality a creator can drift down to.
pub const QUALITY_FLOOR: f64 = 1e-3;
/// Reference scale for hill-climbing steps so a zero price can move again.
pub const PRICE_STEP_FLOOR: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ParamError),
    #[error("simulation already finished: tick {tick} of {steps}")]
    Finished { tick: u64, steps: u64 },
}

/// Which revenue figure the inequality column is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GiniBasis {
    /// Cumulative gross revenue of every creator that has been active.
    #[default]
    Cumulative,
    /// Gross revenue earned this tick by currently active creators.
    PerTick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_human_creators: usize,
    pub n_ai_creators: usize,
    pub n_consumers: usize,
    pub steps: u64,
    pub introduce_ai_step: u64,
    /// Fraction of gross revenue kept by the platform.
    pub platform_fee: f64,
    /// Exponent on quality in slate sampling weights.
    pub recommend_bias: f64,
    /// Per-tick payment to every active human creator.
    pub subsidy: f64,
    pub price_sensitivity: f64,
    /// Cumulative content count beyond which the overload multiplier grows.
    pub overload_threshold: f64,
    pub slate_size: usize,
    pub learning_rate: f64,
    pub exit_window: usize,
    pub exit_threshold: f64,
    pub ai_quality_mean: f64,
    /// Mean additive per-tick quality drift of active AI creators.
    pub ai_quality_growth: f64,
    /// Margin over `c_ai` that AI producers net per sale. Their list price
    /// is `(c_ai + ai_markup) / (1 - platform_fee)`.
    pub ai_markup: f64,
    pub human_price_init: f64,
    pub human_quality_init: f64,
    /// Relative half-width of the uniform spread of initial creator traits.
    pub creator_spread: f64,
    /// Relative half-width of the uniform spread of consumer preferences.
    pub consumer_spread: f64,
    pub gini_basis: GiniBasis,
    pub seed: u64,
    pub model_params: ModelParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        crate::calibration::baseline()
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.model_params.validate()?;
        let count = |n: usize| n as f64;
        check(
            self.n_human_creators > 0,
            "n_human_creators",
            "> 0",
            count(self.n_human_creators),
        )?;
        check(
            self.n_consumers > 0,
            "n_consumers",
            "> 0",
            count(self.n_consumers),
        )?;
        check(
            self.introduce_ai_step <= self.steps,
            "introduce_ai_step",
            "<= steps",
            self.introduce_ai_step as f64,
        )?;
        check(
            (0.0..1.0).contains(&self.platform_fee),
            "platform_fee",
            "in [0, 1)",
            self.platform_fee,
        )?;
        check(
            self.recommend_bias >= 0.0,
            "recommend_bias",
            ">= 0",
            self.recommend_bias,
        )?;
        check(self.subsidy >= 0.0, "subsidy", ">= 0", self.subsidy)?;
        check(
            self.price_sensitivity > 0.0,
            "price_sensitivity",
            "> 0",
            self.price_sensitivity,
        )?;
        check(
            self.overload_threshold > 0.0,
            "overload_threshold",
            "> 0",
            self.overload_threshold,
        )?;
        check(
            self.slate_size > 0,
            "slate_size",
            "> 0",
            count(self.slate_size),
        )?;
        check(
            self.learning_rate > 0.0 && self.learning_rate <= 1.0,
            "learning_rate",
            "in (0, 1]",
            self.learning_rate,
        )?;
        check(
            self.exit_window > 0,
            "exit_window",
            "> 0",
            count(self.exit_window),
        )?;
        check(
            self.exit_threshold.is_finite(),
            "exit_threshold",
            "finite",
            self.exit_threshold,
        )?;
        check(
            self.ai_quality_mean > 0.0,
            "ai_quality_mean",
            "> 0",
            self.ai_quality_mean,
        )?;
        check(
            self.ai_quality_growth.is_finite(),
            "ai_quality_growth",
            "finite",
            self.ai_quality_growth,
        )?;
        check(self.ai_markup >= 0.0, "ai_markup", ">= 0", self.ai_markup)?;
        check(
            self.human_price_init >= 0.0,
            "human_price_init",
            ">= 0",
            self.human_price_init,
        )?;
        check(
            self.human_quality_init > 0.0,
            "human_quality_init",
            "> 0",
            self.human_quality_init,
        )?;
        check(
            (0.0..1.0).contains(&self.creator_spread),
            "creator_spread",
            "in [0, 1)",
            self.creator_spread,
        )?;
        check(
            (0.0..1.0).contains(&self.consumer_spread),
            "consumer_spread",
            "in [0, 1)",
            self.consumer_spread,
        )?;
        Ok(())
    }

    /// List price of AI content under this configuration's fee.
    pub fn ai_list_price(&self) -> f64 {
        (self.model_params.c_ai + self.ai_markup) / (1.0 - self.platform_fee)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CreatorKind {
    Human,
    Ai,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    Price,
    Quality,
}

impl Dimension {
    fn other(self) -> Self {
        match self {
            Dimension::Price => Dimension::Quality,
            Dimension::Quality => Dimension::Price,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatorState {
    pub id: usize,
    pub kind: CreatorKind,
    pub quality: f64,
    pub price: f64,
    /// Gross revenue earned to date.
    pub cumulative_revenue: f64,
    /// Gross revenue of the most recent tick.
    pub last_gross: f64,
    /// The last `exit_window` per-tick profits, oldest first.
    pub trailing_profits: VecDeque<f64>,
    pub active: bool,
    pub content_count: u64,
    /// Direction (+1 / -1) of the next price and quality moves.
    pub price_dir: f64,
    pub quality_dir: f64,
    /// Dimension perturbed by the most recent adjustment, if any.
    pub last_move: Option<Dimension>,
    /// Set once the creator has been active at least one tick.
    pub ever_active: bool,
    /// Per-tick quality drift while active (AI creators only).
    pub drift: f64,
}

impl CreatorState {
    pub fn new(id: usize, kind: CreatorKind, quality: f64, price: f64) -> Self {
        Self {
            id,
            kind,
            quality,
            price,
            cumulative_revenue: 0.0,
            last_gross: 0.0,
            trailing_profits: VecDeque::new(),
            active: kind == CreatorKind::Human,
            content_count: 0,
            price_dir: 1.0,
            quality_dir: 1.0,
            last_move: None,
            ever_active: kind == CreatorKind::Human,
            drift: 0.0,
        }
    }

    pub fn is_human(&self) -> bool {
        self.kind == CreatorKind::Human
    }

    fn push_profit(&mut self, profit: f64, window: usize) {
        self.trailing_profits.push_back(profit);
        while self.trailing_profits.len() > window {
            self.trailing_profits.pop_front();
        }
    }

    /// Profits of the two most recent ticks as `(last, previous)`.
    pub fn recent_profits(&self) -> Option<(f64, f64)> {
        let n = self.trailing_profits.len();
        if n < 2 {
            return None;
        }
        Some((self.trailing_profits[n - 1], self.trailing_profits[n - 2]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumerState {
    pub id: usize,
    pub theta_u: f64,
    pub delta_u: f64,
    pub cumulative_utility: f64,
}

/// One content item offered this tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentItem {
    /// Index of the producing creator (equal to its id).
    pub creator: usize,
    pub quality: f64,
    pub price: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Choice {
    /// Position in the slate of the purchased item.
    pub purchased: Option<usize>,
    /// Score of the purchase, 0 when nothing was bought.
    pub utility: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlatformLedger {
    pub fees_collected: f64,
    pub subsidies_paid: f64,
}

impl PlatformLedger {
    pub fn balance(&self) -> f64 {
        self.fees_collected - self.subsidies_paid
    }
}

/// Money flows of a single tick.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TickAccounts {
    pub consumer_payments: f64,
    pub creator_gross: f64,
    pub creator_net: f64,
    pub fees: f64,
    pub subsidies: f64,
    pub purchases: u64,
    /// Sum of realised consumer scores.
    pub consumer_utility: f64,
    /// Sum of creator profits (net revenue + subsidy - cost).
    pub producer_profit: f64,
    pub items: u64,
    pub quality_sum: f64,
    pub price_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub tick: u64,
    pub creators: Vec<CreatorState>,
    pub consumers: Vec<ConsumerState>,
    pub ledger: PlatformLedger,
    pub rng: ChaCha8Rng,
    pub history: Vec<MetricsRow>,
    /// Items produced since the start of the run.
    pub total_content: u64,
    pub consumer_surplus: f64,
    pub producer_surplus: f64,
    pub last_accounts: TickAccounts,
}

fn spread<R: Rng>(rng: &mut R, mean: f64, half_width: f64) -> f64 {
    if half_width == 0.0 {
        return mean;
    }
    mean * (1.0 + rng.gen_range(-half_width..=half_width))
}

impl SimState {
    /// Builds the initial population. Humans start active, AI creators
    /// activate at `introduce_ai_step`.
    pub fn new(config: &SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut creators = Vec::with_capacity(config.n_human_creators + config.n_ai_creators);
        for id in 0..config.n_human_creators {
            let quality = spread(&mut rng, config.human_quality_init, config.creator_spread);
            let price = spread(&mut rng, config.human_price_init, config.creator_spread);
            creators.push(CreatorState::new(id, CreatorKind::Human, quality, price));
        }
        for k in 0..config.n_ai_creators {
            let id = config.n_human_creators + k;
            let quality = spread(&mut rng, config.ai_quality_mean, config.creator_spread);
            let mut ai = CreatorState::new(id, CreatorKind::Ai, quality, config.ai_list_price());
            ai.drift = spread(&mut rng, config.ai_quality_growth, config.creator_spread);
            creators.push(ai);
        }
        let mp = &config.model_params;
        let consumers = (0..config.n_consumers)
            .map(|id| ConsumerState {
                id,
                theta_u: spread(&mut rng, mp.theta_u, config.consumer_spread),
                delta_u: spread(&mut rng, mp.delta_u, config.consumer_spread),
                cumulative_utility: 0.0,
            })
            .collect();
        Ok(Self {
            tick: 0,
            creators,
            consumers,
            ledger: PlatformLedger::default(),
            rng,
            history: Vec::with_capacity(config.steps as usize),
            total_content: 0,
            consumer_surplus: 0.0,
            producer_surplus: 0.0,
            last_accounts: TickAccounts::default(),
        })
    }

    pub fn n_active(&self, kind: CreatorKind) -> usize {
        self.creators
            .iter()
            .filter(|c| c.active && c.kind == kind)
            .count()
    }

    pub fn is_finished(&self, config: &SimConfig) -> bool {
        self.tick >= config.steps
    }

    /// Advances one tick and appends its metrics row.
    pub fn step(&mut self, config: &SimConfig) -> Result<&MetricsRow, SimError> {
        if self.tick >= config.steps {
            return Err(SimError::Finished {
                tick: self.tick,
                steps: config.steps,
            });
        }
        let mp = &config.model_params;
        let mut acc = TickAccounts::default();

        // 1. activation
        if self.tick >= config.introduce_ai_step {
            for c in self.creators.iter_mut().filter(|c| !c.is_human()) {
                c.active = true;
                c.ever_active = true;
            }
        }

        // 2. production
        let mut items = Vec::with_capacity(self.creators.len());
        for c in self.creators.iter_mut().filter(|c| c.active) {
            items.push(ContentItem {
                creator: c.id,
                quality: c.quality,
                price: c.price,
            });
            c.content_count += 1;
            if !c.is_human() {
                c.quality = (c.quality + c.drift).max(QUALITY_FLOOR);
            }
        }
        self.total_content += items.len() as u64;
        acc.items = items.len() as u64;
        acc.quality_sum = items.iter().map(|i| i.quality).sum();
        acc.price_sum = items.iter().map(|i| i.price).sum();

        // 3-4. recommendation and consumption
        let mut gross = vec![0.0; self.creators.len()];
        if !items.is_empty() {
            let weights = recommendation_weights(&items, config.recommend_bias);
            let mut slate_items = Vec::with_capacity(config.slate_size);
            for consumer in self.consumers.iter_mut() {
                let slate = recommend(&weights, config.slate_size, &mut self.rng);
                slate_items.clear();
                slate_items.extend(slate.iter().map(|&i| items[i]));
                let choice = consumer_choose(consumer, &slate_items, self.total_content, config);
                if let Some(pos) = choice.purchased {
                    let item = slate_items[pos];
                    gross[item.creator] += item.price;
                    acc.consumer_payments += item.price;
                    acc.purchases += 1;
                }
                consumer.cumulative_utility += choice.utility;
                acc.consumer_utility += choice.utility;
            }
        }

        // 5. settlement
        for c in self.creators.iter_mut().filter(|c| c.active) {
            let g = gross[c.id];
            let fee = g * config.platform_fee;
            let net = g - fee;
            let (subsidy, cost) = match c.kind {
                CreatorKind::Human => (config.subsidy, model::human_cost(c.quality, mp)),
                CreatorKind::Ai => (0.0, mp.c_ai),
            };
            let profit = net + subsidy - cost;
            c.cumulative_revenue += g;
            c.last_gross = g;
            c.push_profit(profit, config.exit_window.max(2));
            acc.creator_gross += g;
            acc.creator_net += net;
            acc.fees += fee;
            acc.subsidies += subsidy;
            acc.producer_profit += profit;
        }
        self.ledger.fees_collected += acc.fees;
        self.ledger.subsidies_paid += acc.subsidies;
        self.consumer_surplus += acc.consumer_utility;
        self.producer_surplus += acc.producer_profit;

        // 6-7. adjustment and exit
        for c in self
            .creators
            .iter_mut()
            .filter(|c| c.active && c.is_human())
        {
            let (last, prev) = c.recent_profits().unwrap_or((0.0, 0.0));
            *c = creator_adjust(c, last, prev, config);
            *c = exit_check(c, config);
        }

        // 8. metrics
        self.last_accounts = acc;
        let row = metrics::record_tick(self, config);
        self.history.push(row);
        self.tick += 1;
        Ok(self.history.last().expect("row just pushed"))
    }

    /// Steps until `config.steps` is reached.
    pub fn run_to_end(&mut self, config: &SimConfig) -> Result<(), SimError> {
        while !self.is_finished(config) {
            self.step(config)?;
        }
        Ok(())
    }
}

/// `init_sim`: validated initial state.
pub fn init_sim(config: &SimConfig) -> Result<SimState, SimError> {
    SimState::new(config)
}

/// Full run, returning the final state with its metrics history.
pub fn run(config: &SimConfig) -> Result<SimState, SimError> {
    let mut state = SimState::new(config)?;
    state.run_to_end(config)?;
    Ok(state)
}

/// Sampling weights `quality^bias`, normalised by the top quality so large
/// exponents do not overflow.
pub fn recommendation_weights(items: &[ContentItem], bias: f64) -> Vec<f64> {
    let top = items.iter().map(|i| i.quality).fold(0.0_f64, f64::max);
    items
        .iter()
        .map(|i| {
            if bias == 0.0 {
                1.0
            } else {
                (i.quality / top).powf(bias)
            }
        })
        .collect()
}

/// Draws up to `slate_size` distinct indices with probability proportional
/// to `weights`, scanning in index (creator id) order.
pub fn recommend<R: Rng>(weights: &[f64], slate_size: usize, rng: &mut R) -> Vec<usize> {
    let n = weights.len();
    let k = slate_size.min(n);
    let mut taken = vec![false; n];
    let mut slate = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = weights
            .iter()
            .zip(&taken)
            .filter(|(_, &t)| !t)
            .map(|(w, _)| *w)
            .sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        let mut last_free = None;
        for (i, w) in weights.iter().enumerate() {
            if taken[i] {
                continue;
            }
            last_free = Some(i);
            acc += w;
            if acc > target {
                pick = Some(i);
                break;
            }
        }
        // Rounding can leave `target` at the very top of the range.
        let i = pick.or(last_free).expect("k <= n leaves a free item");
        taken[i] = true;
        slate.push(i);
    }
    slate
}

/// Overload multiplier on the consumer's overload coefficient.
pub fn overload_multiplier(total_content: u64, threshold: f64) -> f64 {
    1.0 + (total_content as f64 - threshold).max(0.0) / threshold
}

/// Purchase score of one item for one consumer at overload multiplier `m`.
pub fn item_score(
    consumer: &ConsumerState,
    item: &ContentItem,
    m: f64,
    price_sensitivity: f64,
) -> f64 {
    model::utility_unchecked(item.quality, consumer.theta_u, consumer.delta_u * m)
        - price_sensitivity * item.price
}

/// Picks the best-scoring slate item and buys it if the score is positive.
/// Equal scores go to the lower creator id.
pub fn consumer_choose(
    consumer: &ConsumerState,
    slate: &[ContentItem],
    total_content: u64,
    config: &SimConfig,
) -> Choice {
    let m = overload_multiplier(total_content, config.overload_threshold);
    let mut best: Option<(usize, f64)> = None;
    for (pos, item) in slate.iter().enumerate() {
        let score = item_score(consumer, item, m, config.price_sensitivity);
        best = match best {
            Some((b, s)) if s > score || (s == score && slate[b].creator < item.creator) => {
                Some((b, s))
            }
            _ => Some((pos, score)),
        };
    }
    match best {
        Some((pos, score)) if score > 0.0 => Choice {
            purchased: Some(pos),
            utility: score,
        },
        _ => Choice {
            purchased: None,
            utility: 0.0,
        },
    }
}

/// Hill-climbing update of a human creator's price and quality.
///
/// The dimension moved last keeps its direction when `last_profit` beat
/// `prev_profit` and reverses otherwise; the other dimension is moved next by
/// `learning_rate` times its current value.
pub fn creator_adjust(
    creator: &CreatorState,
    last_profit: f64,
    prev_profit: f64,
    config: &SimConfig,
) -> CreatorState {
    let mut next = creator.clone();
    if !next.is_human() || !next.active {
        return next;
    }
    if let Some(dim) = next.last_move {
        if !(last_profit > prev_profit) {
            match dim {
                Dimension::Price => next.price_dir = -next.price_dir,
                Dimension::Quality => next.quality_dir = -next.quality_dir,
            }
        }
    }
    let dim = next.last_move.map_or(Dimension::Price, Dimension::other);
    let lr = config.learning_rate;
    match dim {
        Dimension::Price => {
            let step = lr * next.price.max(PRICE_STEP_FLOOR);
            next.price = (next.price + next.price_dir * step).max(0.0);
        }
        Dimension::Quality => {
            let step = lr * next.quality;
            next.quality = (next.quality + next.quality_dir * step).max(QUALITY_FLOOR);
        }
    }
    next.last_move = Some(dim);
    next
}

/// Deactivates a human whose trailing mean profit fell below the threshold.
pub fn exit_check(creator: &CreatorState, config: &SimConfig) -> CreatorState {
    let mut next = creator.clone();
    if !next.is_human() || !next.active || next.trailing_profits.len() < config.exit_window {
        return next;
    }
    let window = &next.trailing_profits;
    let recent = window.iter().skip(window.len() - config.exit_window);
    let mean = recent.sum::<f64>() / config.exit_window as f64;
    if mean < config.exit_threshold {
        next.active = false;
    }
    next
}
