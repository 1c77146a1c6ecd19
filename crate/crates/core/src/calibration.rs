//! Named default calibrations.

use crate::abm::{GiniBasis, SimConfig};
use crate::model::ModelParams;

/// The default simulation calibration: 500 ticks, 50 human and 50 AI
/// creators, 200 consumers, AI entering at tick 100.
///
/// Cheap AI content speeds up content growth after entry and
/// pulls average quality down. Overload passes its threshold before tick 300,
/// and low-quality humans are priced out over the following ticks.
pub fn baseline() -> SimConfig {
    SimConfig {
        n_human_creators: 50,
        n_ai_creators: 50,
        n_consumers: 200,
        steps: 500,
        introduce_ai_step: 100,
        platform_fee: 0.10,
        recommend_bias: 0.5,
        subsidy: 0.0,
        price_sensitivity: 1.0,
        overload_threshold: 8_000.0,
        slate_size: 1,
        learning_rate: 0.05,
        exit_window: 40,
        exit_threshold: 0.0,
        ai_quality_mean: 1.4,
        ai_quality_growth: 0.001,
        ai_markup: 0.3,
        human_price_init: 1.0,
        human_quality_init: 3.3,
        creator_spread: 0.2,
        consumer_spread: 0.2,
        gini_basis: GiniBasis::Cumulative,
        seed: 42,
        model_params: ModelParams {
            theta_u: 2.75,
            delta_u: 0.125,
            cost_fixed: 1.0,
            cost_quad: 0.025,
            ..ModelParams::default()
        },
    }
}

/// Names accepted by [`named`].
pub const NAMES: [&str; 1] = ["baseline"];

pub fn named(name: &str) -> Option<SimConfig> {
    match name {
        "baseline" => Some(baseline()),
        _ => None,
    }
}
