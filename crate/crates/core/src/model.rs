//! Analytic primitives of the platform market: linear supply and demand
//! curves, consumer utility with an overload penalty, traffic allocation and
//! the Pareto traffic density.
//!
//! Two symbol families overlap in the underlying model: the utility
//! preference/overload pair and the traffic scale/exponent pair. They are kept
//! apart here as `theta_u`/`delta_u` and `traffic_scale`/`traffic_exponent`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{name} must be {constraint}, got {value}")]
    Domain {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
}

/// A parameter that failed validation. `key` is the field name as it appears
/// in config files.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid parameter `{key}`: must be {constraint} (got {value})")]
pub struct ParamError {
    pub key: &'static str,
    pub constraint: &'static str,
    pub value: f64,
}

pub(crate) fn check(
    ok: bool,
    key: &'static str,
    constraint: &'static str,
    value: f64,
) -> Result<(), ParamError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ParamError {
            key,
            constraint,
            value,
        })
    }
}

/// Every coefficient of the analytic model in one bundle.
///
/// Fields are public so experiment code can tweak single values; call
/// [`ModelParams::validate`] after editing. All loaders in this crate do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Baseline human supply.
    pub alpha_h: f64,
    /// Human supply price sensitivity.
    pub beta_h: f64,
    /// Human supply quality sensitivity (enters with a negative sign).
    pub phi_h: f64,
    pub alpha_ai: f64,
    pub beta_ai: f64,
    pub phi_ai: f64,
    /// AI marginal cost; AI supply is zero below this price.
    pub c_ai: f64,
    /// Finite stand-in for unbounded AI supply.
    pub s_max: f64,
    /// Base demand.
    pub gamma: f64,
    pub eta: f64,
    pub kappa: f64,
    /// Consumer preference for quality.
    pub theta_u: f64,
    /// Information-overload coefficient.
    pub delta_u: f64,
    pub traffic_scale: f64,
    pub traffic_exponent: f64,
    pub pareto_alpha: f64,
    pub pareto_tmin: f64,
    /// Upper price bound of the consumer-surplus integral.
    pub p_max: f64,
    pub p_min: f64,
    /// Human cost C_H(q) = cost_fixed + cost_quad * q^2.
    pub cost_fixed: f64,
    pub cost_quad: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        let gamma = 20.0;
        Self {
            alpha_h: 2.0,
            beta_h: 1.0,
            phi_h: 0.5,
            alpha_ai: 4.0,
            beta_ai: 2.0,
            phi_ai: 1.0,
            c_ai: 0.05,
            s_max: 10.0 * gamma,
            gamma,
            eta: 2.0,
            kappa: 1.0,
            theta_u: 2.0,
            delta_u: 0.2,
            traffic_scale: 1.0,
            traffic_exponent: 2.0,
            pareto_alpha: 1.5,
            pareto_tmin: 1.0,
            p_max: 20.0,
            p_min: 0.0,
            cost_fixed: 0.1,
            cost_quad: 0.05,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.alpha_h >= 0.0, "alpha_h", ">= 0", self.alpha_h)?;
        check(self.beta_h > 0.0, "beta_h", "> 0", self.beta_h)?;
        check(self.phi_h >= 0.0, "phi_h", ">= 0", self.phi_h)?;
        check(self.alpha_ai >= 0.0, "alpha_ai", ">= 0", self.alpha_ai)?;
        check(self.beta_ai >= 0.0, "beta_ai", ">= 0", self.beta_ai)?;
        check(self.phi_ai >= 0.0, "phi_ai", ">= 0", self.phi_ai)?;
        check(self.c_ai >= 0.0, "c_ai", ">= 0", self.c_ai)?;
        check(self.s_max > 0.0, "s_max", "> 0", self.s_max)?;
        check(self.gamma > 0.0, "gamma", "> 0", self.gamma)?;
        check(self.eta > 0.0, "eta", "> 0", self.eta)?;
        check(self.kappa >= 0.0, "kappa", ">= 0", self.kappa)?;
        check(self.theta_u > 0.0, "theta_u", "> 0", self.theta_u)?;
        check(self.delta_u > 0.0, "delta_u", "> 0", self.delta_u)?;
        check(
            self.traffic_scale > 0.0,
            "traffic_scale",
            "> 0",
            self.traffic_scale,
        )?;
        check(
            self.traffic_exponent > 0.0,
            "traffic_exponent",
            "> 0",
            self.traffic_exponent,
        )?;
        check(
            self.pareto_alpha > 0.0,
            "pareto_alpha",
            "> 0",
            self.pareto_alpha,
        )?;
        check(
            self.pareto_tmin > 0.0,
            "pareto_tmin",
            "> 0",
            self.pareto_tmin,
        )?;
        check(self.p_min >= 0.0, "p_min", ">= 0", self.p_min)?;
        check(self.p_max > self.p_min, "p_max", "> p_min", self.p_max)?;
        check(
            self.cost_fixed >= 0.0,
            "cost_fixed",
            ">= 0",
            self.cost_fixed,
        )?;
        check(self.cost_quad >= 0.0, "cost_quad", ">= 0", self.cost_quad)?;
        let ratio = self.theta_u / self.delta_u;
        check(
            ratio > 0.0,
            "delta_u",
            "such that theta_u / delta_u is finite and positive",
            self.delta_u,
        )?;
        Ok(())
    }

    /// Copy with every AI supply term zeroed: the human-only market.
    pub fn without_ai(&self) -> Self {
        Self {
            alpha_ai: 0.0,
            beta_ai: 0.0,
            phi_ai: 0.0,
            ..self.clone()
        }
    }
}

fn domain(name: &'static str, constraint: &'static str, value: f64) -> ModelError {
    ModelError::Domain {
        name,
        constraint,
        value,
    }
}

/// Human supply `max(0, alpha_h + beta_h p - phi_h q)`.
pub fn supply_human(p: f64, q: f64, params: &ModelParams) -> f64 {
    supply_human_linear(p, q, params).max(0.0)
}

/// The unclamped linear form of [`supply_human`], used for clearing checks.
pub fn supply_human_linear(p: f64, q: f64, params: &ModelParams) -> f64 {
    params.alpha_h + params.beta_h * p - params.phi_h * q
}

/// Price-only human supply `alpha_h + beta_h p`.
pub fn supply_human_price_only(p: f64, params: &ModelParams) -> f64 {
    params.alpha_h + params.beta_h * p
}

/// AI supply: zero below `c_ai`, otherwise the linear form capped at `s_max`.
pub fn supply_ai(p: f64, q: f64, params: &ModelParams) -> f64 {
    if p < params.c_ai {
        return 0.0;
    }
    supply_ai_linear(p, q, params).min(params.s_max)
}

pub fn supply_ai_linear(p: f64, q: f64, params: &ModelParams) -> f64 {
    params.alpha_ai + params.beta_ai * p + params.phi_ai * q
}

/// Total supply from both linear forms, with no clamp, threshold or cap.
pub fn total_supply_linear(p: f64, q: f64, params: &ModelParams) -> f64 {
    supply_human_linear(p, q, params) + supply_ai_linear(p, q, params)
}

/// Demand `max(0, gamma - eta p + kappa q)`.
pub fn demand(p: f64, q: f64, params: &ModelParams) -> f64 {
    demand_linear(p, q, params).max(0.0)
}

pub fn demand_linear(p: f64, q: f64, params: &ModelParams) -> f64 {
    params.gamma - params.eta * p + params.kappa * q
}

/// `theta ln q - (delta / 2) q^2` without the domain check.
pub(crate) fn utility_unchecked(q: f64, theta: f64, delta: f64) -> f64 {
    theta * q.ln() - 0.5 * delta * q * q
}

/// Consumer utility of content quality `q`.
pub fn utility(q: f64, params: &ModelParams) -> Result<f64, ModelError> {
    if !(q > 0.0) {
        return Err(domain("quality", "> 0", q));
    }
    Ok(utility_unchecked(q, params.theta_u, params.delta_u))
}

pub fn marginal_utility(q: f64, params: &ModelParams) -> Result<f64, ModelError> {
    if !(q > 0.0) {
        return Err(domain("quality", "> 0", q));
    }
    Ok(params.theta_u / q - params.delta_u * q)
}

/// Utility-maximising quality `sqrt(theta_u / delta_u)`.
pub fn optimal_quality(params: &ModelParams) -> f64 {
    (params.theta_u / params.delta_u).sqrt()
}

/// Traffic attracted by content of quality `q`: `scale * q^exponent`.
pub fn traffic_share(q: f64, params: &ModelParams) -> f64 {
    params.traffic_scale * q.max(0.0).powf(params.traffic_exponent)
}

/// Pareto density of traffic level `t` on `[pareto_tmin, inf)`.
pub fn pareto_density(t: f64, params: &ModelParams) -> Result<f64, ModelError> {
    if !(t >= params.pareto_tmin) {
        return Err(domain("traffic", ">= pareto_tmin", t));
    }
    let a = params.pareto_alpha;
    Ok(a * params.pareto_tmin.powf(a) / t.powf(a + 1.0))
}

/// Per-item human production cost `cost_fixed + cost_quad q^2`.
pub fn human_cost(q: f64, params: &ModelParams) -> f64 {
    params.cost_fixed + params.cost_quad * q * q
}
