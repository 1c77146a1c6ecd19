//! Market clearing and welfare accounting for the analytic model.
//!
//! Quality is pinned by consumer optimisation (`q* = sqrt(theta/delta)`), then
//! the linear clearing condition `A p* + B q* = C` gives the price.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{self, ModelParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("p_max ({p_max}) must exceed the equilibrium price ({p_star})")]
    PriceBound { p_max: f64, p_star: f64 },
    #[error("threshold `{name}` must be > 0, got {value}")]
    Threshold { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub p_star: f64,
    pub q_star: f64,
    /// `A = beta_h + beta_ai + eta`
    pub coeff_a: f64,
    /// `B = -phi_h + phi_ai - kappa`
    pub coeff_b: f64,
    /// `C = gamma - alpha_h - alpha_ai`
    pub coeff_c: f64,
    /// False when the clearing price is negative.
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WelfareCase {
    WelfareIncreasing,
    WelfareDecreasing,
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelfareReport {
    pub cs: f64,
    pub ps_human: f64,
    pub ps_ai: f64,
    pub welfare: f64,
    pub case_label: WelfareCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelfareDelta {
    pub delta_cs: f64,
    pub delta_ps: f64,
    pub delta_w: f64,
}

/// Cutoffs for what counts as high AI quality and low information overload.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelfareThresholds {
    pub quality: f64,
    pub overload: f64,
}

pub fn solve_equilibrium(params: &ModelParams) -> EquilibriumSolution {
    let coeff_a = params.beta_h + params.beta_ai + params.eta;
    let coeff_b = -params.phi_h + params.phi_ai - params.kappa;
    let coeff_c = params.gamma - (params.alpha_h + params.alpha_ai);
    let q_star = model::optimal_quality(params);
    let p_star = (coeff_c - coeff_b * q_star) / coeff_a;
    EquilibriumSolution {
        p_star,
        q_star,
        coeff_a,
        coeff_b,
        coeff_c,
        feasible: p_star >= 0.0,
    }
}

/// Equilibrium of the human-only market (all AI supply terms zeroed).
pub fn pre_ai_equilibrium(params: &ModelParams) -> EquilibriumSolution {
    solve_equilibrium(&params.without_ai())
}

/// `|S - D| / max(1, |D|)` at the solution, using the unclamped linear forms.
pub fn clearing_residual(eq: &EquilibriumSolution, params: &ModelParams) -> f64 {
    let s = model::total_supply_linear(eq.p_star, eq.q_star, params);
    let d = model::demand_linear(eq.p_star, eq.q_star, params);
    (s - d).abs() / d.abs().max(1.0)
}

/// Area under the (zero-clamped) demand line between `p*` and `p_max`.
pub fn consumer_surplus_integral(
    eq: &EquilibriumSolution,
    params: &ModelParams,
) -> Result<f64, EquilibriumError> {
    if !(params.p_max > eq.p_star) {
        return Err(EquilibriumError::PriceBound {
            p_max: params.p_max,
            p_star: eq.p_star,
        });
    }
    // D(p) = intercept - eta p, positive below its root.
    let intercept = params.gamma + params.kappa * eq.q_star;
    let root = intercept / params.eta;
    let upper = params.p_max.min(root);
    let lower = eq.p_star;
    if upper <= lower {
        return Ok(0.0);
    }
    Ok(intercept * (upper - lower) - 0.5 * params.eta * (upper * upper - lower * lower))
}

/// `U(q*) - p*`, the per-consumer surplus used in the welfare comparisons.
pub fn consumer_surplus_representative(eq: &EquilibriumSolution, params: &ModelParams) -> f64 {
    model::utility_unchecked(eq.q_star, params.theta_u, params.delta_u) - eq.p_star
}

/// `(p* - C_H(q*)) S_H(p*, q*)`. Negative when humans sell below cost.
pub fn producer_surplus_human(eq: &EquilibriumSolution, params: &ModelParams) -> f64 {
    (eq.p_star - model::human_cost(eq.q_star, params))
        * model::supply_human(eq.p_star, eq.q_star, params)
}

/// `p* S_AI(p*, q*)`; AI marginal cost is treated as zero.
pub fn producer_surplus_ai(eq: &EquilibriumSolution, params: &ModelParams) -> f64 {
    eq.p_star * model::supply_ai(eq.p_star, eq.q_star, params)
}

pub fn classify_welfare_case(
    params: &ModelParams,
    thresholds: WelfareThresholds,
) -> Result<WelfareCase, EquilibriumError> {
    if !(thresholds.quality > 0.0) {
        return Err(EquilibriumError::Threshold {
            name: "quality",
            value: thresholds.quality,
        });
    }
    if !(thresholds.overload > 0.0) {
        return Err(EquilibriumError::Threshold {
            name: "overload",
            value: thresholds.overload,
        });
    }
    let q = model::optimal_quality(params);
    let high_quality = q >= thresholds.quality;
    let low_overload = params.delta_u <= thresholds.overload;
    Ok(match (high_quality, low_overload) {
        (true, true) => WelfareCase::WelfareIncreasing,
        (false, false) => WelfareCase::WelfareDecreasing,
        _ => WelfareCase::Ambiguous,
    })
}

pub fn welfare_report(
    eq: &EquilibriumSolution,
    params: &ModelParams,
    thresholds: WelfareThresholds,
) -> Result<WelfareReport, EquilibriumError> {
    let cs = consumer_surplus_representative(eq, params);
    let ps_human = producer_surplus_human(eq, params);
    let ps_ai = producer_surplus_ai(eq, params);
    Ok(WelfareReport {
        cs,
        ps_human,
        ps_ai,
        welfare: cs + ps_human + ps_ai,
        case_label: classify_welfare_case(params, thresholds)?,
    })
}

/// Post-minus-pre differences. `delta_w` is formed as `delta_cs + delta_ps`.
pub fn welfare_delta(pre_ai: &WelfareReport, post_ai: &WelfareReport) -> WelfareDelta {
    let delta_cs = post_ai.cs - pre_ai.cs;
    let delta_ps = (post_ai.ps_human + post_ai.ps_ai) - (pre_ai.ps_human + pre_ai.ps_ai);
    WelfareDelta {
        delta_cs,
        delta_ps,
        delta_w: delta_cs + delta_ps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_params() -> ModelParams {
        ModelParams {
            beta_h: 1.0,
            beta_ai: 1.0,
            eta: 1.0,
            phi_h: 1.0,
            phi_ai: 2.0,
            kappa: 1.0,
            gamma: 10.0,
            alpha_h: 2.0,
            alpha_ai: 2.0,
            theta_u: 1.0,
            delta_u: 1.0,
            ..ModelParams::default()
        }
    }

    fn eq_at(p_star: f64, q_star: f64) -> EquilibriumSolution {
        EquilibriumSolution {
            p_star,
            q_star,
            coeff_a: 1.0,
            coeff_b: 0.0,
            coeff_c: p_star,
            feasible: p_star >= 0.0,
        }
    }

    #[test]
    fn worked_equilibrium() {
        let eq = solve_equilibrium(&worked_params());
        assert_eq!(eq.coeff_a, 3.0);
        assert_eq!(eq.coeff_b, 0.0);
        assert_eq!(eq.coeff_c, 6.0);
        assert_eq!(eq.q_star, 1.0);
        assert_eq!(eq.p_star, 2.0);
        assert!(eq.feasible);
    }

    #[test]
    fn zero_numerator_and_infeasible() {
        let params = ModelParams {
            gamma: 4.0,
            ..worked_params()
        };
        let eq = solve_equilibrium(&params);
        assert_eq!(eq.coeff_c, 0.0);
        assert_eq!(eq.p_star, 0.0);
        assert!(eq.feasible);

        // gamma = 1 gives C = -3 with A = 3, B = 0.
        let params = ModelParams {
            gamma: 1.0,
            ..worked_params()
        };
        let eq = solve_equilibrium(&params);
        assert_eq!(eq.coeff_c, -3.0);
        assert_eq!(eq.p_star, -1.0);
        assert!(!eq.feasible);
    }

    #[test]
    fn pre_ai_example() {
        let params = ModelParams {
            beta_h: 1.0,
            eta: 1.0,
            phi_h: 0.0,
            kappa: 1.0,
            gamma: 6.0,
            alpha_h: 2.0,
            theta_u: 1.0,
            delta_u: 1.0,
            ..ModelParams::default()
        };
        let eq = pre_ai_equilibrium(&params);
        assert_eq!(eq.coeff_a, 2.0);
        assert_eq!(eq.coeff_b, -1.0);
        assert_eq!(eq.coeff_c, 4.0);
        assert_eq!(eq.q_star, 1.0);
        assert_eq!(eq.p_star, 2.5);

        let post = solve_equilibrium(&ModelParams {
            alpha_ai: 1.0,
            beta_ai: 1.0,
            phi_ai: 0.5,
            ..params.clone()
        });
        assert!(post.coeff_b <= 0.0);
        assert!(eq.p_star > post.p_star);

        let human_only = params.without_ai();
        assert_eq!(
            pre_ai_equilibrium(&human_only),
            solve_equilibrium(&human_only)
        );
    }

    #[test]
    fn cs_integral_triangle() {
        // D(p) = 10 - p
        let params = ModelParams {
            gamma: 10.0,
            eta: 1.0,
            kappa: 0.0,
            p_max: 10.0,
            ..ModelParams::default()
        };
        assert_eq!(
            consumer_surplus_integral(&eq_at(0.0, 1.0), &params).unwrap(),
            50.0
        );
        let wide = ModelParams {
            p_max: 20.0,
            ..params.clone()
        };
        assert_eq!(
            consumer_surplus_integral(&eq_at(10.0, 1.0), &wide).unwrap(),
            0.0
        );
        assert!(matches!(
            consumer_surplus_integral(&eq_at(10.0, 1.0), &params),
            Err(EquilibriumError::PriceBound { .. })
        ));
    }

    #[test]
    fn cs_representative_examples() {
        let p = |theta, delta| ModelParams {
            theta_u: theta,
            delta_u: delta,
            ..ModelParams::default()
        };
        assert_eq!(
            consumer_surplus_representative(&eq_at(0.0, 1.0), &p(1.0, 1.0)),
            -0.5
        );
        assert_eq!(
            consumer_surplus_representative(&eq_at(1.0, 1.0), &p(2.0, 2.0)),
            -2.0
        );
    }

    #[test]
    fn cs_matches_closed_form_at_optimum() {
        for &(theta, delta, p_star) in &[(1.0, 1.0, 0.3), (4.0, 0.25, 2.0), (0.7, 3.0, 0.0)] {
            let params = ModelParams {
                theta_u: theta,
                delta_u: delta,
                ..ModelParams::default()
            };
            let q = model::optimal_quality(&params);
            let got = consumer_surplus_representative(&eq_at(p_star, q), &params);
            let closed: f64 = theta * (theta / delta as f64).sqrt().ln() - theta / 2.0 - p_star;
            assert!((got - closed).abs() <= 1e-12 * closed.abs().max(1.0));
        }
    }

    #[test]
    fn producer_surplus_examples() {
        // S_H(2, 1) = 4 and C_H(1) = 1.
        let params = ModelParams {
            alpha_h: 3.0,
            beta_h: 1.0,
            phi_h: 1.0,
            cost_fixed: 0.5,
            cost_quad: 0.5,
            ..ModelParams::default()
        };
        assert_eq!(producer_surplus_human(&eq_at(2.0, 1.0), &params), 4.0);
        assert_eq!(producer_surplus_human(&eq_at(1.0, 1.0), &params), 0.0);
        // alpha_h = 2.5 gives S_H(0.5, 1) = 2 with margin -0.5.
        let params = ModelParams {
            alpha_h: 2.5,
            ..params
        };
        assert_eq!(producer_surplus_human(&eq_at(0.5, 1.0), &params), -1.0);
    }

    #[test]
    fn ai_surplus_examples() {
        let params = ModelParams {
            alpha_ai: 1.0,
            beta_ai: 1.0,
            phi_ai: 0.0,
            c_ai: 0.5,
            ..ModelParams::default()
        };
        assert_eq!(producer_surplus_ai(&eq_at(0.0, 1.0), &params), 0.0);
        assert_eq!(producer_surplus_ai(&eq_at(2.0, 1.0), &params), 6.0);
        assert_eq!(producer_surplus_ai(&eq_at(0.4, 1.0), &params), 0.0);
    }

    fn report(cs: f64, ps: f64) -> WelfareReport {
        WelfareReport {
            cs,
            ps_human: ps,
            ps_ai: 0.0,
            welfare: cs + ps,
            case_label: WelfareCase::Ambiguous,
        }
    }

    #[test]
    fn delta_examples() {
        let a = report(5.0, 3.0);
        let d = welfare_delta(&a, &a);
        assert_eq!((d.delta_cs, d.delta_ps, d.delta_w), (0.0, 0.0, 0.0));
        let d = welfare_delta(&a, &report(7.0, 2.0));
        assert_eq!((d.delta_cs, d.delta_ps, d.delta_w), (2.0, -1.0, 1.0));
    }

    #[test]
    fn welfare_cases() {
        // q* = sqrt(theta / delta)
        let p = |q: f64, delta: f64| ModelParams {
            theta_u: q * q * delta,
            delta_u: delta,
            ..ModelParams::default()
        };
        let t = WelfareThresholds {
            quality: 1.0,
            overload: 1.0,
        };
        assert_eq!(
            classify_welfare_case(&p(2.0, 0.5), t).unwrap(),
            WelfareCase::WelfareIncreasing
        );
        assert_eq!(
            classify_welfare_case(&p(0.5, 2.0), t).unwrap(),
            WelfareCase::WelfareDecreasing
        );
        assert_eq!(
            classify_welfare_case(&p(2.0, 2.0), t).unwrap(),
            WelfareCase::Ambiguous
        );
        let bad = WelfareThresholds {
            quality: 0.0,
            overload: 1.0,
        };
        assert!(classify_welfare_case(&p(2.0, 2.0), bad).is_err());
    }

    #[test]
    fn report_sums_components() {
        let params = worked_params();
        let eq = solve_equilibrium(&params);
        let t = WelfareThresholds {
            quality: 1.0,
            overload: 1.0,
        };
        let r = welfare_report(&eq, &params, t).unwrap();
        assert_eq!(r.welfare, r.cs + r.ps_human + r.ps_ai);
        assert_eq!(r.case_label, WelfareCase::WelfareIncreasing);
    }
}
