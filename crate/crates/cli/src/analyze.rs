use std::path::Path;

use platform_sim::equilibrium::{
    self, EquilibriumSolution, WelfareCase, WelfareDelta, WelfareThresholds,
};
use platform_sim::model::ModelParams;
use serde::Serialize;

use crate::Failure;

/// Equilibrium and welfare figures for one market.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Market {
    pub p_star: f64,
    pub q_star: f64,
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub coeff_c: f64,
    pub feasible: bool,
    /// Area under demand between `p*` and `p_max`; absent when `p* >= p_max`.
    pub cs_integral: Option<f64>,
    pub cs_representative: f64,
    pub ps_human: f64,
    pub ps_ai: f64,
    pub welfare: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Analysis {
    pub post_ai: Market,
    pub pre_ai: Market,
    pub delta: WelfareDelta,
    pub case: WelfareCase,
}

fn market(
    eq: &EquilibriumSolution,
    params: &ModelParams,
    thresholds: WelfareThresholds,
) -> Result<(Market, equilibrium::WelfareReport), Failure> {
    let report = equilibrium::welfare_report(eq, params, thresholds).map_err(Failure::invalid)?;
    let m = Market {
        p_star: eq.p_star,
        q_star: eq.q_star,
        coeff_a: eq.coeff_a,
        coeff_b: eq.coeff_b,
        coeff_c: eq.coeff_c,
        feasible: eq.feasible,
        cs_integral: equilibrium::consumer_surplus_integral(eq, params).ok(),
        cs_representative: report.cs,
        ps_human: report.ps_human,
        ps_ai: report.ps_ai,
        welfare: report.welfare,
    };
    Ok((m, report))
}

pub fn analyze(params: &ModelParams, thresholds: WelfareThresholds) -> Result<Analysis, Failure> {
    let post = equilibrium::solve_equilibrium(params);
    let pre = equilibrium::pre_ai_equilibrium(params);
    let (post_ai, post_report) = market(&post, params, thresholds)?;
    let (pre_ai, pre_report) = market(&pre, &params.without_ai(), thresholds)?;
    Ok(Analysis {
        post_ai,
        pre_ai,
        delta: equilibrium::welfare_delta(&pre_report, &post_report),
        case: post_report.case_label,
    })
}

fn rows(a: &Analysis) -> Vec<(&'static str, String, String, String)> {
    let num = |x: f64| x.to_string();
    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), num);
    let (post, pre) = (&a.post_ai, &a.pre_ai);
    let diff = |x: f64, y: f64| num(x - y);
    vec![
        (
            "p*",
            num(post.p_star),
            num(pre.p_star),
            diff(post.p_star, pre.p_star),
        ),
        (
            "q*",
            num(post.q_star),
            num(pre.q_star),
            diff(post.q_star, pre.q_star),
        ),
        (
            "A",
            num(post.coeff_a),
            num(pre.coeff_a),
            diff(post.coeff_a, pre.coeff_a),
        ),
        (
            "B",
            num(post.coeff_b),
            num(pre.coeff_b),
            diff(post.coeff_b, pre.coeff_b),
        ),
        (
            "C",
            num(post.coeff_c),
            num(pre.coeff_c),
            diff(post.coeff_c, pre.coeff_c),
        ),
        (
            "feasible",
            post.feasible.to_string(),
            pre.feasible.to_string(),
            String::new(),
        ),
        (
            "CS (integral)",
            opt(post.cs_integral),
            opt(pre.cs_integral),
            match (post.cs_integral, pre.cs_integral) {
                (Some(x), Some(y)) => num(x - y),
                _ => "n/a".to_string(),
            },
        ),
        (
            "CS (representative)",
            num(post.cs_representative),
            num(pre.cs_representative),
            num(a.delta.delta_cs),
        ),
        (
            "PS_H",
            num(post.ps_human),
            num(pre.ps_human),
            diff(post.ps_human, pre.ps_human),
        ),
        (
            "PS_AI",
            num(post.ps_ai),
            num(pre.ps_ai),
            diff(post.ps_ai, pre.ps_ai),
        ),
        (
            "PS",
            num(post.ps_human + post.ps_ai),
            num(pre.ps_human + pre.ps_ai),
            num(a.delta.delta_ps),
        ),
        (
            "W",
            num(post.welfare),
            num(pre.welfare),
            num(a.delta.delta_w),
        ),
    ]
}

fn case_name(case: WelfareCase) -> &'static str {
    match case {
        WelfareCase::WelfareIncreasing => "WelfareIncreasing",
        WelfareCase::WelfareDecreasing => "WelfareDecreasing",
        WelfareCase::Ambiguous => "Ambiguous",
    }
}

pub fn render_text(a: &Analysis) -> String {
    let mut out = format!(
        "{:<20} {:>24} {:>24} {:>24}\n",
        "", "with AI", "without AI", "delta"
    );
    for (name, post, pre, delta) in rows(a) {
        out += &format!("{name:<20} {post:>24} {pre:>24} {delta:>24}\n");
    }
    out += &format!("case: {}\n", case_name(a.case));
    out
}

pub fn render_csv(a: &Analysis) -> String {
    let mut out = String::from("quantity,with_ai,without_ai,delta\n");
    for (name, post, pre, delta) in rows(a) {
        out += &format!("{name},{post},{pre},{delta}\n");
    }
    out += &format!("case,{},,\n", case_name(a.case));
    out
}

pub fn cmd_analyze(
    params: &ModelParams,
    thresholds: WelfareThresholds,
    json: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let analysis = analyze(params, thresholds)?;
    if json {
        crate::print_json(&analysis);
    } else {
        print!("{}", render_text(&analysis));
    }
    if let Some(dir) = out {
        crate::create_dir(dir)?;
        let path = dir.join("analysis.csv");
        std::fs::write(&path, render_csv(&analysis))
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
