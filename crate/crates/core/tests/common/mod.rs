#![allow(dead_code)]

use platform_sim::ModelParams;
use proptest::prelude::*;

/// Composite Simpson's rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

pub fn arb_params() -> impl Strategy<Value = ModelParams> {
    (
        (0.0..10.0f64, 0.1..5.0f64, 0.0..3.0f64),
        (0.0..10.0f64, 0.0..5.0f64, 0.0..3.0f64),
        (1.0..50.0f64, 0.1..5.0f64, 0.0..3.0f64),
        (0.1..5.0f64, 0.05..3.0f64),
        (0.0..0.5f64, 0.0..0.3f64),
    )
        .prop_map(
            |((ah, bh, ph), (aa, ba, pa), (g, e, k), (th, de), (cf, cq))| ModelParams {
                alpha_h: ah,
                beta_h: bh,
                phi_h: ph,
                alpha_ai: aa,
                beta_ai: ba,
                phi_ai: pa,
                gamma: g,
                eta: e,
                kappa: k,
                theta_u: th,
                delta_u: de,
                cost_fixed: cf,
                cost_quad: cq,
                s_max: 10.0 * g,
                ..ModelParams::default()
            },
        )
}
