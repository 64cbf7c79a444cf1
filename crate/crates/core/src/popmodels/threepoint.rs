//! Three-point initial parameter estimation.
//!
//! Each closed form becomes affine in an exponential under a model
//! transform y: ln p (Gompertz), 1/p (Logistic), p^{1/4} (Bertalanffy),
//! giving y(t) = B + C e^{-lambda t}. Sampling the window at three
//! equally spaced instants t = 0, h, 2h pins the three unknowns:
//!
//!   alpha  = (y(h) - y(0)) / (y(2h) - y(0)) = 1 / (1 + e^{-lambda h})
//!   lambda = -(1/h) ln((1 - alpha) / alpha)
//!   C      = (y(h) - y(0)) / (e^{-lambda h} - 1)
//!   B      = y(0) - C
//!
//! and (lambda, B, C) map back to (a, b, c) per model. Exact on noiseless
//! data. Richards is seeded from the fitted logistic instead.

use crate::popmodels::curve::{GrowthModelKind, GrowthParams};
use crate::popmodels::PopModelError;

pub fn estimate_initial(
    kind: GrowthModelKind,
    window: &[f64],
) -> Result<GrowthParams, PopModelError> {
    if kind == GrowthModelKind::Richards {
        return Err(PopModelError::RichardsThreePoint);
    }
    let len = window.len();
    let h = (len - 1) / 2;
    if len < 3 || h == 0 {
        return Err(PopModelError::DegenerateWindow);
    }
    let samples = [window[0], window[h], window[2 * h]];
    if samples[0] <= 0.0 || !(samples[0] < samples[1] && samples[1] < samples[2]) {
        return Err(PopModelError::DegenerateWindow);
    }

    let y: Vec<f64> = samples
        .iter()
        .map(|p| match kind {
            GrowthModelKind::Gompertz => p.ln(),
            GrowthModelKind::Logistic => 1.0 / p,
            GrowthModelKind::Bertalanffy => p.powf(0.25),
            GrowthModelKind::Richards => unreachable!("rejected above"),
        })
        .collect();

    let denom = y[2] - y[0];
    if denom == 0.0 {
        return Err(PopModelError::DegenerateWindow);
    }
    let alpha = (y[1] - y[0]) / denom;
    if !(alpha > 0.0 && alpha < 1.0) || alpha == 0.5 {
        return Err(PopModelError::DegenerateWindow);
    }
    let h = h as f64;
    let lambda = -(1.0 / h) * ((1.0 - alpha) / alpha).ln();
    let c = (y[1] - y[0]) / ((-lambda * h).exp() - 1.0);
    let intercept = y[0] - c;
    if !(lambda.is_finite() && c.is_finite() && intercept.is_finite()) {
        return Err(PopModelError::DegenerateWindow);
    }

    Ok(match kind {
        GrowthModelKind::Gompertz => {
            // y = ln p = a/b + c e^{-bt}: lambda = b, B = a/b.
            GrowthParams::new(intercept * lambda, lambda, c)
        }
        GrowthModelKind::Logistic => {
            // y = 1/p = b/a + c e^{-at}: lambda = a, B = b/a.
            GrowthParams::new(lambda, intercept * lambda, c)
        }
        GrowthModelKind::Bertalanffy => {
            // y = p^{1/4} = a/b + c e^{-bt/4}: lambda = b/4, B = a/b.
            let b = 4.0 * lambda;
            GrowthParams::new(intercept * b, b, c)
        }
        GrowthModelKind::Richards => unreachable!("rejected above"),
    })
}

/// Deterministic defaults used when the window is degenerate (flat,
/// non-monotone or non-positive samples): start from a = 1, b = 0.1,
/// c = -1 and adjust one parameter so the curve passes through the first
/// datum, keeping the objective finite for the optimizer.
pub fn fallback_params(kind: GrowthModelKind, first_datum: f64) -> GrowthParams {
    let p0 = first_datum.max(1.0);
    let (a, b, c) = (1.0, 0.1, -1.0);
    match kind {
        // p(0) = e^{a/b + c}  =>  a = b (ln p0 - c).
        GrowthModelKind::Gompertz => GrowthParams::new(b * (p0.ln() - c), b, c),
        // p(0) = 1 / (c + b/a)  =>  c = 1/p0 - b/a.
        GrowthModelKind::Logistic => GrowthParams::new(a, b, 1.0 / p0 - b / a),
        GrowthModelKind::Richards => {
            let logistic = fallback_params(GrowthModelKind::Logistic, first_datum);
            GrowthParams::with_shape(logistic.a, logistic.b, logistic.c, 1.0)
        }
        // p(0) = (a/b + c)^4  =>  c = p0^{1/4} - a/b.
        GrowthModelKind::Bertalanffy => GrowthParams::new(a, b, p0.powf(0.25) - a / b),
    }
}
