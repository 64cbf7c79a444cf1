//! Closed-form solutions and ODE right-hand sides of the four growth
//! models.
//!
//! Parameter conventions, with `p(t)` the cumulative population at time
//! `t` (days since the window start):
//!
//! * Gompertz     p(t) = exp(a/b + c e^{-bt})          p' = a p - b p ln p
//! * Logistic     p(t) = 1 / (c e^{-at} + b/a)         p' = a p - b p^2
//! * Richards     p(t) = (c e^{-at} + (b/a)^s)^{-1/s}  p' = (a/s) p (1 - (p b / a)^s)
//! * Bertalanffy  p(t) = (a/b + c e^{-bt/4})^4         p' = a p^{3/4} - b p
//!
//! Richards generalizes the logistic curve: at s = 1 the two coincide
//! exactly, with carrying capacity a/b.

use serde::{Deserialize, Serialize};

use crate::popmodels::PopModelError;

/// Floor for the Richards base during optimization, keeping the
/// fractional power (and the objective) finite while the simplex explores.
pub(crate) const RICHARDS_BASE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModelKind {
    Gompertz,
    Logistic,
    Richards,
    Bertalanffy,
}

impl GrowthModelKind {
    pub const ALL: [GrowthModelKind; 4] = [
        GrowthModelKind::Gompertz,
        GrowthModelKind::Logistic,
        GrowthModelKind::Richards,
        GrowthModelKind::Bertalanffy,
    ];

    pub fn n_params(self) -> usize {
        match self {
            GrowthModelKind::Richards => 4,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GrowthModelKind::Gompertz => "gompertz",
            GrowthModelKind::Logistic => "logistic",
            GrowthModelKind::Richards => "richards",
            GrowthModelKind::Bertalanffy => "bertalanffy",
        }
    }
}

impl std::fmt::Display for GrowthModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl GrowthParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c, s: None }
    }

    pub fn with_shape(a: f64, b: f64, c: f64, s: f64) -> Self {
        Self { a, b, c, s: Some(s) }
    }

    /// Flat parameter vector in optimizer layout.
    pub(crate) fn to_vec(self, kind: GrowthModelKind) -> Vec<f64> {
        match kind {
            GrowthModelKind::Richards => vec![self.a, self.b, self.c, self.s.unwrap_or(1.0)],
            _ => vec![self.a, self.b, self.c],
        }
    }

    pub(crate) fn from_slice(kind: GrowthModelKind, x: &[f64]) -> Self {
        match kind {
            GrowthModelKind::Richards => Self::with_shape(x[0], x[1], x[2], x[3]),
            _ => Self::new(x[0], x[1], x[2]),
        }
    }

    /// The curve's saturation level, when the parameters describe a rising
    /// sigmoid.
    pub fn asymptote(&self, kind: GrowthModelKind) -> f64 {
        match kind {
            GrowthModelKind::Gompertz => (self.a / self.b).exp(),
            GrowthModelKind::Logistic | GrowthModelKind::Richards => self.a / self.b,
            GrowthModelKind::Bertalanffy => (self.a / self.b).powi(4),
        }
    }

    fn validate(&self, kind: GrowthModelKind) -> Result<(), PopModelError> {
        match kind {
            GrowthModelKind::Gompertz | GrowthModelKind::Bertalanffy => {
                if self.b == 0.0 {
                    return Err(PopModelError::ParamDomain(format!(
                        "{kind}: b must be nonzero"
                    )));
                }
            }
            GrowthModelKind::Logistic => {
                if self.a == 0.0 {
                    return Err(PopModelError::ParamDomain("logistic: a must be nonzero".into()));
                }
            }
            GrowthModelKind::Richards => {
                if self.a == 0.0 {
                    return Err(PopModelError::ParamDomain("richards: a must be nonzero".into()));
                }
                match self.s {
                    Some(s) if s > 0.0 => {}
                    Some(s) => {
                        return Err(PopModelError::ParamDomain(format!(
                            "richards: shape s must be positive, got {s}"
                        )))
                    }
                    None => {
                        return Err(PopModelError::ParamDomain(
                            "richards: shape s is required".into(),
                        ))
                    }
                }
                if self.b / self.a <= 0.0 {
                    return Err(PopModelError::ParamDomain(
                        "richards: b/a must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Cumulative population at `t` under the closed-form solution.
pub fn evaluate_curve(
    kind: GrowthModelKind,
    params: &GrowthParams,
    t: f64,
) -> Result<f64, PopModelError> {
    params.validate(kind)?;
    let p = match kind {
        GrowthModelKind::Gompertz => {
            (params.a / params.b + params.c * (-params.b * t).exp()).exp()
        }
        GrowthModelKind::Logistic => {
            1.0 / (params.c * (-params.a * t).exp() + params.b / params.a)
        }
        GrowthModelKind::Richards => {
            let s = params.s.expect("validated above");
            let base = params.c * (-params.a * t).exp() + (params.b / params.a).powf(s);
            if base <= 0.0 {
                return Err(PopModelError::ParamDomain(format!(
                    "richards: base {base} cannot be raised to 1/s"
                )));
            }
            base.powf(-1.0 / s)
        }
        GrowthModelKind::Bertalanffy => {
            let x = params.a / params.b + params.c * (-params.b * t / 4.0).exp();
            x.powi(4)
        }
    };
    if p.is_finite() {
        Ok(p)
    } else {
        Err(PopModelError::ParamDomain(format!(
            "{kind}: curve is not finite at t={t}"
        )))
    }
}

/// Closed-form evaluation for optimizer objectives: never errors, clamps
/// the Richards base and lets non-finite values flow out (the simplex
/// rejects them).
pub(crate) fn evaluate_unchecked(kind: GrowthModelKind, x: &[f64], t: f64) -> f64 {
    match kind {
        GrowthModelKind::Gompertz => (x[0] / x[1] + x[2] * (-x[1] * t).exp()).exp(),
        GrowthModelKind::Logistic => 1.0 / (x[2] * (-x[0] * t).exp() + x[1] / x[0]),
        GrowthModelKind::Richards => {
            let s = x[3];
            let base = (x[2] * (-x[0] * t).exp() + (x[1] / x[0]).powf(s))
                .max(RICHARDS_BASE_FLOOR);
            base.powf(-1.0 / s)
        }
        GrowthModelKind::Bertalanffy => {
            let v = x[0] / x[1] + x[2] * (-x[1] * t / 4.0).exp();
            v.powi(4)
        }
    }
}

/// dp/dt as a function of the current population.
pub fn ode_rhs(kind: GrowthModelKind, params: &GrowthParams, p: f64) -> f64 {
    match kind {
        GrowthModelKind::Gompertz => params.a * p - params.b * p * p.ln(),
        GrowthModelKind::Logistic => params.a * p - params.b * p * p,
        GrowthModelKind::Richards => {
            let s = params.s.expect("richards carries s");
            (params.a / s) * p * (1.0 - (p * params.b / params.a).powf(s))
        }
        GrowthModelKind::Bertalanffy => params.a * p.powf(0.75) - params.b * p,
    }
}
