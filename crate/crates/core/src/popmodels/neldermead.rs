//! Derivative-free simplex minimizer.
//!
//! Coefficients and termination mirror the classic fmin defaults:
//! reflection 1, expansion 2, contraction 0.5, shrink 0.5; stop when both
//! the vertex spread and the value spread fall under 1e-4, or after
//! 200 iterations per parameter. Non-finite trial values are treated as
//! +inf so the simplex walks away from them.

use crate::popmodels::PopModelError;

#[derive(Debug, Clone)]
pub struct NelderMeadConfig {
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_iters_per_param: usize,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            x_tol: 1e-4,
            f_tol: 1e-4,
            max_iters_per_param: 200,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective value after each iteration; non-increasing.
    pub best_trace: Vec<f64>,
}

/// One simplex vertex.
#[derive(Clone)]
struct Vertex {
    x: Vec<f64>,
    f: f64,
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn minimize(
    objective: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    config: &NelderMeadConfig,
) -> Result<NelderMeadResult, PopModelError> {
    let n = x0.len();
    assert!(n >= 1, "need at least one parameter");
    let eval = |x: &[f64]| finite_or_inf(objective(x));

    // Initial simplex: perturb each coordinate by 5% (or a small absolute
    // step when it is zero).
    let mut simplex: Vec<Vertex> = Vec::with_capacity(n + 1);
    simplex.push(Vertex {
        x: x0.to_vec(),
        f: eval(x0),
    });
    for i in 0..n {
        let mut x = x0.to_vec();
        if x[i] != 0.0 {
            x[i] *= 1.05;
        } else {
            x[i] = 0.00025;
        }
        let f = eval(&x);
        simplex.push(Vertex { x, f });
    }
    if simplex.iter().all(|v| !v.f.is_finite()) {
        return Err(PopModelError::OptimizerDiverged);
    }

    let max_iters = config.max_iters_per_param * n;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        simplex.sort_by(|a, b| a.f.partial_cmp(&b.f).expect("NaN mapped to inf"));
        let best = &simplex[0];
        let worst = &simplex[n];

        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.x.iter().zip(&best.x).map(|(a, b)| (a - b).abs()))
            .fold(0.0_f64, f64::max);
        let f_spread = simplex[1..]
            .iter()
            .map(|v| (v.f - best.f).abs())
            .fold(0.0_f64, f64::max);
        if x_spread <= config.x_tol && f_spread <= config.f_tol {
            converged = true;
            break;
        }

        iterations += 1;

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let blend = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.x)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = blend(config.reflection);
        let fr = eval(&xr);
        let replacement = if fr < simplex[0].f {
            let xe = blend(config.expansion);
            let fe = eval(&xe);
            if fe < fr {
                Vertex { x: xe, f: fe }
            } else {
                Vertex { x: xr, f: fr }
            }
        } else if fr < simplex[n - 1].f {
            Vertex { x: xr, f: fr }
        } else {
            // Contract: outside if the reflection improved on the worst
            // vertex, inside otherwise.
            let xc = if fr < worst.f {
                centroid
                    .iter()
                    .zip(&xr)
                    .map(|(c, r)| c + config.contraction * (r - c))
                    .collect::<Vec<f64>>()
            } else {
                blend(-config.contraction)
            };
            let fc = eval(&xc);
            if fc < worst.f.min(fr) {
                Vertex { x: xc, f: fc }
            } else {
                // Shrink every vertex toward the best one.
                let best_x = simplex[0].x.clone();
                for v in simplex.iter_mut().skip(1) {
                    for (xi, bi) in v.x.iter_mut().zip(&best_x) {
                        *xi = bi + config.shrink * (*xi - *bi);
                    }
                    v.f = eval(&v.x);
                }
                trace.push(simplex.iter().map(|v| v.f).fold(f64::INFINITY, f64::min));
                continue;
            }
        };
        simplex[n] = replacement;
        trace.push(
            simplex
                .iter()
                .map(|v| v.f)
                .fold(f64::INFINITY, f64::min),
        );
    }

    simplex.sort_by(|a, b| a.f.partial_cmp(&b.f).expect("NaN mapped to inf"));
    let best = simplex.into_iter().next().expect("nonempty simplex");
    if !best.f.is_finite() {
        return Err(PopModelError::OptimizerDiverged);
    }
    Ok(NelderMeadResult {
        x: best.x,
        fx: best.f,
        iterations,
        converged,
        best_trace: trace,
    })
}
