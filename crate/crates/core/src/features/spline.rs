//! Natural cubic spline interpolation.
//!
//! Second derivatives vanish at both endpoints; outside the knot range the
//! edge segment's cubic is extended, matching the common library behavior.

use crate::features::FeatureError;

#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivative of the spline at each knot (zero at the ends).
    m: Vec<f64>,
}

impl NaturalCubicSpline {
    /// Fit through `(xs[i], ys[i])`; xs must be strictly increasing.
    pub fn fit(xs: &[f64], ys: &[f64]) -> Result<Self, FeatureError> {
        assert_eq!(xs.len(), ys.len(), "knot coordinate lengths differ");
        let n = xs.len();
        if n < 2 {
            return Err(FeatureError::TooFewKnots);
        }
        assert!(
            xs.windows(2).all(|w| w[1] > w[0]),
            "spline knots must be strictly increasing"
        );
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for the n-2 interior second derivatives,
            // solved with the Thomas algorithm.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut lower = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                lower[i] = h0 / 6.0;
                diag[i] = (xs[i + 2] - xs[i]) / 3.0;
                upper[i] = h1 / 6.0;
                rhs[i] = (ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0;
            }
            for i in 1..k {
                let w = lower[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (1..k).rev() {
                m[i] = (rhs[i - 1] - upper[i - 1] * m[i + 1]) / diag[i - 1];
            }
        }
        Ok(Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    /// Evaluate at `x`, extending the edge cubics outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let seg = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let (y0, y1) = (self.ys[seg], self.ys[seg + 1]);
        let (m0, m1) = (self.m[seg], self.m[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * y0
            + b * y1
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_knots_exactly() {
        let xs = [0.0, 1.0, 3.0, 4.5, 7.0];
        let ys = [2.0, -1.0, 0.5, 3.0, 3.0];
        let s = NaturalCubicSpline::fit(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            assert!((s.eval(*x) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_data_gives_constant_spline() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 7.0).collect();
        let ys = vec![4.25; 6];
        let s = NaturalCubicSpline::fit(&xs, &ys).unwrap();
        for i in 0..=35 {
            assert!((s.eval(i as f64) - 4.25).abs() < 1e-12);
        }
        // Constant extends outside the knots as well.
        assert!((s.eval(-3.0) - 4.25).abs() < 1e-12);
        assert!((s.eval(40.0) - 4.25).abs() < 1e-12);
    }

    #[test]
    fn linear_data_reproduced_everywhere() {
        // A natural spline through collinear points is that line.
        let xs: Vec<f64> = vec![0.0, 2.0, 5.0, 9.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let s = NaturalCubicSpline::fit(&xs, &ys).unwrap();
        for x in [-1.0, 0.5, 3.3, 8.0, 11.0] {
            assert!((s.eval(x) - (3.0 * x - 1.0)).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn natural_boundary_second_derivative_is_zero() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 1.0, 8.0, 27.0];
        let s = NaturalCubicSpline::fit(&xs, &ys).unwrap();
        // Second difference at the ends shrinks with step -> M = 0 there.
        let h = 1e-4;
        let dd0 = (s.eval(0.0 + h) - 2.0 * s.eval(0.0) + s.eval(0.0 - h)) / (h * h);
        let ddn = (s.eval(3.0 + h) - 2.0 * s.eval(3.0) + s.eval(3.0 - h)) / (h * h);
        assert!(dd0.abs() < 1e-5, "left second derivative {dd0}");
        assert!(ddn.abs() < 1e-5, "right second derivative {ddn}");
    }

    #[test]
    fn too_few_knots_rejected() {
        assert!(matches!(
            NaturalCubicSpline::fit(&[1.0], &[1.0]),
            Err(FeatureError::TooFewKnots)
        ));
    }
}
