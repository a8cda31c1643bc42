//! Piecewise-cubic interpolation of sampled series on a shared, strictly
//! increasing time grid. Segment slopes come from three-point finite
//! differences, so the interpolant and its derivative are second-order
//! accurate on non-uniform grids.

/// Derivative of a sampled series by three-point Lagrange differentiation:
/// centered stencils in the interior, one-sided second-order stencils at the
/// two endpoints. `times` must be strictly increasing with `len >= 3`.
pub(crate) fn three_point_derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    assert!(n >= 3 && values.len() == n);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let s = i.clamp(1, n - 2); // stencil center
        let (ta, tb, tc) = (times[s - 1], times[s], times[s + 1]);
        let (fa, fb, fc) = (values[s - 1], values[s], values[s + 1]);
        let x = times[i];
        let da = fa * (2.0 * x - tb - tc) / ((ta - tb) * (ta - tc));
        let db = fb * (2.0 * x - ta - tc) / ((tb - ta) * (tb - tc));
        let dc = fc * (2.0 * x - ta - tb) / ((tc - ta) * (tc - tb));
        out.push(da + db + dc);
    }
    out
}

/// Cubic Hermite interpolant of one scalar series.
#[derive(Clone, Debug)]
pub(crate) struct CubicSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CubicSeries {
    pub fn new(times: &[f64], values: &[f64]) -> Self {
        let slopes = three_point_derivative(times, values);
        Self {
            times: times.to_vec(),
            values: values.to_vec(),
            slopes,
        }
    }

    fn segment(&self, t: f64) -> usize {
        // index i with times[i] <= t < times[i+1], clamped to valid segments
        let n = self.times.len();
        self.times.partition_point(|&x| x <= t).clamp(1, n - 1) - 1
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.times[i + 1] - self.times[i];
        let s = ((t - self.times[i]) / h).clamp(0.0, 1.0);
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.times[i + 1] - self.times[i];
        let s = ((t - self.times[i]) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (6.0 * s - 6.0 * s2) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        d00 * self.values[i]
            + d10 * self.slopes[i]
            + d01 * self.values[i + 1]
            + d11 * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn derivative_exact_for_quadratic() {
        let t: Vec<f64> = vec![0.0, 0.3, 0.7, 1.0, 1.6];
        let f: Vec<f64> = t.iter().map(|&x| 2.0 * x * x - x + 0.5).collect();
        let d = three_point_derivative(&t, &f);
        for (x, dx) in t.iter().zip(&d) {
            assert_abs_diff_eq!(*dx, 4.0 * x - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolates_smooth_function() {
        let n = 1000;
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.01).collect();
        let f: Vec<f64> = t.iter().map(|&x| (1.3 * x).sin()).collect();
        let c = CubicSeries::new(&t, &f);
        for k in 0..400 {
            let x = 0.012 + k as f64 * 0.024;
            assert_abs_diff_eq!(c.value(x), (1.3 * x).sin(), epsilon = 1e-6);
            assert_abs_diff_eq!(c.derivative(x), 1.3 * (1.3 * x).cos(), epsilon = 1e-4);
        }
    }

    #[test]
    fn nodes_reproduced_exactly() {
        let t = vec![0.0, 1.0, 2.5, 3.0];
        let f = vec![1.0, -2.0, 0.5, 4.0];
        let c = CubicSeries::new(&t, &f);
        for (x, y) in t.iter().zip(&f) {
            assert_abs_diff_eq!(c.value(*x), *y, epsilon = 1e-14);
        }
    }
}
