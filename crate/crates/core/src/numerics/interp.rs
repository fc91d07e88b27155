//! Monotone piecewise-cubic Hermite interpolation.
//!
//! Node slopes come from five-point Lagrange stencils (fourth order) and are
//! then limited so the interpolant is monotone wherever the data are.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(invalid("interpolation needs at least two (x, y) pairs"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(invalid("interpolation samples must be finite"));
        }
        if !xs.windows(2).all(|p| p[0] < p[1]) {
            return Err(invalid("interpolation abscissae must be strictly increasing"));
        }
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes: Vec<f64> = (0..n).map(|i| stencil_slope(&xs, &ys, i)).collect();
        // Hyman filter: zero slope at data extrema, otherwise keep the sign
        // of the neighbouring secants and cap the magnitude at three times
        // the smaller one.
        for (i, d) in slopes.iter_mut().enumerate() {
            let left = if i > 0 { secants[i - 1] } else { secants[0] };
            let right = if i < n - 1 { secants[i] } else { secants[n - 2] };
            if left * right <= 0.0 {
                *d = 0.0;
            } else {
                let bound = 3.0 * left.abs().min(right.abs());
                *d = left.signum() * (left.signum() * *d).clamp(0.0, bound);
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        let i = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            k => (k - 1).min(self.xs.len() - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1])
    }
}

/// Derivative at `xs[i]` of the interpolating polynomial through up to five
/// neighbouring samples.
fn stencil_slope(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    let n = xs.len();
    let width = n.min(5);
    let start = i.saturating_sub(width / 2).min(n - width);
    let idx = start..start + width;
    let xi = xs[i];
    let mut d = 0.0;
    for j in idx.clone() {
        let weight = if j == i {
            idx.clone().filter(|&k| k != i).map(|k| 1.0 / (xi - xs[k])).sum::<f64>()
        } else {
            let mut w = 1.0 / (xs[j] - xi);
            for k in idx.clone().filter(|&k| k != i && k != j) {
                w *= (xi - xs[k]) / (xs[j] - xs[k]);
            }
            w
        };
        d += weight * ys[j];
    }
    d
}

/// One-shot monotone cubic interpolation.
pub fn interp_eval(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    MonotoneCubic::new(xs.to_vec(), ys.to_vec())?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_and_constant_data() {
        let xs = [0.0, 0.3, 1.0, 2.0];
        let lin: Vec<f64> = xs.to_vec();
        assert!((interp_eval(&xs, &lin, 0.5).unwrap() - 0.5).abs() < 1e-15);
        let c = [3.0; 4];
        for x in [0.0, 0.1, 0.77, 2.0] {
            assert_eq!(interp_eval(&xs, &c, x).unwrap(), 3.0);
        }
    }

    #[test]
    fn sine_on_fifty_nodes() {
        let xs: Vec<f64> = (0..50).map(|i| PI * i as f64 / 49.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let v = interp_eval(&xs, &ys, PI / 4.0).unwrap();
        assert!((v - (PI / 4.0).sin()).abs() < 1e-6, "{}", v - (PI / 4.0).sin());
    }

    #[test]
    fn exact_at_nodes_and_no_extrapolation() {
        let xs = [1.0, 2.0, 4.0];
        let ys = [5.0, -1.0, 7.0];
        let f = MonotoneCubic::new(xs.to_vec(), ys.to_vec()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(f.eval(*x).unwrap(), *y);
        }
        assert!(matches!(f.eval(0.5), Err(Error::OutOfRange { .. })));
        assert!(f.eval(4.5).is_err());
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let xs = [0.0, 1.0, 1.1, 5.0];
        let ys = [0.0, 0.0, 10.0, 10.5];
        let f = MonotoneCubic::new(xs.to_vec(), ys.to_vec()).unwrap();
        let mut prev = f.eval(0.0).unwrap();
        for k in 1..=500 {
            let v = f.eval(5.0 * k as f64 / 500.0).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }
}
