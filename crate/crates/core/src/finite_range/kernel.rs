use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, integrate, sinc, QuadratureGrid};
use crate::potentials::{fourier_radial, RadialPotential};

/// Relative agreement required between the two kernel representations.
pub const KERNEL_MATCH_TOL: f64 = 1e-6;
const KERNEL_REL_TOL: f64 = 1e-11;
/// Gauss order of the radial panels used to assemble kernel matrices.
const RADIAL_ORDER: usize = 16;

/// W(p,q) = (2/π)∫₀^∞ V(r) j₀(pr) j₀(qr) r² dr.
pub fn kernel_position_form(v: &RadialPotential, p: f64, q: f64) -> Result<f64> {
    let integral = v.integrate_radial(|r| v.eval(r) * sinc(p * r) * sinc(q * r) * r * r, KERNEL_REL_TOL)?;
    Ok(2.0 / PI * integral)
}

/// W(p,q) = (2π)^(−1/2)(pq)^(−1)∫_{|p−q|}^{p+q} V̂(k) k dk, with the
/// limit 2(2π)^(−1/2)V̂(p+q) when p or q vanishes.
pub fn kernel_momentum_form(v: &RadialPotential, p: f64, q: f64) -> Result<f64> {
    let c = (2.0 * PI).powf(-0.5);
    if p == 0.0 || q == 0.0 {
        return Ok(2.0 * c * fourier_radial(v, p + q)?);
    }
    let (lo, hi) = ((p - q).abs(), p + q);
    // The integrand inherits quadrature errors from V̂, so errors are
    // collected rather than unwrapped.
    let failure = std::cell::Cell::new(None);
    let integral = integrate(
        |k| match fourier_radial(v, k) {
            Ok(f) => f * k,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        lo,
        hi,
        KERNEL_REL_TOL * 10.0,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(c * integral / (p * q))
}

/// Radial kernel of the convolution (2π)^(−3/2)∫V̂(p−q)f(q)d³q acting on
/// radial f, so that the convolution equals ∫₀^∞ W(p,q) f(q) q² dq.
///
/// Both representations are evaluated; disagreement beyond
/// [`KERNEL_MATCH_TOL`] relative to the kernel scale is an error.
pub fn angular_kernel(v: &RadialPotential, p: f64, q: f64) -> Result<f64> {
    let position = kernel_position_form(v, p, q)?;
    let momentum = kernel_momentum_form(v, p, q)?;
    // Scale for points where W itself passes through zero.
    let scale = 2.0 / PI * v.integrate_radial(|r| v.eval(r).abs() * r * r, KERNEL_REL_TOL)?;
    let tol = KERNEL_MATCH_TOL * position.abs().max(momentum.abs()).max(1e-3 * scale);
    if (position - momentum).abs() > tol {
        return Err(Error::KernelMismatch {
            p,
            q,
            momentum_form: momentum,
            position_form: position,
        });
    }
    Ok(position)
}

/// Position-space quadrature resolving j₀(pr) up to p = p_max on the
/// support of V: nodes, and weights V(r)·r²·w.
fn radial_rule(v: &RadialPotential, p_max: f64) -> (Vec<f64>, Vec<f64>) {
    let max_width = 3.0 / p_max;
    let (x, w) = gauss_legendre(RADIAL_ORDER);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in v.radial_breaks().windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let pieces = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for k in 0..pieces {
            let mid = a + h * (k as f64 + 0.5);
            for (xi, wi) in x.iter().zip(&w) {
                let r = mid + 0.5 * h * xi;
                nodes.push(r);
                weights.push(v.eval(r) * r * r * 0.5 * h * wi);
            }
        }
    }
    (nodes, weights)
}

/// The kernel W(p_i, p_j) on a momentum grid, assembled from the position
/// form as (2/π)·J·diag(V r² w)·Jᵀ with J_ik = j₀(p_i r_k).
#[derive(Debug, Clone)]
pub struct GapKernel {
    grid: QuadratureGrid,
    matrix: DMatrix<f64>,
    r_nodes: Vec<f64>,
    r_weights: Vec<f64>,
}

impl GapKernel {
    pub fn new(v: &RadialPotential, grid: &QuadratureGrid) -> Result<Self> {
        let (r_nodes, r_weights) = radial_rule(v, grid.hi().max(1e-12));
        let p = grid.nodes();
        let j = DMatrix::from_fn(p.len(), r_nodes.len(), |i, k| sinc(p[i] * r_nodes[k]));
        let jw = DMatrix::from_fn(p.len(), r_nodes.len(), |i, k| j[(i, k)] * r_weights[k] * 2.0 / PI);
        let mut matrix = &jw * j.transpose();
        // Exact symmetry.
        matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self {
            grid: grid.clone(),
            matrix,
            r_nodes,
            r_weights,
        })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|x| *x == 0.0)
    }

    /// W(p, p_j) for every grid node p_j.
    pub fn row(&self, p: f64) -> Vec<f64> {
        let q = self.grid.nodes();
        q.iter()
            .map(|&qj| {
                2.0 / PI
                    * self
                        .r_nodes
                        .iter()
                        .zip(&self.r_weights)
                        .map(|(r, w)| sinc(p * r) * sinc(qj * r) * w)
                        .sum::<f64>()
            })
            .collect()
    }

    /// ∫W(p_i,q) f(q) q² dq on the grid.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let weighted: Vec<f64> = self
            .grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(f)
            .map(|((q, w), f)| f * q * q * w)
            .collect();
        (&self.matrix * DVector::from_vec(weighted)).iter().copied().collect()
    }

    /// ∫W(p,q) f(q) q² dq at an arbitrary p (Nyström interpolation).
    pub fn apply_at(&self, p: f64, f: &[f64]) -> f64 {
        self.row(p)
            .iter()
            .zip(self.grid.nodes())
            .zip(self.grid.weights())
            .zip(f)
            .map(|(((w_pq, q), w), f)| w_pq * f * q * q * w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_value() {
        let v = RadialPotential::square_well(2.0, 1.0).unwrap();
        let w = angular_kernel(&v, 0.0, 0.0).unwrap();
        assert!((w - 2.0 / PI * (-2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn forms_agree_on_square_well() {
        let v = RadialPotential::square_well(1.0, 1.0).unwrap();
        for (p, q) in [(0.5, 1.0), (1.0, 3.0), (2.0, 2.0)] {
            let a = kernel_position_form(&v, p, q).unwrap();
            let b = kernel_momentum_form(&v, p, q).unwrap();
            assert!((a - b).abs() <= 1e-8 * a.abs(), "{p} {q}: {a} {b}");
            let c = kernel_position_form(&v, q, p).unwrap();
            assert_eq!(a, c);
        }
    }

    #[test]
    fn matrix_matches_pointwise_kernel() {
        let v = RadialPotential::gaussian(3.0, 0.5).unwrap();
        let grid = QuadratureGrid::gauss_panels(&[0.0, 2.0, 20.0], 8).unwrap();
        let k = GapKernel::new(&v, &grid).unwrap();
        let p = grid.nodes();
        for (i, j) in [(0, 0), (3, 11), (15, 7)] {
            let exact = kernel_position_form(&v, p[i], p[j]).unwrap();
            assert!((k.matrix()[(i, j)] - exact).abs() < 1e-10, "{i} {j}");
        }
        let row = k.row(p[5]);
        assert!((row[9] - k.matrix()[(5, 9)]).abs() < 1e-13);
    }
}
