//! Full BCS gap equation for a finite-range radial potential:
//! Δ(p) = −∫₀^∞ W(p,q) Δ(q)/K(q) q² dq, the BCS state it determines, the
//! free energy relative to the normal state and the linear superfluidity
//! criterion.

mod grid;
mod kernel;
mod state;

use nalgebra::DMatrix;

use crate::contact_gap::{k_from_energy, ThermodynamicPoint};
use crate::error::{invalid, Error, Result};
use crate::numerics::{bisect_bracket, lowest_eigenpair, DenseSymmetricMatrix, MonotoneCubic, QuadratureGrid};
use crate::potentials::RadialPotential;

pub use grid::{momentum_cutoff, momentum_grid, MomentumGridOptions, MOMENTUM_PANEL_ORDER};
pub use kernel::{angular_kernel, kernel_momentum_form, kernel_position_form, GapKernel, KERNEL_MATCH_TOL};
pub use state::{
    build_state, free_energy_difference, free_energy_difference_with, normal_occupation, pair_potential, BcsState,
    CONSTRAINT_TOL,
};

/// Damped fixed-point iteration Δ ← (1−θ)Δ + θG(Δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSolverOptions {
    pub theta: f64,
    /// Stop when max|Δₙ₊₁ − Δₙ| ≤ tolerance·max|Δₙ₊₁|.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Iterates below collapse·seed are taken as the normal phase.
    pub collapse: f64,
}

impl Default for GapSolverOptions {
    fn default() -> Self {
        Self {
            theta: 0.5,
            tolerance: 1e-6,
            max_iterations: 10_000,
            collapse: 1e-10,
        }
    }
}

/// Consecutive iterations with a relative change ≥ 1 that count as a
/// sign-flipping oscillation.
const OSCILLATION_WINDOW: usize = 50;

/// Radial order parameter Δ(p) on a momentum grid.
#[derive(Debug, Clone)]
pub struct GapFunction {
    pub grid: QuadratureGrid,
    pub values: Vec<f64>,
    pub point: ThermodynamicPoint,
    /// Δ(0), from the gap equation itself (Nyström interpolation).
    pub at_zero: f64,
    pub iterations: usize,
}

impl GapFunction {
    pub fn zero(grid: &QuadratureGrid, point: ThermodynamicPoint) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
            point,
            at_zero: 0.0,
            iterations: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.at_zero == 0.0 && self.values.iter().all(|v| *v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Monotone cubic interpolation through (0, Δ(0)) and the nodes.
    pub fn eval(&self, p: f64) -> Result<f64> {
        let mut xs = vec![0.0];
        let mut ys = vec![self.at_zero];
        xs.extend_from_slice(self.grid.nodes());
        ys.extend_from_slice(&self.values);
        MonotoneCubic::new(xs, ys)?.eval(p)
    }
}

/// Δ/K on the grid.
fn delta_over_k(values: &[f64], grid: &QuadratureGrid, point: ThermodynamicPoint) -> Result<Vec<f64>> {
    values
        .iter()
        .zip(grid.nodes())
        .map(|(d, p)| {
            if *d == 0.0 && !(point.temperature == 0.0 && p * p == point.mu) {
                return Ok(0.0);
            }
            let e = (p * p - point.mu).hypot(*d);
            Ok(d / k_from_energy(e, point.temperature, *p)?)
        })
        .collect()
}

/// G(Δ)(p_i) = −∫W(p_i,q)Δ(q)/K(q)q²dq.
fn gap_map(kernel: &GapKernel, values: &[f64], point: ThermodynamicPoint) -> Result<Vec<f64>> {
    let f = delta_over_k(values, kernel.grid(), point)?;
    Ok(kernel.apply(&f).into_iter().map(|x| -x).collect())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

pub fn solve_gap_equation(
    v: &RadialPotential,
    point: ThermodynamicPoint,
    grid: &QuadratureGrid,
    seed: f64,
) -> Result<GapFunction> {
    let kernel = GapKernel::new(v, grid)?;
    solve_gap_with_kernel(&kernel, point, seed, GapSolverOptions::default())
}

pub fn solve_gap_with_kernel(
    kernel: &GapKernel,
    point: ThermodynamicPoint,
    seed: f64,
    options: GapSolverOptions,
) -> Result<GapFunction> {
    if !(seed > 0.0) || !seed.is_finite() {
        return Err(invalid(format!("seed must be positive, got {seed}")));
    }
    if !(options.theta > 0.0 && options.theta <= 1.0) {
        return Err(invalid("mixing parameter must lie in (0, 1]"));
    }
    let grid = kernel.grid();
    if kernel.is_zero() {
        return Ok(GapFunction::zero(grid, point));
    }
    let theta = options.theta;
    let mut delta = vec![seed; grid.len()];
    let mut change = f64::INFINITY;
    let mut wild = 0;
    for iteration in 1..=options.max_iterations {
        let g = gap_map(kernel, &delta, point)?;
        let next: Vec<f64> = delta
            .iter()
            .zip(&g)
            .map(|(d, g)| (1.0 - theta) * d + theta * g)
            .collect();
        let size = sup(&next);
        if !size.is_finite() {
            return Err(Error::GapNonConvergence {
                iterations: iteration,
                residual: change,
            });
        }
        if size < options.collapse * seed {
            let mut zero = GapFunction::zero(grid, point);
            zero.iterations = iteration;
            return Ok(zero);
        }
        let diff = next.iter().zip(&delta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        change = diff / size;
        delta = next;
        wild = if change >= 1.0 { wild + 1 } else { 0 };
        if wild >= OSCILLATION_WINDOW {
            return Err(Error::GapOscillation { residual: change });
        }
        if change <= options.tolerance {
            return Ok(finish(kernel, delta, point, iteration));
        }
    }
    Err(Error::GapNonConvergence {
        iterations: options.max_iterations,
        residual: change,
    })
}

/// Fixes the phase so that Δ(0) ≥ 0 and evaluates Δ(0).
fn finish(kernel: &GapKernel, mut values: Vec<f64>, point: ThermodynamicPoint, iterations: usize) -> GapFunction {
    let f = delta_over_k(&values, kernel.grid(), point).unwrap_or_else(|_| vec![0.0; values.len()]);
    let mut at_zero = -kernel.apply_at(0.0, &f);
    if at_zero < 0.0 {
        at_zero = -at_zero;
        values.iter_mut().for_each(|v| *v = -*v);
    }
    GapFunction {
        grid: kernel.grid().clone(),
        values,
        point,
        at_zero,
        iterations,
    }
}

/// Δ(p) = −∫W(p,q)Δ(q)/K(q)q²dq at an arbitrary p.
pub fn evaluate_gap(kernel: &GapKernel, delta: &GapFunction, p: f64) -> Result<f64> {
    let f = delta_over_k(&delta.values, &delta.grid, delta.point)?;
    Ok(-kernel.apply_at(p, &f))
}

/// sup over nodes of |Δ(p) + ∫W(p,q)Δ(q)/K(q)q²dq|.
pub fn gap_residual(v: &RadialPotential, delta: &GapFunction) -> Result<f64> {
    gap_residual_with(&GapKernel::new(v, &delta.grid)?, delta)
}

pub fn gap_residual_with(kernel: &GapKernel, delta: &GapFunction) -> Result<f64> {
    if delta.is_zero() {
        return Ok(0.0);
    }
    let g = gap_map(kernel, &delta.values, delta.point)?;
    Ok(delta
        .values
        .iter()
        .zip(&g)
        .map(|(d, g)| (d - g).abs())
        .fold(0.0, f64::max))
}

/// K with Δ = 0: |p² − μ| at T = 0, (p²−μ)/tanh((p²−μ)/2T) otherwise.
fn normal_k(p: f64, point: ThermodynamicPoint) -> Result<f64> {
    let xi = (p * p - point.mu).abs();
    if point.temperature == 0.0 {
        return Ok(xi);
    }
    k_from_energy(xi, point.temperature, p)
}

/// Lowest eigenvalue of K⁰ + V in the s-wave sector, discretized as
/// diag(K⁰(p_i)) + S W S with S = diag(p_i√w_i).
pub fn linear_criterion(v: &RadialPotential, point: ThermodynamicPoint, grid: &QuadratureGrid) -> Result<f64> {
    linear_criterion_with(&GapKernel::new(v, grid)?, point)
}

pub fn linear_criterion_with(kernel: &GapKernel, point: ThermodynamicPoint) -> Result<f64> {
    let grid = kernel.grid();
    let s: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .map(|(p, w)| p * w.sqrt())
        .collect();
    let n = grid.len();
    let w = kernel.matrix();
    let mut m = DMatrix::from_fn(n, n, |i, j| s[i] * w[(i, j)] * s[j]);
    for (i, p) in grid.nodes().iter().enumerate() {
        m[(i, i)] += normal_k(*p, point)?;
    }
    Ok(lowest_eigenpair(&DenseSymmetricMatrix::new(m)?)?.value)
}

/// Temperature at which the linear criterion changes sign, for a kernel
/// that is superfluid at T = 0.
pub fn finite_range_critical_temperature(kernel: &GapKernel, mu: f64) -> Result<f64> {
    let criterion = |t: f64| -> Result<f64> { linear_criterion_with(kernel, ThermodynamicPoint::new(t, mu)?) };
    if criterion(0.0)? >= 0.0 {
        return Err(invalid("the potential is not superfluid at T = 0"));
    }
    let mut hi = mu.abs().max(1.0);
    let mut steps = 0;
    while criterion(hi)? <= 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::BracketFailure("no temperature with a positive criterion".into()));
        }
    }
    let bracket = bisect_bracket(criterion, 0.0, hi, 1e-9)?;
    Ok(bracket.midpoint())
}
