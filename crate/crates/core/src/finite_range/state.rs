use std::f64::consts::PI;

use crate::contact_gap::{k_from_energy, ThermodynamicPoint};
use crate::error::{Error, Result};
use crate::numerics::QuadratureGrid;
use crate::potentials::RadialPotential;

use super::{GapFunction, GapKernel};

/// Tolerance on the eigenvalues of Γ(p) leaving [0, 1].
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Radial BCS state (γ̂, α̂) on a momentum grid.
#[derive(Debug, Clone)]
pub struct BcsState {
    pub momentum_grid: QuadratureGrid,
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
    pub point: ThermodynamicPoint,
}

impl BcsState {
    /// max over nodes of (γ̂ − 1/2)² + α̂² − 1/4; nonpositive for admissible
    /// states.
    pub fn constraint_excess(&self) -> f64 {
        self.gamma
            .iter()
            .zip(&self.alpha)
            .map(|(g, a)| (g - 0.5).powi(2) + a * a - 0.25)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// γ̂ = 1/2 − ξ/(2K) and α̂ = −Δ/(2K), without cancellation where γ̂ or
/// 1 − γ̂ is small.
fn occupation(p: f64, delta: f64, point: ThermodynamicPoint) -> Result<(f64, f64)> {
    let xi = p * p - point.mu;
    let e = xi.hypot(delta);
    let k = k_from_energy(e, point.temperature, p)?;
    // t = E/K = tanh(E/2T); 1 − t = 2/(exp(E/T) + 1).
    let (t, one_minus_t) = if point.temperature == 0.0 {
        (1.0, 0.0)
    } else {
        let x = e / point.temperature;
        (e / k, 2.0 / (x.exp() + 1.0))
    };
    // 1 − |ξ|/E = Δ²/(E(E + |ξ|))
    let small = if e > 0.0 {
        0.5 * (one_minus_t + t * delta * delta / (e * (e + xi.abs())))
    } else {
        0.5
    };
    let gamma = if xi > 0.0 { small } else { 1.0 - small };
    Ok((gamma, -delta / (2.0 * k)))
}

/// State from the Euler–Lagrange relations of the BCS functional.
pub fn build_state(delta: &GapFunction) -> Result<BcsState> {
    let point = delta.point;
    let mut gamma = Vec::with_capacity(delta.values.len());
    let mut alpha = Vec::with_capacity(delta.values.len());
    for (p, d) in delta.grid.nodes().iter().zip(&delta.values) {
        let (g, a) = occupation(*p, *d, point)?;
        gamma.push(g);
        alpha.push(a);
    }
    Ok(BcsState {
        momentum_grid: delta.grid.clone(),
        gamma,
        alpha,
        point,
    })
}

/// Normal-state occupation 1/(1 + e^((p²−μ)/T)), or the step at T = 0.
pub fn normal_occupation(p: f64, point: ThermodynamicPoint) -> f64 {
    let xi = p * p - point.mu;
    if point.temperature == 0.0 {
        return if xi < 0.0 {
            1.0
        } else if xi > 0.0 {
            0.0
        } else {
            0.5
        };
    }
    // Same arithmetic as the Δ = 0 case of the Euler–Lagrange occupation.
    let small = 0.5 * (2.0 / ((xi.abs() / point.temperature).exp() + 1.0));
    if xi > 0.0 {
        small
    } else {
        1.0 - small
    }
}

/// −Σ e ln e over the eigenvalues e± = 1/2 ± √((γ−1/2)² + α²) of Γ.
fn entropy_density(gamma: f64, alpha: f64, p: f64) -> Result<f64> {
    let rho = ((gamma - 0.5).powi(2) + alpha * alpha).sqrt();
    // e₋ = det Γ / e₊ avoids the cancellation in 1/2 − ρ.
    let det = gamma * (1.0 - gamma) - alpha * alpha;
    let e_minus = det / (0.5 + rho);
    let e_plus = 0.5 + rho;
    if e_minus < -CONSTRAINT_TOL || e_plus > 1.0 + CONSTRAINT_TOL {
        let eigenvalue = if e_minus < 0.0 { e_minus } else { e_plus };
        return Err(Error::ConstraintViolation { p, eigenvalue });
    }
    let xlnx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    Ok(-(xlnx(e_minus.clamp(0.0, 1.0)) + xlnx(e_plus.clamp(0.0, 1.0))))
}

/// F(Γ) − F(Γ₀) with the normal state Γ₀ at the same (T, μ):
/// 4π∫[(p²−μ)(γ̂−γ̂₀) − T(s(Γ) − s(Γ₀))]p²dp + ∫|α(x)|²V(x)d³x.
///
/// The interaction term uses α(r) = √(2/π)∫α̂(p)j₀(pr)p²dp on the radial
/// rule of the gap kernel, which makes it 4π·α̂ᵀ(DWD)α̂ with D = diag(p²w).
pub fn free_energy_difference(state: &BcsState, v: &RadialPotential, point: ThermodynamicPoint) -> Result<f64> {
    let kernel = GapKernel::new(v, &state.momentum_grid)?;
    free_energy_difference_with(state, &kernel, point)
}

pub fn free_energy_difference_with(state: &BcsState, kernel: &GapKernel, point: ThermodynamicPoint) -> Result<f64> {
    let grid = &state.momentum_grid;
    let mut local = 0.0;
    for (((p, w), g), a) in grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(&state.gamma)
        .zip(&state.alpha)
    {
        if !(-CONSTRAINT_TOL..=1.0 + CONSTRAINT_TOL).contains(g) {
            return Err(Error::ConstraintViolation { p: *p, eigenvalue: *g });
        }
        let g0 = normal_occupation(*p, point);
        let mut density = (p * p - point.mu) * (g - g0);
        if point.temperature > 0.0 {
            let s = entropy_density(*g, *a, *p)?;
            let s0 = entropy_density(g0, 0.0, *p)?;
            density -= point.temperature * (s - s0);
        } else {
            entropy_density(*g, *a, *p)?;
        }
        local += density * p * p * w;
    }
    let interaction = dot(&state.alpha, &kernel.apply(&state.alpha), grid);
    Ok(4.0 * PI * (local + interaction))
}

/// Σ_i a_i b_i p_i² w_i.
fn dot(a: &[f64], b: &[f64], grid: &QuadratureGrid) -> f64 {
    a.iter()
        .zip(b)
        .zip(grid.nodes())
        .zip(grid.weights())
        .map(|(((a, b), p), w)| a * b * p * p * w)
        .sum()
}

/// Δ = 2(2π)^(−3/2)V̂∗α̂ evaluated on the grid from a state.
pub fn pair_potential(state: &BcsState, kernel: &GapKernel) -> Vec<f64> {
    kernel.apply(&state.alpha).into_iter().map(|x| 2.0 * x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_state_has_fermi_occupation() {
        let point = ThermodynamicPoint::new(0.3, 1.0).unwrap();
        for p in [0.1, 0.9, 1.0, 1.7, 6.0] {
            let (g, a) = occupation(p, 0.0, point).unwrap();
            assert_eq!(a, 0.0);
            assert!((g - normal_occupation(p, point)).abs() < 1e-15);
        }
    }

    #[test]
    fn constraint_from_dispersion() {
        let point = ThermodynamicPoint::new(0.05, 1.0).unwrap();
        for (p, d) in [(0.2, 0.3), (1.0, 0.01), (4.0, 2.0)] {
            let (g, a) = occupation(p, d, point).unwrap();
            let xi: f64 = p * p - 1.0;
            let e = xi.hypot(d);
            let k = k_from_energy(e, 0.05, p).unwrap();
            assert!(((g - 0.5).powi(2) + a * a - e * e / (4.0 * k * k)).abs() < 1e-15);
        }
    }

    #[test]
    fn entropy_limits() {
        assert_eq!(entropy_density(1.0, 0.0, 0.0).unwrap(), 0.0);
        assert!((entropy_density(0.5, 0.0, 0.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(entropy_density(0.5, 0.6, 0.0).is_err());
    }
}
