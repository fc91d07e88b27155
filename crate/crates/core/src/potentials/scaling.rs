use crate::error::{invalid, Result};
use crate::numerics::QuadratureGrid;

use super::{scale_potential, RadialPotential};

/// The family V_ℓ(x) = λ(ℓ)·ℓ^(−2)·V(x/ℓ) built on a resonant base
/// potential, with the linear schedule λ(ℓ) = 1 − κℓ.
#[derive(Debug, Clone)]
pub struct ScalingFamily {
    base: RadialPotential,
    kappa: f64,
    grid: QuadratureGrid,
    phi: Vec<f64>,
}

impl ScalingFamily {
    /// `phi` is the zero-energy resonance function of `base` sampled on
    /// `grid`, normalized in L²(4πr²dr).
    pub fn new(base: RadialPotential, kappa: f64, grid: QuadratureGrid, phi: Vec<f64>) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(invalid(format!("kappa must be nonnegative, got {kappa}")));
        }
        if phi.len() != grid.len() {
            return Err(invalid("resonance function and grid differ in length"));
        }
        Ok(Self { base, kappa, grid, phi })
    }

    pub fn base(&self) -> &RadialPotential {
        &self.base
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn resonance_grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn resonance_eigenfunction(&self) -> &[f64] {
        &self.phi
    }

    pub fn lambda(&self, ell: f64) -> f64 {
        1.0 - self.kappa * ell
    }

    /// λ'(0).
    pub fn lambda_slope(&self) -> f64 {
        -self.kappa
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.base.clone(), kappa, self.grid.clone(), self.phi.clone())
    }

    /// V_ℓ. Requires λ(ℓ) > 0.
    pub fn member(&self, ell: f64) -> Result<RadialPotential> {
        let lambda = self.lambda(ell);
        if !(lambda > 0.0) {
            return Err(invalid(format!(
                "lambda({ell}) = {lambda} is not positive; reduce kappa or ell"
            )));
        }
        scale_potential(&self.base, ell, lambda)
    }
}
