use crate::error::{invalid, Result};
use crate::numerics::QuadratureGrid;
use crate::potentials::RadialPotential;

/// Gauss order on every momentum panel.
pub const MOMENTUM_PANEL_ORDER: usize = 16;

/// Layout of the momentum grid on [0, P_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGridOptions {
    /// P_max ≥ cutoff_factor / support_radius.
    pub cutoff_factor: f64,
    /// Ratio between consecutive panel ends beyond the Fermi region.
    pub growth: f64,
    /// Sub-panels per panel (grid refinement studies).
    pub refinement: usize,
}

impl Default for MomentumGridOptions {
    fn default() -> Self {
        Self {
            cutoff_factor: 20.0,
            growth: 1.35,
            refinement: 1,
        }
    }
}

/// P_max = max(cutoff_factor/R, 10√(|μ|+1)).
pub fn momentum_cutoff(v: &RadialPotential, mu: f64, cutoff_factor: f64) -> f64 {
    (cutoff_factor / v.support_radius()).max(10.0 * (mu.abs() + 1.0).sqrt())
}

/// Gauss panels clustered at the Fermi momentum √μ (or at the origin when
/// μ ≤ 0), growing geometrically out to the cutoff.
pub fn momentum_grid(v: &RadialPotential, mu: f64, options: MomentumGridOptions) -> Result<QuadratureGrid> {
    if !(options.cutoff_factor > 0.0) || !(options.growth > 1.0) || options.refinement == 0 {
        return Err(invalid(
            "momentum grid needs cutoff_factor > 0, growth > 1, refinement >= 1",
        ));
    }
    let p_max = momentum_cutoff(v, mu, options.cutoff_factor);
    let mut bounds = vec![0.0];
    let start = if mu > 0.0 {
        let s = mu.sqrt();
        for c in [-0.5, -0.25, -0.1, -0.04, -0.01, 0.0, 0.01, 0.04, 0.1, 0.25, 0.5] {
            bounds.push(s * (1.0 + c));
        }
        1.5 * s
    } else {
        let s = (mu.abs() + 1.0).sqrt();
        for c in [0.05, 0.15, 0.3, 0.5, 1.0] {
            bounds.push(s * c);
        }
        s
    };
    let mut x = start;
    while x < p_max {
        x = (x * options.growth).min(p_max);
        if p_max - x < 0.05 * (p_max - start) {
            x = p_max;
        }
        bounds.push(x);
    }
    bounds.retain(|b| *b <= p_max);
    if *bounds.last().unwrap() < p_max {
        bounds.push(p_max);
    }
    let grid = QuadratureGrid::gauss_panels(&bounds, MOMENTUM_PANEL_ORDER)?;
    if options.refinement > 1 {
        grid.refined(options.refinement, MOMENTUM_PANEL_ORDER)
    } else {
        Ok(grid)
    }
}
