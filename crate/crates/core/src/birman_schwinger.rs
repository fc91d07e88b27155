//! s-wave Birman–Schwinger operator V^{1/2}(1/p²)|V|^{1/2}, zero-energy
//! resonance tuning and scattering lengths.
//!
//! The kernel is sgn(V)·|V(r)|^{1/2} g₀(r,s) |V(s)|^{1/2} with
//! g₀(r,s) = 1/(4π max(r,s)), acting in L²(4πs²ds). It is discretized by a
//! symmetric Nyström rule on one Gauss–Legendre panel over the support.
//! The kink of g₀ on the diagonal is handled by singularity subtraction:
//! ∫g₀(r_i,s)f(s)ds ≈ Σ_j g₀(r_i,r_j)f_j w_j + f_i·(∫g₀(r_i,s)ds − Σ_j g₀(r_i,r_j)w_j),
//! which raises the convergence of the spectrum from O(n⁻²) to O(n⁻⁴).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::numerics::{solve_linear, symmetric_spectrum, DenseSymmetricMatrix, QuadratureGrid, Spectrum};
use crate::potentials::{PotentialSign, RadialPotential, ScalingFamily};

pub const DEFAULT_NODES: usize = 400;
pub const MIN_NODES: usize = 16;
/// Required gap between the two lowest eigenvalues at resonance.
pub const SIMPLICITY_GAP: f64 = 1e-6;
/// Radial steps per support radius in the ODE oracle.
pub const ODE_STEPS: usize = 8000;

#[derive(Debug, Clone)]
pub struct BsOperator {
    radial_grid: QuadratureGrid,
    matrix: DenseSymmetricMatrix,
    potential: RadialPotential,
    /// sgn(V), +1 or −1 (+1 for V = 0).
    sign: f64,
    /// |V(r_i)|^{1/2}·√(4πr_i²w_i)
    weighted_root: Vec<f64>,
}

impl BsOperator {
    pub fn radial_grid(&self) -> &QuadratureGrid {
        &self.radial_grid
    }

    pub fn matrix(&self) -> &DenseSymmetricMatrix {
        &self.matrix
    }

    pub fn potential(&self) -> &RadialPotential {
        &self.potential
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        symmetric_spectrum(&self.matrix)
    }

    pub fn lowest_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectrum()?.values[0])
    }

    /// Converts an eigenvector of the symmetrized matrix into samples of the
    /// eigenfunction, normalized in L²(4πr²dr).
    pub fn eigenfunction(&self, vector: &[f64]) -> Vec<f64> {
        self.radial_grid
            .nodes()
            .iter()
            .zip(self.radial_grid.weights())
            .zip(vector)
            .map(|((r, w), v)| v / (4.0 * PI * r * r * w).sqrt())
            .collect()
    }
}

/// Nyström discretization of the Birman–Schwinger operator of `v` with
/// `n_nodes` Gauss points on [0, support_radius].
pub fn build_bs_operator(v: &RadialPotential, n_nodes: usize) -> Result<BsOperator> {
    if n_nodes < MIN_NODES {
        return Err(invalid(format!("n_nodes must be >= {MIN_NODES}, got {n_nodes}")));
    }
    let sign = match v.sign() {
        PotentialSign::Attractive => -1.0,
        PotentialSign::Repulsive | PotentialSign::Zero => 1.0,
        PotentialSign::Indefinite => {
            return Err(invalid(
                "sign-changing potentials are not supported by the Birman-Schwinger solver",
            ))
        }
    };
    let support = v.support_radius();
    let grid = QuadratureGrid::gauss_panels(&[0.0, support], n_nodes)?;
    let r = grid.nodes();
    let w = grid.weights();
    let abs_v: Vec<f64> = r.iter().map(|&x| v.eval(x).abs()).collect();
    let weighted_root: Vec<f64> = (0..n_nodes)
        .map(|i| abs_v[i].sqrt() * (4.0 * PI * r[i] * r[i] * w[i]).sqrt())
        .collect();
    let g0 = |i: usize, j: usize| 1.0 / (4.0 * PI * r[i].max(r[j]));

    let correction: Vec<f64> = (0..n_nodes)
        .map(|i| {
            let exact = (1.0 + (support / r[i]).ln()) / (4.0 * PI);
            let discrete: f64 = (0..n_nodes).map(|j| g0(i, j) * w[j]).sum();
            abs_v[i] * 4.0 * PI * r[i] * r[i] * (exact - discrete)
        })
        .collect();

    let mut m = DMatrix::zeros(n_nodes, n_nodes);
    for i in 0..n_nodes {
        for j in i..n_nodes {
            let value = sign * weighted_root[i] * g0(i, j) * weighted_root[j];
            m[(i, j)] = value;
            m[(j, i)] = value;
        }
        m[(i, i)] += sign * correction[i];
    }
    Ok(BsOperator {
        radial_grid: grid,
        matrix: DenseSymmetricMatrix::new(m)?,
        potential: v.clone(),
        sign,
        weighted_root,
    })
}

/// A potential scaled so that its Birman–Schwinger operator has −1 as
/// lowest, simple eigenvalue, together with the resonance function φ.
#[derive(Debug, Clone)]
pub struct ResonantPotential {
    pub potential: RadialPotential,
    pub grid: QuadratureGrid,
    /// φ(r_i), unit norm in L²(4πr²dr), with ⟨|V|^{1/2}, φ⟩ ≥ 0.
    pub phi: Vec<f64>,
    /// e_min + 1 recomputed on the tuned potential.
    pub tuning_residual: f64,
    /// g* = −1/e_min of the input shape.
    pub coupling_factor: f64,
}

impl ResonantPotential {
    pub fn into_family(self, kappa: f64) -> Result<ScalingFamily> {
        ScalingFamily::new(self.potential, kappa, self.grid, self.phi)
    }
}

pub fn tune_resonance(shape: &RadialPotential) -> Result<ResonantPotential> {
    tune_resonance_with(shape, DEFAULT_NODES)
}

pub fn tune_resonance_with(shape: &RadialPotential, n_nodes: usize) -> Result<ResonantPotential> {
    if shape.sign() != PotentialSign::Attractive {
        return Err(invalid("resonance tuning needs an attractive potential"));
    }
    let op = build_bs_operator(shape, n_nodes)?;
    let spectrum = op.spectrum()?;
    let e_min = spectrum.values[0];
    if !(e_min < 0.0) {
        return Err(invalid(format!(
            "Birman-Schwinger operator has no negative eigenvalue (e_min = {e_min:e})"
        )));
    }
    let g = -1.0 / e_min;
    let second = spectrum.values.get(1).copied().unwrap_or(0.0);
    if (second - e_min) * g <= SIMPLICITY_GAP {
        return Err(invalid("lowest Birman-Schwinger eigenvalue is not simple"));
    }
    let potential = shape.with_coupling_scaled(g)?;
    let tuned = build_bs_operator(&potential, n_nodes)?;
    let tuning_residual = tuned.lowest_eigenvalue()? + 1.0;

    let mut vector = spectrum.pair(0).vector;
    let overlap: f64 = vector.iter().zip(&op.weighted_root).map(|(v, s)| v * s).sum();
    if overlap < 0.0 {
        vector.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(ResonantPotential {
        phi: op.eigenfunction(&vector),
        grid: op.radial_grid.clone(),
        potential,
        tuning_residual,
        coupling_factor: g,
    })
}

/// e_min(B(V_ℓ)) + λ(ℓ), which vanishes exactly in the continuum.
pub fn bs_eigen_check(family: &ScalingFamily, ell: f64) -> Result<f64> {
    let member = family.member(ell)?;
    let n = family.resonance_grid().len().max(MIN_NODES);
    Ok(build_bs_operator(&member, n)?.lowest_eigenvalue()? + family.lambda(ell))
}

/// a(V) = (1/4π)⟨|V|^{1/2}, (1 + B)^(−1) V^{1/2}⟩.
pub fn scattering_length_bs(v: &RadialPotential) -> Result<f64> {
    scattering_length_bs_with(v, DEFAULT_NODES)
}

pub fn scattering_length_bs_with(v: &RadialPotential, n_nodes: usize) -> Result<f64> {
    if v.sign() == PotentialSign::Zero {
        return Ok(0.0);
    }
    let op = build_bs_operator(v, n_nodes)?;
    let e_min = op.lowest_eigenvalue()?;
    if e_min <= -1.0 {
        return Err(Error::ScatteringLengthUndefined(format!(
            "lowest Birman-Schwinger eigenvalue {e_min} is at or below -1"
        )));
    }
    let n = n_nodes;
    let mut a = op.matrix.as_matrix().clone();
    for i in 0..n {
        a[(i, i)] += 1.0;
    }
    let rhs: Vec<f64> = op.weighted_root.iter().map(|s| op.sign * s).collect();
    let x = solve_linear(&a, &rhs).map_err(|e| match e {
        Error::Singular { .. } => Error::ScatteringLengthUndefined("1 + B is singular".into()),
        other => other,
    })?;
    Ok(op.weighted_root.iter().zip(&x).map(|(s, x)| s * x).sum::<f64>() / (4.0 * PI))
}

/// Scattering length from u'' = V u, u(0) = 0, u'(0) = 1 integrated by
/// fixed-step RK4 to the support radius R: a = R − u(R)/u'(R).
pub fn scattering_length_ode(v: &RadialPotential) -> Result<f64> {
    let big_r = v.support_radius();
    let h = big_r / ODE_STEPS as f64;
    let (mut u, mut du) = (0.0f64, 1.0f64);
    for k in 0..ODE_STEPS {
        let r0 = k as f64 * h;
        let v0 = v.eval(r0);
        let vm = v.eval(r0 + 0.5 * h);
        let v1 = v.eval(if k + 1 == ODE_STEPS { big_r } else { r0 + h });
        let (k1u, k1d) = (du, v0 * u);
        let (k2u, k2d) = (du + 0.5 * h * k1d, vm * (u + 0.5 * h * k1u));
        let (k3u, k3d) = (du + 0.5 * h * k2d, vm * (u + 0.5 * h * k2u));
        let (k4u, k4d) = (du + h * k3d, v1 * (u + h * k3u));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    if !u.is_finite() || !du.is_finite() || du.abs() <= 1e-12 * (u.abs() / big_r) {
        return Err(Error::ScatteringLengthUndefined(format!(
            "u'(R) = {du:e} vanishes at the support radius (zero-energy resonance)"
        )));
    }
    Ok(big_r - u / du)
}

/// lim_{ℓ→0} a(V_ℓ) = (1/4π)·(−1/λ'(0))·⟨|V|^{1/2}, φ⟩² / ⟨sgn(V)φ, φ⟩.
pub fn limit_scattering_length(family: &ScalingFamily) -> Result<f64> {
    let slope = family.lambda_slope();
    if slope == 0.0 {
        return Err(Error::ScatteringLengthUndefined(
            "kappa = 0 keeps the family at resonance".into(),
        ));
    }
    let grid = family.resonance_grid();
    let phi = family.resonance_eigenfunction();
    let base = family.base();
    let (mut overlap, mut signed_norm) = (0.0, 0.0);
    for ((r, w), f) in grid.nodes().iter().zip(grid.weights()).zip(phi) {
        let v = base.eval(*r);
        let measure = 4.0 * PI * r * r * w;
        overlap += v.abs().sqrt() * f * measure;
        signed_norm += v.signum() * f * f * measure;
    }
    if signed_norm.abs() <= 1e-14 {
        return Err(Error::ScatteringLengthUndefined("<sgn(V) phi, phi> vanishes".into()));
    }
    Ok(-(overlap * overlap) / (slope * signed_norm) / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    const RES: f64 = PI * PI / 4.0;

    #[test]
    fn zero_potential_gives_zero_matrix_and_length() {
        let v = RadialPotential::square_well(1.0, 1.0).unwrap().zero_like().unwrap();
        let op = build_bs_operator(&v, 32).unwrap();
        assert!(op.matrix().as_matrix().iter().all(|x| *x == 0.0));
        assert_eq!(scattering_length_bs(&v).unwrap(), 0.0);
        assert!(scattering_length_ode(&v).unwrap().abs() < 1e-12);
    }

    #[test]
    fn square_well_resonance() {
        let v = RadialPotential::square_well(RES, 1.0).unwrap();
        let e = build_bs_operator(&v, 400).unwrap().lowest_eigenvalue().unwrap();
        assert!((e + 1.0).abs() < 1e-6, "{e}");
        let e2 = build_bs_operator(&v, 800).unwrap().lowest_eigenvalue().unwrap();
        assert!((e - e2).abs() < 1e-6);
    }

    #[test]
    fn attractive_operator_is_negative_semidefinite() {
        for v in [
            RadialPotential::square_well(2.0, 1.5).unwrap(),
            RadialPotential::gaussian(1.0, 0.7).unwrap(),
        ] {
            let s = build_bs_operator(&v, 120).unwrap().spectrum().unwrap();
            assert!(*s.values.last().unwrap() <= 1e-10);
        }
    }

    #[test]
    fn tuning_square_well() {
        let t = tune_resonance(&RadialPotential::square_well(1.0, 1.0).unwrap()).unwrap();
        assert!((t.coupling_factor - RES).abs() < 1e-4);
        assert!(t.tuning_residual.abs() < 1e-8);
        let again = tune_resonance(&t.potential).unwrap();
        assert!((again.coupling_factor - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sign_indefinite_is_rejected() {
        let v = RadialPotential::tabulated(vec![0.1, 0.5, 1.0], vec![-1.0, 0.5, 0.0]).unwrap();
        assert!(build_bs_operator(&v, 32).is_err());
        assert!(build_bs_operator(&RadialPotential::square_well(1.0, 1.0).unwrap(), 8).is_err());
    }

    #[test]
    fn square_well_scattering_length() {
        let v0 = 0.9 * RES;
        let k = v0.sqrt();
        let exact = 1.0 - k.tan() / k;
        let v = RadialPotential::square_well(v0, 1.0).unwrap();
        assert!((scattering_length_bs(&v).unwrap() - exact).abs() < 1e-6 * exact.abs());
        assert!((scattering_length_ode(&v).unwrap() - exact).abs() < 1e-8 * exact.abs());
        assert!(exact < 0.0);
    }

    #[test]
    fn super_critical_well_has_positive_length() {
        let v0 = 1.3 * RES;
        let v = RadialPotential::square_well(v0, 1.0).unwrap();
        assert!(scattering_length_ode(&v).unwrap() > 0.0);
        assert!(matches!(
            scattering_length_bs(&v),
            Err(Error::ScatteringLengthUndefined(_))
        ));
    }

    #[test]
    fn square_well_limit_formula() {
        // ⟨|V|^{1/2}, φ⟩² = 32/π for the resonant unit well.
        let t = tune_resonance(&RadialPotential::square_well(1.0, 1.0).unwrap()).unwrap();
        let fam = t.into_family(1.0).unwrap();
        let a = limit_scattering_length(&fam).unwrap();
        assert!((a + 8.0 / (PI * PI)).abs() < 1e-6, "{a}");
        let a2 = limit_scattering_length(&fam.with_kappa(2.0).unwrap()).unwrap();
        assert!((a2 - 0.5 * a).abs() < 1e-14);
        assert!(limit_scattering_length(&fam.with_kappa(0.0).unwrap()).is_err());
    }
}
