//! Numerical kernel shared by every solver: quadrature, root finding,
//! symmetric eigenproblems, linear solves and interpolation.

pub mod eigen;
pub mod interp;
pub mod linear;
pub mod quadrature;
pub mod roots;

pub use eigen::{lowest_eigenpair, symmetric_spectrum, DenseSymmetricMatrix, EigenPair, Spectrum};
pub use interp::{interp_eval, MonotoneCubic};
pub use linear::{solve_linear, solve_linear_with_condition, LinearSolution};
pub use quadrature::{
    gauss_legendre, integrate, integrate_semi_infinite, integrate_with_breaks, QuadratureGrid, DEFAULT_REL_TOL,
};
pub use roots::{bisect_bracket, find_root_bisect, Bracket};

/// Spherical Bessel function j0(x) = sin(x)/x.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::sinc;

    #[test]
    fn sinc_is_continuous_at_the_switch() {
        for x in [0.0f64, 1e-6, 9.99e-5, 1.001e-4, 0.5, 3.0] {
            let series = 1.0 - x * x / 6.0 + x.powi(4) / 120.0;
            let direct = if x == 0.0 { 1.0 } else { f64::sin(x) / x };
            assert!((sinc(x) - direct).abs() < 1e-15 || (sinc(x) - series).abs() < 1e-15);
        }
    }
}
