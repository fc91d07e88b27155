//! Renormalized gap equation for a contact interaction of scattering length
//! a < 0, the critical-temperature equation and the subtracted integral
//! m(Δ; T, μ) = (2π)^(−3)∫(1/K − 1/p²)d³p that both are built on.
//!
//! All ℝ³ integrals are reduced once to (2π²)^(−1)∫₀^∞ (·) p² dp.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{bisect_bracket, integrate_semi_infinite, integrate_with_breaks, DEFAULT_REL_TOL};

/// Relative tolerance of the outer bisections on Δ and T_c.
pub const SOLVER_REL_TOL: f64 = 1e-8;

const BRACKET_STEPS: usize = 200;
/// Above this value of E/2T, tanh(E/2T) equals 1 in double precision.
const TANH_SATURATION: f64 = 19.0;

/// Temperature and chemical potential, in energy units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermodynamicPoint {
    pub temperature: f64,
    pub mu: f64,
}

impl ThermodynamicPoint {
    pub fn new(temperature: f64, mu: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(invalid(format!("temperature must be >= 0, got {temperature}")));
        }
        if !mu.is_finite() {
            return Err(invalid("chemical potential must be finite"));
        }
        Ok(Self { temperature, mu })
    }

    pub fn with_temperature(self, temperature: f64) -> Result<Self> {
        Self::new(temperature, self.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactGapProblem {
    pub scattering_length: f64,
    pub point: ThermodynamicPoint,
}

impl ContactGapProblem {
    pub fn new(scattering_length: f64, point: ThermodynamicPoint) -> Result<Self> {
        check_scattering_length(scattering_length)?;
        Ok(Self {
            scattering_length,
            point,
        })
    }

    /// −1/(4πa), the left-hand side of the gap equation.
    pub fn target(&self) -> f64 {
        -1.0 / (4.0 * PI * self.scattering_length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactGapSolution {
    pub delta: f64,
    pub superfluid: bool,
}

impl ContactGapSolution {
    fn normal() -> Self {
        Self {
            delta: 0.0,
            superfluid: false,
        }
    }
}

/// E = √((p²−μ)² + Δ²) and K = E / tanh(E/2T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub energy: f64,
    pub k: f64,
}

pub fn dispersion(p: f64, delta: f64, point: ThermodynamicPoint) -> Result<Dispersion> {
    let xi = p * p - point.mu;
    let energy = xi.hypot(delta);
    Ok(Dispersion {
        energy,
        k: k_from_energy(energy, point.temperature, p)?,
    })
}

/// K as a function of E at temperature T, with the removable limit
/// K → 2T as E → 0 when T > 0.
pub(crate) fn k_from_energy(energy: f64, temperature: f64, p: f64) -> Result<f64> {
    if temperature == 0.0 {
        if energy == 0.0 {
            return Err(Error::SingularDispersion { p });
        }
        return Ok(energy);
    }
    let x = energy / (2.0 * temperature);
    Ok(if x < 1e-6 {
        2.0 * temperature * (1.0 + x * x / 3.0)
    } else if x > TANH_SATURATION {
        energy
    } else {
        energy / x.tanh()
    })
}

/// (1/K − 1/p²)·p², evaluated as (p² − K)/K so the large-p tail keeps its
/// relative precision.
fn m_integrand(p: f64, delta: f64, point: ThermodynamicPoint) -> Result<f64> {
    let xi = p * p - point.mu;
    let energy = xi.hypot(delta);
    let k = k_from_energy(energy, point.temperature, p)?;
    // p² − E = (2μp² − μ² − Δ²)/(p² + E)
    let p2_minus_e = (2.0 * point.mu * p * p - point.mu * point.mu - delta * delta) / (p * p + energy);
    let e_minus_k = if point.temperature == 0.0 {
        0.0
    } else {
        let x = energy / (2.0 * point.temperature);
        if x > TANH_SATURATION {
            0.0
        } else if x < 1e-6 {
            energy - k
        } else {
            // E − K = −E(coth x − 1) = −2E/expm1(2x)
            -2.0 * energy / (2.0 * x).exp_m1()
        }
    };
    Ok((p2_minus_e + e_minus_k) / k)
}

/// Panel break points clustered on the Fermi surface p = √μ at the scales
/// set by 2Δ and 4T.
fn fermi_breaks(delta: f64, point: ThermodynamicPoint) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let scale_p = point.mu.abs().sqrt().max(1e-300);
    if point.mu > 0.0 {
        let s = point.mu.sqrt();
        for width in [2.0 * delta, 4.0 * point.temperature] {
            if width <= 0.0 {
                continue;
            }
            // ξ ≈ 2s(p − s), so an energy width maps to width/(2s) in p.
            let dp = width / (2.0 * s);
            for c in [0.25, 1.0, 4.0, 16.0] {
                for q in [s - c * dp, s + c * dp] {
                    if q > 0.0 && q < 3.0 * s {
                        breaks.push(q);
                    }
                }
            }
        }
        breaks.push(s);
        breaks.push(2.0 * s);
        breaks.push(3.0 * s);
    } else {
        breaks.push(scale_p.max(delta.sqrt()).max(point.temperature.sqrt()).max(1e-8));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
    breaks
}

/// m(Δ; T, μ) = (2π²)^(−1)∫₀^∞ (1/K(p) − 1/p²) p² dp.
pub fn m_integral(delta: f64, point: ThermodynamicPoint) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be >= 0, got {delta}")));
    }
    if delta == 0.0 && point.temperature == 0.0 && point.mu > 0.0 {
        return Err(Error::SingularDispersion { p: point.mu.sqrt() });
    }
    let breaks = fermi_breaks(delta, point);
    // The integrand is only ever evaluated at interior Gauss nodes, so the
    // excluded point p² = μ at T = Δ = 0 cannot be hit; errors here would be
    // programming errors.
    let f = |p: f64| m_integrand(p, delta, point).unwrap_or(f64::NAN);
    let head = integrate_with_breaks(f, &breaks, DEFAULT_REL_TOL)?;
    let tail = integrate_semi_infinite(f, *breaks.last().unwrap(), DEFAULT_REL_TOL)?;
    let total = (head + tail) / (2.0 * PI * PI);
    if !total.is_finite() {
        return Err(invalid("m integral is not finite for these parameters"));
    }
    Ok(total)
}

fn check_scattering_length(a: f64) -> Result<()> {
    if a < 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("scattering length must be negative, got {a}")))
    }
}

/// Unique T_c with m(0; T_c, μ) = −1/(4πa). Returns the end of the final
/// bisection bracket on the normal side, so that Δ(T_c) = 0 exactly.
pub fn critical_temperature(a: f64, mu: f64) -> Result<f64> {
    check_scattering_length(a)?;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(invalid(format!(
            "critical temperature is only defined for mu > 0, got {mu}"
        )));
    }
    let target = -1.0 / (4.0 * PI * a);
    let excess = |t: f64| -> Result<f64> { Ok(m_integral(0.0, ThermodynamicPoint::new(t, mu)?)? - target) };
    // m(0; T) decreases strictly in T: find T_lo with excess > 0 and T_hi
    // with excess < 0 by halving/doubling from T = μ.
    let (mut lo, mut hi) = (mu, mu);
    let mut f_lo = excess(lo)?;
    let mut f_hi = f_lo;
    let mut steps = 0;
    while f_lo <= 0.0 {
        lo *= 0.5;
        f_lo = excess(lo)?;
        steps += 1;
        if steps > BRACKET_STEPS || lo < f64::MIN_POSITIVE {
            return Err(Error::BracketFailure(format!("no T with m(0;T) above {target:e}")));
        }
    }
    steps = 0;
    while f_hi >= 0.0 {
        hi *= 2.0;
        f_hi = excess(hi)?;
        steps += 1;
        if steps > BRACKET_STEPS || !hi.is_finite() {
            return Err(Error::BracketFailure(format!("no T with m(0;T) below {target:e}")));
        }
    }
    let bracket = bisect_bracket(excess, lo, hi, SOLVER_REL_TOL * 1e-3)?;
    Ok(if bracket.f_hi <= 0.0 { bracket.hi } else { bracket.lo })
}

/// Solves m(Δ; T, μ) = −1/(4πa) for Δ ≥ 0.
///
/// Returns Δ = 0 (normal phase) when no positive solution exists, which
/// for μ > 0 is exactly the case T ≥ T_c and for μ ≤ 0 is always the case.
pub fn solve_contact_gap(problem: &ContactGapProblem) -> Result<ContactGapSolution> {
    check_scattering_length(problem.scattering_length)?;
    let point = problem.point;
    let target = problem.target();
    let excess = |d: f64| -> Result<f64> { Ok(m_integral(d, point)? - target) };

    let zero_allowed = !(point.temperature == 0.0 && point.mu > 0.0);
    let mut lo = 0.0;
    if zero_allowed {
        // m decreases strictly in Δ, so a nontrivial root needs m(0) above
        // the target.
        if excess(0.0)? <= 0.0 {
            return Ok(ContactGapSolution::normal());
        }
    }

    let mut hi = point.mu.abs().max(point.temperature).max(1.0);
    let mut steps = 0;
    while excess(hi)? >= 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > BRACKET_STEPS || !hi.is_finite() {
            return Err(Error::BracketFailure("no upper bracket for delta".into()));
        }
    }
    if !zero_allowed {
        // m(0⁺) = +∞ at T = 0, μ > 0.
        lo = hi;
        steps = 0;
        loop {
            lo *= 0.5;
            if excess(lo)? > 0.0 {
                break;
            }
            steps += 1;
            if steps > BRACKET_STEPS || lo < f64::MIN_POSITIVE {
                return Err(Error::BracketFailure("no lower bracket for delta".into()));
            }
        }
    }
    // Relative width SOLVER_REL_TOL on Δ even when Δ ≪ 1.
    let scale = lo.max(0.5 * hi).min(1.0);
    let bracket = bisect_bracket(excess, lo, hi, SOLVER_REL_TOL * scale * 1e-2)?;
    let delta = bracket.midpoint();
    Ok(ContactGapSolution {
        delta,
        superfluid: delta > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(t: f64, mu: f64) -> ThermodynamicPoint {
        ThermodynamicPoint::new(t, mu).unwrap()
    }

    #[test]
    fn dispersion_limits() {
        let d = dispersion(1.0, 0.0, pt(1.0, 1.0)).unwrap();
        assert!((d.k - 2.0).abs() < 1e-15);
        let d = dispersion(0.7, 0.3, pt(0.0, 1.0)).unwrap();
        assert_eq!(d.k, d.energy);
        let t = 0.8;
        let d = dispersion(2f64.sqrt(), 3.0, pt(t, 2.0)).unwrap();
        assert!((d.energy - 3.0).abs() < 1e-14);
        assert!((d.k - 3.0 / (3.0 / (2.0 * t)).tanh()).abs() < 1e-14);
        assert!(matches!(
            dispersion(1.0, 0.0, pt(0.0, 1.0)),
            Err(Error::SingularDispersion { .. })
        ));
    }

    #[test]
    fn m_closed_form_at_negative_mu() {
        // −(2π²)^(−1)∫₀^∞ dp/(p²+1) = −1/(4π)
        let m = m_integral(0.0, pt(0.0, -1.0)).unwrap();
        assert!((m + 1.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn m_scales_like_sqrt_delta_at_zero_mu() {
        for d in [0.5, 1.0] {
            let ratio = m_integral(4.0 * d, pt(0.0, 0.0)).unwrap() / m_integral(d, pt(0.0, 0.0)).unwrap();
            assert!((ratio - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn m_rejects_singular_combination() {
        assert!(m_integral(0.0, pt(0.0, 1.0)).is_err());
        assert!(m_integral(-1.0, pt(0.1, 1.0)).is_err());
    }

    #[test]
    fn m_decreases_in_delta_and_temperature() {
        let a = m_integral(0.1, pt(0.05, 1.0)).unwrap();
        let b = m_integral(0.2, pt(0.05, 1.0)).unwrap();
        let c = m_integral(0.1, pt(0.10, 1.0)).unwrap();
        assert!(b < a && c < a);
    }

    #[test]
    fn tc_defining_property() {
        let (a, mu) = (-1.0, 1.0);
        let tc = critical_temperature(a, mu).unwrap();
        let target = -1.0 / (4.0 * PI * a);
        assert!(m_integral(0.0, pt(tc * 1.001, mu)).unwrap() < target);
        assert!(m_integral(0.0, pt(tc * 0.999, mu)).unwrap() > target);
        assert!(critical_temperature(a, 0.0).is_err());
        assert!(critical_temperature(1.0, 1.0).is_err());
    }

    #[test]
    fn gap_vanishes_above_tc_and_at_negative_mu() {
        let tc = critical_temperature(-1.0, 1.0).unwrap();
        let p = ContactGapProblem::new(-1.0, pt(1.1 * tc, 1.0)).unwrap();
        assert_eq!(solve_contact_gap(&p).unwrap(), ContactGapSolution::normal());
        let p = ContactGapProblem::new(-1.0, pt(0.0, -0.5)).unwrap();
        assert_eq!(solve_contact_gap(&p).unwrap(), ContactGapSolution::normal());
        let p = ContactGapProblem::new(-0.3, pt(0.0, 0.0)).unwrap();
        assert!(!solve_contact_gap(&p).unwrap().superfluid);
    }

    #[test]
    fn zero_temperature_gap_solves_equation() {
        let p = ContactGapProblem::new(-1.0, pt(0.0, 1.0)).unwrap();
        let s = solve_contact_gap(&p).unwrap();
        assert!(s.superfluid);
        let m = m_integral(s.delta, p.point).unwrap();
        assert!((m - p.target()).abs() <= 1e-7 * p.target());
    }

    #[test]
    fn rejects_positive_scattering_length() {
        assert!(ContactGapProblem::new(0.5, pt(0.0, 1.0)).is_err());
        assert!(ThermodynamicPoint::new(-0.1, 1.0).is_err());
    }
}
