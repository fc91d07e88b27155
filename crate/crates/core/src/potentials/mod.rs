//! Radial two-body potentials, their dilation family, radial Fourier
//! transforms and the norms that enter the zero-range limit hypotheses.
//!
//! Units: ħ = 2m = 1, so the two-body kinetic energy is p² and lengths and
//! inverse momenta share a unit.

mod scaling;
mod spec;

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::numerics::{integrate_with_breaks, sinc, MonotoneCubic};

pub use scaling::ScalingFamily;
pub use spec::PotentialSpec;

/// Tail level, relative to the peak, beyond which a Gaussian is cut off.
pub const GAUSSIAN_TAIL: f64 = 1e-12;

const STATS_REL_TOL: f64 = 1e-12;
const FOURIER_REL_TOL: f64 = 1e-11;

/// Shape of a potential before the coupling multiplier is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialForm {
    /// −depth for r ≤ radius, zero outside.
    SquareWell { depth: f64, radius: f64 },
    /// −depth·exp(−r²/width²), truncated where it falls below
    /// [`GAUSSIAN_TAIL`] of its peak.
    Gaussian { depth: f64, width: f64 },
    /// Monotone cubic through samples; held constant below the first sample
    /// and zero beyond the last.
    Tabulated(MonotoneCubic),
}

impl PotentialForm {
    fn eval(&self, r: f64) -> f64 {
        match self {
            PotentialForm::SquareWell { depth, radius } => {
                if r <= *radius {
                    -depth
                } else {
                    0.0
                }
            }
            PotentialForm::Gaussian { depth, width } => {
                if r <= gaussian_cutoff(*width) {
                    -depth * (-(r / width).powi(2)).exp()
                } else {
                    0.0
                }
            }
            PotentialForm::Tabulated(table) => {
                let (lo, hi) = table.range();
                if r <= lo {
                    table.ys()[0]
                } else if r > hi {
                    0.0
                } else {
                    table.eval(r).unwrap_or(0.0)
                }
            }
        }
    }

    fn support_radius(&self) -> f64 {
        match self {
            PotentialForm::SquareWell { radius, .. } => *radius,
            PotentialForm::Gaussian { width, .. } => gaussian_cutoff(*width),
            PotentialForm::Tabulated(table) => table.range().1,
        }
    }

    fn dilate(&self, ell: f64) -> Result<Self> {
        Ok(match self {
            PotentialForm::SquareWell { depth, radius } => PotentialForm::SquareWell {
                depth: *depth,
                radius: radius * ell,
            },
            PotentialForm::Gaussian { depth, width } => PotentialForm::Gaussian {
                depth: *depth,
                width: width * ell,
            },
            PotentialForm::Tabulated(table) => PotentialForm::Tabulated(MonotoneCubic::new(
                table.xs().iter().map(|r| r * ell).collect(),
                table.ys().to_vec(),
            )?),
        })
    }

    /// Points where the integrand of a radial integral may lose smoothness.
    fn breaks(&self) -> Vec<f64> {
        match self {
            PotentialForm::SquareWell { radius, .. } => vec![0.0, *radius],
            PotentialForm::Gaussian { width, .. } => {
                let cut = gaussian_cutoff(*width);
                vec![0.0, *width, 2.0 * width, 3.5 * width, cut]
            }
            PotentialForm::Tabulated(table) => {
                let mut b = vec![0.0];
                b.extend_from_slice(table.xs());
                b
            }
        }
    }
}

fn gaussian_cutoff(width: f64) -> f64 {
    width * (1.0 / GAUSSIAN_TAIL).ln().sqrt()
}

/// Sign structure of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialSign {
    /// V ≤ 0 everywhere and V < 0 somewhere.
    Attractive,
    /// V ≥ 0 everywhere and V > 0 somewhere.
    Repulsive,
    Zero,
    Indefinite,
}

/// Norms of V with the three-dimensional measure 4πr²dr.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialStats {
    /// ‖V‖₁
    pub l1: f64,
    /// ‖V‖_{3/2}
    pub l3_2: f64,
    /// ‖V‖₂
    pub l2: f64,
    /// ‖ |x|V ‖₁
    pub weighted_l1: f64,
    /// ‖ |x|V ‖₂
    pub weighted_l2: f64,
}

/// A radial potential V(r) = coupling · form(r).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    form: PotentialForm,
    coupling: f64,
    support_radius: f64,
    stats: PotentialStats,
}

impl RadialPotential {
    pub fn new(form: PotentialForm, coupling: f64) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(invalid("coupling must be finite"));
        }
        match &form {
            PotentialForm::SquareWell { depth, radius } => {
                check_positive("square-well depth", *depth)?;
                check_positive("square-well radius", *radius)?;
            }
            PotentialForm::Gaussian { depth, width } => {
                check_positive("gaussian depth", *depth)?;
                check_positive("gaussian width", *width)?;
            }
            PotentialForm::Tabulated(table) => {
                if table.range().0 <= 0.0 {
                    return Err(invalid("tabulated potentials must start at r > 0"));
                }
            }
        }
        let support_radius = form.support_radius();
        let mut v = Self {
            form,
            coupling,
            support_radius,
            stats: PotentialStats {
                l1: 0.0,
                l3_2: 0.0,
                l2: 0.0,
                weighted_l1: 0.0,
                weighted_l2: 0.0,
            },
        };
        v.stats = v.compute_stats()?;
        Ok(v)
    }

    pub fn square_well(depth: f64, radius: f64) -> Result<Self> {
        Self::new(PotentialForm::SquareWell { depth, radius }, 1.0)
    }

    pub fn gaussian(depth: f64, width: f64) -> Result<Self> {
        Self::new(PotentialForm::Gaussian { depth, width }, 1.0)
    }

    /// Tabulated potential from strictly increasing radii starting above 0.
    pub fn tabulated(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(invalid("tabulated samples must be finite"));
        }
        if r.first().is_some_and(|r0| *r0 <= 0.0) {
            return Err(invalid("tabulated radii must start at r > 0"));
        }
        Self::new(PotentialForm::Tabulated(MonotoneCubic::new(r, v)?), 1.0)
    }

    /// Reads a two-column CSV with header `r,V`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "V" {
            return Err(invalid(format!("{}: header must be exactly `r,V`", path.display())));
        }
        let mut r = Vec::new();
        let mut v = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let parse = |k: usize| -> Result<f64> {
                record
                    .get(k)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| invalid(format!("{}: bad number on data row {}", path.display(), line + 1)))
            };
            r.push(parse(0)?);
            v.push(parse(1)?);
        }
        Self::tabulated(r, v)
    }

    pub fn form(&self) -> &PotentialForm {
        &self.form
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn stats(&self) -> PotentialStats {
        self.stats
    }

    pub fn eval(&self, r: f64) -> f64 {
        if self.coupling == 0.0 {
            return 0.0;
        }
        self.coupling * self.form.eval(r)
    }

    /// Same form with the coupling multiplied by `factor`.
    pub fn with_coupling_scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.form.clone(), self.coupling * factor)
    }

    /// Same form, coupling set to zero.
    pub fn zero_like(&self) -> Result<Self> {
        Self::new(self.form.clone(), 0.0)
    }

    pub fn sign(&self) -> PotentialSign {
        if self.coupling == 0.0 {
            return PotentialSign::Zero;
        }
        let (neg, pos) = match &self.form {
            PotentialForm::SquareWell { .. } | PotentialForm::Gaussian { .. } => {
                (self.coupling > 0.0, self.coupling < 0.0)
            }
            PotentialForm::Tabulated(table) => {
                let scaled = table.ys().iter().map(|y| y * self.coupling);
                scaled.fold((false, false), |(n, p), y| (n || y < 0.0, p || y > 0.0))
            }
        };
        match (neg, pos) {
            (true, false) => PotentialSign::Attractive,
            (false, true) => PotentialSign::Repulsive,
            (false, false) => PotentialSign::Zero,
            (true, true) => PotentialSign::Indefinite,
        }
    }

    /// Radial break points covering [0, support_radius].
    pub fn radial_breaks(&self) -> Vec<f64> {
        self.form.breaks()
    }

    /// ∫₀^R f(r) dr over the support with the potential's break points.
    pub fn integrate_radial<F: Fn(f64) -> f64>(&self, f: F, rel_tol: f64) -> Result<f64> {
        integrate_with_breaks(f, &self.radial_breaks(), rel_tol)
    }

    fn compute_stats(&self) -> Result<PotentialStats> {
        let norm = |power: f64, weight: f64| -> Result<f64> {
            let v = self.integrate_radial(
                |r| 4.0 * PI * r * r * r.powf(weight * power) * self.eval(r).abs().powf(power),
                STATS_REL_TOL,
            )?;
            if !v.is_finite() {
                return Err(invalid("potential norm diverges"));
            }
            Ok(v.powf(1.0 / power))
        };
        Ok(PotentialStats {
            l1: norm(1.0, 0.0)?,
            l3_2: norm(1.5, 0.0)?,
            l2: norm(2.0, 0.0)?,
            weighted_l1: norm(1.0, 1.0)?,
            weighted_l2: norm(2.0, 1.0)?,
        })
    }

    /// ‖V‖_p with the 4πr² measure, for p ≥ 1.
    pub fn norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(invalid("norm exponent must be >= 1"));
        }
        let v = self.integrate_radial(|r| 4.0 * PI * r * r * self.eval(r).abs().powf(p), STATS_REL_TOL)?;
        Ok(v.powf(1.0 / p))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Builds a validated potential from a descriptor.
pub fn make_radial_potential(spec: &PotentialSpec) -> Result<RadialPotential> {
    match spec {
        PotentialSpec::SquareWell { depth, radius } => RadialPotential::square_well(*depth, *radius),
        PotentialSpec::Gaussian { depth, width } => RadialPotential::gaussian(*depth, *width),
        PotentialSpec::File(path) => RadialPotential::from_csv(path),
    }
}

/// V_ℓ(x) = λ·ℓ^(−2)·V(x/ℓ).
pub fn scale_potential(v: &RadialPotential, ell: f64, lambda: f64) -> Result<RadialPotential> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(invalid(format!("scale ell must be positive, got {ell}")));
    }
    if !lambda.is_finite() {
        return Err(invalid("lambda must be finite"));
    }
    RadialPotential::new(v.form.dilate(ell)?, v.coupling * lambda / (ell * ell))
}

/// Fourier transform with the (2π)^(−3/2) convention, reduced to
/// (2π)^(−3/2)·4π∫₀^∞ r² j₀(pr) V(r) dr.
pub fn fourier_radial(v: &RadialPotential, p: f64) -> Result<f64> {
    let p = p.abs();
    let prefactor = 4.0 * PI / (2.0 * PI).powf(1.5);
    let integral = v.integrate_radial(|r| r * r * sinc(p * r) * v.eval(r), FOURIER_REL_TOL)?;
    Ok(prefactor * integral)
}

pub fn potential_stats(v: &RadialPotential) -> PotentialStats {
    v.stats()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_shapes() {
        let w = RadialPotential::square_well(1.0, 1.0).unwrap();
        assert_eq!(w.eval(0.5), -1.0);
        assert_eq!(w.eval(1.5), 0.0);
        assert_eq!(w.sign(), PotentialSign::Attractive);
        let g = RadialPotential::gaussian(1.0, 1.0).unwrap();
        assert_eq!(g.eval(0.0), -1.0);
        assert!((g.support_radius() - (1e12f64).ln().sqrt()).abs() < 1e-12);
        assert!(g.eval(g.support_radius() * 0.999).abs() < 1.1e-12);
    }

    #[test]
    fn tabulated_matches_nodes() {
        let r: Vec<f64> = (1..=40).map(|k| k as f64 * 0.025).collect();
        let v: Vec<f64> = r.iter().map(|_| -1.0).collect();
        let t = RadialPotential::tabulated(r.clone(), v).unwrap();
        let w = RadialPotential::square_well(1.0, 1.0).unwrap();
        for x in &r {
            assert_eq!(t.eval(*x), w.eval(*x));
        }
        assert_eq!(t.eval(0.01), -1.0);
        assert_eq!(t.eval(1.2), 0.0);
    }

    #[test]
    fn invalid_forms_are_rejected() {
        assert!(RadialPotential::square_well(1.0, -1.0).is_err());
        assert!(RadialPotential::gaussian(1.0, 0.0).is_err());
        assert!(RadialPotential::tabulated(vec![0.0, 1.0], vec![-1.0, 0.0]).is_err());
        assert!(RadialPotential::tabulated(vec![0.5, 1.0], vec![f64::NAN, 0.0]).is_err());
        assert!(RadialPotential::tabulated(vec![0.5, 0.4], vec![-1.0, 0.0]).is_err());
    }

    #[test]
    fn square_well_stats() {
        let s = RadialPotential::square_well(1.0, 1.0).unwrap().stats();
        assert!((s.l1 - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((s.weighted_l1 - PI).abs() < 1e-12);
        assert!((s.l3_2 - (4.0 * PI / 3.0f64).powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((s.weighted_l2 - (4.0 * PI / 5.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn scaling_square_well() {
        let w = RadialPotential::square_well(1.3, 0.8).unwrap();
        let same = scale_potential(&w, 1.0, 1.0).unwrap();
        for r in [0.1, 0.79, 0.81] {
            assert_eq!(same.eval(r), w.eval(r));
        }
        let half = scale_potential(&w, 0.5, 1.0).unwrap();
        let expect = RadialPotential::square_well(4.0 * 1.3, 0.4).unwrap();
        for r in [0.05, 0.39, 0.41, 1.0] {
            assert!((half.eval(r) - expect.eval(r)).abs() < 1e-12);
        }
        assert!((half.support_radius() - 0.4).abs() < 1e-15);
        let lam = 0.7;
        let scaled = scale_potential(&w, 0.25, lam).unwrap();
        assert!((scaled.stats().l1 - lam * 0.25 * w.stats().l1).abs() < 1e-10 * w.stats().l1);
        assert!((scaled.stats().l3_2 - lam * w.stats().l3_2).abs() < 1e-10 * w.stats().l3_2);
    }

    #[test]
    fn fourier_of_square_well() {
        let (v0, big_r) = (1.7, 1.2);
        let w = RadialPotential::square_well(v0, big_r).unwrap();
        let pref = (2.0 * PI).powf(-1.5);
        let at0 = fourier_radial(&w, 0.0).unwrap();
        assert!((at0 + pref * 4.0 * PI / 3.0 * v0 * big_r.powi(3)).abs() < 1e-12);
        for p in [0.5, 1.0, 5.0] {
            // ∫₀^R r sin(pr) dr = (sin pR − pR cos pR)/p².
            let x = p * big_r;
            let exact = -pref * 4.0 * PI * v0 * (x.sin() - x * x.cos()) / p.powi(3);
            let got = fourier_radial(&w, p).unwrap();
            assert!((got - exact).abs() < 1e-10 * exact.abs().max(1e-3), "p = {p}");
            assert_eq!(fourier_radial(&w, -p).unwrap(), got);
        }
    }

    #[test]
    fn fourier_is_continuous_at_zero() {
        let g = RadialPotential::gaussian(2.0, 0.7).unwrap();
        let at0 = fourier_radial(&g, 0.0).unwrap();
        let bound_coeff = (2.0 * PI).powf(-1.5) * g.stats().weighted_l1;
        for p in [1e-1, 1e-2, 1e-3] {
            let d = (fourier_radial(&g, p).unwrap() - at0).abs();
            assert!(d <= bound_coeff * p, "p = {p}: {d}");
        }
    }

    #[test]
    fn csv_round_trip_and_header_check() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("v.csv");
        std::fs::write(&good, "r,V\n0.25,-1\n0.5,-1\n0.75,-0.5\n1.0,0\n").unwrap();
        let v = make_radial_potential(&PotentialSpec::File(good)).unwrap();
        assert_eq!(v.eval(0.5), -1.0);
        assert_eq!(v.support_radius(), 1.0);
        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "radius,V\n0.25,-1\n0.5,-1\n").unwrap();
        assert!(RadialPotential::from_csv(&bad).unwrap_err().is_config_error());
    }
}
