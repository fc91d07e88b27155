//! Gauss–Legendre rules, fixed panel grids and adaptive integration on finite
//! and semi-infinite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

/// Order of the per-panel rule used by the adaptive integrators.
pub const PANEL_ORDER: usize = 16;
/// Maximum bisection depth of a single panel.
pub const MAX_DEPTH: u32 = 40;
/// Physics integrals default to this relative tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

const ABS_FLOOR: f64 = 1e-14;
const MAX_PANELS: usize = 200_000;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1],
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// A composite quadrature rule: Gauss panels laid over an ordered list of
/// panel boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel_boundaries: Vec<f64>,
}

impl QuadratureGrid {
    /// Validates an explicit rule.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, panel_boundaries: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(invalid("nodes and weights differ in length"));
        }
        if panel_boundaries.len() < 2 {
            return Err(invalid("a grid needs at least one panel"));
        }
        if nodes.len() < 2 * (panel_boundaries.len() - 1) {
            return Err(invalid("fewer than two nodes per panel"));
        }
        if !strictly_increasing(&nodes) || !strictly_increasing(&panel_boundaries) {
            return Err(invalid("nodes and panel boundaries must be strictly increasing"));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(invalid("weights must be finite and positive"));
        }
        let lo = panel_boundaries[0];
        let hi = *panel_boundaries.last().unwrap();
        if nodes[0] < lo || *nodes.last().unwrap() > hi {
            return Err(invalid("nodes lie outside the panel boundaries"));
        }
        Ok(Self {
            nodes,
            weights,
            panel_boundaries,
        })
    }

    /// Places an `order`-point Gauss–Legendre rule on every panel.
    pub fn gauss_panels(boundaries: &[f64], order: usize) -> Result<Self> {
        if order < 2 {
            return Err(invalid("panel order must be at least 2"));
        }
        if boundaries.len() < 2 || !strictly_increasing(boundaries) {
            return Err(invalid("panel boundaries must be strictly increasing"));
        }
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order * (boundaries.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in boundaries.windows(2) {
            let half = 0.5 * (pair[1] - pair[0]);
            let mid = 0.5 * (pair[1] + pair[0]);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Self::new(nodes, weights, boundaries.to_vec())
    }

    /// Splits every panel into `factor` equal sub-panels.
    pub fn refined(&self, factor: usize, order: usize) -> Result<Self> {
        let mut bounds = vec![self.panel_boundaries[0]];
        for pair in self.panel_boundaries.windows(2) {
            let h = (pair[1] - pair[0]) / factor as f64;
            for k in 1..factor {
                bounds.push(pair[0] + h * k as f64);
            }
            bounds.push(pair[1]);
        }
        Self::gauss_panels(&bounds, order)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panel_boundaries(&self) -> &[f64] {
        &self.panel_boundaries
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.panel_boundaries[0]
    }

    pub fn hi(&self) -> f64 {
        *self.panel_boundaries.last().unwrap()
    }

    /// Sum of `weights[i] * values[i]`.
    pub fn integrate_samples(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|p| p[0] < p[1])
}

fn gauss_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut sum = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        sum += wi * f(mid + half * xi);
    }
    half * sum
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl Panel {
    fn evaluate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Self {
        let whole = gauss_panel(f, a, b);
        let m = 0.5 * (a + b);
        let halves = gauss_panel(f, a, m) + gauss_panel(f, m, b);
        let error = if whole.is_finite() && halves.is_finite() {
            (halves - whole).abs()
        } else {
            f64::INFINITY
        };
        Panel {
            a,
            b,
            value: halves,
            error,
            depth,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Outcome of a failed adaptive run, kept internal so the semi-infinite
/// driver can tell divergence at the mapped endpoint from plain
/// non-convergence.
struct Failure {
    estimate: f64,
    error_bound: f64,
    worst_b: f64,
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], rel_tol: f64) -> Result<f64, Failure> {
    let mut heap: BinaryHeap<Panel> = breaks.windows(2).map(|p| Panel::evaluate(f, p[0], p[1], 0)).collect();
    loop {
        let (total, total_err) = heap.iter().fold((0.0, 0.0), |(s, e), p| (s + p.value, e + p.error));
        if total_err <= (rel_tol * total.abs()).max(ABS_FLOOR) {
            return Ok(total);
        }
        let worst = heap.pop().expect("at least one panel");
        if worst.depth >= MAX_DEPTH || heap.len() + 2 > MAX_PANELS || !worst.error.is_finite() {
            return Err(Failure {
                estimate: total,
                error_bound: total_err,
                worst_b: worst.b,
            });
        }
        let m = 0.5 * (worst.a + worst.b);
        heap.push(Panel::evaluate(f, worst.a, m, worst.depth + 1));
        heap.push(Panel::evaluate(f, m, worst.b, worst.depth + 1));
    }
}

fn check_breaks(breaks: &[f64], rel_tol: f64) -> Result<()> {
    if breaks.len() < 2 || !strictly_increasing(breaks) {
        return Err(invalid("integration limits must satisfy lo < hi"));
    }
    if !(rel_tol > 0.0) {
        return Err(invalid("rel_tol must be positive"));
    }
    Ok(())
}

/// Adaptive integral of `f` over [lo, hi].
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    integrate_with_breaks(f, &[lo, hi], rel_tol)
}

/// Adaptive integral over [breaks.first, breaks.last] whose initial panels
/// are the intervals between consecutive break points.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64) -> Result<f64> {
    check_breaks(breaks, rel_tol)?;
    adaptive(&f, breaks, rel_tol).map_err(|fail| Error::QuadratureNonConvergence {
        estimate: fail.estimate,
        error_bound: fail.error_bound,
    })
}

/// Integral of `f` over [lo, ∞) through the substitution x = lo + t/(1−t).
///
/// The integrand must decay at least like x^(−2).
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, lo: f64, rel_tol: f64) -> Result<f64> {
    if !lo.is_finite() {
        return Err(invalid("lower limit must be finite"));
    }
    check_breaks(&[0.0, 1.0], rel_tol)?;
    let mapped = |t: f64| {
        let s = 1.0 - t;
        f(lo + t / s) / (s * s)
    };
    // Splitting at t = 1/2 and 3/4 keeps the first panels on the bulk of the
    // integrand.
    adaptive(&mapped, &[0.0, 0.5, 0.75, 1.0], rel_tol).map_err(|fail| {
        if fail.worst_b >= 1.0 {
            Error::Divergent {
                estimate: fail.estimate,
            }
        } else {
            Error::QuadratureNonConvergence {
                estimate: fail.estimate,
                error_bound: fail.error_bound,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_rule_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 101, 400] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: {s}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn panel_rule_is_exact_to_degree_31() {
        let grid = QuadratureGrid::gauss_panels(&[0.0, 1.0], 16).unwrap();
        for k in 0..=31 {
            let v = grid.integrate(|x| x.powi(k));
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((v - exact).abs() <= 1e-13 * exact, "degree {k}");
        }
    }

    #[test]
    fn grid_reproduces_interval_length() {
        let grid = QuadratureGrid::gauss_panels(&[0.0, 0.3, 1.7, 12.0], 16).unwrap();
        let len = grid.integrate(|_| 1.0);
        assert!((len - 12.0).abs() <= 1e-12 * 12.0);
        let fine = grid.refined(2, 16).unwrap();
        assert_eq!(fine.len(), 2 * grid.len());
    }

    #[test]
    fn grid_validation() {
        assert!(QuadratureGrid::new(vec![0.1, 0.2], vec![0.5, 0.5], vec![0.0, 1.0]).is_ok());
        assert!(QuadratureGrid::new(vec![0.2, 0.1], vec![0.5, 0.5], vec![0.0, 1.0]).is_err());
        assert!(QuadratureGrid::new(vec![0.1, 0.2], vec![0.5, -0.5], vec![0.0, 1.0]).is_err());
        assert!(QuadratureGrid::new(vec![0.1], vec![1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn closed_form_integrals() {
        let v = integrate(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        let v = integrate(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_near_singular_peak() {
        let eps = 1e-4;
        let v = integrate(|x| eps / (x * x + eps * eps), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn semi_infinite_closed_forms() {
        let v = integrate_semi_infinite(|x| (-x).exp(), 0.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        let v = integrate_semi_infinite(|x| 1.0 / (1.0 + x * x), 0.0, 1e-12).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite_tail_combination_matches_fine_grid() {
        // x^2/(1+x^4) - 1/(1+x^2) decays like x^-4.
        let f = |x: f64| x * x / (1.0 + x.powi(4)) - 1.0 / (1.0 + x * x);
        let v = integrate_semi_infinite(f, 0.0, 1e-12).unwrap();
        // Brute force: midpoint rule on [0, 2000] with 4e6 cells plus the
        // leading x^-4 tail.
        let n = 4_000_000;
        let h = 2000.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            s += f((i as f64 + 0.5) * h);
        }
        let tail = 1.0 / (3.0 * 2000f64.powi(3));
        let brute = s * h + tail;
        assert!((v - brute).abs() < 1e-8, "{v} vs {brute}");
        // Closed form: pi/(2 sqrt 2) - pi/2.
        let exact = PI / (2.0 * 2f64.sqrt()) - PI / 2.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite_split_consistency() {
        let f = |x: f64| 1.0 / (1.0 + x).powi(3) + (-x).exp() * x.cos();
        let whole = integrate_semi_infinite(f, 0.0, 1e-12).unwrap();
        for split in [0.5, 2.0, 17.0] {
            let a = integrate(f, 0.0, split, 1e-12).unwrap();
            let b = integrate_semi_infinite(f, split, 1e-12).unwrap();
            assert!(((a + b) - whole).abs() <= 1e-10 * whole.abs());
        }
    }

    #[test]
    fn divergent_integral_is_reported() {
        let err = integrate_semi_infinite(|x| 1.0 / (1.0 + x).sqrt(), 0.0, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Divergent { .. }), "{err}");
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-9).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
    }
}
