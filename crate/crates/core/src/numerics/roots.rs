//! Bracketed root finding.

use crate::error::{invalid, Error, Result};

const MAX_BISECTIONS: usize = 400;

/// Final bracket of a bisection run. `f_lo` and `f_hi` have opposite signs
/// (or one of them is zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisection on a fallible function. Stops when the bracket width drops to
/// `rel_tol * max(|x|, 1)`.
pub fn bisect_bracket<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid("bisection needs a finite bracket with lo < hi"));
    }
    if !(rel_tol > 0.0) {
        return Err(invalid("rel_tol must be positive"));
    }
    let mut b = Bracket {
        lo,
        hi,
        f_lo: f(lo)?,
        f_hi: f(hi)?,
    };
    if b.f_lo == 0.0 {
        b.hi = lo;
        b.f_hi = 0.0;
        return Ok(b);
    }
    if b.f_hi == 0.0 {
        b.lo = hi;
        b.f_lo = 0.0;
        return Ok(b);
    }
    if b.f_lo.signum() == b.f_hi.signum() || b.f_lo.is_nan() || b.f_hi.is_nan() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: b.f_lo,
            f_hi: b.f_hi,
        });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = b.midpoint();
        if b.width() <= rel_tol * mid.abs().max(1.0) || mid <= b.lo || mid >= b.hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(Bracket {
                lo: mid,
                hi: mid,
                f_lo: 0.0,
                f_hi: 0.0,
            });
        }
        if fm.signum() == b.f_lo.signum() {
            b.lo = mid;
            b.f_lo = fm;
        } else {
            b.hi = mid;
            b.f_hi = fm;
        }
    }
    Ok(b)
}

/// Root of a continuous function with a sign change on [lo, hi].
pub fn find_root_bisect<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    bisect_bracket(|x| Ok(f(x)), lo, hi, rel_tol).map(|b| b.midpoint())
}
