//! Newton iteration safeguarded by bisection for monotonically increasing
//! scalar functions.

use super::EosError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RootProblem {
    pub quantity: &'static str,
    pub rho: f64,
    pub target: f64,
    pub lo: f64,
    pub hi: f64,
    pub guess: f64,
    /// Absolute tolerance on the residual.
    pub tol: f64,
    pub max_iter: usize,
}

/// Finds `x` in `[lo, hi]` with `|f(x)| <= tol`, where `f` returns
/// `(value, derivative)` and is increasing in `x`.
///
/// The bracket ends are only evaluated if the iteration collapses onto them,
/// so a good guess costs a handful of evaluations.
pub(crate) fn solve_increasing<F>(problem: RootProblem, mut f: F) -> Result<f64, EosError>
where
    F: FnMut(f64) -> Result<(f64, f64), EosError>,
{
    let RootProblem {
        quantity,
        rho,
        target,
        tol,
        max_iter,
        ..
    } = problem;
    let (mut lo, mut hi) = (problem.lo, problem.hi);
    let mut x = if problem.guess > lo && problem.guess < hi && problem.guess.is_finite() {
        problem.guess
    } else {
        mid(lo, hi)
    };
    let mut last = f64::NAN;

    for _ in 0..max_iter {
        let (value, slope) = f(x)?;
        last = value;
        if value.abs() <= tol {
            return Ok(polish(x, value, slope, lo, hi, &mut f));
        }
        if value > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - value / slope;
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            mid(lo, hi)
        };
        if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()) {
            // Collapsed onto a bracket end without meeting the tolerance.
            let (f_lo, _) = f(problem.lo)?;
            let (f_hi, _) = f(problem.hi)?;
            if f_lo > 0.0 || f_hi < 0.0 {
                return Err(EosError::NoBracket {
                    quantity,
                    rho,
                    target,
                    lo: problem.lo,
                    hi: problem.hi,
                });
            }
            let (value, slope) = f(x)?;
            return if value.abs() <= tol.max(8.0 * f64::EPSILON * target.abs()) {
                Ok(polish(x, value, slope, lo, hi, &mut f))
            } else {
                Err(EosError::NoConvergence {
                    quantity,
                    target,
                    iterations: max_iter,
                    last: value,
                })
            };
        }
    }
    let (f_lo, _) = f(problem.lo)?;
    let (f_hi, _) = f(problem.hi)?;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(EosError::NoBracket {
            quantity,
            rho,
            target,
            lo: problem.lo,
            hi: problem.hi,
        });
    }
    Err(EosError::NoConvergence {
        quantity,
        target,
        iterations: max_iter,
        last,
    })
}

#[inline]
fn mid(lo: f64, hi: f64) -> f64 {
    lo + 0.5 * (hi - lo)
}

/// One extra Newton step, kept only if it reduces the residual.
fn polish<F>(x: f64, value: f64, slope: f64, lo: f64, hi: f64, f: &mut F) -> f64
where
    F: FnMut(f64) -> Result<(f64, f64), EosError>,
{
    if value == 0.0 {
        return x;
    }
    let next = x - value / slope;
    if !(next.is_finite() && next >= lo && next <= hi) || next == x {
        return x;
    }
    match f(next) {
        Ok((v, _)) if v.abs() < value.abs() => next,
        _ => x,
    }
}
