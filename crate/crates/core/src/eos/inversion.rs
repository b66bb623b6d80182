//! Maps from non-natural variable pairs back to `(rho, T)`.

use super::root::{solve_increasing, RootProblem};
use super::{EosError, HelmholtzEos, ThermoState};

pub const MAX_INVERSION_ITERATIONS: usize = 200;
const RELATIVE_TOLERANCE: f64 = 1e-12;

/// Solves `e(rho, T) = e` for `T`.
///
/// `guess` warm-starts the Newton iteration; pass `None` for a cold start.
pub fn temperature_from_internal_energy<E: HelmholtzEos + ?Sized>(
    eos: &E,
    rho: f64,
    e: f64,
    guess: Option<f64>,
) -> Result<f64, EosError> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(ThermoState::new(rho, guess.unwrap_or(f64::NAN))
            .out_of_domain("density must be positive"));
    }
    if let Some(t) = eos.temperature_closed_form(rho, e) {
        if t.is_finite() && t > 0.0 {
            return Ok(t);
        }
        let (lo, hi) = eos.temperature_bracket();
        return Err(EosError::NoBracket {
            quantity: "internal energy",
            rho,
            target: e,
            lo,
            hi,
        });
    }
    let (lo, hi) = eos.temperature_bracket();
    let problem = RootProblem {
        quantity: "internal energy",
        rho,
        target: e,
        lo,
        hi,
        guess: guess.unwrap_or_else(|| eos.temperature_estimate(rho, e)),
        tol: RELATIVE_TOLERANCE * e.abs().max(1.0),
        max_iter: MAX_INVERSION_ITERATIONS,
    };
    solve_increasing(problem, |t| {
        let s = ThermoState::new(rho, t);
        let d = eos.derivatives(s)?;
        Ok((d.internal_energy(s) - e, d.cv(s)))
    })
}

/// Solves `p(rho, T) = p` for `T` at fixed density.
pub fn temperature_from_pressure<E: HelmholtzEos + ?Sized>(
    eos: &E,
    rho: f64,
    p: f64,
    guess: Option<f64>,
) -> Result<f64, EosError> {
    let (lo, hi) = eos.temperature_bracket();
    let problem = RootProblem {
        quantity: "pressure",
        rho,
        target: p,
        lo,
        hi,
        guess: guess.unwrap_or_else(|| mid(lo, hi.min(1e4))),
        tol: RELATIVE_TOLERANCE * p.abs().max(1.0),
        max_iter: MAX_INVERSION_ITERATIONS,
    };
    solve_increasing(problem, |t| {
        let s = ThermoState::new(rho, t);
        let d = eos.derivatives(s)?;
        Ok((d.pressure(s) - p, d.dp_dt(s)))
    })
}

/// Solves `p(rho, T) = p` for `rho` at fixed temperature.
///
/// Only meaningful where the isotherm is monotone (supercritical or single
/// phase); otherwise the result is one of several roots or `NoBracket`.
pub fn density_from_pressure<E: HelmholtzEos + ?Sized>(
    eos: &E,
    temperature: f64,
    p: f64,
    guess: Option<f64>,
) -> Result<f64, EosError> {
    let hi = eos.max_density();
    let hi = if hi.is_finite() {
        hi * (1.0 - 1e-10)
    } else {
        f64::MAX
    };
    let problem = RootProblem {
        quantity: "pressure",
        rho: f64::NAN,
        target: p,
        lo: 0.0,
        hi,
        guess: guess.unwrap_or(if hi.is_finite() && hi < f64::MAX { 0.5 * hi } else { 1.0 }),
        tol: RELATIVE_TOLERANCE * p.abs().max(1.0),
        max_iter: MAX_INVERSION_ITERATIONS,
    };
    solve_increasing(problem, |rho| {
        let s = ThermoState::new(rho, temperature);
        let d = eos.derivatives(s)?;
        Ok((d.pressure(s) - p, d.dp_drho(s)))
    })
}

fn mid(lo: f64, hi: f64) -> f64 {
    lo + 0.5 * (hi - lo)
}
