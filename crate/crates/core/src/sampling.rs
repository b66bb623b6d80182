//! Random admissible states, pairs and smooth fields for fuzzing and
//! verification.

use std::f64::consts::PI;

use rand::Rng;

use crate::eos::{speed_of_sound, EosError, EosKind, HelmholtzEos, Material, ThermoState};
use crate::flux::Primitives;
use crate::solver::{Field, Grid, SolverError};

/// Box of thermodynamic states sampled by the fuzzers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateBox {
    pub rho: (f64, f64),
    pub temperature: (f64, f64),
    pub speed: f64,
}

impl StateBox {
    /// Single-phase box for `kind`: supercritical temperatures for the
    /// cubic models, a wide gaseous range for the ideal gas.
    pub fn for_eos(kind: EosKind, m: &Material) -> Self {
        let (rc, tc) = (m.critical_density, m.critical_temperature);
        match kind {
            EosKind::IdealGas => Self {
                rho: (0.05 * rc, 2.0 * rc),
                temperature: (150.0, 1500.0),
                speed: 150.0,
            },
            EosKind::VanDerWaals | EosKind::PengRobinson => Self {
                rho: (0.05 * rc, 1.8 * rc),
                temperature: (1.05 * tc, 3.0 * tc),
                speed: 150.0,
            },
        }
    }
}

/// Uniform in `[lo, hi)`.
fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

fn admissible<E: HelmholtzEos + ?Sized>(eos: &E, s: ThermoState) -> Result<bool, EosError> {
    match speed_of_sound(eos, s) {
        Ok(c) => Ok(c.is_finite() && c > 0.0),
        Err(EosError::OutOfDomain { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Random admissible state with velocity components in `[-speed, speed]`.
pub fn random_state<E: HelmholtzEos + ?Sized, R: Rng + ?Sized, const D: usize>(
    eos: &E,
    b: &StateBox,
    rng: &mut R,
) -> Result<Primitives<D>, EosError> {
    loop {
        let s = ThermoState::new(uniform(rng, b.rho), uniform(rng, b.temperature));
        if admissible(eos, s)? {
            let v = std::array::from_fn(|_| uniform(rng, (-b.speed, b.speed)));
            return Primitives::from_thermo(eos, s, v);
        }
    }
}

/// Random pair: half of the time independent states, otherwise a state and
/// a perturbation of it with relative size `10^U(-10, -1)`.
pub fn random_pair<E: HelmholtzEos + ?Sized, R: Rng + ?Sized, const D: usize>(
    eos: &E,
    b: &StateBox,
    rng: &mut R,
) -> Result<(Primitives<D>, Primitives<D>), EosError> {
    let l: Primitives<D> = random_state(eos, b, rng)?;
    if rng.gen_bool(0.5) {
        return Ok((l, random_state(eos, b, rng)?));
    }
    loop {
        let size = 10f64.powf(uniform(rng, (-10.0, -1.0)));
        let mut jitter = || 1.0 + size * uniform(rng, (-1.0, 1.0));
        let s = ThermoState::new(l.rho * jitter(), l.temperature * jitter());
        let v = l.velocity.map(|x| x + size * b.speed * uniform(rng, (-1.0, 1.0)));
        if admissible(eos, s)? {
            return Ok((l, Primitives::from_thermo(eos, s, v)?));
        }
    }
}

/// Pair of independent states, never near-equal by construction.
pub fn random_independent_pair<E: HelmholtzEos + ?Sized, R: Rng + ?Sized, const D: usize>(
    eos: &E,
    b: &StateBox,
    rng: &mut R,
) -> Result<(Primitives<D>, Primitives<D>), EosError> {
    Ok((random_state(eos, b, rng)?, random_state(eos, b, rng)?))
}

/// Smooth periodic field: density, temperature and every velocity
/// component are a mean plus two random low-wavenumber Fourier modes.
pub fn random_smooth_field<E: HelmholtzEos + ?Sized, R: Rng + ?Sized, const D: usize>(
    eos: &E,
    grid: Grid<D>,
    b: &StateBox,
    rng: &mut R,
) -> Result<Field<D>, SolverError> {
    struct Mode<const D: usize> {
        k: [f64; D],
        phase: f64,
        amp: f64,
    }
    let modes = |rng: &mut R, amp: f64| -> Vec<Mode<D>> {
        (0..2)
            .map(|_| Mode {
                k: std::array::from_fn(|_| rng.gen_range(0..=2) as f64),
                phase: uniform(rng, (0.0, 2.0 * PI)),
                amp: amp * uniform(rng, (-1.0, 1.0)),
            })
            .collect()
    };
    let mid = |r: (f64, f64)| 0.5 * (r.0 + r.1);
    let half = |r: (f64, f64)| 0.5 * (r.1 - r.0);
    let rho_mean = mid(b.rho) + 0.3 * half(b.rho) * uniform(rng, (-1.0, 1.0));
    let t_mean = mid(b.temperature) + 0.3 * half(b.temperature) * uniform(rng, (-1.0, 1.0));
    let rho_modes = modes(rng, 0.25 * half(b.rho));
    let t_modes = modes(rng, 0.25 * half(b.temperature));
    let v_modes: Vec<Vec<Mode<D>>> = (0..D).map(|_| modes(rng, 0.5 * b.speed)).collect();
    let lower = grid.lower();
    let extent = grid.extent();
    let eval = |ms: &[Mode<D>], x: &[f64; D]| -> f64 {
        ms.iter()
            .map(|m| {
                let arg: f64 = (0..D)
                    .map(|d| 2.0 * PI * m.k[d] * (x[d] - lower[d]) / extent[d])
                    .sum();
                m.amp * (arg + m.phase).sin()
            })
            .sum()
    };
    let mut states = Vec::with_capacity(grid.len());
    let mut temps = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = grid.center(i);
        let s = ThermoState::new(rho_mean + eval(&rho_modes, &x), t_mean + eval(&t_modes, &x));
        let v = std::array::from_fn(|d| eval(&v_modes[d], &x));
        let cell = |source| SolverError::Cell {
            coords: grid.coords(i).to_vec(),
            source,
        };
        let p = Primitives::from_thermo(eos, s, v).map_err(cell)?;
        speed_of_sound(eos, s).map_err(cell)?;
        states.push(p.conserved());
        temps.push(p.temperature);
    }
    Field::new(grid, states, temps)
}
