//! C ABI over the keepdg solver.
//!
//! Every function returns a [`KeepdgStatus`]; on failure a description is
//! kept per thread and can be read with [`keepdg_last_error_message`].
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use keepdg::cases::{case_by_name, CaseName};
use keepdg::cli::config::StepControl;
use keepdg::cli::run::Simulation;
use keepdg::diagnostics::integrals;
use keepdg::discrete_gradient::DgChoice;
use keepdg::eos::{
    internal_energy, pressure, speed_of_sound, temperature_from_internal_energy, Eos, EosKind,
    Material, ThermoState,
};
use keepdg::flux::{ConservedState, KeepDg, Primitives};
use keepdg::reduce::Reduction;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeepdgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Eos = 3,
    Flux = 4,
    Solver = 5,
    Panic = 6,
}

/// Discrete-gradient operator selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeepdgDg {
    Siadg = 0,
    Gdg = 1,
    Mvdg = 2,
}

impl KeepdgDg {
    fn choice(self) -> DgChoice {
        match self {
            KeepdgDg::Siadg => DgChoice::siadg(true),
            KeepdgDg::Gdg => DgChoice::gonzalez(),
            KeepdgDg::Mvdg => DgChoice::mvdg(10),
        }
    }
}

/// Opaque equation of state.
pub struct KeepdgEos(Eos);

enum AnySimulation {
    One(Simulation<1>),
    Three(Simulation<3>),
}

/// Opaque running simulation.
pub struct KeepdgSimulation {
    sim: AnySimulation,
    pool: rayon::ThreadPool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: KeepdgStatus, msg: impl ToString) -> KeepdgStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> KeepdgStatus) -> KeepdgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == KeepdgStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(KeepdgStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, KeepdgStatus> {
    if p.is_null() {
        return Err(fail(KeepdgStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(KeepdgStatus::InvalidArgument, "string argument is not UTF-8"))
}

macro_rules! non_null {
    ($($p:ident),*) => {
        $( if $p.is_null() {
            return fail(KeepdgStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        } )*
    };
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn keepdg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a CO2 equation of state: `"ig"`, `"vdw"` or `"pr"`.
///
/// # Safety
/// `name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn keepdg_eos_new(name: *const c_char, out: *mut *mut KeepdgEos) -> KeepdgStatus {
    guard(|| {
        non_null!(out);
        let name = try_status!(str_arg(name));
        let kind: EosKind = match name.parse() {
            Ok(k) => k,
            Err(e) => return fail(KeepdgStatus::InvalidArgument, e),
        };
        *out = Box::into_raw(Box::new(KeepdgEos(kind.build(&Material::co2()))));
        KeepdgStatus::Ok
    })
}

/// # Safety
/// `eos` must come from [`keepdg_eos_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn keepdg_eos_free(eos: *mut KeepdgEos) {
    if !eos.is_null() {
        drop(Box::from_raw(eos));
    }
}

unsafe fn thermo_call(
    eos: *const KeepdgEos,
    rho: f64,
    temperature: f64,
    out: *mut f64,
    f: fn(&Eos, ThermoState) -> Result<f64, keepdg::eos::EosError>,
) -> KeepdgStatus {
    guard(|| {
        non_null!(eos, out);
        match f(&(*eos).0, ThermoState::new(rho, temperature)) {
            Ok(v) => {
                *out = v;
                KeepdgStatus::Ok
            }
            Err(e) => fail(KeepdgStatus::Eos, e),
        }
    })
}

/// Pressure at `(rho, T)`, Pa.
///
/// # Safety
/// `eos` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn keepdg_eos_pressure(eos: *const KeepdgEos, rho: f64, temperature: f64, out: *mut f64) -> KeepdgStatus {
    thermo_call(eos, rho, temperature, out, |e, s| pressure(e, s))
}

/// Specific internal energy at `(rho, T)`, J/kg.
///
/// # Safety
/// `eos` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn keepdg_eos_internal_energy(eos: *const KeepdgEos, rho: f64, temperature: f64, out: *mut f64) -> KeepdgStatus {
    thermo_call(eos, rho, temperature, out, |e, s| internal_energy(e, s))
}

/// Speed of sound at `(rho, T)`, m/s.
///
/// # Safety
/// `eos` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn keepdg_eos_sound_speed(eos: *const KeepdgEos, rho: f64, temperature: f64, out: *mut f64) -> KeepdgStatus {
    thermo_call(eos, rho, temperature, out, |e, s| speed_of_sound(e, s))
}

/// Temperature with `e(rho, T) = e`.
///
/// # Safety
/// `eos` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn keepdg_eos_temperature(eos: *const KeepdgEos, rho: f64, e: f64, out: *mut f64) -> KeepdgStatus {
    guard(|| {
        non_null!(eos, out);
        match temperature_from_internal_energy(&(*eos).0, rho, e, None) {
            Ok(t) => {
                *out = t;
                KeepdgStatus::Ok
            }
            Err(err) => fail(KeepdgStatus::Eos, err),
        }
    })
}

/// KEEP-DG flux between two three-dimensional conserved states
/// `[rho, m1, m2, m3, E]` along `axis` (0, 1 or 2).
///
/// # Safety
/// `left`, `right` and `out` must each point to 5 doubles.
#[no_mangle]
pub unsafe extern "C" fn keepdg_flux(
    eos: *const KeepdgEos,
    dg: KeepdgDg,
    left: *const f64,
    right: *const f64,
    axis: usize,
    out: *mut f64,
) -> KeepdgStatus {
    guard(|| {
        non_null!(eos, left, right, out);
        if axis > 2 {
            return fail(KeepdgStatus::InvalidArgument, format!("axis must be 0, 1 or 2, got {axis}"));
        }
        let load = |p: *const f64| {
            let s = std::slice::from_raw_parts(p, 5);
            ConservedState::<3>::new(s[0], [s[1], s[2], s[3]], s[4])
        };
        let eos = &(*eos).0;
        let prim = |u: &ConservedState<3>| Primitives::from_conserved(eos, u, None);
        let (l, r) = match (prim(&load(left)), prim(&load(right))) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => return fail(KeepdgStatus::Eos, e),
        };
        match KeepDg::new(dg.choice()).flux(eos, &l, &r, axis) {
            Ok(f) => {
                let dst = std::slice::from_raw_parts_mut(out, 5);
                for (d, v) in dst.iter_mut().zip(f.value.iter()) {
                    *d = v;
                }
                KeepdgStatus::Ok
            }
            Err(e) => fail(KeepdgStatus::Flux, e),
        }
    })
}

/// Sets up a built-in case (`"density_wave"`, `"tgv_inviscid"`,
/// `"tgv_viscous"`, `"tgv_ig_validation"`) on `cells` cells per axis with
/// its default CFL and final time. `threads = 0` picks the default count.
///
/// # Safety
/// `name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn keepdg_simulation_new(
    name: *const c_char,
    cells: usize,
    threads: usize,
    out: *mut *mut KeepdgSimulation,
) -> KeepdgStatus {
    guard(|| {
        non_null!(out);
        let name: CaseName = match try_status!(str_arg(name)).parse() {
            Ok(n) => n,
            Err(e) => return fail(KeepdgStatus::InvalidArgument, e),
        };
        let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(p) => p,
            Err(e) => return fail(KeepdgStatus::InvalidArgument, e),
        };
        let built = pool.install(|| {
            let case = case_by_name(name, Material::co2()).map_err(|e| e.to_string())?;
            let control = StepControl::Cfl(case.cfl);
            let reduction = Reduction::default();
            match case.dimension() {
                1 => {
                    let field = case.density_wave_field(cells).map_err(|e| e.to_string())?;
                    Simulation::new(case, field, control, None, reduction)
                        .map(AnySimulation::One)
                        .map_err(|e| e.to_string())
                }
                _ => {
                    let field = case.tgv_field(cells).map_err(|e| e.to_string())?;
                    Simulation::new(case, field, control, None, reduction)
                        .map(AnySimulation::Three)
                        .map_err(|e| e.to_string())
                }
            }
        });
        match built {
            Ok(sim) => {
                *out = Box::into_raw(Box::new(KeepdgSimulation { sim, pool }));
                KeepdgStatus::Ok
            }
            Err(e) => fail(KeepdgStatus::Solver, e),
        }
    })
}

/// # Safety
/// `sim` must come from [`keepdg_simulation_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn keepdg_simulation_free(sim: *mut KeepdgSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances by up to `steps` time steps, stopping at the final time.
///
/// # Safety
/// `sim` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn keepdg_simulation_step(sim: *mut KeepdgSimulation, steps: usize) -> KeepdgStatus {
    guard(|| {
        non_null!(sim);
        let KeepdgSimulation { sim, pool } = &mut *sim;
        let result = pool.install(|| {
            for _ in 0..steps {
                match sim {
                    AnySimulation::One(s) if !s.finished() => s.advance()?,
                    AnySimulation::Three(s) if !s.finished() => s.advance()?,
                    _ => break,
                }
            }
            Ok::<(), keepdg::cli::run::RunError>(())
        });
        match result {
            Ok(()) => KeepdgStatus::Ok,
            Err(e) => fail(KeepdgStatus::Solver, e),
        }
    })
}

/// Current time in seconds, or NaN for a null handle.
///
/// # Safety
/// `sim` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn keepdg_simulation_time(sim: *const KeepdgSimulation) -> f64 {
    match sim.as_ref().map(|s| &s.sim) {
        Some(AnySimulation::One(s)) => s.time(),
        Some(AnySimulation::Three(s)) => s.time(),
        None => f64::NAN,
    }
}

/// Number of doubles in the conserved state, `(d + 2) * cells`; 0 for null.
///
/// # Safety
/// `sim` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn keepdg_simulation_state_len(sim: *const KeepdgSimulation) -> usize {
    match sim.as_ref().map(|s| &s.sim) {
        Some(AnySimulation::One(s)) => 3 * s.field.states.len(),
        Some(AnySimulation::Three(s)) => 5 * s.field.states.len(),
        None => 0,
    }
}

/// Copies the conserved state, cell by cell with the first axis fastest,
/// into `buf` of `len` doubles.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn keepdg_simulation_copy_state(sim: *const KeepdgSimulation, buf: *mut f64, len: usize) -> KeepdgStatus {
    guard(|| {
        non_null!(sim, buf);
        let need = keepdg_simulation_state_len(sim);
        if len < need {
            return fail(KeepdgStatus::InvalidArgument, format!("buffer holds {len} doubles, need {need}"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        let values: Box<dyn Iterator<Item = f64>> = match &(*sim).sim {
            AnySimulation::One(s) => Box::new(s.field.states.iter().flat_map(|u| u.iter().collect::<Vec<_>>())),
            AnySimulation::Three(s) => Box::new(s.field.states.iter().flat_map(|u| u.iter().collect::<Vec<_>>())),
        };
        for (d, v) in dst.iter_mut().zip(values) {
            *d = v;
        }
        KeepdgStatus::Ok
    })
}

/// Total entropy `S_h` and kinetic energy `K_h` of the current state.
///
/// # Safety
/// `sim`, `entropy` and `kinetic_energy` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn keepdg_simulation_integrals(
    sim: *mut KeepdgSimulation,
    entropy: *mut f64,
    kinetic_energy: *mut f64,
) -> KeepdgStatus {
    guard(|| {
        non_null!(sim, entropy, kinetic_energy);
        let KeepdgSimulation { sim, pool } = &mut *sim;
        let result = pool.install(|| match sim {
            AnySimulation::One(s) => totals(s),
            AnySimulation::Three(s) => totals(s),
        });
        match result {
            Ok((s, k)) => {
                *entropy = s;
                *kinetic_energy = k;
                KeepdgStatus::Ok
            }
            Err(e) => fail(KeepdgStatus::Solver, e),
        }
    })
}

fn totals<const D: usize>(s: &mut Simulation<D>) -> Result<(f64, f64), keepdg::solver::SolverError> {
    s.disc.update_primitives(&s.field.states, &mut s.field.temperature)?;
    let i = integrals(&s.field.grid, &s.field.states, s.disc.primitives(), &s.reduction);
    Ok((i.entropy, i.kinetic_energy))
}
