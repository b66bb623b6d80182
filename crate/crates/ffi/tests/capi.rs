use std::ffi::{CStr, CString};
use std::ptr;

use keepdg_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(keepdg_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn eos(name: &str) -> *mut KeepdgEos {
    let name = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { keepdg_eos_new(name.as_ptr(), &mut out) }, KeepdgStatus::Ok);
    out
}

#[test]
fn unknown_eos_sets_message() {
    let name = CString::new("steam").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { keepdg_eos_new(name.as_ptr(), &mut out) };
    assert_eq!(status, KeepdgStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(last_error().contains("steam"), "{}", last_error());
}

#[test]
fn null_arguments_are_reported() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { keepdg_eos_new(ptr::null(), &mut out) }, KeepdgStatus::NullPointer);
    let mut p = 0.0;
    assert_eq!(
        unsafe { keepdg_eos_pressure(ptr::null(), 1.0, 300.0, &mut p) },
        KeepdgStatus::NullPointer
    );
    unsafe { keepdg_eos_free(ptr::null_mut()) };
}

#[test]
fn thermo_round_trip() {
    for name in ["ig", "vdw", "pr"] {
        let e = eos(name);
        let (rho, t) = (300.0, 400.0);
        let (mut p, mut ie, mut c, mut t2) = (0.0, 0.0, 0.0, 0.0);
        unsafe {
            assert_eq!(keepdg_eos_pressure(e, rho, t, &mut p), KeepdgStatus::Ok);
            assert_eq!(keepdg_eos_internal_energy(e, rho, t, &mut ie), KeepdgStatus::Ok);
            assert_eq!(keepdg_eos_sound_speed(e, rho, t, &mut c), KeepdgStatus::Ok);
            assert_eq!(keepdg_eos_temperature(e, rho, ie, &mut t2), KeepdgStatus::Ok);
            keepdg_eos_free(e);
        }
        assert!(p > 0.0 && c > 0.0, "{name}");
        assert!((t2 - t).abs() < 1e-9 * t, "{name}: {t2}");
        assert_eq!(last_error(), "");
    }
}

#[test]
fn flux_is_consistent_and_symmetric() {
    let e = eos("pr");
    let (rho, t) = (300.0, 400.0);
    let (mut p, mut ie) = (0.0, 0.0);
    unsafe {
        keepdg_eos_pressure(e, rho, t, &mut p);
        keepdg_eos_internal_energy(e, rho, t, &mut ie);
    }
    let v = [20.0, -5.0, 3.0];
    let energy = rho * (ie + 0.5 * v.iter().map(|x| x * x).sum::<f64>());
    let u = [rho, rho * v[0], rho * v[1], rho * v[2], energy];
    let mut f = [0.0; 5];
    let status = unsafe { keepdg_flux(e, KeepdgDg::Siadg, u.as_ptr(), u.as_ptr(), 0, f.as_mut_ptr()) };
    assert_eq!(status, KeepdgStatus::Ok);
    let exact = [rho * v[0], rho * v[0] * v[0] + p, rho * v[0] * v[1], rho * v[0] * v[2], v[0] * (energy + p)];
    for (a, b) in f.iter().zip(exact) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
    }

    let mut w = u;
    w[0] *= 1.1;
    w[4] *= 1.12;
    let (mut lr, mut rl) = ([0.0; 5], [0.0; 5]);
    unsafe {
        keepdg_flux(e, KeepdgDg::Gdg, u.as_ptr(), w.as_ptr(), 1, lr.as_mut_ptr());
        keepdg_flux(e, KeepdgDg::Gdg, w.as_ptr(), u.as_ptr(), 1, rl.as_mut_ptr());
    }
    for (a, b) in lr.iter().zip(rl) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }

    let status = unsafe { keepdg_flux(e, KeepdgDg::Siadg, u.as_ptr(), u.as_ptr(), 3, f.as_mut_ptr()) };
    assert_eq!(status, KeepdgStatus::InvalidArgument);
    unsafe { keepdg_eos_free(e) };
}

#[test]
fn density_wave_simulation_steps() {
    let name = CString::new("density_wave").unwrap();
    let mut sim = ptr::null_mut();
    let status = unsafe { keepdg_simulation_new(name.as_ptr(), 16, 1, &mut sim) };
    assert_eq!(status, KeepdgStatus::Ok, "{}", last_error());
    let len = unsafe { keepdg_simulation_state_len(sim) };
    assert_eq!(len, 3 * 16);

    let mut before = vec![0.0; len];
    let (mut s0, mut k0) = (0.0, 0.0);
    unsafe {
        keepdg_simulation_copy_state(sim, before.as_mut_ptr(), len);
        keepdg_simulation_integrals(sim, &mut s0, &mut k0);
        assert_eq!(keepdg_simulation_step(sim, 5), KeepdgStatus::Ok);
    }
    assert!(unsafe { keepdg_simulation_time(sim) } > 0.0);

    let mut after = vec![0.0; len];
    let (mut s1, mut k1) = (0.0, 0.0);
    unsafe {
        keepdg_simulation_copy_state(sim, after.as_mut_ptr(), len);
        keepdg_simulation_integrals(sim, &mut s1, &mut k1);
    }
    let mass = |u: &[f64]| u.iter().step_by(3).sum::<f64>();
    assert!((mass(&after) - mass(&before)).abs() <= 1e-13 * mass(&before));
    assert!((s1 - s0).abs() <= 1e-11 * s0.abs());

    let mut small = vec![0.0; 2];
    let status = unsafe { keepdg_simulation_copy_state(sim, small.as_mut_ptr(), 2) };
    assert_eq!(status, KeepdgStatus::InvalidArgument);
    unsafe { keepdg_simulation_free(sim) };
    assert!(unsafe { keepdg_simulation_time(ptr::null()) }.is_nan());
}

#[test]
fn unknown_case_lists_names() {
    let name = CString::new("cavity").unwrap();
    let mut sim = ptr::null_mut();
    let status = unsafe { keepdg_simulation_new(name.as_ptr(), 8, 1, &mut sim) };
    assert_eq!(status, KeepdgStatus::InvalidArgument);
    assert!(last_error().contains("density_wave"));
}

#[test]
fn header_declares_entry_points() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/keepdg.h")).unwrap();
    for sym in [
        "keepdg_last_error_message",
        "keepdg_eos_new",
        "keepdg_flux",
        "keepdg_simulation_new",
        "keepdg_simulation_copy_state",
        "KEEPDG_STATUS_OK = 0",
    ] {
        assert!(header.contains(sym), "{sym}");
    }
}
