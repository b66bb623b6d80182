use keepdg::cases::{
    case_by_name, density_wave_case, ig_validation_tgv_case, inviscid_tgv_case, viscous_tgv_case, CaseName,
    DEFAULT_PRANDTL, DEFAULT_VISCOSITY,
};
use keepdg::eos::{isobaric_heat_capacity, pressure, speed_of_sound, Material, ThermoState};
use keepdg::flux::Primitives;
use keepdg::solver::VelocityGradients;

fn co2() -> Material {
    Material::co2()
}

#[test]
fn names_round_trip() {
    for name in CaseName::ALL {
        assert_eq!(name.as_str().parse::<CaseName>().unwrap(), name);
        let case = case_by_name(name, co2()).unwrap();
        assert_eq!(case.name, name);
        assert_eq!(case.dimension(), if name == CaseName::DensityWave { 1 } else { 3 });
    }
    let err = "tgv".parse::<CaseName>().unwrap_err();
    assert!(err.contains("density_wave") && err.contains("tgv_ig_validation"), "{err}");
}

#[test]
fn density_wave_state_reproduces_pressure() {
    let case = density_wave_case(co2());
    let m = co2();
    let s = case.scales;
    assert!((s.rho - 0.839 * m.critical_density).abs() < 1e-12);
    let p = pressure(&case.eos, ThermoState::new(s.rho, s.temperature)).unwrap();
    assert!((p - 1.758 * m.critical_pressure).abs() <= 1e-12 * p);
    let field = case.density_wave_field(33).unwrap();
    for (u, t) in field.states.iter().zip(&field.temperature) {
        let p = pressure(&case.eos, ThermoState::new(u.rho, *t)).unwrap();
        assert!((p - s.pressure).abs() <= 1e-10 * s.pressure);
        assert!((u.velocity()[0] - 10.0).abs() < 1e-12);
    }
}

#[test]
fn density_wave_exact_solution_is_periodic() {
    let case = density_wave_case(co2());
    let field = case.density_wave_field(40).unwrap();
    let at0 = case.density_wave_exact(&field.grid, 0.0).unwrap();
    assert_eq!(at0, field.states);
    let period = case.extent / case.scales.velocity;
    let later = case.density_wave_exact(&field.grid, 3.0 * period).unwrap();
    for (a, b) in at0.iter().zip(&later) {
        assert!((a.rho - b.rho).abs() <= 1e-10 * a.rho);
    }
    // A quarter period moves the profile by ten of forty cells.
    let shifted = case.density_wave_exact(&field.grid, 0.25 * period).unwrap();
    for i in 0..40 {
        assert!((shifted[(i + 10) % 40].rho - at0[i].rho).abs() <= 1e-10 * at0[i].rho);
    }
}

#[test]
fn taylor_green_mean_pressure_and_temperature() {
    let case = inviscid_tgv_case(co2()).unwrap();
    let field = case.tgv_field(12).unwrap();
    let prims: Vec<Primitives<3>> = field
        .states
        .iter()
        .zip(&field.temperature)
        .map(|(u, t)| Primitives::from_conserved(&case.eos, u, Some(*t)).unwrap())
        .collect();
    // Every cosine product of the perturbation averages to zero over whole periods.
    let mean: f64 = prims.iter().map(|p| p.pressure).sum::<f64>() / prims.len() as f64;
    assert!((mean - case.scales.pressure).abs() <= 1e-12 * case.scales.pressure, "{mean}");
    for p in &prims {
        assert!((p.temperature - case.scales.temperature).abs() <= 1e-9 * case.scales.temperature);
    }
    let amplitude = prims.iter().fold(0.0f64, |m, p| m.max((p.pressure - case.scales.pressure).abs()));
    let bound = case.scales.rho * case.scales.velocity.powi(2) / 16.0 * 2.0 * 3.0;
    assert!(amplitude <= bound && amplitude > 0.5 * bound, "{amplitude} {bound}");
}

#[test]
fn taylor_green_is_discretely_solenoidal() {
    let case = inviscid_tgv_case(co2()).unwrap();
    let field = case.tgv_field(10).unwrap();
    let prims: Vec<Primitives<3>> = field
        .states
        .iter()
        .map(|u| Primitives::from_conserved(&case.eos, u, None).unwrap())
        .collect();
    let v0 = case.scales.velocity;
    for i in 0..prims.len() {
        let div = VelocityGradients::at(&field.grid, &prims, i).divergence();
        assert!(div.abs() <= 1e-12 * v0, "{div}");
    }
}

#[test]
fn taylor_green_reference_numbers() {
    let m = co2();
    let inv = inviscid_tgv_case(m).unwrap();
    let c = speed_of_sound(&inv.eos, ThermoState::new(inv.scales.rho, inv.scales.temperature)).unwrap();
    assert!((inv.scales.velocity / c - 0.4).abs() < 1e-12);
    assert!((inv.scales.rho - 0.3 * m.critical_density).abs() < 1e-12);
    assert!((inv.extent - 2.0 * std::f64::consts::PI).abs() < 1e-15);

    for case in [
        viscous_tgv_case(m, 0.1, DEFAULT_VISCOSITY, DEFAULT_PRANDTL).unwrap(),
        ig_validation_tgv_case(m).unwrap(),
    ] {
        let s = case.scales;
        let t = case.transport.unwrap();
        let re = s.rho * s.velocity * s.length / t.viscosity;
        assert!((re - 1600.0).abs() < 1e-9, "{re}");
        let cp = isobaric_heat_capacity(&case.eos, ThermoState::new(s.rho, s.temperature)).unwrap();
        assert!((t.viscosity * cp / t.conductivity - 0.71).abs() < 1e-12);
        assert!((s.time - s.length / s.velocity).abs() <= 1e-15 * s.time);
    }
    let ig = ig_validation_tgv_case(m).unwrap();
    assert_eq!(ig.scales.length, 0.001524);
}

#[test]
fn off_reference_mach_is_noted() {
    let case = viscous_tgv_case(co2(), 0.2, DEFAULT_VISCOSITY, DEFAULT_PRANDTL).unwrap();
    assert!(case.notes.iter().any(|n| n.contains("Mach 0.2")));
    let reference = viscous_tgv_case(co2(), 0.3, DEFAULT_VISCOSITY, DEFAULT_PRANDTL).unwrap();
    assert!(!reference.notes.iter().any(|n| n.contains("Mach")));
}
