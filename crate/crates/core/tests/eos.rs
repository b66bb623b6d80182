use approx::assert_relative_eq;
use keepdg::eos::{
    analytic_gradients_pbeta_gbeta, entropy_density, entropy_variables, gibbs, internal_energy, ke_gradient,
    pressure, specific_entropy, speed_of_sound, temperature_from_internal_energy, EosError, EosKind, HelmholtzEos,
    IdealGas, Material, PengRobinson, ThermoState, VanDerWaals,
};
use keepdg::flux::ConservedState;
use proptest::prelude::*;

fn co2() -> Material {
    Material::co2()
}

/// Fractions of the supercritical sampling box mapped to a state.
fn state(kind: EosKind, fr: f64, ft: f64) -> ThermoState {
    let m = co2();
    let (rc, tc) = (m.critical_density, m.critical_temperature);
    match kind {
        EosKind::IdealGas => ThermoState::new(rc * (0.05 + 1.95 * fr), 150.0 + 1350.0 * ft),
        _ => ThermoState::new(rc * (0.2 + 1.8 * fr), tc * (1.05 + 0.95 * ft)),
    }
}

fn kind() -> impl Strategy<Value = EosKind> {
    prop_oneof![Just(EosKind::IdealGas), Just(EosKind::VanDerWaals), Just(EosKind::PengRobinson)]
}

fn helmholtz(eos: &impl HelmholtzEos, rho: f64, t: f64) -> f64 {
    eos.derivatives(ThermoState::new(rho, t)).unwrap().a
}

#[test]
fn unit_ideal_gas_values() {
    let ig = IdealGas::new(1.0, 1.4);
    let s = ThermoState::new(1.0, 1.0);
    assert_eq!(ig.derivatives(s).unwrap().a, -1.0);
    assert_relative_eq!(pressure(&ig, s).unwrap(), 1.0, max_relative = 1e-15);
    assert_relative_eq!(internal_energy(&ig, ThermoState::new(1.0, 2.0)).unwrap(), 5.0, max_relative = 1e-15);
    assert_relative_eq!(speed_of_sound(&ig, s).unwrap(), 1.4f64.sqrt(), max_relative = 1e-15);
    assert!((speed_of_sound(&ig, s).unwrap() - 1.18322).abs() < 1e-5);
    assert_relative_eq!(temperature_from_internal_energy(&ig, 1.0, 2.5, None).unwrap(), 1.0, max_relative = 1e-15);
}

#[test]
fn ideal_gas_gibbs_closed_form() {
    let (r, gamma) = (188.9, 1.4);
    let ig = IdealGas::new(r, gamma);
    for (rho, t) in [(1.0, 300.0), (50.0, 1200.0), (0.3, 150.0)] {
        let expected = -(r * t / (gamma - 1.0)) * t.ln() + r * t * f64::ln(rho);
        let got = gibbs(&ig, ThermoState::new(rho, t)).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-13);
    }
}

#[test]
fn cubic_constants_for_co2() {
    let vdw = VanDerWaals::from_material(&co2());
    assert!((vdw.a - 188.8).abs() < 0.1, "{}", vdw.a);
    assert!((vdw.b - 9.735e-4).abs() < 1e-6, "{}", vdw.b);
    let pr = PengRobinson::from_material(&co2());
    assert!(pr.b < vdw.b && pr.a > vdw.a);
}

#[test]
fn peng_robinson_inviscid_tgv_reference_speed() {
    let m = co2();
    let pr = PengRobinson::from_material(&m);
    let c = speed_of_sound(&pr, ThermoState::new(0.3 * m.critical_density, 1.4 * m.critical_temperature)).unwrap();
    assert!(c > 100.0 && c < 1000.0, "{c}");
}

#[test]
fn vdw_reduces_to_ideal_gas() {
    let ig = IdealGas::new(200.0, 1.4);
    let vdw = VanDerWaals {
        gas_constant: 200.0,
        a: 0.0,
        b: 0.0,
        exponent: 1.0 / 0.4,
        critical_temperature: 300.0,
    };
    for (rho, t) in [(2.0, 300.0), (400.0, 900.0)] {
        let s = ThermoState::new(rho, t);
        assert_relative_eq!(pressure(&vdw, s).unwrap(), pressure(&ig, s).unwrap(), max_relative = 1e-13);
        assert_relative_eq!(internal_energy(&vdw, s).unwrap(), internal_energy(&ig, s).unwrap(), max_relative = 1e-13);
        assert_relative_eq!(specific_entropy(&vdw, s).unwrap(), specific_entropy(&ig, s).unwrap(), max_relative = 1e-13);
        assert_relative_eq!(gibbs(&vdw, s).unwrap(), gibbs(&ig, s).unwrap(), max_relative = 1e-13);
    }
}

#[test]
fn covolume_is_rejected() {
    let vdw = VanDerWaals::from_material(&co2());
    let err = vdw.derivatives(ThermoState::new(1.0 / vdw.b, 400.0)).unwrap_err();
    assert!(matches!(err, EosError::OutOfDomain { .. }));
    assert!(matches!(
        IdealGas::from_material(&co2()).derivatives(ThermoState::new(-1.0, 300.0)),
        Err(EosError::OutOfDomain { .. })
    ));
}

#[test]
fn inversion_from_far_guess() {
    let m = co2();
    let vdw = VanDerWaals::from_material(&m);
    let s = ThermoState::new(400.0, 450.0);
    let e = internal_energy(&vdw, s).unwrap();
    for guess in [Some(1.0e-3), Some(1.0e6), None] {
        let t = temperature_from_internal_energy(&vdw, 400.0, e, guess).unwrap();
        assert_relative_eq!(t, 450.0, max_relative = 1e-10);
    }
}

/// Fourth-order central difference.
fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn derivatives_match_finite_differences(kind in kind(), fr in 0.0..1.0f64, ft in 0.0..1.0f64) {
        let eos = kind.build(&co2());
        let s = state(kind, fr, ft);
        let d = eos.derivatives(s).unwrap();
        let (hr, ht) = (1e-4 * s.rho, 1e-4 * s.temperature);
        let a = |r: f64, t: f64| helmholtz(&eos, r, t);
        let (r, t) = (s.rho, s.temperature);
        let a_rho = d1(|x| a(x, t), r, 10.0 * hr);
        let a_t = d1(|x| a(r, x), t, 10.0 * ht);
        // Second derivatives from the first ones, which are checked against A itself.
        let der = |x: f64, y: f64| eos.derivatives(ThermoState::new(x, y)).unwrap();
        let a_rhorho = d1(|x| der(x, t).a_rho, r, 10.0 * hr);
        let a_tt = d1(|x| der(r, x).a_t, t, 10.0 * ht);
        let a_rhot = d1(|x| der(r, x).a_rho, t, 10.0 * ht);
        let a_trho = d1(|x| der(x, t).a_t, r, 10.0 * hr);
        let close = |x: f64, y: f64, tol: f64| (x - y).abs() <= tol * x.abs().max(y.abs());
        prop_assert!(close(d.a_rho, a_rho, 1e-7), "{} {}", d.a_rho, a_rho);
        prop_assert!(close(d.a_t, a_t, 1e-7), "{} {}", d.a_t, a_t);
        prop_assert!(close(d.a_rhot, a_rhot, 1e-7), "{} {}", d.a_rhot, a_rhot);
        prop_assert!(close(d.a_rhot, a_trho, 1e-7), "{} {}", d.a_rhot, a_trho);
        prop_assert!(close(d.a_rhorho, a_rhorho, 1e-7), "{} {}", d.a_rhorho, a_rhorho);
        prop_assert!(close(d.a_tt, a_tt, 1e-7), "{} {}", d.a_tt, a_tt);
    }

    #[test]
    fn beta_gradients_match_finite_differences(kind in kind(), fr in 0.0..1.0f64, ft in 0.0..1.0f64) {
        let eos = kind.build(&co2());
        let s = state(kind, fr, ft);
        let g = analytic_gradients_pbeta_gbeta(&eos, s).unwrap();
        let field = |rho: f64, beta: f64| {
            let st = ThermoState::from_rho_beta(rho, beta);
            [pressure(&eos, st).unwrap() * beta, gibbs(&eos, st).unwrap() * beta]
        };
        let (rho, beta) = (s.rho, s.beta());
        let (hr, hb) = (1e-3 * rho, 1e-3 * beta);
        for k in 0..2 {
            let d_rho = d1(|x| field(x, beta)[k], rho, hr);
            let d_beta = d1(|x| field(rho, x)[k], beta, hb);
            let exact = [g.p_beta, g.g_beta][k];
            let scale = exact[0].abs() * rho + exact[1].abs() * beta;
            prop_assert!((exact[0] - d_rho).abs() * rho <= 1e-7 * scale, "k={k} rho {} {}", exact[0], d_rho);
            prop_assert!((exact[1] - d_beta).abs() * beta <= 1e-7 * scale, "k={k} beta {} {}", exact[1], d_beta);
        }
        if kind == EosKind::IdealGas {
            prop_assert!((g.p_beta[0] - co2().specific_gas_constant()).abs() <= 1e-12 * g.p_beta[0]);
            prop_assert!(g.p_beta[1].abs() <= 1e-9 * g.p_beta[0] * rho / beta);
        }
    }

    #[test]
    fn energy_increases_with_temperature(kind in kind(), fr in 0.0..1.0f64, t1 in 0.0..1.0f64, t2 in 0.0..1.0f64) {
        prop_assume!(t1 != t2);
        let eos = kind.build(&co2());
        let (lo, hi) = (state(kind, fr, t1.min(t2)), state(kind, fr, t1.max(t2)));
        prop_assert!(internal_energy(&eos, lo).unwrap() < internal_energy(&eos, hi).unwrap());
    }

    #[test]
    fn temperature_inversion_round_trips(kind in kind(), fr in 0.0..1.0f64, ft in 0.0..1.0f64, g in 0.5..2.0f64) {
        let eos = kind.build(&co2());
        let s = state(kind, fr, ft);
        let e = internal_energy(&eos, s).unwrap();
        let t = temperature_from_internal_energy(&eos, s.rho, e, Some(g * s.temperature)).unwrap();
        prop_assert!((t - s.temperature).abs() <= 1e-10 * s.temperature);
    }

    #[test]
    fn sound_speed_is_isentropic_slope(kind in kind(), fr in 0.0..1.0f64, ft in 0.0..1.0f64) {
        let eos = kind.build(&co2());
        let s = state(kind, fr, ft);
        let sigma = specific_entropy(&eos, s).unwrap();
        // Pressure along the isentrope through s: solve sigma(rho, T) = sigma by Newton in T.
        let p_at = |rho: f64| {
            let mut t = s.temperature;
            for _ in 0..50 {
                let d = eos.derivatives(ThermoState::new(rho, t)).unwrap();
                let step = (-d.a_t - sigma) / (-d.a_tt);
                t -= step;
                if step.abs() < 1e-15 * t {
                    break;
                }
            }
            pressure(&eos, ThermoState::new(rho, t)).unwrap()
        };
        let h = 1e-5 * s.rho;
        let c2_fd = (p_at(s.rho + h) - p_at(s.rho - h)) / (2.0 * h);
        let c = speed_of_sound(&eos, s).unwrap();
        prop_assert!((c * c - c2_fd).abs() <= 1e-5 * c * c, "{} {}", c * c, c2_fd);
    }

    #[test]
    fn entropy_and_kinetic_gradients_are_directional_derivatives(
        kind in kind(), fr in 0.0..1.0f64, ft in 0.0..1.0f64,
        v in prop::array::uniform3(-100.0..100.0f64),
        dir in prop::array::uniform5(-1.0..1.0f64),
    ) {
        let eos = kind.build(&co2());
        let s = state(kind, fr, ft);
        let e = internal_energy(&eos, s).unwrap();
        let u = ConservedState::<3>::from_primitive(s.rho, v, e);
        let scale = [u.rho, u.rho * 100.0, u.rho * 100.0, u.rho * 100.0, u.energy];
        let du = ConservedState::<3>::new(
            1e-6 * dir[0] * scale[0],
            [1e-6 * dir[1] * scale[1], 1e-6 * dir[2] * scale[2], 1e-6 * dir[3] * scale[3]],
            1e-6 * dir[4] * scale[4],
        );
        let s_of = |x: &ConservedState<3>| entropy_density(&eos, x, Some(s.temperature)).unwrap();
        let k_of = |x: &ConservedState<3>| x.kinetic_energy();
        let (up, down) = (u + du, u + (-1.0) * du);
        let eta = entropy_variables(&eos, &u, Some(s.temperature)).unwrap();
        let fd_s = (s_of(&up) - s_of(&down)) / 2.0;
        let ds = eta.dot(&du);
        prop_assert!((ds - fd_s).abs() <= 1e-6 * ds.abs().max(1e-9 * s_of(&u).abs()), "{ds} {fd_s}");
        let kappa = ke_gradient(&u);
        let fd_k = (k_of(&up) - k_of(&down)) / 2.0;
        let dk = kappa.dot(&du);
        prop_assert!((dk - fd_k).abs() <= 1e-7 * dk.abs().max(1e-9 * u.energy), "{dk} {fd_k}");
    }
}

#[test]
fn zero_velocity_gradients() {
    let eos = EosKind::PengRobinson.build(&co2());
    let s = ThermoState::new(300.0, 400.0);
    let u = ConservedState::<2>::from_primitive(s.rho, [0.0, 0.0], internal_energy(&eos, s).unwrap());
    let eta = entropy_variables(&eos, &u, None).unwrap();
    assert_eq!(eta.momentum, [0.0, 0.0]);
    assert_relative_eq!(eta.energy, -1.0 / 400.0, max_relative = 1e-10);
    let kappa = ke_gradient(&u);
    assert_eq!(kappa.iter().collect::<Vec<_>>(), vec![0.0; 4]);
}
