use keepdg::discrete_gradient::DgChoice;
use keepdg::eos::{EosKind, HelmholtzEos, IdealGas, Material, ThermoState};
use keepdg::flux::{
    central_flux, density_mean, euler_flux, euler_flux_from_primitives, generalized_tadmor_residual,
    internal_energy_mean, ke_work_term, numerical_entropy_flux, numerical_ke_flux, tadmor_residual, Entropy,
    KeepDg, KineticEnergy, MeanPair, Primitives, ResidualScale, StateVector,
};
use proptest::prelude::*;

fn co2() -> Material {
    Material::co2()
}

fn kind() -> impl Strategy<Value = EosKind> {
    prop_oneof![Just(EosKind::IdealGas), Just(EosKind::VanDerWaals), Just(EosKind::PengRobinson)]
}

fn choice() -> impl Strategy<Value = DgChoice> {
    prop_oneof![Just(DgChoice::siadg(true)), Just(DgChoice::gonzalez()), Just(DgChoice::mvdg(10))]
}

/// A state in the supercritical box with velocity of order the sound speed.
fn prim(kind: EosKind) -> impl Strategy<Value = Primitives<3>> {
    (0.0..1.0f64, 0.0..1.0f64, prop::array::uniform3(-300.0..300.0f64)).prop_map(move |(fr, ft, v)| {
        let m = co2();
        let (rc, tc) = (m.critical_density, m.critical_temperature);
        let s = match kind {
            EosKind::IdealGas => ThermoState::new(rc * (0.05 + 1.95 * fr), 150.0 + 1350.0 * ft),
            _ => ThermoState::new(rc * (0.2 + 1.8 * fr), tc * (1.05 + 0.95 * ft)),
        };
        Primitives::from_thermo(&kind.build(&m), s, v).unwrap()
    })
}

fn pair() -> impl Strategy<Value = (EosKind, Primitives<3>, Primitives<3>)> {
    kind().prop_flat_map(|k| (Just(k), prim(k), prim(k)))
}

/// Logarithmic mean by direct evaluation with a series near `a = b`.
fn ln_mean(a: f64, b: f64) -> f64 {
    let z = (a - b) / (a + b);
    let u = z * z;
    if u < 1e-4 {
        (a + b) / (2.0 * (1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0))
    } else {
        (a - b) / (a.ln() - b.ln())
    }
}

/// Ranocha's entropy conservative and kinetic energy preserving ideal gas flux.
fn ranocha(gamma: f64, l: &Primitives<3>, r: &Primitives<3>, axis: usize) -> [f64; 5] {
    let v = |k: usize| 0.5 * (l.velocity[k] + r.velocity[k]);
    let f_rho = ln_mean(l.rho, r.rho) * v(axis);
    let p_bar = 0.5 * (l.pressure + r.pressure);
    let mut f = [f_rho, f_rho * v(0), f_rho * v(1), f_rho * v(2), 0.0];
    f[1 + axis] += p_bar;
    let vlvr: f64 = (0..3).map(|k| l.velocity[k] * r.velocity[k]).sum();
    let rho_over_p = ln_mean(l.rho / l.pressure, r.rho / r.pressure);
    f[4] = f_rho * (1.0 / ((gamma - 1.0) * rho_over_p) + 0.5 * vlvr)
        + 0.5 * (l.pressure * r.velocity[axis] + r.pressure * l.velocity[axis]);
    f
}

/// Residual over its round-off scale; a zero scale means every term vanished.
fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual.abs() / scale
    } else {
        residual.abs()
    }
}

#[test]
fn euler_flux_at_rest_is_pressure() {
    let eos = EosKind::PengRobinson.build(&co2());
    let p = Primitives::<3>::from_thermo(&eos, ThermoState::new(400.0, 350.0), [0.0; 3]).unwrap();
    for axis in 0..3 {
        let f = euler_flux_from_primitives(&p, axis).value;
        let mut expected = StateVector::<3>::ZERO;
        expected.momentum[axis] = p.pressure;
        assert_eq!(f, expected);
    }
}

#[test]
fn moving_unit_ideal_gas_flux() {
    let eos = IdealGas::new(1.0, 1.4);
    let u = StateVector::<3>::from_primitive(1.0, [1.0, 0.0, 0.0], 2.5);
    let f = euler_flux(&eos, &u, 0).unwrap().value;
    for (a, b) in f.iter().zip([1.0, 2.0, 0.0, 0.0, u.energy + 1.0]) {
        assert!((a - b).abs() < 1e-15, "{a} {b}");
    }
}

#[test]
fn ideal_gas_density_mean_is_logarithmic() {
    let eos = IdealGas::new(1.0, 1.4);
    let (l, r) = (ThermoState::new(1.0, 1.0), ThermoState::new(std::f64::consts::E, 1.0));
    let m = density_mean(&eos, DgChoice::siadg(true), l, r).unwrap();
    assert!((m - (std::f64::consts::E - 1.0)).abs() < 1e-15, "{m}");
}

#[test]
fn ideal_gas_energy_mean_is_reciprocal_log_mean_of_beta() {
    let (r_gas, gamma) = (188.9, 1.3);
    let eos = IdealGas::new(r_gas, gamma);
    let (l, r) = (ThermoState::new(20.0, 300.0), ThermoState::new(35.0, 800.0));
    let e = internal_energy_mean(&eos, DgChoice::siadg(true), l, r).unwrap();
    let expected = r_gas / (gamma - 1.0) / ln_mean(1.0 / 300.0, 1.0 / 800.0);
    assert!((e - expected).abs() <= 1e-14 * expected, "{e} {expected}");
}

#[test]
fn central_flux_produces_entropy() {
    let eos = EosKind::VanDerWaals.build(&co2());
    let l = Primitives::<3>::from_thermo(&eos, ThermoState::new(300.0, 350.0), [10.0, 0.0, 0.0]).unwrap();
    let r = Primitives::<3>::from_thermo(&eos, ThermoState::new(600.0, 420.0), [-20.0, 5.0, 0.0]).unwrap();
    let f = central_flux(&eos, &l.conserved(), &r.conserved(), 0).unwrap();
    let rel = tadmor_residual(&f, &l, &r).abs() / Entropy.residual_scale(&f, &l, &r);
    assert!(rel > 1e-6, "{rel}");
}

#[test]
fn mean_pair_product_rule() {
    let (a, b) = (MeanPair::new(1.3, -0.4), MeanPair::new(2.2, 5.1));
    let ab = a.product(&b);
    assert!((ab.delta() - (a.bar() * b.delta() + b.bar() * a.delta())).abs() < 1e-14);
    assert_eq!(a.swap().delta(), -a.delta());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn consistent_with_physical_flux(kind in kind(), choice in choice(), p in prim(EosKind::PengRobinson), axis in 0..3usize) {
        let eos = kind.build(&co2());
        let p = Primitives::from_thermo(&eos, p.thermo(), p.velocity).unwrap();
        let f = KeepDg::new(choice).flux(&eos, &p, &p, axis).unwrap().value;
        let exact = euler_flux_from_primitives(&p, axis).value;
        let scale = exact.max_abs();
        for (a, b) in f.iter().zip(exact.iter()) {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{a} {b}");
        }
    }

    #[test]
    fn swapping_states_is_symmetric((kind, l, r) in pair(), choice in choice(), axis in 0..3usize) {
        let eos = kind.build(&co2());
        let flux = KeepDg::new(choice);
        let a = flux.flux(&eos, &l, &r, axis).unwrap().value;
        let b = flux.flux(&eos, &r, &l, axis).unwrap().value;
        let scale = a.max_abs();
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert!((x - y).abs() <= 1e-14 * scale, "{x} {y}");
        }
    }

    #[test]
    fn entropy_and_kinetic_energy_conditions((kind, l, r) in pair(), choice in choice(), axis in 0..3usize) {
        let eos = kind.build(&co2());
        let f = KeepDg::new(choice).flux(&eos, &l, &r, axis).unwrap();
        let s = relative(tadmor_residual(&f, &l, &r), Entropy.residual_scale(&f, &l, &r));
        if choice != DgChoice::mvdg(10) {
            prop_assert!(s <= 1e-12, "entropy {s:e}");
        }
        let k = relative(
            generalized_tadmor_residual(&KineticEnergy, &f, &l, &r),
            KineticEnergy.residual_scale(&f, &l, &r),
        );
        prop_assert!(k <= 1e-12, "kinetic {k:e}");
        prop_assert_eq!(generalized_tadmor_residual(&Entropy, &f, &l, &r), tadmor_residual(&f, &l, &r));
    }

    #[test]
    fn mean_value_gradient_on_nearby_states(
        kind in kind(), l in prim(EosKind::PengRobinson), dr in -0.05..0.05f64, dt in -0.05..0.05f64, axis in 0..3usize,
    ) {
        let eos = kind.build(&co2());
        let l = Primitives::from_thermo(&eos, l.thermo(), l.velocity).unwrap();
        let near = ThermoState::new(l.rho * (1.0 + dr), l.temperature * (1.0 + dt));
        let r = Primitives::from_thermo(&eos, near, l.velocity.map(|v| 0.9 * v)).unwrap();
        let f = KeepDg::new(DgChoice::mvdg(10)).flux(&eos, &l, &r, axis).unwrap();
        let s = relative(tadmor_residual(&f, &l, &r), Entropy.residual_scale(&f, &l, &r));
        prop_assert!(s <= 1e-12, "entropy {s:e}");
    }

    #[test]
    fn ideal_gas_matches_reference_flux(l in prim(EosKind::IdealGas), r in prim(EosKind::IdealGas), axis in 0..3usize) {
        let m = co2();
        let eos = IdealGas::from_material(&m);
        let f = KeepDg::new(DgChoice::siadg(true)).flux(&eos, &l, &r, axis).unwrap().value;
        let oracle = ranocha(m.gamma, &l, &r, axis);
        let scale = oracle.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        for (a, b) in f.iter().zip(oracle) {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{a} {b}");
        }
    }

    #[test]
    fn work_term_is_antisymmetric((_, l, r) in pair(), axis in 0..3usize) {
        prop_assert_eq!(ke_work_term(&l, &r, axis), -ke_work_term(&r, &l, axis));
    }

    #[test]
    fn secondary_fluxes_are_consistent(kind in kind(), p in prim(EosKind::PengRobinson), axis in 0..3usize) {
        let eos = kind.build(&co2());
        let p = Primitives::from_thermo(&eos, p.thermo(), p.velocity).unwrap();
        let f = euler_flux_from_primitives(&p, axis);
        let s = numerical_entropy_flux(&f, &p, &p);
        let s_exact = p.entropy_density() * p.velocity[axis];
        prop_assert!((s - s_exact).abs() <= 1e-12 * Entropy.residual_scale(&f, &p, &p), "{s} {s_exact}");
        let k = numerical_ke_flux(&f, &p, &p);
        let k_exact = p.kinetic_energy_density() * p.velocity[axis];
        prop_assert!((k - k_exact).abs() <= 1e-12 * KineticEnergy.residual_scale(&f, &p, &p), "{k} {k_exact}");
    }
}

#[test]
fn eos_trait_objects_agree() {
    let m = co2();
    let s = ThermoState::new(250.0, 400.0);
    for kind in EosKind::ALL {
        let eos = kind.build(&m);
        let direct: Box<dyn Fn(ThermoState) -> f64> = match kind {
            EosKind::IdealGas => {
                let e = IdealGas::from_material(&m);
                Box::new(move |s| e.derivatives(s).unwrap().a)
            }
            _ => Box::new(|s| eos.derivatives(s).unwrap().a),
        };
        assert_eq!(direct(s), eos.derivatives(s).unwrap().a);
    }
}
