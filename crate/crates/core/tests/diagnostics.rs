use keepdg::cases::inviscid_tgv_case;
use keepdg::diagnostics::{
    conservation_error, conservation_errors, discrete_balance_residual, dkdt_postprocess, field_errors_vs_exact,
    fit_rate, format_sig17, integrals, ke_budget, ke_rate, semi_discrete_production, vorticity_magnitude, DiagnosticsError,
    TimeSeries,
};
use keepdg::discrete_gradient::DgChoice;
use keepdg::eos::{internal_energy, EosKind, Material, ThermoState};
use keepdg::flux::{ConservedState, Entropy, KeepDg, KineticEnergy, Primitives, StateVector};
use keepdg::reduce::Reduction;
use keepdg::solver::{Grid, SemiDiscretization, Transport};
use proptest::prelude::*;

fn primitives<const D: usize>(eos: &keepdg::eos::Eos, states: &[ConservedState<D>], t: &[f64]) -> Vec<Primitives<D>> {
    states
        .iter()
        .zip(t)
        .map(|(u, t)| Primitives::from_conserved(eos, u, Some(*t)).unwrap())
        .collect()
}

#[test]
fn derivative_of_sine() {
    let t: Vec<f64> = (0..101).map(|i| 0.05 * i as f64).collect();
    let k: Vec<f64> = t.iter().map(|x| x.sin()).collect();
    let d = dkdt_postprocess(&t, &k).unwrap();
    for s in d.iter().filter(|s| !s.reduced()) {
        assert!((s.value - s.t.cos()).abs() <= 1e-12, "{} {}", s.t, s.value);
    }
    let orders: Vec<usize> = d.iter().take(5).map(|s| s.order).collect();
    assert_eq!(orders, vec![2, 2, 4, 6, 8]);
    assert_eq!(d.last().unwrap().order, 2);
}

#[test]
fn derivative_of_constant_is_zero() {
    let t: Vec<f64> = (0..12).map(|i| i as f64).collect();
    let d = dkdt_postprocess(&t, &[3.25; 12]).unwrap();
    assert!(d.iter().all(|s| s.value == 0.0));
}

#[test]
fn derivative_rejects_bad_input() {
    let t: Vec<f64> = (0..12).map(|i| i as f64).collect();
    assert!(matches!(dkdt_postprocess(&t[..8], &[0.0; 8]), Err(DiagnosticsError::InsufficientSamples { .. })));
    assert!(matches!(dkdt_postprocess(&t, &[0.0; 11]), Err(DiagnosticsError::LengthMismatch(12, 11))));
    let mut bad = t.clone();
    bad[5] = bad[4];
    assert!(matches!(dkdt_postprocess(&bad, &[0.0; 12]), Err(DiagnosticsError::NonIncreasingTime { .. })));
}

#[test]
fn rate_fit_of_noisy_second_order_data() {
    let h = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];
    let e: Vec<f64> = h.iter().zip([1.02, 0.99, 1.01, 1.0]).map(|(x, n)| 5.0 * x * x * n).collect();
    let fit = fit_rate(&h, &e).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.02, "{}", fit.slope);
    assert!(fit.r_squared > 0.999 && fit.r_squared < 1.0);
    assert!(fit_rate(&h[..1], &e[..1]).is_err());
    assert!(fit_rate(&h, &e[..3]).is_err());
}

#[test]
fn field_errors_are_relative_max_norms() {
    let exact = vec![ConservedState::<2>::new(2.0, [4.0, -8.0], 10.0); 3];
    let mut num = exact.clone();
    num[1].rho += 0.02;
    num[2].momentum[1] += 0.8;
    let e = field_errors_vs_exact(&num, &exact).unwrap();
    assert!((e.rho - 0.01).abs() < 1e-15 && (e.momentum - 0.1).abs() < 1e-15 && e.energy == 0.0);
    assert!(field_errors_vs_exact(&num[..2], &exact).is_err());
}

#[test]
fn conservation_errors_from_series() {
    let mut s = TimeSeries::new(["S_h", "K_h"]);
    s.push(0.0, vec![-4.0, 0.0]).unwrap();
    s.push(1.0, vec![-4.0 * (1.0 + 1e-9), 2e-7]).unwrap();
    let rows = conservation_errors(&s).unwrap();
    let (t, es, ek) = rows[1];
    assert_eq!(t, 1.0);
    assert!((es.value - 1e-9).abs() < 1e-15 && !es.absolute);
    assert!(ek.absolute && ek.value == 2e-7);
    assert_eq!(conservation_error(2.0, 1.0).value, 0.5);
}

#[test]
fn seventeen_significant_digits() {
    assert_eq!(format_sig17(0.1), "1.0000000000000001e-1");
    assert_eq!(format_sig17(-2.5e10).parse::<f64>().unwrap(), -2.5e10);
    let mut s = TimeSeries::new(["x"]);
    s.push(0.0, vec![std::f64::consts::PI]).unwrap();
    assert_eq!(s.to_csv(), "t,x\n0.0000000000000000e0,3.1415926535897931e0\n");
}

#[test]
fn integrals_of_uniform_flow() {
    let eos = EosKind::VanDerWaals.build(&Material::co2());
    let grid = Grid::<2>::cube(5, 0.0, 2.0).unwrap();
    let e = internal_energy(&eos, ThermoState::new(300.0, 400.0)).unwrap();
    let u = ConservedState::from_primitive(300.0, [3.0, 4.0], e);
    let states = vec![u; grid.len()];
    let prims = primitives(&eos, &states, &vec![400.0; grid.len()]);
    let i = integrals(&grid, &states, &prims, &Reduction::default());
    assert!((i.kinetic_energy - 0.5 * 300.0 * 25.0 * 4.0).abs() < 1e-9);
    assert!((i.conserved.rho - 1200.0).abs() < 1e-9);
    assert!((i.entropy - prims[0].entropy_density() * 4.0).abs() <= 1e-13 * i.entropy.abs());
}

#[test]
fn taylor_green_initial_budget() {
    let case = inviscid_tgv_case(Material::co2()).unwrap();
    let n = 16;
    let field = case.tgv_field(n).unwrap();
    let prims = primitives(&case.eos, &field.states, &field.temperature);
    let mu = 1e-4;
    let b = ke_budget(&field.grid, &prims, Transport::new(mu, 0.0).unwrap(), &Reduction::default());
    let v0 = case.scales.velocity;
    // Centred differences scale each trigonometric derivative by sin(h)/h.
    let h = field.grid.dx()[0];
    let s = h.sin() / h;
    let volume = (2.0 * std::f64::consts::PI).powi(3);
    let expected = mu * 0.75 * v0 * v0 * s * s * volume;
    assert!((b.enstrophy - expected).abs() <= 1e-12 * expected, "{} {}", b.enstrophy, expected);
    assert!(b.dilatational <= 1e-20 * expected);
    assert!(b.pi.abs() <= 1e-9 * case.scales.pressure * v0 * volume, "{}", b.pi);

    let w = vorticity_magnitude(&field.grid, &prims, case.scales.length, v0);
    let max = w.iter().copied().fold(0.0, f64::max);
    assert!(max <= 2.0 * s + 1e-12 && max > 1.5, "{max}");
}

#[test]
fn uniform_flow_has_no_vorticity() {
    let eos = EosKind::IdealGas.build(&Material::co2());
    let grid = Grid::<3>::cube(4, 0.0, 1.0).unwrap();
    let p = Primitives::<3>::from_thermo(&eos, ThermoState::new(10.0, 300.0), [1.0, 2.0, 3.0]).unwrap();
    let prims = vec![p; grid.len()];
    assert!(vorticity_magnitude(&grid, &prims, 1.0, 1.0).iter().all(|w| *w == 0.0));
}

fn taylor_green_viscous_gap(n: usize) -> (f64, f64) {
    let case = inviscid_tgv_case(Material::co2()).unwrap();
    let mut field = case.tgv_field(n).unwrap();
    let transport = Transport::new(1e-4, 0.0).unwrap();
    let mut disc = SemiDiscretization::new(field.grid.clone(), case.eos, KeepDg::new(DgChoice::siadg(true)), None);
    disc.update_primitives(&field.states, &mut field.temperature).unwrap();
    let mut r = vec![StateVector::ZERO; field.grid.len()];
    disc.viscous_rhs(transport, &mut r);
    let red = Reduction::default();
    let rate = ke_rate(disc.primitives(), &r, field.grid.cell_volume(), &red).unwrap();
    let b = ke_budget(&field.grid, disc.primitives(), transport, &red);
    let sink = b.dilatational + b.enstrophy;
    assert!(rate < 0.0);
    assert!(ke_rate(disc.primitives(), &r[1..], 1.0, &red).is_err());
    ((rate + sink).abs() / sink, field.grid.dx()[0])
}

#[test]
fn viscous_ke_rate_matches_budget_to_second_order() {
    let (coarse, _) = taylor_green_viscous_gap(16);
    let (fine, h) = taylor_green_viscous_gap(32);
    assert!(fine <= h * h, "{fine} {h}");
    let order = (coarse / fine).log2();
    assert!((1.8..=2.2).contains(&order), "{order}");
}

#[test]
fn odd_even_shear_is_invisible_to_centred_enstrophy() {
    let eos = EosKind::IdealGas.build(&Material::co2());
    let grid = Grid::<3>::cube(8, 0.0, 1.0).unwrap();
    let e = internal_energy(&eos, ThermoState::new(10.0, 300.0)).unwrap();
    let states: Vec<ConservedState<3>> = (0..grid.len())
        .map(|i| {
            let u = if grid.coords(i)[1] % 2 == 0 { 1.0 } else { -1.0 };
            ConservedState::from_primitive(10.0, [u, 0.0, 0.0], e)
        })
        .collect();
    let mut temps = vec![300.0; grid.len()];
    let transport = Transport::new(1e-3, 0.0).unwrap();
    let mut disc = SemiDiscretization::new(grid.clone(), eos, KeepDg::new(DgChoice::gonzalez()), None);
    disc.update_primitives(&states, &mut temps).unwrap();
    let mut r = vec![StateVector::ZERO; grid.len()];
    disc.viscous_rhs(transport, &mut r);
    let red = Reduction::default();
    let b = ke_budget(&grid, disc.primitives(), transport, &red);
    assert_eq!(b.enstrophy, 0.0);
    // Two-point shear of 2/dy on every y-face, stress mu * 2/dy.
    let dy = grid.dx()[1];
    let expected = -1e-3 * (2.0 / dy) * (2.0 / dy) * grid.len() as f64 * grid.cell_volume();
    let rate = ke_rate(disc.primitives(), &r, grid.cell_volume(), &red).unwrap();
    assert!((rate - expected).abs() <= 1e-12 * expected.abs(), "{rate} {expected}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn balance_residuals_vanish(
        kind in prop_oneof![Just(EosKind::IdealGas), Just(EosKind::VanDerWaals), Just(EosKind::PengRobinson)],
        choice in prop_oneof![Just(DgChoice::siadg(true)), Just(DgChoice::gonzalez())],
        seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 36),
    ) {
        let m = Material::co2();
        let eos = kind.build(&m);
        let grid = Grid::<2>::cube(6, 0.0, 1.0).unwrap();
        let (states, mut temps): (Vec<_>, Vec<_>) = seed
            .iter()
            .map(|&(a, b, c, d)| {
                let rho = m.critical_density * (1.0 + 0.5 * a);
                let t = m.critical_temperature * (1.5 + 0.3 * b);
                let e = internal_energy(&eos, ThermoState::new(rho, t)).unwrap();
                (ConservedState::from_primitive(rho, [50.0 * c, 50.0 * d], e), t)
            })
            .unzip();
        let mut disc = SemiDiscretization::new(grid, eos, KeepDg::new(choice), None);
        let s = discrete_balance_residual(&mut disc, &states, &mut temps, &Entropy).unwrap();
        prop_assert!(s.max_relative() <= 1e-12, "entropy {:e}", s.max_relative());
        let k = discrete_balance_residual(&mut disc, &states, &mut temps, &KineticEnergy).unwrap();
        prop_assert!(k.max_relative() <= 1e-12, "kinetic {:e}", k.max_relative());
        let total = semi_discrete_production(&mut disc, &states, &mut temps, &Entropy, &Reduction::default()).unwrap();
        let scale: f64 = s.scale.iter().sum::<f64>() * disc.grid.cell_volume();
        prop_assert!(total.abs() <= 1e-12 * scale, "{total:e} {scale:e}");
    }

    #[test]
    fn euler_ke_rate_is_centred_pressure_dilatation(
        kind in prop_oneof![Just(EosKind::IdealGas), Just(EosKind::VanDerWaals), Just(EosKind::PengRobinson)],
        seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 64),
    ) {
        let m = Material::co2();
        let eos = kind.build(&m);
        let grid = Grid::<3>::cube(4, 0.0, 1.0).unwrap();
        let (states, mut temps): (Vec<_>, Vec<_>) = seed
            .iter()
            .map(|&(a, b, c, d, f)| {
                let rho = m.critical_density * (1.0 + 0.5 * a);
                let t = m.critical_temperature * (1.5 + 0.3 * b);
                let e = internal_energy(&eos, ThermoState::new(rho, t)).unwrap();
                (ConservedState::from_primitive(rho, [50.0 * c, 50.0 * d, 50.0 * f], e), t)
            })
            .unzip();
        let mut disc = SemiDiscretization::new(grid.clone(), eos, KeepDg::new(DgChoice::siadg(true)), None);
        disc.update_primitives(&states, &mut temps).unwrap();
        let mut r = vec![StateVector::ZERO; grid.len()];
        disc.euler_rhs(&mut r).unwrap();
        let red = Reduction::default();
        let rate = ke_rate(disc.primitives(), &r, grid.cell_volume(), &red).unwrap();
        let pi = ke_budget(&grid, disc.primitives(), Transport::new(0.0, 0.0).unwrap(), &red).pi;
        let scale: f64 = disc.primitives().iter().map(|p| p.pressure * 100.0 / grid.dx()[0]).sum::<f64>() * grid.cell_volume();
        prop_assert!((rate - pi).abs() <= 1e-13 * scale, "{rate:e} {pi:e} {scale:e}");
    }
}
