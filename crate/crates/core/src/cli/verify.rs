//! Executable invariant suites behind `keepdg verify <suite>`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cases::density_wave_case;
use crate::diagnostics::{
    discrete_balance_residual, field_errors_vs_exact, fit_rate, semi_discrete_production, FieldErrors,
    RateFit,
};
use crate::discrete_gradient::{DgChoice, DgKind, DiscreteGradient, Field2, Point2};
use crate::eos::{
    analytic_gradients_pbeta_gbeta, density_from_pressure, internal_energy, pressure, specific_entropy,
    speed_of_sound, temperature_from_internal_energy, Eos, EosError, EosKind, HelmholtzEos, Material,
    ThermoState,
};
use crate::flux::{
    central_flux, generalized_tadmor_residual, tadmor_residual, weak_null_consistency_probe, Entropy,
    FluxVector, KeepDg, KineticEnergy, Primitives, ResidualScale, SecondaryStructure, StateVector,
};
use crate::reduce::Reduction;
use crate::sampling::{random_pair, random_smooth_field, random_state, StateBox};
use crate::solver::{Grid, SemiDiscretization, SolverError};

use super::config::StepControl;
use super::run::{RunError, Simulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Eos,
    Dg,
    Flux,
    Balance,
    Convergence,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Eos, Suite::Dg, Suite::Flux, Suite::Balance, Suite::Convergence];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Eos => "eos",
            Suite::Dg => "dg",
            Suite::Flux => "flux",
            Suite::Balance => "balance",
            Suite::Convergence => "convergence",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite '{s}'; valid names: eos, dg, flux, balance, convergence"))
    }
}

/// How a measured value is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn admits(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost(t) => x <= t,
            Bound::AtLeast(t) => x >= t,
            Bound::Within(lo, hi) => (lo..=hi).contains(&x),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(t) => write!(f, "<= {t:e}"),
            Bound::AtLeast(t) => write!(f, ">= {t:e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        self.bound.admits(self.measured)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {:.3e} ({})", self.name, self.measured, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    /// Informational lines that are not judged.
    pub notes: Vec<String>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        for n in &self.notes {
            writeln!(f, "  {n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub material: Material,
    /// Cells per axis of the random fields in the balance suite.
    pub field_cells: usize,
    pub fields: usize,
    pub meshes: Vec<usize>,
    pub cfl: f64,
    /// Final time of the convergence study, seconds.
    pub t_final: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 2024,
            material: Material::co2(),
            field_cells: 8,
            fields: 10,
            meshes: vec![33, 65, 129, 257],
            cfl: 0.01,
            t_final: 0.5,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Flux(#[from] crate::flux::FluxError),
    #[error(transparent)]
    Diagnostics(#[from] crate::diagnostics::DiagnosticsError),
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Report, VerifyError> {
    match suite {
        Suite::Eos => eos_suite(opts),
        Suite::Dg => dg_suite(opts),
        Suite::Flux => flux_suite(opts),
        Suite::Balance => balance_suite(opts),
        Suite::Convergence => convergence_suite(opts),
    }
}

fn rng(opts: &VerifyOptions, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Specific entropy fixed, temperature at a new density.
fn isentropic_temperature<E: HelmholtzEos + ?Sized>(
    eos: &E,
    rho: f64,
    sigma: f64,
    guess: f64,
) -> Result<f64, EosError> {
    let mut t = guess;
    for _ in 0..50 {
        let s = ThermoState::new(rho, t);
        let d = eos.derivatives(s)?;
        let step = (d.entropy() - sigma) / (-d.a_tt);
        t -= step;
        if step.abs() <= 1e-15 * t {
            break;
        }
    }
    Ok(t)
}

fn eos_suite(opts: &VerifyOptions) -> Result<Report, VerifyError> {
    let mut report = Report::default();
    let n = (opts.samples / 10).max(100);
    for kind in EosKind::ALL {
        let eos = kind.build(&opts.material);
        let b = StateBox::for_eos(kind, &opts.material);
        let mut rng = rng(opts, kind as u64 + 1);
        let (mut fd, mut t_round, mut rho_round, mut c2, mut beta_fd) = (0f64, 0f64, 0f64, 0f64, 0f64);
        for _ in 0..n {
            let p: Primitives<1> = random_state(&eos, &b, &mut rng)?;
            let s = p.thermo();
            let d = eos.derivatives(s)?;
            let (hr, ht) = (1e-5 * s.rho, 1e-5 * s.temperature);
            let at = |r: f64, t: f64| eos.derivatives(ThermoState::new(r, t));
            let (rp, rm) = (at(s.rho + hr, s.temperature)?, at(s.rho - hr, s.temperature)?);
            let (tp, tm) = (at(s.rho, s.temperature + ht)?, at(s.rho, s.temperature - ht)?);
            let pairs = [
                (d.a_rho, (rp.a - rm.a) / (2.0 * hr)),
                (d.a_t, (tp.a - tm.a) / (2.0 * ht)),
                (d.a_rhorho, (rp.a_rho - rm.a_rho) / (2.0 * hr)),
                (d.a_tt, (tp.a_t - tm.a_t) / (2.0 * ht)),
                (d.a_rhot, (tp.a_rho - tm.a_rho) / (2.0 * ht)),
            ];
            for (exact, approx) in pairs {
                fd = fd.max((exact - approx).abs() / exact.abs().max(1e-300));
            }

            let e = internal_energy(&eos, s)?;
            let t = temperature_from_internal_energy(&eos, s.rho, e, None)?;
            t_round = t_round.max(rel(t, s.temperature));
            let pr = pressure(&eos, s)?;
            let r = density_from_pressure(&eos, s.temperature, pr, None)?;
            rho_round = rho_round.max(rel(r, s.rho));

            let sigma = specific_entropy(&eos, s)?;
            let h = 1e-5 * s.rho;
            let tp = isentropic_temperature(&eos, s.rho + h, sigma, s.temperature)?;
            let tm = isentropic_temperature(&eos, s.rho - h, sigma, s.temperature)?;
            let dp = pressure(&eos, ThermoState::new(s.rho + h, tp))? - pressure(&eos, ThermoState::new(s.rho - h, tm))?;
            let c = speed_of_sound(&eos, s)?;
            c2 = c2.max(rel(dp / (2.0 * h), c * c));

            let g = analytic_gradients_pbeta_gbeta(&eos, s)?;
            let field = crate::flux::PressureGibbsField { eos: &eos };
            let pt = Point2::new(s.rho, s.beta());
            let (hb, hr) = (1e-5 * pt.y, 1e-5 * pt.x);
            let v = |x: f64, y: f64| field.value(Point2::new(x, y));
            let (xp, xm) = (v(pt.x + hr, pt.y)?, v(pt.x - hr, pt.y)?);
            let (yp, ym) = (v(pt.x, pt.y + hb)?, v(pt.x, pt.y - hb)?);
            for (k, exact) in [g.p_beta, g.g_beta].iter().enumerate() {
                let approx = [(xp[k] - xm[k]) / (2.0 * hr), (yp[k] - ym[k]) / (2.0 * hb)];
                let norm = exact[0].abs() * pt.x + exact[1].abs() * pt.y;
                for j in 0..2 {
                    let scale = [pt.x, pt.y][j];
                    beta_fd = beta_fd.max((exact[j] - approx[j]).abs() * scale / norm.max(1e-300));
                }
            }
        }
        let tag = kind.as_str();
        report.push(Check::new(format!("{tag}: Helmholtz derivatives vs central differences"), fd, Bound::AtMost(1e-6)));
        report.push(Check::new(format!("{tag}: T(rho, e(rho, T)) round trip"), t_round, Bound::AtMost(1e-10)));
        report.push(Check::new(format!("{tag}: rho(T, p(rho, T)) round trip"), rho_round, Bound::AtMost(1e-10)));
        report.push(Check::new(format!("{tag}: c^2 vs isentropic difference quotient"), c2, Bound::AtMost(1e-6)));
        report.push(Check::new(format!("{tag}: (rho, beta) gradients of p/T, g/T vs differences"), beta_fd, Bound::AtMost(1e-6)));
    }
    Ok(report)
}

/// Scalar test field over the plane with its analytic gradient.
type Scalar = Box<dyn Fn(Point2) -> Result<(f64, [f64; 2]), EosError> + Sync>;

type Jump = Box<dyn Fn(Point2, Point2) -> Option<f64> + Sync>;

struct ScalarField(Scalar, Option<Jump>);

impl Field2<1> for ScalarField {
    type Error = EosError;

    fn value(&self, p: Point2) -> Result<[f64; 1], EosError> {
        Ok([(self.0)(p)?.0])
    }

    fn gradient(&self, p: Point2) -> Result<[[f64; 2]; 1], EosError> {
        Ok([(self.0)(p)?.1])
    }

    fn jump(&self, a: Point2, b: Point2, va: &[f64; 1], vb: &[f64; 1]) -> Result<[f64; 1], EosError> {
        let exact = self.1.as_ref().and_then(|j| j(a, b));
        Ok([exact.unwrap_or(vb[0] - va[0])])
    }
}

/// A named scalar field with a sampler of point pairs in its domain.
struct DgCase {
    name: String,
    field: ScalarField,
    sample: Box<dyn Fn(&mut ChaCha8Rng) -> (Point2, Point2)>,
    unit_segments: bool,
}

fn unit_box_pair(rng: &mut ChaCha8Rng) -> (Point2, Point2) {
    let mut p = || Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let a = p();
    let b = p();
    // Segments no longer than one.
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len = dx.hypot(dy).max(1.0);
    (a, Point2::new(a.x + dx / len, a.y + dy / len))
}

fn dg_cases(material: &Material) -> Vec<DgCase> {
    let mut cases = vec![
        DgCase {
            name: "polynomial".into(),
            field: ScalarField(Box::new(|p: Point2| {
                let (x, y) = (p.x, p.y);
                Ok((
                    x.powi(3) * y - 2.0 * x * y * y + y.powi(4) + 0.5 * x,
                    [3.0 * x * x * y - 2.0 * y * y + 0.5, x.powi(3) - 4.0 * x * y + 4.0 * y.powi(3)],
                ))
            }), None),
            sample: Box::new(unit_box_pair),
            unit_segments: true,
        },
        DgCase {
            name: "exp".into(),
            field: ScalarField(Box::new(|p: Point2| {
                let v = (p.x + 0.5 * p.y).exp();
                Ok((v, [v, 0.5 * v]))
            }), None),
            sample: Box::new(unit_box_pair),
            unit_segments: true,
        },
    ];
    for kind in EosKind::ALL {
        let b = StateBox::for_eos(kind, material);
        for (k, label) in [(0usize, "p/T"), (1, "g/T")] {
            let eos = kind.build(material);
            let f = move |p: Point2| {
                let field = crate::flux::PressureGibbsField { eos: &eos };
                Ok((field.value(p)?[k], field.gradient(p)?[k]))
            };
            let jump = move |a: Point2, b: Point2| eos.beta_potential_jump((a.x, a.y), (b.x, b.y)).map(|j| j[k]);
            let eos2 = kind.build(material);
            cases.push(DgCase {
                name: format!("{} {label}", kind.as_str()),
                field: ScalarField(Box::new(f), Some(Box::new(jump))),
                sample: Box::new(move |rng| {
                    let l: Primitives<1> = random_state(&eos2, &b, rng).expect("sampler");
                    let r: Primitives<1> = random_state(&eos2, &b, rng).expect("sampler");
                    (Point2::new(l.rho, l.beta), Point2::new(r.rho, r.beta))
                }),
                unit_segments: false,
            });
        }
    }
    cases
}

/// Per-operator residuals of the discrete-gradient invariants.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DgResiduals {
    /// Field where the identity residual peaked.
    pub worst_field: String,
    /// `max |<dg, dp> - dg| / max(1, |dg|)` over all fields.
    pub identity: f64,
    /// Same, restricted to segments of length at most one.
    pub identity_unit: f64,
    pub consistency: f64,
    pub symmetry: f64,
    pub order: f64,
}

pub fn dg_residuals(choice: DgChoice, material: &Material, samples: usize, seed: u64) -> Result<DgResiduals, EosError> {
    let dg = DiscreteGradient::new(choice);
    let mut out = DgResiduals::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = dg_cases(material);
    let per_case = samples.div_ceil(cases.len());
    let mut order = f64::INFINITY;
    for case in &cases {
        let f = &case.field;
        for _ in 0..per_case {
            let (a, b) = (case.sample)(&mut rng);
            let g = dg.apply(f, a, b)?[0];
            let delta = f.jump(a, b, &f.value(a)?, &f.value(b)?)?[0];
            let res = (g[0] * (b.x - a.x) + g[1] * (b.y - a.y) - delta).abs() / delta.abs().max(1.0);
            if res > out.identity {
                out.identity = res;
                out.worst_field.clone_from(&case.name);
            }
            if case.unit_segments {
                out.identity_unit = out.identity_unit.max(res);
            }
            let swapped = dg.apply(f, b, a)?[0];
            let norm = 1.0 + g[0].abs().max(g[1].abs());
            out.symmetry = out.symmetry.max((swapped[0] - g[0]).abs().max((swapped[1] - g[1]).abs()) / norm);
            let exact = f.gradient(a)?[0];
            let same = dg.apply(f, a, a)?[0];
            let en = 1.0 + exact[0].hypot(exact[1]);
            out.consistency = out.consistency.max((same[0] - exact[0]).hypot(same[1] - exact[1]) / en);
        }
        // Richardson slope of the centred error at a random point.
        let (p, q) = (case.sample)(&mut rng);
        let dir = Point2::new(q.x - p.x, q.y - p.y);
        let exact = f.gradient(p)?[0];
        let (mut hs, mut errs) = (Vec::new(), Vec::new());
        for j in 0..5 {
            let h = 0.05 / 2f64.powi(j);
            let a = Point2::new(p.x - h * dir.x, p.y - h * dir.y);
            let b = Point2::new(p.x + h * dir.x, p.y + h * dir.y);
            let g = dg.apply(f, a, b)?[0];
            // Error along each coordinate scaled by the step in that coordinate.
            let e = ((g[0] - exact[0]) * dir.x).abs() + ((g[1] - exact[1]) * dir.y).abs();
            hs.push(h);
            errs.push(e);
        }
        let clean = errs.iter().all(|e| *e > 1e-13 * (exact[0] * dir.x).abs().max((exact[1] * dir.y).abs()));
        if clean {
            if let Ok(fit) = fit_rate(&hs, &errs) {
                order = order.min(fit.slope);
            }
        }
    }
    out.order = order;
    Ok(out)
}

fn dg_suite(opts: &VerifyOptions) -> Result<Report, VerifyError> {
    let mut report = Report::default();
    for (choice, tol) in [
        (DgChoice::siadg(true), 1e-13),
        (DgChoice::gonzalez(), 1e-13),
        (DgChoice::mvdg(10), 1e-9),
    ] {
        let r = dg_residuals(choice, &opts.material, opts.samples, opts.seed)?;
        let tag = choice.kind.as_str();
        if choice.kind == DgKind::MeanValue {
            report.push(Check::new(format!("{tag}: identity on unit segments"), r.identity_unit, Bound::AtMost(tol)));
            report.notes.push(format!("{tag}: identity over thermodynamic fields {:.3e} (quadrature error, not judged)", r.identity));
        } else {
            report.push(Check::new(format!("{tag}: identity"), r.identity, Bound::AtMost(tol)));
            report.notes.push(format!("{tag}: identity residual peaks on the {} field", r.worst_field));
            report.push(Check::new(format!("{tag}: swap symmetry"), r.symmetry, Bound::AtMost(1e-15)));
        }
        report.push(Check::new(format!("{tag}: consistency at coincident points"), r.consistency, Bound::AtMost(1e-12)));
        report.push(Check::new(format!("{tag}: minimum observed order"), r.order, Bound::Within(1.8, 2.2)));
    }
    Ok(report)
}

/// Maximum relative face residuals over fuzzed pairs for one EoS.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FluxResiduals {
    pub tadmor: f64,
    pub generalized_tadmor: f64,
    pub consistency: f64,
    pub symmetry: f64,
    pub min_density_mean_ratio: f64,
    pub central_tadmor: f64,
    pub wrong_work: f64,
}

/// Kinetic energy with the work term dropped, a negative control.
pub struct KineticEnergyWithoutWork;

impl<const D: usize> SecondaryStructure<D> for KineticEnergyWithoutWork {
    fn name(&self) -> &'static str {
        "kinetic energy without work"
    }
    fn density(&self, p: &Primitives<D>) -> f64 {
        SecondaryStructure::<D>::density(&KineticEnergy, p)
    }
    fn gradient(&self, p: &Primitives<D>) -> StateVector<D> {
        KineticEnergy.gradient(p)
    }
    fn potential(&self, p: &Primitives<D>, axis: usize) -> f64 {
        KineticEnergy.potential(p, axis)
    }
    fn physical_flux(&self, p: &Primitives<D>, axis: usize) -> f64 {
        KineticEnergy.physical_flux(p, axis)
    }
    fn work_term(&self, _l: &Primitives<D>, _r: &Primitives<D>, _axis: usize) -> f64 {
        0.0
    }
}

fn relative<S: SecondaryStructure<3>>(s: &S, f: &FluxVector<3>, l: &Primitives<3>, r: &Primitives<3>) -> f64 {
    let res = generalized_tadmor_residual(s, f, l, r).abs();
    res / s.residual_scale(f, l, r).max(f64::MIN_POSITIVE)
}

pub fn flux_residuals(eos: &Eos, b: &StateBox, dg: DgChoice, samples: usize, rng: &mut ChaCha8Rng) -> Result<FluxResiduals, VerifyError> {
    let flux = KeepDg::new(dg);
    let mut out = FluxResiduals {
        min_density_mean_ratio: f64::INFINITY,
        ..Default::default()
    };
    for i in 0..samples {
        let (l, r): (Primitives<3>, Primitives<3>) = random_pair(eos, b, rng)?;
        let axis = i % 3;
        let f = flux.flux(eos, &l, &r, axis)?;
        let t = tadmor_residual(&f, &l, &r).abs() / Entropy.residual_scale(&f, &l, &r);
        out.tadmor = out.tadmor.max(t);
        out.generalized_tadmor = out.generalized_tadmor.max(relative(&KineticEnergy, &f, &l, &r));
        let fr = flux.flux(eos, &r, &l, axis)?;
        out.symmetry = out.symmetry.max((f.value - fr.value).max_abs() / f.value.max_abs());
        let m = flux.means(eos, &l, &r)?;
        out.min_density_mean_ratio = out.min_density_mean_ratio.min(m.rho / l.rho.min(r.rho));
        let same = flux.flux(eos, &l, &l, axis)?;
        let exact = crate::flux::euler_flux_from_primitives(&l, axis);
        out.consistency = out.consistency.max((same.value - exact.value).max_abs() / exact.value.max_abs());
        let c = central_flux(eos, &l.conserved(), &r.conserved(), axis)?;
        out.central_tadmor = out.central_tadmor.max(tadmor_residual(&c, &l, &r).abs() / Entropy.residual_scale(&c, &l, &r));
        out.wrong_work = out.wrong_work.max(relative(&KineticEnergyWithoutWork, &f, &l, &r));
    }
    Ok(out)
}

fn flux_suite(opts: &VerifyOptions) -> Result<Report, VerifyError> {
    let mut report = Report::default();
    for kind in EosKind::ALL {
        let eos = kind.build(&opts.material);
        let b = StateBox::for_eos(kind, &opts.material);
        let mut rng = rng(opts, 100 + kind as u64);
        let r = flux_residuals(&eos, &b, DgChoice::default(), opts.samples, &mut rng)?;
        let tag = kind.as_str();
        report.push(Check::new(format!("{tag}: max Tadmor residual"), r.tadmor, Bound::AtMost(1e-11)));
        report.push(Check::new(format!("{tag}: max generalized Tadmor residual (kinetic energy)"), r.generalized_tadmor, Bound::AtMost(1e-11)));
        report.push(Check::new(format!("{tag}: consistency f(u, u) = F(u)"), r.consistency, Bound::AtMost(1e-12)));
        report.push(Check::new(format!("{tag}: symmetry under state swap"), r.symmetry, Bound::AtMost(1e-14)));
        report.push(Check::new(format!("{tag}: min density mean / min(rho_L, rho_R)"), r.min_density_mean_ratio, Bound::AtLeast(f64::MIN_POSITIVE)));
        report.push(Check::new(format!("{tag}: negative control, central flux Tadmor residual"), r.central_tadmor, Bound::AtLeast(1e-6)));
        report.push(Check::new(format!("{tag}: negative control, zero work term residual"), r.wrong_work, Bound::AtLeast(1e-6)));

        let probe = same_velocity_pairs(&eos, &b, opts.samples / 10, &mut rng)?;
        let weak = weak_null_consistency_probe(&KineticEnergy, probe.iter().copied(), 0, 1e-13);
        report.push(Check::new(format!("{tag}: weak null-consistency of the pressure work"), weak.max_relative, Bound::AtMost(weak.tolerance)));
        let bad = weak_null_consistency_probe(&KineticEnergyWithoutWork, probe.iter().copied(), 0, 1e-13);
        report.push(Check::new(format!("{tag}: negative control, null-consistency without work"), bad.max_relative, Bound::AtLeast(1e-6)));
    }
    Ok(report)
}

/// Pairs whose kinetic-energy gradients coincide: equal velocities,
/// different thermodynamic states.
pub fn same_velocity_pairs<R: Rng>(eos: &Eos, b: &StateBox, n: usize, rng: &mut R) -> Result<Vec<(Primitives<3>, Primitives<3>)>, EosError> {
    (0..n)
        .map(|_| {
            let l: Primitives<3> = random_state(eos, b, rng)?;
            let r: Primitives<3> = random_state(eos, b, rng)?;
            let r = Primitives::from_thermo(eos, r.thermo(), l.velocity)?;
            Ok((l, r))
        })
        .collect()
}

/// Semi-discrete entropy production and per-cell kinetic-energy balance on
/// one random field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceMeasure {
    /// `|sum eta^T rhs dV| / (sum |s| |v| dV / dx_min)`.
    pub entropy_production: f64,
    /// Largest per-cell relative residual of the kinetic-energy balance.
    pub ke_balance: f64,
    /// Same with the work term dropped.
    pub ke_balance_without_work: f64,
}

pub fn balance_measure<const D: usize>(
    eos: &Eos,
    b: &StateBox,
    cells: usize,
    dg: DgChoice,
    rng: &mut ChaCha8Rng,
) -> Result<BalanceMeasure, VerifyError> {
    let grid = Grid::<D>::cube(cells, 0.0, 1.0)?;
    let mut field = random_smooth_field(eos, grid.clone(), b, rng)?;
    let mut disc = SemiDiscretization::new(grid.clone(), *eos, KeepDg::new(dg), None);
    let reduction = Reduction::default();
    let production = semi_discrete_production(&mut disc, &field.states, &mut field.temperature, &Entropy, &reduction)?;
    let prims = disc.primitives().to_vec();
    let scale = reduction.sum_map(prims.len(), |i| {
        prims[i].entropy_density().abs() * prims[i].speed_squared().sqrt()
    }) * grid.cell_volume()
        / grid.min_dx();
    let ke = discrete_balance_residual(&mut disc, &field.states, &mut field.temperature, &KineticEnergy)?;
    let wrong = discrete_balance_residual(&mut disc, &field.states, &mut field.temperature, &KineticEnergyWithoutWork)?;
    Ok(BalanceMeasure {
        entropy_production: production.abs() / scale,
        ke_balance: ke.max_relative(),
        ke_balance_without_work: wrong.max_relative(),
    })
}

fn balance_suite(opts: &VerifyOptions) -> Result<Report, VerifyError> {
    let mut report = Report::default();
    for kind in EosKind::ALL {
        let eos = kind.build(&opts.material);
        let b = StateBox::for_eos(kind, &opts.material);
        let mut rng = rng(opts, 200 + kind as u64);
        let (mut s, mut k, mut w) = (0f64, 0f64, f64::INFINITY);
        for _ in 0..opts.fields {
            let m = balance_measure::<3>(&eos, &b, opts.field_cells, DgChoice::default(), &mut rng)?;
            s = s.max(m.entropy_production);
            k = k.max(m.ke_balance);
            w = w.min(m.ke_balance_without_work);
        }
        let tag = kind.as_str();
        report.push(Check::new(format!("{tag}: semi-discrete entropy production"), s, Bound::AtMost(1e-12)));
        report.push(Check::new(format!("{tag}: per-cell kinetic-energy balance residual"), k, Bound::AtMost(1e-12)));
        report.push(Check::new(format!("{tag}: negative control, balance without work term"), w, Bound::AtLeast(1e-6)));
    }
    Ok(report)
}

/// Density-wave errors on a sequence of meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub cells: Vec<usize>,
    pub errors: Vec<FieldErrors>,
    pub rho: RateFit,
    pub momentum: RateFit,
    pub energy: RateFit,
}

/// Runs the density wave on every mesh with the switch off, RK4 and a fixed
/// CFL target, and fits the error decay.
pub fn density_wave_convergence(
    material: Material,
    meshes: &[usize],
    cfl: f64,
    t_final: f64,
) -> Result<ConvergenceStudy, VerifyError> {
    let mut errors = Vec::new();
    for &n in meshes {
        let mut case = density_wave_case(material);
        case.dg = DgChoice::siadg(false);
        case.t_final = t_final;
        let field = case.density_wave_field(n)?;
        let grid = field.grid.clone();
        let mut sim = Simulation::new(case.clone(), field, StepControl::Cfl(cfl), Some(usize::MAX), Reduction::default())?;
        while !sim.finished() {
            sim.advance()?;
        }
        let exact = case.density_wave_exact(&grid, sim.time())?;
        errors.push(field_errors_vs_exact(&sim.field.states, &exact)?);
    }
    let h: Vec<f64> = meshes.iter().map(|n| 1.0 / *n as f64).collect();
    let fit = |f: fn(&FieldErrors) -> f64| fit_rate(&h, &errors.iter().map(f).collect::<Vec<_>>());
    Ok(ConvergenceStudy {
        cells: meshes.to_vec(),
        rho: fit(|e| e.rho)?,
        momentum: fit(|e| e.momentum)?,
        energy: fit(|e| e.energy)?,
        errors,
    })
}

fn convergence_suite(opts: &VerifyOptions) -> Result<Report, VerifyError> {
    let study = density_wave_convergence(opts.material, &opts.meshes, opts.cfl, opts.t_final)?;
    let mut report = Report::default();
    for (n, e) in study.cells.iter().zip(&study.errors) {
        report.notes.push(format!("N = {n}: rho {:.6e}, m {:.6e}, E {:.6e}", e.rho, e.momentum, e.energy));
    }
    for (name, fit) in [("rho", study.rho), ("momentum", study.momentum), ("energy", study.energy)] {
        report.push(Check::new(format!("fitted order of the {name} error"), fit.slope, Bound::Within(1.8, 2.2)));
    }
    Ok(report)
}
