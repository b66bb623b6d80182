//! Secondary structures (entropy, kinetic energy) and the two-point
//! conditions a flux has to meet to preserve them.

use super::{ke_work_term, FluxVector, Primitives, StateVector};

/// A secondary quantity `q(u)` with its gradient, residual function and
/// numerical work term.
pub trait SecondaryStructure<const D: usize>: Sync {
    fn name(&self) -> &'static str;

    /// `q(u)`
    fn density(&self, p: &Primitives<D>) -> f64;

    /// `xi = dq/du`
    fn gradient(&self, p: &Primitives<D>) -> StateVector<D>;

    /// `psi_i = xi^T f_i - F_q,i` for the physical flux.
    fn potential(&self, p: &Primitives<D>, axis: usize) -> f64;

    /// Physical flux of `q` along `axis`.
    fn physical_flux(&self, p: &Primitives<D>, axis: usize) -> f64;

    /// Antisymmetric two-point work term.
    fn work_term(&self, l: &Primitives<D>, r: &Primitives<D>, axis: usize) -> f64;
}

/// Mathematical entropy `s = -rho sigma`; no work term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Entropy;

impl<const D: usize> SecondaryStructure<D> for Entropy {
    fn name(&self) -> &'static str {
        "entropy"
    }

    fn density(&self, p: &Primitives<D>) -> f64 {
        p.entropy_density()
    }

    fn gradient(&self, p: &Primitives<D>) -> StateVector<D> {
        p.entropy_variables()
    }

    fn potential(&self, p: &Primitives<D>, axis: usize) -> f64 {
        p.velocity[axis] * p.pressure * p.beta
    }

    fn physical_flux(&self, p: &Primitives<D>, axis: usize) -> f64 {
        p.entropy_density() * p.velocity[axis]
    }

    fn work_term(&self, _l: &Primitives<D>, _r: &Primitives<D>, _axis: usize) -> f64 {
        0.0
    }
}

/// Kinetic energy `k = rho |v|^2 / 2` with pressure work `mean(v_i) jump(p)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KineticEnergy;

impl<const D: usize> SecondaryStructure<D> for KineticEnergy {
    fn name(&self) -> &'static str {
        "kinetic energy"
    }

    fn density(&self, p: &Primitives<D>) -> f64 {
        p.kinetic_energy_density()
    }

    fn gradient(&self, p: &Primitives<D>) -> StateVector<D> {
        p.ke_gradient()
    }

    fn potential(&self, p: &Primitives<D>, axis: usize) -> f64 {
        p.pressure * p.velocity[axis]
    }

    fn physical_flux(&self, p: &Primitives<D>, axis: usize) -> f64 {
        p.kinetic_energy_density() * p.velocity[axis]
    }

    fn work_term(&self, l: &Primitives<D>, r: &Primitives<D>, axis: usize) -> f64 {
        ke_work_term(l, r, axis)
    }
}

/// Conservative numerical flux of `q`, `mean(xi)^T f - mean(psi)`.
pub fn numerical_q_flux<S: SecondaryStructure<D> + ?Sized, const D: usize>(
    s: &S,
    f: &FluxVector<D>,
    l: &Primitives<D>,
    r: &Primitives<D>,
) -> f64 {
    let xi = 0.5 * (s.gradient(l) + s.gradient(r));
    xi.dot(&f.value) - 0.5 * (s.potential(l, f.axis) + s.potential(r, f.axis))
}

pub fn numerical_entropy_flux<const D: usize>(
    f: &FluxVector<D>,
    l: &Primitives<D>,
    r: &Primitives<D>,
) -> f64 {
    numerical_q_flux(&Entropy, f, l, r)
}

pub fn numerical_ke_flux<const D: usize>(
    f: &FluxVector<D>,
    l: &Primitives<D>,
    r: &Primitives<D>,
) -> f64 {
    numerical_q_flux(&KineticEnergy, f, l, r)
}

/// `jump(psi) - f^T jump(xi) - work`.
pub fn generalized_tadmor_residual<S: SecondaryStructure<D> + ?Sized, const D: usize>(
    s: &S,
    f: &FluxVector<D>,
    l: &Primitives<D>,
    r: &Primitives<D>,
) -> f64 {
    let d_xi = s.gradient(r) - s.gradient(l);
    let d_psi = s.potential(r, f.axis) - s.potential(l, f.axis);
    d_psi - f.value.dot(&d_xi) - s.work_term(l, r, f.axis)
}

/// `jump(psi_s) - f^T jump(eta)`.
pub fn tadmor_residual<const D: usize>(
    f: &FluxVector<D>,
    l: &Primitives<D>,
    r: &Primitives<D>,
) -> f64 {
    generalized_tadmor_residual(&Entropy, f, l, r)
}

/// Round-off scale of a two-point residual: the sum of magnitudes of the
/// terms that cancel in it.
pub trait ResidualScale<const D: usize> {
    fn residual_scale(&self, f: &FluxVector<D>, l: &Primitives<D>, r: &Primitives<D>) -> f64;
}

impl<S: SecondaryStructure<D> + ?Sized, const D: usize> ResidualScale<D> for S {
    fn residual_scale(&self, f: &FluxVector<D>, l: &Primitives<D>, r: &Primitives<D>) -> f64 {
        let (xl, xr) = (self.gradient(l), self.gradient(r));
        let products: f64 = f
            .value
            .iter()
            .zip(xl.iter().zip(xr.iter()))
            .map(|(fk, (a, b))| fk.abs() * (a.abs() + b.abs()))
            .sum();
        products
            + self.potential(l, f.axis).abs()
            + self.potential(r, f.axis).abs()
            + self.work_term(l, r, f.axis).abs()
    }
}

/// Outcome of a weak null-consistency scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullConsistencyReport {
    pub pairs: usize,
    pub max_residual: f64,
    /// Largest residual divided by `|psi_L| + |psi_R| + |work|`.
    pub max_relative: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `jump(psi) = work` on pairs whose `xi` coincide.
///
/// `tol` is relative to `|psi_L| + |psi_R| + |work|`.
pub fn weak_null_consistency_probe<S, I, const D: usize>(
    s: &S,
    pairs: I,
    axis: usize,
    tol: f64,
) -> NullConsistencyReport
where
    S: SecondaryStructure<D> + ?Sized,
    I: IntoIterator<Item = (Primitives<D>, Primitives<D>)>,
{
    let mut report = NullConsistencyReport {
        pairs: 0,
        max_residual: 0.0,
        max_relative: 0.0,
        tolerance: tol,
        passed: true,
    };
    for (l, r) in pairs {
        let (pl, pr) = (s.potential(&l, axis), s.potential(&r, axis));
        let w = s.work_term(&l, &r, axis);
        let res = (pr - pl - w).abs();
        let scale = pl.abs() + pr.abs() + w.abs();
        let rel = if scale > 0.0 { res / scale } else { res };
        report.pairs += 1;
        report.max_residual = report.max_residual.max(res);
        report.max_relative = report.max_relative.max(rel);
    }
    report.passed = report.max_relative <= tol;
    report
}
