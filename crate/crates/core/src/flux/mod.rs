//! Two-point numerical fluxes and the residual checks built on them.

mod secondary;
mod state;

pub use secondary::{
    generalized_tadmor_residual, numerical_entropy_flux, numerical_ke_flux, numerical_q_flux,
    tadmor_residual, weak_null_consistency_probe, Entropy, KineticEnergy, NullConsistencyReport,
    ResidualScale, SecondaryStructure,
};
pub use state::{mean, ConservedState, FluxVector, MeanPair, Primitives, StateVector};

use crate::discrete_gradient::{DgChoice, DiscreteGradient, Field2, Point2};
use crate::eos::{BetaGradients, EosError, HelmholtzEos, ThermoState};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum FluxError {
    #[error("degenerate density mean: discrete rho-derivative of g/T vanishes between (rho, T) = ({rho_l}, {t_l}) and ({rho_r}, {t_r})")]
    Degenerate {
        rho_l: f64,
        t_l: f64,
        rho_r: f64,
        t_r: f64,
    },
    #[error(transparent)]
    Eos(#[from] EosError),
}

/// `[p/T, g/T]` as a field over `(rho, beta)`.
pub struct PressureGibbsField<'a, E: ?Sized> {
    pub eos: &'a E,
}

impl<E: HelmholtzEos + ?Sized> Field2<2> for PressureGibbsField<'_, E> {
    type Error = EosError;

    #[inline]
    fn value(&self, p: Point2) -> Result<[f64; 2], EosError> {
        let s = ThermoState::from_rho_beta(p.x, p.y);
        let d = self.eos.derivatives(s)?;
        Ok([d.pressure(s) * p.y, d.gibbs(s) * p.y])
    }

    fn gradient(&self, p: Point2) -> Result<[[f64; 2]; 2], EosError> {
        let s = ThermoState::from_rho_beta(p.x, p.y);
        let d = self.eos.derivatives(s)?;
        let g = BetaGradients::from_derivatives(&d, s);
        Ok([g.p_beta, g.g_beta])
    }

    #[inline]
    fn jump(&self, a: Point2, b: Point2, va: &[f64; 2], vb: &[f64; 2]) -> Result<[f64; 2], EosError> {
        Ok(self
            .eos
            .beta_potential_jump((a.x, a.y), (b.x, b.y))
            .unwrap_or([vb[0] - va[0], vb[1] - va[1]]))
    }
}

/// Thermodynamic means entering the entropy conservative flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoMeans {
    /// Density mean.
    pub rho: f64,
    /// Specific internal energy mean.
    pub internal_energy: f64,
}

/// Physical Euler flux along `axis`.
pub fn euler_flux_from_primitives<const D: usize>(p: &Primitives<D>, axis: usize) -> FluxVector<D> {
    let vi = p.velocity[axis];
    let mass = p.rho * vi;
    let mut momentum = p.velocity.map(|v| mass * v);
    momentum[axis] += p.pressure;
    let total = p.rho * (p.internal_energy + 0.5 * p.speed_squared());
    FluxVector {
        axis,
        value: StateVector::new(mass, momentum, vi * (total + p.pressure)),
    }
}

pub fn euler_flux<E: HelmholtzEos + ?Sized, const D: usize>(
    eos: &E,
    u: &ConservedState<D>,
    axis: usize,
) -> Result<FluxVector<D>, EosError> {
    let p = Primitives::from_conserved(eos, u, None)?;
    let mut f = euler_flux_from_primitives(&p, axis);
    // Use the stored total energy rather than its reconstruction.
    f.value.energy = p.velocity[axis] * (u.energy + p.pressure);
    Ok(f)
}

/// Physical flux at the arithmetic mean of the conserved states. Not entropy
/// conservative; serves as a negative control.
pub fn central_flux<E: HelmholtzEos + ?Sized, const D: usize>(
    eos: &E,
    ul: &ConservedState<D>,
    ur: &ConservedState<D>,
    axis: usize,
) -> Result<FluxVector<D>, EosError> {
    euler_flux(eos, &(0.5 * (*ul + *ur)), axis)
}

/// Kinetic-energy and entropy preserving flux built from discrete gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct KeepDg {
    dg: DiscreteGradient,
}

impl KeepDg {
    pub fn new(choice: DgChoice) -> Self {
        Self {
            dg: DiscreteGradient::new(choice),
        }
    }

    pub fn choice(&self) -> &DgChoice {
        self.dg.choice()
    }

    /// Discrete gradients of `p/T` and `g/T` between two states.
    pub fn gradients<E: HelmholtzEos + ?Sized, const D: usize>(
        &self,
        eos: &E,
        l: &Primitives<D>,
        r: &Primitives<D>,
    ) -> Result<[[f64; 2]; 2], EosError> {
        let field = PressureGibbsField { eos };
        self.dg.apply_with_values(
            &field,
            Point2::new(l.rho, l.beta),
            Point2::new(r.rho, r.beta),
            Some(([l.p_beta(), l.g_beta()], [r.p_beta(), r.g_beta()])),
        )
    }

    pub fn means<E: HelmholtzEos + ?Sized, const D: usize>(
        &self,
        eos: &E,
        l: &Primitives<D>,
        r: &Primitives<D>,
    ) -> Result<ThermoMeans, FluxError> {
        let [dp, dg] = self.gradients(eos, l, r)?;
        if dg[0] == 0.0 || !dg[0].is_finite() {
            return Err(FluxError::Degenerate {
                rho_l: l.rho,
                t_l: l.temperature,
                rho_r: r.rho,
                t_r: r.temperature,
            });
        }
        let rho = dp[0] / dg[0];
        Ok(ThermoMeans {
            rho,
            internal_energy: dg[1] - dp[1] / rho,
        })
    }

    pub fn flux<E: HelmholtzEos + ?Sized, const D: usize>(
        &self,
        eos: &E,
        l: &Primitives<D>,
        r: &Primitives<D>,
        axis: usize,
    ) -> Result<FluxVector<D>, FluxError> {
        let m = self.means(eos, l, r)?;
        Ok(assemble(m, l, r, axis))
    }
}

/// Mass, momentum and energy components from the thermodynamic means.
#[inline]
pub fn assemble<const D: usize>(
    m: ThermoMeans,
    l: &Primitives<D>,
    r: &Primitives<D>,
    axis: usize,
) -> FluxVector<D> {
    let v = mean(&l.velocity, &r.velocity);
    let p_bar = 0.5 * (l.pressure + r.pressure);
    let mass = m.rho * v[axis];
    let mut momentum = v.map(|vk| mass * vk);
    momentum[axis] += p_bar;
    let v_bar2: f64 = v.iter().map(|x| x * x).sum();
    let v2_bar = 0.5 * (l.speed_squared() + r.speed_squared());
    let vp_bar = 0.5 * (l.velocity[axis] * l.pressure + r.velocity[axis] * r.pressure);
    let energy =
        mass * m.internal_energy + mass * (v_bar2 - 0.5 * v2_bar) + (2.0 * v[axis] * p_bar - vp_bar);
    FluxVector {
        axis,
        value: StateVector::new(mass, momentum, energy),
    }
}

/// KEEP-DG flux between two conserved states.
pub fn keep_dg_flux<E: HelmholtzEos + ?Sized, const D: usize>(
    eos: &E,
    dg: DgChoice,
    ul: &ConservedState<D>,
    ur: &ConservedState<D>,
    axis: usize,
) -> Result<FluxVector<D>, FluxError> {
    let l = Primitives::from_conserved(eos, ul, None)?;
    let r = Primitives::from_conserved(eos, ur, None)?;
    KeepDg::new(dg).flux(eos, &l, &r, axis)
}

pub fn density_mean<E: HelmholtzEos + ?Sized>(
    eos: &E,
    dg: DgChoice,
    l: ThermoState,
    r: ThermoState,
) -> Result<f64, FluxError> {
    thermo_means(eos, dg, l, r).map(|m| m.rho)
}

pub fn internal_energy_mean<E: HelmholtzEos + ?Sized>(
    eos: &E,
    dg: DgChoice,
    l: ThermoState,
    r: ThermoState,
) -> Result<f64, FluxError> {
    thermo_means(eos, dg, l, r).map(|m| m.internal_energy)
}

fn thermo_means<E: HelmholtzEos + ?Sized>(
    eos: &E,
    dg: DgChoice,
    l: ThermoState,
    r: ThermoState,
) -> Result<ThermoMeans, FluxError> {
    let l = Primitives::<1>::from_thermo(eos, l, [0.0])?;
    let r = Primitives::<1>::from_thermo(eos, r, [0.0])?;
    KeepDg::new(dg).means(eos, &l, &r)
}

/// Pressure work term of the kinetic-energy structure, `mean(v_i) jump(p)`.
#[inline]
pub fn ke_work_term<const D: usize>(l: &Primitives<D>, r: &Primitives<D>, axis: usize) -> f64 {
    0.5 * (l.velocity[axis] + r.velocity[axis]) * (r.pressure - l.pressure)
}
