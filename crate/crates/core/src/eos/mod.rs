//! Helmholtz-energy equations of state.
//!
//! Every model supplies the specific Helmholtz energy `A(rho, T)` together with
//! its first and second partial derivatives in closed form. All other
//! thermodynamic quantities (pressure, entropy, internal energy, Gibbs energy,
//! speed of sound) are derived from those six numbers, so a new model only has
//! to implement [`HelmholtzEos::derivatives`].
//!
//! Units are strict SI throughout.

mod conserved;
mod ideal_gas;
mod inversion;
mod material;
mod peng_robinson;
mod root;
mod van_der_waals;

pub use conserved::{conserved_to_thermo, entropy_density, entropy_variables, ke_gradient};
pub use ideal_gas::IdealGas;
pub use inversion::{
    density_from_pressure, temperature_from_internal_energy, temperature_from_pressure,
    MAX_INVERSION_ITERATIONS,
};
pub use material::{Material, UNIVERSAL_GAS_CONSTANT};
pub use peng_robinson::PengRobinson;
pub use van_der_waals::VanDerWaals;

use std::fmt;
use std::str::FromStr;

/// Covolume guard: states with `rho * b >= 1 - COVOLUME_MARGIN` are rejected.
pub const COVOLUME_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum EosError {
    #[error("state (rho = {rho}, T = {temperature}) outside the EoS domain: {reason}")]
    OutOfDomain {
        rho: f64,
        temperature: f64,
        reason: &'static str,
    },
    #[error("no sign change for {quantity} = {target} at rho = {rho} in [{lo}, {hi}]")]
    NoBracket {
        quantity: &'static str,
        rho: f64,
        target: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{quantity} inversion did not converge after {iterations} iterations (target {target}, last {last})")]
    NoConvergence {
        quantity: &'static str,
        target: f64,
        iterations: usize,
        last: f64,
    },
}

/// Natural variables of the Helmholtz energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    /// kg/m^3
    pub rho: f64,
    /// K
    pub temperature: f64,
}

impl ThermoState {
    pub const fn new(rho: f64, temperature: f64) -> Self {
        Self { rho, temperature }
    }

    /// Inverse temperature.
    #[inline]
    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    #[inline]
    pub fn from_rho_beta(rho: f64, beta: f64) -> Self {
        Self::new(rho, 1.0 / beta)
    }

    pub(crate) fn check_positive(&self) -> Result<(), EosError> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(self.out_of_domain("density must be positive"));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(self.out_of_domain("temperature must be positive"));
        }
        Ok(())
    }

    pub(crate) fn out_of_domain(&self, reason: &'static str) -> EosError {
        EosError::OutOfDomain {
            rho: self.rho,
            temperature: self.temperature,
            reason,
        }
    }
}

/// `A` and its partials at one state. The mixed partial is stored once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzDerivatives {
    pub a: f64,
    pub a_rho: f64,
    pub a_t: f64,
    pub a_rhorho: f64,
    pub a_tt: f64,
    pub a_rhot: f64,
}

impl HelmholtzDerivatives {
    #[inline]
    pub fn pressure(&self, s: ThermoState) -> f64 {
        s.rho * s.rho * self.a_rho
    }

    #[inline]
    pub fn entropy(&self) -> f64 {
        -self.a_t
    }

    #[inline]
    pub fn internal_energy(&self, s: ThermoState) -> f64 {
        self.a - s.temperature * self.a_t
    }

    #[inline]
    pub fn gibbs(&self, s: ThermoState) -> f64 {
        self.a + s.rho * self.a_rho
    }

    /// Isochoric heat capacity `de/dT`.
    #[inline]
    pub fn cv(&self, s: ThermoState) -> f64 {
        -s.temperature * self.a_tt
    }

    /// `dp/drho` at constant temperature.
    #[inline]
    pub fn dp_drho(&self, s: ThermoState) -> f64 {
        2.0 * s.rho * self.a_rho + s.rho * s.rho * self.a_rhorho
    }

    /// `dp/dT` at constant density.
    #[inline]
    pub fn dp_dt(&self, s: ThermoState) -> f64 {
        s.rho * s.rho * self.a_rhot
    }

    #[inline]
    pub fn sound_speed_squared(&self, s: ThermoState) -> f64 {
        let rho_a_rhot = s.rho * self.a_rhot;
        self.dp_drho(s) - rho_a_rhot * rho_a_rhot / self.a_tt
    }

    /// Isobaric heat capacity, `cv + T (dp/dT)^2 / (rho^2 dp/drho)`.
    pub fn cp(&self, s: ThermoState) -> f64 {
        let p_t = self.dp_dt(s);
        self.cv(s) + s.temperature * p_t * p_t / (s.rho * s.rho * self.dp_drho(s))
    }
}

/// A closed thermodynamic model given by a specific Helmholtz energy.
pub trait HelmholtzEos: Send + Sync {
    fn name(&self) -> &'static str;

    /// `A` and its partials; fails with [`EosError::OutOfDomain`] rather than
    /// returning non-finite values.
    fn derivatives(&self, state: ThermoState) -> Result<HelmholtzDerivatives, EosError>;

    /// Default search interval for temperature inversion.
    fn temperature_bracket(&self) -> (f64, f64);

    /// Largest admissible density (covolume limit), infinite for the ideal gas.
    fn max_density(&self) -> f64 {
        f64::INFINITY
    }

    /// Exact `T(rho, e)` when the model allows it.
    fn temperature_closed_form(&self, _rho: f64, _e: f64) -> Option<f64> {
        None
    }

    /// Cold-start guess for the temperature inversion.
    fn temperature_estimate(&self, rho: f64, e: f64) -> f64;

    /// `[p/T, g/T]` at `b` minus the same at `a`, both given as `(rho, beta)`,
    /// when the model has a closed form free of cancellation.
    fn beta_potential_jump(&self, _a: (f64, f64), _b: (f64, f64)) -> Option<[f64; 2]> {
        None
    }
}

impl<E: HelmholtzEos + ?Sized> HelmholtzEos for &E {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn derivatives(&self, state: ThermoState) -> Result<HelmholtzDerivatives, EosError> {
        (**self).derivatives(state)
    }
    fn temperature_bracket(&self) -> (f64, f64) {
        (**self).temperature_bracket()
    }
    fn max_density(&self) -> f64 {
        (**self).max_density()
    }
    fn temperature_closed_form(&self, rho: f64, e: f64) -> Option<f64> {
        (**self).temperature_closed_form(rho, e)
    }
    fn temperature_estimate(&self, rho: f64, e: f64) -> f64 {
        (**self).temperature_estimate(rho, e)
    }
    fn beta_potential_jump(&self, a: (f64, f64), b: (f64, f64)) -> Option<[f64; 2]> {
        (**self).beta_potential_jump(a, b)
    }
}

pub fn pressure<E: HelmholtzEos + ?Sized>(eos: &E, s: ThermoState) -> Result<f64, EosError> {
    Ok(eos.derivatives(s)?.pressure(s))
}

pub fn specific_entropy<E: HelmholtzEos + ?Sized>(eos: &E, s: ThermoState) -> Result<f64, EosError> {
    Ok(eos.derivatives(s)?.entropy())
}

pub fn internal_energy<E: HelmholtzEos + ?Sized>(eos: &E, s: ThermoState) -> Result<f64, EosError> {
    Ok(eos.derivatives(s)?.internal_energy(s))
}

pub fn gibbs<E: HelmholtzEos + ?Sized>(eos: &E, s: ThermoState) -> Result<f64, EosError> {
    Ok(eos.derivatives(s)?.gibbs(s))
}

pub fn isobaric_heat_capacity<E: HelmholtzEos + ?Sized>(
    eos: &E,
    s: ThermoState,
) -> Result<f64, EosError> {
    Ok(eos.derivatives(s)?.cp(s))
}

pub fn speed_of_sound<E: HelmholtzEos + ?Sized>(eos: &E, s: ThermoState) -> Result<f64, EosError> {
    let d = eos.derivatives(s)?;
    if d.a_tt == 0.0 {
        return Err(s.out_of_domain("A_TT vanishes"));
    }
    let c2 = d.sound_speed_squared(s);
    if !(c2 > 0.0 && c2.is_finite()) {
        return Err(s.out_of_domain("thermodynamically unstable state (c^2 <= 0)"));
    }
    Ok(c2.sqrt())
}

/// Partial derivatives of `p/T` and `g/T` with respect to `(rho, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaGradients {
    /// `[d(p beta)/d rho, d(p beta)/d beta]`
    pub p_beta: [f64; 2],
    /// `[d(g beta)/d rho, d(g beta)/d beta]`
    pub g_beta: [f64; 2],
}

impl BetaGradients {
    pub fn from_derivatives(d: &HelmholtzDerivatives, s: ThermoState) -> Self {
        let (rho, t) = (s.rho, s.temperature);
        let rho2 = rho * rho;
        Self {
            p_beta: [
                (2.0 * rho * d.a_rho + rho2 * d.a_rhorho) / t,
                rho2 * d.a_rho - t * rho2 * d.a_rhot,
            ],
            g_beta: [
                (2.0 * d.a_rho + rho * d.a_rhorho) / t,
                (d.a + rho * d.a_rho) - t * (d.a_t + rho * d.a_rhot),
            ],
        }
    }
}

pub fn analytic_gradients_pbeta_gbeta<E: HelmholtzEos + ?Sized>(
    eos: &E,
    s: ThermoState,
) -> Result<BetaGradients, EosError> {
    let d = eos.derivatives(s)?;
    Ok(BetaGradients::from_derivatives(&d, s))
}

/// Selector for the built-in models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EosKind {
    IdealGas,
    VanDerWaals,
    PengRobinson,
}

impl EosKind {
    pub const ALL: [EosKind; 3] = [EosKind::IdealGas, EosKind::VanDerWaals, EosKind::PengRobinson];

    pub fn as_str(&self) -> &'static str {
        match self {
            EosKind::IdealGas => "ig",
            EosKind::VanDerWaals => "vdw",
            EosKind::PengRobinson => "pr",
        }
    }

    pub fn build(&self, material: &Material) -> Eos {
        match self {
            EosKind::IdealGas => Eos::IdealGas(IdealGas::from_material(material)),
            EosKind::VanDerWaals => Eos::VanDerWaals(VanDerWaals::from_material(material)),
            EosKind::PengRobinson => Eos::PengRobinson(PengRobinson::from_material(material)),
        }
    }
}

impl fmt::Display for EosKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EosKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ig" | "ideal" | "ideal_gas" => Ok(EosKind::IdealGas),
            "vdw" | "van_der_waals" => Ok(EosKind::VanDerWaals),
            "pr" | "peng_robinson" => Ok(EosKind::PengRobinson),
            other => Err(format!(
                "unknown EoS '{other}'; valid names: ig, vdw, pr"
            )),
        }
    }
}

/// Enum dispatch over the built-in models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eos {
    IdealGas(IdealGas),
    VanDerWaals(VanDerWaals),
    PengRobinson(PengRobinson),
}

impl Eos {
    pub fn kind(&self) -> EosKind {
        match self {
            Eos::IdealGas(_) => EosKind::IdealGas,
            Eos::VanDerWaals(_) => EosKind::VanDerWaals,
            Eos::PengRobinson(_) => EosKind::PengRobinson,
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $inner:ident => $body:expr) => {
        match $self {
            Eos::IdealGas($inner) => $body,
            Eos::VanDerWaals($inner) => $body,
            Eos::PengRobinson($inner) => $body,
        }
    };
}

impl HelmholtzEos for Eos {
    fn name(&self) -> &'static str {
        dispatch!(self, e => e.name())
    }
    #[inline]
    fn derivatives(&self, state: ThermoState) -> Result<HelmholtzDerivatives, EosError> {
        dispatch!(self, e => e.derivatives(state))
    }
    fn temperature_bracket(&self) -> (f64, f64) {
        dispatch!(self, e => e.temperature_bracket())
    }
    fn max_density(&self) -> f64 {
        dispatch!(self, e => e.max_density())
    }
    fn temperature_closed_form(&self, rho: f64, e_int: f64) -> Option<f64> {
        dispatch!(self, e => e.temperature_closed_form(rho, e_int))
    }
    fn temperature_estimate(&self, rho: f64, e_int: f64) -> f64 {
        dispatch!(self, e => e.temperature_estimate(rho, e_int))
    }
    #[inline]
    fn beta_potential_jump(&self, a: (f64, f64), b: (f64, f64)) -> Option<[f64; 2]> {
        dispatch!(self, e => e.beta_potential_jump(a, b))
    }
}

/// Shared guard for models with a covolume `b`.
#[inline]
pub(crate) fn check_covolume(s: ThermoState, b: f64) -> Result<(), EosError> {
    s.check_positive()?;
    if s.rho * b >= 1.0 - COVOLUME_MARGIN {
        return Err(s.out_of_domain("rho * b reaches the covolume limit"));
    }
    Ok(())
}
