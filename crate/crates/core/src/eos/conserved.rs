use super::{temperature_from_internal_energy, EosError, HelmholtzEos, ThermoState};
use crate::flux::{ConservedState, Primitives, StateVector};

/// Natural variables of a conserved state.
pub fn conserved_to_thermo<E: HelmholtzEos + ?Sized, const D: usize>(
    eos: &E,
    u: &ConservedState<D>,
    guess: Option<f64>,
) -> Result<ThermoState, EosError> {
    if !(u.rho.is_finite() && u.rho > 0.0) {
        return Err(ThermoState::new(u.rho, f64::NAN).out_of_domain("density must be positive"));
    }
    let e = u.internal_energy();
    let t = temperature_from_internal_energy(eos, u.rho, e, guess)?;
    Ok(ThermoState::new(u.rho, t))
}

/// `[(g - |v|^2/2)/T, v/T, -1/T]`.
pub fn entropy_variables<E: HelmholtzEos + ?Sized, const D: usize>(
    eos: &E,
    u: &ConservedState<D>,
    guess: Option<f64>,
) -> Result<StateVector<D>, EosError> {
    Ok(Primitives::from_conserved(eos, u, guess)?.entropy_variables())
}

/// `[-|v|^2/2, v, 0]`.
pub fn ke_gradient<const D: usize>(u: &ConservedState<D>) -> StateVector<D> {
    let v = u.velocity();
    let v2: f64 = v.iter().map(|x| x * x).sum();
    StateVector::new(-0.5 * v2, v, 0.0)
}

/// Entropy density `s(u) = -rho sigma`.
pub fn entropy_density<E: HelmholtzEos + ?Sized, const D: usize>(
    eos: &E,
    u: &ConservedState<D>,
    guess: Option<f64>,
) -> Result<f64, EosError> {
    Ok(Primitives::from_conserved(eos, u, guess)?.entropy_density())
}
