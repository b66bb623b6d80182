//! Isobar sweeps of sound speed, reduced density and isobaric heat capacity.

use std::fmt::Write as _;

use crate::diagnostics::format_sig17;
use crate::eos::{
    density_from_pressure, internal_energy, isobaric_heat_capacity, speed_of_sound, EosError, EosKind,
    Material, ThermoState,
};

#[derive(Debug, Clone, PartialEq)]
pub struct IsobarSweep {
    pub eos: Vec<EosKind>,
    /// Pressure over the critical pressure.
    pub reduced_pressure: f64,
    pub reduced_temperature: (f64, f64),
    pub points: usize,
}

impl Default for IsobarSweep {
    fn default() -> Self {
        Self {
            eos: EosKind::ALL.to_vec(),
            reduced_pressure: 1.1,
            reduced_temperature: (0.8, 2.0),
            points: 241,
        }
    }
}

/// Specific enthalpy at `(T, p)`, density solved on the isobar.
fn enthalpy<E: crate::eos::HelmholtzEos>(eos: &E, t: f64, p: f64, guess: f64) -> Result<(f64, f64), EosError> {
    let rho = density_from_pressure(eos, t, p, Some(guess))?;
    Ok((internal_energy(eos, ThermoState::new(rho, t))? + p / rho, rho))
}

/// CSV with columns `eos,T_r,T,rho,rho_r,c,cp,cp_fd`.
///
/// `cp` is the analytic `cv + T p_T^2 / (rho^2 p_rho)`; `cp_fd` is a centred
/// difference of the enthalpy along the isobar with step `1e-4 T`.
pub fn isobar_table(material: &Material, sweep: &IsobarSweep) -> Result<String, EosError> {
    let mut out = String::from("eos,T_r,T,rho,rho_r,c,cp,cp_fd\n");
    let p = sweep.reduced_pressure * material.critical_pressure;
    let (lo, hi) = sweep.reduced_temperature;
    for kind in &sweep.eos {
        let eos = kind.build(material);
        let mut guess = 2.0 * material.critical_density;
        for i in 0..sweep.points {
            let tr = if sweep.points > 1 {
                lo + (hi - lo) * i as f64 / (sweep.points - 1) as f64
            } else {
                lo
            };
            let t = tr * material.critical_temperature;
            let (_, rho) = enthalpy(&eos, t, p, guess)?;
            guess = rho;
            let s = ThermoState::new(rho, t);
            let c = speed_of_sound(&eos, s)?;
            let cp = isobaric_heat_capacity(&eos, s)?;
            let h = 1e-4 * t;
            let (hp, _) = enthalpy(&eos, t + h, p, rho)?;
            let (hm, _) = enthalpy(&eos, t - h, p, rho)?;
            let cp_fd = (hp - hm) / (2.0 * h);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                kind.as_str(),
                format_sig17(tr),
                format_sig17(t),
                format_sig17(rho),
                format_sig17(rho / material.critical_density),
                format_sig17(c),
                format_sig17(cp),
                format_sig17(cp_fd)
            );
        }
    }
    Ok(out)
}
