use super::{check_covolume, EosError, HelmholtzDerivatives, HelmholtzEos, Material, ThermoState};

/// Van der Waals fluid with a caloric exponent of `dof / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanDerWaals {
    pub gas_constant: f64,
    /// Attraction parameter, J m^3 kg^-2.
    pub a: f64,
    /// Covolume, m^3 kg^-1.
    pub b: f64,
    /// `dof / 2`.
    pub exponent: f64,
    pub critical_temperature: f64,
}

impl VanDerWaals {
    pub fn from_material(m: &Material) -> Self {
        let r = m.specific_gas_constant();
        let (tc, pc) = (m.critical_temperature, m.critical_pressure);
        Self {
            gas_constant: r,
            a: 27.0 / 64.0 * r * r * tc * tc / pc,
            b: 0.125 * r * tc / pc,
            exponent: 0.5 * m.dof,
            critical_temperature: tc,
        }
    }
}

impl HelmholtzEos for VanDerWaals {
    fn name(&self) -> &'static str {
        "van der waals"
    }

    #[inline]
    fn derivatives(&self, s: ThermoState) -> Result<HelmholtzDerivatives, EosError> {
        check_covolume(s, self.b)?;
        let (r, a, b, n) = (self.gas_constant, self.a, self.b, self.exponent);
        let (rho, t) = (s.rho, s.temperature);
        let free = 1.0 - rho * b;
        let log_term = free.ln() + n * t.ln() - rho.ln();
        let rho_free = rho * free;
        Ok(HelmholtzDerivatives {
            a: -r * t * (1.0 + log_term) - a * rho,
            a_rho: r * t / rho_free - a,
            a_t: -r * (1.0 + log_term) - n * r,
            a_rhorho: -r * t * (1.0 - 2.0 * rho * b) / (rho_free * rho_free),
            a_tt: -n * r / t,
            a_rhot: r / rho_free,
        })
    }

    fn temperature_bracket(&self) -> (f64, f64) {
        (1.0, 10.0 * self.critical_temperature)
    }

    fn max_density(&self) -> f64 {
        if self.b > 0.0 {
            1.0 / self.b
        } else {
            f64::INFINITY
        }
    }

    fn temperature_closed_form(&self, rho: f64, e: f64) -> Option<f64> {
        // e = n R T - a rho is linear in T.
        Some((e + self.a * rho) / (self.exponent * self.gas_constant))
    }

    fn temperature_estimate(&self, _rho: f64, e: f64) -> f64 {
        e / (self.exponent * self.gas_constant)
    }
}
