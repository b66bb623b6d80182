use std::f64::consts::SQRT_2;

use super::{check_covolume, EosError, HelmholtzDerivatives, HelmholtzEos, Material, ThermoState};

/// Peng-Robinson fluid with a caloric exponent of `dof / 2`.
///
/// The attraction function is `alpha(T) = a [1 + kappa (1 - sqrt(T/Tc))]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PengRobinson {
    pub gas_constant: f64,
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    pub exponent: f64,
    pub critical_temperature: f64,
}

impl PengRobinson {
    pub fn from_material(m: &Material) -> Self {
        let r = m.specific_gas_constant();
        let (tc, pc, w) = (m.critical_temperature, m.critical_pressure, m.acentric_factor);
        Self {
            gas_constant: r,
            a: 0.457235 * r * r * tc * tc / pc,
            b: 0.077796 * r * tc / pc,
            kappa: 0.37464 + 1.54226 * w - 0.26992 * w * w,
            exponent: 0.5 * m.dof,
            critical_temperature: tc,
        }
    }

    /// `alpha(T)` and its first two temperature derivatives.
    pub fn alpha(&self, t: f64) -> (f64, f64, f64) {
        let tc = self.critical_temperature;
        let ak = self.a * self.kappa;
        let sqrt_ratio = (t / tc).sqrt();
        let alpha = self.a * (1.0 + self.kappa * (1.0 - sqrt_ratio));
        let d1 = -0.5 * ak / (t * tc).sqrt();
        let d2 = 0.25 * ak / (t * (t * tc).sqrt());
        (alpha, d1, d2)
    }
}

impl HelmholtzEos for PengRobinson {
    fn name(&self) -> &'static str {
        "peng-robinson"
    }

    #[inline]
    fn derivatives(&self, s: ThermoState) -> Result<HelmholtzDerivatives, EosError> {
        check_covolume(s, self.b)?;
        let (r, b, n) = (self.gas_constant, self.b, self.exponent);
        let (rho, t) = (s.rho, s.temperature);
        let free = 1.0 - rho * b;
        let log_term = free.ln() + n * t.ln() - rho.ln();
        let rho_free = rho * free;

        let (alpha, alpha_t, alpha_tt) = self.alpha(t);
        let br = b * rho;
        let l = ((1.0 + (1.0 + SQRT_2) * br) / (1.0 + (1.0 - SQRT_2) * br)).ln();
        let q = 1.0 + 2.0 * br - br * br;
        let dq = 2.0 * b - 2.0 * b * br;
        let c = 1.0 / (2.0 * SQRT_2 * b);

        Ok(HelmholtzDerivatives {
            a: -r * t * (1.0 + log_term) - c * alpha * l,
            a_rho: r * t / rho_free - alpha / q,
            a_t: -r * (1.0 + log_term) - n * r - c * alpha_t * l,
            a_rhorho: -r * t * (1.0 - 2.0 * rho * b) / (rho_free * rho_free) + alpha * dq / (q * q),
            a_tt: -n * r / t - c * alpha_tt * l,
            a_rhot: r / rho_free - alpha_t / q,
        })
    }

    fn temperature_bracket(&self) -> (f64, f64) {
        (1.0, 10.0 * self.critical_temperature)
    }

    fn max_density(&self) -> f64 {
        1.0 / self.b
    }

    fn temperature_estimate(&self, _rho: f64, e: f64) -> f64 {
        e / (self.exponent * self.gas_constant)
    }
}
