use super::{EosError, HelmholtzDerivatives, HelmholtzEos, Material, ThermoState};

/// Calorically perfect gas, `A = -R T [1 + ln(T^(1/(gamma-1)) / rho)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGas {
    pub gas_constant: f64,
    pub gamma: f64,
}

impl IdealGas {
    pub fn new(gas_constant: f64, gamma: f64) -> Self {
        assert!(gamma > 1.0, "ideal gas requires gamma > 1");
        Self {
            gas_constant,
            gamma,
        }
    }

    pub fn from_material(m: &Material) -> Self {
        Self::new(m.specific_gas_constant(), m.gamma)
    }

    #[inline]
    fn exponent(&self) -> f64 {
        1.0 / (self.gamma - 1.0)
    }
}

impl HelmholtzEos for IdealGas {
    fn name(&self) -> &'static str {
        "ideal gas"
    }

    #[inline]
    fn derivatives(&self, s: ThermoState) -> Result<HelmholtzDerivatives, EosError> {
        s.check_positive()?;
        let r = self.gas_constant;
        let n = self.exponent();
        let (rho, t) = (s.rho, s.temperature);
        let log_term = n * t.ln() - rho.ln();
        Ok(HelmholtzDerivatives {
            a: -r * t * (1.0 + log_term),
            a_rho: r * t / rho,
            a_t: -r * (1.0 + log_term + n),
            a_rhorho: -r * t / (rho * rho),
            a_tt: -r * n / t,
            a_rhot: r / rho,
        })
    }

    fn temperature_bracket(&self) -> (f64, f64) {
        (f64::MIN_POSITIVE, f64::MAX)
    }

    fn temperature_closed_form(&self, _rho: f64, e: f64) -> Option<f64> {
        Some(e * (self.gamma - 1.0) / self.gas_constant)
    }

    fn temperature_estimate(&self, _rho: f64, e: f64) -> f64 {
        e * (self.gamma - 1.0) / self.gas_constant
    }

    /// `p/T = R rho` and `g/T = R (n ln beta + ln rho)`, with the logarithms
    /// of ratios taken through `ln_1p`.
    #[inline]
    fn beta_potential_jump(&self, (rho_a, beta_a): (f64, f64), (rho_b, beta_b): (f64, f64)) -> Option<[f64; 2]> {
        // Always from the smaller argument so that swapping negates exactly.
        let log_ratio = |x: f64, y: f64| if x <= y { ((y - x) / x).ln_1p() } else { -((x - y) / y).ln_1p() };
        let r = self.gas_constant;
        let g = self.exponent() * log_ratio(beta_a, beta_b) + log_ratio(rho_a, rho_b);
        Some([r * (rho_b - rho_a), r * g])
    }
}
