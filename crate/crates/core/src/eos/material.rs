use serde::Deserialize;

/// Universal gas constant, J/(K mol).
pub const UNIVERSAL_GAS_CONSTANT: f64 = 8.314462618;

/// Single-component fluid constants shared by every equation of state.
///
/// Field names double as the keys of the `[material]` config section.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// kg/mol
    pub molar_mass: f64,
    /// kg/m^3
    pub critical_density: f64,
    /// K
    pub critical_temperature: f64,
    /// Pa
    pub critical_pressure: f64,
    /// Molecular degrees of freedom used by the caloric part of VdW/PR.
    pub dof: f64,
    pub acentric_factor: f64,
    /// Heat capacity ratio, only used by the ideal gas.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    1.4
}

impl Material {
    /// Carbon dioxide, REFPROP critical data with vibrational modes neglected.
    pub const fn co2() -> Self {
        Self {
            molar_mass: 44.0098e-3,
            critical_density: 467.5997,
            critical_temperature: 304.1282,
            critical_pressure: 7.3773e6,
            dof: 5.0,
            acentric_factor: 0.22394,
            gamma: 1.4,
        }
    }

    /// R/M in J/(kg K).
    pub fn specific_gas_constant(&self) -> f64 {
        UNIVERSAL_GAS_CONSTANT / self.molar_mass
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("molar_mass", self.molar_mass),
            ("critical_density", self.critical_density),
            ("critical_temperature", self.critical_temperature),
            ("critical_pressure", self.critical_pressure),
            ("dof", self.dof),
            ("acentric_factor", self.acentric_factor),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(format!("material.{name} must be positive and finite, got {value}"));
            }
        }
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(format!("material.gamma must exceed 1, got {}", self.gamma));
        }
        Ok(())
    }
}

impl Default for Material {
    fn default() -> Self {
        Self::co2()
    }
}
