//! Canonical experiments: the transcritical density wave and three
//! Taylor-Green vortex set-ups.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::discrete_gradient::DgChoice;
use crate::eos::{
    density_from_pressure, isobaric_heat_capacity, pressure, speed_of_sound,
    temperature_from_pressure, Eos, EosError, EosKind, HelmholtzEos, Material, ThermoState,
};
use crate::flux::{ConservedState, Primitives};
use crate::solver::{Field, Grid, SolverError, TimeScheme, Transport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    DensityWave,
    TgvInviscid,
    TgvViscous,
    TgvIgValidation,
}

impl CaseName {
    pub const ALL: [CaseName; 4] = [
        CaseName::DensityWave,
        CaseName::TgvInviscid,
        CaseName::TgvViscous,
        CaseName::TgvIgValidation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseName::DensityWave => "density_wave",
            CaseName::TgvInviscid => "tgv_inviscid",
            CaseName::TgvViscous => "tgv_viscous",
            CaseName::TgvIgValidation => "tgv_ig_validation",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            CaseName::DensityWave => 1,
            _ => 3,
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                format!(
                    "unknown case '{s}'; valid names: density_wave, tgv_inviscid, tgv_viscous, tgv_ig_validation"
                )
            })
    }
}

/// Characteristic values of a case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub rho: f64,
    pub temperature: f64,
    pub pressure: f64,
    pub velocity: f64,
    pub length: f64,
    /// Convective time `L / V0`.
    pub time: f64,
}

/// Everything needed to set up and run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub name: CaseName,
    pub material: Material,
    pub eos: Eos,
    /// Lower corner, identical on every axis.
    pub lower: f64,
    /// Edge length, identical on every axis.
    pub extent: f64,
    pub scales: Scales,
    pub mach: f64,
    pub reynolds: Option<f64>,
    pub prandtl: Option<f64>,
    pub transport: Option<Transport>,
    pub t_final: f64,
    pub default_cells: usize,
    pub dg: DgChoice,
    pub scheme: TimeScheme,
    pub cfl: f64,
    /// Deviations from the reference set-up worth reporting.
    pub notes: Vec<String>,
}

fn eos_error(e: EosError) -> SolverError {
    SolverError::Cell {
        coords: Vec::new(),
        source: e,
    }
}

/// Periodic advection of a sinusoidal density profile at constant velocity
/// and pressure, van der Waals CO2.
pub fn density_wave_case(material: Material) -> CaseSpec {
    let eos = EosKind::VanDerWaals.build(&material);
    let rho = 0.839 * material.critical_density;
    let p = 1.758 * material.critical_pressure;
    let t = temperature_from_pressure(&eos, rho, p, None).unwrap_or(f64::NAN);
    CaseSpec {
        name: CaseName::DensityWave,
        material,
        eos,
        lower: 0.0,
        extent: 1.0,
        scales: Scales {
            rho,
            temperature: t,
            pressure: p,
            velocity: 10.0,
            length: 1.0,
            time: 0.1,
        },
        mach: 10.0 / speed_of_sound(&eos, ThermoState::new(rho, t)).unwrap_or(f64::NAN),
        reynolds: None,
        prandtl: None,
        transport: None,
        t_final: 0.5,
        default_cells: 33,
        dg: DgChoice::siadg(true),
        scheme: TimeScheme::Rk4,
        cfl: 0.005,
        notes: Vec::new(),
    }
}

impl CaseSpec {
    pub fn dimension(&self) -> usize {
        self.name.dimension()
    }

    pub fn grid<const D: usize>(&self, cells: usize) -> Result<Grid<D>, SolverError> {
        Grid::cube(cells, self.lower, self.extent)
    }

    /// Cell-centre samples of the density-wave solution at time `t`.
    pub fn density_wave_exact(&self, grid: &Grid<1>, t: f64) -> Result<Vec<ConservedState<1>>, SolverError> {
        Ok(self.density_wave_primitives(grid, t)?
            .iter()
            .map(Primitives::conserved)
            .collect())
    }

    fn density_wave_primitives(&self, grid: &Grid<1>, t: f64) -> Result<Vec<Primitives<1>>, SolverError> {
        let rho_c = self.material.critical_density;
        let (v, p) = (self.scales.velocity, self.scales.pressure);
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let x = grid.center(i)[0];
                let xi = (x - v * t).rem_euclid(self.extent);
                let rho = rho_c * (0.839 + 0.1 * (2.0 * PI * xi).sin());
                let temp = temperature_from_pressure(&self.eos, rho, p, Some(self.scales.temperature))
                    .map_err(|source| SolverError::Cell {
                        coords: vec![i],
                        source,
                    })?;
                Primitives::from_thermo(&self.eos, ThermoState::new(rho, temp), [v]).map_err(|source| {
                    SolverError::Cell {
                        coords: vec![i],
                        source,
                    }
                })
            })
            .collect()
    }

    pub fn density_wave_field(&self, cells: usize) -> Result<Field<1>, SolverError> {
        let grid = self.grid::<1>(cells)?;
        let prims = self.density_wave_primitives(&grid, 0.0)?;
        let states = prims.iter().map(Primitives::conserved).collect();
        let temps = prims.iter().map(|p| p.temperature).collect();
        Field::new(grid, states, temps)
    }

    /// Taylor-Green initial data: analytic velocity, perturbed pressure at
    /// uniform temperature, density recovered from the EoS.
    pub fn tgv_field(&self, cells: usize) -> Result<Field<3>, SolverError> {
        let grid = self.grid::<3>(cells)?;
        let Scales {
            rho: rho0,
            temperature: t0,
            pressure: p0,
            velocity: v0,
            length: l,
            ..
        } = self.scales;
        let prims: Result<Vec<Primitives<3>>, SolverError> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let [x, y, z] = grid.center(i).map(|c| c / l);
                let velocity = [
                    v0 * x.sin() * y.cos() * z.cos(),
                    -v0 * x.cos() * y.sin() * z.cos(),
                    0.0,
                ];
                let p = p0
                    + rho0 * v0 * v0 / 16.0
                        * ((2.0 * x).cos() + (2.0 * y).cos())
                        * ((2.0 * z).cos() + 2.0);
                let cell_err = |source| SolverError::Cell {
                    coords: grid.coords(i).to_vec(),
                    source,
                };
                let rho = density_from_pressure(&self.eos, t0, p, Some(rho0)).map_err(cell_err)?;
                Primitives::from_thermo(&self.eos, ThermoState::new(rho, t0), velocity)
                    .map_err(cell_err)
            })
            .collect();
        let prims = prims?;
        let states = prims.iter().map(Primitives::conserved).collect();
        let temps = prims.iter().map(|p| p.temperature).collect();
        Field::new(grid, states, temps)
    }

    /// `t_c / (rho0 V0^2 |Omega|)`.
    pub fn budget_normalization(&self) -> f64 {
        let volume = self.extent.powi(self.dimension() as i32);
        self.scales.time / (self.scales.rho * self.scales.velocity.powi(2) * volume)
    }
}

fn tgv_scales<E: HelmholtzEos>(
    eos: &E,
    rho: f64,
    temperature: f64,
    mach: f64,
    length: Option<f64>,
) -> Result<(Scales, f64), EosError> {
    let s = ThermoState::new(rho, temperature);
    let p = pressure(eos, s)?;
    let c = speed_of_sound(eos, s)?;
    let v = mach * c;
    let l = length.unwrap_or(1.0);
    Ok((
        Scales {
            rho,
            temperature,
            pressure: p,
            velocity: v,
            length: l,
            time: l / v,
        },
        c,
    ))
}

fn tgv_base(name: CaseName, material: Material, eos: Eos, scales: Scales, mach: f64) -> CaseSpec {
    CaseSpec {
        name,
        material,
        eos,
        lower: -PI * scales.length,
        extent: 2.0 * PI * scales.length,
        scales,
        mach,
        reynolds: None,
        prandtl: None,
        transport: None,
        t_final: 0.0,
        default_cells: 32,
        dg: DgChoice::siadg(true),
        scheme: TimeScheme::Rk4,
        cfl: 0.05,
        notes: Vec::new(),
    }
}

/// Isothermal inviscid Taylor-Green vortex with Peng-Robinson CO2 at Mach 0.4.
pub fn inviscid_tgv_case(material: Material) -> Result<CaseSpec, SolverError> {
    let eos = EosKind::PengRobinson.build(&material);
    let (scales, _) = tgv_scales(
        &eos,
        0.3 * material.critical_density,
        1.4 * material.critical_temperature,
        0.4,
        Some(1.0),
    )
    .map_err(eos_error)?;
    let mut case = tgv_base(CaseName::TgvInviscid, material, eos, scales, 0.4);
    case.t_final = 50.0 * scales.time;
    case.notes.push("default grid 32^3 and CFL 0.05 are reduced desk-scale settings".into());
    Ok(case)
}

/// Viscous transcritical Taylor-Green vortex at Re = 1600 with constant
/// transport coefficients and Peng-Robinson CO2.
pub fn viscous_tgv_case(
    material: Material,
    mach: f64,
    viscosity: f64,
    prandtl: f64,
) -> Result<CaseSpec, SolverError> {
    let eos = EosKind::PengRobinson.build(&material);
    let rho = 1.198 * material.critical_density;
    let temperature = 1.1 * material.critical_temperature;
    let (mut scales, _) = tgv_scales(&eos, rho, temperature, mach, None).map_err(eos_error)?;
    let reynolds = 1600.0;
    scales.length = reynolds * viscosity / (rho * scales.velocity);
    scales.time = scales.length / scales.velocity;
    let cp = isobaric_heat_capacity(&eos, ThermoState::new(rho, temperature)).map_err(eos_error)?;
    let transport = Transport::new(viscosity, viscosity * cp / prandtl).map_err(SolverError::InvalidGrid)?;
    let mut case = tgv_base(CaseName::TgvViscous, material, eos, scales, mach);
    case.reynolds = Some(reynolds);
    case.prandtl = Some(prandtl);
    case.transport = Some(transport);
    case.t_final = 20.0 * scales.time;
    case.default_cells = 64;
    case.scheme = TimeScheme::WrayRk3;
    case.cfl = 0.4;
    case.notes.push("default grid 64^3 is a reduced desk-scale setting".into());
    if mach != 0.1 && mach != 0.3 {
        case.notes.push(format!("Mach {mach} is outside the reference set {{0.1, 0.3}}"));
    }
    Ok(case)
}

/// Ideal-gas Taylor-Green vortex at Re = 1600, Ma = 0.1, Pr = 0.71.
pub fn ig_validation_tgv_case(material: Material) -> Result<CaseSpec, SolverError> {
    let eos = EosKind::IdealGas.build(&material);
    let rho = 1.198 * material.critical_density;
    let temperature = 294.4444;
    let (scales, _) = tgv_scales(&eos, rho, temperature, 0.1, Some(0.001524)).map_err(eos_error)?;
    let reynolds = 1600.0;
    let prandtl = 0.71;
    let viscosity = rho * scales.velocity * scales.length / reynolds;
    let cp = isobaric_heat_capacity(&eos, ThermoState::new(rho, temperature)).map_err(eos_error)?;
    let transport = Transport::new(viscosity, viscosity * cp / prandtl).map_err(SolverError::InvalidGrid)?;
    let mut case = tgv_base(CaseName::TgvIgValidation, material, eos, scales, 0.1);
    case.reynolds = Some(reynolds);
    case.prandtl = Some(prandtl);
    case.transport = Some(transport);
    case.t_final = 20.0 * scales.time;
    case.default_cells = 64;
    case.scheme = TimeScheme::WrayRk3;
    case.cfl = 0.4;
    case.notes.push("default grid 64^3 is a reduced desk-scale setting".into());
    Ok(case)
}

/// Default viscosity of the transcritical viscous case, Pa s.
pub const DEFAULT_VISCOSITY: f64 = 5.0e-5;
pub const DEFAULT_PRANDTL: f64 = 0.71;

/// Builds a case by name with default parameters.
pub fn case_by_name(name: CaseName, material: Material) -> Result<CaseSpec, SolverError> {
    match name {
        CaseName::DensityWave => Ok(density_wave_case(material)),
        CaseName::TgvInviscid => inviscid_tgv_case(material),
        CaseName::TgvViscous => viscous_tgv_case(material, 0.1, DEFAULT_VISCOSITY, DEFAULT_PRANDTL),
        CaseName::TgvIgValidation => ig_validation_tgv_case(material),
    }
}
