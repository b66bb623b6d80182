//! Finite-volume semi-discretization on periodic Cartesian grids and the
//! explicit Runge-Kutta schemes that advance it.

mod grid;
mod integrator;
mod rhs;
mod viscous;

pub use grid::Grid;
pub use integrator::{rk4_step, wray_rk3_step, Axpy, Rk4, TimeScheme, WrayRk3};
pub use rhs::{cfl_dt, max_wave_speed, SemiDiscretization};
pub use viscous::{viscous_face_flux, VelocityGradients};

use crate::eos::EosError;
use crate::flux::{ConservedState, FluxError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("cell {coords:?}: {source}")]
    Cell {
        coords: Vec<usize>,
        #[source]
        source: EosError,
    },
    #[error("face between cell {coords:?} and its upper neighbour along axis {axis}: {source}")]
    Face {
        coords: Vec<usize>,
        axis: usize,
        #[source]
        source: FluxError,
    },
    #[error("field has {got} cells, grid has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
}

/// Constant transport coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transport {
    /// Dynamic viscosity, Pa s.
    pub viscosity: f64,
    /// Thermal conductivity, W/(m K).
    pub conductivity: f64,
}

impl Transport {
    pub fn new(viscosity: f64, conductivity: f64) -> Result<Self, String> {
        if !(viscosity >= 0.0 && conductivity >= 0.0) {
            return Err(format!(
                "transport coefficients must be non-negative, got mu = {viscosity}, lambda = {conductivity}"
            ));
        }
        Ok(Self {
            viscosity,
            conductivity,
        })
    }
}

/// Cell-centred conserved states with a warm-start temperature per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<const D: usize> {
    pub grid: Grid<D>,
    pub states: Vec<ConservedState<D>>,
    /// Last temperature recovered in each cell.
    pub temperature: Vec<f64>,
}

impl<const D: usize> Field<D> {
    pub fn new(
        grid: Grid<D>,
        states: Vec<ConservedState<D>>,
        temperature: Vec<f64>,
    ) -> Result<Self, SolverError> {
        let n = grid.len();
        for got in [states.len(), temperature.len()] {
            if got != n {
                return Err(SolverError::ShapeMismatch { expected: n, got });
            }
        }
        Ok(Self {
            grid,
            states,
            temperature,
        })
    }

    /// Totals of every conserved component, `sum u_I dV`.
    pub fn totals(&self, reduction: &crate::reduce::Reduction) -> ConservedState<D> {
        let dv = self.grid.cell_volume();
        let mut out = ConservedState::<D>::ZERO;
        let mut column = vec![0.0; self.states.len()];
        for k in 0..ConservedState::<D>::LEN {
            for (c, u) in column.iter_mut().zip(&self.states) {
                *c = u[k];
            }
            out[k] = reduction.sum(&column) * dv;
        }
        out
    }
}
