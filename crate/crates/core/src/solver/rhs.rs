use rayon::prelude::*;

use super::viscous::{add_viscous, VelocityGradients};
use super::{Field, Grid, SolverError, Transport};
use crate::eos::{speed_of_sound, HelmholtzEos};
use crate::flux::{ConservedState, FluxVector, KeepDg, Primitives, StateVector};

/// Spatial operator `du/dt = L(u)` of the finite-volume scheme.
pub struct SemiDiscretization<E, const D: usize> {
    pub grid: Grid<D>,
    pub eos: E,
    pub flux: KeepDg,
    pub transport: Option<Transport>,
    primitives: Vec<Primitives<D>>,
    faces: Vec<StateVector<D>>,
    gradients: Vec<VelocityGradients<D>>,
}

impl<E: HelmholtzEos, const D: usize> SemiDiscretization<E, D> {
    pub fn new(grid: Grid<D>, eos: E, flux: KeepDg, transport: Option<Transport>) -> Self {
        Self {
            grid,
            eos,
            flux,
            transport,
            primitives: Vec::new(),
            faces: Vec::new(),
            gradients: Vec::new(),
        }
    }

    /// Primitives of the last RHS or [`update_primitives`](Self::update_primitives) call.
    pub fn primitives(&self) -> &[Primitives<D>] {
        &self.primitives
    }

    fn cell_error(&self, index: usize, source: crate::eos::EosError) -> SolverError {
        SolverError::Cell {
            coords: self.grid.coords(index).to_vec(),
            source,
        }
    }

    /// Recovers the primitives of every cell and refreshes the temperature
    /// cache.
    pub fn update_primitives(
        &mut self,
        states: &[ConservedState<D>],
        temperature: &mut [f64],
    ) -> Result<(), SolverError> {
        let n = self.grid.len();
        if states.len() != n || temperature.len() != n {
            return Err(SolverError::ShapeMismatch {
                expected: n,
                got: states.len().min(temperature.len()),
            });
        }
        let eos = &self.eos;
        self.primitives.resize(n, Primitives::default());
        let result = self
            .primitives
            .par_iter_mut()
            .zip(temperature.par_iter_mut())
            .zip(states.par_iter())
            .enumerate()
            .try_for_each(|(i, ((p, t), u))| {
                let guess = (t.is_finite() && *t > 0.0).then_some(*t);
                *p = Primitives::from_conserved(eos, u, guess).map_err(|e| (i, e))?;
                *t = p.temperature;
                Ok(())
            });
        result.map_err(|(i, e)| self.cell_error(i, e))
    }

    /// Evaluates the tendency of `states` into `out`, refreshing the
    /// temperature cache first.
    pub fn rhs(
        &mut self,
        states: &[ConservedState<D>],
        temperature: &mut [f64],
        out: &mut [StateVector<D>],
    ) -> Result<(), SolverError> {
        self.update_primitives(states, temperature)?;
        self.rhs_from_primitives(out)
    }

    /// Tendency from the cached primitives.
    pub fn rhs_from_primitives(&mut self, out: &mut [StateVector<D>]) -> Result<(), SolverError> {
        out.par_iter_mut().for_each(|o| *o = StateVector::ZERO);
        self.add_euler(out)?;
        if let Some(transport) = self.transport {
            self.add_viscous(transport, out);
        }
        Ok(())
    }

    /// Inviscid tendency only, from the cached primitives.
    pub fn euler_rhs(&mut self, out: &mut [StateVector<D>]) -> Result<(), SolverError> {
        out.par_iter_mut().for_each(|o| *o = StateVector::ZERO);
        self.add_euler(out)
    }

    /// Viscous and heat-conduction tendency only, from the cached primitives.
    pub fn viscous_rhs(&mut self, transport: Transport, out: &mut [StateVector<D>]) {
        out.par_iter_mut().for_each(|o| *o = StateVector::ZERO);
        self.add_viscous(transport, out);
    }

    /// Face fluxes along `axis`; entry `I` holds the flux between cell `I`
    /// and its upper neighbour.
    pub fn face_fluxes(&mut self, axis: usize) -> Result<&[StateVector<D>], SolverError> {
        self.compute_faces(axis)?;
        Ok(&self.faces)
    }

    fn compute_faces(&mut self, axis: usize) -> Result<(), SolverError> {
        let n = self.grid.len();
        self.faces.resize(n, StateVector::ZERO);
        let (grid, eos, flux, prims) = (&self.grid, &self.eos, &self.flux, &self.primitives);
        let result = self
            .faces
            .par_iter_mut()
            .enumerate()
            .try_for_each(|(i, f)| {
                let r = grid.next(i, axis);
                *f = flux
                    .flux(eos, &prims[i], &prims[r], axis)
                    .map_err(|e| (i, e))?
                    .value;
                Ok(())
            });
        result.map_err(|(i, source)| SolverError::Face {
            coords: self.grid.coords(i).to_vec(),
            axis,
            source,
        })
    }

    fn add_euler(&mut self, out: &mut [StateVector<D>]) -> Result<(), SolverError> {
        for axis in 0..D {
            self.compute_faces(axis)?;
            let inv_dx = 1.0 / self.grid.dx()[axis];
            let (grid, faces) = (&self.grid, &self.faces);
            out.par_iter_mut().enumerate().for_each(|(i, o)| {
                let l = grid.prev(i, axis);
                *o = o.axpy(-inv_dx, &(faces[i] - faces[l]));
            });
        }
        Ok(())
    }

    fn add_viscous(&mut self, transport: Transport, out: &mut [StateVector<D>]) {
        add_viscous(
            &self.grid,
            &self.primitives,
            transport,
            &mut self.gradients,
            &mut self.faces,
            out,
        );
    }

    /// KEEP-DG flux between two cells, for diagnostics.
    pub fn flux_between(&self, i: usize, axis: usize) -> Result<FluxVector<D>, SolverError> {
        let r = self.grid.next(i, axis);
        self.flux
            .flux(&self.eos, &self.primitives[i], &self.primitives[r], axis)
            .map_err(|source| SolverError::Face {
                coords: self.grid.coords(i).to_vec(),
                axis,
                source,
            })
    }

    /// Stable step for the given CFL target from the cached primitives.
    pub fn cfl_dt(&self, cfl: f64) -> Result<f64, SolverError> {
        let s = max_wave_speed(&self.eos, &self.primitives)
            .map_err(|(i, e)| self.cell_error(i, e))?;
        Ok(cfl * self.grid.min_dx() / s)
    }

    /// Convenience wrapper around [`rhs`](Self::rhs) for a whole field.
    pub fn field_rhs(&mut self, field: &mut Field<D>) -> Result<Vec<StateVector<D>>, SolverError> {
        let mut out = vec![StateVector::ZERO; field.states.len()];
        self.rhs(&field.states, &mut field.temperature, &mut out)?;
        Ok(out)
    }
}

/// `max_I (max_i |v_i| + c)`.
pub fn max_wave_speed<E: HelmholtzEos, const D: usize>(
    eos: &E,
    prims: &[Primitives<D>],
) -> Result<f64, (usize, crate::eos::EosError)> {
    prims
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let c = speed_of_sound(eos, p.thermo()).map_err(|e| (i, e))?;
            let v = p.velocity.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            Ok(v + c)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `cfl * min dx / max (max_i |v_i| + c)` for a field.
pub fn cfl_dt<E: HelmholtzEos, const D: usize>(
    field: &Field<D>,
    eos: &E,
    cfl: f64,
) -> Result<f64, SolverError> {
    let prims: Result<Vec<_>, _> = field
        .states
        .par_iter()
        .zip(&field.temperature)
        .enumerate()
        .map(|(i, (u, t))| Primitives::from_conserved(eos, u, Some(*t)).map_err(|e| (i, e)))
        .collect();
    let to_err = |(i, source)| SolverError::Cell {
        coords: field.grid.coords(i).to_vec(),
        source,
    };
    let prims = prims.map_err(to_err)?;
    let s = max_wave_speed(eos, &prims).map_err(to_err)?;
    Ok(cfl * field.grid.min_dx() / s)
}
