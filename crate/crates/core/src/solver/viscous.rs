use rayon::prelude::*;

use super::{Grid, Transport};
use crate::flux::{Primitives, StateVector};

/// Cell-centred velocity derivatives, `d[l][k] = dv_k/dx_l` by centred
/// differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityGradients<const D: usize> {
    pub d: [[f64; D]; D],
}

impl<const D: usize> Default for VelocityGradients<D> {
    fn default() -> Self {
        Self { d: [[0.0; D]; D] }
    }
}

impl<const D: usize> VelocityGradients<D> {
    pub fn at(grid: &Grid<D>, prims: &[Primitives<D>], i: usize) -> Self {
        let dx = grid.dx();
        let mut d = [[0.0; D]; D];
        for (l, row) in d.iter_mut().enumerate() {
            let (up, down) = (&prims[grid.next(i, l)], &prims[grid.prev(i, l)]);
            for (k, x) in row.iter_mut().enumerate() {
                *x = (up.velocity[k] - down.velocity[k]) / (2.0 * dx[l]);
            }
        }
        Self { d }
    }

    pub fn divergence(&self) -> f64 {
        (0..D).map(|k| self.d[k][k]).sum()
    }
}

/// Coefficient of `mu div(v)` on the stress diagonal.
fn bulk_factor<const D: usize>() -> f64 {
    if D == 2 {
        1.0
    } else {
        2.0 / 3.0
    }
}

/// Viscous plus heat-conduction flux between `l` and its upper neighbour `r`
/// along `axis`. Normal derivatives are two-point differences; transverse ones
/// average the centred differences of both cells.
pub fn viscous_face_flux<const D: usize>(
    l: &Primitives<D>,
    r: &Primitives<D>,
    gl: &VelocityGradients<D>,
    gr: &VelocityGradients<D>,
    axis: usize,
    dx: f64,
    transport: Transport,
) -> StateVector<D> {
    let mut dv = [[0.0; D]; D];
    for m in 0..D {
        for k in 0..D {
            dv[m][k] = if m == axis {
                (r.velocity[k] - l.velocity[k]) / dx
            } else {
                0.5 * (gl.d[m][k] + gr.d[m][k])
            };
        }
    }
    let div: f64 = (0..D).map(|k| dv[k][k]).sum();
    let mu = transport.viscosity;
    let mut tau = [0.0; D];
    for (k, t) in tau.iter_mut().enumerate() {
        *t = mu * (dv[axis][k] + dv[k][axis]);
    }
    tau[axis] -= bulk_factor::<D>() * mu * div;
    let work: f64 = (0..D)
        .map(|k| tau[k] * 0.5 * (l.velocity[k] + r.velocity[k]))
        .sum();
    let heat = transport.conductivity * (r.temperature - l.temperature) / dx;
    StateVector::new(0.0, tau, work + heat)
}

pub(super) fn add_viscous<const D: usize>(
    grid: &Grid<D>,
    prims: &[Primitives<D>],
    transport: Transport,
    gradients: &mut Vec<VelocityGradients<D>>,
    faces: &mut Vec<StateVector<D>>,
    out: &mut [StateVector<D>],
) {
    let n = grid.len();
    gradients.resize(n, VelocityGradients::default());
    gradients
        .par_iter_mut()
        .enumerate()
        .for_each(|(i, g)| *g = VelocityGradients::at(grid, prims, i));
    faces.resize(n, StateVector::ZERO);
    for axis in 0..D {
        let dx = grid.dx()[axis];
        let grads = &*gradients;
        faces.par_iter_mut().enumerate().for_each(|(i, f)| {
            let r = grid.next(i, axis);
            *f = viscous_face_flux(&prims[i], &prims[r], &grads[i], &grads[r], axis, dx, transport);
        });
        let faces = &*faces;
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let lo = grid.prev(i, axis);
            *o = o.axpy(1.0 / dx, &(faces[i] - faces[lo]));
        });
    }
}
