//! Integral functionals, error norms, balance residuals and kinetic-energy
//! budget terms.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::eos::HelmholtzEos;
use crate::flux::{numerical_q_flux, ConservedState, Primitives, SecondaryStructure, StateVector};
use crate::reduce::Reduction;
use crate::solver::{Grid, SemiDiscretization, SolverError, Transport, VelocityGradients};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("time stamps must increase strictly: {previous} then {next}")]
    NonIncreasingTime { previous: f64, next: f64 },
    #[error("row has {got} values, series has {expected} columns")]
    RowWidth { expected: usize, got: usize },
    #[error("mismatched lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Domain totals at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrals<const D: usize> {
    /// `S_h = sum s(u_I) dV`
    pub entropy: f64,
    /// `K_h = sum k(u_I) dV`
    pub kinetic_energy: f64,
    /// Totals of mass, momentum and total energy.
    pub conserved: StateVector<D>,
}

pub fn total_entropy<const D: usize>(
    grid: &Grid<D>,
    prims: &[Primitives<D>],
    reduction: &Reduction,
) -> f64 {
    reduction.sum_map(prims.len(), |i| prims[i].entropy_density()) * grid.cell_volume()
}

pub fn total_kinetic_energy<const D: usize>(
    grid: &Grid<D>,
    states: &[ConservedState<D>],
    reduction: &Reduction,
) -> f64 {
    reduction.sum_map(states.len(), |i| states[i].kinetic_energy()) * grid.cell_volume()
}

pub fn integrals<const D: usize>(
    grid: &Grid<D>,
    states: &[ConservedState<D>],
    prims: &[Primitives<D>],
    reduction: &Reduction,
) -> Integrals<D> {
    let dv = grid.cell_volume();
    let mut conserved = StateVector::ZERO;
    for k in 0..StateVector::<D>::LEN {
        conserved[k] = reduction.sum_map(states.len(), |i| states[i][k]) * dv;
    }
    Integrals {
        entropy: total_entropy(grid, prims, reduction),
        kinetic_energy: total_kinetic_energy(grid, states, reduction),
        conserved,
    }
}

/// Drift of a conserved total. Falls back to the absolute drift, flagged,
/// when the initial value is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationError {
    pub value: f64,
    pub absolute: bool,
}

pub fn conservation_error(initial: f64, current: f64) -> ConservationError {
    if initial == 0.0 {
        ConservationError {
            value: current.abs(),
            absolute: true,
        }
    } else {
        ConservationError {
            value: ((current - initial) / initial).abs(),
            absolute: false,
        }
    }
}

/// `(t, eps_S, eps_K)` for every row of a series holding `S_h` and `K_h`.
pub fn conservation_errors(series: &TimeSeries) -> Option<Vec<(f64, ConservationError, ConservationError)>> {
    let s = series.column_index("S_h")?;
    let k = series.column_index("K_h")?;
    let first = series.rows.first()?;
    let (s0, k0) = (first.1[s], first.1[k]);
    Some(
        series
            .rows
            .iter()
            .map(|(t, v)| (*t, conservation_error(s0, v[s]), conservation_error(k0, v[k])))
            .collect(),
    )
}

/// Relative max-norm errors of density, momentum and total energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldErrors {
    pub rho: f64,
    pub momentum: f64,
    pub energy: f64,
}

pub fn field_errors_vs_exact<const D: usize>(
    numerical: &[ConservedState<D>],
    exact: &[ConservedState<D>],
) -> Result<FieldErrors, DiagnosticsError> {
    if numerical.len() != exact.len() {
        return Err(DiagnosticsError::LengthMismatch(numerical.len(), exact.len()));
    }
    let ratio = |err: f64, norm: f64| if norm > 0.0 { err / norm } else { err };
    let mut e = [0.0f64; 3];
    let mut n = [0.0f64; 3];
    for (u, x) in numerical.iter().zip(exact) {
        e[0] = e[0].max((u.rho - x.rho).abs());
        n[0] = n[0].max(x.rho.abs());
        for k in 0..D {
            e[1] = e[1].max((u.momentum[k] - x.momentum[k]).abs());
            n[1] = n[1].max(x.momentum[k].abs());
        }
        e[2] = e[2].max((u.energy - x.energy).abs());
        n[2] = n[2].max(x.energy.abs());
    }
    Ok(FieldErrors {
        rho: ratio(e[0], n[0]),
        momentum: ratio(e[1], n[1]),
        energy: ratio(e[2], n[2]),
    })
}

/// Least-squares fit of `log err = slope log h + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_rate(h: &[f64], err: &[f64]) -> Result<RateFit, DiagnosticsError> {
    if h.len() != err.len() {
        return Err(DiagnosticsError::LengthMismatch(h.len(), err.len()));
    }
    if h.len() < 2 {
        return Err(DiagnosticsError::InsufficientSamples {
            needed: 2,
            got: h.len(),
        });
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - (slope * a + intercept)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Kinetic-energy budget terms `Pi`, `D` and `Eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetTerms {
    /// Pressure dilatation `sum p div v dV`.
    pub pi: f64,
    /// Dilatational dissipation `sum 4/3 mu (div v)^2 dV`.
    pub dilatational: f64,
    /// Enstrophy dissipation `sum mu |curl v|^2 dV`.
    pub enstrophy: f64,
}

impl BudgetTerms {
    /// All terms multiplied by `factor`, e.g. `t_c / (rho0 V0^2 |Omega|)`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            pi: self.pi * factor,
            dilatational: self.dilatational * factor,
            enstrophy: self.enstrophy * factor,
        }
    }
}

fn curl(g: &VelocityGradients<3>) -> [f64; 3] {
    [
        g.d[1][2] - g.d[2][1],
        g.d[2][0] - g.d[0][2],
        g.d[0][1] - g.d[1][0],
    ]
}

/// `sum_{i<j} (d_i v_j - d_j v_i)^2`, which is `|curl v|^2` in three dimensions.
fn vorticity_squared<const D: usize>(g: &VelocityGradients<D>) -> f64 {
    let mut acc = 0.0;
    for i in 0..D {
        for j in i + 1..D {
            let w = g.d[i][j] - g.d[j][i];
            acc += w * w;
        }
    }
    acc
}

/// Budget terms with second-order centred derivatives at cell centres.
pub fn ke_budget<const D: usize>(
    grid: &Grid<D>,
    prims: &[Primitives<D>],
    transport: Transport,
    reduction: &Reduction,
) -> BudgetTerms {
    let n = prims.len();
    let terms: Vec<[f64; 3]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let g = VelocityGradients::at(grid, prims, i);
            let div = g.divergence();
            [
                prims[i].pressure * div,
                4.0 / 3.0 * transport.viscosity * div * div,
                transport.viscosity * vorticity_squared(&g),
            ]
        })
        .collect();
    let dv = grid.cell_volume();
    let column = |k: usize| reduction.sum_map(n, |i| terms[i][k]) * dv;
    BudgetTerms {
        pi: column(0),
        dilatational: column(1),
        enstrophy: column(2),
    }
}

/// `|curl v| L / V0` per cell.
pub fn vorticity_magnitude(grid: &Grid<3>, prims: &[Primitives<3>], length: f64, velocity: f64) -> Vec<f64> {
    (0..prims.len())
        .into_par_iter()
        .map(|i| {
            let w = curl(&VelocityGradients::at(grid, prims, i));
            w.iter().map(|x| x * x).sum::<f64>().sqrt() * length / velocity
        })
        .collect()
}

/// Rate of change of `K_h` implied by a tendency,
/// `sum (v . dm/dt - |v|^2/2 drho/dt) dV`.
///
/// With the Euler tendency of a KEEP-DG scheme this is the centred pressure
/// dilatation exactly. With the viscous tendency it is the dissipation the
/// discrete operator actually applies, grid-scale content included.
pub fn ke_rate<const D: usize>(
    prims: &[Primitives<D>],
    tendency: &[StateVector<D>],
    cell_volume: f64,
    reduction: &Reduction,
) -> Result<f64, DiagnosticsError> {
    if prims.len() != tendency.len() {
        return Err(DiagnosticsError::LengthMismatch(prims.len(), tendency.len()));
    }
    let rate = reduction.sum_map(prims.len(), |i| {
        let (v, r) = (&prims[i].velocity, &tendency[i]);
        let v2: f64 = v.iter().map(|x| x * x).sum();
        (0..D).map(|k| v[k] * r.momentum[k]).sum::<f64>() - 0.5 * v2 * r.rho
    });
    Ok(rate * cell_volume)
}

/// A post-processed time derivative sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeSample {
    pub t: f64,
    pub value: f64,
    /// Order of the stencil actually used (8 in the interior).
    pub order: usize,
}

impl DerivativeSample {
    /// True where the full eighth-order stencil did not fit.
    pub fn reduced(&self) -> bool {
        self.order < 8
    }
}

const CENTRAL: [&[f64]; 4] = [
    &[0.5],
    &[2.0 / 3.0, -1.0 / 12.0],
    &[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
    &[4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0],
];

/// Time derivative of uniformly sampled data by eighth-order central
/// differences, narrowing to lower orders near both ends.
pub fn dkdt_postprocess(t: &[f64], k: &[f64]) -> Result<Vec<DerivativeSample>, DiagnosticsError> {
    if t.len() != k.len() {
        return Err(DiagnosticsError::LengthMismatch(t.len(), k.len()));
    }
    let n = t.len();
    if n < 9 {
        return Err(DiagnosticsError::InsufficientSamples { needed: 9, got: n });
    }
    for w in t.windows(2) {
        if w[1] <= w[0] {
            return Err(DiagnosticsError::NonIncreasingTime {
                previous: w[0],
                next: w[1],
            });
        }
    }
    let h = (t[n - 1] - t[0]) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let reach = i.min(n - 1 - i).min(4);
            let (value, order) = if reach == 0 {
                // Second-order one-sided at the very ends.
                let v = if i == 0 {
                    (-3.0 * k[0] + 4.0 * k[1] - k[2]) / (2.0 * h)
                } else {
                    (3.0 * k[n - 1] - 4.0 * k[n - 2] + k[n - 3]) / (2.0 * h)
                };
                (v, 2)
            } else {
                let c = CENTRAL[reach - 1];
                let v: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(j, cj)| cj * (k[i + j + 1] - k[i - j - 1]))
                    .sum();
                (v / h, 2 * reach)
            };
            DerivativeSample {
                t: t[i],
                value,
                order,
            }
        })
        .collect())
}

/// Per-cell residual of a discrete balance law for `q`, together with the
/// magnitude of the terms that cancel in it.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceResidual {
    pub residual: Vec<f64>,
    pub scale: Vec<f64>,
}

impl BalanceResidual {
    pub fn max_abs(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_relative(&self) -> f64 {
        self.residual
            .iter()
            .zip(&self.scale)
            .map(|(r, s)| if *s > 0.0 { r.abs() / s } else { r.abs() })
            .fold(0.0, f64::max)
    }
}

/// `xi_I^T rhs_I + sum_j [(F_+ - F_-) + (w_+ + w_-)/2] / dx_j` for the
/// inviscid operator; vanishes when the flux meets the generalized Tadmor
/// condition of `structure`.
pub fn discrete_balance_residual<E, S, const D: usize>(
    disc: &mut SemiDiscretization<E, D>,
    states: &[ConservedState<D>],
    temperature: &mut [f64],
    structure: &S,
) -> Result<BalanceResidual, SolverError>
where
    E: HelmholtzEos,
    S: SecondaryStructure<D> + ?Sized,
{
    let n = states.len();
    disc.update_primitives(states, temperature)?;
    let mut rhs = vec![StateVector::ZERO; n];
    disc.euler_rhs(&mut rhs)?;
    let flux = |f: &StateVector<D>, axis: usize| crate::flux::FluxVector { axis, value: *f };
    let prims = disc.primitives().to_vec();
    let mut residual: Vec<f64> = Vec::with_capacity(n);
    let mut scale: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let xi = structure.gradient(&prims[i]);
        residual.push(xi.dot(&rhs[i]));
        scale.push(
            xi.iter()
                .zip(rhs[i].iter())
                .map(|(a, b)| (a * b).abs())
                .sum::<f64>(),
        );
    }
    let grid = disc.grid.clone();
    for axis in 0..D {
        let faces = disc.face_fluxes(axis)?.to_vec();
        let face_terms: Vec<(f64, f64, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let r = grid.next(i, axis);
                let (pl, pr) = (&prims[i], &prims[r]);
                let f = flux(&faces[i], axis);
                let q = numerical_q_flux(structure, &f, pl, pr);
                let w = structure.work_term(pl, pr, axis);
                let xi_bar = 0.5 * (structure.gradient(pl) + structure.gradient(pr));
                let s = xi_bar
                    .iter()
                    .zip(f.value.iter())
                    .map(|(a, b)| (a * b).abs())
                    .sum::<f64>()
                    + 0.5 * (structure.potential(pl, axis).abs() + structure.potential(pr, axis).abs())
                    + w.abs();
                (q, w, s)
            })
            .collect();
        let inv_dx = 1.0 / grid.dx()[axis];
        for i in 0..n {
            let l = grid.prev(i, axis);
            let (qp, wp, sp) = face_terms[i];
            let (qm, wm, sm) = face_terms[l];
            residual[i] += ((qp - qm) + 0.5 * (wp + wm)) * inv_dx;
            scale[i] += (sp + sm) * inv_dx;
        }
    }
    Ok(BalanceResidual { residual, scale })
}

/// `sum_I xi_I^T rhs_I dV` of the inviscid operator.
pub fn semi_discrete_production<E, S, const D: usize>(
    disc: &mut SemiDiscretization<E, D>,
    states: &[ConservedState<D>],
    temperature: &mut [f64],
    structure: &S,
    reduction: &Reduction,
) -> Result<f64, SolverError>
where
    E: HelmholtzEos,
    S: SecondaryStructure<D> + ?Sized,
{
    disc.update_primitives(states, temperature)?;
    let mut rhs = vec![StateVector::ZERO; states.len()];
    disc.euler_rhs(&mut rhs)?;
    let prims = disc.primitives();
    let total = reduction.sum_map(states.len(), |i| structure.gradient(&prims[i]).dot(&rhs[i]));
    Ok(total * disc.grid.cell_volume())
}

/// Ordered `(t, values)` records with named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub columns: Vec<String>,
    pub rows: Vec<(f64, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<(), DiagnosticsError> {
        if values.len() != self.columns.len() {
            return Err(DiagnosticsError::RowWidth {
                expected: self.columns.len(),
                got: values.len(),
            });
        }
        if let Some((previous, _)) = self.rows.last() {
            if t <= *previous {
                return Err(DiagnosticsError::NonIncreasingTime {
                    previous: *previous,
                    next: t,
                });
            }
        }
        self.rows.push((t, values));
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|(_, v)| v[k]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|(t, _)| *t).collect()
    }

    /// CSV with a `t` column first; numbers carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (t, values) in &self.rows {
            let _ = write!(out, "{}", format_sig17(*t));
            for v in values {
                let _ = write!(out, ",{}", format_sig17(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}
