//! Time-marching driver shared by the `run` verb, the verification suites
//! and the acceptance tests.

use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use crate::cases::{case_by_name, viscous_tgv_case, CaseName, CaseSpec, DEFAULT_PRANDTL, DEFAULT_VISCOSITY};
use crate::diagnostics::{conservation_error, integrals, ke_budget, DiagnosticsError, Integrals, TimeSeries};
use crate::eos::Eos;
use crate::flux::{KeepDg, StateVector};
use crate::reduce::Reduction;
use crate::solver::{Field, Rk4, SemiDiscretization, SolverError, TimeScheme, WrayRk3};

use super::config::{ConfigError, FinalTime, RunConfig, StepControl};
use super::snapshot::{write_snapshot, SnapshotError};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver abort at step {step}, t = {time:e}: {source}")]
    Solver {
        step: usize,
        time: f64,
        #[source]
        source: SolverError,
    },
    #[error("case set-up failed: {0}")]
    Setup(SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Threads(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(e) => e.exit_code(),
            RunError::Solver { .. } | RunError::Setup(_) => 3,
            _ => 1,
        }
    }
}

/// Case after applying config overrides.
pub fn build_case(config: &RunConfig) -> Result<CaseSpec, RunError> {
    let mut case = match config.case {
        CaseName::TgvViscous => viscous_tgv_case(
            config.material,
            config.mach.unwrap_or(0.1),
            config.viscosity.unwrap_or(DEFAULT_VISCOSITY),
            config.prandtl.unwrap_or(DEFAULT_PRANDTL),
        ),
        name => case_by_name(name, config.material),
    }
    .map_err(RunError::Setup)?;
    if let Some(kind) = config.eos {
        case.eos = kind.build(&case.material);
    }
    if let Some(scheme) = config.scheme {
        case.scheme = scheme;
    }
    case.dg = config.dg_choice(case.dg)?;
    match config.t_final {
        Some(FinalTime::Seconds(t)) => case.t_final = t,
        Some(FinalTime::Convective(t)) => case.t_final = t * case.scales.time,
        None => {}
    }
    Ok(case)
}

/// Step size, step count and output cadence resolved at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub dt: f64,
    pub n_steps: usize,
    pub output_every: usize,
    /// CFL number actually realised by `dt` on the initial field.
    pub cfl: f64,
}

impl StepPlan {
    /// A CFL target becomes a fixed step: `n = ceil(t_f / dt_cfl)` rounded up
    /// to a multiple of the output cadence, so outputs are uniformly spaced.
    pub fn resolve(
        control: StepControl,
        t_final: f64,
        dt_at_unit_cfl: f64,
        output_every: Option<usize>,
    ) -> Self {
        let (n, every) = match control {
            StepControl::Cfl(cfl) => {
                let n = (t_final / (cfl * dt_at_unit_cfl)).ceil().max(1.0) as usize;
                let every = output_every.unwrap_or_else(|| (n / 100).max(1)).min(n);
                (n.div_ceil(every) * every, every)
            }
            StepControl::Steps(n) => (n, output_every.unwrap_or_else(|| (n / 100).max(1)).min(n)),
        };
        let dt = t_final / n as f64;
        Self {
            dt,
            n_steps: n,
            output_every: every,
            cfl: dt / dt_at_unit_cfl,
        }
    }
}

/// A running simulation of dimension `D`.
pub struct Simulation<const D: usize> {
    pub case: CaseSpec,
    pub disc: SemiDiscretization<Eos, D>,
    pub field: Field<D>,
    pub plan: StepPlan,
    pub step: usize,
    pub reduction: Reduction,
    initial: Option<Integrals<D>>,
    rk4: Rk4<StateVector<D>>,
    wray: WrayRk3<StateVector<D>>,
}

impl<const D: usize> Simulation<D> {
    pub fn new(
        case: CaseSpec,
        mut field: Field<D>,
        control: StepControl,
        output_every: Option<usize>,
        reduction: Reduction,
    ) -> Result<Self, RunError> {
        let mut disc = SemiDiscretization::new(
            field.grid.clone(),
            case.eos,
            KeepDg::new(case.dg),
            case.transport,
        );
        disc.update_primitives(&field.states, &mut field.temperature)
            .map_err(RunError::Setup)?;
        let dt1 = disc.cfl_dt(1.0).map_err(RunError::Setup)?;
        let plan = StepPlan::resolve(control, case.t_final, dt1, output_every);
        Ok(Self {
            case,
            disc,
            field,
            plan,
            step: 0,
            reduction,
            initial: None,
            rk4: Rk4::new(),
            wray: WrayRk3::new(),
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.plan.dt
    }

    pub fn finished(&self) -> bool {
        self.step >= self.plan.n_steps
    }

    pub fn advance(&mut self) -> Result<(), RunError> {
        let dt = self.plan.dt;
        let (disc, temps) = (&mut self.disc, &mut self.field.temperature);
        let rhs = |u: &[StateVector<D>], out: &mut [StateVector<D>]| disc.rhs(u, temps, out);
        let result = match self.case.scheme {
            TimeScheme::Rk4 => self.rk4.step(&mut self.field.states, dt, rhs),
            TimeScheme::WrayRk3 => self.wray.step(&mut self.field.states, dt, rhs),
        };
        result.map_err(|source| RunError::Solver {
            step: self.step,
            time: self.time(),
            source,
        })?;
        self.step += 1;
        Ok(())
    }

    /// Whether the series gets `Pi`, `D` and `Eps` columns.
    pub fn has_budget(&self) -> bool {
        D == 3 && self.case.transport.is_some()
    }

    pub fn columns(&self) -> Vec<String> {
        let mut c: Vec<String> = ["S_h", "K_h", "eps_S", "eps_K", "mass_total"]
            .map(String::from)
            .to_vec();
        c.extend((1..=D).map(|i| format!("momentum_total_{i}")));
        c.push("energy_total".into());
        if self.has_budget() {
            c.extend(["Pi", "D", "Eps"].map(String::from));
        }
        c
    }

    /// Diagnostics row at the current state.
    pub fn sample(&mut self) -> Result<Vec<f64>, RunError> {
        self.disc
            .update_primitives(&self.field.states, &mut self.field.temperature)
            .map_err(|source| RunError::Solver {
                step: self.step,
                time: self.step as f64 * self.plan.dt,
                source,
            })?;
        let prims = self.disc.primitives();
        let now = integrals(&self.field.grid, &self.field.states, prims, &self.reduction);
        let first = *self.initial.get_or_insert(now);
        let mut row = vec![
            now.entropy,
            now.kinetic_energy,
            conservation_error(first.entropy, now.entropy).value,
            conservation_error(first.kinetic_energy, now.kinetic_energy).value,
        ];
        row.extend(now.conserved.iter());
        if self.has_budget() {
            if let Some(t) = self.case.transport {
                let b = ke_budget(&self.field.grid, prims, t, &self.reduction);
                row.extend([b.pi, b.dilatational, b.enstrophy]);
            }
        }
        Ok(row)
    }

    /// Marches to the final time, sampling every `output_every` steps and
    /// calling `on_output` after each sample.
    pub fn run(
        &mut self,
        mut on_output: impl FnMut(&Self) -> Result<(), RunError>,
    ) -> Result<TimeSeries, RunError> {
        let mut series = TimeSeries::new(self.columns());
        loop {
            if self.step % self.plan.output_every == 0 || self.finished() {
                let row = self.sample()?;
                series.push(self.time(), row)?;
                on_output(self)?;
            }
            if self.finished() {
                return Ok(series);
            }
            self.advance()?;
        }
    }
}

/// Outcome of [`run`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub case: CaseSpec,
    pub cells: usize,
    pub plan: StepPlan,
    pub series: TimeSeries,
    pub wall_seconds: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn drive<const D: usize>(
    config: &RunConfig,
    case: CaseSpec,
    field: Field<D>,
) -> Result<RunSummary, RunError> {
    let control = config.step.unwrap_or(StepControl::Cfl(case.cfl));
    let reduction = Reduction {
        deterministic: config.deterministic_reductions,
        compensated: config.compensated_sums,
    };
    let cells = field.grid.cells()[0];
    let mut sim = Simulation::new(case, field, control, config.output_every, reduction)?;
    let dir = config.output_dir.clone();
    if let Some(dir) = &dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let start = Instant::now();
    let series = sim.run(|s| {
        if let (true, Some(dir)) = (config.snapshots, &dir) {
            let path = dir.join(format!("snapshot_{:08}.bin", s.step));
            let file = fs::File::create(&path).map_err(io_err(&path))?;
            write_snapshot(BufWriter::new(file), &s.field.grid, &s.field.states, s.time())?;
        }
        Ok(())
    })?;
    let wall_seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = &dir {
        let path = dir.join("series.csv");
        fs::write(&path, series.to_csv()).map_err(io_err(&path))?;
    }
    Ok(RunSummary {
        case: sim.case,
        cells,
        plan: sim.plan,
        series,
        wall_seconds,
    })
}

/// Builds the case, marches it and writes `series.csv` (and snapshots when
/// enabled) into the output directory.
pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let body = || {
        let case = build_case(config)?;
        let cells = config.cells.unwrap_or(case.default_cells);
        match case.dimension() {
            1 => {
                let field = case.density_wave_field(cells).map_err(RunError::Setup)?;
                drive::<1>(config, case, field)
            }
            _ => {
                let field = case.tgv_field(cells).map_err(RunError::Setup)?;
                drive::<3>(config, case, field)
            }
        }
    };
    // Running inside a pool keeps small grids from paying the cost of
    // injecting every parallel loop from an outside thread.
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Threads(e.to_string()))?
        .install(body)
}
