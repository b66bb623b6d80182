//! Batch front end: configuration, the time-marching driver, snapshots,
//! verification suites and the command-line parser.

pub mod config;
pub mod eos_table;
pub mod run;
pub mod snapshot;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::eos::{EosKind, Material};
use config::{CaseSection, ConfigFile, RunSection};
use eos_table::{isobar_table, IsobarSweep};
use verify::{run_suite, Suite, VerifyOptions};

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "KEEPDG_THREADS";

#[derive(Debug, Parser)]
#[command(name = "keepdg", version, about = "KEEP-DG finite-volume solver for real gases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// March a case and write series.csv (and snapshots) to the output directory.
    Run(RunArgs),
    /// Run an invariant suite: eos, dg, flux, balance or convergence.
    Verify(VerifyArgs),
    /// Isobar sweep of c, rho_r and c_p versus T_r as CSV.
    EosTable(EosTableArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// density_wave, tgv_inviscid, tgv_viscous or tgv_ig_validation.
    pub case: Option<String>,
    /// TOML file with [run], [case] and [material] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cells per axis.
    #[arg(long = "N")]
    pub cells: Option<usize>,
    #[arg(long)]
    pub eos: Option<String>,
    /// mvdg, gdg or siadg.
    #[arg(long)]
    pub dg: Option<String>,
    #[arg(long)]
    pub quadrature_order: Option<usize>,
    /// rk4 or wray3.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long, conflicts_with = "n_steps")]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub n_steps: Option<usize>,
    /// Final time in seconds.
    #[arg(long, conflicts_with = "tc")]
    pub t_final: Option<f64>,
    /// Final time in convective units.
    #[arg(long)]
    pub tc: Option<f64>,
    #[arg(long)]
    pub output_every: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Write a snapshot at every output.
    #[arg(long)]
    pub snapshots: bool,
    #[arg(long)]
    pub deterministic_reductions: Option<bool>,
    #[arg(long)]
    pub compensated_sums: Option<bool>,
    /// on or off.
    #[arg(long, value_parser = parse_switch)]
    pub dg_switch: Option<bool>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub mach: Option<f64>,
    /// Dynamic viscosity of the viscous case, Pa s.
    #[arg(long)]
    pub viscosity: Option<f64>,
    #[arg(long)]
    pub prandtl: Option<f64>,
}

fn parse_switch(s: &str) -> Result<bool, String> {
    match s {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => Err(format!("expected on or off, got '{s}'")),
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: String,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated meshes of the convergence study.
    #[arg(long, value_delimiter = ',')]
    pub meshes: Option<Vec<usize>>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub fields: Option<usize>,
    #[arg(long)]
    pub field_cells: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EosTableArgs {
    /// Restrict to one EoS.
    #[arg(long)]
    pub eos: Option<String>,
    /// Reduced pressure of the isobar.
    #[arg(long, default_value_t = 1.1)]
    pub pr: f64,
    #[arg(long, default_value_t = 0.8)]
    pub tr_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub tr_max: f64,
    #[arg(long, default_value_t = 241)]
    pub points: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{v}'")),
        Err(_) => Ok(None),
    }
}

fn run_command(a: RunArgs) -> i32 {
    let file = match &a.config {
        Some(path) => match ConfigFile::load(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        },
        None => ConfigFile::default(),
    };
    let env_threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let over = RunSection {
        case: a.case,
        cells: a.cells,
        eos: a.eos,
        dg: a.dg,
        quadrature_order: a.quadrature_order,
        scheme: a.scheme,
        cfl: a.cfl,
        n_steps: a.n_steps,
        t_final: a.t_final,
        t_final_tc: a.tc,
        output_every: a.output_every,
        output_dir: a.output_dir,
        snapshots: a.snapshots.then_some(true),
        deterministic_reductions: a.deterministic_reductions,
        compensated_sums: a.compensated_sums,
        dg_switch: a.dg_switch,
        threads: env_threads.or(a.threads),
    };
    let case = CaseSection {
        mach: a.mach,
        viscosity: a.viscosity,
        prandtl: a.prandtl,
    };
    // Command-line values win over the file, except that a step control or
    // final time given on the command line replaces the file's pair.
    let mut file = file;
    if over.cfl.is_some() || over.n_steps.is_some() {
        file.run.cfl = None;
        file.run.n_steps = None;
    }
    if over.t_final.is_some() || over.t_final_tc.is_some() {
        file.run.t_final = None;
        file.run.t_final_tc = None;
    }
    let mut config = match file.merge(over, case).resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if config.output_dir.is_none() {
        config.output_dir = Some(PathBuf::from("keepdg_output"));
    }
    match run::run(&config) {
        Ok(s) => {
            for note in &s.case.notes {
                eprintln!("note: {note}");
            }
            let last = s.series.rows.last().map(|r| r.1.clone()).unwrap_or_default();
            let col = |name: &str| s.series.column_index(name).and_then(|k| last.get(k).copied());
            println!(
                "{}: N = {}, {} steps of dt = {:.6e} s (CFL {:.4}), t_final = {:.6e} s, wall {:.1} s",
                s.case.name,
                s.cells,
                s.plan.n_steps,
                s.plan.dt,
                s.plan.cfl,
                s.plan.dt * s.plan.n_steps as f64,
                s.wall_seconds
            );
            if let (Some(es), Some(ek)) = (col("eps_S"), col("eps_K")) {
                println!("final eps_S = {es:.6e}, eps_K = {ek:.6e}");
            }
            if let Some(dir) = &config.output_dir {
                println!("wrote {}", dir.join("series.csv").display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn verify_command(a: VerifyArgs) -> i32 {
    let suite: Suite = match a.suite.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut opts = VerifyOptions::default();
    if let Some(v) = a.samples {
        opts.samples = v;
    }
    if let Some(v) = a.seed {
        opts.seed = v;
    }
    if let Some(v) = a.meshes {
        opts.meshes = v;
    }
    if let Some(v) = a.cfl {
        opts.cfl = v;
    }
    if let Some(v) = a.t_final {
        opts.t_final = v;
    }
    if let Some(v) = a.fields {
        opts.fields = v;
    }
    if let Some(v) = a.field_cells {
        opts.field_cells = v;
    }
    let threads = match threads_from_env() {
        Ok(t) => t.unwrap_or(0),
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 1;
        }
    };
    match pool.install(|| run_suite(suite, &opts)) {
        Ok(report) => {
            print!("{report}");
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn eos_table_command(a: EosTableArgs) -> i32 {
    let eos = match a.eos.as_deref().map(str::parse::<EosKind>).transpose() {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let sweep = IsobarSweep {
        eos: eos.map_or_else(|| EosKind::ALL.to_vec(), |k| vec![k]),
        reduced_pressure: a.pr,
        reduced_temperature: (a.tr_min, a.tr_max),
        points: a.points,
    };
    match isobar_table(&Material::co2(), &sweep) {
        Ok(csv) => match a.output {
            Some(path) => match std::fs::write(&path, csv) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    1
                }
            },
            None => {
                print!("{csv}");
                0
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Parses `args` and runs the chosen verb; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Run(a) => run_command(a),
        Command::Verify(a) => verify_command(a),
        Command::EosTable(a) => eos_table_command(a),
    }
}
