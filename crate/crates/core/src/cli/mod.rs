//! Configuration-driven runs and refinement studies behind the `hypflux`
//! binary.

pub mod config;
pub mod problem;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

pub use config::{Config, FluxChoice, MeshKind, ProblemKind, ReferenceChoice};
pub use problem::{build_problem, Problem};

use crate::diagnostics::{
    mass_scaling_report, wbv_scaling_report, ConvergenceRow, ConvergenceTable, DiagnosticsLedger,
    DiagnosticsMonitor, MassScaling, WbvScaling,
};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::solver::{self, StateField, Trajectory};

/// Minimum fitted rate accepted by a study.
pub const RATE_FLOOR: f64 = 0.25;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;
pub const EXIT_INVARIANT: i32 = 5;

/// An error tagged with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: Error,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for CliError {}

fn setup_error(error: Error) -> CliError {
    let code = match error {
        Error::Parse(_) => EXIT_PARSE,
        Error::Io(_) | Error::Json(_) => EXIT_RUNTIME,
        _ => EXIT_VALIDATION,
    };
    CliError { code, error }
}

fn runtime_error(error: Error) -> CliError {
    CliError {
        code: EXIT_RUNTIME,
        error,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub system: String,
    pub scheme: String,
    pub quadrature: String,
    pub cfl_mode: String,
    pub n_cells: usize,
    pub dt: f64,
    pub n_steps: usize,
    pub dt_cfl: f64,
    pub final_time: f64,
    pub lambda_star: f64,
    pub a: f64,
    pub h: f64,
    pub zeta: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub lf: f64,
    pub reference: Option<String>,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorValues {
    /// Space-time squared error over the propagation cone.
    pub cone_l2_error: f64,
    /// Its square root.
    pub err_l2: f64,
    /// `sqrt(sum_K |K| |u_K^N - u_ref_K(T)|^2)`.
    pub final_l2: f64,
}

/// Invariant flags; `None` when a check does not apply to the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantFlags {
    pub entropy_residual: bool,
    pub dissipation_gap: bool,
    pub cauchy_schwarz: bool,
    pub admissibility: bool,
    pub conservation: bool,
    pub relative_entropy_bracket: Option<bool>,
}

impl InvariantFlags {
    pub fn all_pass(&self) -> bool {
        self.entropy_residual
            && self.dissipation_gap
            && self.cauchy_schwarz
            && self.admissibility
            && self.conservation
            && self.relative_entropy_bracket.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub metadata: RunMetadata,
    pub ledger: DiagnosticsLedger,
    pub errors: Option<ErrorValues>,
    pub flags: InvariantFlags,
    pub pass: bool,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_OK
        } else {
            EXIT_INVARIANT
        }
    }
}

/// Report plus the recorded trajectory of one run.
pub struct RunOutcome {
    pub report: RunReport,
    pub trajectory: Trajectory,
    pub mesh: Mesh,
}

fn mass_conserved(mesh: &Mesh, first: &StateField, last: &StateField) -> bool {
    let (a, b) = (first.total_mass(mesh), last.total_mass(mesh));
    let scale: f64 = mesh
        .cells
        .iter()
        .enumerate()
        .map(|(k, c)| c.volume * first.state(k).iter().map(|x| x.abs()).sum::<f64>())
        .sum::<f64>()
        .max(1.0);
    let steps = (mesh.n_cells() as f64).max(1.0);
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-14 * steps * scale)
}

/// Runs an assembled problem with the diagnostics monitor attached.
pub fn execute(problem: &Problem) -> Result<RunOutcome> {
    let sys = problem.system();
    let u0 = problem.initial_data();
    let cfg = &problem.config;
    let mut monitor = DiagnosticsMonitor::new(cfg.time.final_time, sys.lf, cfg.output.quadrature)
        .with_initial_data(&u0)
        .with_series_every(cfg.output.record_every);
    if let Some(r) = cfg.diagnostics.radius {
        monitor = monitor.with_radius(r);
    }
    if let Some(reference) = &problem.reference {
        monitor = monitor.with_reference(reference);
    }
    let initial = solver::project_initial(&problem.mesh, sys, &u0, problem.run_config.quadrature)?;
    let trajectory = solver::run_from(
        &problem.mesh,
        &problem.scheme,
        initial,
        problem.time_step,
        &problem.run_config,
        &mut [&mut monitor],
    )?;
    let ledger = monitor.ledger;

    let errors = match &problem.reference {
        Some(_) => {
            let last = ledger.rel_entropy_series.last().map_or(0.0, |p| p.l2_sq);
            Some(ErrorValues {
                cone_l2_error: ledger.cone_l2_error,
                err_l2: ledger.cone_l2_error.sqrt(),
                final_l2: last.sqrt(),
            })
        }
        None => None,
    };
    let admissible = trajectory
        .snapshots
        .iter()
        .all(|(_, f)| f.first_inadmissible(sys).is_none());
    let flags = InvariantFlags {
        entropy_residual: ledger.entropy_residual_ok(),
        dissipation_gap: ledger.gap_failures == 0,
        cauchy_schwarz: ledger.cauchy_schwarz_holds(),
        admissibility: admissible,
        conservation: mass_conserved(&problem.mesh, &trajectory.snapshots[0].1, trajectory.final_state()),
        relative_entropy_bracket: problem.reference.as_ref().map(|_| ledger.bracket_failures == 0),
    };
    let metadata = RunMetadata {
        system: cfg.problem.system.name().to_string(),
        scheme: problem.scheme.name().to_string(),
        quadrature: cfg.output.quadrature.to_string(),
        cfl_mode: format!("{:?}", cfg.time.cfl).to_lowercase(),
        n_cells: problem.mesh.n_cells(),
        dt: trajectory.dt,
        n_steps: trajectory.n_steps,
        dt_cfl: trajectory.dt_cfl,
        final_time: cfg.time.final_time,
        lambda_star: problem.scheme.lambda_star,
        a: problem.mesh.a,
        h: problem.mesh.h,
        zeta: cfg.time.zeta,
        beta0: sys.beta0,
        beta1: sys.beta1,
        lf: sys.lf,
        reference: problem.reference.as_ref().map(|r| {
            serde_json::to_value(r.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default()
        }),
        snapshot_times: trajectory.snapshots.iter().map(|(t, _)| *t).collect(),
    };
    let pass = flags.all_pass();
    Ok(RunOutcome {
        report: RunReport {
            metadata,
            ledger,
            errors,
            flags,
            pass,
        },
        trajectory,
        mesh: problem.mesh.clone(),
    })
}

pub fn snapshot_csv(mesh: &Mesh, field: &StateField) -> String {
    let mut s = String::from("cell_id");
    for axis in ["x", "y", "z"].iter().take(mesh.dim) {
        let _ = write!(s, ",{axis}");
    }
    for i in 0..field.m {
        let _ = write!(s, ",u{i}");
    }
    s.push('\n');
    for (k, cell) in mesh.cells.iter().enumerate() {
        let _ = write!(s, "{k}");
        for x in &cell.centroid {
            let _ = write!(s, ",{x}");
        }
        for v in field.state(k) {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Writes metadata, ledger, report and (optionally) snapshots to `dir`.
pub fn write_run_outputs(dir: &Path, outcome: &RunOutcome, snapshots: bool) -> Result<()> {
    let r = &outcome.report;
    write_file(&dir.join("metadata.json"), &serde_json::to_string_pretty(&r.metadata)?)?;
    write_file(&dir.join("ledger.json"), &r.ledger.to_json()?)?;
    write_file(&dir.join("report.json"), &serde_json::to_string_pretty(r)?)?;
    if snapshots {
        for (i, (_, field)) in outcome.trajectory.snapshots.iter().enumerate() {
            write_file(
                &dir.join("snapshots").join(format!("snapshot_{i:06}.csv")),
                &snapshot_csv(&outcome.mesh, field),
            )?;
        }
    }
    Ok(())
}

fn output_dir(config: &Config, override_dir: Option<&Path>) -> PathBuf {
    override_dir.map_or_else(|| PathBuf::from(&config.output.dir), Path::to_path_buf)
}

/// `hypflux validate`: parse and validate only.
pub fn validate(path: &Path) -> std::result::Result<Config, CliError> {
    let config = Config::load(path).map_err(setup_error)?;
    config.validate().map_err(setup_error)?;
    Ok(config)
}

/// Builds and runs one configuration without touching the filesystem.
pub fn run_config(config: &Config) -> std::result::Result<RunOutcome, CliError> {
    let problem = build_problem(config).map_err(setup_error)?;
    execute(&problem).map_err(runtime_error)
}

/// `hypflux run`: one simulation with diagnostics, outputs written to the
/// configured (or overridden) directory.
pub fn run_single(path: &Path, output: Option<&Path>) -> std::result::Result<RunReport, CliError> {
    let config = validate(path)?;
    let outcome = run_config(&config)?;
    let dir = output_dir(&config, output);
    write_run_outputs(&dir, &outcome, config.output.snapshots).map_err(runtime_error)?;
    Ok(outcome.report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub cells: usize,
    pub pass: bool,
    pub flags: InvariantFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub system: String,
    pub scheme: String,
    pub levels: Vec<LevelSummary>,
    pub table: ConvergenceTable,
    pub rate_pass: bool,
    pub wbv_scaling: WbvScaling,
    pub mass_scaling: MassScaling,
    pub pass: bool,
}

impl StudyReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_OK
        } else {
            EXIT_INVARIANT
        }
    }
}

pub struct StudyOutcome {
    pub report: StudyReport,
    /// Per-level outcomes in the order of the `levels` list.
    pub runs: Vec<RunOutcome>,
}

/// Configuration of one study level: `cells` along every axis.
pub fn level_config(config: &Config, cells: usize) -> Config {
    let mut c = config.clone();
    c.mesh.cells = vec![cells];
    c.study = None;
    c
}

/// Runs every level (up to `jobs` at a time) and assembles the table in
/// level order.
pub fn run_study_config(config: &Config, jobs: usize) -> std::result::Result<StudyOutcome, CliError> {
    config.validate().map_err(setup_error)?;
    let Some(study) = &config.study else {
        return Err(setup_error(Error::Config("the configuration has no [study] section".into())));
    };
    if config.diagnostics.reference == ReferenceChoice::None {
        return Err(setup_error(Error::Config("a study needs a reference solution".into())));
    }
    let levels = study.levels.clone();
    let slots: Mutex<Vec<Option<std::result::Result<RunOutcome, CliError>>>> =
        Mutex::new((0..levels.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = jobs.clamp(1, levels.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= levels.len() {
                    break;
                }
                let result = run_config(&level_config(config, levels[i]));
                slots.lock().expect("no worker panicked")[i] = Some(result);
            });
        }
    });
    let mut runs = Vec::with_capacity(levels.len());
    for slot in slots.into_inner().expect("no worker panicked") {
        runs.push(slot.expect("every level ran")?);
    }

    let rows = runs
        .iter()
        .map(|o| {
            let r = &o.report;
            let e = r.errors.as_ref().expect("studies always have a reference");
            ConvergenceRow {
                h: r.metadata.h,
                dt: r.metadata.dt,
                err_l2: e.err_l2,
                wbv_l1: r.ledger.wbv_l1,
                wbv_sq: r.ledger.wbv_sq,
                mu0: r.ledger.mu0_mass,
                mu_t: r.ledger.mu_t_mass,
                mu_bar0: r.ledger.mu_bar0_mass,
                mu_bar_t: r.ledger.mu_bar_t_mass,
            }
        })
        .collect();
    let table = ConvergenceTable::new(rows);
    let wbv = wbv_scaling_report(&table);
    let mass = mass_scaling_report(&table);
    let rate_pass = table.fitted_rate.is_some_and(|r| r >= RATE_FLOOR);
    let level_summaries: Vec<LevelSummary> = levels
        .iter()
        .zip(&runs)
        .map(|(&cells, o)| LevelSummary {
            cells,
            pass: o.report.pass,
            flags: o.report.flags.clone(),
        })
        .collect();
    let pass = rate_pass
        && wbv.l1_bounded
        && wbv.sq_bounded
        && mass.initial_pass
        && mass.time_pass
        && level_summaries.iter().all(|l| l.pass);
    Ok(StudyOutcome {
        report: StudyReport {
            system: config.problem.system.name().to_string(),
            scheme: runs[0].report.metadata.scheme.clone(),
            levels: level_summaries,
            table,
            rate_pass,
            wbv_scaling: wbv,
            mass_scaling: mass,
            pass,
        },
        runs,
    })
}

/// `hypflux study`: writes `convergence.csv`, `study_report.json` and one
/// directory of run outputs per level.
pub fn run_study(path: &Path, output: Option<&Path>, jobs: usize) -> std::result::Result<StudyReport, CliError> {
    let config = validate(path)?;
    let outcome = run_study_config(&config, jobs)?;
    let dir = output_dir(&config, output);
    let write = || -> Result<()> {
        write_file(&dir.join("convergence.csv"), &outcome.report.table.to_csv())?;
        write_file(
            &dir.join("study_report.json"),
            &serde_json::to_string_pretty(&outcome.report)?,
        )?;
        for (level, run) in outcome.report.levels.iter().zip(&outcome.runs) {
            write_run_outputs(
                &dir.join(format!("level_{:05}", level.cells)),
                run,
                config.output.snapshots,
            )?;
        }
        Ok(())
    };
    write().map_err(runtime_error)?;
    Ok(outcome.report)
}
