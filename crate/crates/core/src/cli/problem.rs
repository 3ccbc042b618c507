//! Turns a [`Config`] into a mesh, system, flux and reference solution.

use nalgebra::DMatrix;

use super::config::{Config, FluxChoice, MeshKind, ProblemKind, ReferenceChoice};
use crate::error::{Error, Result};
use crate::initial::InitialCondition;
use crate::mesh::Mesh;
use crate::numflux::{make_godunov_scalar, make_rusanov, FluxScheme};
use crate::reference::{self, ReferenceSolution};
use crate::solver::{compute_dt, RunConfig, TimeStep};
use crate::systems::{
    friedrichs_characteristic_box, make_advection, make_burgers, make_friedrichs, make_shallow_water_1d,
    sorted_symmetric_eigen, AdmissibleSet, SystemModel,
};

const LF_SAMPLES: usize = 4000;
const RANGE_SAMPLES: usize = 4096;

pub struct Problem {
    pub config: Config,
    pub mesh: Mesh,
    pub scheme: FluxScheme,
    pub initial: InitialCondition,
    pub run_config: RunConfig,
    pub time_step: TimeStep,
    pub reference: Option<ReferenceSolution>,
}

impl Problem {
    pub fn system(&self) -> &SystemModel {
        &self.scheme.system
    }

    pub fn initial_data(&self) -> impl Fn(&[f64]) -> Vec<f64> + Sync + '_ {
        move |x| self.initial.eval(x)
    }
}

pub fn build_mesh(config: &Config) -> Result<Mesh> {
    let cells = config.cells();
    let domain = config.domain();
    match (config.problem.system.dim(), config.mesh.kind) {
        (1, _) => Mesh::build_uniform_1d(cells[0], domain[0]),
        (_, MeshKind::Uniform) => Mesh::build_uniform_quad_2d(cells[0], cells[1], domain[0], domain[1]),
        (_, MeshKind::Perturbed) => Mesh::build_perturbed_quad_2d(
            cells[0],
            cells[1],
            domain[0],
            domain[1],
            config.mesh.jitter,
            config.mesh.seed,
        ),
    }
}

fn friedrichs_matrix(config: &Config) -> DMatrix<f64> {
    let m = (config.problem.matrix.len() as f64).sqrt() as usize;
    DMatrix::from_row_slice(m, m, &config.problem.matrix)
}

/// Range of the characteristic coordinates `R^T u0` over one period.
fn characteristic_range(a: &DMatrix<f64>, u0: &InitialCondition, length: f64) -> (Vec<f64>, Vec<f64>) {
    let (_, r) = sorted_symmetric_eigen(a);
    let m = a.nrows();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for i in 0..=RANGE_SAMPLES {
        let u = u0.eval(&[length * i as f64 / RANGE_SAMPLES as f64]);
        for j in 0..m {
            let w: f64 = (0..m).map(|k| r[(k, j)] * u[k]).sum();
            lo[j] = lo[j].min(w);
            hi[j] = hi[j].max(w);
        }
    }
    (lo, hi)
}

pub fn build_system(config: &Config) -> Result<SystemModel> {
    let p = &config.problem;
    let u0 = &config.initial;
    let (lo, hi) = u0.range();
    let mut sys = match p.system {
        ProblemKind::Advection1d | ProblemKind::Advection2d => {
            make_advection(p.velocity.clone(), AdmissibleSet::from_data_range(&lo, &hi))?
        }
        ProblemKind::Burgers1d => make_burgers(AdmissibleSet::from_data_range(&lo, &hi))?,
        ProblemKind::Friedrichs1d => {
            let a = friedrichs_matrix(config);
            let (wlo, whi) = characteristic_range(&a, u0, config.domain()[0]);
            let AdmissibleSet::Box { lower, upper } = AdmissibleSet::from_data_range(&wlo, &whi) else {
                unreachable!("from_data_range builds a box")
            };
            make_friedrichs(vec![a.clone()], friedrichs_characteristic_box(&a, lower, upper))?
        }
        ProblemKind::ShallowWater1d => {
            let g = p.gravity;
            let (h_lo, h_hi) = (lo[0], hi[0]);
            let q_abs = lo[1].abs().max(hi[1].abs());
            let h_min = p.h_min.unwrap_or(0.8 * h_lo);
            let h_max = p.h_max.unwrap_or(1.25 * h_hi);
            let q_max = p.q_max.unwrap_or(q_abs + (h_hi - h_lo) * (g * h_max).sqrt());
            make_shallow_water_1d(g, h_min, h_max, q_max)?
        }
    };
    sys.compute_lf(LF_SAMPLES, config.diagnostics.seed);
    Ok(sys)
}

pub fn build_scheme(config: &Config, sys: &SystemModel) -> Result<FluxScheme> {
    match config.scheme.flux {
        FluxChoice::Rusanov => make_rusanov(sys, config.scheme.speed),
        FluxChoice::Godunov => make_godunov_scalar(sys),
    }
}

pub fn run_config(config: &Config) -> RunConfig {
    RunConfig {
        final_time: config.time.final_time,
        cfl_mode: config.time.cfl,
        zeta: config.time.zeta,
        record_every: config.output.record_every,
        check_admissibility: config.diagnostics.check_admissibility,
        quadrature: config.output.quadrature,
    }
}

/// Closed-form reference for the configured problem, if one exists.
pub fn exact_reference(config: &Config) -> Result<Option<ReferenceSolution>> {
    let u0 = config.initial.clone();
    let domain = config.domain();
    Ok(match config.problem.system {
        ProblemKind::Advection1d | ProblemKind::Advection2d => Some(reference::exact_advection(
            config.problem.velocity.clone(),
            u0,
            domain,
        )),
        ProblemKind::Friedrichs1d => Some(reference::exact_friedrichs(&friedrichs_matrix(config), u0, domain[0])?),
        ProblemKind::Burgers1d => Some(reference::exact_burgers(u0, domain[0])?),
        ProblemKind::ShallowWater1d => None,
    })
}

/// Validates the configuration and assembles every run ingredient,
/// including the reference solution (which may require a fine-mesh run).
pub fn build_problem(config: &Config) -> Result<Problem> {
    config.validate()?;
    let mesh = build_mesh(config)?;
    let sys = build_system(config)?;
    let scheme = build_scheme(config, &sys)?;
    let run_config = run_config(config);
    let time_step = compute_dt(&mesh, &scheme, &run_config)?;

    let reference = match config.diagnostics.reference {
        ReferenceChoice::None => None,
        ReferenceChoice::Exact => Some(exact_reference(config)?.ok_or_else(|| {
            Error::Config(format!("{} has no closed-form reference", config.problem.system.name()))
        })?),
        ReferenceChoice::Auto => exact_reference(config)?,
        ReferenceChoice::FineGrid => None,
    };
    if let Some(r) = &reference {
        if config.time.final_time > r.valid_until {
            return Err(Error::Config(format!(
                "final time {} exceeds the reference horizon {}",
                config.time.final_time, r.valid_until
            )));
        }
    }
    let mut problem = Problem {
        config: config.clone(),
        mesh,
        scheme,
        initial: config.initial.clone(),
        run_config,
        time_step,
        reference,
    };
    let wants_fine = match config.diagnostics.reference {
        ReferenceChoice::FineGrid => true,
        ReferenceChoice::Auto => problem.reference.is_none(),
        _ => false,
    };
    if wants_fine {
        if problem.mesh.layout.is_none() || config.mesh.kind == MeshKind::Perturbed {
            return Err(Error::Config("a fine-grid reference needs a uniform mesh".into()));
        }
        let init = problem.initial.clone();
        let u0 = move |x: &[f64]| init.eval(x);
        let fine = reference::fine_grid_reference(
            &problem.mesh,
            &problem.scheme,
            &u0,
            &problem.run_config,
            problem.time_step,
            config.diagnostics.fine_factor,
            true,
        )?;
        problem.reference = Some(fine);
    }
    Ok(problem)
}
