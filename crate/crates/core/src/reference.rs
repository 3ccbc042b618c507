//! Reference solutions for error measurement: exact strong solutions of the
//! linear problems and of pre-shock Burgers, and a fine-mesh fallback.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::initial::InitialCondition;
use crate::mesh::{Layout, Mesh, Quadrature};
use crate::numflux::FluxScheme;
use crate::solver::{self, mesh_fingerprint, InitialData, RunConfig, TimeStep};
use crate::systems::sorted_symmetric_eigen;

/// Fraction of the Burgers breaking time kept as the reference horizon.
pub const BURGERS_SAFETY: f64 = 0.9;
/// Smallest refinement factor accepted for fine-mesh references.
pub const MIN_REFINEMENT: usize = 8;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    ExactAdvection,
    ExactFriedrichs,
    ExactBurgersCharacteristics,
    FineGrid,
}

type EvalFn = dyn Fn(&[f64], f64) -> Result<Vec<f64>> + Send + Sync;
type MeanFn = dyn Fn(usize, f64) -> Result<Vec<f64>> + Send + Sync;

#[derive(Clone)]
pub struct ReferenceSolution {
    pub kind: ReferenceKind,
    pub valid_until: f64,
    /// Over-estimate of `|grad u| + |d_t u|` on `[0, valid_until]`.
    pub lipschitz_bound: f64,
    /// True for references computed by the scheme itself.
    pub numerical: bool,
    eval: Arc<EvalFn>,
    /// Exact cell means on the mesh with this fingerprint, when available.
    means: Option<(u64, Arc<MeanFn>)>,
}

impl std::fmt::Debug for ReferenceSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceSolution")
            .field("kind", &self.kind)
            .field("valid_until", &self.valid_until)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .field("numerical", &self.numerical)
            .finish_non_exhaustive()
    }
}

impl ReferenceSolution {
    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) || t > self.valid_until * (1.0 + 1e-12) {
            return Err(Error::Horizon {
                t,
                valid_until: self.valid_until,
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        (self.eval)(x, t)
    }

    /// Mean of the reference over cell `k` at time `t`, using `rule` (the
    /// same rule as the projection of the initial data).
    pub fn cell_mean(&self, mesh: &Mesh, k: usize, t: f64, rule: Quadrature) -> Result<Vec<f64>> {
        self.check_time(t)?;
        if let Some((id, means)) = &self.means {
            if *id == mesh_fingerprint(mesh) {
                return means(k, t);
            }
        }
        let mut acc: Option<Vec<f64>> = None;
        for (x, w) in mesh.cell_quadrature(k, rule) {
            let v = (self.eval)(&x, t)?;
            match acc.as_mut() {
                None => acc = Some(v.iter().map(|vi| w * vi).collect()),
                Some(a) => a.iter_mut().zip(&v).for_each(|(a, vi)| *a += w * vi),
            }
        }
        let vol = mesh.cells[k].volume;
        let mut acc = acc.unwrap_or_default();
        acc.iter_mut().for_each(|a| *a /= vol);
        Ok(acc)
    }
}

/// `u(x, t) = u0(x - c t)` on the periodic box `domain`.
pub fn exact_advection(speed: Vec<f64>, u0: InitialCondition, domain: Vec<f64>) -> ReferenceSolution {
    let c_norm = speed.iter().map(|c| c * c).sum::<f64>().sqrt();
    let lipschitz_bound = u0.lipschitz_bound() * (1.0 + c_norm);
    ReferenceSolution {
        kind: ReferenceKind::ExactAdvection,
        valid_until: f64::INFINITY,
        lipschitz_bound,
        numerical: false,
        eval: Arc::new(move |x, t| {
            let y: Vec<f64> = x
                .iter()
                .zip(&speed)
                .zip(&domain)
                .map(|((xi, ci), l)| (xi - ci * t).rem_euclid(*l))
                .collect();
            Ok(u0.eval(&y))
        }),
        means: None,
    }
}

/// Characteristic solution of `u_t + A u_x = 0` in one dimension.
pub fn exact_friedrichs(a: &DMatrix<f64>, u0: InitialCondition, length: f64) -> Result<ReferenceSolution> {
    if !a.is_square() || (a - a.transpose()).amax() > 1e-12 * a.amax().max(1.0) {
        return Err(Error::System("the Friedrichs matrix must be symmetric".into()));
    }
    let (lambda, r) = sorted_symmetric_eigen(a);
    let m = lambda.len();
    if u0.n_vars() != m {
        return Err(Error::Config(format!(
            "initial data has {} components, the matrix is {m} x {m}",
            u0.n_vars()
        )));
    }
    let max_speed = lambda.iter().fold(0.0f64, |s, l| s.max(l.abs()));
    let lipschitz_bound = m as f64 * u0.lipschitz_bound() * (1.0 + max_speed);
    Ok(ReferenceSolution {
        kind: ReferenceKind::ExactFriedrichs,
        valid_until: f64::INFINITY,
        lipschitz_bound,
        numerical: false,
        eval: Arc::new(move |x, t| {
            let mut out = vec![0.0; m];
            for i in 0..m {
                let y = (x[0] - lambda[i] * t).rem_euclid(length);
                let v = u0.eval(&[y]);
                let w: f64 = (0..m).map(|j| r[(j, i)] * v[j]).sum();
                for (k, o) in out.iter_mut().enumerate() {
                    *o += r[(k, i)] * w;
                }
            }
            Ok(out)
        }),
        means: None,
    })
}

/// Smallest slope of scalar one-dimensional data over one period.
fn min_slope(u0: &InitialCondition, length: f64) -> f64 {
    if let InitialCondition::Sine {
        amplitude,
        wavenumber,
        ..
    } = u0
    {
        return -amplitude[0].abs() * std::f64::consts::TAU * wavenumber[0].abs();
    }
    let n = 1 << 14;
    (0..=n)
        .map(|i| u0.gradient(&[length * i as f64 / n as f64])[0])
        .fold(f64::INFINITY, f64::min)
}

/// Pre-shock Burgers solution by the method of characteristics.
pub fn exact_burgers(u0: InitialCondition, length: f64) -> Result<ReferenceSolution> {
    if u0.n_vars() != 1 {
        return Err(Error::Config("Burgers data must be scalar".into()));
    }
    let steepest = (-min_slope(&u0, length)).max(0.0);
    let valid_until = if steepest > 0.0 {
        BURGERS_SAFETY / steepest
    } else {
        f64::INFINITY
    };
    let (lo, hi) = u0.range();
    let sup_u = lo[0].abs().max(hi[0].abs());
    // 1 + u0'(y) t >= 1 - BURGERS_SAFETY on the horizon
    let lipschitz_bound = u0.lipschitz_bound() / (1.0 - BURGERS_SAFETY) * (1.0 + sup_u);
    let (umin, umax) = (lo[0], hi[0]);
    Ok(ReferenceSolution {
        kind: ReferenceKind::ExactBurgersCharacteristics,
        valid_until,
        lipschitz_bound,
        numerical: false,
        eval: Arc::new(move |x, t| {
            let y = solve_characteristic(&u0, x[0], t, umin, umax)?;
            Ok(u0.eval(&[y]))
        }),
        means: None,
    })
}

/// Root of `y + u0(y) t = x` by Newton steps kept inside a shrinking bracket.
fn solve_characteristic(u0: &InitialCondition, x: f64, t: f64, umin: f64, umax: f64) -> Result<f64> {
    let residual = |y: f64| y + u0.eval(&[y])[0] * t - x;
    let tol = NEWTON_TOL * x.abs().max(1.0);
    let (mut a, mut b) = (x - t * umax, x - t * umin);
    if t == 0.0 || b - a == 0.0 {
        return Ok(x - t * umin);
    }
    let mut y = x - t * u0.eval(&[x])[0];
    y = y.clamp(a, b);
    for _ in 0..NEWTON_MAX_ITER {
        let r = residual(y);
        if r.abs() <= tol {
            return Ok(y);
        }
        if r > 0.0 {
            b = y;
        } else {
            a = y;
        }
        let slope = 1.0 + u0.gradient(&[y])[0] * t;
        let newton = y - r / slope;
        y = if slope > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a <= f64::EPSILON * y.abs().max(1.0) {
            return Ok(y);
        }
    }
    Err(Error::Numerical(format!(
        "characteristic through x = {x}, t = {t} did not converge"
    )))
}

/// Refines a structured periodic mesh by `factor` along every axis.
pub fn refine(mesh: &Mesh, factor: usize) -> Result<Mesh> {
    match mesh.layout {
        Some(Layout::Uniform1d { n }) => Mesh::build_uniform_1d(n * factor, mesh.domain[0]),
        Some(Layout::UniformGrid2d { nx, ny }) => {
            Mesh::build_uniform_quad_2d(nx * factor, ny * factor, mesh.domain[0], mesh.domain[1])
        }
        _ => Err(Error::Mesh("only uniform structured meshes can be refined".into())),
    }
}

/// Reference computed by the same scheme on a mesh refined by `factor`,
/// recorded at the time levels `n * coarse.dt` of the coarse run.
///
/// `factor < MIN_REFINEMENT` is rejected unless `guard` is false.
pub fn fine_grid_reference(
    coarse: &Mesh,
    scheme: &FluxScheme,
    u0: InitialData<'_>,
    config: &RunConfig,
    coarse_step: TimeStep,
    factor: usize,
    guard: bool,
) -> Result<ReferenceSolution> {
    if factor == 0 || (guard && factor < MIN_REFINEMENT) {
        return Err(Error::Config(format!(
            "fine-grid refinement factor {factor} is below {MIN_REFINEMENT}"
        )));
    }
    let fine = refine(coarse, factor)?;
    let fine_cfl = solver::compute_dt(&fine, scheme, config)?.dt_cfl;
    let sub = ((coarse_step.dt / fine_cfl) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let ts = TimeStep {
        dt: coarse_step.dt / sub as f64,
        n_steps: coarse_step.n_steps * sub,
        dt_cfl: fine_cfl,
    };
    let cfg = RunConfig {
        record_every: sub,
        ..config.clone()
    };
    let initial = solver::project_initial(&fine, &scheme.system, u0, config.quadrature)?;
    let traj = solver::run_from(&fine, scheme, initial, ts, &cfg, &mut [])?;
    let levels: Arc<Vec<Vec<f64>>> = Arc::new(traj.snapshots.into_iter().map(|(_, f)| f.values).collect());
    let m = scheme.system.m();
    let coarse_dt = coarse_step.dt;
    let level_of = move |t: f64| -> Result<usize> {
        let i = (t / coarse_dt).round();
        if (t - i * coarse_dt).abs() > 1e-9 * coarse_dt.max(t) {
            return Err(Error::Numerical(format!(
                "fine-grid reference is only recorded at multiples of {coarse_dt}, not t = {t}"
            )));
        }
        Ok(i as usize)
    };

    // fine cells grouped by the coarse cell containing their centroid
    let mut owners: Vec<Vec<(usize, f64)>> = vec![Vec::new(); coarse.n_cells()];
    for c in &fine.cells {
        let k = coarse
            .locate(&c.centroid)
            .ok_or_else(|| Error::Mesh("coarse mesh cannot locate points".into()))?;
        owners[k].push((c.id, c.volume));
    }
    let owners = Arc::new(owners);

    let means = {
        let levels = Arc::clone(&levels);
        let owners = Arc::clone(&owners);
        move |k: usize, t: f64| -> Result<Vec<f64>> {
            let u = &levels[level_of(t)?];
            let mut acc = vec![0.0; m];
            let mut vol = 0.0;
            for &(j, w) in &owners[k] {
                vol += w;
                for (a, v) in acc.iter_mut().zip(&u[j * m..(j + 1) * m]) {
                    *a += w * v;
                }
            }
            acc.iter_mut().for_each(|a| *a /= vol);
            Ok(acc)
        }
    };
    let eval = move |x: &[f64], t: f64| -> Result<Vec<f64>> {
        let u = &levels[level_of(t)?];
        let j = fine
            .locate(x)
            .ok_or_else(|| Error::Mesh("fine mesh cannot locate points".into()))?;
        Ok(u[j * m..(j + 1) * m].to_vec())
    };
    Ok(ReferenceSolution {
        kind: ReferenceKind::FineGrid,
        valid_until: coarse_step.dt * coarse_step.n_steps as f64,
        lipschitz_bound: f64::NAN,
        numerical: true,
        eval: Arc::new(eval),
        means: Some((mesh_fingerprint(coarse), Arc::new(means))),
    })
}
