//! Explicit finite-volume time stepping
//!
//! ```text
//! |K| (u_K^{n+1} - u_K^n) / dt + sum_L |sigma_KL| G_KL(u_K^n, u_L^n) = 0
//! ```
//!
//! with a uniform time step fitted so that `n_steps * dt == final_time`.

use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Quadrature};
use crate::numflux::{FluxScheme, InterfaceFluxRecord};
use crate::systems::SystemModel;

pub type InitialData<'a> = &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CflMode {
    Standard,
    Strengthened,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub final_time: f64,
    pub cfl_mode: CflMode,
    pub zeta: f64,
    pub record_every: usize,
    pub check_admissibility: bool,
    pub quadrature: Quadrature,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            final_time: 1.0,
            cfl_mode: CflMode::Strengthened,
            zeta: 0.1,
            record_every: 1,
            check_admissibility: true,
            quadrature: Quadrature::Midpoint,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::Config(format!("final time must be positive, got {}", self.final_time)));
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return Err(Error::Config(format!("zeta must lie in (0, 1), got {}", self.zeta)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Cell states at one time level, stored contiguously (`m` values per cell).
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub values: Vec<f64>,
    pub m: usize,
    pub time: f64,
    pub mesh_id: u64,
}

impl StateField {
    pub fn n_cells(&self) -> usize {
        self.values.len() / self.m
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.values[k * self.m..(k + 1) * self.m]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.m)
    }

    /// First cell whose state leaves the admissible set.
    pub fn first_inadmissible(&self, sys: &SystemModel) -> Option<usize> {
        self.states().position(|u| !sys.omega_contains(u))
    }

    /// `sum_K |K| u_K`, accumulated in cell order.
    pub fn total_mass(&self, mesh: &Mesh) -> Vec<f64> {
        let mut mass = vec![0.0; self.m];
        for (cell, u) in mesh.cells.iter().zip(self.states()) {
            for (acc, x) in mass.iter_mut().zip(u) {
                *acc += cell.volume * x;
            }
        }
        mass
    }
}

/// Geometry-derived identifier tying a field to the mesh it was built on.
pub fn mesh_fingerprint(mesh: &Mesh) -> u64 {
    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    mesh.dim.hash(&mut hasher);
    mesh.cells.len().hash(&mut hasher);
    mesh.interfaces.len().hash(&mut hasher);
    mesh.h.to_bits().hash(&mut hasher);
    mesh.a.to_bits().hash(&mut hasher);
    for c in &mesh.cells {
        c.volume.to_bits().hash(&mut hasher);
    }
    hasher.finish()
}

/// Cell averages of `u0` under `rule`, each checked against the admissible set.
pub fn project_initial(
    mesh: &Mesh,
    sys: &SystemModel,
    u0: InitialData<'_>,
    rule: Quadrature,
) -> Result<StateField> {
    let m = sys.m();
    let mut values = Vec::with_capacity(mesh.n_cells() * m);
    for k in 0..mesh.n_cells() {
        let mean = cell_mean(mesh, k, m, u0, rule);
        if !sys.omega_contains(&mean) {
            return Err(Error::admissibility(&mean, format!("projected initial value in cell {k}")));
        }
        values.extend(mean);
    }
    Ok(StateField {
        values,
        m,
        time: 0.0,
        mesh_id: mesh_fingerprint(mesh),
    })
}

/// `(1/|K|) int_K g` by the given quadrature.
pub fn cell_mean(mesh: &Mesh, k: usize, m: usize, g: &dyn Fn(&[f64]) -> Vec<f64>, rule: Quadrature) -> Vec<f64> {
    let mut acc = vec![0.0; m];
    for (x, w) in mesh.cell_quadrature(k, rule) {
        for (a, v) in acc.iter_mut().zip(g(&x)) {
            *a += w * v;
        }
    }
    let vol = mesh.cells[k].volume;
    acc.iter_mut().for_each(|a| *a /= vol);
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeStep {
    /// Uniform step actually used.
    pub dt: f64,
    pub n_steps: usize,
    /// Step allowed by the CFL condition before fitting to the final time.
    pub dt_cfl: f64,
}

/// Largest step allowed by the CFL condition of `mode`.
///
/// Standard: `min(a^2 h / lambda*, min_K |K| / (lambda* |dK|))`.
/// Strengthened: `(beta0/beta1) (a^2/lambda*) (1 - zeta) h`, capped by the
/// per-cell bound.
pub fn cfl_time_step(
    mesh: &Mesh,
    sys: &SystemModel,
    lambda_star: f64,
    mode: CflMode,
    zeta: f64,
) -> Result<f64> {
    let inputs = [mesh.a, mesh.h, lambda_star, sys.beta0, sys.beta1, zeta];
    if inputs.iter().any(|x| !x.is_finite()) || !(lambda_star > 0.0) {
        return Err(Error::Config(format!("non-finite CFL inputs {inputs:?}")));
    }
    let per_cell = (0..mesh.n_cells())
        .map(|k| mesh.cells[k].volume / (lambda_star * mesh.perimeter(k)))
        .fold(f64::INFINITY, f64::min);
    let global = mesh.a * mesh.a * mesh.h / lambda_star;
    let dt = match mode {
        CflMode::Standard => global.min(per_cell),
        CflMode::Strengthened => {
            (sys.beta0 / sys.beta1 * global * (1.0 - zeta)).min(per_cell)
        }
    };
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("CFL produced an invalid time step {dt}")));
    }
    Ok(dt)
}

/// Uniform step no larger than the CFL step with `n_steps * dt == T`.
pub fn fit_to_final_time(dt_cfl: f64, final_time: f64) -> TimeStep {
    let mut n_steps = (final_time / dt_cfl).ceil().max(1.0) as usize;
    let mut dt = final_time / n_steps as f64;
    while dt > dt_cfl {
        n_steps += 1;
        dt = final_time / n_steps as f64;
    }
    TimeStep { dt, n_steps, dt_cfl }
}

pub fn compute_dt(mesh: &Mesh, scheme: &FluxScheme, config: &RunConfig) -> Result<TimeStep> {
    config.validate()?;
    let dt_cfl = cfl_time_step(mesh, &scheme.system, scheme.lambda_star, config.cfl_mode, config.zeta)?;
    Ok(fit_to_final_time(dt_cfl, config.final_time))
}

fn check_shapes(mesh: &Mesh, scheme: &FluxScheme, field: &StateField) -> Result<()> {
    if field.m != scheme.system.m() || field.values.len() != mesh.n_cells() * field.m {
        return Err(Error::Structure(format!(
            "field with {} values (m = {}) does not match {} cells of a system with m = {}",
            field.values.len(),
            field.m,
            mesh.n_cells(),
            scheme.system.m()
        )));
    }
    if mesh.dim != scheme.system.d() {
        return Err(Error::Structure(format!(
            "mesh dimension {} differs from system dimension {}",
            mesh.dim,
            scheme.system.d()
        )));
    }
    Ok(())
}

fn apply_update(
    mesh: &Mesh,
    field: &StateField,
    dt: f64,
    fluxes: impl Iterator<Item = (usize, Vec<f64>)>,
) -> StateField {
    let m = field.m;
    let mut balance = vec![0.0; field.values.len()];
    // one flux per interface, scattered with opposite signs, in interface order
    for (i, g) in fluxes {
        let s = &mesh.interfaces[i];
        for c in 0..m {
            let contrib = s.area * g[c];
            balance[s.left * m + c] += contrib;
            balance[s.right * m + c] -= contrib;
        }
    }
    let mut values = field.values.clone();
    for (k, cell) in mesh.cells.iter().enumerate() {
        let scale = dt / cell.volume;
        for c in 0..m {
            values[k * m + c] -= scale * balance[k * m + c];
        }
    }
    StateField {
        values,
        m,
        time: field.time + dt,
        mesh_id: field.mesh_id,
    }
}

fn check_new_states(scheme: &FluxScheme, next: &StateField, step_index: usize) -> Result<()> {
    if let Some(k) = next.first_inadmissible(&scheme.system) {
        return Err(Error::admissibility(
            next.state(k),
            format!("cell {k} after step {step_index}"),
        ));
    }
    Ok(())
}

/// One explicit update of every cell.
pub fn step(mesh: &Mesh, scheme: &FluxScheme, field: &StateField, dt: f64) -> Result<StateField> {
    check_shapes(mesh, scheme, field)?;
    let mut buf = vec![0.0; field.m];
    let fluxes = mesh.interfaces.iter().map(|s| {
        scheme.flux_into(field.state(s.left), field.state(s.right), &s.normal, &mut buf);
        (s.id, buf.clone())
    });
    Ok(apply_update(mesh, field, dt, fluxes))
}

/// Per-interface records for the current time level, in interface order.
pub fn interface_records(mesh: &Mesh, scheme: &FluxScheme, field: &StateField) -> Vec<InterfaceFluxRecord> {
    mesh.interfaces
        .iter()
        .map(|s| InterfaceFluxRecord::new(scheme, s.id, field.state(s.left), field.state(s.right), &s.normal))
        .collect()
}

/// Data handed to hooks after each step.
pub struct StepContext<'a> {
    /// Index `n` of the step just taken (from `t^n` to `t^{n+1}`).
    pub n: usize,
    pub dt: f64,
    pub mesh: &'a Mesh,
    pub scheme: &'a FluxScheme,
    pub before: &'a StateField,
    pub after: &'a StateField,
    /// Interface records at time level `n`; empty unless some hook asked for them.
    pub records: &'a [InterfaceFluxRecord],
}

pub trait StepHook {
    fn after_step(&mut self, ctx: &StepContext<'_>) -> Result<()>;

    fn wants_records(&self) -> bool {
        true
    }

    /// Called once with the projected initial field before the first step.
    fn on_start(&mut self, _mesh: &Mesh, _scheme: &FluxScheme, _field: &StateField, _dt: f64) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(t^n, u^n)` for `n` multiple of `record_every`, plus the final level.
    pub snapshots: Vec<(f64, StateField)>,
    pub dt: f64,
    pub n_steps: usize,
    pub dt_cfl: f64,
    pub record_every: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateField {
        &self.snapshots.last().expect("trajectory has an initial snapshot").1
    }
}

/// Projects `u0`, then advances `n_steps` uniform steps, calling every hook
/// after each one.
pub fn run(
    mesh: &Mesh,
    scheme: &FluxScheme,
    u0: InitialData<'_>,
    config: &RunConfig,
    hooks: &mut [&mut dyn StepHook],
) -> Result<Trajectory> {
    let ts = compute_dt(mesh, scheme, config)?;
    let initial = project_initial(mesh, &scheme.system, u0, config.quadrature)?;
    run_from(mesh, scheme, initial, ts, config, hooks)
}

/// Time loop from an already projected field.
pub fn run_from(
    mesh: &Mesh,
    scheme: &FluxScheme,
    initial: StateField,
    ts: TimeStep,
    config: &RunConfig,
    hooks: &mut [&mut dyn StepHook],
) -> Result<Trajectory> {
    check_shapes(mesh, scheme, &initial)?;
    let want_records = hooks.iter().any(|h| h.wants_records());
    for h in hooks.iter_mut() {
        h.on_start(mesh, scheme, &initial, ts.dt)?;
    }
    let mut snapshots = vec![(0.0, initial.clone())];
    let mut current = initial;
    for n in 0..ts.n_steps {
        let (mut next, records) = if want_records {
            let records = interface_records(mesh, scheme, &current);
            let next = apply_update(
                mesh,
                &current,
                ts.dt,
                records.iter().map(|r| (r.interface, r.g_value.clone())),
            );
            (next, records)
        } else {
            (step(mesh, scheme, &current, ts.dt)?, Vec::new())
        };
        // t^{n+1} = (n+1) dt exactly, rather than an accumulated sum
        next.time = (n + 1) as f64 * ts.dt;
        if config.check_admissibility {
            check_new_states(scheme, &next, n)?;
        }
        let ctx = StepContext {
            n,
            dt: ts.dt,
            mesh,
            scheme,
            before: &current,
            after: &next,
            records: &records,
        };
        for h in hooks.iter_mut() {
            h.after_step(&ctx)?;
        }
        if (n + 1) % config.record_every == 0 || n + 1 == ts.n_steps {
            snapshots.push((next.time, next.clone()));
        }
        current = next;
    }
    Ok(Trajectory {
        snapshots,
        dt: ts.dt,
        n_steps: ts.n_steps,
        dt_cfl: ts.dt_cfl,
        record_every: config.record_every,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numflux::{make_godunov_scalar, make_rusanov, WaveSpeed};
    use crate::systems::{make_advection, make_burgers, AdmissibleSet};

    fn bx(lo: f64, hi: f64) -> AdmissibleSet {
        AdmissibleSet::Box {
            lower: vec![lo],
            upper: vec![hi],
        }
    }

    #[test]
    fn cfl_examples() {
        // a = 0.5 and h = 0.01 on a 100-cell unit mesh; lambda* = 2
        let mesh = Mesh::build_uniform_1d(100, 1.0).unwrap();
        let sys = make_burgers(bx(-1.0, 1.0)).unwrap();
        let std_dt = cfl_time_step(&mesh, &sys, 2.0, CflMode::Standard, 0.1).unwrap();
        assert!((std_dt - 0.00125).abs() < 1e-12 * 0.00125);
        let strong = cfl_time_step(&mesh, &sys, 2.0, CflMode::Strengthened, 0.1).unwrap();
        assert!((strong - 0.001125).abs() < 1e-12 * 0.001125);
        let mut prev = f64::INFINITY;
        for zeta in [0.1, 0.5, 0.9, 0.99, 0.999999] {
            let dt = cfl_time_step(&mesh, &sys, 2.0, CflMode::Strengthened, zeta).unwrap();
            assert!(dt < prev);
            prev = dt;
        }
        assert!(prev < 1e-8);
        assert!(cfl_time_step(&mesh, &sys, f64::NAN, CflMode::Standard, 0.1).is_err());
    }

    #[test]
    fn fitted_step_lands_on_final_time() {
        let ts = fit_to_final_time(0.001125, 0.2);
        assert!(ts.dt <= 0.001125);
        assert_eq!(ts.n_steps, 178);
        assert!((ts.n_steps as f64 * ts.dt - 0.2).abs() < 1e-15);
        let short = fit_to_final_time(0.1, 0.01);
        assert_eq!((short.n_steps, short.dt), (1, 0.01));
    }

    #[test]
    fn projection_examples() {
        let mesh = Mesh::build_uniform_1d(4, 1.0).unwrap();
        let sys = make_burgers(bx(-2.0, 2.0)).unwrap();
        let c = project_initial(&mesh, &sys, &|_| vec![0.7], Quadrature::Gauss3).unwrap();
        assert!(c.values.iter().all(|&v| v == 0.7));
        let lin = project_initial(&mesh, &sys, &|x| vec![x[0]], Quadrature::Gauss3).unwrap();
        assert!((lin.values[0] - 0.125).abs() < 1e-16);
        let tau = std::f64::consts::TAU;
        let s = project_initial(&mesh, &sys, &|x| vec![(tau * x[0]).sin()], Quadrature::Midpoint).unwrap();
        for (k, v) in s.values.iter().enumerate() {
            assert_eq!(*v, (tau * (0.125 + 0.25 * k as f64)).sin());
        }
        let err = project_initial(&mesh, &sys, &|_| vec![3.0], Quadrature::Midpoint).unwrap_err();
        assert!(err.to_string().contains("cell 0"));
    }

    #[test]
    fn upwind_step_by_hand() {
        // dt/dx = 0.5 with speed 1 and the upwind flux
        let mesh = Mesh::build_uniform_1d(3, 3.0).unwrap();
        let sys = make_advection(vec![1.0], bx(0.0, 1.0)).unwrap();
        let g = make_godunov_scalar(&sys).unwrap();
        let field = StateField {
            values: vec![0.0, 1.0, 0.0],
            m: 1,
            time: 0.0,
            mesh_id: mesh_fingerprint(&mesh),
        };
        let next = step(&mesh, &g, &field, 0.5).unwrap();
        assert_eq!(next.values, vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn constant_field_is_steady_and_mass_is_conserved() {
        let mesh = Mesh::build_perturbed_quad_2d(6, 6, 1.0, 1.0, 0.2, 4).unwrap();
        let sys = make_advection(vec![0.6, -0.3], bx(-1.0, 2.0)).unwrap();
        let r = make_rusanov(&sys, WaveSpeed::Auto).unwrap();
        let cfg = RunConfig {
            final_time: 0.05,
            ..RunConfig::default()
        };
        let traj = run(&mesh, &r, &|_| vec![0.4], &cfg, &mut []).unwrap();
        for v in &traj.final_state().values {
            assert!((v - 0.4).abs() < 1e-14);
        }
        let tau = std::f64::consts::TAU;
        let u0 = |x: &[f64]| vec![0.5 + 0.4 * (tau * x[0]).sin() * (tau * x[1]).cos()];
        let traj = run(&mesh, &r, &u0, &cfg, &mut []).unwrap();
        let m0 = traj.snapshots[0].1.total_mass(&mesh)[0];
        for (_, f) in &traj.snapshots {
            assert!((f.total_mass(&mesh)[0] - m0).abs() <= 1e-13 * m0.abs());
        }
    }

    #[test]
    fn short_horizon_takes_a_single_step() {
        let mesh = Mesh::build_uniform_1d(10, 1.0).unwrap();
        let sys = make_burgers(bx(-1.0, 1.0)).unwrap();
        let r = make_rusanov(&sys, WaveSpeed::Auto).unwrap();
        let cfg = RunConfig {
            final_time: 1e-6,
            ..RunConfig::default()
        };
        let traj = run(&mesh, &r, &|_| vec![0.2], &cfg, &mut []).unwrap();
        assert_eq!(traj.n_steps, 1);
        assert_eq!(traj.snapshots.len(), 2);
        assert_eq!(traj.snapshots[1].0, 1e-6);
    }

    #[test]
    fn mismatched_field_rejected() {
        let mesh = Mesh::build_uniform_1d(10, 1.0).unwrap();
        let sys = make_burgers(bx(-1.0, 1.0)).unwrap();
        let r = make_rusanov(&sys, WaveSpeed::Auto).unwrap();
        let field = StateField {
            values: vec![0.0; 7],
            m: 1,
            time: 0.0,
            mesh_id: 0,
        };
        assert!(matches!(step(&mesh, &r, &field, 0.01), Err(Error::Structure(_))));
    }

    #[test]
    fn invalid_config_rejected() {
        for cfg in [
            RunConfig { zeta: 1.5, ..RunConfig::default() },
            RunConfig { zeta: 0.0, ..RunConfig::default() },
            RunConfig { final_time: -1.0, ..RunConfig::default() },
            RunConfig { record_every: 0, ..RunConfig::default() },
        ] {
            assert!(cfg.validate().is_err());
        }
    }
}
