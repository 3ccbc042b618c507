//! Stability and error functionals of a discrete trajectory: weak-BV sums,
//! discrete entropy residuals, time variations, measure masses, cone errors
//! and refinement-rate fits.
//!
//! Interface sums run over ordered neighbour pairs `(K, L)`, so every
//! interface contributes once per orientation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Quadrature};
use crate::numflux::{FluxScheme, InterfaceFluxRecord};
use crate::reference::ReferenceSolution;
use crate::solver::{InitialData, StateField, StepContext, StepHook, Trajectory};
use crate::systems::SystemModel;

/// Tolerance of every structural check (residuals, brackets, Cauchy-Schwarz).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Sub-intervals per axis of the composite rule used for initial masses.
pub const MASS_SUBDIVISIONS: usize = 8;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RelativeEntropyPoint {
    pub t: f64,
    /// `sum_K |K| H(u_K, u_ref_K)` over cells in the cone.
    pub value: f64,
    /// `sum_K |K| |u_K - u_ref_K|^2` over the same cells.
    pub l2_sq: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiagnosticsLedger {
    pub steps: usize,
    /// `sum_n dt sum_(K,L) |s| |G - f(u_K).n|^2`.
    pub wbv_sq: f64,
    /// `sum_n dt sum_(K,L) |s| |G - f(u_K).n|`.
    pub wbv_l1: f64,
    /// `sum_n dt sum_(K,L) |s| |xi_KL - xi(u_K).n|`.
    pub entropy_flux_bv: f64,
    /// `sum_n sum_K |K| |u^{n+1} - u^n|`.
    pub time_bv_u: f64,
    /// `sum_n sum_K |K| |eta(u^{n+1}) - eta(u^n)|`.
    pub time_bv_eta: f64,
    /// `sum_n dt sum_(K,L) |s|`, the measure in the Cauchy-Schwarz bound.
    pub interface_measure: f64,
    /// Largest positive part of the cell entropy residual.
    pub entropy_residual_max: f64,
    /// Same, divided by `|K| / dt`.
    pub entropy_residual_scaled_max: f64,
    pub mu0_mass: f64,
    pub mu_t_mass: f64,
    pub mu_bar0_mass: f64,
    pub mu_bar_t_mass: f64,
    pub gap_checks: usize,
    pub gap_failures: usize,
    /// Smallest `gap - lower_bound` seen on a run interface.
    pub gap_min_margin: f64,
    /// `sum_n dt sum_{K in cone(t^n)} |K| |u_K^n - u_ref_K(t^n)|^2`.
    pub cone_l2_error: f64,
    pub bracket_checks: usize,
    pub bracket_failures: usize,
    pub rel_entropy_series: Vec<RelativeEntropyPoint>,
}

impl DiagnosticsLedger {
    pub fn new() -> Self {
        DiagnosticsLedger {
            gap_min_margin: f64::INFINITY,
            ..Default::default()
        }
    }

    /// `wbv_l1 <= sqrt(wbv_sq * interface_measure)`.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        self.wbv_l1 <= (self.wbv_sq * self.interface_measure).sqrt() * (1.0 + 1e-12) + 1e-300
    }

    pub fn entropy_residual_ok(&self) -> bool {
        self.entropy_residual_scaled_max <= STRUCTURAL_TOL
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Adds the contributions of the step `u^n -> u^{n+1}`. Interface sums
    /// are restricted to pairs with both cells in `mask` (all cells when
    /// `mask` is `None`); residuals and time variations cover every cell of
    /// the mask.
    #[allow(clippy::too_many_arguments)]
    pub fn accumulate_step(
        &mut self,
        mesh: &Mesh,
        scheme: &FluxScheme,
        before: &StateField,
        after: &StateField,
        records: &[InterfaceFluxRecord],
        dt: f64,
        mask: Option<&[bool]>,
    ) -> Result<()> {
        let sys = &scheme.system;
        let m = sys.m();
        let nc = mesh.n_cells();
        if before.values.len() != nc * m || after.values.len() != nc * m {
            return Err(Error::Structure(format!(
                "fields do not hold {m} values for each of {nc} cells"
            )));
        }
        if records.len() != mesh.interfaces.len() {
            return Err(Error::Structure(format!(
                "{} interface records for {} interfaces",
                records.len(),
                mesh.interfaces.len()
            )));
        }
        if mask.is_some_and(|mk| mk.len() != nc) {
            return Err(Error::Structure("cell mask length differs from the mesh".into()));
        }
        let inside = |k: usize| mask.is_none_or(|mk| mk[k]);

        let mut entropy_flux_sum = vec![0.0; nc];
        for r in records {
            let s = &mesh.interfaces[r.interface];
            entropy_flux_sum[s.left] += s.area * r.xi_value;
            entropy_flux_sum[s.right] -= s.area * r.xi_value;
            if !(inside(s.left) && inside(s.right)) {
                continue;
            }
            let w = dt * s.area;
            let (d1, d2) = (r.defect(), r.reverse_defect());
            self.wbv_sq += w * (d1 * d1 + d2 * d2);
            self.wbv_l1 += w * (d1 + d2);
            self.entropy_flux_bv +=
                w * ((r.xi_value - r.entropy_flux_left).abs() + (r.xi_value - r.entropy_flux_right).abs());
            self.interface_measure += 2.0 * w;
            for g in r.gap_checks(sys.beta0, scheme.lambda_star) {
                self.gap_checks += 1;
                if !g.pass {
                    self.gap_failures += 1;
                }
                self.gap_min_margin = self.gap_min_margin.min(g.gap - g.lower_bound);
            }
        }

        let mut tv_u = 0.0;
        let mut tv_eta = 0.0;
        for (k, cell) in mesh.cells.iter().enumerate() {
            let (u, v) = (before.state(k), after.state(k));
            let d_eta = sys.entropy(v) - sys.entropy(u);
            let residual = cell.volume / dt * d_eta + entropy_flux_sum[k];
            if residual > 0.0 {
                self.entropy_residual_max = self.entropy_residual_max.max(residual);
                self.entropy_residual_scaled_max =
                    self.entropy_residual_scaled_max.max(residual * dt / cell.volume);
            }
            if !inside(k) {
                continue;
            }
            let du = u.iter().zip(v).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
            tv_u += cell.volume * du;
            tv_eta += cell.volume * d_eta.abs();
        }
        self.time_bv_u += tv_u;
        self.time_bv_eta += tv_eta;
        self.mu_bar_t_mass += dt * tv_u;
        self.mu_t_mass += dt * tv_eta;
        self.steps += 1;
        Ok(())
    }
}

/// Cells whose centroid lies in the periodic ball `B(0, r)`.
pub fn ball_mask(mesh: &Mesh, r: f64) -> Vec<bool> {
    mesh.cells.iter().map(|c| mesh.periodic_norm(&c.centroid) <= r).collect()
}

fn composite_rule(mesh: &Mesh) -> Quadrature {
    if mesh.dim == 1 {
        Quadrature::Composite(MASS_SUBDIVISIONS)
    } else {
        Quadrature::Composite(MASS_SUBDIVISIONS / 4)
    }
}

/// `(mu0, mu_bar0)`: `int |eta(u0) - eta(u^h(., 0))|` and
/// `int |u0 - u^h(., 0)|` over the masked cells by a composite rule.
pub fn initial_masses(
    mesh: &Mesh,
    sys: &SystemModel,
    u0: InitialData<'_>,
    initial: &StateField,
    mask: Option<&[bool]>,
) -> (f64, f64) {
    let rule = composite_rule(mesh);
    let (mut mu0, mut mu_bar0) = (0.0, 0.0);
    for k in 0..mesh.n_cells() {
        if mask.is_some_and(|mk| !mk[k]) {
            continue;
        }
        let uh = initial.state(k);
        let eta_h = sys.entropy(uh);
        for (x, w) in mesh.cell_quadrature(k, rule) {
            let v = u0(&x);
            mu0 += w * (sys.entropy(&v) - eta_h).abs();
            mu_bar0 += w * v.iter().zip(uh).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        }
    }
    (mu0, mu_bar0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureMasses {
    pub mu0: f64,
    pub mu_t: f64,
    pub mu_bar0: f64,
    pub mu_bar_t: f64,
}

/// Measure masses of a trajectory recorded at every step, restricted to the
/// cells with centroid in `B(0, r)`.
pub fn measure_masses(
    mesh: &Mesh,
    sys: &SystemModel,
    u0: InitialData<'_>,
    trajectory: &Trajectory,
    r: f64,
) -> Result<MeasureMasses> {
    if trajectory.record_every != 1 || trajectory.snapshots.len() != trajectory.n_steps + 1 {
        return Err(Error::Config(
            "measure masses need a trajectory recorded at every step".into(),
        ));
    }
    let mask = ball_mask(mesh, r);
    let (mu0, mu_bar0) = initial_masses(mesh, sys, u0, &trajectory.snapshots[0].1, Some(&mask));
    let (mut mu_t, mut mu_bar_t) = (0.0, 0.0);
    for pair in trajectory.snapshots.windows(2) {
        let (a, b) = (&pair[0].1, &pair[1].1);
        for (k, cell) in mesh.cells.iter().enumerate() {
            if !mask[k] {
                continue;
            }
            let (u, v) = (a.state(k), b.state(k));
            mu_t += trajectory.dt * cell.volume * (sys.entropy(v) - sys.entropy(u)).abs();
            mu_bar_t += trajectory.dt
                * cell.volume
                * u.iter().zip(v).map(|(x, y)| (y - x) * (y - x)).sum::<f64>().sqrt();
        }
    }
    Ok(MeasureMasses {
        mu0,
        mu_t,
        mu_bar0,
        mu_bar_t,
    })
}

/// Cone radius `r + lf (T - t)`.
pub fn cone_radius(r: f64, lf: f64, final_time: f64, t: f64) -> f64 {
    r + lf * (final_time - t)
}

/// Reference cell means at time `t` for every cell.
pub fn reference_means(
    mesh: &Mesh,
    reference: &ReferenceSolution,
    t: f64,
    rule: Quadrature,
) -> Result<Vec<Vec<f64>>> {
    (0..mesh.n_cells())
        .map(|k| reference.cell_mean(mesh, k, t, rule))
        .collect()
}

/// `sum_K |K| |u_K - ref_K|^2` over the masked cells.
pub fn cell_l2_sq(mesh: &Mesh, field: &StateField, means: &[Vec<f64>], mask: Option<&[bool]>) -> f64 {
    let mut acc = 0.0;
    for (k, cell) in mesh.cells.iter().enumerate() {
        if mask.is_some_and(|mk| !mk[k]) {
            continue;
        }
        let e: f64 = field.state(k).iter().zip(&means[k]).map(|(a, b)| (a - b) * (a - b)).sum();
        acc += cell.volume * e;
    }
    acc
}

/// `sum_K |K| H(u_K, ref_K)` over the masked cells.
pub fn relative_entropy_norm(
    mesh: &Mesh,
    sys: &SystemModel,
    field: &StateField,
    means: &[Vec<f64>],
    mask: Option<&[bool]>,
) -> Result<f64> {
    Ok(relative_entropy_sum(mesh, sys, field, means, mask)?.0)
}

/// Relative entropy sum together with the magnitude of the terms it
/// cancels, `sum_K |K| (|eta(v)| + |eta(u)| + |D eta(u) (v - u)|)`.
pub fn relative_entropy_sum(
    mesh: &Mesh,
    sys: &SystemModel,
    field: &StateField,
    means: &[Vec<f64>],
    mask: Option<&[bool]>,
) -> Result<(f64, f64)> {
    let mut acc = 0.0;
    let mut scale = 0.0;
    for (k, cell) in mesh.cells.iter().enumerate() {
        if mask.is_some_and(|mk| !mk[k]) {
            continue;
        }
        let (v, u) = (field.state(k), &means[k]);
        acc += cell.volume * sys.relative_entropy(v, u)?;
        let lin: f64 = sys
            .entropy_gradient(u)
            .iter()
            .zip(v.iter().zip(u))
            .map(|(g, (a, b))| g * (a - b))
            .sum();
        scale += cell.volume * (sys.entropy(v).abs() + sys.entropy(u).abs() + lin.abs());
    }
    Ok((acc, scale))
}

/// `beta0/2 E^2 <= H <= beta1/2 E^2` up to rounding; `rounding_scale` is
/// the magnitude of the terms cancelled in `H`.
pub fn bracket_holds(sys: &SystemModel, rel_entropy: f64, l2_sq: f64, rounding_scale: f64) -> bool {
    let slack = STRUCTURAL_TOL * l2_sq + 64.0 * f64::EPSILON * rounding_scale;
    0.5 * sys.beta0 * l2_sq <= rel_entropy + slack && rel_entropy <= 0.5 * sys.beta1 * l2_sq + slack
}

/// Space-time squared error over the propagation cone of a trajectory
/// recorded at every step:
/// `sum_{n<N} dt sum_{K: |x_K| <= r + lf (T - t^n)} |K| |u_K^n - ref_K(t^n)|^2`.
pub fn cone_l2_error(
    mesh: &Mesh,
    trajectory: &Trajectory,
    reference: &ReferenceSolution,
    r: f64,
    lf: f64,
    rule: Quadrature,
) -> Result<f64> {
    if trajectory.record_every != 1 || trajectory.snapshots.len() != trajectory.n_steps + 1 {
        return Err(Error::Config("the cone error needs a trajectory recorded at every step".into()));
    }
    let final_time = trajectory.dt * trajectory.n_steps as f64;
    let mut acc = 0.0;
    for (t, field) in &trajectory.snapshots[..trajectory.n_steps] {
        let mask = ball_mask(mesh, cone_radius(r, lf, final_time, *t));
        let means = reference_means(mesh, reference, *t, rule)?;
        acc += trajectory.dt * cell_l2_sq(mesh, field, &means, Some(&mask));
    }
    Ok(acc)
}

/// Step hook filling a [`DiagnosticsLedger`] during a run, including the
/// cone error and relative-entropy bracket when a reference is given.
pub struct DiagnosticsMonitor<'a> {
    pub ledger: DiagnosticsLedger,
    /// Ball radius `r`; `None` covers the whole periodic domain.
    pub radius: Option<f64>,
    pub final_time: f64,
    pub lf: f64,
    pub quadrature: Quadrature,
    /// Relative entropy is stored every `series_every` levels (and at the end).
    pub series_every: usize,
    reference: Option<&'a ReferenceSolution>,
    initial_data: Option<InitialData<'a>>,
    mask: Option<Vec<bool>>,
    n_steps: usize,
}

impl<'a> DiagnosticsMonitor<'a> {
    pub fn new(final_time: f64, lf: f64, quadrature: Quadrature) -> Self {
        DiagnosticsMonitor {
            ledger: DiagnosticsLedger::new(),
            radius: None,
            final_time,
            lf,
            quadrature,
            series_every: 1,
            reference: None,
            initial_data: None,
            mask: None,
            n_steps: 0,
        }
    }

    pub fn with_reference(mut self, reference: &'a ReferenceSolution) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn with_initial_data(mut self, u0: InitialData<'a>) -> Self {
        self.initial_data = Some(u0);
        self
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.radius = Some(r);
        self
    }

    pub fn with_series_every(mut self, every: usize) -> Self {
        self.series_every = every.max(1);
        self
    }

    fn cone_mask(&self, mesh: &Mesh, t: f64) -> Option<Vec<bool>> {
        self.radius
            .map(|r| ball_mask(mesh, cone_radius(r, self.lf, self.final_time, t)))
    }

    fn error_level(&mut self, mesh: &Mesh, sys: &SystemModel, n: usize, field: &StateField, dt: f64) -> Result<()> {
        let Some(reference) = self.reference else {
            return Ok(());
        };
        let t = field.time;
        let means = reference_means(mesh, reference, t, self.quadrature)?;
        let mask = self.cone_mask(mesh, t);
        let l2_sq = cell_l2_sq(mesh, field, &means, mask.as_deref());
        if n < self.n_steps {
            self.ledger.cone_l2_error += dt * l2_sq;
        }
        let (value, scale) = relative_entropy_sum(mesh, sys, field, &means, mask.as_deref())?;
        self.ledger.bracket_checks += 1;
        if !bracket_holds(sys, value, l2_sq, scale) {
            self.ledger.bracket_failures += 1;
        }
        if n.is_multiple_of(self.series_every) || n == self.n_steps {
            self.ledger.rel_entropy_series.push(RelativeEntropyPoint { t, value, l2_sq });
        }
        Ok(())
    }
}

impl StepHook for DiagnosticsMonitor<'_> {
    fn on_start(&mut self, mesh: &Mesh, scheme: &FluxScheme, field: &StateField, dt: f64) -> Result<()> {
        self.n_steps = (self.final_time / dt).round() as usize;
        self.mask = self.radius.map(|r| ball_mask(mesh, r));
        if let Some(u0) = self.initial_data {
            let (mu0, mu_bar0) = initial_masses(mesh, &scheme.system, u0, field, self.mask.as_deref());
            self.ledger.mu0_mass = mu0;
            self.ledger.mu_bar0_mass = mu_bar0;
        }
        self.error_level(mesh, &scheme.system, 0, field, dt)
    }

    fn after_step(&mut self, ctx: &StepContext<'_>) -> Result<()> {
        self.ledger.accumulate_step(
            ctx.mesh,
            ctx.scheme,
            ctx.before,
            ctx.after,
            ctx.records,
            ctx.dt,
            self.mask.as_deref(),
        )?;
        self.error_level(ctx.mesh, &ctx.scheme.system, ctx.n + 1, ctx.after, ctx.dt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub dt: f64,
    /// Square root of the cone error.
    pub err_l2: f64,
    pub wbv_l1: f64,
    pub wbv_sq: f64,
    pub mu0: f64,
    pub mu_t: f64,
    pub mu_bar0: f64,
    pub mu_bar_t: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceTable {
    /// Sorted by decreasing `h`.
    pub rows: Vec<ConvergenceRow>,
    pub fitted_rate: Option<f64>,
}

impl ConvergenceTable {
    pub fn new(mut rows: Vec<ConvergenceRow>) -> Self {
        rows.sort_by(|a, b| b.h.total_cmp(&a.h));
        let mut table = ConvergenceTable { rows, fitted_rate: None };
        table.fitted_rate = fit_rate(&table).ok();
        table
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,dt,err_l2,wbv_l1,wbv_sq,mu0,mu_t\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.h, r.dt, r.err_l2, r.wbv_l1, r.wbv_sq, r.mu0, r.mu_t
            ));
        }
        match self.fitted_rate {
            Some(rate) => s.push_str(&format!("# rate_fit = {rate}\n")),
            None => s.push_str("# rate_fit = undefined\n"),
        }
        s
    }
}

/// Least-squares slope of `log(err_l2)` against `log(h)`.
pub fn fit_rate(table: &ConvergenceTable) -> Result<f64> {
    let pts: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.h, r.err_l2)).collect();
    log_log_slope(&pts)
}

pub fn log_log_slope(pts: &[(f64, f64)]) -> Result<f64> {
    if pts.len() < 3 {
        return Err(Error::Config(format!("a rate fit needs at least 3 levels, got {}", pts.len())));
    }
    if pts.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
        return Err(Error::Numerical("rate fit needs positive h and errors".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("rate fit needs distinct h values".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// `last <= 1.5 first`, or the sequence is non-increasing.
pub fn no_growth(values: &[f64]) -> bool {
    match (values.first(), values.last()) {
        (Some(&first), Some(&last)) => {
            last <= 1.5 * first || values.windows(2).all(|w| w[1] <= w[0])
        }
        _ => true,
    }
}

/// `max / min` of a positive sequence (1 for an all-zero one).
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        1.0
    } else if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WbvScaling {
    /// `wbv_l1 sqrt(h)` per level, coarse to fine.
    pub wbv_l1_sqrt_h: Vec<f64>,
    pub wbv_sq: Vec<f64>,
    pub sup_wbv_l1_sqrt_h: f64,
    pub sup_wbv_sq: f64,
    /// `max / min` of `wbv_sq` across levels.
    pub wbv_sq_spread: f64,
    pub l1_bounded: bool,
    pub sq_bounded: bool,
}

pub fn wbv_scaling_report(table: &ConvergenceTable) -> WbvScaling {
    let l1: Vec<f64> = table.rows.iter().map(|r| r.wbv_l1 * r.h.sqrt()).collect();
    let sq: Vec<f64> = table.rows.iter().map(|r| r.wbv_sq).collect();
    WbvScaling {
        sup_wbv_l1_sqrt_h: l1.iter().cloned().fold(0.0, f64::max),
        sup_wbv_sq: sq.iter().cloned().fold(0.0, f64::max),
        wbv_sq_spread: spread(&sq),
        l1_bounded: no_growth(&l1),
        sq_bounded: no_growth(&sq),
        wbv_l1_sqrt_h: l1,
        wbv_sq: sq,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassScaling {
    pub mu0_over_h: Vec<f64>,
    pub mu_bar0_over_h: Vec<f64>,
    pub mu_t_over_sqrt_h: Vec<f64>,
    pub mu_bar_t_over_sqrt_h: Vec<f64>,
    /// Both initial ratios vary by less than 2x.
    pub initial_pass: bool,
    /// Both time ratios show no growth.
    pub time_pass: bool,
}

pub fn mass_scaling_report(table: &ConvergenceTable) -> MassScaling {
    let per = |f: &dyn Fn(&ConvergenceRow) -> f64| table.rows.iter().map(f).collect::<Vec<f64>>();
    let mu0 = per(&|r| r.mu0 / r.h);
    let mub0 = per(&|r| r.mu_bar0 / r.h);
    let mut_ = per(&|r| r.mu_t / r.h.sqrt());
    let mubt = per(&|r| r.mu_bar_t / r.h.sqrt());
    MassScaling {
        initial_pass: spread(&mu0) < 2.0 && spread(&mub0) < 2.0,
        time_pass: no_growth(&mut_) && no_growth(&mubt),
        mu0_over_h: mu0,
        mu_bar0_over_h: mub0,
        mu_t_over_sqrt_h: mut_,
        mu_bar_t_over_sqrt_h: mubt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numflux::{make_rusanov, WaveSpeed};
    use crate::solver::{interface_records, step};
    use crate::systems::{make_burgers, AdmissibleSet};

    fn row(h: f64, err: f64) -> ConvergenceRow {
        ConvergenceRow {
            h,
            dt: h,
            err_l2: err,
            wbv_l1: 0.0,
            wbv_sq: 0.0,
            mu0: 0.0,
            mu_t: 0.0,
            mu_bar0: 0.0,
            mu_bar_t: 0.0,
        }
    }

    #[test]
    fn exact_power_laws() {
        let hs = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];
        let t = ConvergenceTable::new(hs.iter().map(|&h| row(h, 3.0 * h)).collect());
        assert!((t.fitted_rate.unwrap() - 1.0).abs() < 1e-12);
        let t = ConvergenceTable::new(hs.iter().map(|&h| row(h, h.powf(0.25))).collect());
        assert!((t.fitted_rate.unwrap() - 0.25).abs() < 1e-12);
        assert!(t.rows.windows(2).all(|w| w[0].h > w[1].h));
        assert!(fit_rate(&ConvergenceTable::new(vec![row(0.1, 1.0), row(0.05, 0.5)])).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = ConvergenceTable::new(vec![row(0.5, 1.0), row(0.25, 0.5), row(0.125, 0.25)]);
        let csv = t.to_csv();
        assert!(csv.starts_with("h,dt,err_l2,wbv_l1,wbv_sq,mu0,mu_t\n0.5,0.5,1,"));
        let footer = csv.lines().last().unwrap();
        let rate: f64 = footer.strip_prefix("# rate_fit = ").unwrap().parse().unwrap();
        assert!((rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn burgers_step_hand_values() {
        let mesh = Mesh::build_uniform_1d(3, 3.0).unwrap();
        let sys = make_burgers(AdmissibleSet::Box {
            lower: vec![-1.0],
            upper: vec![1.0],
        })
        .unwrap();
        let scheme = make_rusanov(&sys, WaveSpeed::Fixed(1.0)).unwrap();
        let before = StateField {
            values: vec![0.0, 1.0, 0.0],
            m: 1,
            time: 0.0,
            mesh_id: crate::solver::mesh_fingerprint(&mesh),
        };
        let dt = 0.1;
        let recs = interface_records(&mesh, &scheme, &before);
        let after = step(&mesh, &scheme, &before, dt).unwrap();
        let mut ledger = DiagnosticsLedger::new();
        ledger.accumulate_step(&mesh, &scheme, &before, &after, &recs, dt, None).unwrap();
        // interface 0 joins cells 2|0 (0, 0): no defect
        // interface 1 joins 0|1 (0, 1): G = 1/4 - 1/2 = -1/4, defects 1/4 and 3/4
        // interface 2 joins 1|2 (1, 0): G = 1/4 + 1/2 = 3/4, defects 1/4 and 3/4
        let l1 = dt * 2.0 * (0.25 + 0.75);
        let sq = dt * 2.0 * (0.0625 + 0.5625);
        assert!((ledger.wbv_l1 - l1).abs() < 1e-15);
        assert!((ledger.wbv_sq - sq).abs() < 1e-15);
        assert!((ledger.interface_measure - dt * 6.0).abs() < 1e-15);
        assert!(ledger.cauchy_schwarz_holds());
        assert!(ledger.entropy_residual_ok());
    }

    #[test]
    fn constant_state_has_zero_increments() {
        let mesh = Mesh::build_uniform_1d(8, 1.0).unwrap();
        let sys = make_burgers(AdmissibleSet::Box {
            lower: vec![-1.0],
            upper: vec![1.0],
        })
        .unwrap();
        let scheme = make_rusanov(&sys, WaveSpeed::Auto).unwrap();
        let f = StateField {
            values: vec![0.4; 8],
            m: 1,
            time: 0.0,
            mesh_id: crate::solver::mesh_fingerprint(&mesh),
        };
        let recs = interface_records(&mesh, &scheme, &f);
        let next = step(&mesh, &scheme, &f, 0.01).unwrap();
        let mut ledger = DiagnosticsLedger::new();
        ledger.accumulate_step(&mesh, &scheme, &f, &next, &recs, 0.01, None).unwrap();
        assert_eq!(
            (ledger.wbv_l1, ledger.wbv_sq, ledger.time_bv_u, ledger.mu_t_mass, ledger.entropy_residual_max),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
        assert!(ledger.accumulate_step(&mesh, &scheme, &f, &next, &recs[1..], 0.01, None).is_err());
    }

    #[test]
    fn growth_rules() {
        assert!(no_growth(&[1.0, 1.2, 1.4]));
        assert!(!no_growth(&[1.0, 1.2, 1.6]));
        assert_eq!(spread(&[0.0, 0.0]), 1.0);
        assert_eq!(spread(&[1.0, 4.0, 2.0]), 4.0);
    }
}
