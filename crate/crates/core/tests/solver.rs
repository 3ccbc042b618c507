use hypflux::diagnostics::{cone_l2_error, initial_masses, measure_masses, spread, DiagnosticsMonitor};
use hypflux::initial::InitialCondition;
use hypflux::mesh::{Mesh, Quadrature};
use hypflux::numflux::{make_godunov_scalar, make_rusanov, WaveSpeed};
use hypflux::reference::exact_advection;
use hypflux::solver::{self, fit_to_final_time, project_initial, CflMode, RunConfig};
use hypflux::systems::{make_advection, make_burgers, AdmissibleSet};
use proptest::prelude::*;

fn unit_box(lo: f64, hi: f64) -> AdmissibleSet {
    AdmissibleSet::Box {
        lower: vec![lo],
        upper: vec![hi],
    }
}

#[test]
fn constant_state_is_steady_with_zero_diagnostics() {
    let sys = make_advection(vec![1.0, 0.4], unit_box(0.0, 2.0)).unwrap();
    let scheme = make_rusanov(&sys, WaveSpeed::Auto).unwrap();
    let mesh = Mesh::build_perturbed_quad_2d(8, 8, 1.0, 1.0, 0.2, 4).unwrap();
    let u0 = |_: &[f64]| vec![1.3];
    let config = RunConfig {
        final_time: 0.1,
        ..RunConfig::default()
    };
    let mut monitor = DiagnosticsMonitor::new(0.1, sys.lf, Quadrature::Midpoint).with_initial_data(&u0);
    let traj = solver::run(&mesh, &scheme, &u0, &config, &mut [&mut monitor]).unwrap();
    assert!(traj.final_state().states().all(|s| (s[0] - 1.3).abs() < 1e-14));
    let l = &monitor.ledger;
    assert!(l.wbv_l1.abs() < 1e-13 && l.wbv_sq.abs() < 1e-26);
    assert!(l.mu0_mass.abs() < 1e-13 && l.mu_t_mass.abs() < 1e-13);
}

#[test]
fn mass_is_conserved_on_a_perturbed_mesh() {
    let bump = InitialCondition::GaussianBump {
        base: vec![1.0],
        amplitude: vec![0.5],
        center: vec![0.4, 0.5],
        width: 0.1,
        domain: vec![1.0, 1.0],
    };
    let u0 = |x: &[f64]| bump.eval(x);
    let sys = make_advection(vec![0.8, -0.6], unit_box(0.9, 1.6)).unwrap();
    let mesh = Mesh::build_perturbed_quad_2d(16, 16, 1.0, 1.0, 0.2, 9).unwrap();
    for scheme in [make_rusanov(&sys, WaveSpeed::Auto).unwrap(), make_godunov_scalar(&sys).unwrap()] {
        let config = RunConfig {
            final_time: 0.2,
            record_every: 1000,
            ..RunConfig::default()
        };
        let traj = solver::run(&mesh, &scheme, &u0, &config, &mut []).unwrap();
        let a = traj.snapshots[0].1.total_mass(&mesh)[0];
        let b = traj.final_state().total_mass(&mesh)[0];
        assert!((a - b).abs() < 1e-13, "{a} {b}");
    }
}

#[test]
fn one_upwind_step_against_exact_transport() {
    // 4 cells, speed 1, two steps; only level n = 1 contributes to the error
    let u0c = InitialCondition::Sine {
        mean: vec![1.0],
        amplitude: vec![0.5],
        wavenumber: vec![1.0],
        phase: vec![0.0],
    };
    let u0 = |x: &[f64]| u0c.eval(x);
    let sys = make_advection(vec![1.0], unit_box(0.4, 1.6)).unwrap();
    let scheme = make_godunov_scalar(&sys).unwrap();
    let mesh = Mesh::build_uniform_1d(4, 1.0).unwrap();
    let ts = solver::compute_dt(&mesh, &scheme, &RunConfig { final_time: 1.0, ..RunConfig::default() }).unwrap();
    let config = RunConfig {
        final_time: 1.5 * ts.dt_cfl,
        ..RunConfig::default()
    };
    let traj = solver::run(&mesh, &scheme, &u0, &config, &mut []).unwrap();
    assert_eq!(traj.n_steps, 2);
    let dt = traj.dt;

    let h = 0.25;
    let xs: Vec<f64> = (0..4).map(|k| (k as f64 + 0.5) * h).collect();
    let u: Vec<f64> = xs.iter().map(|&x| u0(&[x])[0]).collect();
    let u1: Vec<f64> = (0..4).map(|k| u[k] - dt / h * (u[k] - u[(k + 3) % 4])).collect();
    let exact: Vec<f64> = xs.iter().map(|&x| u0(&[x - dt])[0]).collect();
    let oracle: f64 = dt * (0..4).map(|k| h * (u1[k] - exact[k]).powi(2)).sum::<f64>();

    let reference = exact_advection(vec![1.0], u0c.clone(), vec![1.0]);
    let err = cone_l2_error(&mesh, &traj, &reference, 1.0, sys.lf, Quadrature::Midpoint).unwrap();
    assert!((err - oracle).abs() < 1e-15, "{err} vs {oracle}");
}

#[test]
fn initial_mass_of_a_linear_profile_matches_the_integral() {
    // u0(x) = x, eta = u^2 / 2: int_K |x^2 - c^2| / 2 in closed form
    let sys = make_burgers(unit_box(-0.1, 1.1)).unwrap();
    let u0 = |x: &[f64]| vec![x[0]];
    let mut ratios = Vec::new();
    for n in [16, 32, 64, 128] {
        let mesh = Mesh::build_uniform_1d(n, 1.0).unwrap();
        let field = project_initial(&mesh, &sys, &u0, Quadrature::Midpoint).unwrap();
        let (mu0, mu_bar0) = initial_masses(&mesh, &sys, &u0, &field, None);
        let h = 1.0 / n as f64;
        let prim = |x: f64, c: f64| (x * x * x / 3.0 - c * c * x) / 2.0;
        let oracle: f64 = (0..n)
            .map(|k| {
                let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
                let c = 0.5 * (a + b);
                (prim(c, c) - prim(a, c)).abs() + (prim(b, c) - prim(c, c)).abs()
            })
            .sum();
        assert!((mu0 - oracle).abs() < 0.05 * oracle, "n={n}: {mu0} vs {oracle}");
        assert!((mu_bar0 - h / 4.0).abs() < 0.05 * h);
        ratios.push(mu0 / h);
    }
    assert!(spread(&ratios) < 2.0);
}

#[test]
fn measure_masses_vanish_for_steady_runs() {
    let sys = make_burgers(unit_box(0.0, 1.0)).unwrap();
    let scheme = make_godunov_scalar(&sys).unwrap();
    let mesh = Mesh::build_uniform_1d(16, 1.0).unwrap();
    let u0 = |_: &[f64]| vec![0.5];
    let traj = solver::run(&mesh, &scheme, &u0, &RunConfig { final_time: 0.1, ..RunConfig::default() }, &mut []).unwrap();
    let m = measure_masses(&mesh, &sys, &u0, &traj, 1.0).unwrap();
    assert_eq!((m.mu0, m.mu_t, m.mu_bar0, m.mu_bar_t), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn strengthened_step_is_smaller() {
    let sys = make_burgers(unit_box(-1.0, 1.0)).unwrap();
    let scheme = make_rusanov(&sys, WaveSpeed::Auto).unwrap();
    let mesh = Mesh::build_uniform_1d(32, 1.0).unwrap();
    let dt = |mode| {
        solver::cfl_time_step(&mesh, &sys, scheme.lambda_star, mode, 0.1).unwrap()
    };
    assert!(dt(CflMode::Strengthened) < dt(CflMode::Standard));
    let expected = mesh.a * mesh.a * mesh.h / scheme.lambda_star * 0.9;
    assert!((dt(CflMode::Strengthened) - expected).abs() < 1e-15);
}

proptest! {
    #[test]
    fn fitted_step_hits_final_time(dt_cfl in 1e-5f64..1.0, t in 1e-3f64..10.0) {
        let ts = fit_to_final_time(dt_cfl, t);
        prop_assert!(ts.dt <= dt_cfl);
        prop_assert!((ts.dt * ts.n_steps as f64 - t).abs() <= 1e-12 * t);
        prop_assert!(ts.n_steps == 1 || t / (ts.n_steps - 1) as f64 > dt_cfl * (1.0 - 1e-12));
    }
}
