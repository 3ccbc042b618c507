use hypflux::initial::InitialCondition;
use hypflux::mesh::{Mesh, Quadrature};
use hypflux::numflux::{make_godunov_scalar, make_rusanov, WaveSpeed};
use hypflux::reference::{exact_advection, exact_burgers, exact_friedrichs, fine_grid_reference, ReferenceSolution};
use hypflux::solver::{compute_dt, RunConfig};
use hypflux::systems::{make_burgers, make_shallow_water_1d, AdmissibleSet};
use hypflux::Error;
use nalgebra::DMatrix;

const DX: f64 = 1e-5;

fn burgers_data() -> InitialCondition {
    InitialCondition::Sine {
        mean: vec![0.5],
        amplitude: vec![0.25],
        wavenumber: vec![1.0],
        phase: vec![0.0],
    }
}

fn d_dt(r: &ReferenceSolution, x: f64, t: f64) -> Vec<f64> {
    let a = r.eval(&[x], t + DX).unwrap();
    let b = r.eval(&[x], t - DX).unwrap();
    a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * DX)).collect()
}

fn d_dx(r: &ReferenceSolution, x: f64, t: f64) -> Vec<f64> {
    let a = r.eval(&[x + DX], t).unwrap();
    let b = r.eval(&[x - DX], t).unwrap();
    a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * DX)).collect()
}

#[test]
fn burgers_reference_solves_the_pde() {
    let r = exact_burgers(burgers_data(), 1.0).unwrap();
    // shock time for this profile is 1 / (0.25 * 2 pi)
    let shock = 1.0 / (0.5 * std::f64::consts::PI);
    assert!((r.valid_until - 0.9 * shock).abs() < 1e-12);
    for i in 0..40 {
        let x = i as f64 / 40.0 + 0.013;
        for t in [0.05, 0.2, 0.5] {
            let u = r.eval(&[x], t).unwrap()[0];
            let residual = d_dt(&r, x, t)[0] + u * d_dx(&r, x, t)[0];
            assert!(residual.abs() < 1e-6, "x={x} t={t} residual={residual}");
        }
    }
}

#[test]
fn burgers_reference_is_constant_along_characteristics() {
    let u0 = burgers_data();
    let r = exact_burgers(u0.clone(), 1.0).unwrap();
    for i in 0..16 {
        let x0 = i as f64 / 16.0;
        let v = u0.eval(&[x0])[0];
        let t = 0.4;
        let x = (x0 + v * t).rem_euclid(1.0);
        assert!((r.eval(&[x], t).unwrap()[0] - v).abs() < 1e-12);
    }
}

#[test]
fn burgers_reference_refuses_times_past_the_horizon() {
    let r = exact_burgers(burgers_data(), 1.0).unwrap();
    assert!(matches!(r.eval(&[0.3], 0.6), Err(Error::Horizon { .. })));
}

#[test]
fn friedrichs_reference_solves_the_pde() {
    let a = DMatrix::from_row_slice(2, 2, &[0.2, 1.0, 1.0, -0.4]);
    let u0 = InitialCondition::Sine {
        mean: vec![1.0, 0.0],
        amplitude: vec![0.3, 0.2],
        wavenumber: vec![1.0],
        phase: vec![0.0, 0.7],
    };
    let r = exact_friedrichs(&a, u0, 1.0).unwrap();
    for i in 0..20 {
        let x = i as f64 / 20.0 + 0.01;
        for t in [0.1, 1.3] {
            let ut = d_dt(&r, x, t);
            let ux = d_dx(&r, x, t);
            for row in 0..2 {
                let res = ut[row] + a[(row, 0)] * ux[0] + a[(row, 1)] * ux[1];
                assert!(res.abs() < 1e-6, "{res}");
            }
        }
    }
}

#[test]
fn advection_reference_is_a_periodic_shift() {
    let bump = InitialCondition::GaussianBump {
        base: vec![1.0],
        amplitude: vec![0.5],
        center: vec![0.3, 0.6],
        width: 0.1,
        domain: vec![1.0, 1.0],
    };
    let r = exact_advection(vec![1.0, -0.5], bump.clone(), vec![1.0, 1.0]);
    let t: f64 = 0.7;
    for p in [[0.1f64, 0.2], [0.95, 0.05], [0.5, 0.5]] {
        let back = [(p[0] - t).rem_euclid(1.0), (p[1] + 0.5 * t).rem_euclid(1.0)];
        assert!((r.eval(&p, t).unwrap()[0] - bump.eval(&back)[0]).abs() < 1e-13);
    }
}

#[test]
fn exact_references_conserve_the_mean() {
    let mesh = Mesh::build_uniform_1d(64, 1.0).unwrap();
    let r = exact_burgers(burgers_data(), 1.0).unwrap();
    let mean = |t: f64| -> f64 {
        (0..mesh.n_cells())
            .map(|k| mesh.cells[k].volume * r.cell_mean(&mesh, k, t, Quadrature::Composite(16)).unwrap()[0])
            .sum()
    };
    for t in [0.0, 0.2, 0.5] {
        assert!((mean(t) - 0.5).abs() < 1e-6, "t={t}: {}", mean(t));
    }
}

#[test]
fn fine_grid_reference_approaches_the_exact_solution() {
    let u0 = burgers_data();
    let f = |x: &[f64]| u0.eval(x);
    let mut sys = make_burgers(AdmissibleSet::from_data_range(&[0.25], &[0.75])).unwrap();
    sys.compute_lf(1000, 1);
    let scheme = make_godunov_scalar(&sys).unwrap();
    let coarse = Mesh::build_uniform_1d(16, 1.0).unwrap();
    let config = RunConfig {
        final_time: 0.2,
        ..RunConfig::default()
    };
    let ts = compute_dt(&coarse, &scheme, &config).unwrap();
    let fine = fine_grid_reference(&coarse, &scheme, &f, &config, ts, 8, true).unwrap();
    let exact = exact_burgers(u0.clone(), 1.0).unwrap();
    let t = ts.dt * ts.n_steps as f64;
    let mut err: f64 = 0.0;
    for k in 0..coarse.n_cells() {
        let a = fine.cell_mean(&coarse, k, t, Quadrature::Midpoint).unwrap()[0];
        let b = exact.cell_mean(&coarse, k, t, Quadrature::Composite(16)).unwrap()[0];
        err = err.max((a - b).abs());
    }
    assert!(err < 5e-3, "{err}");
    assert!(fine_grid_reference(&coarse, &scheme, &f, &config, ts, 4, true).is_err());
}

#[test]
fn shallow_water_fine_grid_conserves_mass() {
    let wave = InitialCondition::ShallowWaterSmoothWave {
        depth: 1.0,
        amplitude: 0.1,
        velocity: 0.2,
        wavenumber: 1.0,
    };
    let f = |x: &[f64]| wave.eval(x);
    let sys = make_shallow_water_1d(9.81, 0.8, 1.4, 0.8).unwrap();
    let scheme = make_rusanov(&sys, WaveSpeed::Auto).unwrap();
    let coarse = Mesh::build_uniform_1d(8, 1.0).unwrap();
    let config = RunConfig {
        final_time: 0.01,
        ..RunConfig::default()
    };
    let ts = compute_dt(&coarse, &scheme, &config).unwrap();
    let fine = fine_grid_reference(&coarse, &scheme, &f, &config, ts, 8, true).unwrap();
    let t = ts.dt * ts.n_steps as f64;
    let mass = |t: f64| -> f64 {
        (0..coarse.n_cells())
            .map(|k| coarse.cells[k].volume * fine.cell_mean(&coarse, k, t, Quadrature::Midpoint).unwrap()[0])
            .sum()
    };
    assert!((mass(t) - mass(0.0)).abs() < 1e-13);
}
