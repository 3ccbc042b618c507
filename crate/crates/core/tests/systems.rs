use hypflux::systems::{
    friedrichs_characteristic_box, make_advection, make_burgers, make_friedrichs, make_shallow_water_1d,
    sorted_symmetric_eigen, AdmissibleSet, SystemModel,
};
use nalgebra::DMatrix;

const EPS: f64 = 1e-6;

fn all_systems() -> Vec<SystemModel> {
    let a = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 1.0, -0.3]);
    vec![
        make_burgers(AdmissibleSet::Box {
            lower: vec![-1.0],
            upper: vec![2.0],
        })
        .unwrap(),
        make_advection(
            vec![0.7, -1.2],
            AdmissibleSet::Box {
                lower: vec![-1.0],
                upper: vec![1.0],
            },
        )
        .unwrap(),
        make_friedrichs(vec![a.clone()], friedrichs_characteristic_box(&a, vec![-1.0; 2], vec![1.0; 2])).unwrap(),
        make_shallow_water_1d(9.81, 0.5, 2.0, 1.0).unwrap(),
    ]
}

fn bumped(u: &[f64], k: usize, e: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    v[k] += e;
    v
}

#[test]
fn jacobian_matches_central_differences() {
    for sys in all_systems() {
        for u in sys.sample_states(50, 1) {
            for alpha in 0..sys.d() {
                let jac = sys.flux_jacobian(&u, alpha);
                for k in 0..sys.m() {
                    let fp = sys.flux(&bumped(&u, k, EPS), alpha);
                    let fm = sys.flux(&bumped(&u, k, -EPS), alpha);
                    for i in 0..sys.m() {
                        let fd = (fp[i] - fm[i]) / (2.0 * EPS);
                        assert!((fd - jac[(i, k)]).abs() < 1e-6 * (1.0 + fd.abs()), "{}", sys.name());
                    }
                }
            }
        }
    }
}

#[test]
fn entropy_gradient_and_hessian_match_differences() {
    for sys in all_systems() {
        for u in sys.sample_states(50, 2) {
            let g = sys.entropy_gradient(&u);
            let hess = sys.entropy_hessian(&u);
            for k in 0..sys.m() {
                let fd = (sys.entropy(&bumped(&u, k, EPS)) - sys.entropy(&bumped(&u, k, -EPS))) / (2.0 * EPS);
                assert!((fd - g[k]).abs() < 1e-6 * (1.0 + fd.abs()), "{}", sys.name());
                let gp = sys.entropy_gradient(&bumped(&u, k, EPS));
                let gm = sys.entropy_gradient(&bumped(&u, k, -EPS));
                for i in 0..sys.m() {
                    let fd = (gp[i] - gm[i]) / (2.0 * EPS);
                    assert!((fd - hess[(i, k)]).abs() < 1e-5 * (1.0 + fd.abs()), "{}", sys.name());
                }
            }
        }
    }
}

#[test]
fn entropy_flux_is_compatible() {
    // D xi_alpha = D eta Df_alpha, checked by differencing xi
    for sys in all_systems() {
        for u in sys.sample_states(50, 3) {
            let g = sys.entropy_gradient(&u);
            for alpha in 0..sys.d() {
                let jac = sys.flux_jacobian(&u, alpha);
                for k in 0..sys.m() {
                    let fd = (sys.entropy_flux(&bumped(&u, k, EPS), alpha) - sys.entropy_flux(&bumped(&u, k, -EPS), alpha))
                        / (2.0 * EPS);
                    let expected: f64 = (0..sys.m()).map(|i| g[i] * jac[(i, k)]).sum();
                    assert!((fd - expected).abs() < 1e-6 * (1.0 + fd.abs()), "{}", sys.name());
                }
            }
        }
    }
}

#[test]
fn relative_entropy_is_bracketed_by_beta() {
    for sys in all_systems() {
        let states = sys.sample_states(400, 4);
        for pair in states.chunks(2) {
            let (v, u) = (&pair[0], &pair[1]);
            let d2: f64 = v.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum();
            let h = sys.relative_entropy(v, u).unwrap();
            let tol = 1e-12 * (1.0 + d2);
            assert!(0.5 * sys.beta0 * d2 <= h + tol, "{}", sys.name());
            assert!(h <= 0.5 * sys.beta1 * d2 + tol, "{}", sys.name());
        }
    }
}

#[test]
fn relative_entropy_vanishes_on_the_diagonal() {
    for sys in all_systems() {
        for u in sys.sample_states(20, 5) {
            assert!(sys.relative_entropy(&u, &u).unwrap().abs() < 1e-14);
            for alpha in 0..sys.d() {
                assert!(sys.relative_entropy_flux(&u, &u, alpha).unwrap().abs() < 1e-14);
            }
        }
    }
}

#[test]
fn states_outside_omega_are_rejected() {
    let sw = make_shallow_water_1d(9.81, 0.5, 2.0, 1.0).unwrap();
    assert!(sw.relative_entropy(&[0.1, 0.0], &[1.0, 0.0]).is_err());
    assert!(sw.relative_entropy(&[1.0, 5.0], &[1.0, 0.0]).is_err());
}

#[test]
fn shallow_water_wave_speed_is_u_plus_c() {
    let sw = make_shallow_water_1d(9.81, 0.5, 2.0, 1.0).unwrap();
    let (h, q) = (1.2, 0.6);
    let expected = q / h + (9.81f64 * h).sqrt();
    assert!((sw.max_wave_speed(&[h, q], &[1.0]) - expected).abs() < 1e-12);
}

#[test]
fn symmetric_eigen_reconstructs_matrix() {
    let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, -1.0, 0.3, 0.1, 0.3, 0.4]);
    let (vals, r) = sorted_symmetric_eigen(&a);
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    let back = &r * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals)) * r.transpose();
    assert!((back - a).abs().max() < 1e-12);
}

#[test]
fn lf_covers_the_wave_speeds() {
    for sys in all_systems() {
        for u in sys.sample_states(200, 6) {
            for alpha in 0..sys.d() {
                let eig = sys.flux_jacobian(&u, alpha).complex_eigenvalues();
                let rho = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(rho <= sys.lf * (1.0 + 1e-9), "{}: {rho} > {}", sys.name(), sys.lf);
            }
        }
    }
}
