//! Symmetric 2x2 Friedrichs system (the 1D wave equation in first-order
//! form) against its characteristic solution.

use hypflux::diagnostics::{cell_l2_sq, reference_means, relative_entropy_norm};
use hypflux::initial::InitialCondition;
use hypflux::mesh::{Mesh, Quadrature};
use hypflux::numflux::{make_rusanov, WaveSpeed};
use hypflux::reference::exact_friedrichs;
use hypflux::solver::{self, RunConfig};
use hypflux::systems::{friedrichs_characteristic_box, make_friedrichs};
use nalgebra::DMatrix;

fn main() -> hypflux::Result<()> {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let u0 = InitialCondition::Sine {
        mean: vec![1.0, 0.0],
        amplitude: vec![0.3, 0.2],
        wavenumber: vec![1.0],
        phase: vec![0.0, 0.5],
    };
    let mut sys = make_friedrichs(
        vec![a.clone()],
        friedrichs_characteristic_box(&a, vec![0.0, -1.0], vec![1.5, 1.5]),
    )?;
    sys.compute_lf(2000, 1);
    let scheme = make_rusanov(&sys, WaveSpeed::Fixed(1.0))?;
    let reference = exact_friedrichs(&a, u0.clone(), 1.0)?;
    let f = |x: &[f64]| u0.eval(x);

    for n in [32, 64, 128, 256] {
        let mesh = Mesh::build_uniform_1d(n, 1.0)?;
        let config = RunConfig {
            final_time: 0.25,
            record_every: usize::MAX,
            ..RunConfig::default()
        };
        let traj = solver::run(&mesh, &scheme, &f, &config, &mut [])?;
        let last = traj.final_state();
        let means = reference_means(&mesh, &reference, last.time, Quadrature::Midpoint)?;
        let e2 = cell_l2_sq(&mesh, last, &means, None);
        let h = relative_entropy_norm(&mesh, &sys, last, &means, None)?;
        println!("n={n:<4} final L2 error {:.4e}   H = {h:.6e}   |H - E^2| = {:.1e}", e2.sqrt(), (h - e2).abs());
    }
    Ok(())
}
