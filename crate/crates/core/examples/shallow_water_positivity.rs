//! Smooth shallow-water wave under the strengthened CFL step: tracks the
//! minimum water height over every step and the invariant-domain check
//! of the Rusanov flux.

use hypflux::numflux::{make_rusanov, omega_stability_check, random_normal, WaveSpeed};
use hypflux::solver::{self, CflMode, RunConfig};
use hypflux::systems::{make_shallow_water_1d, RiemannInvariantBox};
use hypflux::mesh::Mesh;
use hypflux::initial::InitialCondition;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hypflux::Result<()> {
    let (g, h_min, h_max, q_max) = (9.81, 0.7, 1.4, 0.8);
    let mut sys = make_shallow_water_1d(g, h_min, h_max, q_max)?;
    sys.compute_lf(4000, 5);
    let scheme = make_rusanov(&sys, WaveSpeed::Auto)?;

    let wave = InitialCondition::ShallowWaterSmoothWave {
        depth: 1.0,
        amplitude: 0.2,
        velocity: 0.3,
        wavenumber: 1.0,
    };
    let u0 = |x: &[f64]| wave.eval(x);
    let mesh = Mesh::build_uniform_1d(64, 1.0)?;
    let config = RunConfig {
        final_time: 0.05,
        cfl_mode: CflMode::Strengthened,
        ..RunConfig::default()
    };
    let traj = solver::run(&mesh, &scheme, &u0, &config, &mut [])?;
    let min_h = traj
        .snapshots
        .iter()
        .flat_map(|(_, f)| f.states().map(|s| s[0]).collect::<Vec<_>>())
        .fold(f64::INFINITY, f64::min);
    println!(
        "{} steps of {:.3e}: min h = {min_h:.6} (h_min = {h_min})",
        traj.n_steps, traj.dt
    );

    let cube = RiemannInvariantBox::inscribed(g, h_min, h_max, q_max).expect("valid bounds");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ok = 0;
    for _ in 0..10_000 {
        let u = cube.sample(&mut rng);
        let v = cube.sample(&mut rng);
        let n = random_normal(1, &mut rng);
        if omega_stability_check(&scheme, &u, &v, &n, scheme.lambda_star) {
            ok += 1;
        }
    }
    println!("invariant-domain check: {ok}/10000 pairs stay in the admissible set");
    Ok(())
}
