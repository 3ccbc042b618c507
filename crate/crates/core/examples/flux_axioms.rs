//! Samples random state pairs and normals and checks the numerical flux
//! axioms: conservation, consistency, the entropy inequality at several
//! multiples of `lambda*`, and the dissipation gap.

use hypflux::numflux::{
    bouchut_check, dissipation_gap_check, make_godunov_scalar, make_rusanov, random_normal, FluxScheme, WaveSpeed,
};
use hypflux::systems::{make_advection, make_burgers, AdmissibleSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 10_000;

fn audit(label: &str, scheme: &FluxScheme) {
    let sys = &scheme.system;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut cons, mut cons_xi, mut consistent, mut gap) = (0, 0, 0, 0);
    let mut bouchut = [0usize; 3];
    for _ in 0..SAMPLES {
        let u = sys.omega.sample(&mut rng);
        let v = sys.omega.sample(&mut rng);
        let n = random_normal(sys.d(), &mut rng);
        let neg: Vec<f64> = n.iter().map(|x| -x).collect();

        let g = scheme.flux(&u, &v, &n);
        let g_back = scheme.flux(&v, &u, &neg);
        if g.iter().zip(&g_back).all(|(a, b)| (a + b).abs() <= 1e-12) {
            cons += 1;
        }
        if (scheme.entropy_flux(&u, &v, &n) + scheme.entropy_flux(&v, &u, &neg)).abs() <= 1e-12 {
            cons_xi += 1;
        }
        let same = scheme.flux(&u, &u, &n);
        if same.iter().zip(sys.normal_flux(&u, &n)).all(|(a, b)| (a - b).abs() <= 1e-12) {
            consistent += 1;
        }
        for (slot, factor) in bouchut.iter_mut().zip([1.0, 2.0, 10.0]) {
            if bouchut_check(scheme, &u, &v, &n, factor * scheme.lambda_star) {
                *slot += 1;
            }
        }
        if dissipation_gap_check(scheme, &u, &v, &n).pass {
            gap += 1;
        }
    }
    println!(
        "{label:<22} lambda*={:<7.3} conservative {cons}/{SAMPLES}  entropy-conservative {cons_xi}/{SAMPLES}  \
         consistent {consistent}/{SAMPLES}  entropy ineq {:?}  gap {gap}/{SAMPLES}",
        scheme.lambda_star, bouchut
    );
}

fn main() -> hypflux::Result<()> {
    let burgers = make_burgers(AdmissibleSet::Box {
        lower: vec![-2.0],
        upper: vec![2.0],
    })?;
    let advection = make_advection(
        vec![1.0, -0.5],
        AdmissibleSet::Box {
            lower: vec![0.0],
            upper: vec![1.0],
        },
    )?;
    audit("burgers rusanov", &make_rusanov(&burgers, WaveSpeed::Fixed(2.0))?);
    audit("burgers godunov", &make_godunov_scalar(&burgers)?);
    audit("advection2d rusanov", &make_rusanov(&advection, WaveSpeed::Auto)?);
    audit("advection2d godunov", &make_godunov_scalar(&advection)?);
    Ok(())
}
