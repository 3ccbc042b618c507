//! Relative entropy `H(v, u)` against the squared distance `|v - u|^2` for
//! each built-in system, with the bracket constants `beta0`, `beta1`.

use hypflux::systems::{
    friedrichs_characteristic_box, make_burgers, make_friedrichs, make_shallow_water_1d, AdmissibleSet, SystemModel,
};
use nalgebra::DMatrix;

fn report(sys: &SystemModel) -> hypflux::Result<()> {
    let states = sys.sample_states(2000, 3);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for pair in states.chunks(2) {
        let (v, u) = (&pair[0], &pair[1]);
        let d2: f64 = v.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 < 1e-12 {
            continue;
        }
        let ratio = 2.0 * sys.relative_entropy(v, u)? / d2;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    println!(
        "{:<14} beta0={:<10.5} beta1={:<10.5} 2H/|v-u|^2 in [{lo:.5}, {hi:.5}]  L_f={:.4}",
        sys.name(),
        sys.beta0,
        sys.beta1,
        sys.lf
    );
    Ok(())
}

fn main() -> hypflux::Result<()> {
    report(&make_burgers(AdmissibleSet::Box {
        lower: vec![-1.0],
        upper: vec![2.0],
    })?)?;
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    report(&make_friedrichs(
        vec![a.clone()],
        friedrichs_characteristic_box(&a, vec![-1.0, -1.0], vec![1.0, 1.0]),
    )?)?;
    report(&make_shallow_water_1d(9.81, 0.5, 2.0, 1.0)?)?;
    Ok(())
}
