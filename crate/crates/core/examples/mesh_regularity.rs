//! Builds uniform and perturbed periodic meshes and prints their size `h`
//! and regularity constant `a`.

use hypflux::mesh::{regularity_constant, Mesh};

fn main() -> hypflux::Result<()> {
    println!("{:<28} {:>7} {:>10} {:>8}", "mesh", "cells", "h", "a");
    for n in [16, 64, 256] {
        let m = Mesh::build_uniform_1d(n, 1.0)?;
        println!("{:<28} {:>7} {:>10.5} {:>8.4}", format!("uniform 1d n={n}"), m.n_cells(), m.h, m.a);
    }
    for n in [8, 16, 32] {
        let m = Mesh::build_uniform_quad_2d(n, n, 1.0, 1.0)?;
        println!("{:<28} {:>7} {:>10.5} {:>8.4}", format!("uniform quad {n}x{n}"), m.n_cells(), m.h, m.a);
    }
    for jitter in [0.0, 0.1, 0.2, 0.24] {
        let m = Mesh::build_perturbed_quad_2d(16, 16, 1.0, 1.0, jitter, 42)?;
        m.validate()?;
        // a is recomputed from scratch as a cross-check
        let a = regularity_constant(&m);
        println!(
            "{:<28} {:>7} {:>10.5} {:>8.4}",
            format!("perturbed 16x16 j={jitter}"),
            m.n_cells(),
            m.h,
            a
        );
    }

    let m = Mesh::build_perturbed_quad_2d(4, 4, 1.0, 1.0, 0.2, 1)?;
    let back = Mesh::from_json(&m.to_json()?)?;
    assert_eq!(m, back);
    println!("JSON round trip of a perturbed mesh: identical");
    Ok(())
}
