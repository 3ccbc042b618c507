use hypflux::mesh::{regularity_constant, Mesh, Quadrature};
use proptest::prelude::*;

fn check_closure(mesh: &Mesh) {
    // sum of |sigma| n over the boundary of a closed cell vanishes
    for k in 0..mesh.n_cells() {
        let mut acc = vec![0.0; mesh.dim];
        for &i in &mesh.cells[k].interface_ids {
            let n = mesh.outward_normal(k, i);
            for (a, x) in acc.iter_mut().zip(&n) {
                *a += mesh.interfaces[i].area * x;
            }
        }
        assert!(acc.iter().all(|x| x.abs() < 1e-12), "cell {k}: {acc:?}");
    }
}

fn check_adjacency(mesh: &Mesh) {
    let mut seen = vec![0usize; mesh.interfaces.len()];
    for cell in &mesh.cells {
        for &i in &cell.interface_ids {
            seen[i] += 1;
            let f = &mesh.interfaces[i];
            assert!(f.left == cell.id || f.right == cell.id);
        }
    }
    assert!(seen.iter().all(|&c| c == 2));
}

#[test]
fn uniform_1d_geometry() {
    let m = Mesh::build_uniform_1d(10, 2.0).unwrap();
    assert_eq!(m.n_cells(), 10);
    assert_eq!(m.interfaces.len(), 10);
    assert!((m.h - 0.2).abs() < 1e-15);
    let total: f64 = m.cells.iter().map(|c| c.volume).sum();
    assert!((total - 2.0).abs() < 1e-14);
    check_closure(&m);
    check_adjacency(&m);
}

#[test]
fn uniform_quad_geometry() {
    let m = Mesh::build_uniform_quad_2d(5, 4, 1.0, 2.0).unwrap();
    assert_eq!(m.n_cells(), 20);
    assert_eq!(m.interfaces.len(), 40);
    let total: f64 = m.cells.iter().map(|c| c.volume).sum();
    assert!((total - 2.0).abs() < 1e-13);
    check_closure(&m);
    check_adjacency(&m);
    assert!((regularity_constant(&m) - m.a).abs() < 1e-14);
}

#[test]
fn too_coarse_grid_rejected() {
    assert!(Mesh::build_uniform_quad_2d(2, 5, 1.0, 1.0).is_err());
    assert!(Mesh::build_perturbed_quad_2d(4, 4, 1.0, 1.0, 0.3, 1).is_err());
}

#[test]
fn quadrature_weights_sum_to_volume() {
    let m = Mesh::build_perturbed_quad_2d(6, 6, 1.0, 1.0, 0.2, 3).unwrap();
    for rule in [Quadrature::Midpoint, Quadrature::Gauss3, Quadrature::Composite(3)] {
        for k in 0..m.n_cells() {
            let w: f64 = m.cell_quadrature(k, rule).iter().map(|(_, w)| w).sum();
            assert!((w - m.cells[k].volume).abs() < 1e-13, "{rule} cell {k}");
        }
    }
}

#[test]
fn gauss3_integrates_linear_functions_exactly() {
    let m = Mesh::build_perturbed_quad_2d(5, 5, 1.0, 1.0, 0.2, 8).unwrap();
    for k in 0..m.n_cells() {
        let c = &m.cells[k].centroid;
        let q: f64 = m
            .cell_quadrature(k, Quadrature::Gauss3)
            .iter()
            .map(|(x, w)| w * (2.0 * x[0] - x[1]))
            .sum();
        let exact = m.cells[k].volume * (2.0 * c[0] - c[1]);
        assert!((q - exact).abs() < 1e-12);
    }
}

#[test]
fn locate_finds_containing_cell() {
    let m = Mesh::build_uniform_quad_2d(4, 4, 1.0, 1.0).unwrap();
    for cell in &m.cells {
        assert_eq!(m.locate(&cell.centroid), Some(cell.id));
    }
    let line = Mesh::build_uniform_1d(8, 1.0).unwrap();
    assert_eq!(line.locate(&[1.05]), Some(0));
}

#[test]
fn periodic_norm_uses_minimum_image() {
    let m = Mesh::build_uniform_1d(8, 1.0).unwrap();
    assert!((m.periodic_norm(&[0.9]) - 0.1).abs() < 1e-14);
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.json");
    let m = Mesh::build_perturbed_quad_2d(5, 6, 1.0, 1.5, 0.1, 12).unwrap();
    m.save(&path).unwrap();
    assert_eq!(Mesh::load(&path).unwrap(), m);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn perturbed_meshes_are_valid(n in 3usize..12, jitter in 0.0f64..0.24, seed in any::<u64>()) {
        let m = Mesh::build_perturbed_quad_2d(n, n, 1.0, 1.0, jitter, seed).unwrap();
        m.validate().unwrap();
        let total: f64 = m.cells.iter().map(|c| c.volume).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(m.cells.iter().all(|c| c.volume > 0.0));
        prop_assert!(m.a > 0.0 && m.a <= regularity_constant(&m) + 1e-14);
        check_closure(&m);
        check_adjacency(&m);
    }

    #[test]
    fn same_seed_same_mesh(seed in any::<u64>()) {
        let a = Mesh::build_perturbed_quad_2d(5, 5, 1.0, 1.0, 0.2, seed).unwrap();
        let b = Mesh::build_perturbed_quad_2d(5, 5, 1.0, 1.0, 0.2, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
