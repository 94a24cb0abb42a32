mod common;

use bubblemesh::remesh::{
    initial_bubbles, interior_radius, inverse_length_weights, reconstruct_boundary_bubbles,
    reconstruct_interior_bubbles,
};
use common::hexagon;
use proptest::prelude::*;

#[test]
fn uniform_lattice_and_weight_normalization() {
    common::reconstruction_suite().unwrap();
}

#[test]
fn reconstructed_kinds() {
    let mesh = hexagon(0.37, 4);
    let boundary = reconstruct_boundary_bubbles(&mesh).unwrap();
    let interior = reconstruct_interior_bubbles(&mesh).unwrap();
    assert!(boundary.iter().all(|b| b.is_fixed()));
    assert!(interior.iter().all(|b| b.is_anchor() && !b.is_fixed()));
}

#[test]
fn uniform_lattice_needs_almost_no_fillers() {
    let mesh = hexagon(0.2, 10);
    let bubbles = initial_bubbles(&mesh).unwrap();
    let grown = bubbles.len() as f64 / mesh.vertices.len() as f64 - 1.0;
    assert!(grown < 0.05, "{grown}");
}

proptest! {
    #[test]
    fn shorter_edges_weigh_more(lengths in prop::collection::vec(1e-3f64..1e3, 1..12)) {
        let w = inverse_length_weights(&lengths);
        prop_assert!(w.iter().all(|&x| x > 0.0));
        for i in 0..lengths.len() {
            for j in 0..lengths.len() {
                if lengths[i] < lengths[j] {
                    prop_assert!(w[i] >= w[j]);
                }
            }
        }
    }

    #[test]
    fn interior_radius_is_half_the_harmonic_mean(lengths in prop::collection::vec(1e-3f64..1e3, 1..12)) {
        // sum_j w_j l_j = n / sum_j (1 / l_j)
        let harmonic = lengths.len() as f64 / lengths.iter().map(|l| 1.0 / l).sum::<f64>();
        let r = interior_radius(&lengths);
        prop_assert!((r - harmonic / 2.0).abs() <= 1e-12 * harmonic);
        let lo = lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = lengths.iter().copied().fold(0.0, f64::max);
        prop_assert!(r >= lo / 2.0 * (1.0 - 1e-12) && r <= hi / 2.0 * (1.0 + 1e-12));
    }
}
