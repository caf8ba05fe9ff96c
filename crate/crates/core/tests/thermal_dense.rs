//! Dense-matrix oracles for the exact thermal engine on 8-spin systems.

mod common;

use common::*;
use toric_core::lattice::{Lattice, LatticeSpec};
use toric_core::stabilizer::{generators, ModelSpec};
use toric_core::thermal_exact::*;

fn lattice(d: usize, l: usize) -> Lattice {
    Lattice::new(LatticeSpec::new(d, l).unwrap())
}

#[test]
fn full_partition_function_matches_diagonalization() {
    let l = lattice(2, 2);
    let g = generators(&l, 1).unwrap();
    let h = hamiltonian(8, &masks(&g.star), &masks(&g.plaquette), 0.7, 1.3);
    for beta in [0.0, 0.3, 1.0, 2.5] {
        let dense = ln_trace_exp(&h, beta);
        let exact = full_partition_function(&l, 1, beta, 0.7, 1.3).unwrap().ln_z;
        assert!(
            (dense - exact).exp_m1().abs() < 1e-12,
            "beta {beta}: {dense} vs {exact}"
        );
    }
}

#[test]
fn duality_matches_diagonalization() {
    let m = ModelSpec::new(2, 1, 2, 0.7, 1.3).unwrap();
    let l = lattice(2, 2);
    let g = generators(&l, 1).unwrap();
    // The dual model's Hamiltonian on the same number of edges, couplings swapped.
    let h_dual = hamiltonian(8, &masks(&g.star), &masks(&g.plaquette), 1.3, 0.7);
    let r = duality_check(&m, 0.8).unwrap();
    assert!(r.passed);
    assert!((ln_trace_exp(&h_dual, 0.8) - r.ln_z_dual).abs() < 1e-10);
}

#[test]
fn gauge_entropy_matches_reduced_density_matrix() {
    let l = lattice(2, 2);
    let sector = Sector::plaquette(&l, 1, 1.0).unwrap();
    for c_mask in [0b1usize, 0b1_0001, 0b11, 0b1111, 0b1011_0001] {
        let c: Vec<bool> = (0..8).map(|b| c_mask >> b & 1 == 1).collect();
        for beta in [0.0, 0.35, 1.2] {
            let dense = von_neumann(&reduced_gauge_state(&l, beta, 1.0, c_mask));
            let exact = gauge_entanglement_entropy(&sector, &c, beta).unwrap();
            assert!(
                (dense - exact).abs() < 1e-9,
                "mask {c_mask:b} beta {beta}: {dense} vs {exact}"
            );
        }
    }
}

#[test]
fn gauge_entropy_low_temperature_limit() {
    // β → ∞: ln(|𝒢|/(|G_i| |𝓗_i|)), which reduces to ln(|G|/(|G_i||H_i|))
    // plus the logical classes that fit outside the region.
    let l = lattice(2, 3);
    let sector = Sector::plaquette(&l, 1, 1.0).unwrap();
    let mut c = vec![false; 18];
    for i in [0, 1, 9] {
        c[i] = true;
    }
    let t = coset_tables(&sector, &c).unwrap();
    let log_gi = log2_gauge_in_region(&sector, &c);
    let expected = (t.log2_gauge_full as f64 - log_gi as f64 - t.log2_h_i as f64) * std::f64::consts::LN_2;
    let cold = gauge_entanglement_entropy(&sector, &c, 20.0).unwrap();
    assert!((cold - expected).abs() < 1e-6, "{cold} vs {expected}");
}
