//! Randomized invariants of the thermal engine, the sampler and the memory
//! simulator.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toric_core::gauge_mc::*;
use toric_core::homology::Region;
use toric_core::lattice::{Lattice, LatticeSpec};
use toric_core::memory_sim::{SectorKind, SectorSimulator, SectorSpec};
use toric_core::partitions::PartitionScheme;
use toric_core::thermal_exact::*;

fn lattice(d: usize, l: usize) -> Lattice {
    Lattice::new(LatticeSpec::new(d, l).unwrap())
}

fn region(lat: &Lattice, mask: u32) -> Region {
    let cuboids = (0..lat.num_vertices())
        .filter(|v| mask >> v & 1 == 1)
        .map(|v| {
            let x = lat.vertex_coords(v);
            toric_core::homology::Cuboid::new(x[..lat.dim()].iter().map(|&c| c as usize).collect(), vec![1; lat.dim()])
        })
        .collect();
    Region::from_cuboids(lat, cuboids).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn q_distribution_is_normalized(mask in 0u32..256, beta in 0.0f64..3.0) {
        let lat = lattice(2, 2);
        let sector = Sector::plaquette(&lat, 1, 1.0).unwrap();
        let c: Vec<bool> = (0..8).map(|b| mask >> b & 1 == 1).collect();
        let q = q_distribution(&sector, &c, beta).unwrap();
        let total: f64 = q.iter().map(|e| e.p).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn routes_agree_on_random_signed_schemes(
        masks in proptest::array::uniform4(1u32..15),
        beta in 0.0f64..2.5,
        star in any::<bool>(),
    ) {
        let lat = lattice(2, 2);
        let regions = [-1i8, 1, 1, -1].into_iter().zip(masks).map(|(s, m)| (s, region(&lat, m))).collect();
        let scheme = PartitionScheme::from_regions(&lat, 1, regions).unwrap();
        let sector = if star { Sector::star(&lat, 1, 0.7) } else { Sector::plaquette(&lat, 1, 1.3) }.unwrap();
        let a = qtop_route_a(&sector, &scheme, beta).unwrap();
        let b = qtop_route_b(&sector, &scheme, beta).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn partition_function_is_dual_symmetric(beta in 0.0f64..3.0, lambda in 0.1f64..2.0, mu in 0.1f64..2.0) {
        let lat = lattice(3, 2);
        let z = full_partition_function(&lat, 1, beta, lambda, mu).unwrap().ln_z;
        let zd = full_partition_function(&lat, 2, beta, mu, lambda).unwrap().ln_z;
        prop_assert!((z - zd).exp_m1().abs() < 1e-12);
    }

    #[test]
    fn defect_chains_are_closed(model in prop_oneof![Just((2usize, 1usize)), Just((3, 1)), Just((3, 2)), Just((4, 2))],
                                seed in any::<u64>()) {
        let (d, k) = model;
        let m = GaugeModel::new(d, k, 3).unwrap();
        let mut state = SpinConfig::new(m.system());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..3 {
            mc_sweep(m.system(), &mut state, 0.3, &mut rng);
            let chain = defect_chain(&m, &state).unwrap();
            prop_assert_eq!(chain.len(), state.defects().count_ones());
        }
    }

    #[test]
    fn gauge_flips_leave_no_syndrome_or_winding(
        d in 2usize..=3,
        k_raw in 0usize..2,
        a_sector in any::<bool>(),
        picks in proptest::collection::vec(any::<proptest::sample::Index>(), 1..6),
    ) {
        let k = 1 + k_raw % (d - 1);
        let kind = if a_sector { SectorKind::ADefect } else { SectorKind::BDefect };
        let spec = SectorSpec { kind, temperature: 1.0 };
        let lat = lattice(d, 3);
        let j = spec.spin_dim(d, k);
        let mut sim = SectorSimulator::new(d, k, 3, spec).unwrap();
        let mut cofaces = Vec::new();
        for p in picks {
            // The coboundary of a (j-1)-cell is a stabilizer: it commutes
            // with every defect term and meets every cycle evenly.
            let cell = p.index(lat.num_cells(j - 1));
            cofaces.clear();
            lat.coface_indices(j - 1, cell, &mut cofaces);
            for &c in &cofaces {
                sim.flip(c);
            }
            let r = sim.record();
            prop_assert_eq!(r.phi, 0);
            prop_assert_eq!(r.winding, Some(0));
        }
    }
}

#[test]
fn chains_are_reproducible() {
    let m = GaugeModel::new(3, 1, 3).unwrap();
    let params = McParams {
        seed: 12,
        sweeps: 200,
        thermalization: 20,
        stride: 1,
        beta_mu: vec![0.4, 0.9],
        chains: 2,
    };
    let plan = MeasurementPlan {
        wilson_sizes: vec![1],
        fraction: None,
    };
    for (g, c) in [(0, 0), (1, 1)] {
        let a = run_chain(&m, &params, g, c, &plan).unwrap();
        let b = run_chain(&m, &params, g, c, &plan).unwrap();
        assert_eq!(a.magnetization, b.magnetization);
        assert_eq!(a.wilson, b.wilson);
    }
}
