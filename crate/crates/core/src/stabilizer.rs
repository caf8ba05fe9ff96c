//! Star and plaquette generators of T^(D,k), logical operators, and the
//! zero-temperature entanglement and topological entropies.
//!
//! A ground state is the uniform superposition over the group `G` of
//! X-flips generated by the stars, so every entropy here is an integer in
//! units of log 2 obtained from GF(2) ranks:
//! `S(C) = rank A[:,C] + rank A[:,D] - rank A` for the star matrix `A`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, Gf2Matrix};
use crate::homology::{flat_cocycle, flat_cycle, subcomplex, subcomplex_from_mask, BettiVector, TorusRanks};
use crate::lattice::{binomial, Lattice, LatticeSpec};
use crate::partitions::{PartitionEntry, PartitionScheme};

/// The code T^(D,k) on an L-torus with star coupling λ and plaquette
/// coupling μ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub dim: usize,
    pub k: usize,
    pub size: usize,
    pub lambda: f64,
    pub mu: f64,
}

impl ModelSpec {
    pub fn new(dim: usize, k: usize, size: usize, lambda: f64, mu: f64) -> Result<Self> {
        let m = ModelSpec {
            dim,
            k,
            size,
            lambda,
            mu,
        };
        m.validate()?;
        Ok(m)
    }

    /// Unit couplings.
    pub fn unit(dim: usize, k: usize, size: usize) -> Result<Self> {
        ModelSpec::new(dim, k, size, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        LatticeSpec::new(self.dim, self.size)?;
        if self.k == 0 || self.k >= self.dim {
            return Err(Error::arg(
                "k",
                format!("need 1 <= k <= D-1, got k={} with D={}", self.k, self.dim),
            ));
        }
        for (name, v) in [("lambda", self.lambda), ("mu", self.mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::arg(
                    name,
                    format!("coupling must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn lattice_spec(&self) -> LatticeSpec {
        LatticeSpec::new(self.dim, self.size).expect("validated")
    }

    /// The dual model T^(D,D-k) with the couplings exchanged.
    pub fn dual(&self) -> ModelSpec {
        ModelSpec {
            dim: self.dim,
            k: self.dim - self.k,
            size: self.size,
            lambda: self.mu,
            mu: self.lambda,
        }
    }
}

/// Supports of the stabilizer generators.
#[derive(Clone, Debug)]
pub struct StabilizerGenerators {
    /// Rows: (k-1)-cells; columns: k-cells.
    pub star: Gf2Matrix,
    /// Rows: (k+1)-cells; columns: k-cells.
    pub plaquette: Gf2Matrix,
}

pub fn generators(lattice: &Lattice, k: usize) -> Result<StabilizerGenerators> {
    if k == 0 || k >= lattice.dim() {
        return Err(Error::arg("k", format!("need 1 <= k <= D-1, got {k}")));
    }
    Ok(StabilizerGenerators {
        star: lattice.boundary_matrix(k)?,
        plaquette: lattice.coboundary_matrix(k)?,
    })
}

/// Logical representatives: Z-type flat k-cycles and X-type flat cocycles,
/// aligned so that `x_reps[a]` anticommutes exactly with `z_reps[a]`.
#[derive(Clone, Debug)]
pub struct LogicalOperators {
    pub z_reps: Vec<BitVec>,
    pub x_reps: Vec<BitVec>,
}

impl LogicalOperators {
    /// Overlap parities `x_reps[a] · z_reps[b]`.
    pub fn pairing(&self) -> Vec<Vec<bool>> {
        self.x_reps
            .iter()
            .map(|x| self.z_reps.iter().map(|z| x.dot(z)).collect())
            .collect()
    }
}

pub fn logical_operators(lattice: &Lattice, k: usize) -> LogicalOperators {
    let n = lattice.num_cells(k);
    let masks = lattice.masks(k);
    LogicalOperators {
        z_reps: masks
            .iter()
            .map(|&m| BitVec::from_indices(n, &flat_cycle(lattice, k, m)))
            .collect(),
        x_reps: masks
            .iter()
            .map(|&m| BitVec::from_indices(n, &flat_cocycle(lattice, k, m)))
            .collect(),
    }
}

/// `|P_k| - rank(star) - rank(plaquette)`, by direct elimination.
pub fn ground_degeneracy_log2(lattice: &Lattice, k: usize) -> Result<usize> {
    let g = generators(lattice, k)?;
    Ok(lattice.num_cells(k) - g.star.rank() - g.plaquette.rank())
}

/// Expected ground-space dimension in qubits, `binom(D, k)`.
pub fn expected_degeneracy_log2(dim: usize, k: usize) -> usize {
    binomial(dim, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupLogOrders {
    pub log2_g: usize,
    /// Flips trivial on `D` (supported in `C`).
    pub log2_g_i: usize,
    /// Flips trivial on `C` (supported in `D`).
    pub log2_h_i: usize,
}

impl GroupLogOrders {
    /// `log2(|G| / (|G_i| |H_i|))`.
    pub fn entropy_log2(&self) -> usize {
        self.log2_g - self.log2_g_i - self.log2_h_i
    }
}

/// Rank data for one model, reused across regions.
pub struct ZeroTemperature<'a> {
    ranks: TorusRanks<'a>,
    k: usize,
}

impl<'a> ZeroTemperature<'a> {
    pub fn new(lattice: &'a Lattice, k: usize) -> Result<Self> {
        if k == 0 || k >= lattice.dim() {
            return Err(Error::arg("k", format!("need 1 <= k <= D-1, got {k}")));
        }
        Ok(ZeroTemperature {
            ranks: TorusRanks::new(lattice),
            k,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        self.ranks.lattice()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Group orders for the bipartition whose `C` side is `spins_c`.
    pub fn log_orders(&self, spins_c: &[bool]) -> Result<GroupLogOrders> {
        let n = self.lattice().num_cells(self.k);
        if spins_c.len() != n {
            return Err(Error::arg("region", format!("expected a mask over {n} k-cells")));
        }
        let spins_d: Vec<bool> = spins_c.iter().map(|b| !b).collect();
        let log2_g = self.ranks.torus_rank(self.k);
        let rank_c = self.ranks.rank_of_cols(self.k, spins_c);
        let rank_d = self.ranks.rank_of_cols(self.k, &spins_d);
        Ok(GroupLogOrders {
            log2_g,
            log2_g_i: log2_g - rank_d,
            log2_h_i: log2_g - rank_c,
        })
    }

    /// Von Neumann entropy of a region of k-cells, in units of log 2.
    pub fn entropy(&self, spins_c: &[bool]) -> Result<usize> {
        let inside = spins_c.iter().filter(|&&b| b).count();
        if inside == 0 || inside == spins_c.len() {
            return Err(Error::arg("region", "region must be a nonempty proper subset"));
        }
        Ok(self.log_orders(spins_c)?.entropy_log2())
    }

    pub fn betti_c_d(&self, entry: &PartitionEntry) -> (BettiVector, BettiVector) {
        let lat = self.lattice();
        let c = self.ranks.betti(&subcomplex(lat, &entry.region_c));
        let comp: Vec<bool> = entry.region_c.mask().iter().map(|b| !b).collect();
        let d = self.ranks.betti(&subcomplex_from_mask(lat, &comp));
        (c, d)
    }
}

/// Per-partition data of the zero-temperature computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionOrders {
    pub index: usize,
    pub sign: i8,
    pub orders: GroupLogOrders,
    pub entropy_log2: usize,
    pub betti_c: BettiVector,
    pub betti_d: BettiVector,
}

/// Zero-temperature topological entropy by both routes, in units of log 2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TopologicalEntropy {
    pub rank_path: i64,
    pub betti_path: i64,
    /// `-Σ σ log2|G_i|`.
    pub gi_part: i64,
    /// `-Σ σ log2|H_i|`.
    pub hi_part: i64,
    pub partitions: Vec<PartitionOrders>,
}

/// The signed Betti combination for one partition (the braces of the
/// Betti-route formula).
fn betti_term(dim: usize, k: usize, c: &BettiVector, d: &BettiVector) -> i64 {
    let mut t = (d.get(k - 1) + c.get(k - 1)) as i64;
    for j in 1..=k {
        let deg = dim - (k - j);
        let s = if j % 2 == 0 { 1 } else { -1 };
        t += s * (c.get(deg) + d.get(deg)) as i64;
    }
    t
}

fn check_scheme(lattice: &Lattice, k: usize, scheme: &PartitionScheme) -> Result<()> {
    if scheme.dim != lattice.dim() || scheme.size != lattice.size() || scheme.k != k {
        return Err(Error::arg("scheme", "partition scheme built for a different model"));
    }
    Ok(())
}

pub fn topological_entropy_zero_t(lattice: &Lattice, k: usize, scheme: &PartitionScheme) -> Result<TopologicalEntropy> {
    check_scheme(lattice, k, scheme)?;
    let zt = ZeroTemperature::new(lattice, k)?;
    let partitions = scheme
        .entries
        .par_iter()
        .map(|e| {
            let orders = zt.log_orders(&e.spins_c)?;
            let (betti_c, betti_d) = zt.betti_c_d(e);
            Ok(PartitionOrders {
                index: e.index,
                sign: e.sign,
                orders,
                entropy_log2: orders.entropy_log2(),
                betti_c,
                betti_d,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rank_path = 0i64;
    let mut betti_path = 0i64;
    let mut gi_part = 0i64;
    let mut hi_part = 0i64;
    for p in &partitions {
        let s = p.sign as i64;
        gi_part -= s * p.orders.log2_g_i as i64;
        hi_part -= s * p.orders.log2_h_i as i64;
        betti_path -= s * betti_term(lattice.dim(), k, &p.betti_c, &p.betti_d);
    }
    rank_path += gi_part + hi_part;
    Ok(TopologicalEntropy {
        rank_path,
        betti_path,
        gi_part,
        hi_part,
        partitions,
    })
}

/// `-Σ σ(i) (log2|G_i| + log2|H_i|)`.
pub fn stop_zero_rank_path(lattice: &Lattice, k: usize, scheme: &PartitionScheme) -> Result<i64> {
    check_scheme(lattice, k, scheme)?;
    let zt = ZeroTemperature::new(lattice, k)?;
    let mut s = 0i64;
    for e in &scheme.entries {
        let o = zt.log_orders(&e.spins_c)?;
        s -= e.sign as i64 * (o.log2_g_i + o.log2_h_i) as i64;
    }
    Ok(s)
}

/// The signed Betti-number combination over `C_i` and `D_i`.
pub fn stop_zero_betti_path(lattice: &Lattice, k: usize, scheme: &PartitionScheme) -> Result<i64> {
    check_scheme(lattice, k, scheme)?;
    let zt = ZeroTemperature::new(lattice, k)?;
    Ok(scheme
        .entries
        .iter()
        .map(|e| {
            let (c, d) = zt.betti_c_d(e);
            -(e.sign as i64) * betti_term(lattice.dim(), k, &c, &d)
        })
        .sum())
}

/// `(-Σσ log2|G_i|, -Σσ log2|H_i|)`.
pub fn gisum_split(lattice: &Lattice, k: usize, scheme: &PartitionScheme) -> Result<(i64, i64)> {
    check_scheme(lattice, k, scheme)?;
    let zt = ZeroTemperature::new(lattice, k)?;
    let mut g = 0i64;
    let mut h = 0i64;
    for e in &scheme.entries {
        let o = zt.log_orders(&e.spins_c)?;
        g -= e.sign as i64 * o.log2_g_i as i64;
        h -= e.sign as i64 * o.log2_h_i as i64;
    }
    Ok((g, h))
}
