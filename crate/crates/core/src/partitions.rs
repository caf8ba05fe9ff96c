//! The 4(D−1) signed partitions `C_i ⊔ D_i` used to isolate the topological
//! entropy.
//!
//! Boxes are measured in vertices: an outer cube of side `a` has `a`
//! vertices per axis, and its hole is the middle `a/3` of them. Level
//! `m = 1..D-1` lives in axes `0..=m` and is pinned to the middle third of
//! every higher axis, so entry `4m-3` of level `m` is exactly the shell of
//! level `m-1` extruded along axis `m`:
//!
//! * `C_{4m}`: the shell (outer cube minus hole), a homology `m`-sphere;
//! * `C_{4m-1}`, `C_{4m-2}`: its upper `[a/3, a)` and lower `[0, 2a/3)`
//!   two-thirds along axis `m`;
//! * `C_{4m-3}`: their intersection, two copies of the lower shell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{reduced_betti, subcomplex, subcomplex_from_mask, BettiVector, Cuboid, Region};
use crate::lattice::Lattice;

/// Sign of entry `i` (1-based).
pub fn sign_of(i: usize) -> i8 {
    match i % 4 {
        0 | 1 => -1,
        _ => 1,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionEntry {
    /// 1-based index.
    pub index: usize,
    pub sign: i8,
    pub region_c: Region,
    /// Membership of each k-cell in `C_i` (by minimal corner); `D_i` is the
    /// complement.
    pub spins_c: Vec<bool>,
}

impl PartitionEntry {
    pub fn spins_c_indices(&self) -> Vec<usize> {
        (0..self.spins_c.len()).filter(|&c| self.spins_c[c]).collect()
    }

    pub fn spins_d_indices(&self) -> Vec<usize> {
        (0..self.spins_c.len()).filter(|&c| !self.spins_c[c]).collect()
    }

    /// The vertex set of `D_i`, the complement of `C_i`'s vertices.
    pub fn region_d(&self) -> Region {
        self.region_c.complement()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionScheme {
    pub dim: usize,
    pub size: usize,
    pub k: usize,
    /// Outer side; zero for hand-built schemes.
    pub a: usize,
    /// Set when the geometry does not leave a separating collar in `D_i`.
    pub degenerate: bool,
    pub entries: Vec<PartitionEntry>,
}

impl PartitionScheme {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, i: usize) -> Result<&PartitionEntry> {
        self.entries
            .iter()
            .find(|e| e.index == i)
            .ok_or_else(|| Error::arg("i", format!("no partition with index {i}")))
    }

    /// A copy with entry `i` removed.
    pub fn without_entry(&self, i: usize) -> PartitionScheme {
        let mut s = self.clone();
        s.entries.retain(|e| e.index != i);
        s
    }

    /// A copy with the sign of entry `i` flipped.
    pub fn with_flipped_sign(&self, i: usize) -> PartitionScheme {
        let mut s = self.clone();
        for e in s.entries.iter_mut().filter(|e| e.index == i) {
            e.sign = -e.sign;
        }
        s
    }

    /// Builds a scheme from explicit signed vertex regions, for lattices too
    /// small to host the nested geometry.
    pub fn from_regions(lattice: &Lattice, k: usize, regions: Vec<(i8, Region)>) -> Result<Self> {
        check_k(lattice, k)?;
        let entries = regions
            .into_iter()
            .enumerate()
            .map(|(n, (sign, region))| {
                if sign != 1 && sign != -1 {
                    return Err(Error::arg("sign", "signs must be +1 or -1"));
                }
                if region.spec() != lattice.spec() {
                    return Err(Error::arg("region", "region built for a different lattice"));
                }
                Ok(make_entry(lattice, k, n + 1, sign, region))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PartitionScheme {
            dim: lattice.dim(),
            size: lattice.size(),
            k,
            a: 0,
            degenerate: true,
            entries,
        })
    }
}

fn check_k(lattice: &Lattice, k: usize) -> Result<()> {
    if k == 0 || k >= lattice.dim() {
        return Err(Error::arg(
            "k",
            format!("need 1 <= k <= D-1, got k={k} with D={}", lattice.dim()),
        ));
    }
    Ok(())
}

/// Spin bipartition: a k-cell belongs to the side holding its minimal
/// corner. Unlike vertex-induced membership this keeps both sides as thick
/// as their vertex sets, so stars fit inside one-vertex-wide shells.
pub fn spins_by_corner(lattice: &Lattice, k: usize, vertex_mask: &[bool]) -> Vec<bool> {
    (0..lattice.num_cells(k))
        .map(|c| vertex_mask[c % lattice.num_vertices()])
        .collect()
}

fn make_entry(lattice: &Lattice, k: usize, index: usize, sign: i8, region_c: Region) -> PartitionEntry {
    let spins_c = spins_by_corner(lattice, k, region_c.mask());
    PartitionEntry {
        index,
        sign,
        region_c,
        spins_c,
    }
}

/// Builds the nested scheme. Requires `a ≡ 0 (mod 3)`, `3 <= a <= L-3`.
pub fn build_partitions(lattice: &Lattice, k: usize, a: usize) -> Result<PartitionScheme> {
    if !a.is_multiple_of(3) || a < 3 {
        return Err(Error::arg(
            "a",
            format!("outer side must be a positive multiple of 3, got {a}"),
        ));
    }
    if a + 3 > lattice.size() {
        return Err(Error::arg(
            "a",
            format!(
                "outer side {a} leaves no separating collar: need a <= L-3 = {}",
                lattice.size() as isize - 3
            ),
        ));
    }
    build_unchecked(lattice, k, a, false)
}

/// Like [`build_partitions`] but only requires `a <= L`; the result is
/// flagged degenerate when `a > L-3`.
pub fn build_partitions_relaxed(lattice: &Lattice, k: usize, a: usize) -> Result<PartitionScheme> {
    if !a.is_multiple_of(3) || a < 3 {
        return Err(Error::arg(
            "a",
            format!("outer side must be a positive multiple of 3, got {a}"),
        ));
    }
    if a > lattice.size() {
        return Err(Error::arg("a", format!("outer side {a} exceeds L={}", lattice.size())));
    }
    build_unchecked(lattice, k, a, a + 3 > lattice.size())
}

/// Four-entry scheme from two crossing one-vertex-thick slabs `x_0 = 0` and
/// `x_1 = 0`: `-(B₁∩B₂) + B₁ + B₂ - (B₁∪B₂)`. Fits any lattice, so it serves
/// enumeration tests where the nested boxes cannot; always degenerate.
pub fn build_partitions_slabs(lattice: &Lattice, k: usize) -> Result<PartitionScheme> {
    check_k(lattice, k)?;
    let d = lattice.dim();
    let l = lattice.size();
    let slab = |axis: usize| {
        let mut len = vec![l; d];
        len[axis] = 1;
        Cuboid::new(vec![0; d], len)
    };
    let mut both = vec![l; d];
    both[0] = 1;
    both[1] = 1;
    let regions = vec![
        (-1, Region::from_cuboids(lattice, vec![Cuboid::new(vec![0; d], both)])?),
        (1, Region::from_cuboids(lattice, vec![slab(0)])?),
        (1, Region::from_cuboids(lattice, vec![slab(1)])?),
        (-1, Region::from_cuboids(lattice, vec![slab(0), slab(1)])?),
    ];
    PartitionScheme::from_regions(lattice, k, regions)
}

fn build_unchecked(lattice: &Lattice, k: usize, a: usize, degenerate: bool) -> Result<PartitionScheme> {
    check_k(lattice, k)?;
    let d = lattice.dim();
    let t = a / 3;
    let mut entries = Vec::with_capacity(4 * (d - 1));
    for m in 1..d {
        let shell = shell_cuboids(d, m, a);
        let pieces = [
            clip(&shell, m, t, 2 * t),
            clip(&shell, m, 0, 2 * t),
            clip(&shell, m, t, a),
            shell.clone(),
        ];
        for (off, cuboids) in pieces.into_iter().enumerate() {
            let index = 4 * m - 3 + off;
            let region = Region::from_cuboids(lattice, cuboids)?;
            entries.push(make_entry(lattice, k, index, sign_of(index), region));
        }
    }
    Ok(PartitionScheme {
        dim: d,
        size: lattice.size(),
        k,
        a,
        degenerate,
        entries,
    })
}

/// Outer cube in axes `0..=m` minus its middle-third hole, as slabs; higher
/// axes pinned to the middle third.
fn shell_cuboids(d: usize, m: usize, a: usize) -> Vec<Cuboid> {
    let t = a / 3;
    let mut out = Vec::new();
    for axis in 0..=m {
        for lo in [0, 2 * t] {
            let mut c_lo = vec![t; d];
            let mut c_len = vec![t; d];
            for x in 0..=m {
                c_lo[x] = 0;
                c_len[x] = a;
            }
            c_lo[axis] = lo;
            c_len[axis] = t;
            out.push(Cuboid::new(c_lo, c_len));
        }
    }
    out
}

/// Intersects every cuboid with `lo <= x_axis < hi`, dropping empty ones.
fn clip(cuboids: &[Cuboid], axis: usize, lo: usize, hi: usize) -> Vec<Cuboid> {
    cuboids
        .iter()
        .filter_map(|c| {
            let s = c.lo[axis].max(lo);
            let e = (c.lo[axis] + c.len[axis]).min(hi);
            (s < e).then(|| {
                let mut c = c.clone();
                c.lo[axis] = s;
                c.len[axis] = e - s;
                c
            })
        })
        .collect()
}

/// First cell found with a nonzero signed count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancellationWitness {
    pub kind: String,
    pub dim: usize,
    pub cell: usize,
    pub signed_count: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancellationReport {
    pub passed: bool,
    pub witness: Option<CancellationWitness>,
}

/// Checks that the signed multisets of spins, of subcomplex cells, and of
/// interface cells (cells with vertices on both sides of the cut) vanish in
/// every dimension.
pub fn verify_cancellation(lattice: &Lattice, scheme: &PartitionScheme) -> CancellationReport {
    let mut spins = vec![0i64; lattice.num_cells(scheme.k)];
    for e in &scheme.entries {
        for (acc, &inside) in spins.iter_mut().zip(&e.spins_c) {
            if inside {
                *acc += e.sign as i64;
            }
        }
    }
    if let Some(c) = spins.iter().position(|&x| x != 0) {
        return CancellationReport {
            passed: false,
            witness: Some(CancellationWitness {
                kind: "spins".to_string(),
                dim: scheme.k,
                cell: c,
                signed_count: spins[c],
            }),
        };
    }
    let mut buf = Vec::new();
    for j in 0..=lattice.dim() {
        let n = lattice.num_cells(j);
        let mut bulk = vec![0i64; n];
        let mut interface = vec![0i64; n];
        for e in &scheme.entries {
            let s = e.sign as i64;
            let mask = e.region_c.mask();
            for c in 0..n {
                buf.clear();
                lattice.cell_vertices(j, c, &mut buf);
                let inside = buf.iter().filter(|&&v| mask[v]).count();
                if inside == buf.len() {
                    bulk[c] += s;
                } else if inside > 0 {
                    interface[c] += s;
                }
            }
        }
        for (kind, counts) in [("bulk", &bulk), ("interface", &interface)] {
            if let Some(c) = counts.iter().position(|&x| x != 0) {
                return CancellationReport {
                    passed: false,
                    witness: Some(CancellationWitness {
                        kind: kind.to_string(),
                        dim: j,
                        cell: c,
                        signed_count: counts[c],
                    }),
                };
            }
        }
    }
    CancellationReport {
        passed: true,
        witness: None,
    }
}

/// Reduced Betti numbers of every `C_i` and `D_i` subcomplex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeBetti {
    pub c: Vec<BettiVector>,
    pub d: Vec<BettiVector>,
}

pub fn scheme_betti(lattice: &Lattice, scheme: &PartitionScheme) -> Result<SchemeBetti> {
    let mut c = Vec::new();
    let mut d = Vec::new();
    for e in &scheme.entries {
        c.push(reduced_betti(lattice, &subcomplex(lattice, &e.region_c))?);
        let comp: Vec<bool> = e.region_c.mask().iter().map(|b| !b).collect();
        d.push(reduced_betti(lattice, &subcomplex_from_mask(lattice, &comp))?);
    }
    Ok(SchemeBetti { c, d })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeReport {
    pub passed: bool,
    /// `Σ σ(i) b'_m(C_i)` for each degree m.
    pub signed_c: Vec<i64>,
    /// `Σ σ(i) b'_m(D_i)` for each degree m.
    pub signed_d: Vec<i64>,
    pub sign_sum: i64,
}

/// Compares the signed Betti sums of `{C_i}` against those of `{D_i}`.
///
/// Each `D_i` is the torus with `C_i` removed. By Alexander duality its
/// reduced Betti numbers are those of the torus plus the degree-shifted
/// ones of `C_i`, and the torus part cancels when the signs sum to zero:
/// `Σσ b'_m(D_i) = Σσ b'_{D-1-m}(C_i)`.
pub fn exchange_symmetry_check(lattice: &Lattice, scheme: &PartitionScheme) -> Result<ExchangeReport> {
    let betti = scheme_betti(lattice, scheme)?;
    let dim = lattice.dim();
    let signed = |vs: &[BettiVector], m: usize| -> i64 {
        scheme
            .entries
            .iter()
            .zip(vs)
            .map(|(e, b)| e.sign as i64 * b.get(m) as i64)
            .sum()
    };
    let signed_c: Vec<i64> = (0..=dim).map(|m| signed(&betti.c, m)).collect();
    let signed_d: Vec<i64> = (0..=dim).map(|m| signed(&betti.d, m)).collect();
    let sign_sum: i64 = scheme.entries.iter().map(|e| e.sign as i64).sum();
    let dual_ok = (0..dim).all(|m| signed_d[m] == signed_c[dim - 1 - m]) && signed_d[dim] == 0;
    Ok(ExchangeReport {
        passed: sign_sum == 0 && dual_ok,
        signed_c,
        signed_d,
        sign_sum,
    })
}
