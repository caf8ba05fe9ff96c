//! Z2 homology of the torus and of vertex-induced subcomplexes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::lattice::{binomial, Lattice, LatticeSpec};

/// An axis-aligned box of vertices, `lo[d] .. lo[d] + len[d]` in each axis,
/// wrapping mod L. `len[d] == L` covers the whole axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cuboid {
    pub lo: Vec<usize>,
    pub len: Vec<usize>,
}

impl Cuboid {
    pub fn new(lo: Vec<usize>, len: Vec<usize>) -> Self {
        Cuboid { lo, len }
    }

    fn contains(&self, coords: &[u16], l: usize) -> bool {
        self.lo
            .iter()
            .zip(&self.len)
            .zip(coords)
            .all(|((&lo, &len), &x)| (x as usize + l - lo % l) % l < len)
    }
}

/// A set of vertices given as a union of cuboids, possibly complemented,
/// together with its explicit membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    spec: LatticeSpec,
    cuboids: Vec<Cuboid>,
    complemented: bool,
    mask: Vec<bool>,
}

impl Region {
    pub fn from_cuboids(lattice: &Lattice, cuboids: Vec<Cuboid>) -> Result<Self> {
        let d = lattice.dim();
        let l = lattice.size();
        for c in &cuboids {
            if c.lo.len() != d || c.len.len() != d {
                return Err(Error::arg("cuboid", format!("expected {d} coordinates per cuboid")));
            }
            if c.len.iter().any(|&n| n > l) {
                return Err(Error::arg("cuboid", format!("side longer than L={l}")));
            }
        }
        let mask = (0..lattice.num_vertices())
            .map(|v| {
                let x = lattice.vertex_coords(v);
                cuboids.iter().any(|c| c.contains(&x[..d], l))
            })
            .collect();
        Ok(Region {
            spec: lattice.spec(),
            cuboids,
            complemented: false,
            mask,
        })
    }

    pub fn full(lattice: &Lattice) -> Self {
        let d = lattice.dim();
        let c = Cuboid::new(vec![0; d], vec![lattice.size(); d]);
        Region::from_cuboids(lattice, vec![c]).expect("full cuboid is valid")
    }

    pub fn single_vertex(lattice: &Lattice, coords: &[usize]) -> Result<Self> {
        Region::from_cuboids(lattice, vec![Cuboid::new(coords.to_vec(), vec![1; lattice.dim()])])
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn cuboids(&self) -> &[Cuboid] {
        &self.cuboids
    }

    pub fn is_complemented(&self) -> bool {
        self.complemented
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, vertex: usize) -> bool {
        self.mask[vertex]
    }

    pub fn num_vertices(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn complement(&self) -> Region {
        Region {
            spec: self.spec,
            cuboids: self.cuboids.clone(),
            complemented: !self.complemented,
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    /// Re-evaluates the cuboid description and compares it with the mask.
    pub fn is_consistent(&self, lattice: &Lattice) -> bool {
        let d = lattice.dim();
        let l = lattice.size();
        (0..lattice.num_vertices()).all(|v| {
            let x = lattice.vertex_coords(v);
            let inside = self.cuboids.iter().any(|c| c.contains(&x[..d], l));
            (inside != self.complemented) == self.mask[v]
        })
    }
}

/// The cells whose vertices all lie in a region, per dimension, as sorted
/// parent-lattice indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubComplex {
    cells: Vec<Vec<usize>>,
}

impl SubComplex {
    pub fn cells(&self, j: usize) -> &[usize] {
        &self.cells[j]
    }

    pub fn dim(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.cells[0].is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        signed_alternating(&self.counts())
    }

    /// Membership mask of j-cells over the parent lattice.
    pub fn cell_mask(&self, lattice: &Lattice, j: usize) -> Vec<bool> {
        let mut m = vec![false; lattice.num_cells(j)];
        for &c in &self.cells[j] {
            m[c] = true;
        }
        m
    }
}

fn signed_alternating(v: &[usize]) -> i64 {
    v.iter()
        .enumerate()
        .map(|(j, &n)| if j % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}

/// The vertex-induced subcomplex: a j-cell belongs iff all its vertices do.
pub fn subcomplex(lattice: &Lattice, region: &Region) -> SubComplex {
    subcomplex_from_mask(lattice, region.mask())
}

pub fn subcomplex_from_mask(lattice: &Lattice, vertex_mask: &[bool]) -> SubComplex {
    let mut cells = Vec::with_capacity(lattice.dim() + 1);
    let mut buf = Vec::new();
    for j in 0..=lattice.dim() {
        let list = (0..lattice.num_cells(j))
            .filter(|&c| {
                buf.clear();
                lattice.cell_vertices(j, c, &mut buf);
                buf.iter().all(|&v| vertex_mask[v])
            })
            .collect();
        cells.push(list);
    }
    SubComplex { cells }
}

/// Boundary map `∂_j` restricted to the given row and column cell lists.
pub fn restricted_boundary(lattice: &Lattice, j: usize, rows: &[usize], cols: &[usize]) -> Gf2Matrix {
    let mut local = vec![usize::MAX; lattice.num_cells(j - 1)];
    for (i, &r) in rows.iter().enumerate() {
        local[r] = i;
    }
    let mut m = Gf2Matrix::zeros(rows.len(), cols.len());
    let mut buf = Vec::new();
    for (ci, &c) in cols.iter().enumerate() {
        buf.clear();
        lattice.face_indices(j, c, &mut buf);
        for &f in &buf {
            if local[f] != usize::MAX {
                m.toggle(local[f], ci);
            }
        }
    }
    m
}

/// Betti numbers `b_0 ..= b_D` over GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn get(&self, j: usize) -> usize {
        self.0.get(j).copied().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        signed_alternating(&self.0)
    }
}

/// The j-cells `(b, S)` with `b_i = 0` for every axis `i ∉ S`: a flat
/// j-torus through the origin representing one homology class.
pub fn flat_cycle(lattice: &Lattice, j: usize, mask: u8) -> Vec<usize> {
    (0..lattice.num_cells(j))
        .filter(|&c| {
            let cell = lattice.cell(j, c);
            cell.dirs() == mask && (0..lattice.dim()).all(|a| cell.spans(a) || cell.base()[a] == 0)
        })
        .collect()
}

/// The j-cells `(b, S)` with `b_i = 0` for every axis `i ∈ S`: the dual
/// cocycle pairing to [`flat_cycle`] with the same mask.
pub fn flat_cocycle(lattice: &Lattice, j: usize, mask: u8) -> Vec<usize> {
    (0..lattice.num_cells(j))
        .filter(|&c| {
            let cell = lattice.cell(j, c);
            cell.dirs() == mask && cell.axes().all(|a| cell.base()[a] == 0)
        })
        .collect()
}

/// Builds a matrix from rows given as lists of global column indices,
/// keeping only the columns listed in `local` (global → local, `usize::MAX`
/// for dropped columns). Empty rows are skipped.
fn compact_rows<I>(ncols: usize, local: &[usize], rows: I) -> Gf2Matrix
where
    I: IntoIterator<Item = Vec<usize>>,
{
    let mut kept = Vec::new();
    for r in rows {
        let cols: Vec<usize> = r.iter().map(|&c| local[c]).filter(|&c| c != usize::MAX).collect();
        if !cols.is_empty() {
            kept.push(cols);
        }
    }
    let mut m = Gf2Matrix::zeros(kept.len(), ncols);
    for (i, cols) in kept.iter().enumerate() {
        for &c in cols {
            m.toggle(i, c);
        }
    }
    m
}

/// Rank oracle for boundary maps of the torus restricted to column sets.
///
/// For a large column set `S` the rank is obtained from the small
/// complement: `rank ∂_j[:, S] = |S| - dim ker ∂_j + rank K[:, S^c]`, where
/// the rows of `K` span `ker ∂_j` (boundaries of (j+1)-cells plus one flat
/// cycle per class).
#[derive(Clone, Debug)]
pub struct TorusRanks<'a> {
    lattice: &'a Lattice,
    /// `rank ∂_j` for `j = 0 ..= D+1`, by direct elimination.
    torus_rank: Vec<usize>,
    /// Per j: whether boundaries plus flat cycles span `ker ∂_j`.
    spanning: Vec<bool>,
}

impl<'a> TorusRanks<'a> {
    pub fn new(lattice: &'a Lattice) -> Self {
        let d = lattice.dim();
        let mut torus_rank = vec![0; d + 2];
        for (j, r) in torus_rank.iter_mut().enumerate().take(d + 1).skip(1) {
            *r = lattice.boundary_matrix(j).expect("valid index").rank();
        }
        // Flat cycles pair to the identity with flat cocycles, so they are
        // independent modulo boundaries; counting dimensions settles spanning.
        let spanning = (0..=d)
            .map(|j| torus_rank[j + 1] + binomial(d, j) == lattice.num_cells(j) - torus_rank[j])
            .collect();
        TorusRanks {
            lattice,
            torus_rank,
            spanning,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        self.lattice
    }

    pub fn torus_rank(&self, j: usize) -> usize {
        self.torus_rank[j]
    }

    /// Rank of `∂_j` restricted to the j-cells selected by `mask`.
    pub fn rank_of_cols(&self, j: usize, mask: &[bool]) -> usize {
        let lat = self.lattice;
        if j == 0 || j > lat.dim() {
            return 0;
        }
        let n = lat.num_cells(j);
        let selected: Vec<usize> = (0..n).filter(|&c| mask[c]).collect();
        if 2 * selected.len() <= n || !self.spanning[j] {
            let mut local = vec![usize::MAX; lat.num_cells(j - 1)];
            let mut next = 0;
            let mut rows = Vec::with_capacity(selected.len());
            for &c in &selected {
                let mut f = Vec::with_capacity(2 * j);
                lat.face_indices(j, c, &mut f);
                for &x in &f {
                    if local[x] == usize::MAX {
                        local[x] = next;
                        next += 1;
                    }
                }
                rows.push(f);
            }
            return compact_rows(next, &local, rows).rank();
        }
        let mut local = vec![usize::MAX; n];
        let mut comp = Vec::new();
        for c in (0..n).filter(|&c| !mask[c]) {
            local[c] = comp.len();
            comp.push(c);
        }
        let mut rows: Vec<Vec<usize>> = Vec::new();
        if j < lat.dim() {
            let mut seen = vec![false; lat.num_cells(j + 1)];
            for &c in &comp {
                let mut co = Vec::new();
                lat.coface_indices(j, c, &mut co);
                for u in co {
                    if !seen[u] {
                        seen[u] = true;
                        let mut f = Vec::with_capacity(2 * j + 2);
                        lat.face_indices(j + 1, u, &mut f);
                        rows.push(f);
                    }
                }
            }
        }
        for &m in lat.masks(j) {
            rows.push(flat_cycle(lat, j, m));
        }
        let r = compact_rows(comp.len(), &local, rows).rank();
        let dim_ker = n - self.torus_rank[j];
        selected.len() + r - dim_ker
    }

    /// Betti numbers of a face-closed subcomplex.
    pub fn betti(&self, sub: &SubComplex) -> BettiVector {
        let d = sub.dim();
        let mut ranks = vec![0; d + 2];
        for (j, r) in ranks.iter_mut().enumerate().take(d + 1).skip(1) {
            if !sub.cells(j).is_empty() {
                *r = self.rank_of_cols(j, &sub.cell_mask(self.lattice, j));
            }
        }
        BettiVector((0..=d).map(|j| sub.cells(j).len() - ranks[j] - ranks[j + 1]).collect())
    }
}

pub fn betti(lattice: &Lattice, sub: &SubComplex) -> BettiVector {
    TorusRanks::new(lattice).betti(sub)
}

/// Reduced Betti numbers: `b'_0 = b_0 - 1`.
pub fn reduced_betti(lattice: &Lattice, sub: &SubComplex) -> Result<BettiVector> {
    if sub.is_empty() {
        return Err(Error::arg("subcomplex", "reduced Betti numbers of an empty complex"));
    }
    let mut b = betti(lattice, sub);
    b.0[0] -= 1;
    Ok(b)
}

pub fn torus_betti(lattice: &Lattice) -> BettiVector {
    betti(lattice, &subcomplex(lattice, &Region::full(lattice)))
}

/// Expected torus Betti numbers `binom(D, j)`.
pub fn torus_betti_expected(dim: usize) -> BettiVector {
    BettiVector((0..=dim).map(|j| binomial(dim, j)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(d: usize, l: usize) -> Lattice {
        Lattice::new(LatticeSpec::new(d, l).unwrap())
    }

    fn block(l: &Lattice, lo: &[usize], len: &[usize]) -> Region {
        Region::from_cuboids(l, vec![Cuboid::new(lo.to_vec(), len.to_vec())]).unwrap()
    }

    #[test]
    fn torus_betti_numbers() {
        for d in 1..=4 {
            for l in [2, 3] {
                let lat = lat(d, l);
                assert_eq!(torus_betti(&lat), torus_betti_expected(d), "D={d} L={l}");
            }
        }
        assert_eq!(torus_betti(&lat(4, 2)).get(2), 6);
    }

    #[test]
    fn block_cell_counts() {
        let l = lat(2, 9);
        let sub = subcomplex(&l, &block(&l, &[2, 2], &[3, 3]));
        assert_eq!(sub.counts(), vec![9, 12, 4]);
        assert_eq!(reduced_betti(&l, &sub).unwrap(), BettiVector(vec![0, 0, 0]));
    }

    #[test]
    fn single_vertex_complex() {
        let l = lat(3, 4);
        let sub = subcomplex(&l, &Region::single_vertex(&l, &[1, 2, 3]).unwrap());
        assert_eq!(sub.counts(), vec![1, 0, 0, 0]);
        assert_eq!(reduced_betti(&l, &sub).unwrap(), BettiVector(vec![0, 0, 0, 0]));
    }

    #[test]
    fn annulus_has_one_loop() {
        let l = lat(2, 12);
        let outer = block(&l, &[0, 0], &[6, 6]);
        let hole = block(&l, &[2, 2], &[2, 2]);
        let mask: Vec<bool> = outer.mask().iter().zip(hole.mask()).map(|(a, b)| *a && !*b).collect();
        let sub = subcomplex_from_mask(&l, &mask);
        assert_eq!(reduced_betti(&l, &sub).unwrap(), BettiVector(vec![0, 1, 0]));
    }

    #[test]
    fn two_blocks_have_two_components() {
        let l = lat(2, 12);
        let r = Region::from_cuboids(
            &l,
            vec![Cuboid::new(vec![0, 0], vec![2, 2]), Cuboid::new(vec![5, 5], vec![2, 2])],
        )
        .unwrap();
        assert_eq!(reduced_betti(&l, &subcomplex(&l, &r)).unwrap().get(0), 1);
    }

    #[test]
    fn empty_complex_rejected() {
        let l = lat(2, 3);
        let empty = Region::full(&l).complement();
        assert!(reduced_betti(&l, &subcomplex(&l, &empty)).is_err());
    }

    #[test]
    fn wrapping_band_is_a_circle() {
        let l = lat(2, 5);
        let band = block(&l, &[0, 3], &[5, 2]);
        assert_eq!(betti(&l, &subcomplex(&l, &band)), BettiVector(vec![1, 1, 0]));
    }

    #[test]
    fn rank_oracle_matches_direct_elimination() {
        for (d, l) in [(2, 3), (3, 2), (3, 3), (4, 2)] {
            let lat = lat(d, l);
            let tr = TorusRanks::new(&lat);
            for j in 1..=d {
                let full = lat.boundary_matrix(j).unwrap();
                assert_eq!(tr.torus_rank(j), full.rank(), "D={d} L={l} j={j}");
                let n = lat.num_cells(j);
                for seed in 0..6u64 {
                    let mask: Vec<bool> = (0..n)
                        .map(|c| !(c as u64 * 2654435761 + seed * 97).is_multiple_of(seed + 3))
                        .collect();
                    let cols: Vec<usize> = (0..n).filter(|&c| mask[c]).collect();
                    assert_eq!(tr.rank_of_cols(j, &mask), full.rank_of_cols(&cols));
                }
            }
        }
    }

    #[test]
    fn flat_cycles_pair_with_cocycles() {
        let lat = lat(3, 3);
        for j in 1..3 {
            let bd = lat.boundary_matrix(j).unwrap();
            for &m in lat.masks(j) {
                let z = flat_cycle(&lat, j, m);
                assert_eq!(z.len(), 3usize.pow(j as u32));
                let v = crate::gf2::BitVec::from_indices(lat.num_cells(j), &z);
                assert!(bd.mul_vec(&v).is_zero());
                for &m2 in lat.masks(j) {
                    let x = flat_cocycle(&lat, j, m2);
                    let overlap = z.iter().filter(|c| x.contains(c)).count();
                    assert_eq!(overlap % 2 == 1, m == m2);
                }
            }
        }
    }

    #[test]
    fn complement_roundtrip() {
        let l = lat(3, 4);
        let r = block(&l, &[1, 3, 0], &[2, 2, 3]);
        assert_eq!(r.complement().complement(), r);
        assert!(r.complement().is_consistent(&l));
        assert!(r.is_consistent(&l));
        assert_eq!(r.num_vertices() + r.complement().num_vertices(), 64);
    }
}
