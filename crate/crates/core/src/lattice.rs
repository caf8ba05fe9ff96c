//! The periodic D-dimensional cubic lattice as a cell complex.
//!
//! A j-cell is identified by its minimal corner (`base`) and the set of axes
//! it spans (`dirs`, a bitmask). Cells of dimension j are enumerated
//! lexicographically in `(dirs, base)`: axis sets of size j in lexicographic
//! order of their sorted axis lists, then base coordinates row-major with
//! axis 0 most significant. That order is the on-disk index order used by
//! every file the CLI writes.
//!
//! The dual lattice is the same complex shifted by one half in every axis.
//! The dual of `(base, S)` is `(base - e_{S^c}, S^c)` in dual coordinates,
//! which makes the two cells share their centre.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    dim: usize,
    size: usize,
}

impl LatticeSpec {
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::arg(
                "D",
                format!("dimension must be in 1..={MAX_DIM}, got {dim}"),
            ));
        }
        if size < 2 {
            return Err(Error::arg("L", format!("linear size must be at least 2, got {size}")));
        }
        if size > u16::MAX as usize {
            return Err(Error::arg("L", format!("linear size {size} too large")));
        }
        if size.checked_pow(dim as u32).is_none_or(|n| n > u32::MAX as usize) {
            return Err(Error::arg("L", format!("L^D overflows for L={size}, D={dim}")));
        }
        Ok(LatticeSpec { dim, size })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of 0-cells, `L^D`.
    pub fn num_vertices(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    /// Number of j-cells, `binom(D, j) * L^D`; zero outside `0..=D`.
    pub fn num_cells(&self, j: usize) -> usize {
        if j > self.dim {
            return 0;
        }
        binomial(self.dim, j) * self.num_vertices()
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A cell of the primal lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    base: [u16; MAX_DIM],
    dirs: u8,
}

impl CellId {
    /// Builds a cell from its minimal corner and spanned axes (0-based).
    pub fn new(base: &[usize], axes: &[usize]) -> Self {
        let mut b = [0u16; MAX_DIM];
        for (slot, &x) in b.iter_mut().zip(base) {
            *slot = x as u16;
        }
        let dirs = axes.iter().fold(0u8, |m, &a| m | (1 << a));
        CellId { base: b, dirs }
    }

    pub fn from_mask(base: [u16; MAX_DIM], dirs: u8) -> Self {
        CellId { base, dirs }
    }

    pub fn dim(&self) -> usize {
        self.dirs.count_ones() as usize
    }

    pub fn dirs(&self) -> u8 {
        self.dirs
    }

    pub fn base(&self) -> &[u16; MAX_DIM] {
        &self.base
    }

    pub fn spans(&self, axis: usize) -> bool {
        self.dirs & (1 << axis) != 0
    }

    pub fn axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_DIM).filter(move |&a| self.spans(a))
    }
}

/// A cell of the dual lattice. Its coordinates are dual-lattice coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualCellId(pub CellId);

impl DualCellId {
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// The same cell read as a cell of a cubic lattice, for reuse of the
    /// face/coface combinatorics on the dual lattice.
    pub fn as_cell(&self) -> CellId {
        self.0
    }
}

/// Immutable index tables for one lattice.
#[derive(Clone, Debug)]
pub struct Lattice {
    spec: LatticeSpec,
    /// Axis masks of each dimension, in enumeration order.
    masks: Vec<Vec<u8>>,
    /// Position of a mask inside `masks[popcount]`.
    mask_rank: Vec<u16>,
    strides: [usize; MAX_DIM],
    n_vertices: usize,
}

impl Lattice {
    pub fn new(spec: LatticeSpec) -> Self {
        let d = spec.dim();
        let mut masks = vec![Vec::new(); d + 1];
        let mut all: Vec<u8> = (0..(1u16 << d)).map(|m| m as u8).collect();
        // Lexicographic order of sorted axis lists.
        all.sort_by_key(|&m| axis_list(m));
        for m in all {
            masks[m.count_ones() as usize].push(m);
        }
        let mut mask_rank = vec![0u16; 1 << d];
        for list in &masks {
            for (r, &m) in list.iter().enumerate() {
                mask_rank[m as usize] = r as u16;
            }
        }
        let mut strides = [0usize; MAX_DIM];
        let mut s = 1;
        for axis in (0..d).rev() {
            strides[axis] = s;
            s *= spec.size();
        }
        Lattice {
            spec,
            masks,
            mask_rank,
            strides,
            n_vertices: spec.num_vertices(),
        }
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn size(&self) -> usize {
        self.spec.size()
    }

    pub fn num_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn num_cells(&self, j: usize) -> usize {
        self.spec.num_cells(j)
    }

    /// Axis masks of dimension `j` in enumeration order.
    pub fn masks(&self, j: usize) -> &[u8] {
        &self.masks[j]
    }

    fn check_dim(&self, j: usize) -> Result<()> {
        if j > self.dim() {
            return Err(Error::arg(
                "j",
                format!("cell dimension {j} outside 0..={}", self.dim()),
            ));
        }
        Ok(())
    }

    /// All j-cells in enumeration order.
    pub fn enumerate_cells(&self, j: usize) -> Result<Vec<CellId>> {
        self.check_dim(j)?;
        Ok((0..self.num_cells(j)).map(|i| self.cell(j, i)).collect())
    }

    pub fn vertex_linear(&self, base: &[u16; MAX_DIM]) -> usize {
        (0..self.dim()).map(|a| base[a] as usize * self.strides[a]).sum()
    }

    pub fn vertex_coords(&self, mut linear: usize) -> [u16; MAX_DIM] {
        let mut base = [0u16; MAX_DIM];
        for a in 0..self.dim() {
            base[a] = (linear / self.strides[a]) as u16;
            linear %= self.strides[a];
        }
        base
    }

    /// Enumeration index of a cell within its dimension.
    pub fn index_of(&self, cell: &CellId) -> usize {
        self.mask_rank[cell.dirs as usize] as usize * self.n_vertices + self.vertex_linear(&cell.base)
    }

    /// Inverse of [`Lattice::index_of`].
    pub fn cell(&self, j: usize, index: usize) -> CellId {
        let mask = self.masks[j][index / self.n_vertices];
        CellId {
            base: self.vertex_coords(index % self.n_vertices),
            dirs: mask,
        }
    }

    /// Linear vertex index of `v + delta * e_axis` with periodic wrap.
    #[inline]
    pub fn shift_vertex(&self, v: usize, axis: usize, delta: isize) -> usize {
        let l = self.size();
        let stride = self.strides[axis];
        let c = (v / stride) % l;
        let nc = (c as isize + delta).rem_euclid(l as isize) as usize;
        v - c * stride + nc * stride
    }

    fn shifted(&self, cell: &CellId, axis: usize, delta: isize) -> CellId {
        let mut out = *cell;
        let l = self.size() as isize;
        out.base[axis] = (out.base[axis] as isize + delta).rem_euclid(l) as u16;
        out
    }

    /// The 2j faces of a j-cell, `j >= 1`.
    pub fn boundary_cells(&self, cell: &CellId) -> Result<Vec<CellId>> {
        if cell.dim() == 0 {
            return Err(Error::arg("cell", "a 0-cell has no boundary"));
        }
        let mut out = Vec::with_capacity(2 * cell.dim());
        for axis in cell.axes() {
            let face = CellId {
                base: cell.base,
                dirs: cell.dirs & !(1 << axis),
            };
            out.push(face);
            out.push(self.shifted(&face, axis, 1));
        }
        Ok(out)
    }

    /// The `2(D-j)` cofaces of a j-cell, `j <= D-1`.
    pub fn coboundary_cells(&self, cell: &CellId) -> Result<Vec<CellId>> {
        if cell.dim() >= self.dim() {
            return Err(Error::arg("cell", "a top-dimensional cell has no coboundary"));
        }
        let mut out = Vec::with_capacity(2 * (self.dim() - cell.dim()));
        for axis in (0..self.dim()).filter(|&a| !cell.spans(a)) {
            let coface = CellId {
                base: cell.base,
                dirs: cell.dirs | (1 << axis),
            };
            out.push(coface);
            out.push(self.shifted(&coface, axis, -1));
        }
        Ok(out)
    }

    /// Face indices (dimension j-1) of the j-cell with index `idx`, appended to `out`.
    pub fn face_indices(&self, j: usize, idx: usize, out: &mut Vec<usize>) {
        let mask = self.masks[j][idx / self.n_vertices];
        let v = idx % self.n_vertices;
        for axis in 0..self.dim() {
            if mask & (1 << axis) == 0 {
                continue;
            }
            let fmask = mask & !(1 << axis);
            let off = self.mask_rank[fmask as usize] as usize * self.n_vertices;
            out.push(off + v);
            out.push(off + self.shift_vertex(v, axis, 1));
        }
    }

    /// Coface indices (dimension j+1) of the j-cell with index `idx`, appended to `out`.
    pub fn coface_indices(&self, j: usize, idx: usize, out: &mut Vec<usize>) {
        let mask = self.masks[j][idx / self.n_vertices];
        let v = idx % self.n_vertices;
        for axis in 0..self.dim() {
            if mask & (1 << axis) != 0 {
                continue;
            }
            let cmask = mask | (1 << axis);
            let off = self.mask_rank[cmask as usize] as usize * self.n_vertices;
            out.push(off + v);
            out.push(off + self.shift_vertex(v, axis, -1));
        }
    }

    /// Linear indices of the `2^j` vertices of a j-cell.
    pub fn cell_vertices(&self, j: usize, idx: usize, out: &mut Vec<usize>) {
        let mask = self.masks[j][idx / self.n_vertices];
        let v = idx % self.n_vertices;
        out.push(v);
        for axis in 0..self.dim() {
            if mask & (1 << axis) == 0 {
                continue;
            }
            let n = out.len();
            for i in 0..n {
                let w = self.shift_vertex(out[i], axis, 1);
                out.push(w);
            }
        }
    }

    fn full_mask(&self) -> u8 {
        ((1u16 << self.dim()) - 1) as u8
    }

    /// The dual cell of a primal cell.
    pub fn dual_cell(&self, cell: &CellId) -> DualCellId {
        let comp = self.full_mask() & !cell.dirs;
        let mut base = cell.base;
        let l = self.size() as i32;
        for axis in 0..self.dim() {
            if comp & (1 << axis) != 0 {
                base[axis] = ((base[axis] as i32 - 1).rem_euclid(l)) as u16;
            }
        }
        DualCellId(CellId { base, dirs: comp })
    }

    /// The primal cell whose dual is `dual`.
    pub fn primal_cell(&self, dual: &DualCellId) -> CellId {
        let d = dual.0;
        let mut base = d.base;
        let l = self.size() as i32;
        for axis in 0..self.dim() {
            if d.dirs & (1 << axis) != 0 {
                base[axis] = ((base[axis] as i32 + 1).rem_euclid(l)) as u16;
            }
        }
        CellId {
            base,
            dirs: self.full_mask() & !d.dirs,
        }
    }

    /// The dual of a dual cell, read back on the primal lattice. Together with
    /// [`Lattice::dual_cell`] this is the involution `dual(dual(c)) = c`.
    pub fn dual_of_dual(&self, dual: &DualCellId) -> CellId {
        self.primal_cell(dual)
    }

    /// Faces of a dual cell, on the dual lattice.
    pub fn dual_boundary_cells(&self, dual: &DualCellId) -> Result<Vec<DualCellId>> {
        Ok(self.boundary_cells(&dual.0)?.into_iter().map(DualCellId).collect())
    }

    /// Incidence matrix of `∂_j`: rows are (j-1)-cells, columns j-cells.
    pub fn boundary_matrix(&self, j: usize) -> Result<Gf2Matrix> {
        if j == 0 || j > self.dim() {
            return Err(Error::arg(
                "j",
                format!("boundary map index {j} outside 1..={}", self.dim()),
            ));
        }
        let rows = self.num_cells(j - 1);
        let cols = self.num_cells(j);
        let mut m = Gf2Matrix::zeros(rows, cols);
        let mut buf = Vec::with_capacity(2 * j);
        for c in 0..cols {
            buf.clear();
            self.face_indices(j, c, &mut buf);
            for &r in &buf {
                m.toggle(r, c);
            }
        }
        Ok(m)
    }

    /// Incidence matrix of the coboundary map: rows (j+1)-cells, columns j-cells.
    pub fn coboundary_matrix(&self, j: usize) -> Result<Gf2Matrix> {
        if j >= self.dim() {
            return Err(Error::arg(
                "j",
                format!("coboundary map index {j} outside 0..{}", self.dim()),
            ));
        }
        let rows = self.num_cells(j + 1);
        let cols = self.num_cells(j);
        let mut m = Gf2Matrix::zeros(rows, cols);
        let mut buf = Vec::new();
        for c in 0..cols {
            buf.clear();
            self.coface_indices(j, c, &mut buf);
            for &r in &buf {
                m.toggle(r, c);
            }
        }
        Ok(m)
    }
}

fn axis_list(mask: u8) -> Vec<u8> {
    (0..8u8).filter(|a| mask & (1 << a) != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(d: usize, l: usize) -> Lattice {
        Lattice::new(LatticeSpec::new(d, l).unwrap())
    }

    #[test]
    fn cell_counts() {
        assert_eq!(lat(3, 4).enumerate_cells(1).unwrap().len(), 192);
        assert_eq!(lat(2, 2).enumerate_cells(1).unwrap().len(), 8);
        assert_eq!(lat(4, 3).enumerate_cells(2).unwrap().len(), 486);
        assert!(lat(2, 3).enumerate_cells(3).is_err());
    }

    #[test]
    fn spec_rejects_degenerate_sizes() {
        assert!(LatticeSpec::new(2, 1).is_err());
        assert!(LatticeSpec::new(0, 4).is_err());
        assert!(LatticeSpec::new(9, 2).is_err());
    }

    #[test]
    fn index_roundtrip_and_order() {
        let l = lat(3, 3);
        for j in 0..=3 {
            let cells = l.enumerate_cells(j).unwrap();
            let mut sorted = cells.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), cells.len());
            for (i, c) in cells.iter().enumerate() {
                assert_eq!(l.index_of(c), i);
                assert_eq!(c.dim(), j);
            }
        }
        // dirs-major: first block spans axis 0 only
        let e = l.enumerate_cells(1).unwrap();
        assert_eq!(e[0], CellId::new(&[0, 0, 0], &[0]));
        assert_eq!(e[1], CellId::new(&[0, 0, 1], &[0]));
        assert_eq!(e[27], CellId::new(&[0, 0, 0], &[1]));
        let p = l.enumerate_cells(2).unwrap();
        assert_eq!(p[27].dirs(), 0b101);
    }

    #[test]
    fn edge_boundary_in_small_torus() {
        let l = lat(2, 2);
        let e = CellId::new(&[0, 0], &[0]);
        let b = l.boundary_cells(&e).unwrap();
        assert_eq!(b, vec![CellId::new(&[0, 0], &[]), CellId::new(&[1, 0], &[])]);
        assert!(l.boundary_cells(&CellId::new(&[0, 0], &[])).is_err());
    }

    #[test]
    fn face_and_coface_counts() {
        let l2 = lat(2, 3);
        assert_eq!(l2.boundary_cells(&CellId::new(&[1, 1], &[0, 1])).unwrap().len(), 4);
        assert_eq!(l2.coboundary_cells(&CellId::new(&[1, 1], &[])).unwrap().len(), 4);
        let l3 = lat(3, 3);
        assert_eq!(
            l3.boundary_cells(&CellId::new(&[0, 1, 2], &[0, 1, 2])).unwrap().len(),
            6
        );
        assert_eq!(l3.coboundary_cells(&CellId::new(&[0, 1, 2], &[1])).unwrap().len(), 4);
        assert!(l3.coboundary_cells(&CellId::new(&[0, 0, 0], &[0, 1, 2])).is_err());
    }

    #[test]
    fn coboundary_is_transpose_of_boundary() {
        for (d, l) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let lat = lat(d, l);
            for j in 0..d {
                let cob = lat.coboundary_matrix(j).unwrap();
                let bd = lat.boundary_matrix(j + 1).unwrap();
                assert_eq!(cob, bd.transpose(), "D={d} L={l} j={j}");
            }
        }
    }

    #[test]
    fn index_faces_match_cell_faces() {
        let l = lat(3, 3);
        for j in 1..=3 {
            for idx in 0..l.num_cells(j) {
                let mut buf = Vec::new();
                l.face_indices(j, idx, &mut buf);
                let mut a: Vec<usize> = buf;
                let mut b: Vec<usize> = l
                    .boundary_cells(&l.cell(j, idx))
                    .unwrap()
                    .iter()
                    .map(|c| l.index_of(c))
                    .collect();
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn boundary_squares_to_zero() {
        for (d, l) in [(2, 3), (3, 2), (3, 3), (4, 2)] {
            let lat = lat(d, l);
            for j in 2..=d {
                let p = lat
                    .boundary_matrix(j - 1)
                    .unwrap()
                    .mul(&lat.boundary_matrix(j).unwrap());
                assert!(p.is_zero(), "D={d} L={l} j={j}");
            }
        }
    }

    #[test]
    fn boundary_matrix_shapes_and_rank() {
        let m = lat(2, 2).boundary_matrix(1).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 8));
        assert_eq!(m.rank(), 3);
        let m = lat(3, 2).boundary_matrix(2).unwrap();
        assert_eq!((m.rows(), m.cols()), (24, 24));
        assert!(lat(2, 2).boundary_matrix(0).is_err());
        assert!(lat(2, 2).boundary_matrix(3).is_err());
    }

    #[test]
    fn dual_map_dimensions() {
        let l = lat(2, 3);
        let edge = CellId::new(&[1, 2], &[0]);
        assert_eq!(l.dual_cell(&edge).dim(), 1);
        let plaq = CellId::new(&[1, 2], &[0, 1]);
        assert_eq!(l.dual_cell(&plaq).dim(), 0);
        let l3 = lat(3, 3);
        assert_eq!(l3.dual_cell(&CellId::new(&[0, 0, 0], &[0, 2])).dim(), 1);
    }

    #[test]
    fn dual_is_involution_and_reverses_incidence() {
        for (d, l) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let lat = lat(d, l);
            for j in 0..=d {
                for c in lat.enumerate_cells(j).unwrap() {
                    assert_eq!(lat.dual_of_dual(&lat.dual_cell(&c)), c);
                }
            }
            for j in 0..d {
                let lower = lat.enumerate_cells(j).unwrap();
                let upper = lat.enumerate_cells(j + 1).unwrap();
                for f in &upper {
                    let faces = lat.boundary_cells(f).unwrap();
                    let df = lat.dual_cell(f);
                    for e in &lower {
                        let primal = faces.iter().filter(|x| *x == e).count() % 2 == 1;
                        let de = lat.dual_cell(e);
                        let dual_faces = lat.dual_boundary_cells(&de).unwrap();
                        let dual = dual_faces.iter().filter(|x| **x == df).count() % 2 == 1;
                        assert_eq!(primal, dual, "D={d} L={l} e={e:?} f={f:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic_enumeration() {
        let a = lat(3, 4);
        let b = lat(3, 4);
        for j in 0..=3 {
            assert_eq!(a.enumerate_cells(j).unwrap(), b.enumerate_cells(j).unwrap());
        }
    }
}
