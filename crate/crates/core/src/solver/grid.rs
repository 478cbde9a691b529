use crate::error::{Error, Result};
use crate::physics::Conserved;
use crate::scalar::Real;

/// Uniform tensor-product mesh of `cells[0] x .. x cells[D-1]` elements, each
/// carrying `(degree + 1)^D` Gauss–Lobatto nodes.
///
/// Cells are numbered with the x index fastest; nodes inside a cell likewise.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T, const D: usize> {
    lower: [T; D],
    upper: [T; D],
    cells: [usize; D],
    spacing: [T; D],
    degree: usize,
}

impl<T: Real, const D: usize> Grid<T, D> {
    pub fn new(lower: [T; D], upper: [T; D], cells: [usize; D], degree: usize) -> Result<Self> {
        let mut spacing = [T::zero(); D];
        for d in 0..D {
            if cells[d] < 3 {
                return Err(Error::Config(format!(
                    "need at least 3 cells per direction, got {} in direction {d}",
                    cells[d]
                )));
            }
            if !(upper[d] > lower[d]) {
                return Err(Error::Config(format!("empty domain in direction {d}")));
            }
            spacing[d] = (upper[d] - lower[d]) / T::from_count(cells[d]);
        }
        if !(1..=crate::basis::MAX_DEGREE).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        Ok(Self {
            lower,
            upper,
            cells,
            spacing,
            degree,
        })
    }

    pub fn lower(&self) -> [T; D] {
        self.lower
    }

    pub fn upper(&self) -> [T; D] {
        self.upper
    }

    pub fn cells(&self) -> [usize; D] {
        self.cells
    }

    /// `[dx, dy, ..]`.
    pub fn spacing(&self) -> [T; D] {
        self.spacing
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nodes per direction inside one cell.
    #[inline]
    pub fn nodes_1d(&self) -> usize {
        self.degree + 1
    }

    #[inline]
    pub fn nodes_per_cell(&self) -> usize {
        self.nodes_1d().pow(D as u32)
    }

    #[inline]
    pub fn num_cells(&self) -> usize {
        self.cells.iter().product()
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.num_cells() * self.nodes_per_cell()
    }

    #[inline]
    pub fn cell_multi(&self, mut c: usize) -> [usize; D] {
        let mut out = [0; D];
        for d in 0..D {
            out[d] = c % self.cells[d];
            c /= self.cells[d];
        }
        out
    }

    #[inline]
    pub fn cell_index(&self, multi: [usize; D]) -> usize {
        let mut idx = 0;
        for d in (0..D).rev() {
            idx = idx * self.cells[d] + multi[d];
        }
        idx
    }

    #[inline]
    pub fn node_multi(&self, mut a: usize) -> [usize; D] {
        let n = self.nodes_1d();
        let mut out = [0; D];
        for o in out.iter_mut() {
            *o = a % n;
            a /= n;
        }
        out
    }

    #[inline]
    pub fn node_index(&self, multi: [usize; D]) -> usize {
        let n = self.nodes_1d();
        let mut idx = 0;
        for d in (0..D).rev() {
            idx = idx * n + multi[d];
        }
        idx
    }

    /// Stride between consecutive nodes along direction `d` inside a cell.
    #[inline]
    pub fn node_stride(&self, d: usize) -> usize {
        self.nodes_1d().pow(d as u32)
    }

    /// Physical coordinate of a node. Cell-end nodes are computed from the
    /// face position so that nodes shared by neighbours coincide bitwise.
    pub fn node_coord(&self, nodes: &[T], cell: usize, node: usize) -> [T; D] {
        let ci = self.cell_multi(cell);
        let ai = self.node_multi(node);
        let k = self.degree;
        let mut x = [T::zero(); D];
        for d in 0..D {
            let h = self.spacing[d];
            x[d] = if ai[d] == 0 {
                self.lower[d] + T::from_count(ci[d]) * h
            } else if ai[d] == k {
                self.lower[d] + T::from_count(ci[d] + 1) * h
            } else {
                self.lower[d] + (T::from_count(ci[d]) + T::half()) * h + T::half() * h * nodes[ai[d]]
            };
        }
        x
    }

    /// Coordinates of every node, in field order.
    pub fn all_coords(&self, nodes: &[T]) -> Vec<[T; D]> {
        let npc = self.nodes_per_cell();
        (0..self.num_nodes())
            .map(|g| self.node_coord(nodes, g / npc, g % npc))
            .collect()
    }

    /// Tensor quadrature weights of one cell, summing to `2^D`.
    pub fn tensor_weights(&self, weights: &[T]) -> Vec<T> {
        (0..self.nodes_per_cell())
            .map(|a| {
                self.node_multi(a)
                    .iter()
                    .fold(T::one(), |w, &i| w * weights[i])
            })
            .collect()
    }

    /// Cell volume `dx * dy * ..`.
    pub fn cell_volume(&self) -> T {
        self.spacing.iter().fold(T::one(), |v, &h| v * h)
    }
}

/// Nodal conserved states of a whole mesh, contiguous per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T, const D: usize> {
    pub values: Vec<Conserved<T, D>>,
}

impl<T: Real, const D: usize> Field<T, D> {
    pub fn new(values: Vec<Conserved<T, D>>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![Conserved::zero(); len],
        }
    }

    /// Nodal interpolant of a pointwise initial condition.
    pub fn from_fn(grid: &Grid<T, D>, nodes: &[T], f: impl Fn(&[T; D]) -> Conserved<T, D>) -> Self {
        Self {
            values: grid.all_coords(nodes).iter().map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell(&self, grid: &Grid<T, D>, c: usize) -> &[Conserved<T, D>] {
        let n = grid.nodes_per_cell();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).max_abs()))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, a| m.max(a.max_abs()))
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: T, other: &Self) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += *b * s;
        }
    }

    /// `self = a * self + b * other`.
    pub fn combine(&mut self, a: T, b: T, other: &Self) {
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x = *x * a + *y * b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::GlBasis;

    #[test]
    fn index_round_trips() {
        let g = Grid::<f64, 2>::new([0.0, 0.0], [1.0, 2.0], [4, 3], 2).unwrap();
        assert_eq!(g.num_cells(), 12);
        assert_eq!(g.nodes_per_cell(), 9);
        for c in 0..g.num_cells() {
            assert_eq!(g.cell_index(g.cell_multi(c)), c);
        }
        for a in 0..9 {
            assert_eq!(g.node_index(g.node_multi(a)), a);
        }
        assert_eq!(g.cell_multi(5), [1, 1]);
        assert_eq!(g.node_stride(1), 3);
    }

    #[test]
    fn shared_nodes_coincide() {
        let b = GlBasis::<f64>::new(3).unwrap();
        let g = Grid::<f64, 1>::new([0.1], [2.3], [7], 3).unwrap();
        for c in 0..6 {
            assert_eq!(g.node_coord(b.nodes(), c, 3), g.node_coord(b.nodes(), c + 1, 0));
        }
    }

    #[test]
    fn tensor_weights_sum() {
        let b = GlBasis::<f64>::new(2).unwrap();
        let g = Grid::<f64, 2>::new([0.0, 0.0], [1.0, 1.0], [3, 3], 2).unwrap();
        let s: f64 = g.tensor_weights(b.weights()).iter().sum();
        assert!((s - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_tiny_meshes() {
        assert!(Grid::<f64, 1>::new([0.0], [1.0], [2], 2).is_err());
        assert!(Grid::<f64, 1>::new([0.0], [1.0], [5], 0).is_err());
    }
}
