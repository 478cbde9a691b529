//! Gauss–Lobatto quadrature and the summation-by-parts operator family on
//! the reference element `[-1, 1]`.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_DEGREE: usize = 8;

/// Gauss–Lobatto nodes and weights together with the difference (`D`),
/// stiffness (`S = M D`) and boundary (`B = diag(tau)`) matrices.
///
/// Matrices are stored row-major with `degree + 1` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GlBasis<T> {
    degree: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
    bary: Vec<T>,
    diff: Vec<T>,
    stiff: Vec<T>,
    tau: Vec<T>,
}

impl<T: Real> GlBasis<T> {
    pub fn new(degree: usize) -> Result<Self> {
        let (nodes, weights) = gauss_lobatto(degree)?;
        let bary = barycentric_weights(&nodes);
        let diff = difference_matrix(&nodes);
        let n = degree + 1;
        let mut stiff = vec![T::zero(); n * n];
        for j in 0..n {
            for l in 0..n {
                stiff[j * n + l] = weights[j] * diff[j * n + l];
            }
        }
        let mut tau = vec![T::zero(); n];
        tau[0] = -T::one();
        tau[degree] = T::one();
        Ok(Self {
            degree,
            nodes,
            weights,
            bary,
            diff,
            stiff,
            tau,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nodes, `degree + 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.degree + 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    #[inline]
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn tau(&self) -> &[T] {
        &self.tau
    }

    /// `D[j][l] = L_l'(X_j)`.
    #[inline]
    pub fn d(&self, j: usize, l: usize) -> T {
        self.diff[j * self.len() + l]
    }

    #[inline]
    pub fn s(&self, j: usize, l: usize) -> T {
        self.stiff[j * self.len() + l]
    }

    /// `B[j][l]`, diagonal.
    #[inline]
    pub fn b(&self, j: usize, l: usize) -> T {
        if j == l {
            self.tau[j]
        } else {
            T::zero()
        }
    }

    pub fn difference_matrix(&self) -> &[T] {
        &self.diff
    }

    /// Values `L_l(x)` of every Lagrange basis polynomial at a reference
    /// coordinate, via the barycentric formula.
    pub fn lagrange_values(&self, x: T) -> Vec<T> {
        let n = self.len();
        let mut out = vec![T::zero(); n];
        if let Some(hit) = self.nodes.iter().position(|&xn| xn == x) {
            out[hit] = T::one();
            return out;
        }
        let mut denom = T::zero();
        for l in 0..n {
            let t = self.bary[l] / (x - self.nodes[l]);
            out[l] = t;
            denom = denom + t;
        }
        for v in &mut out {
            *v = *v / denom;
        }
        out
    }
}

/// Gauss–Lobatto nodes and weights with `degree + 1` points.
///
/// Newton iteration on `(1 - x^2) P_k'(x)` starting from Chebyshev–Gauss–Lobatto
/// points; the result is symmetrized so that `X_l = -X_{k-l}` exactly.
pub fn gauss_lobatto<T: Real>(degree: usize) -> Result<(Vec<T>, Vec<T>)> {
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::UnsupportedDegree(degree));
    }
    let k = degree;
    let n = k + 1;
    let kf = T::from_count(k);
    let tol = T::lit(1e-15).max(T::epsilon());

    let mut x: Vec<T> = (0..n)
        .map(|j| -(T::PI() * T::from_count(j) / kf).cos())
        .collect();
    let mut p_k = vec![T::zero(); n];

    for xi in x.iter_mut() {
        for _ in 0..100 {
            let (pk, pkm1) = legendre_pair(k, *xi);
            let step = (*xi * pk - pkm1) / (T::from_count(n) * pk);
            *xi = *xi - step;
            if step.abs() <= tol {
                break;
            }
        }
    }

    // Symmetrize and pin the endpoints.
    for j in 0..n / 2 {
        let m = (x[n - 1 - j] - x[j]) * T::half();
        x[j] = -m;
        x[n - 1 - j] = m;
    }
    if n % 2 == 1 {
        x[n / 2] = T::zero();
    }
    x[0] = -T::one();
    x[k] = T::one();

    for (j, xi) in x.iter().enumerate() {
        p_k[j] = legendre_pair(k, *xi).0;
    }
    let scale = T::two() / (kf * (kf + T::one()));
    let mut w: Vec<T> = p_k.iter().map(|&p| scale / (p * p)).collect();
    for j in 0..n / 2 {
        let m = (w[j] + w[n - 1 - j]) * T::half();
        w[j] = m;
        w[n - 1 - j] = m;
    }
    Ok((x, w))
}

/// `(P_k(x), P_{k-1}(x))` by the three-term recurrence.
fn legendre_pair<T: Real>(k: usize, x: T) -> (T, T) {
    let mut p_prev = T::one();
    let mut p = x;
    for m in 1..k {
        let mf = T::from_count(m);
        let next = ((T::two() * mf + T::one()) * x * p - mf * p_prev) / (mf + T::one());
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

fn barycentric_weights<T: Real>(nodes: &[T]) -> Vec<T> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod = nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .fold(T::one(), |acc, (_, &xm)| acc * (xj - xm));
            T::one() / prod
        })
        .collect()
}

/// Lagrange differentiation matrix `D[j][l] = L_l'(X_j)` (row-major) from
/// barycentric weights; the diagonal is the negative off-diagonal row sum.
pub fn difference_matrix<T: Real>(nodes: &[T]) -> Vec<T> {
    let n = nodes.len();
    let w = barycentric_weights(nodes);
    let mut d = vec![T::zero(); n * n];
    for j in 0..n {
        let mut diag = T::zero();
        for l in 0..n {
            if l != j {
                let v = (w[l] / w[j]) / (nodes[j] - nodes[l]);
                d[j * n + l] = v;
                diag = diag - v;
            }
        }
        d[j * n + j] = diag;
    }
    d
}
