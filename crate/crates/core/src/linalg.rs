//! Small dense helpers: Gram–Schmidt, complements, numerical rank, spectral
//! clustering. Everything here works on ambient dimension ≤ 64.

use nalgebra::SymmetricEigen;

use crate::scalar::{Matrix, Real, Vector};

/// Modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Vectors of `candidates` are orthonormalized against `fixed` (assumed
/// orthonormal) and against each other. A candidate whose remaining norm
/// falls below `drop_tol` times its original norm is discarded.
pub fn orthonormalize<T: Real>(
    candidates: &[Vector<T>],
    fixed: &[Vector<T>],
    drop_tol: T,
) -> Vec<Vector<T>> {
    let mut out: Vec<Vector<T>> = Vec::new();
    for c in candidates {
        let scale = c.norm();
        if scale == T::zero() {
            continue;
        }
        let mut v = c.clone();
        for _ in 0..2 {
            for q in fixed.iter().chain(out.iter()) {
                let d = q.dot(&v);
                v.axpy(-d, q, T::one());
            }
        }
        let r = v.norm();
        if r > drop_tol * scale {
            out.push(v / r);
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of `span` in `R^dim`.
pub fn orthogonal_complement<T: Real>(span: &[Vector<T>], dim: usize) -> Vec<Vector<T>> {
    let tol = T::lit(1e-8);
    let q = orthonormalize(span, &[], tol);
    let standard: Vec<Vector<T>> = (0..dim).map(|i| unit_basis(dim, i)).collect();
    let mut comp = orthonormalize(&standard, &q, T::lit(1e-6));
    comp.truncate(dim - q.len());
    comp
}

pub fn unit_basis<T: Real>(dim: usize, i: usize) -> Vector<T> {
    let mut e = Vector::zeros(dim);
    e[i] = T::one();
    e
}

/// Stack column vectors into a matrix.
pub fn columns<T: Real>(vs: &[Vector<T>], rows: usize) -> Matrix<T> {
    Matrix::from_fn(rows, vs.len(), |i, j| vs[j][i])
}

/// Numerical rank: singular values above `rel * σ_max`.
pub fn numerical_rank<T: Real>(vs: &[Vector<T>], rows: usize, rel: T) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let sv = columns(vs, rows).singular_values();
    let max = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    sv.iter().filter(|&&s| s > rel * max).count()
}

/// Largest deviation of a family from orthonormality, including orthogonality
/// to every vector of `against`.
pub fn orthonormality_residual<T: Real>(vs: &[Vector<T>], against: &[Vector<T>]) -> T {
    let mut worst = T::zero();
    for (i, a) in vs.iter().enumerate() {
        worst = worst.max((a.norm() - T::one()).abs());
        for b in &vs[i + 1..] {
            worst = worst.max(a.dot(b).abs());
        }
        for w in against {
            worst = worst.max(a.dot(w).abs());
        }
    }
    worst
}

pub fn max_abs<T: Real>(m: &Matrix<T>) -> T {
    m.iter().fold(T::zero(), |a, &b| a.max(b.abs()))
}

pub fn identity<T: Real>(n: usize) -> Matrix<T> {
    Matrix::identity(n, n)
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted
/// in decreasing order; columns of the returned matrix are the eigenvectors.
pub fn sorted_symmetric_eigen<T: Real>(m: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// A cluster of numerically equal eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T> {
    pub value: T,
    pub multiplicity: usize,
}

/// Group a decreasing spectrum into clusters whose consecutive gaps are
/// below `merge`. Returns `None` when some gap lies in `[merge, separate)`,
/// i.e. when the grouping is ambiguous.
pub fn cluster_sorted<T: Real>(values: &[T], merge: T, separate: T) -> Option<Vec<Cluster<T>>> {
    let mut clusters: Vec<(T, usize)> = Vec::new();
    let mut prev: Option<T> = None;
    for &v in values {
        match prev {
            Some(p) if (p - v).abs() < merge => {
                let last = clusters.last_mut().expect("cluster exists");
                last.0 += v;
                last.1 += 1;
            }
            Some(p) if (p - v).abs() < separate => return None,
            _ => clusters.push((v, 1)),
        }
        prev = Some(v);
    }
    Some(
        clusters
            .into_iter()
            .map(|(sum, k)| Cluster {
                value: sum / T::from_usize_lossy(k),
                multiplicity: k,
            })
            .collect(),
    )
}
