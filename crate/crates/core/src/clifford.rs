//! Symmetric Clifford systems `P_0, …, P_m` on `R^{2l}` and the Clifford sphere.
//!
//! The construction is fixed and exact: the `m - 1` skew generators of the
//! irreducible `C_{m-1}`-module come from left multiplication by imaginary
//! octonion units (built by Cayley–Dickson doubling and restricted to the
//! complex / quaternion subalgebras where `δ(m) < 8`), and the table is
//! extended past `m = 8` by tensoring with an 8-generator module on `R^16`.
//! From skew generators `E_1 … E_{m-1}` on `R^l`:
//!
//! ```text
//! P_0 = [I 0; 0 -I],  P_1 = [0 I; I 0],  P_{1+i} = [0 E_i; -E_i 0]
//! ```
//!
//! Every entry is in `{-1, 0, 1}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::report::{Residuals, VerificationReport};
use crate::scalar::{Matrix, Real, Vector};

/// Integer matrix used for the exact construction.
pub type IntMatrix = DMatrix<i64>;

/// Dimension of an irreducible module of the Clifford algebra `C_{m-1}`.
pub fn delta(m: usize) -> Result<usize> {
    const TABLE: [usize; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    if m < 1 {
        return Err(Error::InvalidArgument(format!(
            "delta(m) needs m >= 1, got {m}"
        )));
    }
    let periods = (m - 1) / 8;
    Ok(TABLE[(m - 1) % 8] * 16usize.pow(periods as u32))
}

fn conj(a: &[i64]) -> Vec<i64> {
    a.iter()
        .enumerate()
        .map(|(i, &v)| if i == 0 { v } else { -v })
        .collect()
}

/// Cayley–Dickson product `(a, b)(c, d) = (ac - d̄b, da + bc̄)`.
fn cd_mul(x: &[i64], y: &[i64]) -> Vec<i64> {
    let n = x.len();
    if n == 1 {
        return vec![x[0] * y[0]];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let ac = cd_mul(a, c);
    let db = cd_mul(&conj(d), b);
    let da = cd_mul(d, a);
    let bc = cd_mul(b, &conj(c));
    ac.iter()
        .zip(&db)
        .map(|(p, q)| p - q)
        .chain(da.iter().zip(&bc).map(|(p, q)| p + q))
        .collect()
}

/// Left multiplication by octonion unit `e_i`, restricted to the first `dim`
/// coordinates (`dim ∈ {1, 2, 4, 8}` spans a subalgebra containing `e_i`).
fn octonion_left(i: usize, dim: usize) -> IntMatrix {
    let unit = |j: usize| {
        let mut v = vec![0i64; 8];
        v[j] = 1;
        v
    };
    let ei = unit(i);
    let mut mat = IntMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col = cd_mul(&ei, &unit(j));
        debug_assert!(col[dim..].iter().all(|&v| v == 0));
        for r in 0..dim {
            mat[(r, j)] = col[r];
        }
    }
    mat
}

fn kron(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    IntMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

fn int_identity(n: usize) -> IntMatrix {
    IntMatrix::identity(n, n)
}

/// Eight anticommuting skew complex structures on `R^16`.
fn eight_generators() -> Vec<IntMatrix> {
    let mut gens: Vec<IntMatrix> = (1..8)
        .map(|i| {
            let l = octonion_left(i, 8);
            let mut g = IntMatrix::zeros(16, 16);
            g.view_mut((0, 0), (8, 8)).copy_from(&l);
            g.view_mut((8, 8), (8, 8)).copy_from(&(-l));
            g
        })
        .collect();
    let mut j = IntMatrix::zeros(16, 16);
    j.view_mut((0, 8), (8, 8)).copy_from(&int_identity(8));
    j.view_mut((8, 0), (8, 8)).copy_from(&(-int_identity(8)));
    gens.push(j);
    gens
}

/// `r` anticommuting skew matrices squaring to `-I` on `R^{δ(r+1)}`.
fn skew_generators(r: usize) -> (usize, Vec<IntMatrix>) {
    if r == 0 {
        return (1, Vec::new());
    }
    if r <= 7 {
        let dim = delta(r + 1).expect("r + 1 >= 1");
        return (dim, (1..=r).map(|i| octonion_left(i, dim)).collect());
    }
    let (d0, base) = skew_generators(r - 8);
    let g8 = eight_generators();
    let volume = g8.iter().skip(1).fold(g8[0].clone(), |acc, g| acc * g);
    let mut gens: Vec<IntMatrix> = g8.iter().map(|g| kron(g, &int_identity(d0))).collect();
    gens.extend(base.iter().map(|e| kron(&volume, e)));
    (16 * d0, gens)
}

/// Exact integer matrices `P_0 … P_m` for the pair `(m, k)`.
pub fn build_exact(m: usize, k: usize) -> Result<Vec<IntMatrix>> {
    if m < 1 || k < 1 {
        return Err(Error::InvalidArgument(format!(
            "need m >= 1 and k >= 1, got m = {m}, k = {k}"
        )));
    }
    let l = k * delta(m)?;
    let m_minus = l as i64 - m as i64 - 1;
    if m_minus <= 0 {
        return Err(Error::InvalidFkmPair { m, k, m_minus });
    }
    let (d, skew) = skew_generators(m - 1);
    debug_assert_eq!(d * k, l);
    let id_l = int_identity(l);
    let mut p0 = IntMatrix::zeros(2 * l, 2 * l);
    p0.view_mut((0, 0), (l, l)).copy_from(&id_l);
    p0.view_mut((l, l), (l, l)).copy_from(&(-&id_l));
    let mut p1 = IntMatrix::zeros(2 * l, 2 * l);
    p1.view_mut((0, l), (l, l)).copy_from(&id_l);
    p1.view_mut((l, 0), (l, l)).copy_from(&id_l);
    let mut out = vec![p0, p1];
    for e in &skew {
        let block = kron(&int_identity(k), e);
        let mut p = IntMatrix::zeros(2 * l, 2 * l);
        p.view_mut((0, l), (l, l)).copy_from(&block);
        p.view_mut((l, 0), (l, l)).copy_from(&(-block));
        out.push(p);
    }
    Ok(out)
}

/// Largest integer defect of the Clifford axioms; zero for a valid system.
pub fn exact_defect(ps: &[IntMatrix]) -> i64 {
    let n = ps.first().map(|p| p.nrows()).unwrap_or(0);
    let id = int_identity(n);
    let mut worst = 0i64;
    for (a, pa) in ps.iter().enumerate() {
        worst = worst.max((pa - pa.transpose()).abs().max());
        for (b, pb) in ps.iter().enumerate().skip(a) {
            let mut s = pa * pb + pb * pa;
            if a == b {
                s -= &id * 2;
            }
            worst = worst.max(s.abs().max());
        }
    }
    worst
}

/// Human-readable name of the realization, recorded in reports.
pub const REALIZATION: &str = "octonion-left-multiplication doubling, P0=diag(I,-I), P1=[0 I; I 0], \
                               P(1+i)=[0 E_i; -E_i 0], E_i = I_k (x) L(e_i), mod-8 periodicity by R^16 tensor";

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordSystem<T: Real> {
    m: usize,
    k: usize,
    l: usize,
    matrices: Vec<Matrix<T>>,
}

impl<T: Real> CliffordSystem<T> {
    /// The deterministic system for `(m, k)`; fails when the pair does not
    /// give an FKM hypersurface (`l - m - 1 <= 0`).
    pub fn build(m: usize, k: usize) -> Result<Self> {
        let exact = build_exact(m, k)?;
        let l = exact[0].nrows() / 2;
        let matrices = exact.iter().map(|p| p.map(|v| T::lit(v as f64))).collect();
        Ok(Self { m, k, l, matrices })
    }

    /// Wrap arbitrary matrices (no axiom check; see [`verify_clifford`]).
    pub fn from_matrices(m: usize, k: usize, matrices: Vec<Matrix<T>>) -> Result<Self> {
        let dim = matrices.first().map(|p| p.nrows()).unwrap_or(0);
        if matrices.len() != m + 1
            || !dim.is_multiple_of(2)
            || matrices.iter().any(|p| p.shape() != (dim, dim))
        {
            return Err(Error::InvalidArgument(
                "need m + 1 square matrices of even size".into(),
            ));
        }
        Ok(Self {
            m,
            k,
            l: dim / 2,
            matrices,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.l
    }

    pub fn matrices(&self) -> &[Matrix<T>] {
        &self.matrices
    }

    pub fn matrix(&self, alpha: usize) -> &Matrix<T> {
        &self.matrices[alpha]
    }

    /// Normalized inner product `tr(AᵀB) / 2l` on the span of the system.
    pub fn inner(&self, a: &Matrix<T>, b: &Matrix<T>) -> T {
        a.component_mul(b).sum() / T::from_usize_lossy(2 * self.l)
    }

    /// `Σ a_β P_β` without normalization checks.
    pub fn combination(&self, a: &Vector<T>) -> Matrix<T> {
        let n = self.ambient_dim();
        self.matrices
            .iter()
            .zip(a.iter())
            .fold(Matrix::zeros(n, n), |acc, (p, &c)| acc + p * c)
    }

    /// The quadratic forms `⟨P_α x, x⟩`, α = 0..m.
    pub fn quadratic_forms(&self, x: &Vector<T>) -> Vector<T> {
        Vector::from_iterator(self.m + 1, self.matrices.iter().map(|p| (p * x).dot(x)))
    }

    pub fn describe(&self) -> CliffordDescription {
        CliffordDescription {
            m: self.m,
            k: self.k,
            l: self.l,
            realization: REALIZATION.to_string(),
            matrices: self
                .matrices
                .iter()
                .map(|p| {
                    let mut row_major = Vec::with_capacity(p.len());
                    for i in 0..p.nrows() {
                        for j in 0..p.ncols() {
                            row_major.push(p[(i, j)].to_f64_lossy());
                        }
                    }
                    row_major
                })
                .collect(),
        }
    }
}

/// Serializable description of a system: `(m, k, l)` and row-major entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliffordDescription {
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub realization: String,
    pub matrices: Vec<Vec<f64>>,
}

/// Residual of symmetry, anticommutation and `P_α² = I` over the system.
pub fn verify_clifford<T: Real>(sys: &CliffordSystem<T>, tol: f64) -> VerificationReport {
    let n = sys.ambient_dim();
    let id = Matrix::<T>::identity(n, n);
    let mut res = Residuals::new();
    let ps = sys.matrices();
    for (a, pa) in ps.iter().enumerate() {
        res.push(max_abs(&(pa - pa.transpose())).to_f64_lossy());
        for pb in ps.iter().skip(a) {
            let mut s = pa * pb + pb * pa;
            if std::ptr::eq(pa, pb) {
                s -= &id * T::lit(2.0);
            }
            res.push(max_abs(&s).to_f64_lossy());
        }
    }
    res.finish(
        "clifford.axioms",
        &format!("m{}k{}", sys.m(), sys.k()),
        0,
        tol,
    )
    .with_note("realization", REALIZATION)
}

/// An element `P = Σ a_β P_β` of the Clifford sphere Σ.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordSphereElement<T: Real> {
    pub coefficients: Vector<T>,
    pub matrix: Matrix<T>,
}

impl<T: Real> CliffordSphereElement<T> {
    pub fn apply(&self, x: &Vector<T>) -> Vector<T> {
        &self.matrix * x
    }

    /// `⟨P x, x⟩`.
    pub fn form(&self, x: &Vector<T>) -> T {
        (&self.matrix * x).dot(x)
    }
}

/// Build `P = Σ a_β P_β`; `a` within `1e-8` of unit length is renormalized.
pub fn sphere_element<T: Real>(
    sys: &CliffordSystem<T>,
    a: &Vector<T>,
) -> Result<CliffordSphereElement<T>> {
    if a.len() != sys.m() + 1 {
        return Err(Error::InvalidArgument(format!(
            "coefficient vector has length {}, expected {}",
            a.len(),
            sys.m() + 1
        )));
    }
    let norm = a.norm();
    if (norm - T::one()).abs() > T::lit(1e-8) {
        return Err(Error::InvalidArgument(format!(
            "Clifford sphere coefficients must be unit, |a| = {}",
            norm.to_f64_lossy()
        )));
    }
    let coefficients = a / norm;
    let matrix = sys.combination(&coefficients);
    Ok(CliffordSphereElement {
        coefficients,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sorted_symmetric_eigen;
    use crate::rng::{stream, unit_vector};

    #[test]
    fn delta_table_and_periodicity() {
        assert_eq!(delta(1).unwrap(), 1);
        assert_eq!(delta(3).unwrap(), 4);
        assert_eq!(delta(9).unwrap(), 16);
        assert_eq!(delta(8).unwrap(), 8);
        assert_eq!(delta(17).unwrap(), 256);
        assert!(matches!(delta(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn m1_k3_is_the_block_system() {
        let sys = CliffordSystem::<f64>::build(1, 3).unwrap();
        let i3 = Matrix::<f64>::identity(3, 3);
        let mut p0 = Matrix::zeros(6, 6);
        p0.view_mut((0, 0), (3, 3)).copy_from(&i3);
        p0.view_mut((3, 3), (3, 3)).copy_from(&(-&i3));
        let mut p1 = Matrix::zeros(6, 6);
        p1.view_mut((0, 3), (3, 3)).copy_from(&i3);
        p1.view_mut((3, 0), (3, 3)).copy_from(&i3);
        assert_eq!(sys.matrix(0), &p0);
        assert_eq!(sys.matrix(1), &p1);
        let rep = verify_clifford(&sys, 1e-12);
        assert!(rep.pass);
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn invalid_pairs_rejected() {
        assert!(matches!(
            build_exact(1, 2),
            Err(Error::InvalidFkmPair { m_minus: 0, .. })
        ));
        assert!(matches!(
            build_exact(1, 1),
            Err(Error::InvalidFkmPair { .. })
        ));
        assert!(matches!(build_exact(0, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_exact(2, 0), Err(Error::InvalidArgument(_))));
        // l = 4 = 4·1, m_- = 0
        assert!(matches!(
            build_exact(3, 1),
            Err(Error::InvalidFkmPair { .. })
        ));
    }

    #[test]
    fn exact_axioms_hold_across_the_table() {
        for m in 1..=10 {
            let k = (m + 2) / delta(m).unwrap() + 1;
            let ps = build_exact(m, k).unwrap();
            assert_eq!(ps.len(), m + 1);
            assert_eq!(ps[0].nrows(), 2 * k * delta(m).unwrap());
            assert_eq!(exact_defect(&ps), 0, "m = {m}");
            assert!(ps.iter().all(|p| p.iter().all(|v| (-1..=1).contains(v))));
        }
    }

    #[test]
    fn perturbed_system_fails() {
        let sys = CliffordSystem::<f64>::build(1, 3).unwrap();
        let mut ms = sys.matrices().to_vec();
        ms[1][(0, 3)] += 1e-6;
        let bad = CliffordSystem::from_matrices(1, 3, ms).unwrap();
        let rep = verify_clifford(&bad, 1e-12);
        assert!(!rep.pass);
        assert!(rep.max_residual >= 1e-6);
    }

    #[test]
    fn valid_systems_pass_in_floating_point() {
        for (m, k) in [(2, 2), (3, 2), (4, 2), (5, 1), (8, 2), (9, 1)] {
            let sys = CliffordSystem::<f64>::build(m, k).unwrap();
            assert!(verify_clifford(&sys, 1e-12).pass, "({m},{k})");
        }
    }

    #[test]
    fn construction_is_deterministic() {
        assert_eq!(
            CliffordSystem::<f64>::build(3, 2).unwrap(),
            CliffordSystem::<f64>::build(3, 2).unwrap()
        );
    }

    #[test]
    fn sphere_elements_square_to_identity() {
        let sys = CliffordSystem::<f64>::build(1, 3).unwrap();
        let e0 = Vector::from_vec(vec![1.0, 0.0]);
        assert_eq!(sphere_element(&sys, &e0).unwrap().matrix, *sys.matrix(0));
        let a = Vector::from_vec(vec![1.0, 1.0]) / 2f64.sqrt();
        let p = sphere_element(&sys, &a).unwrap().matrix;
        assert!(max_abs(&(&p * &p - Matrix::identity(6, 6))) < 1e-15);
        assert!(p.trace().abs() < 1e-15);
        assert!(matches!(
            sphere_element(&sys, &Vector::zeros(2)),
            Err(Error::InvalidArgument(_))
        ));
        let near = Vector::from_vec(vec![1.0 + 5e-9, 0.0]);
        assert!(sphere_element(&sys, &near).is_ok());
    }

    #[test]
    fn orthonormal_under_normalized_inner_product() {
        let sys = CliffordSystem::<f64>::build(3, 2).unwrap();
        for a in 0..=3 {
            for b in 0..=3 {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((sys.inner(sys.matrix(a), sys.matrix(b)) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bilinear_anticommutation_and_balanced_spectrum() {
        let sys = CliffordSystem::<f64>::build(2, 2).unwrap();
        for s in 0..20 {
            let mut rng = stream(11, "clifford-test", s);
            let a: Vector<f64> = unit_vector(&mut rng, 3);
            let mut b: Vector<f64> = unit_vector(&mut rng, 3);
            b -= &a * a.dot(&b);
            b /= b.norm();
            let pa = sys.combination(&a);
            let pb = sys.combination(&b);
            assert!(max_abs(&(&pa * &pb + &pb * &pa)) < 1e-12);
            let (vals, _) = sorted_symmetric_eigen(&pa);
            let l = sys.l();
            assert!(vals[..l].iter().all(|v| (v - 1.0).abs() < 1e-12));
            assert!(vals[l..].iter().all(|v| (v + 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn description_serializes_row_major() {
        let sys = CliffordSystem::<f64>::build(1, 3).unwrap();
        let d = sys.describe();
        assert_eq!((d.m, d.k, d.l), (1, 3, 3));
        assert_eq!(d.matrices[1][3], 1.0);
        let back: CliffordDescription =
            serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
