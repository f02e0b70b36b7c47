//! The FKM quartic `F(x) = |x|⁴ − 2 Σ_α ⟨P_α x, x⟩²`, its restriction `f` to
//! the unit sphere, exact ambient derivatives, the unit normal of the level
//! foliation, and membership tests for the varieties built from it.

use std::fmt;

use crate::clifford::{CliffordSphereElement, CliffordSystem};
use crate::error::{Error, Result};
use crate::report::{Residuals, VerificationReport};
use crate::rng::{gaussian_vector, stream, unit_vector};
use crate::scalar::{Matrix, Real, Vector};

/// Regularity threshold on `1 − F²` below which the unit normal is refused.
pub const REGULARITY_GAP: f64 = 1e-10;

/// Derived constants and evaluators for one FKM configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FkmGeometry<T: Real> {
    sys: CliffordSystem<T>,
    n: usize,
    m_plus: usize,
    m_minus: usize,
    c0: T,
}

impl<T: Real> FkmGeometry<T> {
    pub fn new(sys: CliffordSystem<T>) -> Result<Self> {
        let (m, k, l) = (sys.m(), sys.k(), sys.l());
        let m_minus = l as i64 - m as i64 - 1;
        if m < 1 || m_minus <= 0 {
            return Err(Error::InvalidFkmPair { m, k, m_minus });
        }
        let c0 = T::lit((l as f64 - 2.0 * m as f64 - 1.0) / (l as f64 - 1.0));
        Ok(Self {
            sys,
            n: 2 * l - 2,
            m_plus: m,
            m_minus: m_minus as usize,
            c0,
        })
    }

    pub fn from_pair(m: usize, k: usize) -> Result<Self> {
        Self::new(CliffordSystem::build(m, k)?)
    }

    pub fn sys(&self) -> &CliffordSystem<T> {
        &self.sys
    }

    /// Dimension of the minimal hypersurface `M^n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sys.m()
    }

    pub fn l(&self) -> usize {
        self.sys.l()
    }

    pub fn m_plus(&self) -> usize {
        self.m_plus
    }

    pub fn m_minus(&self) -> usize {
        self.m_minus
    }

    /// Number of distinct principal curvatures.
    pub fn g(&self) -> usize {
        4
    }

    pub fn ambient_dim(&self) -> usize {
        self.sys.ambient_dim()
    }

    /// Level of the minimal hypersurface, `(l − 2m − 1)/(l − 1)`.
    pub fn c0(&self) -> T {
        self.c0
    }

    pub fn config_id(&self) -> String {
        format!("m{}k{}", self.sys.m(), self.sys.k())
    }

    /// Angle with `c0 = cos 4θ₁`, i.e. the spherical distance from `M^n` to `M_+`.
    pub fn theta1(&self) -> T {
        self.c0.acos() / T::lit(4.0)
    }

    /// `cot(θ₁ + (j−1)π/4)` for j = 1..4 with multiplicities `(m₊, m₋, m₊, m₋)`.
    pub fn expected_principal_curvatures(&self) -> Vec<(T, usize)> {
        let t1 = self.theta1();
        (0..4)
            .map(|j| {
                let th = t1 + T::frac_pi_4() * T::from_usize_lossy(j);
                let mult = if j % 2 == 0 {
                    self.m_plus
                } else {
                    self.m_minus
                };
                (th.cos() / th.sin(), mult)
            })
            .collect()
    }

    /// Extreme value `√((1 − c0)/2)` of `⟨Px, x⟩` on `M^n`.
    pub fn phi2_focal_level(&self) -> T {
        ((T::one() - self.c0) / T::lit(2.0)).sqrt()
    }

    /// Dimension of `M_+`, which is also the dimension `n − m` of `N_±`.
    pub fn dim_mplus(&self) -> usize {
        self.n - self.m_plus
    }

    pub fn dim_mminus(&self) -> usize {
        self.l() + self.m() - 1
    }

    pub fn dim_vpm(&self) -> usize {
        self.l() - 1
    }

    pub fn quadratic_forms(&self, x: &Vector<T>) -> Vector<T> {
        self.sys.quadratic_forms(x)
    }

    pub fn eval_f(&self, x: &Vector<T>) -> T {
        let r2 = x.norm_squared();
        r2 * r2 - T::lit(2.0) * self.quadratic_forms(x).norm_squared()
    }

    /// `∇̃F = 4|x|²x − 8 Σ ⟨P_α x, x⟩ P_α x`.
    pub fn grad_f(&self, x: &Vector<T>) -> Vector<T> {
        let r2 = x.norm_squared();
        let mut g = x * (T::lit(4.0) * r2);
        for p in self.sys.matrices() {
            let px = p * x;
            let q = px.dot(x);
            g.axpy(-T::lit(8.0) * q, &px, T::one());
        }
        g
    }

    /// `∇̃²F = 4|x|²I + 8xxᵀ − 16 Σ (P_α x)(P_α x)ᵀ − 8 Σ ⟨P_α x, x⟩ P_α`.
    pub fn hess_f(&self, x: &Vector<T>) -> Matrix<T> {
        let dim = x.len();
        let r2 = x.norm_squared();
        let mut h =
            Matrix::identity(dim, dim) * (T::lit(4.0) * r2) + x * x.transpose() * T::lit(8.0);
        for p in self.sys.matrices() {
            let px = p * x;
            let q = px.dot(x);
            h -= &px * px.transpose() * T::lit(16.0);
            h -= p * (T::lit(8.0) * q);
        }
        h
    }

    /// `∇̃F − 4Fx`, the spherical gradient of `f` at a unit point.
    pub fn spherical_gradient(&self, x: &Vector<T>) -> Vector<T> {
        self.grad_f(x) - x * (T::lit(4.0) * self.eval_f(x))
    }

    fn regular_gap(&self, x: &Vector<T>) -> Result<T> {
        let f = self.eval_f(x);
        let gap = T::one() - f * f;
        if gap <= T::lit(REGULARITY_GAP) {
            return Err(Error::FocalDegeneracy {
                gap: gap.to_f64_lossy(),
            });
        }
        Ok(gap)
    }

    /// `ξ = (∇̃F − 4Fx) / (4√(1 − F²))`.
    pub fn unit_normal(&self, x: &Vector<T>) -> Result<Vector<T>> {
        let gap = self.regular_gap(x)?;
        Ok(self.spherical_gradient(x) / (T::lit(4.0) * gap.sqrt()))
    }

    /// Jacobian `∂ξ_i/∂x_j` of the ambient formula for `ξ`.
    pub fn normal_jacobian(&self, x: &Vector<T>) -> Result<Matrix<T>> {
        let gap = self.regular_gap(x)?;
        let dim = x.len();
        let f = self.eval_f(x);
        let grad = self.grad_f(x);
        let four = T::lit(4.0);
        let s = four * gap.sqrt();
        let u = &grad - x * (four * f);
        let du =
            self.hess_f(x) - x * grad.transpose() * four - Matrix::identity(dim, dim) * (four * f);
        let ds = &grad * (-T::lit(16.0) * f / s);
        Ok(du / s - u * ds.transpose() / (s * s))
    }

    pub fn membership(&self, x: &Vector<T>, tag: &VarietyTag<T>) -> T {
        let sphere = (x.norm() - T::one()).abs();
        let level = |target: T| sphere.max((self.eval_f(x) - target).abs());
        match tag {
            VarietyTag::Sphere => sphere,
            VarietyTag::Mn => level(self.c0),
            VarietyTag::Mplus => sphere.max(self.quadratic_forms(x).amax()),
            VarietyTag::Mminus => {
                sphere.max((self.quadratic_forms(x).norm_squared() - T::one()).abs())
            }
            VarietyTag::Nplus(p) => level(self.c0).max((p.form(x) - self.phi2_focal_level()).abs()),
            VarietyTag::Nminus(p) => {
                level(self.c0).max((p.form(x) + self.phi2_focal_level()).abs())
            }
            VarietyTag::Vplus(p) => self
                .membership(x, &VarietyTag::Mminus)
                .max((p.form(x) - T::one()).abs()),
            VarietyTag::Vminus(p) => self
                .membership(x, &VarietyTag::Mminus)
                .max((p.form(x) + T::one()).abs()),
        }
    }

    /// Membership as a pass/fail check at `tol`.
    pub fn check_membership(&self, x: &Vector<T>, tag: &VarietyTag<T>, tol: T) -> Membership<T> {
        let residual = self.membership(x, tag);
        Membership {
            residual,
            pass: residual < tol,
        }
    }

    pub(crate) fn require(&self, x: &Vector<T>, tag: &VarietyTag<T>, tol: T) -> Result<()> {
        let m = self.check_membership(x, tag, tol);
        if m.pass {
            Ok(())
        } else {
            Err(Error::WrongVariety {
                variety: tag.to_string(),
                residual: m.residual.to_f64_lossy(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership<T> {
    pub residual: T,
    pub pass: bool,
}

/// Which variety a point is claimed to lie on.
#[derive(Debug, Clone, PartialEq)]
pub enum VarietyTag<T: Real> {
    Sphere,
    /// The minimal isoparametric hypersurface `f = c0`.
    Mn,
    /// Focal submanifold `f = 1`: all `⟨P_α x, x⟩` vanish.
    Mplus,
    /// Focal submanifold `f = −1`.
    Mminus,
    /// `⟨Px, x⟩ = +√((1 − c0)/2)` inside `M^n`.
    Nplus(CliffordSphereElement<T>),
    Nminus(CliffordSphereElement<T>),
    /// `⟨Px, x⟩ = +1` inside `M_−`.
    Vplus(CliffordSphereElement<T>),
    Vminus(CliffordSphereElement<T>),
}

impl<T: Real> VarietyTag<T> {
    pub fn name(&self) -> &'static str {
        match self {
            VarietyTag::Sphere => "Sphere",
            VarietyTag::Mn => "Mn",
            VarietyTag::Mplus => "Mplus",
            VarietyTag::Mminus => "Mminus",
            VarietyTag::Nplus(_) => "Nplus",
            VarietyTag::Nminus(_) => "Nminus",
            VarietyTag::Vplus(_) => "Vplus",
            VarietyTag::Vminus(_) => "Vminus",
        }
    }

    pub fn element(&self) -> Option<&CliffordSphereElement<T>> {
        match self {
            VarietyTag::Nplus(p)
            | VarietyTag::Nminus(p)
            | VarietyTag::Vplus(p)
            | VarietyTag::Vminus(p) => Some(p),
            _ => None,
        }
    }
}

impl<T: Real> fmt::Display for VarietyTag<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `|∇̃F − 4Fx|² = 16(1 − F²)` at `samples` uniform unit points.
pub fn verify_spherical_gradient<T: Real>(
    geom: &FkmGeometry<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> VerificationReport {
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let x = unit_point(geom, seed, "spherical-gradient", i);
        let f = geom.eval_f(&x);
        res.push(
            (geom.spherical_gradient(&x).norm_squared() - T::lit(16.0) * (T::one() - f * f))
                .to_f64_lossy(),
        );
    }
    res.finish("fkm.spherical_gradient", &geom.config_id(), seed, tol)
}

/// Euler identity `⟨∇̃F(x), x⟩ = 4F(x)` at points of varying norm.
pub fn verify_euler<T: Real>(
    geom: &FkmGeometry<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> VerificationReport {
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let mut rng = stream(seed, "euler", i);
        let x: Vector<T> = gaussian_vector(&mut rng, geom.ambient_dim());
        let f = geom.eval_f(&x);
        res.push(
            ((geom.grad_f(&x).dot(&x) - T::lit(4.0) * f) / (T::one() + f.abs())).to_f64_lossy(),
        );
    }
    res.finish("fkm.euler", &geom.config_id(), seed, tol)
}

/// `F(−x) = F(x)` and `F(P_α x) = F(x)` for every generator.
pub fn verify_invariance<T: Real>(
    geom: &FkmGeometry<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> VerificationReport {
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let x = unit_point(geom, seed, "invariance", i);
        let f = geom.eval_f(&x);
        let mut r = (geom.eval_f(&-&x) - f).abs();
        for p in geom.sys().matrices() {
            r = r.max((geom.eval_f(&(p * &x)) - f).abs());
        }
        res.push(r.to_f64_lossy());
    }
    res.finish("fkm.invariance", &geom.config_id(), seed, tol)
}

fn unit_point<T: Real>(geom: &FkmGeometry<T>, seed: u64, label: &str, i: u64) -> Vector<T> {
    unit_vector(&mut stream(seed, label, i), geom.ambient_dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit_basis;
    use crate::rng::{stream, unit_vector};

    fn geom13() -> FkmGeometry<f64> {
        FkmGeometry::from_pair(1, 3).unwrap()
    }

    #[test]
    fn constants() {
        let g = geom13();
        assert_eq!((g.n(), g.m_plus(), g.m_minus()), (4, 1, 1));
        assert_eq!(g.c0(), 0.0);
        let g22 = FkmGeometry::<f64>::from_pair(2, 2).unwrap();
        assert!((g22.c0() + 1.0 / 3.0).abs() < 1e-15);
        let g32 = FkmGeometry::<f64>::from_pair(3, 2).unwrap();
        let (mp, mm) = (g32.m_plus() as f64, g32.m_minus() as f64);
        assert!((g32.c0() - (mm - mp) / (mm + mp)).abs() < 1e-15);
    }

    #[test]
    fn quartic_values_at_named_points() {
        let g = geom13();
        let e1: Vector<f64> = unit_basis(6, 0);
        let e5: Vector<f64> = unit_basis(6, 4);
        assert_eq!(g.eval_f(&e1), -1.0);
        let mp = (&e1 + &e5) / 2f64.sqrt();
        assert!((g.eval_f(&mp) - 1.0).abs() < 1e-15);
        assert_eq!(g.eval_f(&Vector::zeros(6)), 0.0);
        assert!(g.membership(&e1, &VarietyTag::Mminus) < 1e-15);
        assert!(!g.check_membership(&mp, &VarietyTag::Mn, 1e-8).pass);
        assert!(g.check_membership(&mp, &VarietyTag::Mplus, 1e-12).pass);
    }

    #[test]
    fn euler_identity_and_spherical_gradient_norm() {
        for (m, k) in [(1, 3), (2, 2), (3, 2)] {
            let g = FkmGeometry::<f64>::from_pair(m, k).unwrap();
            for s in 0..200 {
                let x: Vector<f64> = unit_vector(&mut stream(3, "fkm-test", s), g.ambient_dim());
                let f = g.eval_f(&x);
                assert!((g.grad_f(&x).dot(&x) - 4.0 * f).abs() < 1e-12);
                let lhs = g.spherical_gradient(&x).norm_squared();
                assert!((lhs - 16.0 * (1.0 - f * f)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn unit_normal_is_unit_and_tangent_to_sphere() {
        let g = FkmGeometry::<f64>::from_pair(2, 2).unwrap();
        let x: Vector<f64> = unit_vector(&mut stream(5, "xi", 0), 8);
        let xi = g.unit_normal(&x).unwrap();
        assert!((xi.norm() - 1.0).abs() < 1e-10);
        assert!(xi.dot(&x).abs() < 1e-10);
        let e1: Vector<f64> = unit_basis(8, 0);
        let mp = (&e1 + unit_basis::<f64>(8, 4)) / 2f64.sqrt();
        assert!(matches!(
            g.unit_normal(&mp),
            Err(Error::FocalDegeneracy { .. })
        ));
        assert!(matches!(
            g.unit_normal(&e1),
            Err(Error::FocalDegeneracy { .. })
        ));
    }

    #[test]
    fn invariance_under_clifford_isometries() {
        let g = FkmGeometry::<f64>::from_pair(3, 2).unwrap();
        for s in 0..50 {
            let x: Vector<f64> = unit_vector(&mut stream(9, "inv", s), g.ambient_dim());
            let f = g.eval_f(&x);
            assert!((g.eval_f(&-&x) - f).abs() < 1e-14);
            for p in g.sys().matrices() {
                assert!((g.eval_f(&(p * &x)) - f).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn expected_curvatures_sum_to_zero() {
        for (m, k) in [(1, 3), (2, 2), (3, 2), (1, 5)] {
            let g = FkmGeometry::<f64>::from_pair(m, k).unwrap();
            let pcs = g.expected_principal_curvatures();
            let trace: f64 = pcs.iter().map(|(v, k)| v * *k as f64).sum();
            let norm2: f64 = pcs.iter().map(|(v, k)| v * v * *k as f64).sum();
            assert!(trace.abs() < 1e-12, "({m},{k}) trace {trace}");
            assert!((norm2 - 3.0 * g.n() as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn f32_instantiation_evaluates() {
        let g = FkmGeometry::<f32>::from_pair(1, 3).unwrap();
        let e1: Vector<f32> = unit_basis(6, 0);
        assert_eq!(g.eval_f(&e1), -1.0f32);
        assert_eq!(g.c0(), 0.0f32);
    }
}
