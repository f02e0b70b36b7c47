//! Seeded sampling on the sphere, `M^n`, `M_±`, `N_±`, `V_±`, the focal maps
//! `h_±` / `j_±`, and orthonormal tangent frames built from analytic spans.

use std::fmt::Write as _;

use crate::clifford::{sphere_element, CliffordSphereElement};
use crate::error::{Error, Result};
use crate::fkm::{FkmGeometry, VarietyTag};
use crate::linalg::{orthogonal_complement, orthonormality_residual, orthonormalize, unit_basis};
use crate::rng::{derive_seed, gaussian_vector, stream, unit_vector};
use crate::roots::bracketed_newton;
use crate::scalar::{Matrix, Real, Vector};

/// Membership tolerance a point must meet before a frame is built on it.
pub const FRAME_MEMBERSHIP_TOL: f64 = 1e-8;

const MPLUS_TOL: f64 = 1e-11;
const MPLUS_MAX_ITER: usize = 64;
const MPLUS_MAX_RESTARTS: usize = 32;

/// A point with an orthonormal basis of the tangent space of its variety.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame<T: Real> {
    pub x: Vector<T>,
    pub tag: VarietyTag<T>,
    pub basis: Vec<Vector<T>>,
    /// Unit normal `ξ` inside the sphere; present for `Mn` frames only.
    pub normal: Option<Vector<T>>,
}

impl<T: Real> TangentFrame<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Worst deviation from: unit, mutually orthogonal, orthogonal to `x`
    /// (and to the normal when present).
    pub fn orthonormality_residual(&self) -> T {
        let mut against = vec![self.x.clone()];
        if let Some(n) = &self.normal {
            against.push(n.clone());
        }
        orthonormality_residual(&self.basis, &against)
    }

    /// Orthogonal projection of an ambient vector onto the tangent space.
    pub fn project(&self, v: &Vector<T>) -> Vector<T> {
        self.basis
            .iter()
            .fold(Vector::zeros(v.len()), |acc, e| acc + e * e.dot(v))
    }

    /// Coordinates of `v` in the frame.
    pub fn coordinates(&self, v: &Vector<T>) -> Vector<T> {
        Vector::from_iterator(self.basis.len(), self.basis.iter().map(|e| e.dot(v)))
    }
}

/// Uniform point on `S^{2l−1}`.
pub fn sample_sphere<T: Real>(geom: &FkmGeometry<T>, seed: u64) -> Vector<T> {
    unit_vector(&mut stream(seed, "sphere", 0), geom.ambient_dim())
}

/// Uniform element of the Clifford sphere Σ.
pub fn sample_sphere_element<T: Real>(
    geom: &FkmGeometry<T>,
    seed: u64,
) -> CliffordSphereElement<T> {
    let a = unit_vector(&mut stream(seed, "clifford-sphere", 0), geom.m() + 1);
    sphere_element(geom.sys(), &a).expect("unit coefficients")
}

/// Result of moving a point along its normal geodesic onto a level of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelProjection<T: Real> {
    pub point: Vector<T>,
    /// Arc length travelled along `t ↦ cos t·x0 + sin t·ξ(x0)`.
    pub t: T,
}

/// Move `x0` along its normal geodesic to the nearest point with `f = c`.
///
/// Along the normal geodesic `f` is `cos(4(θ0 − t))` with `f(x0) = cos 4θ0`;
/// that predicts the root of smallest `|t|`, which is then bracketed and
/// refined on the actual `f ∘ γ`. If the bracket does not straddle a sign
/// change, a grid scan outward from `t = 0` takes over.
pub fn project_to_level<T: Real>(
    geom: &FkmGeometry<T>,
    x0: &Vector<T>,
    c: T,
) -> Result<LevelProjection<T>> {
    if !(c > -T::one() && c < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "target level {} must lie strictly inside (-1, 1); use the focal samplers",
            c.to_f64_lossy()
        )));
    }
    let f0 = geom.eval_f(x0);
    if T::one() - f0 * f0 <= T::lit(1e-8) {
        return Err(Error::DegenerateStart(format!(
            "f(x0) = {} is focal",
            f0.to_f64_lossy()
        )));
    }
    if f0 == c {
        return Ok(LevelProjection {
            point: x0.clone(),
            t: T::zero(),
        });
    }
    let xi = geom.unit_normal(x0)?;
    let curve = |t: T| x0 * t.cos() + &xi * t.sin();
    let g = |t: T| {
        let p = curve(t);
        let dp = x0 * (-t.sin()) + &xi * t.cos();
        (geom.eval_f(&p) - c, geom.grad_f(&p).dot(&dp))
    };

    let four = T::lit(4.0);
    let theta0 = f0.acos() / four;
    let alpha = c.acos() / four;
    let quarter = T::frac_pi_2();
    let mut best: Option<T> = None;
    for sgn in [T::one(), -T::one()] {
        for j in -2i32..=2 {
            let t = theta0 - sgn * alpha - quarter * T::lit(f64::from(j));
            if best.is_none_or(|b| t.abs() < b.abs()) {
                best = Some(t);
            }
        }
    }
    let predicted = best.expect("candidates");
    let spacing = (alpha * T::lit(2.0)).min(quarter - alpha * T::lit(2.0));
    let half_width = spacing * T::lit(0.4);
    let root = bracketed_newton(g, predicted - half_width, predicted + half_width)
        .or_else(|| scan_outward(g, T::pi()))
        .ok_or_else(|| {
            Error::DegenerateStart("no level crossing along the normal geodesic".into())
        })?;
    let p = curve(root);
    let norm = p.norm();
    Ok(LevelProjection {
        point: p / norm,
        t: root,
    })
}

fn scan_outward<T: Real, G: Fn(T) -> (T, T)>(g: G, limit: T) -> Option<T> {
    let steps = 4096usize;
    let h = limit / T::from_usize_lossy(steps);
    let g0 = g(T::zero()).0;
    let mut prev = (g0, g0);
    for i in 1..=steps {
        let t = h * T::from_usize_lossy(i);
        for (dir, last) in [(T::one(), &mut prev.0), (-T::one(), &mut prev.1)] {
            let v = g(dir * t).0;
            if v == T::zero() || v.is_sign_positive() != last.is_sign_positive() {
                let (a, b) = if dir > T::zero() {
                    (t - h, t)
                } else {
                    (-t, -t + h)
                };
                return bracketed_newton(&g, a, b);
            }
            *last = v;
        }
    }
    None
}

/// Random point of `M^n = f^{-1}(c0)`: a uniform sphere point projected
/// along its normal geodesic.
pub fn sample_mn<T: Real>(geom: &FkmGeometry<T>, seed: u64) -> Result<Vector<T>> {
    for attempt in 0..64 {
        let x0 = sample_sphere(geom, derive_seed(seed, "mn-start", attempt));
        let f0 = geom.eval_f(&x0);
        if T::one() - f0 * f0 > T::lit(1e-8) {
            return Ok(project_to_level(geom, &x0, geom.c0())?.point);
        }
    }
    Err(Error::DegenerateStart(
        "64 consecutive focal starting points".into(),
    ))
}

/// A point of `M_−` together with the Clifford element fixing it.
#[derive(Debug, Clone, PartialEq)]
pub struct MminusSample<T: Real> {
    pub x: Vector<T>,
    /// `a` with `P(a) x = x`; also `⟨P_β x, x⟩ = a_β`.
    pub element: CliffordSphereElement<T>,
}

/// Random point of `M_−`: a unit vector in the `+1` eigenspace of a random
/// element of Σ.
pub fn sample_mminus<T: Real>(geom: &FkmGeometry<T>, seed: u64) -> MminusSample<T> {
    let element = sample_sphere_element(geom, derive_seed(seed, "mminus-element", 0));
    let x = plus_eigenvector(&element, &mut stream(seed, "mminus-point", 0));
    MminusSample { x, element }
}

fn plus_eigenvector<T: Real>(
    p: &CliffordSphereElement<T>,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vector<T> {
    eigenvector_with_sign(p, T::one(), rng)
}

fn eigenvector_with_sign<T: Real>(
    p: &CliffordSphereElement<T>,
    sign: T,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vector<T> {
    loop {
        let g: Vector<T> = gaussian_vector(rng, p.matrix.nrows());
        let v = &g + p.apply(&g) * sign;
        let norm = v.norm();
        if norm > T::lit(1e-6) {
            return v / norm;
        }
    }
}

/// Unit vector of `E_±(P)` drawn uniformly; the sign selects the eigenspace.
pub fn sample_eigenspace<T: Real>(
    p: &CliffordSphereElement<T>,
    positive: bool,
    seed: u64,
) -> Vector<T> {
    let sign = if positive { T::one() } else { -T::one() };
    eigenvector_with_sign(p, sign, &mut stream(seed, "eigenspace", 0))
}

/// One projected Gauss–Newton run onto `{|x| = 1, ⟨P_α x, x⟩ = 0}` with
/// Armijo backtracking on the squared residual.
pub fn mplus_newton<T: Real>(geom: &FkmGeometry<T>, x0: &Vector<T>) -> Option<Vector<T>> {
    let ps = geom.sys().matrices();
    let rows = ps.len() + 1;
    let dim = x0.len();
    let residual = |x: &Vector<T>| {
        let mut c = Vector::zeros(rows);
        c[0] = x.norm_squared() - T::one();
        for (i, p) in ps.iter().enumerate() {
            c[i + 1] = (p * x).dot(x);
        }
        c
    };
    let mut x = x0.clone();
    let mut c = residual(&x);
    let tol = T::lit(MPLUS_TOL);
    for _ in 0..MPLUS_MAX_ITER {
        if c.amax() < T::lit(1e-15) {
            break;
        }
        let mut jac = Matrix::zeros(rows, dim);
        jac.row_mut(0).copy_from(&(x.transpose() * T::lit(2.0)));
        for (i, p) in ps.iter().enumerate() {
            jac.row_mut(i + 1)
                .copy_from(&((p * &x).transpose() * T::lit(2.0)));
        }
        let gram = &jac * jac.transpose();
        let y = gram.cholesky()?.solve(&c);
        let step = -(jac.transpose() * y);
        let merit = c.norm_squared();
        let mut alpha = T::one();
        loop {
            let trial = &x + &step * alpha;
            let ct = residual(&trial);
            if ct.norm_squared() <= merit * (T::one() - T::lit(2e-4) * alpha) {
                x = trial;
                c = ct;
                break;
            }
            alpha *= T::lit(0.5);
            if alpha < T::lit(1e-10) {
                return None;
            }
        }
    }
    let x = &x / x.norm();
    let forms = geom.quadratic_forms(&x);
    (forms.amax() < tol).then_some(x)
}

/// Random point of `M_+` by Newton from random starts (at most 32 restarts).
pub fn sample_mplus<T: Real>(geom: &FkmGeometry<T>, seed: u64) -> Result<Vector<T>> {
    for attempt in 0..MPLUS_MAX_RESTARTS as u64 {
        let x0 = sample_sphere(geom, derive_seed(seed, "mplus-start", attempt));
        if let Some(x) = mplus_newton(geom, &x0) {
            return Ok(x);
        }
    }
    Err(Error::NewtonDivergence {
        restarts: MPLUS_MAX_RESTARTS,
    })
}

/// Which of the two focal submanifolds of `φ2` (or of `ω1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FocalSign {
    Plus,
    Minus,
}

impl FocalSign {
    pub fn value<T: Real>(self) -> T {
        match self {
            FocalSign::Plus => T::one(),
            FocalSign::Minus => -T::one(),
        }
    }
}

/// `(cos τ, sin τ)` with `cos τ = √(½(1 + √((1 + c0)/2)))`, `τ ∈ (0, π/4)`:
/// the distance between `M_+` and `M^n`, halved in angle-doubling terms.
pub fn focal_angles<T: Real>(geom: &FkmGeometry<T>) -> (T, T) {
    let half = T::lit(0.5);
    let r = ((T::one() + geom.c0()) * half).sqrt();
    (
        ((T::one() + r) * half).sqrt(),
        ((T::one() - r) * half).sqrt(),
    )
}

/// `h_±(x) = cos τ·x ± sin τ·Px`, mapping `M_+` onto `N_±`.
pub fn h_map<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    sign: FocalSign,
    x: &Vector<T>,
) -> Vector<T> {
    let (c, s) = focal_angles(geom);
    x * c + p.apply(x) * (s * sign.value::<T>())
}

/// Differential of `h_±`; `h_±` is linear so this is the same expression.
pub fn h_differential<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    sign: FocalSign,
    v: &Vector<T>,
) -> Vector<T> {
    h_map(geom, p, sign, v)
}

/// `j(y) = cos τ·y + sin τ·ξ(y)`: move a distance τ along the unit normal,
/// from `N_±` back to `M_+`. Both signs use `sin τ > 0`.
pub fn j_map<T: Real>(geom: &FkmGeometry<T>, y: &Vector<T>) -> Result<Vector<T>> {
    let (c, s) = focal_angles(geom);
    Ok(y * c + geom.unit_normal(y)? * s)
}

/// A point of `N_±` with its `M_+` preimage under `h_±`.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalSample<T: Real> {
    pub y: Vector<T>,
    pub preimage: Vector<T>,
}

pub fn sample_npm<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    sign: FocalSign,
    seed: u64,
) -> Result<FocalSample<T>> {
    let preimage = sample_mplus(geom, seed)?;
    let y = h_map(geom, p, sign, &preimage);
    Ok(FocalSample { y, preimage })
}

/// Point of `M^n` with `⟨Px, x⟩ = t`, for `|t| ≤ √((1 − c0)/2)`.
///
/// Every point of `M^n` is `cos θ₁·x₊ + sin θ₁·Q x₊` with `x₊ ∈ M_+` and `Q ∈ Σ`;
/// then `⟨Px, x⟩ = √((1 − c0)/2)·⟨P, Q⟩`, so `Q` is chosen with the right
/// component along `P`.
pub fn point_on_phi2_level<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    t: T,
    seed: u64,
) -> Result<Vector<T>> {
    let tau = t / geom.phi2_focal_level();
    let q = element_at_angle(geom, p, tau, derive_seed(seed, "phi2-level", 0))?;
    let xp = sample_mplus(geom, derive_seed(seed, "phi2-level", 1))?;
    let th = geom.theta1();
    Ok(&xp * th.cos() + q.apply(&xp) * th.sin())
}

/// Point of `M_−` with `⟨Px, x⟩ = t`, for `|t| ≤ 1`.
pub fn point_on_omega1_level<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    t: T,
    seed: u64,
) -> Result<Vector<T>> {
    let q = element_at_angle(geom, p, t, derive_seed(seed, "omega1-level", 0))?;
    Ok(plus_eigenvector(&q, &mut stream(seed, "omega1-level", 1)))
}

/// Element `Q ∈ Σ` with `⟨P, Q⟩ = cosine`.
fn element_at_angle<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    cosine: T,
    seed: u64,
) -> Result<CliffordSphereElement<T>> {
    if cosine.abs() > T::one() + T::lit(1e-12) {
        return Err(Error::InvalidArgument(format!(
            "level outside the range of the function (ratio {})",
            cosine.to_f64_lossy()
        )));
    }
    let cosine = cosine.max(-T::one()).min(T::one());
    let a = &p.coefficients;
    let mut rng = stream(seed, "orthogonal-direction", 0);
    let w = loop {
        let mut w: Vector<T> = unit_vector(&mut rng, a.len());
        w -= a * a.dot(&w);
        let n = w.norm();
        if n > T::lit(1e-6) {
            break w / n;
        }
    };
    let b = a * cosine + w * (T::one() - cosine * cosine).max(T::zero()).sqrt();
    sphere_element(geom.sys(), &b)
}

/// `𝒫(x) = Σ ⟨P_α x, x⟩ P_α`, normalized onto Σ. On `M_−` it fixes `x`.
pub fn fixing_element<T: Real>(
    geom: &FkmGeometry<T>,
    x: &Vector<T>,
) -> Result<CliffordSphereElement<T>> {
    let forms = geom.quadratic_forms(x);
    let norm = forms.norm();
    if norm < T::lit(1e-6) {
        return Err(Error::DegenerateStart(
            "all quadratic forms vanish (point on M_+)".into(),
        ));
    }
    sphere_element(geom.sys(), &(forms / norm))
}

/// Smooth retraction of a nearby point onto `M_−`: `y ↦ (I + 𝒫(y)) y`, normalized.
pub fn retract_mminus<T: Real>(geom: &FkmGeometry<T>, y: &Vector<T>) -> Result<Vector<T>> {
    let p = fixing_element(geom, y)?;
    let v = y + p.apply(y);
    let n = v.norm();
    if n < T::lit(1e-8) {
        return Err(Error::DegenerateStart(
            "retraction onto M_- collapsed".into(),
        ));
    }
    Ok(v / n)
}

/// Retraction onto `M^n` along normal geodesics.
pub fn retract_mn<T: Real>(geom: &FkmGeometry<T>, y: &Vector<T>) -> Result<Vector<T>> {
    Ok(project_to_level(geom, &(y / y.norm()), geom.c0())?.point)
}

fn expect_dim<T: Real>(tag: &VarietyTag<T>, basis: &[Vector<T>], expected: usize) -> Result<()> {
    if basis.len() == expected {
        Ok(())
    } else {
        Err(Error::RankDeficiency {
            variety: tag.to_string(),
            expected,
            found: basis.len(),
        })
    }
}

fn mplus_basis<T: Real>(geom: &FkmGeometry<T>, x: &Vector<T>) -> Result<Vec<Vector<T>>> {
    let mut span = vec![x.clone()];
    span.extend(geom.sys().matrices().iter().map(|p| p * x));
    let q = orthonormalize(&span, &[], T::lit(1e-6));
    if q.len() != span.len() {
        return Err(Error::RankDeficiency {
            variety: "Mplus".into(),
            expected: span.len(),
            found: q.len(),
        });
    }
    Ok(orthogonal_complement(&q, x.len()))
}

/// Orthonormal basis of `E_s(P) ∩ x^⊥`.
fn eigenspace_basis<T: Real>(
    p: &CliffordSphereElement<T>,
    sign: T,
    against: &[Vector<T>],
) -> Vec<Vector<T>> {
    let dim = p.matrix.nrows();
    let candidates: Vec<Vector<T>> = (0..dim)
        .map(|i| {
            let e: Vector<T> = unit_basis(dim, i);
            &e + p.apply(&e) * sign
        })
        .collect();
    orthonormalize(&candidates, against, T::lit(1e-6))
}

/// `{Q x : Q ∈ span, ⟨Q, 𝒫⟩ = 0}`, orthonormalized.
fn orthogonal_element_images<T: Real>(
    geom: &FkmGeometry<T>,
    fixing: &CliffordSphereElement<T>,
    x: &Vector<T>,
) -> Vec<Vector<T>> {
    let m1 = geom.m() + 1;
    let coeffs: Vec<Vector<T>> = (0..m1).map(|i| unit_basis(m1, i)).collect();
    let a = &fixing.coefficients;
    let perp = orthonormalize(&coeffs, std::slice::from_ref(a), T::lit(1e-6));
    let images: Vec<Vector<T>> = perp.iter().map(|b| geom.sys().combination(b) * x).collect();
    orthonormalize(&images, &[], T::lit(1e-6))
}

/// Normal space of `M_−` in the sphere at `x`:
/// `{ν ∈ E_−(𝒫) : ⟨ν, Qx⟩ = 0 for all Q ⊥ 𝒫}`.
pub fn mminus_normal_space<T: Real>(
    geom: &FkmGeometry<T>,
    x: &Vector<T>,
) -> Result<Vec<Vector<T>>> {
    let fixing = fixing_element(geom, x)?;
    let qx = orthogonal_element_images(geom, &fixing, x);
    let normal = eigenspace_basis(&fixing, -T::one(), &qx);
    let expected = geom.l() - geom.m();
    if normal.len() != expected {
        return Err(Error::RankDeficiency {
            variety: "Mminus normal space".into(),
            expected,
            found: normal.len(),
        });
    }
    Ok(normal)
}

/// Orthonormal tangent frame of the tagged variety at `x`.
pub fn tangent_frame<T: Real>(
    geom: &FkmGeometry<T>,
    x: &Vector<T>,
    tag: &VarietyTag<T>,
) -> Result<TangentFrame<T>> {
    geom.require(x, tag, T::lit(FRAME_MEMBERSHIP_TOL))?;
    let dim = x.len();
    let mut normal = None;
    let basis = match tag {
        VarietyTag::Sphere => {
            let b = orthogonal_complement(std::slice::from_ref(x), dim);
            expect_dim(tag, &b, dim - 1)?;
            b
        }
        VarietyTag::Mn => {
            let xi = geom.unit_normal(x)?;
            let b = orthogonal_complement(&[x.clone(), xi.clone()], dim);
            normal = Some(xi);
            expect_dim(tag, &b, geom.n())?;
            b
        }
        VarietyTag::Mplus => {
            let b = mplus_basis(geom, x)?;
            expect_dim(tag, &b, geom.dim_mplus())?;
            b
        }
        VarietyTag::Mminus => {
            let fixing = fixing_element(geom, x)?;
            let mut cands = eigenspace_basis(&fixing, T::one(), std::slice::from_ref(x));
            cands.extend(orthogonal_element_images(geom, &fixing, x));
            let b = orthonormalize(&cands, std::slice::from_ref(x), T::lit(1e-6));
            expect_dim(tag, &b, geom.dim_mminus())?;
            b
        }
        VarietyTag::Nplus(p) | VarietyTag::Nminus(p) => {
            let sign = if matches!(tag, VarietyTag::Nplus(_)) {
                FocalSign::Plus
            } else {
                FocalSign::Minus
            };
            let pre = j_map(geom, x)?;
            geom.require(&pre, &VarietyTag::Mplus, T::lit(FRAME_MEMBERSHIP_TOL))?;
            let images: Vec<Vector<T>> = mplus_basis(geom, &pre)?
                .iter()
                .map(|v| h_differential(geom, p, sign, v))
                .collect();
            let b = orthonormalize(&images, std::slice::from_ref(x), T::lit(1e-6));
            expect_dim(tag, &b, geom.dim_mplus())?;
            b
        }
        VarietyTag::Vplus(p) | VarietyTag::Vminus(p) => {
            let sign = if matches!(tag, VarietyTag::Vplus(_)) {
                T::one()
            } else {
                -T::one()
            };
            let b = eigenspace_basis(p, sign, std::slice::from_ref(x));
            expect_dim(tag, &b, geom.dim_vpm())?;
            b
        }
    };
    Ok(TangentFrame {
        x: x.clone(),
        tag: tag.clone(),
        basis,
        normal,
    })
}

/// CSV dump of sampled points: tag, membership residual, coordinates.
pub fn points_csv<T: Real>(geom: &FkmGeometry<T>, points: &[(VarietyTag<T>, Vector<T>)]) -> String {
    let mut s = String::from("tag,membership_residual");
    for i in 0..geom.ambient_dim() {
        let _ = write!(s, ",x{i}");
    }
    s.push('\n');
    for (tag, x) in points {
        let _ = write!(s, "{},{:e}", tag, geom.membership(x, tag).to_f64_lossy());
        for v in x.iter() {
            let _ = write!(s, ",{:.17e}", v.to_f64_lossy());
        }
        s.push('\n');
    }
    s
}
