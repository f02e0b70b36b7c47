//! Pointwise intrinsic calculus on the varieties from exact ambient
//! derivatives: tangential gradients, Laplacians, the shape operator of
//! `M^n`, principal curvatures, and mean curvature of level hypersurfaces.

use crate::clifford::CliffordSphereElement;
use crate::error::{Error, Result};
use crate::fkm::{FkmGeometry, VarietyTag};
use crate::linalg::{cluster_sorted, orthogonal_complement, sorted_symmetric_eigen, Cluster};
use crate::report::{Residuals, VerificationReport};
use crate::rng::{derive_seed, stream, unit_vector};
use crate::scalar::{Matrix, Real, Vector};
use crate::varieties::TangentFrame;

/// Step for finite differences of first derivatives along great circles.
pub const GREAT_CIRCLE_STEP: f64 = 1e-4;

/// A function on `R^{2l}` whose restriction to a variety is studied.
pub trait AmbientField<T: Real> {
    fn name(&self) -> String;

    fn value(&self, x: &Vector<T>) -> T;

    fn gradient(&self, x: &Vector<T>) -> Vector<T>;

    /// Exact ambient Hessian, when one is coded.
    fn hessian(&self, _x: &Vector<T>) -> Option<Matrix<T>> {
        None
    }

    /// `d²/dt² G(cos t·x + sin t·v)` at `t = 0`, for unit `v ⊥ x`.
    ///
    /// From the Hessian this is `Hess(v, v) − ⟨∇G, x⟩`; without one, a
    /// central difference of the exact first derivative is used.
    fn great_circle_second_derivative(&self, x: &Vector<T>, v: &Vector<T>) -> T {
        match self.hessian(x) {
            Some(h) => (h * v).dot(v) - self.gradient(x).dot(x),
            None => {
                let step = T::lit(GREAT_CIRCLE_STEP);
                let slope = |t: T| {
                    let p = x * t.cos() + v * t.sin();
                    let dp = x * (-t.sin()) + v * t.cos();
                    self.gradient(&p).dot(&dp)
                };
                (slope(step) - slope(-step)) / (step + step)
            }
        }
    }
}

/// Projection of the ambient gradient onto the frame's tangent space.
pub fn tangential_gradient<T: Real>(
    field: &dyn AmbientField<T>,
    frame: &TangentFrame<T>,
) -> Vector<T> {
    frame.project(&field.gradient(&frame.x))
}

/// Laplace–Beltrami operator at the frame point, for a host that is minimal
/// in the sphere: `Δg = Σ_i d²/dt² G(cos t·x + sin t·e_i)`.
pub fn intrinsic_laplacian<T: Real>(field: &dyn AmbientField<T>, frame: &TangentFrame<T>) -> T {
    frame.basis.iter().fold(T::zero(), |acc, e| {
        acc + field.great_circle_second_derivative(&frame.x, e)
    })
}

/// The two sides of `Δ̃𝒢 = Δ̄G + n·x(𝒢) + x(x(𝒢))` at a unit point, where
/// `n + 1` is the sphere dimension and `x(·)` is the radial derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLaplacian<T> {
    pub ambient: T,
    pub spherical: T,
    pub radial: T,
    pub radial_radial: T,
    /// `Δ̄G + n·x(𝒢) + x(x(𝒢))`.
    pub recombined: T,
}

pub fn two_laplacian<T: Real>(
    field: &dyn AmbientField<T>,
    x: &Vector<T>,
) -> Result<TwoLaplacian<T>> {
    let hess = field.hessian(x).ok_or_else(|| {
        Error::InvalidArgument(format!("{} has no exact ambient Hessian", field.name()))
    })?;
    let dim = x.len();
    let grad = field.gradient(x);
    let ambient = hess.trace();
    let spherical = orthogonal_complement(std::slice::from_ref(x), dim)
        .iter()
        .fold(T::zero(), |acc, e| {
            acc + field.great_circle_second_derivative(x, e)
        });
    let radial = grad.dot(x);
    let radial_radial = (&hess * x).dot(x) + radial;
    let n = T::from_usize_lossy(dim - 2);
    Ok(TwoLaplacian {
        ambient,
        spherical,
        radial,
        radial_radial,
        recombined: spherical + n * radial + radial_radial,
    })
}

/// `Δg` on `M^n` through the two-line cascade: sphere Laplacian from the
/// ambient one, then `Δg = Δ̄G + ξ(G)⟨H, ξ⟩ − ξξ(G) + ∇̄_ξξ(G)` with `H = 0`
/// and `ξ` extended along normal geodesics (`∇̄_ξξ = 0`).
pub fn laplacian_cascade<T: Real>(
    field: &dyn AmbientField<T>,
    frame: &TangentFrame<T>,
) -> Result<T> {
    let xi = frame
        .normal
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("cascade needs an Mn frame".into()))?;
    let tl = two_laplacian(field, &frame.x)?;
    let n = T::from_usize_lossy(frame.x.len() - 2);
    let sphere = tl.ambient - n * tl.radial - tl.radial_radial;
    Ok(sphere - field.great_circle_second_derivative(&frame.x, xi))
}

/// `ξ(G) = ⟨ξ, ∇̄G⟩` at a regular point.
pub fn normal_derivative<T: Real>(
    geom: &FkmGeometry<T>,
    field: &dyn AmbientField<T>,
    x: &Vector<T>,
) -> Result<T> {
    Ok(geom.unit_normal(x)?.dot(&field.gradient(x)))
}

/// `ξξ(G)`: second derivative along the normal geodesic `cos t·x + sin t·ξ(x)`.
pub fn normal_second_derivative<T: Real>(
    geom: &FkmGeometry<T>,
    field: &dyn AmbientField<T>,
    x: &Vector<T>,
) -> Result<T> {
    let xi = geom.unit_normal(x)?;
    Ok(field.great_circle_second_derivative(x, &xi))
}

fn require_mn<T: Real>(frame: &TangentFrame<T>) -> Result<&Vector<T>> {
    match (&frame.tag, &frame.normal) {
        (VarietyTag::Mn, Some(xi)) => Ok(xi),
        _ => Err(Error::InvalidArgument(format!(
            "expected an Mn frame, got {}",
            frame.tag
        ))),
    }
}

/// `A_ξ v = −(D_v ξ)^T`, using the exact Jacobian of the ambient `ξ`.
pub fn shape_operator<T: Real>(
    geom: &FkmGeometry<T>,
    frame: &TangentFrame<T>,
    v: &Vector<T>,
) -> Result<Vector<T>> {
    require_mn(frame)?;
    let jac = geom.normal_jacobian(&frame.x)?;
    Ok(-frame.project(&(jac * v)))
}

/// Matrix `⟨e_i, A_ξ e_j⟩` of the shape operator in the frame.
pub fn shape_matrix<T: Real>(geom: &FkmGeometry<T>, frame: &TangentFrame<T>) -> Result<Matrix<T>> {
    require_mn(frame)?;
    let jac = geom.normal_jacobian(&frame.x)?;
    let n = frame.dim();
    let images: Vec<Vector<T>> = frame.basis.iter().map(|e| -(&jac * e)).collect();
    Ok(Matrix::from_fn(n, n, |i, j| frame.basis[i].dot(&images[j])))
}

/// Eigen-data of the shape operator at one point of `M^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalCurvatures<T: Real> {
    /// Distinct values in decreasing order (θ-order) with multiplicities.
    pub clusters: Vec<Cluster<T>>,
    /// Raw eigenvalues, decreasing.
    pub spectrum: Vec<T>,
    /// Ambient principal directions, aligned with `spectrum`.
    pub directions: Vec<Vector<T>>,
    /// `max |S − Sᵀ|` of the frame matrix.
    pub asymmetry: T,
}

impl<T: Real> PrincipalCurvatures<T> {
    pub fn trace(&self) -> T {
        self.spectrum.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// `|B|² = Σ μ_i²`.
    pub fn norm_squared(&self) -> T {
        self.spectrum.iter().fold(T::zero(), |a, &b| a + b * b)
    }
}

pub fn principal_curvatures<T: Real>(
    geom: &FkmGeometry<T>,
    frame: &TangentFrame<T>,
) -> Result<PrincipalCurvatures<T>> {
    let s = shape_matrix(geom, frame)?;
    let asymmetry = crate::linalg::max_abs(&(&s - s.transpose()));
    let (spectrum, vecs) = sorted_symmetric_eigen(&s);
    let directions = (0..frame.dim())
        .map(|c| {
            frame
                .basis
                .iter()
                .enumerate()
                .fold(Vector::zeros(frame.x.len()), |acc, (r, e)| {
                    acc + e * vecs[(r, c)]
                })
        })
        .collect();
    let clusters = cluster_sorted(&spectrum, T::lit(1e-6), T::lit(1e-3)).ok_or_else(|| {
        Error::ClusteringAmbiguity {
            spectrum: spectrum.iter().map(|v| v.to_f64_lossy()).collect(),
        }
    })?;
    Ok(PrincipalCurvatures {
        clusters,
        spectrum,
        directions,
        asymmetry,
    })
}

/// `h(t) = (n − 4/(1 − c0))·t / √(1 − 2t²/(1 − c0))` for the levels of `⟨Px, x⟩` in `M^n`.
pub fn phi2_mean_curvature_closed_form<T: Real>(geom: &FkmGeometry<T>, t: T) -> T {
    let one_minus = T::one() - geom.c0();
    let coeff = T::from_usize_lossy(geom.n()) - T::lit(4.0) / one_minus;
    coeff * t / (T::one() - T::lit(2.0) * t * t / one_minus).sqrt()
}

/// `h(t) = (b′ − 2a)/(2√b)` with `b = 4(1 − t²)`, `a = −4mt`: the levels of
/// `⟨Px, x⟩` inside `M_−`, i.e. `2(m − 1)·t / √(1 − t²)`.
pub fn omega1_mean_curvature_closed_form<T: Real>(geom: &FkmGeometry<T>, t: T) -> T {
    T::lit(2.0) * T::from_usize_lossy(geom.m() - 1) * t / (T::one() - t * t).sqrt()
}

/// `−div(ν)` over the frame for `ν = T/|T|`, given `T` and its Jacobian action.
fn negative_divergence<T: Real, D: Fn(&Vector<T>) -> Vector<T>>(
    frame: &TangentFrame<T>,
    field: &Vector<T>,
    d: D,
) -> Result<T> {
    let norm = field.norm();
    if norm < T::lit(1e-8) {
        return Err(Error::DegenerateStart(
            "gradient vanishes: point on a focal set of the level function".into(),
        ));
    }
    let mut div = T::zero();
    for e in &frame.basis {
        let de = d(e);
        div += de.dot(e) / norm - field.dot(&de) * field.dot(e) / (norm * norm * norm);
    }
    Ok(-div)
}

/// Mean curvature (unnormalized trace, sign `h = −div ν`) of the level
/// hypersurface of `φ2 = ⟨Px, x⟩` through the frame point, inside `M^n`.
///
/// `ν` is extended off `M^n` by `T(x) = 2Px − 2⟨Px,x⟩x − ⟨ξ(x), 2Px⟩ξ(x)`,
/// which equals `∇φ2` on `M^n`; its derivative uses the exact Jacobian of `ξ`.
pub fn level_mean_curvature_phi2<T: Real>(
    geom: &FkmGeometry<T>,
    frame: &TangentFrame<T>,
    p: &CliffordSphereElement<T>,
) -> Result<T> {
    let xi = require_mn(frame)?.clone();
    let x = &frame.x;
    let jac = geom.normal_jacobian(x)?;
    let two = T::lit(2.0);
    let px = p.apply(x);
    let phi = px.dot(x);
    let xi_phi = two * xi.dot(&px);
    let t_field = &px * two - x * (two * phi) - &xi * xi_phi;
    let d = |v: &Vector<T>| {
        let pv = p.apply(v);
        let jv = &jac * v;
        let dphi = two * px.dot(v);
        let dxi_phi = two * (jv.dot(&px) + xi.dot(&pv));
        &pv * two - x * (two * dphi) - v * (two * phi) - &xi * dxi_phi - &jv * xi_phi
    };
    negative_divergence(frame, &t_field, d)
}

/// Mean curvature of the level hypersurface of `ω1 = ⟨Px, x⟩` inside `M_−`,
/// with `ν` extended by `y(x) = Px − ⟨Px,x⟩x` (tangent to `M_−` on `M_−`).
pub fn level_mean_curvature_omega1<T: Real>(
    geom: &FkmGeometry<T>,
    frame: &TangentFrame<T>,
    p: &CliffordSphereElement<T>,
) -> Result<T> {
    if !matches!(frame.tag, VarietyTag::Mminus) {
        return Err(Error::InvalidArgument(format!(
            "expected an Mminus frame, got {}",
            frame.tag
        )));
    }
    let _ = geom;
    let x = &frame.x;
    let px = p.apply(x);
    let w = px.dot(x);
    let y = &px - x * w;
    let d = |v: &Vector<T>| p.apply(v) - x * (T::lit(2.0) * px.dot(v)) - v * w;
    negative_divergence(frame, &y, d)
}

/// Principal curvatures at `samples` points of `M^n` against
/// `cot(θ₁ + jπ/4)` with multiplicities `(m, l−m−1, m, l−m−1)`.
///
/// Returns three reports: the curvature values (a multiplicity mismatch or
/// clustering ambiguity counts as an infinite residual), the trace
/// (minimality), and `|B|² − 3n`.
pub fn verify_principal_curvatures<T: Real>(
    geom: &FkmGeometry<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<VerificationReport>> {
    let expected: Vec<(T, usize)> = geom
        .expected_principal_curvatures()
        .into_iter()
        .filter(|e| e.1 > 0)
        .collect();
    let (mut values, mut trace, mut norm) = (Residuals::new(), Residuals::new(), Residuals::new());
    let three_n = T::from_usize_lossy(3 * geom.n());
    for i in 0..samples as u64 {
        let x = crate::varieties::sample_mn(geom, derive_seed(seed, "principal", i))?;
        let frame = crate::varieties::tangent_frame(geom, &x, &VarietyTag::Mn)?;
        match principal_curvatures(geom, &frame) {
            Ok(pc) => {
                let matched = pc.clusters.len() == expected.len()
                    && pc
                        .clusters
                        .iter()
                        .zip(&expected)
                        .all(|(c, e)| c.multiplicity == e.1);
                let r = if matched {
                    pc.clusters
                        .iter()
                        .zip(&expected)
                        .fold(pc.asymmetry, |a, (c, e)| a.max((c.value - e.0).abs()))
                        .to_f64_lossy()
                } else {
                    f64::INFINITY
                };
                values.push(r);
                trace.push(pc.trace().to_f64_lossy());
                norm.push((pc.norm_squared() - three_n).to_f64_lossy());
            }
            Err(Error::ClusteringAmbiguity { .. }) => values.push(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    let cfg = geom.config_id();
    let listing: Vec<String> = expected
        .iter()
        .map(|(v, m)| format!("{:.9}x{m}", v.to_f64_lossy()))
        .collect();
    Ok(vec![
        values
            .finish("fkm.principal_curvatures", &cfg, seed, tol)
            .with_note("expected", listing.join(" ")),
        trace.finish("fkm.minimality", &cfg, seed, tol),
        norm.finish("fkm.second_fundamental_norm", &cfg, seed, tol),
    ])
}

/// `Δ̃𝒢 = Δ̄G + n·x(𝒢) + x(x(𝒢))` for `𝒢 = ⟨Px, x⟩ + ⟨x, q⟩⟨x, q′⟩` at unit points.
pub fn verify_two_laplacian<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let dim = geom.ambient_dim();
    let mut rng = stream(seed, "two-laplacian-field", 0);
    let q: Vector<T> = unit_vector(&mut rng, dim);
    let q2: Vector<T> = unit_vector(&mut rng, dim);
    let mat = &p.matrix + (&q * q2.transpose() + &q2 * q.transpose()) * T::lit(0.5);
    let field = QuadraticForm::new(mat);
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let x: Vector<T> = unit_vector(&mut stream(seed, "two-laplacian", i), dim);
        let tl = two_laplacian(&field, &x)?;
        res.push((tl.ambient - tl.recombined).to_f64_lossy());
    }
    Ok(res.finish("fkm.two_laplacian", &geom.config_id(), seed, tol))
}

/// The cascade `Δg = Δ̃ − n·x − xx − ξξ` against the trace route for the
/// quadratic `⟨Px, x⟩` and linear `⟨x, q⟩` on `M^n`.
pub fn verify_laplacian_cascade<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let dim = geom.ambient_dim();
    let q: Vector<T> = unit_vector(&mut stream(seed, "cascade-linear", 0), dim);
    let quad = QuadraticForm::new(p.matrix.clone());
    let lin = QuadraticForm::new(Matrix::zeros(dim, dim)).with_linear(q);
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let x = crate::varieties::sample_mn(geom, derive_seed(seed, "cascade", i))?;
        let frame = crate::varieties::tangent_frame(geom, &x, &VarietyTag::Mn)?;
        for f in [&quad as &dyn AmbientField<T>, &lin] {
            res.push(
                (laplacian_cascade(f, &frame)? - intrinsic_laplacian(f, &frame)).to_f64_lossy(),
            );
        }
    }
    Ok(res.finish("fkm.laplacian_cascade", &geom.config_id(), seed, tol))
}

/// `⟨Ax, x⟩ + ⟨b, x⟩` with symmetric `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<T: Real> {
    pub matrix: Matrix<T>,
    linear: Option<Vector<T>>,
}

impl<T: Real> QuadraticForm<T> {
    pub fn new(matrix: Matrix<T>) -> Self {
        Self {
            matrix,
            linear: None,
        }
    }

    pub fn with_linear(mut self, b: Vector<T>) -> Self {
        self.linear = Some(b);
        self
    }
}

impl<T: Real> AmbientField<T> for QuadraticForm<T> {
    fn name(&self) -> String {
        "quadratic".into()
    }

    fn value(&self, x: &Vector<T>) -> T {
        (&self.matrix * x).dot(x) + self.linear.as_ref().map_or(T::zero(), |b| b.dot(x))
    }

    fn gradient(&self, x: &Vector<T>) -> Vector<T> {
        let g = &self.matrix * x * T::lit(2.0);
        match &self.linear {
            Some(b) => g + b,
            None => g,
        }
    }

    fn hessian(&self, _x: &Vector<T>) -> Option<Matrix<T>> {
        Some(&self.matrix * T::lit(2.0))
    }
}
