//! The five eigenfunctions `φ1, φ2, φ3` on `M^n` and `ω1, ω2` on `M_−`, and
//! checks of their eigenvalue equations and isoparametric systems.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::{intrinsic_laplacian, tangential_gradient, AmbientField};
use crate::clifford::CliffordSphereElement;
use crate::error::{Error, Result};
use crate::fkm::{FkmGeometry, VarietyTag};
use crate::report::{Residuals, VerificationReport};
use crate::rng::derive_seed;
use crate::scalar::{Matrix, Real, Vector};
use crate::varieties::{
    fixing_element, mminus_normal_space, sample_mminus, sample_mn, sample_sphere, tangent_frame,
    TangentFrame,
};

/// Minimum membership residual of `q1`, `q2` against the excluded varieties.
pub const GENERIC_MARGIN: f64 = 1e-3;

/// Host-membership tolerance for evaluation.
pub const HOST_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenfunctionId {
    Phi1,
    Phi2,
    Phi3,
    Omega1,
    Omega2,
}

impl EigenfunctionId {
    pub const ALL: [EigenfunctionId; 5] = [
        Self::Phi1,
        Self::Phi2,
        Self::Phi3,
        Self::Omega1,
        Self::Omega2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Phi1 => "phi1",
            Self::Phi2 => "phi2",
            Self::Phi3 => "phi3",
            Self::Omega1 => "omega1",
            Self::Omega2 => "omega2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown function '{s}'")))
    }

    pub fn on_mminus(self) -> bool {
        matches!(self, Self::Omega1 | Self::Omega2)
    }

    /// Whether the parameter is a point (`q1`, `q2`) rather than `P ∈ Σ`.
    pub fn takes_point(self) -> bool {
        matches!(self, Self::Phi1 | Self::Phi3 | Self::Omega2)
    }

    pub fn host<T: Real>(self) -> VarietyTag<T> {
        if self.on_mminus() {
            VarietyTag::Mminus
        } else {
            VarietyTag::Mn
        }
    }

    /// `n, 2n, 3n, 4m, l + m − 1`.
    pub fn eigenvalue<T: Real>(self, geom: &FkmGeometry<T>) -> T {
        let n = geom.n();
        T::from_usize_lossy(match self {
            Self::Phi1 => n,
            Self::Phi2 => 2 * n,
            Self::Phi3 => 3 * n,
            Self::Omega1 => 4 * geom.m(),
            Self::Omega2 => geom.dim_mminus(),
        })
    }
}

impl fmt::Display for EigenfunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parameter<T: Real> {
    Point(Vector<T>),
    Element(CliffordSphereElement<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionSpec<T: Real> {
    pub id: EigenfunctionId,
    pub parameter: Parameter<T>,
    pub claimed_eigenvalue: T,
}

impl<T: Real> EigenfunctionSpec<T> {
    /// Spec with the claimed eigenvalue; point parameters must be generic.
    pub fn new(
        geom: &FkmGeometry<T>,
        id: EigenfunctionId,
        parameter: Parameter<T>,
    ) -> Result<Self> {
        match (&parameter, id.takes_point()) {
            (Parameter::Point(q), true) => {
                let margin = generic_margin(geom, q, !id.on_mminus());
                if margin <= T::lit(GENERIC_MARGIN) {
                    return Err(Error::DegenerateParameter(format!(
                        "{id} parameter within {} of an excluded variety",
                        margin.to_f64_lossy()
                    )));
                }
            }
            (Parameter::Element(_), false) => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "wrong parameter kind for {id}"
                )))
            }
        }
        Ok(Self {
            id,
            parameter,
            claimed_eigenvalue: id.eigenvalue(geom),
        })
    }

    /// Same function with a different claimed eigenvalue (negative controls).
    pub fn with_eigenvalue(mut self, lambda: T) -> Self {
        self.claimed_eigenvalue = lambda;
        self
    }

    pub fn host(&self) -> VarietyTag<T> {
        self.id.host()
    }

    pub fn point(&self) -> Option<&Vector<T>> {
        match &self.parameter {
            Parameter::Point(q) => Some(q),
            Parameter::Element(_) => None,
        }
    }

    pub fn element(&self) -> Option<&CliffordSphereElement<T>> {
        match &self.parameter {
            Parameter::Element(p) => Some(p),
            Parameter::Point(_) => None,
        }
    }

    pub fn field<'a>(&'a self, geom: &'a FkmGeometry<T>) -> Eigenfunction<'a, T> {
        Eigenfunction { geom, spec: self }
    }
}

/// Smallest membership residual of `q` against `M_+`, `M_−` and, when
/// `include_mn`, `M^n`.
pub fn generic_margin<T: Real>(geom: &FkmGeometry<T>, q: &Vector<T>, include_mn: bool) -> T {
    let mut m = geom
        .membership(q, &VarietyTag::Mplus)
        .min(geom.membership(q, &VarietyTag::Mminus));
    if include_mn {
        m = m.min(geom.membership(q, &VarietyTag::Mn));
    }
    m
}

/// Uniform unit point rejected until it clears [`GENERIC_MARGIN`].
pub fn generic_point<T: Real>(
    geom: &FkmGeometry<T>,
    seed: u64,
    include_mn: bool,
) -> Result<Vector<T>> {
    for attempt in 0..256 {
        let q = sample_sphere(geom, derive_seed(seed, "generic-point", attempt));
        if generic_margin(geom, &q, include_mn) > T::lit(GENERIC_MARGIN) {
            return Ok(q);
        }
    }
    Err(Error::DegenerateParameter(
        "no generic point in 256 draws".into(),
    ))
}

/// Spec with a freshly drawn parameter.
pub fn draw_spec<T: Real>(
    geom: &FkmGeometry<T>,
    id: EigenfunctionId,
    seed: u64,
) -> Result<EigenfunctionSpec<T>> {
    let parameter = if id.takes_point() {
        Parameter::Point(generic_point(
            geom,
            derive_seed(seed, id.name(), 0),
            !id.on_mminus(),
        )?)
    } else {
        Parameter::Element(crate::varieties::sample_sphere_element(
            geom,
            derive_seed(seed, id.name(), 1),
        ))
    };
    EigenfunctionSpec::new(geom, id, parameter)
}

/// Ambient extension of one eigenfunction.
#[derive(Debug, Clone, Copy)]
pub struct Eigenfunction<'a, T: Real> {
    geom: &'a FkmGeometry<T>,
    spec: &'a EigenfunctionSpec<T>,
}

impl<T: Real> AmbientField<T> for Eigenfunction<'_, T> {
    fn name(&self) -> String {
        self.spec.id.name().to_string()
    }

    fn value(&self, x: &Vector<T>) -> T {
        match &self.spec.parameter {
            Parameter::Element(p) => p.form(x),
            Parameter::Point(q) if self.spec.id == EigenfunctionId::Phi3 => self
                .geom
                .unit_normal(x)
                .map(|xi| xi.dot(q))
                .unwrap_or(T::lit(f64::NAN)),
            Parameter::Point(q) => x.dot(q),
        }
    }

    fn gradient(&self, x: &Vector<T>) -> Vector<T> {
        match &self.spec.parameter {
            Parameter::Element(p) => p.apply(x) * T::lit(2.0),
            Parameter::Point(q) if self.spec.id == EigenfunctionId::Phi3 => {
                match self.geom.normal_jacobian(x) {
                    Ok(j) => j.transpose() * q,
                    Err(_) => Vector::from_element(x.len(), T::lit(f64::NAN)),
                }
            }
            Parameter::Point(q) => q.clone(),
        }
    }

    fn hessian(&self, x: &Vector<T>) -> Option<Matrix<T>> {
        match &self.spec.parameter {
            Parameter::Element(p) => Some(&p.matrix * T::lit(2.0)),
            Parameter::Point(_) if self.spec.id == EigenfunctionId::Phi3 => None,
            Parameter::Point(_) => Some(Matrix::zeros(x.len(), x.len())),
        }
    }
}

/// Value of the eigenfunction at a point of its host.
pub fn eval<T: Real>(
    geom: &FkmGeometry<T>,
    spec: &EigenfunctionSpec<T>,
    x: &Vector<T>,
) -> Result<T> {
    geom.require(x, &spec.host(), T::lit(HOST_TOL))?;
    if spec.id == EigenfunctionId::Phi3 {
        let q = spec.point().expect("phi3 takes a point");
        return Ok(geom.unit_normal(x)?.dot(q));
    }
    Ok(spec.field(geom).value(x))
}

/// Host sample number `index` for a suite seeded with `seed`.
pub fn host_sample<T: Real>(
    geom: &FkmGeometry<T>,
    on_mminus: bool,
    seed: u64,
    index: u64,
) -> Result<Vector<T>> {
    if on_mminus {
        Ok(sample_mminus(geom, derive_seed(seed, "host-mminus", index)).x)
    } else {
        sample_mn(geom, derive_seed(seed, "host-mn", index))
    }
}

fn host_frame<T: Real>(
    geom: &FkmGeometry<T>,
    on_mminus: bool,
    seed: u64,
    index: u64,
) -> Result<TangentFrame<T>> {
    let x = host_sample(geom, on_mminus, seed, index)?;
    let tag = if on_mminus {
        VarietyTag::Mminus
    } else {
        VarietyTag::Mn
    };
    tangent_frame(geom, &x, &tag)
}

/// `|Δu + λu| / (1 + |u|)` over host samples.
pub fn verify_eigen_identity<T: Real>(
    geom: &FkmGeometry<T>,
    spec: &EigenfunctionSpec<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let field = spec.field(geom);
    let lambda = spec.claimed_eigenvalue;
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let frame = host_frame(geom, spec.id.on_mminus(), seed, i)?;
        let u = eval(geom, spec, &frame.x)?;
        let lap = intrinsic_laplacian(&field, &frame);
        res.push(((lap + lambda * u).abs() / (T::one() + u.abs())).to_f64_lossy());
    }
    Ok(res
        .finish(
            &format!("spectra.eigen.{}", spec.id),
            &geom.config_id(),
            seed,
            tol,
        )
        .with_note("lambda", lambda.to_f64_lossy()))
}

/// `|∇u|² = b(u)` and `Δu = a(u)` for `φ2` on `M^n` or `ω1` on `M_−`; the
/// residual is the larger of the two lines.
pub fn verify_isoparametric_system<T: Real>(
    geom: &FkmGeometry<T>,
    spec: &EigenfunctionSpec<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    // |∇u|² = 4(1 − c·u²), Δu = −λu
    let c = match spec.id {
        EigenfunctionId::Phi2 => T::lit(2.0) / (T::one() - geom.c0()),
        EigenfunctionId::Omega1 => T::one(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "{other} has no isoparametric system"
            )))
        }
    };
    let lambda = spec.claimed_eigenvalue;
    let b = |u: T| T::lit(4.0) * (T::one() - c * u * u);
    let a = |u: T| -lambda * u;
    let field = spec.field(geom);
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let frame = host_frame(geom, spec.id.on_mminus(), seed, i)?;
        let u = eval(geom, spec, &frame.x)?;
        let g2 = tangential_gradient(&field, &frame).norm_squared();
        let lap = intrinsic_laplacian(&field, &frame);
        res.push((g2 - b(u)).abs().max((lap - a(u)).abs()).to_f64_lossy());
    }
    Ok(res.finish(
        &format!("spectra.iso.{}", spec.id),
        &geom.config_id(),
        seed,
        tol,
    ))
}

/// `∇φ2 = 2(Px − φ2 x + φ2 √((1 + c0)/(1 − c0)) ξ)` at a point of `M^n`.
pub fn phi2_gradient_closed_form<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    x: &Vector<T>,
) -> Result<Vector<T>> {
    let xi = geom.unit_normal(x)?;
    let phi = p.form(x);
    let r = ((T::one() + geom.c0()) / (T::one() - geom.c0())).sqrt();
    Ok((p.apply(x) - x * phi + xi * (phi * r)) * T::lit(2.0))
}

/// Closed-form `∇φ2` against the projection of the ambient gradient.
pub fn verify_phi2_gradient<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let frame = host_frame(geom, false, seed, i)?;
        let projected = frame.project(&(p.apply(&frame.x) * T::lit(2.0)));
        let closed = phi2_gradient_closed_form(geom, p, &frame.x)?;
        res.push((projected - closed).amax().to_f64_lossy());
    }
    Ok(res.finish("spectra.phi2.gradient", &geom.config_id(), seed, tol))
}

/// `ξ(φ2) = −2√((1+c0)/(1−c0))·φ2` and `ξξ(φ2) = −4φ2` on `M^n`.
pub fn verify_phi2_normal_derivatives<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<(VerificationReport, VerificationReport)> {
    let spec = EigenfunctionSpec::new(geom, EigenfunctionId::Phi2, Parameter::Element(p.clone()))?;
    let field = spec.field(geom);
    let r = ((T::one() + geom.c0()) / (T::one() - geom.c0())).sqrt();
    let (mut first, mut second) = (Residuals::new(), Residuals::new());
    for i in 0..samples as u64 {
        let x = host_sample(geom, false, seed, i)?;
        let phi = p.form(&x);
        let d1 = crate::calculus::normal_derivative(geom, &field, &x)?;
        let d2 = crate::calculus::normal_second_derivative(geom, &field, &x)?;
        first.push((d1 + T::lit(2.0) * r * phi).to_f64_lossy());
        second.push((d2 + T::lit(4.0) * phi).to_f64_lossy());
    }
    let id = geom.config_id();
    Ok((
        first.finish("fkm.xi_phi2", &id, seed, tol),
        second.finish("fkm.xi_xi_phi2", &id, seed, tol),
    ))
}

/// Range of `φ2` on `M^n`: `|φ2| ≤ √((1 − c0)/2)`, with the bound attained on `N_±`.
///
/// Residual per sample is the excess `max(0, |φ2| − bound)`; for the attained
/// half it is `|φ2(h_±(x)) ∓ bound|`.
pub fn verify_phi2_range<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    use crate::varieties::{sample_npm, FocalSign};
    let bound = geom.phi2_focal_level();
    let mut res = Residuals::new();
    let mut largest = T::zero();
    for i in 0..samples as u64 {
        let x = host_sample(geom, false, seed, i)?;
        let v = p.form(&x).abs();
        largest = largest.max(v);
        res.push((v - bound).max(T::zero()).to_f64_lossy());
    }
    for (k, sign) in [FocalSign::Plus, FocalSign::Minus].into_iter().enumerate() {
        let s = sample_npm(
            geom,
            p,
            sign,
            derive_seed(seed, "phi2-range-focal", k as u64),
        )?;
        res.push((p.form(&s.y) - bound * sign.value::<T>()).to_f64_lossy());
    }
    Ok(res
        .finish("spectra.phi2.range", &geom.config_id(), seed, tol)
        .with_note("max_abs_phi2", largest.to_f64_lossy())
        .with_note("bound", bound.to_f64_lossy()))
}

/// For `y = Px − ⟨Px,x⟩x` at `x ∈ M_−`: `𝒫y = −y` and `y ⊥` the computed
/// normal space of `M_−`.
pub fn verify_tangency_claim<T: Real>(
    geom: &FkmGeometry<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut res = Residuals::new();
    for i in 0..samples as u64 {
        let x = host_sample(geom, true, seed, i)?;
        let p =
            crate::varieties::sample_sphere_element(geom, derive_seed(seed, "tangency-element", i));
        let px = p.apply(&x);
        let y = &px - &x * px.dot(&x);
        let fixing = fixing_element(geom, &x)?;
        let mut r = (fixing.apply(&y) + &y).amax();
        for nu in mminus_normal_space(geom, &x)? {
            r = r.max(y.dot(&nu).abs());
        }
        res.push(r.to_f64_lossy());
    }
    Ok(res.finish("spectra.tangency", &geom.config_id(), seed, tol))
}

/// One line of the eigenvalue/critical-set comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingEntry {
    pub function: EigenfunctionId,
    pub eigenvalue: usize,
    pub critical_set: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub config: String,
    pub entries: Vec<OrderingEntry>,
    /// `4m < l + m − 1`: the `M_−` function with isolated critical points
    /// sits above the one whose critical set is a pair of spheres.
    pub omega_inverted: bool,
}

pub fn ordering_report<T: Real>(geom: &FkmGeometry<T>) -> OrderingReport {
    let n = geom.n();
    let (m, l) = (geom.m(), geom.l());
    let entries = vec![
        OrderingEntry {
            function: EigenfunctionId::Phi1,
            eigenvalue: n,
            critical_set: "8 points".into(),
        },
        OrderingEntry {
            function: EigenfunctionId::Phi2,
            eigenvalue: 2 * n,
            critical_set: format!("N+ u N-, dim {}", geom.dim_mplus()),
        },
        OrderingEntry {
            function: EigenfunctionId::Phi3,
            eigenvalue: 3 * n,
            critical_set: "8 points".into(),
        },
        OrderingEntry {
            function: EigenfunctionId::Omega1,
            eigenvalue: 4 * m,
            critical_set: format!("V+ u V-, spheres S^{}", geom.dim_vpm()),
        },
        OrderingEntry {
            function: EigenfunctionId::Omega2,
            eigenvalue: l + m - 1,
            critical_set: "4 points".into(),
        },
    ];
    OrderingReport {
        config: geom.config_id(),
        entries,
        omega_inverted: 4 * m < l + m - 1,
    }
}

/// Ordering check: `4m < l + m − 1` must hold whenever `k ≥ 5` and `m ≤ 9`;
/// the residual is 1 on a violation, 0 otherwise.
pub fn verify_ordering<T: Real>(geom: &FkmGeometry<T>, seed: u64) -> VerificationReport {
    let rep = ordering_report(geom);
    let predicted = geom.sys().k() >= 5 && geom.m() <= 9;
    let mut res = Residuals::new();
    res.push(if predicted && !rep.omega_inverted {
        1.0
    } else {
        0.0
    });
    let table: Vec<String> = rep
        .entries
        .iter()
        .map(|e| format!("({}, {}, {})", e.function, e.eigenvalue, e.critical_set))
        .collect();
    res.finish("spectra.ordering", &rep.config, seed, 0.5)
        .with_note("omega_inverted", rep.omega_inverted)
        .with_note("table", table.join("; "))
}
