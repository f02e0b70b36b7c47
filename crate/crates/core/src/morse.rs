//! Critical points of `φ1`, `φ3` (on `M^n`) and `ω2` (on `M_−`), located
//! along normal geodesics of the foliation and classified by their Hessians;
//! plus the critical sets of `φ2` and `ω1` and the focal-map geometry.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::calculus::{
    level_mean_curvature_omega1, level_mean_curvature_phi2, omega1_mean_curvature_closed_form,
    phi2_mean_curvature_closed_form, principal_curvatures, tangential_gradient, AmbientField,
};
use crate::clifford::CliffordSphereElement;
use crate::error::{Error, Result};
use crate::fkm::{FkmGeometry, VarietyTag};
use crate::linalg::{numerical_rank, sorted_symmetric_eigen};
use crate::report::{Residuals, VerificationReport};
use crate::rng::derive_seed;
use crate::roots::{bisect, periodic_grid};
use crate::scalar::{Matrix, Real, Vector};
use crate::spectra::{draw_spec, EigenfunctionId, EigenfunctionSpec};
use crate::varieties::{
    h_differential, h_map, j_map, point_on_omega1_level, point_on_phi2_level, retract_mminus,
    retract_mn, sample_eigenspace, sample_mminus, sample_mn, sample_mplus, tangent_frame,
    FocalSign, TangentFrame,
};

pub const SCAN_NODES: usize = 4096;
pub const DEDUP_RADIUS: f64 = 1e-8;
pub const HESSIAN_STEP: f64 = 1e-4;
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Tolerance on `1 + f` at a tangency with `M_−`.
pub const TANGENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint<T: Real> {
    pub x: Vector<T>,
    pub function: EigenfunctionId,
    /// Hessian eigenvalues at `x` in the principal frame (`φ1`, `φ3`) or
    /// from the finite-difference Hessian (`ω2`).
    pub hessian_diagonal: Vec<T>,
    pub morse_index: usize,
    pub degenerate: bool,
    /// Norm of the tangential gradient.
    pub gradient_norm: T,
    /// `max |closed − FD| / max |closed|` after the sign correction; for `ω2`,
    /// the trace residual `|tr H + (l+m−1)ω2|`.
    pub fd_relative_error: T,
    /// Global sign relating the reference closed form to the numerical Hessian.
    pub closed_form_sign: i8,
}

fn dedup_push<T: Real>(points: &mut Vec<Vector<T>>, x: Vector<T>) {
    if points
        .iter()
        .all(|p| (p - &x).norm() > T::lit(DEDUP_RADIUS))
    {
        points.push(x);
    }
}

/// Unit normal at a parameter point, or a degenerate-parameter error.
fn parameter_normal<T: Real>(
    geom: &FkmGeometry<T>,
    q: &Vector<T>,
    what: &str,
) -> Result<Vector<T>> {
    let q = q / q.norm();
    geom.unit_normal(&q).map_err(|_| {
        Error::DegenerateParameter(format!(
            "{what} lies on a focal submanifold; normal geodesic undefined"
        ))
    })
}

/// The points where the normal geodesic through `q1` crosses `M^n`; these are
/// the critical points of both `φ1` and `φ3`.
pub fn find_critical_points_normal_geodesic<T: Real>(
    geom: &FkmGeometry<T>,
    q1: &Vector<T>,
) -> Result<Vec<Vector<T>>> {
    let xi = parameter_normal(geom, q1, "q1")?;
    let curve = |t: T| q1 * t.cos() + &xi * t.sin();
    let g = |t: T| geom.eval_f(&curve(t)) - geom.c0();
    let grid: Vec<T> = periodic_grid(SCAN_NODES);
    let values: Vec<T> = grid.iter().map(|&t| g(t)).collect();
    let mut points = Vec::new();
    for i in 0..SCAN_NODES {
        let (a, b) = (
            grid[i],
            if i + 1 < SCAN_NODES {
                grid[i + 1]
            } else {
                T::two_pi()
            },
        );
        let (va, vb) = (values[i], values[(i + 1) % SCAN_NODES]);
        if va == T::zero() {
            dedup_push(&mut points, curve(a));
        } else if va.is_sign_positive() != vb.is_sign_positive() && vb != T::zero() {
            let t = bisect(g, a, b).expect("bracket has a sign change");
            dedup_push(&mut points, curve(t));
        }
    }
    let expected = 2 * geom.g();
    if points.len() != expected {
        return Err(Error::WrongCount {
            function: "phi1/phi3".into(),
            expected,
            found: points.len(),
        });
    }
    Ok(points)
}

/// Tangency points of the normal geodesic through `q2` with `M_−`: minima of
/// `f` along the geodesic where `1 + f < 1e−10`.
pub fn find_critical_points_omega2<T: Real>(
    geom: &FkmGeometry<T>,
    q2: &Vector<T>,
) -> Result<Vec<Vector<T>>> {
    let xi = parameter_normal(geom, q2, "q2")?;
    let curve = |t: T| q2 * t.cos() + &xi * t.sin();
    let slope = |t: T| {
        let p = curve(t);
        let dp = q2 * (-t.sin()) + &xi * t.cos();
        geom.grad_f(&p).dot(&dp)
    };
    let grid: Vec<T> = periodic_grid(SCAN_NODES);
    let slopes: Vec<T> = grid.iter().map(|&t| slope(t)).collect();
    let mut points = Vec::new();
    for i in 0..SCAN_NODES {
        let (a, b) = (
            grid[i],
            if i + 1 < SCAN_NODES {
                grid[i + 1]
            } else {
                T::two_pi()
            },
        );
        let (sa, sb) = (slopes[i], slopes[(i + 1) % SCAN_NODES]);
        if sa < T::zero() && sb >= T::zero() {
            let t = bisect(slope, a, b).expect("bracket has a sign change");
            let p = curve(t);
            if T::one() + geom.eval_f(&p) < T::lit(TANGENCY_TOL) {
                dedup_push(&mut points, retract_mminus(geom, &p)?);
            }
        }
    }
    let expected = geom.g();
    if points.len() != expected {
        return Err(Error::WrongCount {
            function: "omega2".into(),
            expected,
            found: points.len(),
        });
    }
    Ok(points)
}

/// Intrinsic Hessian at a critical point in the orthonormal directions `dirs`,
/// from second differences of `g` along retraction curves (polarized for
/// off-diagonal entries).
pub fn fd_hessian<T: Real, G, R>(
    x: &Vector<T>,
    dirs: &[Vector<T>],
    g: G,
    retract: R,
) -> Result<Matrix<T>>
where
    G: Fn(&Vector<T>) -> T,
    R: Fn(&Vector<T>) -> Result<Vector<T>>,
{
    let h = T::lit(HESSIAN_STEP);
    let g0 = g(x);
    let second = |v: &Vector<T>| -> Result<T> {
        let plus = g(&retract(&(x + v * h))?);
        let minus = g(&retract(&(x - v * h))?);
        Ok((plus + minus - g0 - g0) / (h * h))
    };
    let n = dirs.len();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = second(&dirs[i])?;
        for j in 0..i {
            let v =
                (second(&(&dirs[i] + &dirs[j]))? - second(&(&dirs[i] - &dirs[j]))?) / T::lit(4.0);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Hessian of `φ1` or `φ3` at a critical point: the reference closed forms
/// `−⟨μ_iξ − x, q1⟩` and `−μ_i⟨μ_iξ − x, q1⟩` checked against finite differences.
pub fn classify<T: Real>(
    geom: &FkmGeometry<T>,
    x: &Vector<T>,
    spec: &EigenfunctionSpec<T>,
) -> Result<CriticalPoint<T>> {
    let q1 = spec
        .point()
        .filter(|_| matches!(spec.id, EigenfunctionId::Phi1 | EigenfunctionId::Phi3))
        .ok_or_else(|| {
            Error::InvalidArgument(format!("classify handles phi1/phi3, got {}", spec.id))
        })?;
    let frame = tangent_frame(geom, x, &VarietyTag::Mn)?;
    let xi = frame.normal.clone().expect("Mn frame carries a normal");
    let pc = principal_curvatures(geom, &frame)?;
    let closed: Vec<T> = pc
        .spectrum
        .iter()
        .map(|&mu| {
            let base = -(&xi * mu - x).dot(q1);
            if spec.id == EigenfunctionId::Phi3 {
                base * mu
            } else {
                base
            }
        })
        .collect();
    let field = spec.field(geom);
    let fd = fd_hessian(
        x,
        &pc.directions,
        |y| field.value(y),
        |y| retract_mn(geom, y),
    )?;
    classify_against(spec.id, x, &frame, &field, closed, &fd)
}

fn classify_against<T: Real>(
    function: EigenfunctionId,
    x: &Vector<T>,
    frame: &TangentFrame<T>,
    field: &dyn AmbientField<T>,
    closed: Vec<T>,
    fd: &Matrix<T>,
) -> Result<CriticalPoint<T>> {
    let diag = Matrix::from_diagonal(&Vector::from_vec(closed.clone()));
    let scale = closed
        .iter()
        .fold(T::zero(), |a, v| a.max(v.abs()))
        .max(T::lit(1e-300));
    let same = crate::linalg::max_abs(&(&diag - fd));
    let flipped = crate::linalg::max_abs(&(&diag + fd));
    let (sign, err) = if same <= flipped {
        (1i8, same)
    } else {
        (-1i8, flipped)
    };
    let hessian_diagonal: Vec<T> = closed
        .iter()
        .map(|&v| if sign > 0 { v } else { -v })
        .collect();
    Ok(finish_point(
        function,
        x,
        frame,
        field,
        hessian_diagonal,
        err / scale,
        sign,
    ))
}

fn finish_point<T: Real>(
    function: EigenfunctionId,
    x: &Vector<T>,
    frame: &TangentFrame<T>,
    field: &dyn AmbientField<T>,
    hessian_diagonal: Vec<T>,
    fd_relative_error: T,
    closed_form_sign: i8,
) -> CriticalPoint<T> {
    let min_abs = hessian_diagonal
        .iter()
        .fold(T::lit(f64::INFINITY), |a, v| a.min(v.abs()));
    CriticalPoint {
        x: x.clone(),
        function,
        morse_index: hessian_diagonal.iter().filter(|v| **v < T::zero()).count(),
        degenerate: min_abs < T::lit(DEGENERACY_TOL),
        gradient_norm: tangential_gradient(field, frame).norm(),
        hessian_diagonal,
        fd_relative_error,
        closed_form_sign,
    }
}

/// Hessian of `ω2 = ⟨x, q2⟩` at a critical point of `M_−`, from finite
/// differences; its trace is compared with `Δω2 = −(l+m−1)ω2`.
pub fn classify_omega2<T: Real>(
    geom: &FkmGeometry<T>,
    x: &Vector<T>,
    spec: &EigenfunctionSpec<T>,
) -> Result<CriticalPoint<T>> {
    if spec.id != EigenfunctionId::Omega2 {
        return Err(Error::InvalidArgument(format!(
            "classify_omega2 got {}",
            spec.id
        )));
    }
    let frame = tangent_frame(geom, x, &VarietyTag::Mminus)?;
    let field = spec.field(geom);
    let fd = fd_hessian(
        x,
        &frame.basis,
        |y| field.value(y),
        |y| retract_mminus(geom, y),
    )?;
    let (eig, _) = sorted_symmetric_eigen(&fd);
    let trace_residual = (fd.trace() + spec.claimed_eigenvalue * field.value(x)).abs();
    Ok(finish_point(
        EigenfunctionId::Omega2,
        x,
        &frame,
        &field,
        eig,
        trace_residual,
        1,
    ))
}

/// `|cos t·x + sin t·ξ − q1|` for the best `t`: the span condition.
pub fn span_residual<T: Real>(geom: &FkmGeometry<T>, x: &Vector<T>, q1: &Vector<T>) -> Result<T> {
    let xi = geom.unit_normal(x)?;
    let t = q1.dot(&xi).atan2(q1.dot(x));
    Ok((x * t.cos() + xi * t.sin() - q1).norm())
}

/// Critical points of one function for one parameter draw, classified.
pub fn critical_points<T: Real>(
    geom: &FkmGeometry<T>,
    spec: &EigenfunctionSpec<T>,
) -> Result<Vec<CriticalPoint<T>>> {
    let q = spec
        .point()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no point parameter", spec.id)))?;
    match spec.id {
        EigenfunctionId::Phi1 | EigenfunctionId::Phi3 => {
            find_critical_points_normal_geodesic(geom, q)?
                .iter()
                .map(|x| classify(geom, x, spec))
                .collect()
        }
        EigenfunctionId::Omega2 => find_critical_points_omega2(geom, q)?
            .iter()
            .map(|x| classify_omega2(geom, x, spec))
            .collect(),
        other => Err(Error::InvalidArgument(format!(
            "{other} has critical submanifolds, not points"
        ))),
    }
}

pub fn critical_points_csv<T: Real>(points: &[CriticalPoint<T>]) -> String {
    let mut out =
        String::from("function,draw_point,morse_index,degenerate,coordinates,hessian_diagonal\n");
    for (i, p) in points.iter().enumerate() {
        let join = |vs: &mut dyn Iterator<Item = T>| {
            vs.map(|v| format!("{:.17e}", v.to_f64_lossy()))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.function,
            i,
            p.morse_index,
            p.degenerate,
            join(&mut p.x.iter().copied()),
            join(&mut p.hessian_diagonal.iter().copied())
        );
    }
    out
}

/// Per-draw results for one function over many generic parameters.
#[derive(Debug, Clone)]
pub struct CriticalSurvey {
    pub counts: Residuals,
    pub degenerate: Residuals,
    pub gradient: Residuals,
    pub hessian: Residuals,
    pub span: Residuals,
    pub signs: BTreeMap<i8, usize>,
    /// Morse index → number of points, pooled over all draws.
    pub indices: BTreeMap<usize, usize>,
}

/// Locate and classify critical points for `draws` independent parameters.
pub fn survey<T: Real>(
    geom: &FkmGeometry<T>,
    id: EigenfunctionId,
    draws: usize,
    seed: u64,
) -> Result<CriticalSurvey> {
    let expected = if id == EigenfunctionId::Omega2 {
        geom.g()
    } else {
        2 * geom.g()
    };
    let mut s = CriticalSurvey {
        counts: Residuals::new(),
        degenerate: Residuals::new(),
        gradient: Residuals::new(),
        hessian: Residuals::new(),
        span: Residuals::new(),
        signs: BTreeMap::new(),
        indices: BTreeMap::new(),
    };
    for d in 0..draws as u64 {
        let spec = draw_spec(geom, id, derive_seed(seed, "critical-draw", d))?;
        let points = match critical_points(geom, &spec) {
            Ok(p) => p,
            Err(Error::WrongCount { found, .. }) => {
                s.counts.push(found as f64 - expected as f64);
                continue;
            }
            Err(e) => return Err(e),
        };
        s.counts.push(points.len() as f64 - expected as f64);
        s.degenerate
            .push(points.iter().filter(|p| p.degenerate).count() as f64);
        for p in &points {
            s.gradient.push(p.gradient_norm.to_f64_lossy());
            s.hessian.push(p.fd_relative_error.to_f64_lossy());
            *s.signs.entry(p.closed_form_sign).or_default() += 1;
            *s.indices.entry(p.morse_index).or_default() += 1;
            if id != EigenfunctionId::Omega2 {
                s.span.push(
                    span_residual(geom, &p.x, spec.point().expect("point parameter"))?
                        .to_f64_lossy(),
                );
            }
        }
    }
    Ok(s)
}

fn format_map<K: std::fmt::Display, V: std::fmt::Display>(m: &BTreeMap<K, V>) -> String {
    m.iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Reports for one function: count, degenerate count, gradient, Hessian,
/// and (for `φ1`, `φ3`) the span condition.
pub fn survey_reports<T: Real>(
    geom: &FkmGeometry<T>,
    id: EigenfunctionId,
    draws: usize,
    seed: u64,
    hessian_tol: f64,
) -> Result<Vec<VerificationReport>> {
    let s = survey(geom, id, draws, seed)?;
    let cfg = geom.config_id();
    let expected = if id == EigenfunctionId::Omega2 {
        geom.g()
    } else {
        2 * geom.g()
    };
    let signs = format_map(&s.signs);
    let mut out = vec![
        s.counts
            .finish(&format!("morse.count.{id}"), &cfg, seed, 0.5)
            .with_note("expected", expected),
        s.degenerate
            .finish(&format!("morse.degenerate.{id}"), &cfg, seed, 0.5),
        s.gradient
            .finish(&format!("morse.gradient.{id}"), &cfg, seed, 1e-9),
        s.hessian
            .finish(&format!("morse.hessian.{id}"), &cfg, seed, hessian_tol)
            .with_note("closed_form_sign_counts", &signs)
            .with_note("morse_index_counts", format_map(&s.indices)),
    ];
    if id != EigenfunctionId::Omega2 {
        out.push(s.span.finish(&format!("morse.span.{id}"), &cfg, seed, 1e-9));
    }
    Ok(out)
}

/// Smallest `|Hessian diagonal|` of `φ1` at `x ∈ M^n` when `q1` is placed on
/// the normal geodesic through `x` at angle `t` (`q1 = cos t·x + sin t·ξ`).
pub fn min_hessian_at_angle<T: Real>(geom: &FkmGeometry<T>, x: &Vector<T>, t: T) -> Result<T> {
    let xi = geom.unit_normal(x)?;
    let q1 = x * t.cos() + &xi * t.sin();
    let frame = tangent_frame(geom, x, &VarietyTag::Mn)?;
    let pc = principal_curvatures(geom, &frame)?;
    Ok(pc.spectrum.iter().fold(T::lit(f64::INFINITY), |a, &mu| {
        a.min((&xi * mu - x).dot(&q1).abs())
    }))
}

/// Degeneracy onset of the `φ1` Hessian as `q1` moves along the normal
/// geodesic. `q1` on `M_+` (`t = θ₁`) or `M_−` (`t = θ₁ + π/4`) must give a
/// vanishing diagonal entry; the residual is that entry. `q1 ∈ M^n` at
/// `t = 2θ₁` is reported in the notes.
pub fn verify_degeneracy_onset<T: Real>(
    geom: &FkmGeometry<T>,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let th = geom.theta1();
    let mut res = Residuals::new();
    let mut on_mn = T::lit(f64::INFINITY);
    for i in 0..samples as u64 {
        let x = sample_mn(geom, derive_seed(seed, "onset", i))?;
        res.push(min_hessian_at_angle(geom, &x, th)?.to_f64_lossy());
        res.push(min_hessian_at_angle(geom, &x, th + T::frac_pi_4())?.to_f64_lossy());
        on_mn = on_mn.min(min_hessian_at_angle(geom, &x, th + th)?);
    }
    Ok(res
        .finish(
            "morse.degeneracy_onset",
            &geom.config_id(),
            seed,
            DEGENERACY_TOL,
        )
        .with_note("min_diagonal_q1_on_Mn", on_mn.to_f64_lossy()))
}

/// `C(φ2) = N_+ ∪ N_−`: `∇φ2` vanishes on sampled `N_±` points, and at
/// random `M^n` points `|∇φ2|² = 4(1 − 2φ2²/(1−c0))`, so it vanishes only at
/// the extreme levels.
pub fn verify_critical_set_phi2<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut res = Residuals::new();
    let c = T::lit(2.0) / (T::one() - geom.c0());
    for i in 0..samples as u64 {
        let xp = sample_mplus(geom, derive_seed(seed, "phi2-critical", i))?;
        for sign in [FocalSign::Plus, FocalSign::Minus] {
            let y = h_map(geom, p, sign, &xp);
            let frame = tangent_frame(geom, &y, &VarietyTag::Mn)?;
            res.push(
                frame
                    .project(&(p.apply(&y) * T::lit(2.0)))
                    .norm()
                    .to_f64_lossy(),
            );
        }
        let x = sample_mn(geom, derive_seed(seed, "phi2-noncritical", i))?;
        let frame = tangent_frame(geom, &x, &VarietyTag::Mn)?;
        let u = p.form(&x);
        let g2 = frame.project(&(p.apply(&x) * T::lit(2.0))).norm_squared();
        res.push((g2 - T::lit(4.0) * (T::one() - c * u * u)).to_f64_lossy());
    }
    Ok(res.finish("morse.phi2.critical_set", &geom.config_id(), seed, tol))
}

/// Focal-map checks on `samples` points of `M_+`: returns the round trip
/// `j∘h_+ = id`, the level `⟨Ph_+, h_+⟩ = √((1−c0)/2)`, and the rank of `dh_+`.
pub fn verify_focal_maps<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<VerificationReport>> {
    let (mut trip, mut level, mut rank) = (Residuals::new(), Residuals::new(), Residuals::new());
    let (mut trip_minus, mut level_minus) = (Residuals::new(), Residuals::new());
    let target = geom.dim_mplus();
    let top = geom.phi2_focal_level();
    for i in 0..samples as u64 {
        let xp = sample_mplus(geom, derive_seed(seed, "focal", i))?;
        for sign in [FocalSign::Plus, FocalSign::Minus] {
            let y = h_map(geom, p, sign, &xp);
            let back = j_map(geom, &y)?;
            let (t, l) = if sign == FocalSign::Plus {
                (&mut trip, &mut level)
            } else {
                (&mut trip_minus, &mut level_minus)
            };
            t.push((back - &xp).amax().to_f64_lossy());
            l.push(
                (p.form(&y) - top * sign.value::<T>())
                    .max((geom.eval_f(&y) - geom.c0()).abs())
                    .to_f64_lossy(),
            );
        }
        let frame = tangent_frame(geom, &xp, &VarietyTag::Mplus)?;
        let images: Vec<Vector<T>> = frame
            .basis
            .iter()
            .map(|v| h_differential(geom, p, FocalSign::Plus, v))
            .collect();
        let r = numerical_rank(&images, xp.len(), T::lit(1e-8));
        rank.push(r as f64 - target as f64);
    }
    let cfg = geom.config_id();
    Ok(vec![
        trip.finish("morse.focal.roundtrip", &cfg, seed, tol),
        level.finish("morse.focal.level", &cfg, seed, tol),
        rank.finish("morse.focal.rank", &cfg, seed, 0.5)
            .with_note("expected_rank", target),
        trip_minus.finish("morse.focal.roundtrip_minus", &cfg, seed, tol),
        level_minus.finish("morse.focal.level_minus", &cfg, seed, tol),
    ])
}

/// Gradient ascent (or descent) of `ω1 = ⟨Px, x⟩` on `M_−` with retraction.
pub fn ascend_omega1<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    x0: &Vector<T>,
    up: bool,
) -> Result<Vector<T>> {
    let step = T::lit(if up { 0.2 } else { -0.2 });
    let mut x = x0.clone();
    for _ in 0..2000 {
        let px = p.apply(&x);
        let grad = (&px - &x * px.dot(&x)) * T::lit(2.0);
        if grad.norm() < T::lit(1e-15) {
            break;
        }
        x = retract_mminus(geom, &(&x + grad * step))?;
    }
    Ok(x)
}

/// `V_± = E_±(P) ∩ S`: points reached by maximizing (minimizing) `ω1` on
/// `M_−` satisfy `Px = ±x`; unit vectors of `E_±(P)` lie in `M_−` with
/// `ω1 = ±1`; the `V_±` frame has dimension `l − 1`.
pub fn verify_vpm_spheres<T: Real>(
    geom: &FkmGeometry<T>,
    p: &CliffordSphereElement<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for (plus, name) in [(true, "plus"), (false, "minus")] {
        let sign = if plus { T::one() } else { -T::one() };
        let mut res = Residuals::new();
        let mut dim_res = Residuals::new();
        for i in 0..samples as u64 {
            let start = sample_mminus(geom, derive_seed(seed, "vpm-start", i)).x;
            let x = ascend_omega1(geom, p, &start, plus)?;
            res.push((p.apply(&x) - &x * sign).amax().to_f64_lossy());
            let e = sample_eigenspace(p, plus, derive_seed(seed, "vpm-eigen", i));
            let tag = if plus {
                VarietyTag::Vplus(p.clone())
            } else {
                VarietyTag::Vminus(p.clone())
            };
            res.push(
                geom.membership(&e, &VarietyTag::Mminus)
                    .max((p.form(&e) - sign).abs())
                    .to_f64_lossy(),
            );
            res.push(geom.membership(&e, &tag).to_f64_lossy());
            let frame = tangent_frame(geom, &e, &tag)?;
            dim_res.push(frame.dim() as f64 - geom.dim_vpm() as f64);
        }
        let cfg = geom.config_id();
        out.push(res.finish(&format!("morse.vpm.{name}"), &cfg, seed, tol));
        out.push(
            dim_res
                .finish(&format!("morse.vpm.{name}.dim"), &cfg, seed, 0.5)
                .with_note("expected", geom.dim_vpm()),
        );
    }
    Ok(out)
}

/// Numerical level mean curvature against the closed form at `levels`
/// evenly spaced values strictly inside the range, up to one global sign.
///
/// Residual: `|h − s·h_closed| / max(1, max |h_closed|)`; for the improper
/// case `m = 1` with `φ2`, `h_closed ≡ 0` and the residual is `|h|`.
pub fn verify_level_mean_curvature<T: Real>(
    geom: &FkmGeometry<T>,
    id: EigenfunctionId,
    p: &CliffordSphereElement<T>,
    levels: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let profile = mean_curvature_profile(geom, id, p, levels, seed)?;
    let scale = profile.iter().fold(T::one(), |a, r| a.max(r.closed.abs()));
    let err = |s: T| {
        profile
            .iter()
            .fold(T::zero(), |a, r| a.max((r.numeric - r.closed * s).abs()))
    };
    let sign = if err(T::one()) <= err(-T::one()) {
        T::one()
    } else {
        -T::one()
    };
    let mut res = Residuals::new();
    for r in &profile {
        res.push(((r.numeric - r.closed * sign) / scale).to_f64_lossy());
    }
    Ok(res
        .finish(
            &format!("morse.mean_curvature.{id}"),
            &geom.config_id(),
            seed,
            tol,
        )
        .with_note("global_sign", sign.to_f64_lossy()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCurvatureRow<T> {
    pub t: T,
    pub numeric: T,
    pub closed: T,
}

/// `h(t)` tabulated at `levels` values `t_j = ±0.95·t_max·(…)` evenly spaced
/// in the open range of the function.
pub fn mean_curvature_profile<T: Real>(
    geom: &FkmGeometry<T>,
    id: EigenfunctionId,
    p: &CliffordSphereElement<T>,
    levels: usize,
    seed: u64,
) -> Result<Vec<MeanCurvatureRow<T>>> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be positive".into()));
    }
    let top = match id {
        EigenfunctionId::Phi2 => geom.phi2_focal_level(),
        EigenfunctionId::Omega1 => T::one(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "{other} has no level profile"
            )))
        }
    };
    let span = top * T::lit(0.95);
    let mut rows = Vec::with_capacity(levels);
    for j in 0..levels {
        let frac = if levels == 1 {
            T::zero()
        } else {
            T::lit(-1.0) + T::lit(2.0) * T::from_usize_lossy(j) / T::from_usize_lossy(levels - 1)
        };
        let t = span * frac;
        let s = derive_seed(seed, "level", j as u64);
        let (numeric, closed) = if id == EigenfunctionId::Phi2 {
            let x = point_on_phi2_level(geom, p, t, s)?;
            let frame = tangent_frame(geom, &x, &VarietyTag::Mn)?;
            (
                level_mean_curvature_phi2(geom, &frame, p)?,
                phi2_mean_curvature_closed_form(geom, t),
            )
        } else {
            let x = point_on_omega1_level(geom, p, t, s)?;
            let frame = tangent_frame(geom, &x, &VarietyTag::Mminus)?;
            (
                level_mean_curvature_omega1(geom, &frame, p)?,
                omega1_mean_curvature_closed_form(geom, t),
            )
        };
        rows.push(MeanCurvatureRow { t, numeric, closed });
    }
    Ok(rows)
}
