//! One-dimensional root isolation used by the level projector and the
//! critical-point locators.

use crate::scalar::Real;

/// Refine a root of `g` inside a sign-changing bracket `[a, b]`.
///
/// `g` returns the value and derivative. Newton steps are taken while they
/// stay inside the current bracket, bisection otherwise; iteration stops when
/// the bracket can no longer shrink in floating point.
pub fn bracketed_newton<T: Real, G: FnMut(T) -> (T, T)>(mut g: G, mut a: T, mut b: T) -> Option<T> {
    let (mut ga, _) = g(a);
    let (gb, _) = g(b);
    if ga == T::zero() {
        return Some(a);
    }
    if gb == T::zero() {
        return Some(b);
    }
    if ga.is_sign_positive() == gb.is_sign_positive() {
        return None;
    }
    let half = T::lit(0.5);
    let mut t = (a + b) * half;
    for _ in 0..400 {
        let (v, d) = g(t);
        if v == T::zero() {
            return Some(t);
        }
        if v.is_sign_positive() == ga.is_sign_positive() {
            a = t;
            ga = v;
        } else {
            b = t;
        }
        let mid = (a + b) * half;
        if mid == a || mid == b {
            return Some(t);
        }
        let newton = t - v / d;
        let inside =
            d != T::zero() && newton.is_finite() && (newton - a) * (newton - b) < T::zero();
        let next = if inside { newton } else { mid };
        if next == t {
            return Some(t);
        }
        t = next;
    }
    Some(t)
}

/// Plain bisection to floating-point resolution.
pub fn bisect<T: Real, G: FnMut(T) -> T>(mut g: G, mut a: T, mut b: T) -> Option<T> {
    let mut ga = g(a);
    let gb = g(b);
    if ga == T::zero() {
        return Some(a);
    }
    if gb == T::zero() {
        return Some(b);
    }
    if ga.is_sign_positive() == gb.is_sign_positive() {
        return None;
    }
    loop {
        let mid = (a + b) * T::lit(0.5);
        if mid == a || mid == b {
            return Some(mid);
        }
        let gm = g(mid);
        if gm == T::zero() {
            return Some(mid);
        }
        if gm.is_sign_positive() == ga.is_sign_positive() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
}

/// Uniform grid on `[0, 2π)` with `nodes` points.
pub fn periodic_grid<T: Real>(nodes: usize) -> Vec<T> {
    let step = T::two_pi() / T::from_usize_lossy(nodes);
    (0..nodes).map(|i| step * T::from_usize_lossy(i)).collect()
}
