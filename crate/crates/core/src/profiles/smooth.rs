//! Profiles built from `exp(-1/x)`-type bumps: the flat step `k`, the collar
//! profile, and the smooth cutoff used by mollification.

use super::{Endpoint, Jet, Parity, ParityTag, ProfileKind, Repr, WarpProfile};
use crate::numerics::{integrate, linspace, Interval};
use crate::{Error, Result};

/// The collar profile lives on `[0, COLLAR_SPAN · ramp]`.
pub const COLLAR_SPAN: f64 = 2.0;

const QUAD_RTOL: f64 = 1e-14;

/// `φ(x) = exp(1 - 1/(1 - x²))` on `[0, 1)`, zero from 1 on; returns `(φ, φ')`.
fn flat_bump(x: f64) -> (f64, f64) {
    if x >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - x * x;
    let phi = (1.0 - 1.0 / q).exp();
    (phi, phi * (-2.0 * x / (q * q)))
}

/// `ψ(x) = exp(1 - 1/(1 - x))` on `[0, 1)`, zero from 1 on; returns `(ψ, ψ')`.
fn collar_bump(x: f64) -> (f64, f64) {
    if x >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - x;
    let psi = (1.0 - 1.0 / q).exp();
    (psi, -psi / (q * q))
}

fn bump_integral(bump: fn(f64) -> (f64, f64), x: f64) -> f64 {
    integrate(|s| bump(s).0, 0.0, x.min(1.0), QUAD_RTOL, 1e-300)
        .map(|q| q.value)
        .expect("bump integrands are bounded and smooth")
}

pub(super) fn flat_step_jet(eps: f64, t: f64) -> Jet {
    let x = (t / eps).max(0.0);
    let (phi, dphi) = flat_bump(x);
    Jet::new(eps * bump_integral(flat_bump, x), phi, dphi / eps)
}

/// `k, k', …, k^(5)` at the two ends of the flat step, where they are known
/// in closed form.
pub(super) fn flat_step_endpoint(eps: f64, t: f64) -> Option<[f64; 6]> {
    if t == 0.0 {
        // φ = 1 - x² - x⁴/2 + O(x⁶)
        Some([0.0, 1.0, 0.0, -2.0 / (eps * eps), 0.0, -12.0 / eps.powi(4)])
    } else if t >= eps {
        Some([eps * bump_integral(flat_bump, 1.0), 0.0, 0.0, 0.0, 0.0, 0.0])
    } else {
        None
    }
}

pub(super) fn collar_jet(c: f64, ramp: f64, t: f64) -> Jet {
    let x = (t / ramp).max(0.0);
    let (psi, dpsi) = collar_bump(x);
    Jet::new(
        1.0 + c * t + c * ramp * bump_integral(collar_bump, x),
        c * (1.0 + psi),
        c * dpsi / ramp,
    )
}

/// Smooth monotone step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, with all derivatives
/// vanishing at both ends. Returns `(S, S', S'')`.
pub(super) fn smooth_step(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    let s = a / (a + b);
    let w = a * b / ((a + b) * (a + b));
    let g1 = 1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x));
    let g2 = -2.0 / (x * x * x) + 2.0 / ((1.0 - x) * (1.0 - x) * (1.0 - x));
    (s, w * g1, w * (1.0 - 2.0 * s) * g1 * g1 + w * g2)
}

/// A profile `k` on `[0, ε']` with `k(0) = 0`, `k'(0) = 1`, `k''' (0) < 0`,
/// `k'' < 0` inside and all derivatives vanishing at `ε'`.
///
/// `k' = φ(t/ε')`, so `k = ε' ∫₀^{t/ε'} φ`.
pub fn k_profile(eps: f64) -> Result<WarpProfile> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::input(format!("ε' must be positive, got {eps}")));
    }
    let p = WarpProfile::from_repr(
        Interval::new(0.0, eps),
        ProfileKind::ClosedForm,
        Repr::FlatStep { eps },
    )
    .with_tag(
        Endpoint::Left,
        ParityTag {
            parity: Parity::Odd,
            order: 3,
            series: None,
        },
    )
    .with_tag(
        Endpoint::Right,
        ParityTag {
            parity: Parity::Even,
            order: 3,
            series: None,
        },
    );

    let fail = |what: String| Err(Error::Construction(format!("k profile: {what}")));
    let start = p.jet(0.0);
    if start.f != 0.0 || start.fp != 1.0 {
        return fail(format!("k(0) = {}, k'(0) = {}", start.f, start.fp));
    }
    let d = 1e-4 * eps;
    let k3 = (p.jet(d).fpp - p.jet(0.0).fpp) / d;
    if !(k3 < 0.0) {
        return fail(format!("k'''(0) = {k3} is not negative"));
    }
    for t in linspace(0.0, eps, 66).into_iter().skip(1).take(64) {
        let j = p.jet(t);
        if !(j.fpp < 0.0) {
            return fail(format!("k''({t}) = {} is not negative", j.fpp));
        }
    }
    let end = p.jet(eps);
    if !(end.f > 0.0) || end.fp.abs() > 1e-10 || end.fpp.abs() > 1e-10 {
        return fail(format!(
            "end values k = {}, k' = {}, k'' = {}",
            end.f, end.fp, end.fpp
        ));
    }
    Ok(p)
}

/// The collar warping function: `f(0) = 1`, `f'(0) = 2c`, `f'' < 0` on
/// `[0, ramp)` and `f' ≡ c` from `ramp` on.
///
/// `f' = c (1 + ψ(t/ramp))` with `ψ(x) = exp(1 - 1/(1 - x))`, which decreases
/// from 1 at `x = 0` to a flat 0 at `x = 1`.
pub fn collar_profile(c: f64, ramp: f64) -> Result<WarpProfile> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::input(format!("c must be positive, got {c}")));
    }
    if !(ramp > 0.0) || !ramp.is_finite() {
        return Err(Error::input(format!("ramp must be positive, got {ramp}")));
    }
    Ok(WarpProfile::from_repr(
        Interval::new(0.0, COLLAR_SPAN * ramp),
        ProfileKind::ClosedForm,
        Repr::Collar { c, ramp },
    ))
}
