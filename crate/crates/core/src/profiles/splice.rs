use super::smooth::smooth_step;
use super::{Jet, Joint, ProfileKind, Repr, WarpProfile};
use crate::numerics::{integrate, Interval};
use crate::{Error, Result};

/// `∫₋₁¹ exp(-1/(1 - x²)) dx`.
const BUMP_MASS: f64 = 0.443_993_816_168_079_4;

/// Joins `p1` and `p2` at the right end of `p1`. Values and slopes must agree
/// within `tol`; a jump in `f''` is recorded as a joint.
pub fn splice_profiles(p1: &WarpProfile, p2: &WarpProfile, tol: f64) -> Result<WarpProfile> {
    if !(tol >= 0.0) {
        return Err(Error::input(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    let at = p1.domain().hi;
    let start = p2.domain().lo;
    let left = p1.jet(at);
    let right = p2.jet(start);
    if (at - start).abs() > tol
        || (left.f - right.f).abs() > tol
        || (left.fp - right.fp).abs() > tol
    {
        return Err(Error::GlueMismatch { at, left, right });
    }
    if !(p2.domain().hi > at) {
        return Err(Error::input(
            "the second profile must extend past the joint",
        ));
    }
    let mut joints: Vec<Joint> = p1.joints().to_vec();
    joints.push(Joint {
        t: at,
        fpp_jump: right.fpp - left.fpp,
        smoothed: false,
    });
    joints.extend(p2.joints().iter().copied());
    let mut out = WarpProfile::from_repr(
        Interval::new(p1.domain().lo, p2.domain().hi),
        ProfileKind::Spliced,
        Repr::Spliced {
            left: p1.clone(),
            right: p2.clone(),
            at,
        },
    );
    out.parity = [p1.parity[0].clone(), p2.parity[1].clone()];
    out.joints = joints;
    Ok(out)
}

/// Replaces the profile near every unsmoothed joint by its convolution with
/// a bump of the given width, blended in with a smooth cutoff. Outside the
/// `width`-neighborhoods of the joints the result evaluates bit-identically
/// to the input.
pub fn mollify_profile(p: &WarpProfile, width: f64) -> Result<WarpProfile> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::input(format!("width must be positive, got {width}")));
    }
    let active: Vec<f64> = p
        .joints()
        .iter()
        .filter(|j| !j.smoothed)
        .map(|j| j.t)
        .collect();
    if active.is_empty() {
        return Ok(p.clone());
    }
    let Interval { lo, hi } = p.domain();
    for &t in &active {
        if t - lo <= 2.0 * width || hi - t <= 2.0 * width {
            return Err(Error::input(format!(
                "width {width} is too large for the joint at {t} in [{lo}, {hi}]"
            )));
        }
    }
    for pair in active.windows(2) {
        if pair[1] - pair[0] <= 2.0 * width {
            return Err(Error::input(format!(
                "joints at {} and {} are closer than twice the width {width}",
                pair[0], pair[1]
            )));
        }
    }
    let mut out = WarpProfile::from_repr(
        p.domain(),
        ProfileKind::Mollified,
        Repr::Mollified {
            base: p.clone(),
            width,
            joints: active,
        },
    );
    out.parity = p.parity.clone();
    out.joints = p
        .joints()
        .iter()
        .map(|j| Joint {
            smoothed: true,
            ..*j
        })
        .collect();
    Ok(out)
}

fn cutoff(d: f64, width: f64) -> (f64, f64, f64) {
    let u = d.abs();
    if u <= 0.5 * width {
        return (1.0, 0.0, 0.0);
    }
    if u >= width {
        return (0.0, 0.0, 0.0);
    }
    let (s, s1, s2) = smooth_step((width - u) / (0.5 * width));
    (
        s,
        -2.0 / width * d.signum() * s1,
        4.0 / (width * width) * s2,
    )
}

fn kernel(s: f64, r: f64) -> f64 {
    let x = s / r;
    if x.abs() >= 1.0 {
        return 0.0;
    }
    (-1.0 / (1.0 - x * x)).exp() / (r * BUMP_MASS)
}

/// `∫ g(t - s) η_r(s) ds`, split where `t - s` hits the joint.
fn convolve(g: impl Fn(f64) -> f64, t: f64, r: f64, split: f64) -> f64 {
    let integrand = |s: f64| g(t - s) * kernel(s, r);
    let piece = |a: f64, b: f64| {
        integrate(integrand, a, b, 1e-13, 1e-16)
            .map(|q| q.value)
            .expect("mollifier integrand is bounded")
    };
    if split > -r && split < r {
        piece(-r, split) + piece(split, r)
    } else {
        piece(-r, r)
    }
}

pub(super) fn mollified_jet(base: &WarpProfile, width: f64, joints: &[f64], t: f64) -> Jet {
    let Some(&tj) = joints.iter().find(|&&tj| (t - tj).abs() < width) else {
        return base.jet(t);
    };
    let d = t - tj;
    let (chi, chi1, chi2) = cutoff(d, width);
    let p = base.jet(t);
    if chi == 0.0 && chi1 == 0.0 && chi2 == 0.0 {
        return p;
    }
    let r = 0.5 * width;
    let q0 = convolve(|x| base.jet(x).f, t, r, d);
    let q1 = convolve(|x| base.jet(x).fp, t, r, d);
    let q2 = convolve(|x| base.jet(x).fpp, t, r, d);
    let (e0, e1, e2) = (q0 - p.f, q1 - p.fp, q2 - p.fpp);
    Jet::new(
        p.f + chi * e0,
        p.fp + chi1 * e0 + chi * e1,
        p.fpp + chi2 * e0 + 2.0 * chi1 * e1 + chi * e2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linspace;
    use crate::profiles::{closed_form_profile, collar_profile, ClosedForm};
    use std::f64::consts::FRAC_PI_2;

    fn sine_then_one() -> WarpProfile {
        let s = closed_form_profile(
            ClosedForm::Sine {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
            Interval::new(0.0, FRAC_PI_2),
        )
        .unwrap();
        let c = closed_form_profile(
            ClosedForm::Constant { a: 1.0 },
            Interval::new(FRAC_PI_2, 2.0),
        )
        .unwrap();
        splice_profiles(&s, &c, 1e-12).unwrap()
    }

    #[test]
    fn c1_splice_records_jump() {
        let p = sine_then_one();
        assert_eq!(p.kind(), ProfileKind::Spliced);
        assert_eq!(p.joints().len(), 1);
        assert!((p.joints()[0].fpp_jump - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slope_mismatch_is_an_error() {
        let a = closed_form_profile(
            ClosedForm::Linear { a: 0.0, b: 1.0 },
            Interval::new(0.0, 1.0),
        )
        .unwrap();
        let b = closed_form_profile(
            ClosedForm::Linear { a: 0.0, b: 2.0 },
            Interval::new(1.0, 2.0),
        )
        .unwrap();
        let err = splice_profiles(&a, &b, 1e-9).unwrap_err();
        match err {
            Error::GlueMismatch { left, right, .. } => {
                assert_eq!((left.fp, right.fp), (1.0, 2.0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn self_splice_is_identity() {
        let c = collar_profile(0.1, 1.0).unwrap();
        let s = splice_profiles(
            &c.restrict(0.0, 1.0).unwrap(),
            &c.restrict(1.0, 2.0).unwrap(),
            1e-12,
        )
        .unwrap();
        for t in linspace(0.0, 2.0, 101) {
            let (a, b) = (s.eval(t).unwrap(), c.eval(t).unwrap());
            assert!((a.f - b.f).abs() < 1e-12 && (a.fp - b.fp).abs() < 1e-12);
        }
    }

    #[test]
    fn no_joints_means_unchanged() {
        let c = collar_profile(0.1, 1.0).unwrap();
        let m = mollify_profile(&c, 0.05).unwrap();
        assert_eq!(m.kind(), c.kind());
        assert_eq!(m.eval(0.7).unwrap(), c.eval(0.7).unwrap());
    }

    #[test]
    fn mollified_splice_is_c2_and_close() {
        let p = sine_then_one();
        let w = 0.05;
        let m = mollify_profile(&p, w).unwrap();
        let tj = FRAC_PI_2;
        let mut worst = 0.0f64;
        for t in linspace(tj - 1.2 * w, tj + 1.2 * w, 241) {
            let (a, b) = (m.eval(t).unwrap(), p.eval(t).unwrap());
            worst = worst.max((a.f - b.f).abs());
            assert!(a.f > 0.0);
        }
        assert!(worst <= w * 1.0 / 2.0, "{worst}");
        let d = 1e-6;
        let left = m.eval(tj - d).unwrap().fpp;
        let mid = m.eval(tj).unwrap().fpp;
        let right = m.eval(tj + d).unwrap().fpp;
        assert!((left - mid).abs() < 1e-2 && (right - mid).abs() < 1e-2);
        for t in [tj - 0.7 * w, tj, tj + 0.3 * w, tj + 0.8 * w] {
            let fd = (m.eval(t + d).unwrap().fp - m.eval(t - d).unwrap().fp) / (2.0 * d);
            let exact = m.eval(t).unwrap().fpp;
            assert!((exact - fd).abs() < 1e-5, "t = {t}: {exact} vs {fd}");
        }
    }

    #[test]
    fn mollification_matches_a_direct_convolution() {
        let p = sine_then_one();
        let w = 0.05;
        let m = mollify_profile(&p, w).unwrap();
        let t = FRAC_PI_2 + 0.004;
        let r = 0.5 * w;
        let n = 20_000;
        let h = 2.0 * r / n as f64;
        let direct: f64 = (0..n)
            .map(|i| {
                let s = -r + (i as f64 + 0.5) * h;
                p.eval(t - s).unwrap().f * kernel(s, r) * h
            })
            .sum();
        assert!((m.eval(t).unwrap().f - direct).abs() < 1e-9);
    }

    #[test]
    fn away_from_joints_is_bit_identical() {
        let p = sine_then_one();
        let m = mollify_profile(&p, 0.05).unwrap();
        for t in [0.2, 1.0, 1.5, 1.63, 1.9] {
            assert_eq!(m.eval(t).unwrap(), p.eval(t).unwrap());
        }
    }

    #[test]
    fn second_mollification_is_a_fixed_point() {
        let p = sine_then_one();
        let m1 = mollify_profile(&p, 0.05).unwrap();
        let m2 = mollify_profile(&m1, 0.05).unwrap();
        for t in linspace(1.4, 1.7, 31) {
            assert_eq!(m1.eval(t).unwrap(), m2.eval(t).unwrap());
        }
    }

    #[test]
    fn width_too_large() {
        let p = sine_then_one();
        assert!(mollify_profile(&p, 0.3).unwrap_err().is_input_error());
        assert!(mollify_profile(&p, -1.0).is_err());
    }
}
