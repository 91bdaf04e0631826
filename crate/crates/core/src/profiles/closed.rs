use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{Endpoint, Jet, Parity, ParityTag, ProfileKind, Repr, WarpProfile};
use crate::numerics::{Dd, Interval};
use crate::{Error, Result};

/// Analytic profile families with exact derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum ClosedForm {
    Constant {
        a: f64,
    },
    /// `a + b t`
    Linear {
        a: f64,
        b: f64,
    },
    /// `amp · sin(freq · t + phase)`
    Sine {
        amp: f64,
        freq: f64,
        phase: f64,
    },
    /// `amp · cos(freq · t + phase)`
    Cosine {
        amp: f64,
        freq: f64,
        phase: f64,
    },
    /// `Σ coeffs[k] t^k`
    Polynomial {
        coeffs: Vec<f64>,
    },
}

impl ClosedForm {
    pub fn jet(&self, t: f64) -> Jet {
        match self {
            ClosedForm::Constant { a } => Jet::new(*a, 0.0, 0.0),
            ClosedForm::Linear { a, b } => Jet::new(a + b * t, *b, 0.0),
            ClosedForm::Sine { amp, freq, phase } => {
                let (s, c) = (freq * t + phase).sin_cos();
                Jet::new(amp * s, amp * freq * c, -amp * freq * freq * s)
            }
            ClosedForm::Cosine { amp, freq, phase } => {
                let (s, c) = (freq * t + phase).sin_cos();
                Jet::new(amp * c, -amp * freq * s, -amp * freq * freq * c)
            }
            ClosedForm::Polynomial { coeffs } => {
                let (mut f, mut fp, mut fpp) = (0.0, 0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    fpp = fpp * t + 2.0 * fp;
                    fp = fp * t + f;
                    f = f * t + c;
                }
                Jet::new(f, fp, fpp)
            }
        }
    }

    /// The `k`-th derivative at `t`.
    pub fn derivative(&self, k: usize, t: f64) -> f64 {
        match self {
            ClosedForm::Constant { a } => {
                if k == 0 {
                    *a
                } else {
                    0.0
                }
            }
            ClosedForm::Linear { a, b } => match k {
                0 => a + b * t,
                1 => *b,
                _ => 0.0,
            },
            ClosedForm::Sine { amp, freq, phase } => {
                let theta = freq * t + phase + k as f64 * FRAC_PI_2;
                amp * freq.powi(k as i32) * theta.sin()
            }
            ClosedForm::Cosine { amp, freq, phase } => {
                let theta = freq * t + phase + k as f64 * FRAC_PI_2;
                amp * freq.powi(k as i32) * theta.cos()
            }
            ClosedForm::Polynomial { coeffs } => {
                coeffs
                    .iter()
                    .enumerate()
                    .skip(k)
                    .rev()
                    .fold(0.0, |acc, (j, &c)| {
                        let falling: f64 = (j - k + 1..=j).map(|i| i as f64).product();
                        acc * t + c * falling
                    })
            }
        }
    }

    pub fn value_dd(&self, t: Dd) -> Dd {
        match self {
            ClosedForm::Constant { a } => Dd::from_f64(*a),
            ClosedForm::Linear { a, b } => t * *b + *a,
            ClosedForm::Sine { amp, freq, phase } => (t * *freq + *phase).sin() * *amp,
            ClosedForm::Cosine { amp, freq, phase } => (t * *freq + *phase).cos() * *amp,
            ClosedForm::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(Dd::ZERO, |acc, &c| acc * t + c)
            }
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            ClosedForm::Constant { a } => a.is_finite(),
            ClosedForm::Linear { a, b } => a.is_finite() && b.is_finite(),
            ClosedForm::Sine { amp, freq, phase } | ClosedForm::Cosine { amp, freq, phase } => {
                amp.is_finite() && freq.is_finite() && phase.is_finite()
            }
            ClosedForm::Polynomial { coeffs } => {
                !coeffs.is_empty() && coeffs.iter().all(|c| c.is_finite())
            }
        }
    }
}

const ZERO_TOL: f64 = 1e-12;

/// Builds a closed-form profile, rejecting forms that are not positive on
/// the open interior of `domain`.
///
/// An endpoint where the function vanishes with `f'' = 0` is tagged odd; an
/// endpoint where `f' = 0` is tagged even.
pub fn closed_form_profile(form: ClosedForm, domain: Interval) -> Result<WarpProfile> {
    if !form.is_finite() {
        return Err(Error::input("closed-form parameters must be finite"));
    }
    if !(domain.lo.is_finite() && domain.hi.is_finite() && domain.lo < domain.hi) {
        return Err(Error::input(format!(
            "domain must be a non-degenerate finite interval, got [{}, {}]",
            domain.lo, domain.hi
        )));
    }
    let mut profile =
        WarpProfile::from_repr(domain, ProfileKind::ClosedForm, Repr::Closed(form.clone()));
    profile.check_positive_interior(1023)?;
    for end in [Endpoint::Left, Endpoint::Right] {
        let j = form.jet(profile.endpoint(end));
        let scale = 1.0 + j.fp.abs();
        if j.f.abs() <= ZERO_TOL * scale {
            if j.fpp.abs() > ZERO_TOL * scale || j.fp == 0.0 {
                return Err(Error::input(format!(
                    "profile vanishes at t = {} without odd closure data (f' = {}, f'' = {})",
                    profile.endpoint(end),
                    j.fp,
                    j.fpp
                )));
            }
            profile = profile.with_tag(
                end,
                ParityTag {
                    parity: Parity::Odd,
                    order: 2,
                    series: None,
                },
            );
        } else if j.f < 0.0 {
            return Err(Error::input(format!(
                "profile is negative at t = {}",
                profile.endpoint(end)
            )));
        } else if j.fp.abs() <= ZERO_TOL {
            profile = profile.with_tag(
                end,
                ParityTag {
                    parity: Parity::Even,
                    order: 1,
                    series: None,
                },
            );
        }
    }
    Ok(profile)
}

/// `√2 · sin(ν t)` on `[s, π/(4ν)]`; the outer boundary has radius 1.
pub fn neck_profile(nu: f64, s: f64) -> Result<WarpProfile> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::input(format!("ν must be positive, got {nu}")));
    }
    let outer = FRAC_PI_4 / nu;
    if !(s > 0.0 && s < outer) {
        return Err(Error::input(format!("s must lie in (0, {outer}), got {s}")));
    }
    closed_form_profile(
        ClosedForm::Sine {
            amp: SQRT_2,
            freq: nu,
            phase: 0.0,
        },
        Interval::new(s, outer),
    )
}

/// `R(t) = sin t` on `[0, π/2]`: odd at 0 with `R'(0) = 1`, even at `π/2`,
/// concave inside.
pub fn docking_r_profile() -> Result<WarpProfile> {
    closed_form_profile(
        ClosedForm::Sine {
            amp: 1.0,
            freq: 1.0,
            phase: 0.0,
        },
        Interval::new(0.0, FRAC_PI_2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_at_its_peak() {
        let p = closed_form_profile(
            ClosedForm::Sine {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
            Interval::new(0.0, PI),
        )
        .unwrap();
        let j = p.eval(FRAC_PI_2).unwrap();
        assert_eq!((j.f, j.fp.abs() < 1e-16, j.fpp), (1.0, true, -1.0));
        assert_eq!(p.parity_tag(Endpoint::Left).unwrap().parity, Parity::Odd);
        assert_eq!(p.parity_tag(Endpoint::Right).unwrap().parity, Parity::Odd);
    }

    #[test]
    fn flat_cone_profile() {
        let p = closed_form_profile(
            ClosedForm::Linear { a: 0.0, b: 1.0 },
            Interval::new(0.0, 5.0),
        )
        .unwrap();
        for t in [0.0, 0.3, 2.0, 5.0] {
            assert_eq!(p.eval(t).unwrap(), Jet::new(t, 1.0, 0.0));
        }
    }

    #[test]
    fn non_positive_forms_are_rejected() {
        let zero = closed_form_profile(ClosedForm::Constant { a: 0.0 }, Interval::new(0.0, 1.0));
        assert!(zero.unwrap_err().is_input_error());
        let neg = closed_form_profile(
            ClosedForm::Linear { a: 1.0, b: -2.0 },
            Interval::new(0.0, 1.0),
        );
        assert!(neg.is_err());
        let quad = closed_form_profile(
            ClosedForm::Polynomial {
                coeffs: vec![0.0, 1.0, 1.0],
            },
            Interval::new(0.0, 1.0),
        );
        assert!(quad.is_err());
    }

    #[test]
    fn polynomial_derivatives() {
        let f = ClosedForm::Polynomial {
            coeffs: vec![1.0, -2.0, 0.5, 3.0],
        };
        let j = f.jet(2.0);
        assert_eq!(j.f, 1.0 - 4.0 + 2.0 + 24.0);
        assert_eq!(j.fp, -2.0 + 2.0 + 36.0);
        assert_eq!(j.fpp, 1.0 + 36.0);
        assert_eq!(f.value_dd(Dd::from_f64(2.0)).to_f64(), 23.0);
        assert_eq!(f.derivative(2, 2.0), j.fpp);
        assert_eq!(f.derivative(3, 2.0), 18.0);
        assert_eq!(f.derivative(4, 2.0), 0.0);
    }

    #[test]
    fn neck_boundary_values() {
        let p = neck_profile(0.1, 0.5).unwrap();
        let outer = p.eval(p.domain().hi).unwrap();
        assert!((outer.f - 1.0).abs() < 1e-15);
        assert!((outer.fp / outer.f - 0.1).abs() < 1e-15);
        assert!(neck_profile(0.1, 0.0).is_err());
        assert!(neck_profile(0.1, 8.0).is_err());
        assert!(neck_profile(-0.1, 0.5).is_err());
    }

    #[test]
    fn docking_profile_tags() {
        let r = docking_r_profile().unwrap();
        assert_eq!(r.parity_tag(Endpoint::Left).unwrap().parity, Parity::Odd);
        assert_eq!(r.parity_tag(Endpoint::Right).unwrap().parity, Parity::Even);
        assert_eq!(r.eval(0.0).unwrap().fp, 1.0);
    }

    #[test]
    fn higher_derivatives_of_sine() {
        let f = ClosedForm::Sine {
            amp: 2.0,
            freq: 3.0,
            phase: 0.1,
        };
        let t = 0.4;
        let th = 3.0 * t + 0.1;
        assert!((f.derivative(3, t) + 54.0 * th.cos()).abs() < 1e-12);
        assert!((f.derivative(4, t) - 162.0 * th.sin()).abs() < 1e-12);
    }

    #[test]
    fn double_double_matches_f64() {
        let f = ClosedForm::Cosine {
            amp: 2.0,
            freq: 0.7,
            phase: 0.3,
        };
        for t in [0.0, 0.5, 1.7, 3.0] {
            let a = f.value_dd(Dd::from_f64(t)).to_f64();
            assert!((a - f.jet(t).f).abs() < 1e-15);
        }
    }
}
