//! Warping functions: positive functions of `t` with first and second
//! derivatives, endpoint parity data, and provenance.
//!
//! Every profile is immutable once built and evaluation is a pure function
//! of `t`, so profiles can be shared freely across threads.

mod closed;
mod ivp;
mod parity;
mod smooth;
mod splice;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::numerics::{linspace, series, Dd, Interval};
use crate::{Error, Result, T_MIN};

pub use closed::{closed_form_profile, docking_r_profile, neck_profile, ClosedForm};
pub use ivp::{
    closability_inequality, closability_ode_profile, sha_yang_profiles, solve_ivp_profile,
    DenseSolution, SecondOrderRhs, ShaYangProfiles,
};
pub use parity::{closure_check, parity_check, ParityCondition, ParityReport};
pub use smooth::{collar_profile, k_profile, COLLAR_SPAN};
pub use splice::{mollify_profile, splice_profiles};

/// Value and first two derivatives of a profile at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
}

impl Jet {
    pub const fn new(f: f64, fp: f64, fpp: f64) -> Self {
        Jet { f, fp, fpp }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    ClosedForm,
    IvpSolution,
    Spliced,
    Mollified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Left,
    Right,
}

impl Endpoint {
    fn index(self) -> usize {
        match self {
            Endpoint::Left => 0,
            Endpoint::Right => 1,
        }
    }
}

/// Parity metadata at one endpoint.
///
/// `series`, when present, holds Taylor coefficients in powers of
/// `(t - t*)`. At an odd endpoint, evaluation closer than [`T_MIN`] uses it
/// instead of the underlying representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityTag {
    pub parity: Parity,
    pub order: u8,
    pub series: Option<Vec<f64>>,
}

/// A point where two pieces were attached; `f''` may jump there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub t: f64,
    pub fpp_jump: f64,
    /// Set once the joint has been mollified.
    pub smoothed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub tol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    /// End point that was asked for; differs from the domain end when the
    /// integration had to be truncated.
    pub requested_end: f64,
    pub stop_reason: Option<String>,
}

#[derive(Clone)]
pub(crate) enum Repr {
    Closed(ClosedForm),
    Ivp(Arc<DenseSolution>),
    /// `scale · f'` for the solution `f`.
    IvpDerivative {
        sol: Arc<DenseSolution>,
        scale: f64,
    },
    /// `k(t) = eps · ∫₀^{t/eps} φ`, `φ(x) = exp(1 - 1/(1 - x²))`.
    FlatStep {
        eps: f64,
    },
    /// `f' = c (1 + ψ(t/ramp))`, `ψ(x) = exp(1 - 1/(1 - x))`, `f(0) = 1`.
    Collar {
        c: f64,
        ramp: f64,
    },
    Spliced {
        left: WarpProfile,
        right: WarpProfile,
        at: f64,
    },
    Mollified {
        base: WarpProfile,
        width: f64,
        joints: Vec<f64>,
    },
    /// `t ↦ f(r t) / r`.
    Rescaled {
        base: WarpProfile,
        r: f64,
    },
}

#[derive(Clone)]
pub struct WarpProfile {
    domain: Interval,
    kind: ProfileKind,
    repr: Arc<Repr>,
    parity: [Option<ParityTag>; 2],
    solver_meta: Option<SolverMeta>,
    joints: Vec<Joint>,
}

impl fmt::Debug for WarpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpProfile")
            .field("domain", &self.domain)
            .field("kind", &self.kind)
            .field("parity", &self.parity)
            .field("joints", &self.joints)
            .field("solver_meta", &self.solver_meta)
            .finish()
    }
}

impl WarpProfile {
    pub(crate) fn from_repr(domain: Interval, kind: ProfileKind, repr: Repr) -> Self {
        WarpProfile {
            domain,
            kind,
            repr: Arc::new(repr),
            parity: [None, None],
            solver_meta: None,
            joints: Vec::new(),
        }
    }

    pub(crate) fn with_tag(mut self, end: Endpoint, tag: ParityTag) -> Self {
        self.parity[end.index()] = Some(tag);
        self
    }

    pub(crate) fn with_meta(mut self, meta: SolverMeta) -> Self {
        self.solver_meta = Some(meta);
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn parity_tag(&self, end: Endpoint) -> Option<&ParityTag> {
        self.parity[end.index()].as_ref()
    }

    pub fn solver_meta(&self) -> Option<&SolverMeta> {
        self.solver_meta.as_ref()
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn endpoint(&self, end: Endpoint) -> f64 {
        match end {
            Endpoint::Left => self.domain.lo,
            Endpoint::Right => self.domain.hi,
        }
    }

    /// Evaluates `(f, f', f'')` at `t`, which must lie in the domain.
    pub fn eval(&self, t: f64) -> Result<Jet> {
        if !self.domain.contains_approx(t) || t.is_nan() {
            return Err(Error::OutOfDomain {
                t,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(self.jet(t.clamp(self.domain.lo, self.domain.hi)))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.eval(t).map(|j| j.f)
    }

    pub(crate) fn jet(&self, t: f64) -> Jet {
        for end in [Endpoint::Left, Endpoint::Right] {
            if let Some(ParityTag {
                parity: Parity::Odd,
                series: Some(c),
                ..
            }) = &self.parity[end.index()]
            {
                let d = t - self.endpoint(end);
                if d.abs() < T_MIN {
                    let (f, fp, fpp) = series::eval3(c, d);
                    return Jet::new(f, fp, fpp);
                }
            }
        }
        self.repr.jet(t)
    }

    /// The value `f(t)` in double-double precision, for representations that
    /// support it (closed forms and their rescalings).
    pub fn value_dd(&self, t: Dd) -> Option<Dd> {
        self.repr.value_dd(t)
    }

    pub(crate) fn exact_derivatives(&self, t: f64) -> Option<[f64; 6]> {
        self.repr.derivatives(t)
    }

    /// The same function on a sub-interval.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<WarpProfile> {
        let sub = Interval::new(lo, hi);
        if !(lo < hi) || !self.domain.contains_interval(&sub) {
            return Err(Error::input(format!(
                "[{lo}, {hi}] is not a sub-interval of [{}, {}]",
                self.domain.lo, self.domain.hi
            )));
        }
        let keep_left = lo == self.domain.lo;
        let keep_right = hi == self.domain.hi;
        Ok(WarpProfile {
            domain: sub,
            kind: self.kind,
            repr: Arc::clone(&self.repr),
            parity: [
                self.parity[0].clone().filter(|_| keep_left),
                self.parity[1].clone().filter(|_| keep_right),
            ],
            solver_meta: self.solver_meta.clone(),
            joints: self
                .joints
                .iter()
                .copied()
                .filter(|j| lo < j.t && j.t < hi)
                .collect(),
        })
    }

    /// `t ↦ f(r t) / r` on `domain / r`: the profile of the metric with all
    /// distances divided by `r`.
    pub fn rescaled(&self, r: f64) -> Result<WarpProfile> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::input(format!(
                "rescale factor must be positive, got {r}"
            )));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        let rescale_tag = |tag: &Option<ParityTag>| {
            tag.as_ref().map(|t| ParityTag {
                parity: t.parity,
                order: t.order,
                series: t.series.as_ref().map(|c| {
                    c.iter()
                        .enumerate()
                        .map(|(k, ck)| ck * r.powi(k as i32 - 1))
                        .collect()
                }),
            })
        };
        Ok(WarpProfile {
            domain: Interval::new(self.domain.lo / r, self.domain.hi / r),
            kind: self.kind,
            repr: Arc::new(Repr::Rescaled {
                base: self.clone(),
                r,
            }),
            parity: [rescale_tag(&self.parity[0]), rescale_tag(&self.parity[1])],
            solver_meta: self.solver_meta.clone(),
            joints: self
                .joints
                .iter()
                .map(|j| Joint {
                    t: j.t / r,
                    fpp_jump: j.fpp_jump * r,
                    smoothed: j.smoothed,
                })
                .collect(),
        })
    }

    /// `n` uniformly spaced samples over the whole domain.
    pub fn sample(&self, n: usize) -> Vec<(f64, Jet)> {
        linspace(self.domain.lo, self.domain.hi, n)
            .into_iter()
            .map(|t| (t, self.jet(t)))
            .collect()
    }

    /// Largest deviation of `f'` and `f''` from central differences of `f`
    /// and `f'` with step `dt`, over `n` interior points.
    pub fn derivative_residuals(&self, dt: f64, n: usize) -> (f64, f64) {
        let lo = self.domain.lo + dt;
        let hi = self.domain.hi - dt;
        let mut worst = (0.0f64, 0.0f64);
        for t in linspace(lo, hi, n) {
            let (m, c, p) = (self.jet(t - dt), self.jet(t), self.jet(t + dt));
            let d1 = (p.f - m.f) / (2.0 * dt);
            let d2 = (p.fp - m.fp) / (2.0 * dt);
            worst.0 = worst.0.max((c.fp - d1).abs());
            worst.1 = worst.1.max((c.fpp - d2).abs());
        }
        worst
    }

    /// Checks positivity on `n` strictly interior sample points.
    pub(crate) fn check_positive_interior(&self, n: usize) -> Result<()> {
        let Interval { lo, hi } = self.domain;
        for i in 1..=n {
            let t = lo + (hi - lo) * i as f64 / (n + 1) as f64;
            let f = self.jet(t).f;
            if !(f > 0.0) {
                return Err(Error::input(format!(
                    "profile is not positive on the interior: f({t}) = {f}"
                )));
            }
        }
        Ok(())
    }
}

impl Repr {
    fn jet(&self, t: f64) -> Jet {
        match self {
            Repr::Closed(c) => c.jet(t),
            Repr::Ivp(sol) => sol.jet(t),
            Repr::IvpDerivative { sol, scale } => {
                let j = sol.jet(t);
                let third = sol.third_derivative(t, &j);
                Jet::new(scale * j.fp, scale * j.fpp, scale * third)
            }
            Repr::FlatStep { eps } => smooth::flat_step_jet(*eps, t),
            Repr::Collar { c, ramp } => smooth::collar_jet(*c, *ramp, t),
            Repr::Spliced { left, right, at } => {
                if t <= *at {
                    left.jet(t)
                } else {
                    right.jet(t)
                }
            }
            Repr::Mollified {
                base,
                width,
                joints,
            } => splice::mollified_jet(base, *width, joints, t),
            Repr::Rescaled { base, r } => {
                let j = base.jet(r * t);
                Jet::new(j.f / r, j.fp, j.fpp * r)
            }
        }
    }

    /// `f, f', …, f^(5)` at `t` when the representation knows them exactly.
    fn derivatives(&self, t: f64) -> Option<[f64; 6]> {
        match self {
            Repr::Closed(c) => {
                let mut d = [0.0; 6];
                for (k, dk) in d.iter_mut().enumerate() {
                    *dk = c.derivative(k, t);
                }
                Some(d)
            }
            Repr::FlatStep { eps } => smooth::flat_step_endpoint(*eps, t),
            Repr::Rescaled { base, r } => base.repr.derivatives(r * t).map(|d| {
                let mut out = d;
                for (k, dk) in out.iter_mut().enumerate() {
                    *dk = d[k] * r.powi(k as i32 - 1);
                }
                out
            }),
            _ => None,
        }
    }

    fn value_dd(&self, t: Dd) -> Option<Dd> {
        match self {
            Repr::Closed(c) => Some(c.value_dd(t)),
            Repr::Rescaled { base, r } => base.value_dd(t * *r).map(|v| v / *r),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine() -> WarpProfile {
        closed_form_profile(
            ClosedForm::Sine {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
            Interval::new(0.0, PI),
        )
        .unwrap()
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let p = sine();
        assert!(matches!(p.eval(4.0), Err(Error::OutOfDomain { .. })));
        assert!(p.eval(f64::NAN).is_err());
        assert!(p.eval(PI).is_ok());
    }

    #[test]
    fn restriction_keeps_values_and_drops_tags() {
        let p = sine();
        let r = p.restrict(0.5, 2.0).unwrap();
        assert_eq!(r.eval(1.0).unwrap(), p.eval(1.0).unwrap());
        assert!(r.parity_tag(Endpoint::Left).is_none());
        assert!(p.restrict(-1.0, 1.0).is_err());
        let keep = p.restrict(0.0, 1.0).unwrap();
        assert!(keep.parity_tag(Endpoint::Left).is_some());
    }

    #[test]
    fn rescaling_law() {
        let p = sine();
        let r = p.rescaled(0.5).unwrap();
        assert_eq!(r.domain(), Interval::new(0.0, 2.0 * PI));
        let a = r.eval(2.0).unwrap();
        let b = p.eval(1.0).unwrap();
        assert!((a.f - b.f / 0.5).abs() < 1e-15);
        assert!((a.fp - b.fp).abs() < 1e-15);
        assert!((a.fpp - 0.5 * b.fpp).abs() < 1e-15);
    }

    #[test]
    fn finite_differences_converge_at_second_order() {
        let p = sine();
        let (a1, a2) = p.derivative_residuals(1e-2, 50);
        let (b1, b2) = p.derivative_residuals(5e-3, 50);
        assert!(a1 / b1 > 3.5 && a2 / b2 > 3.5, "{a1} {b1} {a2} {b2}");
    }
}
