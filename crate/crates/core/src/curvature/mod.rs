//! Ricci curvature, slice geometry and volume of multiply warped products
//! `dt² + Σ fᵢ(t)² gᵢ`.
//!
//! Two independent paths compute the Ricci tensor. [`ricci_components`]
//! evaluates the closed warped-product formulas from `(f, f', f'')`.
//! [`ricci_generic`] treats the metric as `dt² + h_t` with `h_t = Σ fᵢ² gᵢ`
//! and differentiates `aᵢ = fᵢ²` numerically, so it never sees the analytic
//! derivatives of the profiles.

mod boundary;
mod report;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::factors::FactorManifold;
use crate::numerics::{Dd, Interval};
use crate::profiles::{
    closed_form_profile, closure_check, ClosedForm, Endpoint, Jet, ParityReport, WarpProfile,
};
use crate::{Error, Result, T_MIN};

pub use boundary::{
    glue_check, second_fundamental_form, BoundaryBlock, BoundaryData, GlueBlock, GlueVerdict,
};
pub use report::{ricci_report, ricci_report_with, volume, ReportOptions, RicciReport};

/// One `(factor, profile)` pair of a warped product.
#[derive(Clone, Debug)]
pub struct Block {
    pub factor: FactorManifold,
    pub profile: WarpProfile,
}

impl Block {
    pub fn new(factor: FactorManifold, profile: WarpProfile) -> Self {
        Block { factor, profile }
    }
}

/// Marks an endpoint where the given block's profile vanishes smoothly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureTag {
    pub end: Endpoint,
    pub block: usize,
}

#[derive(Clone, Debug)]
pub struct MultiWarpedMetric {
    interval: Interval,
    blocks: Vec<Block>,
    closures: Vec<ClosureTag>,
}

const VANISH_TOL: f64 = 1e-12;

impl MultiWarpedMetric {
    pub fn new(interval: Interval, blocks: Vec<Block>, closures: Vec<ClosureTag>) -> Result<Self> {
        if !(interval.lo.is_finite() && interval.hi.is_finite() && interval.lo < interval.hi) {
            return Err(Error::input(format!(
                "interval must be non-degenerate and finite, got [{}, {}]",
                interval.lo, interval.hi
            )));
        }
        if blocks.is_empty() {
            return Err(Error::input("a warped product needs at least one block"));
        }
        for (i, b) in blocks.iter().enumerate() {
            b.factor.validate()?;
            let d = b.profile.domain();
            if !(d.contains_approx(interval.lo) && d.contains_approx(interval.hi)) {
                return Err(Error::input(format!(
                    "profile of block {i} is defined on [{}, {}], which does not contain [{}, {}]",
                    d.lo, d.hi, interval.lo, interval.hi
                )));
            }
        }
        for end in [Endpoint::Left, Endpoint::Right] {
            let t = match end {
                Endpoint::Left => interval.lo,
                Endpoint::Right => interval.hi,
            };
            let tagged: Vec<usize> = closures
                .iter()
                .filter(|c| c.end == end)
                .map(|c| c.block)
                .collect();
            if tagged.len() > 1 {
                return Err(Error::input(format!(
                    "at most one block may collapse at t = {t}"
                )));
            }
            for (i, b) in blocks.iter().enumerate() {
                let f = b.profile.eval(t)?.f;
                let vanishes = f.abs() <= VANISH_TOL;
                let is_tagged = tagged.contains(&i);
                if is_tagged && !vanishes {
                    return Err(Error::input(format!(
                        "block {i} is tagged as collapsing at t = {t} but f = {f}"
                    )));
                }
                if !is_tagged && !(f > 0.0) {
                    return Err(Error::input(format!(
                        "block {i} has f = {f} at t = {t} without a closure tag"
                    )));
                }
            }
            if let Some(&i) = tagged.first() {
                if i >= blocks.len() {
                    return Err(Error::input(format!("closure tag names missing block {i}")));
                }
            }
        }
        Ok(MultiWarpedMetric {
            interval,
            blocks,
            closures,
        })
    }

    /// The round unit sphere `S^n` as `dt² + sin²t g_{S^{n-1}}` on `[0, π]`.
    pub fn round_sphere(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::input(format!("need n >= 2, got {n}")));
        }
        let profile = closed_form_profile(
            ClosedForm::Sine {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
            Interval::new(0.0, PI),
        )?;
        MultiWarpedMetric::new(
            Interval::new(0.0, PI),
            vec![Block::new(
                FactorManifold::round_sphere(n - 1, 1.0)?,
                profile,
            )],
            vec![
                ClosureTag {
                    end: Endpoint::Left,
                    block: 0,
                },
                ClosureTag {
                    end: Endpoint::Right,
                    block: 0,
                },
            ],
        )
    }

    /// Flat `Rⁿ` as the cone `dt² + t² g_{S^{n-1}}` on `[0, radius]`.
    pub fn flat_cone(n: usize, radius: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::input(format!("need n >= 2, got {n}")));
        }
        let profile = closed_form_profile(
            ClosedForm::Linear { a: 0.0, b: 1.0 },
            Interval::new(0.0, radius),
        )?;
        MultiWarpedMetric::new(
            Interval::new(0.0, radius),
            vec![Block::new(
                FactorManifold::round_sphere(n - 1, 1.0)?,
                profile,
            )],
            vec![ClosureTag {
                end: Endpoint::Left,
                block: 0,
            }],
        )
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn closures(&self) -> &[ClosureTag] {
        &self.closures
    }

    pub fn total_dim(&self) -> usize {
        1 + self.blocks.iter().map(|b| b.factor.dim).sum::<usize>()
    }

    pub fn endpoint(&self, end: Endpoint) -> f64 {
        match end {
            Endpoint::Left => self.interval.lo,
            Endpoint::Right => self.interval.hi,
        }
    }

    pub fn closure_points(&self) -> Vec<f64> {
        self.closures.iter().map(|c| self.endpoint(c.end)).collect()
    }

    /// Smooth-closure certificates: at each tagged endpoint the collapsing
    /// profile must be odd with `|f'| = 1/r` for a round factor of radius
    /// `r` (slope 1 for abstract factors).
    pub fn closure_certificates(&self) -> Result<Vec<ParityReport>> {
        self.closures
            .iter()
            .map(|c| {
                let b = &self.blocks[c.block];
                let slope = b.factor.round_radius.map_or(1.0, |r| 1.0 / r);
                closure_check(&b.profile, c.end, slope)
            })
            .collect()
    }

    pub(crate) fn check_point(&self, t: f64) -> Result<()> {
        if !self.interval.contains_approx(t) || t.is_nan() {
            return Err(Error::OutOfDomain {
                t,
                lo: self.interval.lo,
                hi: self.interval.hi,
            });
        }
        for c in self.closure_points() {
            if (t - c).abs() < T_MIN * (1.0 - 1e-9) {
                return Err(Error::SingularPoint { t, closure: c });
            }
        }
        Ok(())
    }

    fn jets(&self, t: f64) -> Result<Vec<Jet>> {
        self.blocks.iter().map(|b| b.profile.eval(t)).collect()
    }
}

/// Ricci curvature at one slice: `Ric(∂t, ∂t)` and, per block, the interval
/// of `Ric(v/fᵢ, v/fᵢ)` over unit vectors `v` of the factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RicciComponents {
    pub t: f64,
    pub radial: f64,
    pub blocks: Vec<Interval>,
    /// Mixed terms vanish identically for block-diagonal families.
    pub mixed_zero: bool,
}

impl RicciComponents {
    /// Smallest component: `min(Ric(∂t,∂t), loᵢ)`.
    pub fn min(&self) -> f64 {
        self.blocks
            .iter()
            .fold(self.radial, |m, b| nan_min(m, b.lo))
    }

    /// Largest component: `max(Ric(∂t,∂t), hiᵢ)`.
    pub fn max(&self) -> f64 {
        self.blocks.iter().fold(self.radial, |m, b| {
            if m.is_nan() || b.hi.is_nan() {
                f64::NAN
            } else {
                m.max(b.hi)
            }
        })
    }
}

pub(crate) fn nan_min(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.min(b)
    }
}

/// Sum that does not depend on the order of the terms.
fn sum_sorted(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// `(ρ - k f'²)/f²`, factored as `k (q - f')(q + f')/f²` with `q = √(ρ/k)`
/// when that avoids cancellation.
fn intrinsic_term(rho: f64, k: f64, j: &Jet) -> f64 {
    if k > 0.0 && rho > 0.0 {
        let q = (rho / k).sqrt();
        k * (q - j.fp) * (q + j.fp) / (j.f * j.f)
    } else {
        (rho - k * j.fp * j.fp) / (j.f * j.f)
    }
}

/// Ricci components from the closed warped-product formulas.
pub fn ricci_components(metric: &MultiWarpedMetric, t: f64) -> Result<RicciComponents> {
    metric.check_point(t)?;
    let jets = metric.jets(t)?;
    let dims: Vec<f64> = metric.blocks.iter().map(|b| b.factor.dim as f64).collect();
    let radial = -sum_sorted(
        jets.iter()
            .zip(&dims)
            .map(|(j, n)| n * j.fpp / j.f)
            .collect(),
    );
    let blocks = metric
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let ji = &jets[i];
            let k = dims[i] - 1.0;
            let cross = sum_sorted(
                jets.iter()
                    .enumerate()
                    .filter(|&(l, _)| l != i)
                    .map(|(l, jl)| dims[l] * (ji.fp / ji.f) * (jl.fp / jl.f))
                    .collect(),
            );
            let common = -ji.fpp / ji.f - cross;
            let rho = b.factor.ricci;
            let lo = common + intrinsic_term(rho.lo, k, ji);
            let hi = if rho.is_point() {
                lo
            } else {
                common + intrinsic_term(rho.hi, k, ji)
            };
            Interval::new(lo, hi)
        })
        .collect();
    Ok(RicciComponents {
        t,
        radial,
        blocks,
        mixed_zero: true,
    })
}

fn value_dd(p: &WarpProfile, t: Dd) -> Dd {
    p.value_dd(t)
        .unwrap_or_else(|| Dd::from_f64(p.jet(t.to_f64()).f))
}

/// Ricci components of `dt² + h_t` with `h_t = Σ aᵢ(t) gᵢ`, `aᵢ = fᵢ²`,
/// from central differences of `aᵢ` with step `dt`:
///
/// - `Ric(∂t,∂t) = -½ Σ nᵢ aᵢ''/aᵢ + ¼ Σ nᵢ (aᵢ'/aᵢ)²`
/// - `Ric(v,v)/|v|² = ρ/aᵢ - ½ aᵢ''/aᵢ + ½ (aᵢ'/aᵢ)² - ¼ (aᵢ'/aᵢ) Σⱼ nⱼ aⱼ'/aⱼ`
///
/// The differences are taken in double-double arithmetic where the profile
/// supports it, so the result is limited by truncation rather than
/// cancellation.
pub fn ricci_generic(metric: &MultiWarpedMetric, t: f64, dt: f64) -> Result<RicciComponents> {
    metric.check_point(t)?;
    if !(dt > 0.0) {
        return Err(Error::input(format!("Δt must be positive, got {dt}")));
    }
    for b in &metric.blocks {
        let d = b.profile.domain();
        if !(d.contains_approx(t - dt) && d.contains_approx(t + dt)) {
            return Err(Error::input(format!(
                "t ± Δt = {} ± {dt} leaves the profile domain [{}, {}]",
                t, d.lo, d.hi
            )));
        }
    }
    let t0 = Dd::from_f64(t);
    let (tm, tp) = (t0 - dt, t0 + dt);
    let derivs: Vec<(f64, f64, f64)> = metric
        .blocks
        .iter()
        .map(|b| {
            let sq = |x: Dd| {
                let v = value_dd(&b.profile, x);
                v * v
            };
            let (am, a0, ap) = (sq(tm), sq(t0), sq(tp));
            let d1 = (ap - am) / (2.0 * dt);
            let d2 = (ap - a0 * 2.0 + am) / (dt * dt);
            (a0.to_f64(), d1.to_f64(), d2.to_f64())
        })
        .collect();
    let dims: Vec<f64> = metric.blocks.iter().map(|b| b.factor.dim as f64).collect();
    let logd: Vec<f64> = derivs.iter().map(|(a, a1, _)| a1 / a).collect();
    let trace = sum_sorted(dims.iter().zip(&logd).map(|(n, l)| n * l).collect());
    let radial = sum_sorted(
        derivs
            .iter()
            .zip(&dims)
            .zip(&logd)
            .map(|(((a, _, a2), n), l)| -0.5 * n * a2 / a + 0.25 * n * l * l)
            .collect(),
    );
    let blocks = metric
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let (a, _, a2) = derivs[i];
            let l = logd[i];
            let common = -0.5 * a2 / a + 0.5 * l * l - 0.25 * l * trace;
            let rho = b.factor.ricci;
            let lo = rho.lo / a + common;
            let hi = if rho.is_point() {
                lo
            } else {
                rho.hi / a + common
            };
            Interval::new(lo, hi)
        })
        .collect();
    Ok(RicciComponents {
        t,
        radial,
        blocks,
        mixed_zero: true,
    })
}

/// The same metric with distances divided by `r`: interval `/ r`, profiles
/// `t ↦ f(r t)/r`, factors unchanged. Ricci components at `t` of the result
/// equal `r²` times those of the original at `r t`.
pub fn rescale_metric(metric: &MultiWarpedMetric, r: f64) -> Result<MultiWarpedMetric> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::input(format!(
            "rescale factor must be positive, got {r}"
        )));
    }
    if r == 1.0 {
        return Ok(metric.clone());
    }
    let blocks = metric
        .blocks
        .iter()
        .map(|b| {
            Ok(Block {
                factor: b.factor.clone(),
                profile: b.profile.rescaled(r)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiWarpedMetric {
        interval: Interval::new(metric.interval.lo / r, metric.interval.hi / r),
        blocks,
        closures: metric.closures.clone(),
    })
}

#[cfg(test)]
mod tests;
