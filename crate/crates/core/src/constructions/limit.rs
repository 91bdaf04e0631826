use std::f64::consts::FRAC_PI_2;

use super::{max_of, min_of, Check, Relation, ScenarioVerdict};
use crate::curvature::{
    glue_check, ricci_report_with, second_fundamental_form, volume, Block, BoundaryData,
    ClosureTag, MultiWarpedMetric, ReportOptions,
};
use crate::factors::FactorManifold;
use crate::numerics::{unit_sphere_volume, Interval};
use crate::profiles::{closed_form_profile, ClosedForm, Endpoint};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LimitOptions {
    pub grid: usize,
    /// Ricci target; defaults to `n - 2`.
    pub lambda: Option<f64>,
    /// Relative slack on the volume cap.
    pub volume_slack: f64,
    /// Judge the family after the single rescaling that brings its Ricci
    /// minimum to the target.
    pub allow_rescale: bool,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            grid: 2000,
            lambda: None,
            volume_slack: 1e-9,
            allow_rescale: false,
        }
    }
}

/// Checks the hypotheses on a family of `(n-1)`-dimensional cross sections
/// for the non-collapsed limit construction: volume at most
/// `Vol(S^{n-1}(1))`, `Ric ≥ n - 2`, and a closability certificate attached
/// to the member at `closable_index`.
///
/// The family's volume range and the factor that would cap it are reported
/// but no normalization is imposed.
pub fn limit_space_hypotheses(
    family: &[MultiWarpedMetric],
    n: usize,
    closable_index: usize,
    certificate: Option<&ScenarioVerdict>,
    opts: &LimitOptions,
) -> Result<ScenarioVerdict> {
    if n < 3 {
        return Err(Error::input(format!("need n >= 3, got {n}")));
    }
    if family.is_empty() {
        return Err(Error::input("the family is empty"));
    }
    if let Some((i, m)) = family
        .iter()
        .enumerate()
        .find(|(_, m)| m.total_dim() != n - 1)
    {
        return Err(Error::input(format!(
            "member {i} has dimension {}, expected n - 1 = {}",
            m.total_dim(),
            n - 1
        )));
    }
    if closable_index >= family.len() {
        return Err(Error::input(format!(
            "closable index {closable_index} is out of range for {} members",
            family.len()
        )));
    }
    let Some(certificate) = certificate else {
        return Err(Error::MissingData(format!(
            "member {closable_index} has no closability certificate"
        )));
    };

    let target = opts.lambda.unwrap_or(n as f64 - 2.0);
    let dim = (n - 1) as f64;
    let cap = unit_sphere_volume(n - 1);
    let mut v = ScenarioVerdict::new("limit-space");
    v.note("n", n.to_string());
    v.note("members", family.len().to_string());
    v.note("closable_member", closable_index.to_string());
    v.note("closability_certificate", certificate.scenario.clone());
    v.tolerance("volume_slack", opts.volume_slack);
    v.metric("lambda", target);
    v.metric("volume_cap", cap);

    let mut volumes = Vec::with_capacity(family.len());
    let mut minima = Vec::with_capacity(family.len());
    for (i, m) in family.iter().enumerate() {
        let vol = volume(m)?;
        let report = ricci_report_with(m, &ReportOptions::new(opts.grid, Some(target)))?;
        v.metric(format!("member{i}_volume"), vol);
        v.metric(format!("member{i}_ricci_min"), report.global_min);
        volumes.push(vol);
        minima.push(report.global_min);
        v.report(format!("member{i}"), report);
    }
    let (vol_min, vol_max) = (
        min_of(volumes.iter().copied()),
        max_of(volumes.iter().copied()),
    );
    let ric_min = min_of(minima);
    v.metric("volume_min", vol_min);
    v.metric("volume_max", vol_max);
    v.metric("volume_spread", vol_max - vol_min);
    v.metric("volume_cap_factor", (cap / vol_max).powf(2.0 / dim));
    v.metric("ricci_min", ric_min);

    let scale = if opts.allow_rescale && ric_min > 0.0 && target > 0.0 {
        ric_min / target
    } else {
        1.0
    };
    v.metric("rescale_factor", scale);
    let scaled_vol_max = vol_max * scale.powf(dim / 2.0);
    let scaled_ric_min = ric_min / scale;
    let ric_slack = 1e-8 * target.abs().max(1.0);
    v.tolerance("ricci_slack", ric_slack);
    v.push(Check::new(
        "volume_bound",
        "Vol(X, g_s) <= Vol(S^(n-1))",
        scaled_vol_max,
        Relation::AtMost,
        cap * (1.0 + opts.volume_slack),
    ));
    v.push(Check::new(
        "ricci_bound",
        "Ric(g_s) >= n - 2",
        scaled_ric_min,
        Relation::AtLeast,
        target - ric_slack,
    ));
    v.push(Check::flag(
        "closable",
        "the closable member carries a passing closability certificate",
        certificate.overall_pass,
    ));
    Ok(v)
}

/// Wraps [`glue_check`] as a scenario.
pub fn boundary_gluing(b1: &BoundaryData, b2: &BoundaryData, tol: f64) -> ScenarioVerdict {
    let g = glue_check(b1, b2, tol);
    let mut v = ScenarioVerdict::new("glue");
    v.tolerance("glue_tol", tol);
    v.metric("ii_sum_min", g.ii_sum_min);
    v.metric(
        "radius_residual_max",
        max_of(g.blocks.iter().map(|b| b.radius_residual)),
    );
    v.push(Check::flag(
        "isometry",
        "there is an isometry between the boundaries",
        g.isometry_ok,
    ));
    v.push(Check::new(
        "ii_sum",
        "the sum of second fundamental forms is non-negative",
        g.ii_sum_min,
        Relation::AtLeast,
        -tol,
    ));
    v
}

/// The round hemisphere `dt² + sin²t g_{S^{n-1}}` on `[0, π/2]` glued to a
/// copy of itself along the equator.
pub fn hemisphere_doubling(n: usize, tol: f64) -> Result<ScenarioVerdict> {
    if n < 2 {
        return Err(Error::input(format!("need n >= 2, got {n}")));
    }
    let sine = closed_form_profile(
        ClosedForm::Sine {
            amp: 1.0,
            freq: 1.0,
            phase: 0.0,
        },
        Interval::new(0.0, FRAC_PI_2),
    )?;
    let half = MultiWarpedMetric::new(
        Interval::new(0.0, FRAC_PI_2),
        vec![Block::new(FactorManifold::round_sphere(n - 1, 1.0)?, sine)],
        vec![ClosureTag {
            end: Endpoint::Left,
            block: 0,
        }],
    )?;
    let a = second_fundamental_form(&half, FRAC_PI_2, 1.0)?;
    let b = second_fundamental_form(&half, FRAC_PI_2, -1.0)?;
    let mut v = boundary_gluing(&a, &b, tol);
    v.scenario = "hemisphere-doubling".into();
    v.note("n", n.to_string());
    Ok(v)
}
