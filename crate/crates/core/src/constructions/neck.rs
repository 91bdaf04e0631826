use std::f64::consts::{FRAC_PI_4, SQRT_2};

use super::{max_of, min_of, sup, CertifiedBlock, Check, Relation, ScenarioVerdict};
use crate::curvature::{
    glue_check, ricci_report_with, second_fundamental_form, volume, Block, MultiWarpedMetric,
    ReportOptions,
};
use crate::factors::FactorManifold;
use crate::numerics::{linspace, Interval};
use crate::profiles::neck_profile;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NeckOptions {
    pub grid: usize,
    /// Replaces the certified `δ` as the Ricci target of every member.
    pub lambda: Option<f64>,
    /// Tolerance on the closed-form boundary values.
    pub boundary_tol: f64,
}

impl Default for NeckOptions {
    fn default() -> Self {
        NeckOptions {
            grid: 2000,
            lambda: None,
            boundary_tol: 1e-10,
        }
    }
}

/// The neck family `dt² + 2 sin²(νt) g_{S^{n-1}}` on `[s, π/(4ν)]`.
///
/// Certifies one `δ > 0` bounding Ricci below for every `s`, the outer
/// boundary (radius 1, principal curvature `ν`), gluing to the core rescaled
/// to the inner radius `√2 sin(νs)`, and a uniform lower volume bound.
pub fn neck_family_check(
    nu: f64,
    n: usize,
    s_values: &[f64],
    core: &CertifiedBlock,
    opts: &NeckOptions,
) -> Result<ScenarioVerdict> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::input(format!("ν must be positive, got {nu}")));
    }
    if n < 3 {
        return Err(Error::input(format!("need n >= 3, got {n}")));
    }
    if s_values.is_empty() {
        return Err(Error::input("need at least one value of s"));
    }
    let outer = FRAC_PI_4 / nu;
    if let Some(s) = s_values.iter().find(|&&s| !(s > 0.0 && s < outer)) {
        return Err(Error::input(format!("s = {s} is outside (0, {outer})")));
    }
    let Some(core_block) = core.round_boundary(1.0) else {
        return Err(Error::input(format!(
            "core {} must have a single round boundary of radius 1",
            core.label
        )));
    };
    if core_block.induced.dim != n - 1 {
        return Err(Error::input(format!(
            "core boundary has dimension {}, expected {}",
            core_block.induced.dim,
            n - 1
        )));
    }
    if core_block.kappa < 2.0 * nu - 1e-12 {
        return Err(Error::input(format!(
            "core principal curvature {} is below 2ν = {}",
            core_block.kappa,
            2.0 * nu
        )));
    }

    let mut v = ScenarioVerdict::new("neck");
    v.note("nu", nu.to_string());
    v.note("n", n.to_string());
    v.note("core", format!("{}: {}", core.label, core.note));
    v.tolerance("boundary_tol", opts.boundary_tol);

    let sphere = FactorManifold::round_sphere(n - 1, 1.0)?;
    let mut members = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let profile = neck_profile(nu, s)?;
        let metric = MultiWarpedMetric::new(
            Interval::new(s, outer),
            vec![Block::new(sphere.clone(), profile.clone())],
            vec![],
        )?;
        let report = ricci_report_with(&metric, &ReportOptions::new(opts.grid, None))?;
        members.push((s, profile, metric, report));
    }

    let family_min = min_of(members.iter().map(|m| m.3.global_min));
    let slack = 1e-8 * family_min.abs().max(1.0);
    let delta = family_min - slack;
    let target = opts.lambda.unwrap_or(delta);
    v.metric("delta", delta);
    v.tolerance("delta_slack", slack);
    v.push(Check::new(
        "delta_positive",
        "Ricci bounded below by a positive constant independent of s",
        delta,
        Relation::Above,
        0.0,
    ));

    let mut member_ok = true;
    let (mut outer_radius, mut outer_kappa, mut inner_kappa) = (vec![], vec![], vec![]);
    let (mut glue_ok, mut ii_sums, mut volumes, mut core_radii) = (true, vec![], vec![], vec![]);
    for (s, profile, metric, report) in members {
        let report = report.judged(target);
        member_ok &= report.passed();
        v.metric(format!("global_min_s_{s}"), report.global_min);
        v.report(format!("ricci_s_{s}"), report);

        let out = second_fundamental_form(&metric, outer, 1.0)?;
        outer_radius.push(out.blocks[0].radius - 1.0);
        outer_kappa.push(out.blocks[0].kappa - nu);

        let inner = second_fundamental_form(&metric, s, -1.0)?;
        let r_s = inner.blocks[0].radius;
        let rescaled = inner.blocks[0].kappa * r_s;
        v.metric(format!("inner_rescaled_kappa_s_{s}"), rescaled);
        inner_kappa.push(rescaled + SQRT_2 * nu * (nu * s).cos());
        core_radii.push((s, r_s));

        let glued = glue_check(&core.boundary.scaled(r_s)?, &inner, opts.boundary_tol);
        glue_ok &= glued.isometry_ok;
        ii_sums.push(glued.ii_sum_min * r_s);
        let vol = volume(&metric)?;
        v.metric(format!("volume_s_{s}"), vol);
        volumes.push(vol);
        v.profile(format!("neck_s_{s}"), profile);
    }
    v.metric("lambda", target);
    v.push(Check::flag(
        "ricci_all_members",
        "every member has Ric >= delta",
        member_ok,
    ));
    v.push(Check::new(
        "outer_radius",
        "the outer boundary is round of radius 1",
        sup(outer_radius),
        Relation::AtMost,
        opts.boundary_tol,
    ));
    v.push(Check::new(
        "outer_kappa",
        "outer principal curvatures equal nu",
        sup(outer_kappa),
        Relation::AtMost,
        opts.boundary_tol,
    ));
    v.push(Check::new(
        "inner_kappa",
        "rescaled inner principal curvature equals -sqrt(2) nu cos(nu s)",
        sup(inner_kappa),
        Relation::AtMost,
        opts.boundary_tol,
    ));
    v.push(Check::flag(
        "inner_isometry",
        "the rescaled core boundary is isometric to the inner boundary",
        glue_ok,
    ));
    let worst_sum = min_of(ii_sums);
    v.metric("rescaled_ii_sum_min", worst_sum);
    v.push(Check::new(
        "inner_ii_sum",
        "core and neck second fundamental forms sum to a positive form",
        worst_sum,
        Relation::Above,
        0.0,
    ));
    v.push(Check::new(
        "inner_kappa_above_minus_2nu",
        "-sqrt(2) nu cos(nu s) > -2 nu",
        min_of(
            s_values
                .iter()
                .map(|&s| -SQRT_2 * nu * (nu * s).cos() + 2.0 * nu),
        ),
        Relation::Above,
        0.0,
    ));
    let vol_min = min_of(volumes);
    v.metric("volume_lower_bound", vol_min);
    v.push(Check::new(
        "volume_lower_bound",
        "neck volumes are bounded below independently of s",
        vol_min,
        Relation::Above,
        0.0,
    ));

    // Convergence mechanism: the core radius shrinks with s, and each neck
    // is the limit profile √2 sin(νt) restricted to its domain.
    core_radii.sort_by(|a, b| b.0.total_cmp(&a.0));
    let shrink = max_of(core_radii.windows(2).map(|w| w[1].1 - w[0].1));
    v.metric("core_radius_min", min_of(core_radii.iter().map(|c| c.1)));
    if core_radii.len() >= 2 {
        v.push(Check::new(
            "core_radius_shrinks",
            "core boundary radius sqrt(2) sin(nu s) decreases to 0 with s",
            shrink,
            Relation::Below,
            0.0,
        ));
    }
    let mut profile_gap = Vec::new();
    for (_, p) in &v.profiles {
        let d = p.domain();
        for t in linspace(d.lo, d.hi, 257) {
            profile_gap.push(p.eval(t)?.f - SQRT_2 * (nu * t).sin());
        }
    }
    let gap = sup(profile_gap);
    v.metric("limit_profile_gap", gap);
    v.push(Check::new(
        "limit_profile",
        "necks converge to sqrt(2) sin(nu t) on the shared domain",
        gap,
        Relation::AtMost,
        1e-12,
    ));
    Ok(v)
}
