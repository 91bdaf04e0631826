use super::{sup, Check, Relation, ScenarioVerdict};
use crate::curvature::{
    glue_check, ricci_report_with, second_fundamental_form, Block, BoundaryData, MultiWarpedMetric,
    ReportOptions,
};
use crate::numerics::{linspace, Interval};
use crate::profiles::{collar_profile, COLLAR_SPAN};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CollarOptions {
    pub grid: usize,
    /// Length of the bending region; the profile is linear from `ramp` on.
    pub ramp: f64,
    /// The non-negativity sweep covers `[0, ramp · (1 + margin)]`.
    pub margin: f64,
    /// Strict positivity is required on `[0, near · ramp]`.
    pub near: f64,
    pub bisection_steps: usize,
    pub glue_tol: f64,
    pub lambda: f64,
}

impl Default for CollarOptions {
    fn default() -> Self {
        CollarOptions {
            grid: 1000,
            ramp: 1.0,
            margin: 0.5,
            near: 0.5,
            bisection_steps: 30,
            glue_tol: 1e-12,
            lambda: 0.0,
        }
    }
}

const HALVINGS: usize = 40;

fn validate(core: &BoundaryData, n: usize, opts: &CollarOptions) -> Result<()> {
    let [b] = core.blocks.as_slice() else {
        return Err(Error::input(
            "core boundary must have exactly one component",
        ));
    };
    if !b
        .induced
        .round_radius
        .is_some_and(|r| (r - 1.0).abs() <= 1e-12 && (b.radius - 1.0).abs() <= 1e-12)
    {
        return Err(Error::input("core boundary must be round of radius 1"));
    }
    if !(b.kappa > 0.0) {
        return Err(Error::input(format!(
            "core boundary must be strictly convex, κ = {}",
            b.kappa
        )));
    }
    if n < 2 || b.induced.dim != n - 1 {
        return Err(Error::input(format!(
            "core boundary has dimension {}, expected n - 1 = {}",
            b.induced.dim,
            n.saturating_sub(1)
        )));
    }
    if !(opts.margin > 0.0 && 1.0 + opts.margin <= COLLAR_SPAN) {
        return Err(Error::input(format!(
            "margin must lie in (0, {}], got {}",
            COLLAR_SPAN - 1.0,
            opts.margin
        )));
    }
    if !(opts.near > 0.0 && opts.near < 1.0) {
        return Err(Error::input(format!(
            "near must lie in (0, 1), got {}",
            opts.near
        )));
    }
    Ok(())
}

/// Checks one collar `dt² + f_c(t)² g` attached to the core boundary: strict
/// positive Ricci near the boundary, non-negative Ricci through the linear
/// part, and a positive sum of second fundamental forms at the seam.
pub fn collar_candidate(
    core: &BoundaryData,
    c: f64,
    n: usize,
    opts: &CollarOptions,
) -> Result<ScenarioVerdict> {
    validate(core, n, opts)?;
    let ramp = opts.ramp;
    let profile = collar_profile(c, ramp)?;
    let hi = ramp * (1.0 + opts.margin);
    let metric = MultiWarpedMetric::new(
        Interval::new(0.0, hi),
        vec![Block::new(core.blocks[0].induced.clone(), profile.clone())],
        vec![],
    )?;

    let mut v = ScenarioVerdict::new("closability");
    v.metric("c", c);
    v.tolerance("glue_tol", opts.glue_tol);

    let mut near = ReportOptions::new(opts.grid, Some(opts.lambda));
    near.range = Some(Interval::new(0.0, opts.near * ramp));
    near.strict = true;
    let near = ricci_report_with(&metric, &near)?;
    v.metric("near_boundary_min", near.global_min);
    v.push(Check::new(
        "near_boundary_positive",
        "positive Ricci curvature near the boundary",
        near.global_min,
        Relation::Above,
        opts.lambda,
    ));
    v.report("near_boundary", near);

    let all = ricci_report_with(&metric, &ReportOptions::new(opts.grid, Some(opts.lambda)))?;
    v.metric("collar_min", all.global_min);
    v.tolerance("collar_slack", all.slack);
    v.push(Check::new(
        "collar_nonnegative",
        "non-negative Ricci curvature along the collar",
        all.global_min,
        Relation::AtLeast,
        opts.lambda - all.slack,
    ));
    v.report("collar", all);

    let seam = second_fundamental_form(&metric, 0.0, -1.0)?;
    let glued = glue_check(core, &seam, opts.glue_tol);
    v.metric("collar_kappa", seam.blocks[0].kappa);
    v.metric("glue_sum", glued.ii_sum_min);
    v.push(Check::flag(
        "seam_isometry",
        "the collar starts on a copy of the core boundary",
        glued.isometry_ok,
    ));
    v.push(Check::new(
        "glue_sum",
        "sum of second fundamental forms at the seam is positive",
        glued.ii_sum_min,
        Relation::Above,
        0.0,
    ));

    let mut slope_gap = Vec::new();
    for t in linspace(ramp, hi, 101) {
        slope_gap.push(profile.eval(t)?.fp - c);
    }
    let c0 = profile.eval(ramp)?.f - c * ramp;
    v.metric("c0", c0);
    v.push(Check::new(
        "linear_end",
        "dt^2 + (ct + c0)^2 g beyond the bending region",
        sup(slope_gap),
        Relation::AtMost,
        0.0,
    ));
    v.profile("collar", profile);
    Ok(v)
}

/// Largest `c ∈ (0, c_max]` whose collar passes [`collar_candidate`], found
/// by halving down from `c_max` until a candidate passes and then bisecting
/// between the last pass and the first failure.
pub fn collar_closability(
    core: &BoundaryData,
    c_max: f64,
    n: usize,
    opts: &CollarOptions,
) -> Result<ScenarioVerdict> {
    if !(c_max > 0.0) || !c_max.is_finite() {
        return Err(Error::input(format!("c_max must be positive, got {c_max}")));
    }
    let mut best = collar_candidate(core, c_max, n, opts)?;
    let (mut lo, mut hi) = (c_max, c_max);
    let mut evaluations = 1;
    if !best.overall_pass {
        let mut found = None;
        for k in 1..=HALVINGS {
            let c = c_max / 2f64.powi(k as i32);
            let cand = collar_candidate(core, c, n, opts)?;
            evaluations += 1;
            if cand.overall_pass {
                found = Some((c, cand));
                break;
            }
            best = cand;
        }
        let Some((c, cand)) = found else {
            return Err(Error::SearchFailure {
                message: format!(
                    "no collar slope in [{:e}, {c_max}] certifies",
                    c_max / 2f64.powi(HALVINGS as i32)
                ),
                diagnostics: Box::new(best),
            });
        };
        (lo, hi) = (c, 2.0 * c);
        best = cand;
        for _ in 0..opts.bisection_steps {
            let mid = 0.5 * (lo + hi);
            let cand = collar_candidate(core, mid, n, opts)?;
            evaluations += 1;
            if cand.overall_pass {
                lo = mid;
                best = cand;
            } else {
                hi = mid;
            }
        }
    }
    best.metric("c_star", lo);
    best.metric("c_first_failure", hi);
    best.metric("candidates", evaluations as f64);
    best.note(
        "search",
        "halving from c_max, then bisection; assumes the certified set is an interval (0, c*]",
    );
    Ok(best)
}
