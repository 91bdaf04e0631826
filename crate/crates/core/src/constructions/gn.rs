use super::{max_of, min_of, sup, CertifiedBlock, Check, Relation, ScenarioVerdict};
use crate::curvature::{
    ricci_components, ricci_report_with, second_fundamental_form, Block, ClosureTag,
    MultiWarpedMetric, ReportOptions,
};
use crate::factors::FactorManifold;
use crate::numerics::{linspace, Interval};
use crate::profiles::{
    closability_inequality, closability_ode_profile, closed_form_profile, closure_check, k_profile,
    parity_check, ClosedForm, Endpoint, Parity,
};
use crate::{Error, Result, T_MIN};

#[derive(Clone, Debug, PartialEq)]
pub struct GnOptions {
    pub grid: usize,
    pub tol: f64,
    pub lambda: f64,
    /// Bound on `|closability_inequality - 1|`.
    pub ode_tol: f64,
    /// Certified data for the metric outside the collar; defaults to a block
    /// with non-negative Ricci curvature.
    pub g0: Option<CertifiedBlock>,
}

impl Default for GnOptions {
    fn default() -> Self {
        GnOptions {
            grid: 10_000,
            tol: 1e-12,
            lambda: 0.0,
            ode_tol: 1e-6,
            g0: None,
        }
    }
}

/// The two regions of the doubled metric.
///
/// Region A is `dt² + k(t)² ds² + f(t)² h₀` over `[0, ε']` with `k` the flat
/// step and `f` the closability ODE solution. Region B is the product
/// `k(ε')² ds² + g₀`, whose `s`-direction is Ricci-flat.
pub fn gn_regions(
    y: &FactorManifold,
    eps: f64,
    n: usize,
    opts: &GnOptions,
) -> Result<ScenarioVerdict> {
    if n < 3 {
        return Err(Error::input(format!("need n >= 3, got {n}")));
    }
    if y.dim != n - 1 {
        return Err(Error::input(format!(
            "Y has dimension {}, expected n - 1 = {}",
            y.dim,
            n - 1
        )));
    }
    let floor = -(n as f64 - 2.0);
    if y.ricci.lo < floor - 1e-12 {
        return Err(Error::input(format!(
            "Y needs Ric >= {floor}, has lower bound {}",
            y.ricci.lo
        )));
    }
    if !(eps > 2.0 * T_MIN) || !eps.is_finite() {
        return Err(Error::input(format!(
            "ε' must exceed {}, got {eps}",
            2.0 * T_MIN
        )));
    }

    let k = k_profile(eps)?;
    let f = closability_ode_profile(n, eps, opts.tol)?;
    let hi = f.domain().hi;
    let interval_factor = FactorManifold::abstract_factor("I", 1, Interval::point(0.0), None)?;
    let region_a = MultiWarpedMetric::new(
        Interval::new(0.0, hi),
        vec![
            Block::new(interval_factor.clone(), k.clone()),
            Block::new(y.clone(), f.clone()),
        ],
        vec![ClosureTag {
            end: Endpoint::Left,
            block: 0,
        }],
    )?;

    let mut v = ScenarioVerdict::new("gn");
    v.note("n", n.to_string());
    v.note("Y", y.name.clone());
    v.note("doubling", "Z/2 reflection across the boundary of N");
    v.note("decomposition", "cut along Y into region A and region B");
    v.tolerance("solver_tol", opts.tol);
    v.tolerance("ode_tol", opts.ode_tol);
    v.metric("eps", eps);
    v.metric("region_a_end", hi);
    if hi < eps {
        v.note(
            "truncated",
            format!("f collapses before ε'; region A ends at {hi}"),
        );
    }

    // k is flat at ε', so the s-direction is exactly 0 there; strict
    // positivity is asked on [t_min, ε' - t_min].
    let mut ro = ReportOptions::new(opts.grid, Some(opts.lambda));
    ro.range = Some(Interval::new(T_MIN, hi - T_MIN));
    ro.strict = true;
    let report = ricci_report_with(&region_a, &ro)?;
    v.metric("region_a_min", report.global_min);
    v.metric("region_a_argmin", report.argmin);
    v.push(Check::new(
        "region_a_positive",
        "strictly positive Ricci curvature on I x [0, eps'] x Y",
        report.global_min,
        Relation::Above,
        opts.lambda,
    ));
    v.report("region_a", report);
    let seam = ricci_components(&region_a, hi)?;
    v.metric("seam_s_component", seam.blocks[0].lo);

    let (k_end, f_end) = (k.eval(hi)?.f, f.eval(hi)?.f);
    let constant =
        |a: f64| closed_form_profile(ClosedForm::Constant { a }, Interval::new(0.0, 1.0));
    let region_b = MultiWarpedMetric::new(
        Interval::new(0.0, 1.0),
        vec![
            Block::new(interval_factor, constant(k_end)?),
            Block::new(y.clone(), constant(f_end)?),
        ],
        vec![],
    )?;
    let s_dir = ricci_components(&region_b, 0.5)?.blocks[0];
    v.metric("region_b_s_component", s_dir.lo);
    v.push(Check::new(
        "region_b_s_flat",
        "Ricci curvature in the s-direction vanishes on region B",
        s_dir.lo.abs().max(s_dir.hi.abs()),
        Relation::AtMost,
        0.0,
    ));
    let g0 = match &opts.g0 {
        Some(g0) => g0.clone(),
        None => CertifiedBlock::new(
            "g0",
            second_fundamental_form(&region_a, hi, 1.0)?,
            0.0,
            None,
            "metric outside the collar with non-negative Ricci curvature, assumed",
        )?,
    };
    v.note("g0", format!("{}: {}", g0.label, g0.note));
    let region_b_min = s_dir.lo.min(g0.interior_ricci_min);
    v.metric("region_b_min", region_b_min);
    v.push(Check::new(
        "region_b_nonnegative",
        "non-negative Ricci curvature on region B",
        region_b_min,
        Relation::AtLeast,
        0.0,
    ));

    let f0 = f.eval(0.0)?;
    let f_even = parity_check(&f, Endpoint::Left, Parity::Even, 3)?;
    v.push(Check::flag(
        "f_even_at_0",
        "f is even at t = 0 with f(0) = 1, f'(0) = 0",
        f_even.pass && f0.f == 1.0 && f0.fp == 0.0,
    ));
    let k_odd = closure_check(&k, Endpoint::Left, 1.0)?;
    v.push(Check::flag(
        "k_odd_at_0",
        "k is odd at t = 0 with k'(0) = 1",
        k_odd.pass,
    ));
    let k_flat = parity_check(&k, Endpoint::Right, Parity::Even, 3)?;
    v.push(Check::flag(
        "k_flat_at_eps",
        "all derivatives of k vanish at eps'",
        k_flat.pass && k.eval(eps)?.fp.abs() <= 1e-10,
    ));

    let grid = linspace(0.0, hi, opts.grid);
    let mut ineq = Vec::with_capacity(grid.len());
    let (mut fp, mut kp) = (Vec::new(), Vec::new());
    for &t in &grid {
        let jf = f.eval(t)?;
        ineq.push(closability_inequality(n, &jf) - 1.0);
        fp.push(jf.fp);
        kp.push(k.eval(t)?.fp);
    }
    let ineq = sup(ineq);
    v.metric("f_inequality_residual", ineq);
    v.push(Check::new(
        "f_inequality",
        "-f''/f - (n-2)(1 + f'^2)/f^2 = 1",
        ineq,
        Relation::AtMost,
        opts.ode_tol,
    ));
    v.push(Check::new(
        "f_nonincreasing",
        "f' <= 0 on [0, eps']",
        max_of(fp),
        Relation::AtMost,
        0.0,
    ));
    v.push(Check::new(
        "k_nondecreasing",
        "k' >= 0 on [0, eps']",
        min_of(kp),
        Relation::AtLeast,
        0.0,
    ));

    v.profile("k", k);
    v.profile("f", f);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worst_y(n: usize, rho: f64) -> FactorManifold {
        FactorManifold::abstract_factor("Y", n - 1, Interval::point(rho), None).unwrap()
    }

    fn fast() -> GnOptions {
        GnOptions {
            grid: 2000,
            ..GnOptions::default()
        }
    }

    #[test]
    fn worst_case_y() {
        let v = gn_regions(&worst_y(5, -3.0), 0.2, 5, &fast()).unwrap();
        for c in &v.checks {
            assert!(c.pass, "{c}");
        }
        assert_eq!(v.metrics["region_b_s_component"], 0.0);
        assert_eq!(v.metrics["seam_s_component"], 0.0);
        assert_eq!(v.metrics["region_a_end"], 0.2);
    }

    #[test]
    fn preconditions() {
        let o = fast();
        assert!(gn_regions(&worst_y(5, -3.5), 0.2, 5, &o).is_err());
        assert!(gn_regions(&worst_y(4, -2.0), 0.2, 5, &o).is_err());
        assert!(gn_regions(&worst_y(5, -3.0), 0.0, 5, &o).is_err());
    }

    #[test]
    fn raising_the_floor_never_hurts() {
        let a = gn_regions(&worst_y(5, -3.0), 0.2, 5, &fast()).unwrap();
        let b = gn_regions(&worst_y(5, 0.0), 0.2, 5, &fast()).unwrap();
        assert!(b.metrics["region_a_min"] >= a.metrics["region_a_min"]);
    }

    #[test]
    fn negative_g0_fails_region_b() {
        let mut o = fast();
        let b = crate::curvature::BoundaryData::round(4, 1.0, 0.0).unwrap();
        o.g0 = Some(CertifiedBlock::new("g0", b, -1.0, None, "test").unwrap());
        let v = gn_regions(&worst_y(5, -3.0), 0.2, 5, &o).unwrap();
        assert!(!v.check("region_b_nonnegative").unwrap().pass);
        assert!(!v.overall_pass);
    }
}
