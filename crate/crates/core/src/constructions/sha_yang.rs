use super::{max_of, min_of, sup, Check, Relation, ScenarioVerdict};
use crate::curvature::{ricci_report_with, Block, ClosureTag, MultiWarpedMetric, ReportOptions};
use crate::factors::FactorManifold;
use crate::numerics::{linspace, Interval};
use crate::profiles::{closure_check, parity_check, sha_yang_profiles, Endpoint, Parity};
use crate::{Error, Result, T_MIN};

#[derive(Clone, Debug, PartialEq)]
pub struct ShaYangOptions {
    pub tol: f64,
    pub grid: usize,
    pub first_integral_bound: f64,
    pub identity_tol: f64,
    /// Ricci target; the check passes when `global_min ≥ lambda - ricci_slack`.
    pub lambda: f64,
    pub ricci_slack: f64,
    /// Bound on `|f'(T) - 1|` and `|h(T) - 2/α|`.
    pub asymptotic_bound: f64,
    /// Left ends `T₀` of the windows `[T₀, 2T₀]`; windows past `T` are skipped.
    pub windows: Vec<f64>,
    pub parallel: bool,
}

impl Default for ShaYangOptions {
    fn default() -> Self {
        ShaYangOptions {
            tol: 1e-10,
            grid: 10_000,
            first_integral_bound: 1e-8,
            identity_tol: 1e-6,
            lambda: 0.0,
            ricci_slack: 1e-7,
            asymptotic_bound: 0.2,
            windows: vec![10.0, 20.0],
            parallel: false,
        }
    }
}

const WINDOW_POINTS: usize = 2001;

/// The metric `dt² + h² g_{S^{m-1}} + f² g_M` on `[0, T]` with `f` the
/// solution of `f'' = (α/2) f^(-α-1)`, `h = (2/α) f'`, checked for
/// non-negative Ricci curvature, the identities behind it, smooth closure at
/// `t = 0` and convergence to the cone over `M`.
pub fn sha_yang_space(
    n: usize,
    m: usize,
    factor: &FactorManifold,
    t_end: f64,
    opts: &ShaYangOptions,
) -> Result<ScenarioVerdict> {
    if factor.dim != n {
        return Err(Error::input(format!(
            "factor {} has dimension {}, expected n = {n}",
            factor.name, factor.dim
        )));
    }
    if factor.ricci.lo < n as f64 - 1.0 - 1e-12 {
        return Err(Error::input(format!(
            "factor {} needs Ric >= {}, has lower bound {}",
            factor.name,
            n - 1,
            factor.ricci.lo
        )));
    }
    let sy = sha_yang_profiles(n, m, t_end, opts.tol)?;
    let alpha = sy.alpha;
    let (f, h) = (&sy.f, &sy.h);
    let metric = MultiWarpedMetric::new(
        Interval::new(0.0, t_end),
        vec![
            Block::new(FactorManifold::round_sphere(m - 1, 1.0)?, h.clone()),
            Block::new(factor.clone(), f.clone()),
        ],
        vec![ClosureTag {
            end: Endpoint::Left,
            block: 0,
        }],
    )?;

    let mut v = ScenarioVerdict::new("sha-yang");
    v.note("n", n.to_string());
    v.note("m", m.to_string());
    v.note("factor", factor.name.clone());
    v.metric("alpha", alpha);
    v.tolerance("solver_tol", opts.tol);
    v.tolerance("first_integral_bound", opts.first_integral_bound);
    v.tolerance("identity_tol", opts.identity_tol);
    v.tolerance("ricci_slack", opts.ricci_slack);
    v.tolerance("asymptotic_bound", opts.asymptotic_bound);

    v.metric("first_integral_residual", sy.first_integral_residual);
    v.push(Check::new(
        "first_integral",
        "f'^2 = 1 - f^(-alpha) along the solution",
        sy.first_integral_residual,
        Relation::AtMost,
        opts.first_integral_bound,
    ));

    let q = alpha * alpha / 4.0;
    let (mut chain, mut lower, mut second, mut cross) = (vec![], vec![], vec![], vec![]);
    for t in linspace(T_MIN, t_end, opts.grid) {
        let (jf, jh) = (f.eval(t)?, h.eval(t)?);
        let p = jf.f.powf(-alpha - 2.0);
        let lhs = (1.0 - jh.fp * jh.fp) / (jh.f * jh.f);
        let rhs = q * (1.0 - jf.f.powf(-2.0 * alpha - 2.0)) / (1.0 - jf.f.powf(-alpha));
        chain.push(lhs - rhs);
        lower.push(lhs - q * p);
        second.push(jh.fpp / jh.f + alpha * (alpha + 1.0) / 2.0 * p);
        cross.push(jh.fp * jf.fp / (jh.f * jf.f) - alpha / 2.0 * p);
    }
    let identities = [
        (
            "identity_curvature_chain",
            "(1 - h'^2)/h^2 = (alpha^2/4)(1 - f^(-2alpha-2))/(1 - f^(-alpha))",
            sup(chain),
        ),
        (
            "identity_h_second",
            "h''/h = -(alpha(alpha+1)/2) f^(-alpha-2)",
            sup(second),
        ),
        (
            "identity_cross_term",
            "h'f'/(hf) = (alpha/2) f^(-alpha-2)",
            sup(cross),
        ),
    ];
    for (name, anchor, residual) in identities {
        v.metric(format!("{name}_residual"), residual);
        v.push(Check::new(
            name,
            anchor,
            residual,
            Relation::AtMost,
            opts.identity_tol,
        ));
    }
    let margin = min_of(lower);
    v.metric("curvature_chain_lower_margin", margin);
    v.push(Check::new(
        "identity_lower_bound",
        "(1 - h'^2)/h^2 >= (alpha^2/4) f^(-alpha-2)",
        margin,
        Relation::AtLeast,
        -opts.identity_tol,
    ));

    let mut ro = ReportOptions::new(opts.grid, Some(opts.lambda));
    ro.slack = Some(opts.ricci_slack);
    ro.parallel = opts.parallel;
    let report = ricci_report_with(&metric, &ro)?;
    v.metric("global_min", report.global_min);
    v.metric("argmin", report.argmin);
    v.push(Check::new(
        "ricci_nonnegative",
        "all Ricci curvatures are non-negative",
        report.global_min,
        Relation::AtLeast,
        opts.lambda - opts.ricci_slack,
    ));
    v.report("ricci", report);

    let h_closure = closure_check(h, Endpoint::Left, 1.0)?;
    v.metric("h_slope_at_0", h_closure.slope);
    v.push(Check::flag(
        "h_odd_at_0",
        "h is odd at t = 0 with h'(0) = 1",
        h_closure.pass,
    ));
    let f_even = parity_check(f, Endpoint::Left, Parity::Even, 3)?;
    v.push(Check::flag(
        "f_even_at_0",
        "f is even at t = 0",
        f_even.pass,
    ));

    let h_limit = 2.0 / alpha;
    let (jf, jh) = (f.eval(t_end)?, h.eval(t_end)?);
    v.metric("fp_at_T", jf.fp);
    v.metric("h_at_T", jh.f);
    v.metric("h_limit", h_limit);
    v.push(Check::new(
        "slope_at_T",
        "f'(t) -> 1",
        (jf.fp - 1.0).abs(),
        Relation::AtMost,
        opts.asymptotic_bound,
    ));
    v.push(Check::new(
        "h_at_T",
        "h(t) -> 2/alpha",
        (jh.f - h_limit).abs(),
        Relation::AtMost,
        opts.asymptotic_bound,
    ));

    let mut fp_sups = Vec::new();
    let mut h_sups = Vec::new();
    for &t0 in opts
        .windows
        .iter()
        .filter(|&&t0| t0 > 0.0 && 2.0 * t0 <= t_end)
    {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for t in linspace(t0, 2.0 * t0, WINDOW_POINTS) {
            let (jf, jh) = (f.eval(t)?, h.eval(t)?);
            a.push(jf.fp - 1.0);
            b.push(jh.f - h_limit);
        }
        let (sa, sb) = (sup(a), sup(b));
        v.metric(format!("window_{t0}_fp_gap"), sa);
        v.metric(format!("window_{t0}_h_gap"), sb);
        fp_sups.push(sa);
        h_sups.push(sb);
    }
    if fp_sups.len() >= 2 {
        let growth = |s: &[f64]| max_of(s.windows(2).map(|w| w[1] - w[0]));
        v.push(Check::new(
            "fp_windows_decreasing",
            "sup |f' - 1| over [T, 2T] decreases in T",
            growth(&fp_sups),
            Relation::Below,
            0.0,
        ));
        v.push(Check::new(
            "h_windows_decreasing",
            "sup |h - 2/alpha| over [T, 2T] decreases in T",
            growth(&h_sups),
            Relation::Below,
            0.0,
        ));
    } else {
        v.note(
            "windows",
            "fewer than two windows fit inside [0, T]; skipped",
        );
    }

    v.profile("f", sy.f.clone());
    v.profile("h", sy.h.clone());
    Ok(v)
}

/// Rescaled-cone diagnostics: for each window `[T, 2T]` and block `i`,
/// `sup |fᵢ(t)/t - cᵢ|`. Passes when every block's sup is non-increasing
/// across windows and at most `threshold` on the last window.
pub fn cone_asymptotics(
    metric: &MultiWarpedMetric,
    slopes: &[f64],
    windows: &[f64],
    threshold: f64,
) -> Result<ScenarioVerdict> {
    let blocks = metric.blocks();
    if slopes.len() != blocks.len() {
        return Err(Error::input(format!(
            "{} slopes for {} blocks",
            slopes.len(),
            blocks.len()
        )));
    }
    if windows.is_empty() || windows.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::input("windows must be non-empty and increasing"));
    }
    let dom = metric.interval();
    for &t0 in windows {
        if !(t0 > 0.0) || t0 < dom.lo || 2.0 * t0 > dom.hi {
            return Err(Error::OutOfDomain {
                t: 2.0 * t0,
                lo: dom.lo,
                hi: dom.hi,
            });
        }
    }

    let mut v = ScenarioVerdict::new("cone-asymptotics");
    v.tolerance("threshold", threshold);
    for (i, (block, &c)) in blocks.iter().zip(slopes).enumerate() {
        let mut sups = Vec::with_capacity(windows.len());
        for &t0 in windows {
            let mut dev = Vec::with_capacity(WINDOW_POINTS);
            for t in linspace(t0, 2.0 * t0, WINDOW_POINTS) {
                dev.push(block.profile.eval(t)?.f / t - c);
            }
            let s = sup(dev);
            v.metric(format!("block{i}_window_{t0}"), s);
            sups.push(s);
        }
        if sups.len() >= 2 {
            v.push(Check::new(
                format!("block{i}_non_increasing"),
                "sup |f/t - c| over [T, 2T] does not increase with T",
                max_of(sups.windows(2).map(|w| w[1] - w[0])),
                Relation::AtMost,
                0.0,
            ));
        }
        v.push(Check::new(
            format!("block{i}_last_window"),
            "f(t)/t -> c on the last window",
            *sups.last().expect("windows is non-empty"),
            Relation::AtMost,
            threshold,
        ));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> FactorManifold {
        FactorManifold::round_sphere(2, 1.0).unwrap()
    }

    fn fast() -> ShaYangOptions {
        ShaYangOptions {
            grid: 2000,
            ..ShaYangOptions::default()
        }
    }

    #[test]
    fn two_two_passes() {
        let v = sha_yang_space(2, 2, &s2(), 50.0, &fast()).unwrap();
        for c in &v.checks {
            assert!(c.pass, "{c}");
        }
        assert!(v.overall_pass);
        assert!(v.metrics["global_min"] >= -1e-7);
        assert_eq!(v.profiles.len(), 2);
        assert!(v.reports.contains_key("ricci"));
    }

    #[test]
    fn h_limit_for_alpha_two() {
        let s3 = FactorManifold::round_sphere(3, 1.0).unwrap();
        let v = sha_yang_space(3, 2, &s3, 50.0, &fast()).unwrap();
        assert_eq!(v.metrics["alpha"], 2.0);
        assert_eq!(v.metrics["h_limit"], 1.0);
        assert!((v.metrics["h_at_T"] - 1.0).abs() < 0.05);
    }

    #[test]
    fn preconditions() {
        let small = FactorManifold::round_sphere(2, 2.0).unwrap();
        assert!(sha_yang_space(2, 2, &small, 50.0, &fast())
            .unwrap_err()
            .is_input_error());
        assert!(sha_yang_space(3, 2, &s2(), 50.0, &fast()).is_err());
    }

    #[test]
    fn impossible_target_fails() {
        let opts = ShaYangOptions {
            lambda: 100.0,
            ..fast()
        };
        let v = sha_yang_space(2, 2, &s2(), 50.0, &opts).unwrap();
        assert!(!v.overall_pass);
        assert!(!v.check("ricci_nonnegative").unwrap().pass);
    }

    #[test]
    fn flat_cone_is_its_own_asymptotic_cone() {
        let cone = MultiWarpedMetric::flat_cone(3, 100.0).unwrap();
        let v = cone_asymptotics(&cone, &[1.0], &[10.0, 20.0, 40.0], 1e-12).unwrap();
        assert!(v.overall_pass);
        assert!(v.metrics.values().all(|&s| s == 0.0));
        assert!(matches!(
            cone_asymptotics(&cone, &[1.0], &[10.0, 60.0], 0.1),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(cone_asymptotics(&cone, &[1.0, 1.0], &[10.0], 0.1).is_err());
        assert!(cone_asymptotics(&cone, &[1.0], &[20.0, 10.0], 0.1).is_err());
    }

    #[test]
    fn sha_yang_cone_windows() {
        let sy = sha_yang_profiles(2, 2, 80.0, 1e-10).unwrap();
        let alpha = sy.alpha;
        let metric = MultiWarpedMetric::new(
            Interval::new(0.0, 80.0),
            vec![
                Block::new(FactorManifold::round_sphere(1, 1.0).unwrap(), sy.h),
                Block::new(s2(), sy.f),
            ],
            vec![ClosureTag {
                end: Endpoint::Left,
                block: 0,
            }],
        )
        .unwrap();
        let windows = [10.0, 20.0, 40.0];
        let v = cone_asymptotics(&metric, &[0.0, 1.0], &windows, 0.2).unwrap();
        assert!(
            v.overall_pass,
            "{:?}",
            v.failed_checks().collect::<Vec<_>>()
        );
        for t0 in windows {
            assert!(v.metrics[&format!("block0_window_{t0}")] <= (2.0 / alpha) / t0);
        }
    }
}
