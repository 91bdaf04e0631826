//! Adaptive Dormand–Prince 5(4) integration of `f'' = F(t, f, f')` with
//! quintic Hermite dense output.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Endpoint, Jet, Parity, ParityTag, ProfileKind, Repr, SolverMeta, WarpProfile};
use crate::numerics::{linspace, series, Interval};
use crate::{Error, Result, T_MIN};

/// Integration stops once `f` drops below this value.
pub const POSITIVITY_FLOOR: f64 = 1e-4;
/// Integration stops once `|f'|` exceeds this value.
pub const SLOPE_CEILING: f64 = 1e6;

const MAX_STEPS: usize = 2_000_000;
const SERIES_LEN: usize = 12;

/// Right-hand sides `F` of the second-order equations `f'' = F(t, f, f')`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SecondOrderRhs {
    /// `f'' = a f + b`
    Linear { a: f64, b: f64 },
    /// `f'' = (α/2) f^(-α-1)`
    ShaYang { alpha: f64 },
    /// `f'' = -f - (n-2)(1 + f'²)/f`
    Closability { n: usize },
}

impl SecondOrderRhs {
    pub fn eval(&self, f: f64, fp: f64) -> f64 {
        match *self {
            SecondOrderRhs::Linear { a, b } => a * f + b,
            SecondOrderRhs::ShaYang { alpha } => 0.5 * alpha * f.powf(-alpha - 1.0),
            SecondOrderRhs::Closability { n } => -f - (n as f64 - 2.0) * (1.0 + fp * fp) / f,
        }
    }

    /// `f'''` along a solution, by differentiating `F` once.
    pub fn third(&self, f: f64, fp: f64, fpp: f64) -> f64 {
        match *self {
            SecondOrderRhs::Linear { a, .. } => a * fp,
            SecondOrderRhs::ShaYang { alpha } => {
                0.5 * alpha * (-alpha - 1.0) * f.powf(-alpha - 2.0) * fp
            }
            SecondOrderRhs::Closability { n } => {
                let k = n as f64 - 2.0;
                -fp - k * (2.0 * fp * fpp / f - (1.0 + fp * fp) * fp / (f * f))
            }
        }
    }

    /// Taylor coefficients of the solution through `(f0, fp0)`, in powers of
    /// `t - t0`.
    pub fn taylor(&self, f0: f64, fp0: f64, len: usize) -> Vec<f64> {
        let mut c = vec![f0, fp0];
        for k in 2..len {
            let m = k - 1;
            let forcing = match *self {
                SecondOrderRhs::Linear { a, b } => a * c[k - 2] + if k == 2 { b } else { 0.0 },
                SecondOrderRhs::ShaYang { alpha } => {
                    0.5 * alpha * series::powf(&c, -alpha - 1.0, m)[k - 2]
                }
                SecondOrderRhs::Closability { n } => {
                    let d = series::derivative(&c);
                    let mut g = series::mul(&d, &d, m);
                    g[0] += 1.0;
                    let q = series::div(&g, &c, m);
                    -c[k - 2] - (n as f64 - 2.0) * q[k - 2]
                }
            };
            c.push(forcing / (k * (k - 1)) as f64);
        }
        c.truncate(len);
        c
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    t: f64,
    f: f64,
    fp: f64,
    fpp: f64,
    fppp: f64,
}

/// Accepted steps of one integration, interpolated by quintic Hermite
/// polynomials in `f` and in `f'`; `f''` is recomputed from the equation.
pub struct DenseSolution {
    rhs: SecondOrderRhs,
    nodes: Vec<Node>,
}

impl fmt::Debug for DenseSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseSolution")
            .field("rhs", &self.rhs)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

fn hermite5(s: f64, h: f64, y0: [f64; 3], y1: [f64; 3]) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 0.5 * (s3 - 2.0 * s4 + s5);
    y0[0] * h0
        + h * y0[1] * h1
        + h * h * y0[2] * h2
        + y1[0] * h3
        + h * y1[1] * h4
        + h * h * y1[2] * h5
}

impl DenseSolution {
    pub fn rhs(&self) -> SecondOrderRhs {
        self.rhs
    }

    pub fn span(&self) -> Interval {
        Interval::new(self.nodes[0].t, self.nodes[self.nodes.len() - 1].t)
    }

    /// Step end points `t_k`.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.t)
    }

    pub fn jet(&self, t: f64) -> Jet {
        let last = self.nodes.len() - 1;
        let i = self.nodes.partition_point(|n| n.t <= t).clamp(1, last) - 1;
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let f = hermite5(s, h, [a.f, a.fp, a.fpp], [b.f, b.fp, b.fpp]);
        let fp = hermite5(s, h, [a.fp, a.fpp, a.fppp], [b.fp, b.fpp, b.fppp]);
        Jet::new(f, fp, self.rhs.eval(f, fp))
    }

    pub fn third_derivative(&self, _t: f64, j: &Jet) -> f64 {
        self.rhs.third(j.f, j.fp, j.fpp)
    }
}

struct Integration {
    sol: DenseSolution,
    meta: SolverMeta,
    stopped_at: Option<f64>,
}

// Dormand–Prince 5(4) tableau; the equations are autonomous so the nodes
// c_i are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn integrate(
    rhs: SecondOrderRhs,
    t0: f64,
    y0: [f64; 2],
    t1: f64,
    tol: f64,
    closure: bool,
) -> Integration {
    let deriv = |y: [f64; 2]| [y[1], rhs.eval(y[0], y[1])];
    let node = |t: f64, y: [f64; 2], fpp: f64| Node {
        t,
        f: y[0],
        fp: y[1],
        fpp,
        fppp: rhs.third(y[0], y[1], fpp),
    };
    let h_max = (t1 - t0) / 50.0;
    let mut meta = SolverMeta {
        tol,
        accepted_steps: 0,
        rejected_steps: 0,
        rhs_evals: 1,
        requested_end: t1,
        stop_reason: None,
    };
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; 2]; 7];
    k[0] = deriv(y);
    let mut nodes = vec![node(t, y, k[0][1])];
    let mut h = h_max.min(1e-3);
    let mut stopped_at = None;

    while t < t1 {
        if meta.accepted_steps + meta.rejected_steps >= MAX_STEPS {
            meta.stop_reason = Some("step budget exhausted".into());
            stopped_at = Some(t);
            break;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            meta.stop_reason = Some("step size underflow".into());
            stopped_at = Some(t);
            break;
        }
        let last = t + h >= t1;
        let step = if last { t1 - t } else { h };
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += step * A[s][j] * kj[0];
                ys[1] += step * A[s][j] * kj[1];
            }
            k[s] = deriv(ys);
        }
        meta.rhs_evals += 6;
        let mut y_new = y;
        let mut err = [0.0; 2];
        for (j, kj) in k.iter().enumerate() {
            for c in 0..2 {
                if j < 6 {
                    y_new[c] += step * A[6][j] * kj[c];
                }
                err[c] += step * E[j] * kj[c];
            }
        }
        let finite = y_new.iter().chain(err.iter()).all(|v| v.is_finite())
            && k[6].iter().all(|v| v.is_finite());
        if !finite {
            meta.rejected_steps += 1;
            h = step * 0.25;
            continue;
        }
        let norm = ((0..2)
            .map(|c| {
                let sc = tol + tol * y[c].abs().max(y_new[c].abs());
                (err[c] / sc).powi(2)
            })
            .sum::<f64>()
            / 2.0)
            .sqrt();
        if norm <= 1.0 {
            let t_new = if last { t1 } else { t + step };
            let near_start = closure && t_new - t0 < T_MIN;
            if y_new[0] < POSITIVITY_FLOOR && !near_start {
                meta.stop_reason = Some(format!(
                    "f fell below the positivity floor {POSITIVITY_FLOOR}"
                ));
                stopped_at = Some(t);
                break;
            }
            if y_new[1].abs() > SLOPE_CEILING {
                meta.stop_reason = Some(format!("|f'| exceeded {SLOPE_CEILING}"));
                stopped_at = Some(t);
                break;
            }
            nodes.push(node(t_new, y_new, k[6][1]));
            meta.accepted_steps += 1;
            t = t_new;
            y = y_new;
            k[0] = k[6];
            let fac = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (step * fac).min(h_max);
        } else {
            meta.rejected_steps += 1;
            h = step * (0.9 * norm.powf(-0.2)).max(0.2);
        }
    }
    Integration {
        sol: DenseSolution { rhs, nodes },
        meta,
        stopped_at,
    }
}

fn validate_common(domain: Interval, tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::input(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(domain.lo.is_finite() && domain.hi.is_finite() && domain.lo < domain.hi) {
        return Err(Error::input(format!(
            "domain must be a non-degenerate finite interval, got [{}, {}]",
            domain.lo, domain.hi
        )));
    }
    Ok(())
}

fn start_tag(rhs: SecondOrderRhs, f0: f64, fp0: f64, closure: bool) -> Option<ParityTag> {
    let parity = if closure {
        Parity::Odd
    } else if fp0 == 0.0 {
        Parity::Even
    } else {
        return None;
    };
    Some(ParityTag {
        parity,
        order: 3,
        series: Some(rhs.taylor(f0, fp0, SERIES_LEN)),
    })
}

fn build(run: Integration, domain: Interval, tag: Option<ParityTag>) -> WarpProfile {
    let Integration { sol, meta, .. } = run;
    let mut p = WarpProfile::from_repr(domain, ProfileKind::IvpSolution, Repr::Ivp(Arc::new(sol)))
        .with_meta(meta);
    if let Some(tag) = tag {
        p = p.with_tag(Endpoint::Left, tag);
    }
    p
}

/// Solves `f'' = F(f, f')` with `f(t0) = f0`, `f'(t0) = fp0` over `domain`.
///
/// With `closure` set, `f0` must be 0 and the start is tagged as an odd
/// closure point whose neighborhood is evaluated from the Taylor series.
pub fn solve_ivp_profile(
    rhs: SecondOrderRhs,
    f0: f64,
    fp0: f64,
    domain: Interval,
    tol: f64,
    closure: bool,
) -> Result<WarpProfile> {
    validate_common(domain, tol)?;
    if !(f0.is_finite() && fp0.is_finite()) {
        return Err(Error::input("initial data must be finite"));
    }
    if closure {
        if f0 != 0.0 || fp0 == 0.0 {
            return Err(Error::input("closure mode needs f(t0) = 0 and f'(t0) != 0"));
        }
        let fpp0 = rhs.eval(f0, fp0);
        if !(fpp0.abs() <= 1e-14) {
            return Err(Error::input(format!(
                "closure mode needs f''(t0) = 0 for an odd start, got {fpp0}"
            )));
        }
    } else if !(f0 > 0.0) {
        return Err(Error::input(format!(
            "f(t0) must be positive, got {f0}; use closure mode for a cone point"
        )));
    }
    let run = integrate(rhs, domain.lo, [f0, fp0], domain.hi, tol, closure);
    if let Some(reached) = run.stopped_at {
        return Err(Error::DomainTruncation {
            reached,
            requested: domain.hi,
            reason: run.meta.stop_reason.clone().unwrap_or_default(),
        });
    }
    Ok(build(run, domain, start_tag(rhs, f0, fp0, closure)))
}

/// The pair `(f, h = (2/α) f')` of the Sha–Yang construction.
#[derive(Clone, Debug)]
pub struct ShaYangProfiles {
    pub f: WarpProfile,
    pub h: WarpProfile,
    pub alpha: f64,
    /// Largest `|f'² - (1 - f^(-α))|` over the solver nodes and a uniform grid.
    pub first_integral_residual: f64,
}

/// Solves `f'' = (α/2) f^(-α-1)`, `f(0) = 1`, `f'(0) = 0` on `[0, T]` with
/// `α = 2(n-1)/m`, and derives `h = (2/α) f'`.
pub fn sha_yang_profiles(n: usize, m: usize, t_end: f64, tol: f64) -> Result<ShaYangProfiles> {
    if n < 2 || m < 2 {
        return Err(Error::input(format!(
            "need n, m >= 2, got n = {n}, m = {m}"
        )));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::input(format!("T must be positive, got {t_end}")));
    }
    let alpha = 2.0 * (n as f64 - 1.0) / m as f64;
    let rhs = SecondOrderRhs::ShaYang { alpha };
    let f = solve_ivp_profile(rhs, 1.0, 0.0, Interval::new(0.0, t_end), tol, false)?;
    let Repr::Ivp(sol) = &*f.repr else {
        unreachable!("solve_ivp_profile returns an ivp representation")
    };
    let sol = Arc::clone(sol);

    let residual_at = |t: f64| {
        let j = f.jet(t);
        (j.fp * j.fp - (1.0 - j.f.powf(-alpha))).abs()
    };
    let residual = sol
        .nodes()
        .chain(linspace(0.0, t_end, 20_001))
        .map(residual_at)
        .fold(0.0, f64::max);
    if !(residual <= 10.0 * tol) {
        return Err(Error::IntegrationQuality {
            what: "first-integral residual".into(),
            value: residual,
            bound: 10.0 * tol,
        });
    }

    let scale = 2.0 / alpha;
    let f_series = rhs.taylor(1.0, 0.0, SERIES_LEN + 1);
    let h_series: Vec<f64> = series::derivative(&f_series)
        .into_iter()
        .map(|c| scale * c)
        .collect();
    let h = WarpProfile::from_repr(
        f.domain(),
        ProfileKind::IvpSolution,
        Repr::IvpDerivative { sol, scale },
    )
    .with_meta(
        f.solver_meta()
            .cloned()
            .expect("ivp profiles carry metadata"),
    )
    .with_tag(
        Endpoint::Left,
        ParityTag {
            parity: Parity::Odd,
            order: 3,
            series: Some(h_series),
        },
    );
    Ok(ShaYangProfiles {
        f,
        h,
        alpha,
        first_integral_residual: residual,
    })
}

/// `-f''/f - (n-2)(1 + f'²)/f²`, identically 1 along solutions of the
/// closability equation.
pub fn closability_inequality(n: usize, j: &Jet) -> f64 {
    -j.fpp / j.f - (n as f64 - 2.0) * (1.0 + j.fp * j.fp) / (j.f * j.f)
}

/// Solves `f'' = -f - (n-2)(1 + f'²)/f`, `f(0) = 1`, `f'(0) = 0` on `[0, ε]`.
///
/// If `f` collapses before `ε` the domain is cut back to 90% of the time at
/// which integration stopped; the solver metadata keeps the requested end.
pub fn closability_ode_profile(n: usize, eps: f64, tol: f64) -> Result<WarpProfile> {
    if n < 3 {
        return Err(Error::input(format!("need n >= 3, got {n}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::input(format!("ε must be positive, got {eps}")));
    }
    validate_common(Interval::new(0.0, eps), tol)?;
    let rhs = SecondOrderRhs::Closability { n };
    let run = integrate(rhs, 0.0, [1.0, 0.0], eps, tol, false);
    let end = match run.stopped_at {
        Some(reached) if reached > 0.0 => 0.9 * reached,
        Some(_) => {
            return Err(Error::DomainTruncation {
                reached: 0.0,
                requested: eps,
                reason: run.meta.stop_reason.clone().unwrap_or_default(),
            })
        }
        None => eps,
    };
    Ok(build(
        run,
        Interval::new(0.0, end),
        start_tag(rhs, 1.0, 0.0, false),
    ))
}
