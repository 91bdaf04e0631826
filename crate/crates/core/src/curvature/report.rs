use std::thread;

use serde::{Deserialize, Serialize};

use super::{nan_min, ricci_components, MultiWarpedMetric, RicciComponents};
use crate::numerics::{integrate, linspace, Interval};
use crate::profiles::Endpoint;
use crate::{Error, Result, T_MIN};

/// Knobs for a Ricci sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub grid_size: usize,
    pub lambda: Option<f64>,
    /// Sub-interval to sweep; defaults to the metric interval.
    pub range: Option<Interval>,
    /// Require `global_min > λ` instead of `global_min ≥ λ - slack`.
    pub strict: bool,
    /// Defaults to `1e-8 · max(1, |λ|)`.
    pub slack: Option<f64>,
    /// Evaluate the grid on several threads. The reduction still runs over
    /// the fixed grid order.
    pub parallel: bool,
}

impl ReportOptions {
    pub fn new(grid_size: usize, lambda: Option<f64>) -> Self {
        ReportOptions {
            grid_size,
            lambda,
            range: None,
            strict: false,
            slack: None,
            parallel: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RicciReport {
    pub grid_size: usize,
    pub range: Interval,
    pub excluded: Vec<Interval>,
    pub lambda: Option<f64>,
    pub slack: f64,
    pub strict: bool,
    pub global_min: f64,
    pub argmin: f64,
    pub global_max: f64,
    pub radial_min: f64,
    pub block_min: Vec<f64>,
    pub verdict: Option<bool>,
    #[serde(skip)]
    pub samples: Vec<RicciComponents>,
}

impl RicciReport {
    pub fn passed(&self) -> bool {
        self.verdict.unwrap_or(true)
    }

    /// The same sweep judged against a different target, with the default
    /// slack for that target.
    pub fn judged(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self.slack = 1e-8 * lambda.abs().max(1.0);
        self.verdict = Some(if self.strict {
            self.global_min > lambda
        } else {
            self.global_min >= lambda - self.slack
        });
        self
    }

    /// `max - min` over all components and grid points.
    pub fn spread(&self) -> f64 {
        self.global_max - self.global_min
    }
}

/// Sweeps [`ricci_components`] over a uniform grid on the metric interval
/// minus the closure exclusion zones.
pub fn ricci_report(
    metric: &MultiWarpedMetric,
    grid_size: usize,
    lambda: Option<f64>,
) -> Result<RicciReport> {
    ricci_report_with(metric, &ReportOptions::new(grid_size, lambda))
}

pub fn ricci_report_with(metric: &MultiWarpedMetric, opts: &ReportOptions) -> Result<RicciReport> {
    if opts.grid_size < 2 {
        return Err(Error::input(format!(
            "grid size must be at least 2, got {}",
            opts.grid_size
        )));
    }
    let full = metric.interval();
    let mut lo = full.lo;
    let mut hi = full.hi;
    let mut excluded = Vec::new();
    for c in metric.closures() {
        match c.end {
            Endpoint::Left => {
                lo = full.lo + T_MIN;
                excluded.push(Interval::new(full.lo, lo));
            }
            Endpoint::Right => {
                hi = full.hi - T_MIN;
                excluded.push(Interval::new(hi, full.hi));
            }
        }
    }
    if let Some(r) = opts.range {
        if !full.contains_interval(&r) {
            return Err(Error::input(format!(
                "range [{}, {}] is not inside [{}, {}]",
                r.lo, r.hi, full.lo, full.hi
            )));
        }
        lo = lo.max(r.lo);
        hi = hi.min(r.hi);
    }
    if !(lo < hi) {
        return Err(Error::input("the sweep range is empty after exclusions"));
    }
    let grid = linspace(lo, hi, opts.grid_size);
    let samples = evaluate(metric, &grid, opts.parallel)?;

    let mut global_min = f64::INFINITY;
    let mut global_max = f64::NEG_INFINITY;
    let mut argmin = grid[0];
    let mut radial_min = f64::INFINITY;
    let mut block_min = vec![f64::INFINITY; metric.blocks().len()];
    for s in &samples {
        let m = s.min();
        if m < global_min || m.is_nan() && !global_min.is_nan() {
            argmin = s.t;
        }
        global_min = nan_min(global_min, m);
        let mx = s.max();
        global_max = if mx.is_nan() {
            f64::NAN
        } else {
            global_max.max(mx)
        };
        radial_min = nan_min(radial_min, s.radial);
        for (bm, b) in block_min.iter_mut().zip(&s.blocks) {
            *bm = nan_min(*bm, b.lo);
        }
    }
    let slack = opts
        .slack
        .unwrap_or_else(|| 1e-8 * opts.lambda.map_or(1.0, |l| l.abs().max(1.0)));
    let verdict = opts.lambda.map(|l| {
        if opts.strict {
            global_min > l
        } else {
            global_min >= l - slack
        }
    });
    Ok(RicciReport {
        grid_size: opts.grid_size,
        range: Interval::new(lo, hi),
        excluded,
        lambda: opts.lambda,
        slack,
        strict: opts.strict,
        global_min,
        argmin,
        global_max,
        radial_min,
        block_min,
        verdict,
        samples,
    })
}

fn evaluate(
    metric: &MultiWarpedMetric,
    grid: &[f64],
    parallel: bool,
) -> Result<Vec<RicciComponents>> {
    let workers = if parallel {
        thread::available_parallelism()
            .map_or(1, |n| n.get())
            .min(grid.len())
    } else {
        1
    };
    if workers <= 1 {
        return grid.iter().map(|&t| ricci_components(metric, t)).collect();
    }
    let chunk = grid.len().div_ceil(workers);
    thread::scope(|scope| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&t| ricci_components(metric, t))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(grid.len());
        for h in handles {
            out.extend(h.join().expect("ricci worker panicked")?);
        }
        Ok(out)
    })
}

/// `Π Vol(gᵢ) · ∫ Π fᵢ^{nᵢ} dt`.
pub fn volume(metric: &MultiWarpedMetric) -> Result<f64> {
    let mut factor_volume = 1.0;
    for b in metric.blocks() {
        factor_volume *= b.factor.volume()?;
    }
    let Interval { lo, hi } = metric.interval();
    let q = integrate(
        |t| {
            metric
                .blocks()
                .iter()
                .map(|b| b.profile.jet(t.clamp(lo, hi)).f.powi(b.factor.dim as i32))
                .product()
        },
        lo,
        hi,
        1e-11,
        0.0,
    )?;
    Ok(factor_volume * q.value)
}
