//! Command-line front end for the warpcheck scenarios.
//!
//! A run resolves a [`RunConfig`] from flags and an optional flat config
//! file, evaluates one scenario, writes a JSON report (and CSV profile dumps
//! on request) and maps the outcome to an exit code:
//!
//! - `0`: every check passed.
//! - `1`: some check failed; the report is still written.
//! - `2`: bad input, config or output path; nothing is written.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod export;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;
use warpcheck_core::constructions::{
    boundary_gluing, collar_closability, docking_ambient, gn_regions, hemisphere_doubling,
    limit_space_hypotheses, neck_family_check, sha_yang_space, CertifiedBlock, Check,
    CollarOptions, DockingOptions, GnOptions, LimitOptions, NeckOptions, ScenarioVerdict,
    ShaYangOptions,
};
use warpcheck_core::curvature::{rescale_metric, BoundaryData, MultiWarpedMetric};
use warpcheck_core::factors::FactorManifold;
use warpcheck_core::numerics::Interval;
use warpcheck_core::profiles::{
    closability_ode_profile, collar_profile, docking_r_profile, k_profile, neck_profile,
    sha_yang_profiles, WarpProfile,
};

pub use config::{Params, ProfileId, RunConfig, Scenario};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] warpcheck_core::Error),

    #[error("cannot write {}: {message}", path.display())]
    Output { path: PathBuf, message: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// What a finished run produced.
#[derive(Debug)]
pub struct Outcome {
    pub pass: bool,
    /// The JSON report; `None` for `export`.
    pub report: Option<Value>,
    pub report_path: Option<PathBuf>,
    pub artifacts: Vec<PathBuf>,
    /// One line per check plus a closing verdict line.
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn output_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn get<T: Clone>(x: &Option<T>, key: &str) -> Result<T, CliError> {
    x.clone()
        .ok_or_else(|| CliError::Config(format!("`{key}` is not set")))
}

/// Runs the scenario. Input errors surface before anything is written.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    if config.scenario == Scenario::Export {
        return run_export(config);
    }
    let verdict = match evaluate(config) {
        Ok(v) => v,
        Err(CliError::Core(e)) if !e.is_input_error() => failed_computation(config, e),
        Err(e) => return Err(e),
    };

    let p = &config.params;
    let dir = config.out_dir();
    fs::create_dir_all(&dir).map_err(|e| output_error(&dir, e))?;
    let mut artifacts = Vec::new();
    if p.csv.unwrap_or(false) {
        let points = p.grid.unwrap_or(1001);
        for (name, profile) in &verdict.profiles {
            let path = export::profile_file(&dir, config.scenario.id(), name);
            export::write_profile_csv(&path, profile, points)?;
            artifacts.push(path);
        }
    }
    let report = report::build(config, &verdict, &artifacts)?;
    let path = dir.join(format!("{}.json", config.scenario.id()));
    fs::write(&path, report::render(&report)?).map_err(|e| output_error(&path, e))?;

    let mut summary: Vec<String> = verdict.checks.iter().map(|c| c.to_string()).collect();
    summary.push(format!(
        "{}: {} ({} of {} checks passed)",
        verdict.scenario,
        if verdict.overall_pass { "PASS" } else { "FAIL" },
        verdict.checks.iter().filter(|c| c.pass).count(),
        verdict.checks.len()
    ));
    Ok(Outcome {
        pass: verdict.overall_pass,
        report: Some(report),
        report_path: Some(path),
        artifacts,
        summary,
    })
}

/// A failing verdict for a computation that broke down.
fn failed_computation(config: &RunConfig, e: warpcheck_core::Error) -> ScenarioVerdict {
    match e {
        warpcheck_core::Error::SearchFailure {
            message,
            diagnostics,
        } => {
            let mut v = *diagnostics;
            v.note("error", message);
            v.push(Check::flag("search", "a certified parameter exists", false));
            v
        }
        other => {
            let mut v = ScenarioVerdict::new(config.scenario.id());
            v.note("error", other.to_string());
            v.push(Check::flag(
                "computation",
                "the scenario ran to completion",
                false,
            ));
            v
        }
    }
}

/// Runs the scenario without writing anything.
pub fn evaluate(config: &RunConfig) -> Result<ScenarioVerdict, CliError> {
    let p = &config.params;
    let n = get(&p.n, "n")?;
    let v = match config.scenario {
        Scenario::ShaYang => {
            let opts = ShaYangOptions {
                grid: get(&p.grid, "grid")?,
                tol: get(&p.tol, "tol")?,
                lambda: get(&p.lambda, "lambda")?,
                parallel: p.parallel.unwrap_or(false),
                ..ShaYangOptions::default()
            };
            let factor = FactorManifold::round_sphere(n, 1.0)?;
            sha_yang_space(n, get(&p.m, "m")?, &factor, get(&p.t_end, "T")?, &opts)?
        }
        Scenario::Neck => {
            let core =
                CertifiedBlock::round_core("core", n - 1, 1.0, get(&p.kappa, "kappa")?, 1.0)?;
            let opts = NeckOptions {
                grid: get(&p.grid, "grid")?,
                lambda: p.lambda,
                ..NeckOptions::default()
            };
            neck_family_check(get(&p.nu, "nu")?, n, &get(&p.s, "s")?, &core, &opts)?
        }
        Scenario::Closability => {
            let core = BoundaryData::round(n - 1, 1.0, get(&p.kappa, "kappa")?)?;
            let opts = CollarOptions {
                grid: get(&p.grid, "grid")?,
                lambda: get(&p.lambda, "lambda")?,
                ..CollarOptions::default()
            };
            collar_closability(&core, get(&p.c_max, "c_max")?, n, &opts)?
        }
        Scenario::Gn => {
            let rho = get(&p.rho, "rho")?;
            let y = FactorManifold::abstract_factor("Y", n - 1, Interval::point(rho), None)?;
            let opts = GnOptions {
                grid: get(&p.grid, "grid")?,
                tol: get(&p.tol, "tol")?,
                lambda: get(&p.lambda, "lambda")?,
                ..GnOptions::default()
            };
            gn_regions(&y, get(&p.eps, "eps")?, n, &opts)?
        }
        Scenario::Docking => {
            let opts = DockingOptions {
                grid: get(&p.grid, "grid")?,
                lambda: get(&p.lambda, "lambda")?,
                check_round: p.check_round.unwrap_or(false),
                ..DockingOptions::default()
            };
            docking_ambient(n, &opts)?
        }
        Scenario::LimitSpace => {
            let unit = MultiWarpedMetric::round_sphere(n - 1)?;
            let family = get(&p.radii, "radii")?
                .iter()
                .map(|&r| rescale_metric(&unit, 1.0 / r))
                .collect::<Result<Vec<_>, _>>()?;
            let core = BoundaryData::round(n - 1, 1.0, get(&p.kappa, "kappa")?)?;
            let certificate = match collar_closability(
                &core,
                get(&p.c_max, "c_max")?,
                n,
                &CollarOptions::default(),
            ) {
                Ok(v) => v,
                Err(warpcheck_core::Error::SearchFailure { diagnostics, .. }) => *diagnostics,
                Err(e) => return Err(e.into()),
            };
            let opts = LimitOptions {
                grid: get(&p.grid, "grid")?,
                lambda: p.lambda,
                ..LimitOptions::default()
            };
            limit_space_hypotheses(&family, n, 0, Some(&certificate), &opts)?
        }
        Scenario::Glue => {
            let tol = get(&p.tol, "tol")?;
            match (p.radius_a, p.kappa_a, p.radius_b, p.kappa_b) {
                (Some(ra), Some(ka), Some(rb), Some(kb)) => boundary_gluing(
                    &BoundaryData::round(n - 1, ra, ka)?,
                    &BoundaryData::round(n - 1, rb, kb)?,
                    tol,
                ),
                _ => hemisphere_doubling(n, tol)?,
            }
        }
        Scenario::Export => {
            return Err(CliError::Config(
                "export produces profiles, not a verdict".into(),
            ))
        }
    };
    Ok(v)
}

/// Builds the profile selected by `export`.
pub fn export_profile(config: &RunConfig) -> Result<WarpProfile, CliError> {
    let p = &config.params;
    let profile = match get(&p.profile, "profile")? {
        id @ (ProfileId::ShaYangF | ProfileId::ShaYangH) => {
            let sy = sha_yang_profiles(
                get(&p.n, "n")?,
                get(&p.m, "m")?,
                get(&p.t_end, "T")?,
                get(&p.tol, "tol")?,
            )?;
            if id == ProfileId::ShaYangF {
                sy.f
            } else {
                sy.h
            }
        }
        ProfileId::Neck => neck_profile(get(&p.nu, "nu")?, get(&p.s, "s")?[0])?,
        ProfileId::K => k_profile(get(&p.eps, "eps")?)?,
        ProfileId::Collar => collar_profile(get(&p.c, "c")?, 1.0)?,
        ProfileId::Closability => {
            closability_ode_profile(get(&p.n, "n")?, get(&p.eps, "eps")?, get(&p.tol, "tol")?)?
        }
        ProfileId::DockingR => docking_r_profile()?,
    };
    Ok(profile)
}

fn run_export(config: &RunConfig) -> Result<Outcome, CliError> {
    let profile = export_profile(config)?;
    let points = get(&config.params.points, "points")?;
    let dir = config.out_dir();
    fs::create_dir_all(&dir).map_err(|e| output_error(&dir, e))?;
    let id = get(&config.params.profile, "profile")?.id();
    let path = dir.join(format!("{id}.csv"));
    export::write_profile_csv(&path, &profile, points)?;
    Ok(Outcome {
        pass: true,
        report: None,
        report_path: None,
        summary: vec![format!("wrote {} ({points} rows)", path.display())],
        artifacts: vec![path],
    })
}
