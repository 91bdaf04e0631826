use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    ShaYang,
    Neck,
    Closability,
    Gn,
    Docking,
    LimitSpace,
    Glue,
    Export,
}

impl Scenario {
    pub fn id(self) -> &'static str {
        match self {
            Scenario::ShaYang => "sha-yang",
            Scenario::Neck => "neck",
            Scenario::Closability => "closability",
            Scenario::Gn => "gn",
            Scenario::Docking => "docking",
            Scenario::LimitSpace => "limit-space",
            Scenario::Glue => "glue",
            Scenario::Export => "export",
        }
    }

    /// Parameter keys the scenario reads, besides the output keys.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Scenario::ShaYang => &["n", "m", "T", "grid", "tol", "lambda"],
            Scenario::Neck => &["nu", "n", "s", "kappa", "grid", "lambda"],
            Scenario::Closability => &["n", "c_max", "kappa", "grid", "lambda"],
            Scenario::Gn => &["n", "eps", "rho", "grid", "tol", "lambda"],
            Scenario::Docking => &["n", "check_round", "grid", "lambda"],
            Scenario::LimitSpace => &["n", "radii", "c_max", "kappa", "grid", "lambda"],
            Scenario::Glue => &["n", "radius_a", "kappa_a", "radius_b", "kappa_b", "tol"],
            Scenario::Export => &[
                "profile", "points", "n", "m", "T", "nu", "s", "eps", "c", "tol",
            ],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Profiles that `export` can write.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileId {
    ShaYangF,
    ShaYangH,
    Neck,
    K,
    Collar,
    Closability,
    DockingR,
}

impl ProfileId {
    pub fn id(self) -> &'static str {
        match self {
            ProfileId::ShaYangF => "sha-yang-f",
            ProfileId::ShaYangH => "sha-yang-h",
            ProfileId::Neck => "neck",
            ProfileId::K => "k",
            ProfileId::Collar => "collar",
            ProfileId::Closability => "closability",
            ProfileId::DockingR => "docking-r",
        }
    }
}

/// Every setting a run can take, from flags or from a config file. Unset
/// fields fall back to the scenario defaults.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize)]
pub struct Params {
    /// Dimension parameter of the scenario.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sphere dimension `m` of the Sha–Yang space.
    #[arg(long)]
    pub m: Option<usize>,
    /// End of the Sha–Yang interval.
    #[arg(long = "T", id = "T")]
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Comma-separated values of the neck parameter `s`.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    /// Length `ε'` of the flat-step region.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Lower Ricci bound of the cross section `Y`; defaults to `-(n-2)`.
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// Upper end of the collar slope search.
    #[arg(long)]
    pub c_max: Option<f64>,
    /// Collar slope for `export --profile collar`.
    #[arg(long)]
    pub c: Option<f64>,
    /// Principal curvature of the round core boundary.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Comma-separated radii of the round cross sections.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long)]
    pub radius_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_a: Option<f64>,
    #[arg(long)]
    pub radius_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_b: Option<f64>,
    /// Require the docking metric to be the round sphere.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub check_round: Option<bool>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileId>,
    /// Rows per exported profile.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Ricci target; an unreachable value forces a verification failure.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the per-check summary.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub json: Option<bool>,
    /// Also write every profile behind the verdict as CSV.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub csv: Option<bool>,
    /// Evaluate Ricci grids on several threads.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub parallel: Option<bool>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        Params { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Params {
    /// `self` with every field set in `top` replaced.
    pub fn overlay(self, top: Params) -> Params {
        let base = self;
        overlay!(base, top; n, m, t_end, nu, s, eps, rho, c_max, c, kappa, radii, radius_a,
            kappa_a, radius_b, kappa_b, check_round, profile, points, grid, tol, lambda,
            out, json, csv, parallel)
    }

    /// Keys that are set, in config-file spelling.
    fn set_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut mark = |set: bool, key| {
            if set {
                keys.push(key)
            }
        };
        mark(self.n.is_some(), "n");
        mark(self.m.is_some(), "m");
        mark(self.t_end.is_some(), "T");
        mark(self.nu.is_some(), "nu");
        mark(self.s.is_some(), "s");
        mark(self.eps.is_some(), "eps");
        mark(self.rho.is_some(), "rho");
        mark(self.c_max.is_some(), "c_max");
        mark(self.c.is_some(), "c");
        mark(self.kappa.is_some(), "kappa");
        mark(self.radii.is_some(), "radii");
        mark(self.radius_a.is_some(), "radius_a");
        mark(self.kappa_a.is_some(), "kappa_a");
        mark(self.radius_b.is_some(), "radius_b");
        mark(self.kappa_b.is_some(), "kappa_b");
        mark(self.check_round.is_some(), "check_round");
        mark(self.profile.is_some(), "profile");
        mark(self.points.is_some(), "points");
        mark(self.grid.is_some(), "grid");
        mark(self.tol.is_some(), "tol");
        mark(self.lambda.is_some(), "lambda");
        keys
    }

    /// Parses the flat `key = value` config format. Blank lines and lines
    /// starting with `#` are skipped; keys may use `-` or `_`.
    pub fn parse_config(text: &str) -> Result<Params, CliError> {
        let mut p = Params::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| CliError::Config(format!("line {}: {msg}", i + 1));
            let Some((key, value)) = line.split_once('=') else {
                return Err(bad(format!("expected `key = value`, got `{line}`")));
            };
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| bad(format!("`{key}`: not a number: `{v}`")))
            };
            let int = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| bad(format!("`{key}`: not a count: `{v}`")))
            };
            let flag = |v: &str| {
                v.parse::<bool>()
                    .map_err(|_| bad(format!("`{key}`: not a boolean: `{v}`")))
            };
            let list = |v: &str| {
                v.split(',')
                    .map(|x| num(x.trim()))
                    .collect::<Result<Vec<_>, _>>()
            };
            match key.as_str() {
                "n" => p.n = Some(int(value)?),
                "m" => p.m = Some(int(value)?),
                "T" | "t_end" => p.t_end = Some(num(value)?),
                "nu" => p.nu = Some(num(value)?),
                "s" => p.s = Some(list(value)?),
                "eps" => p.eps = Some(num(value)?),
                "rho" => p.rho = Some(num(value)?),
                "c_max" => p.c_max = Some(num(value)?),
                "c" => p.c = Some(num(value)?),
                "kappa" => p.kappa = Some(num(value)?),
                "radii" => p.radii = Some(list(value)?),
                "radius_a" => p.radius_a = Some(num(value)?),
                "kappa_a" => p.kappa_a = Some(num(value)?),
                "radius_b" => p.radius_b = Some(num(value)?),
                "kappa_b" => p.kappa_b = Some(num(value)?),
                "check_round" => p.check_round = Some(flag(value)?),
                "profile" => {
                    p.profile = Some(
                        ProfileId::from_str(value, true)
                            .map_err(|_| bad(format!("unknown profile `{value}`")))?,
                    )
                }
                "points" => p.points = Some(int(value)?),
                "grid" => p.grid = Some(int(value)?),
                "tol" => p.tol = Some(num(value)?),
                "lambda" => p.lambda = Some(num(value)?),
                "out" => p.out = Some(PathBuf::from(value)),
                "json" => p.json = Some(flag(value)?),
                "csv" => p.csv = Some(flag(value)?),
                "parallel" => p.parallel = Some(flag(value)?),
                _ => return Err(bad(format!("unknown key `{key}`"))),
            }
        }
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Params, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Params::parse_config(&text)
    }
}

/// A validated run: the scenario plus every parameter it reads, with
/// defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub schema_version: &'static str,
    pub params: Params,
}

fn positive(name: &str, x: Option<f64>) -> Result<(), CliError> {
    match x {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(CliError::Config(format!(
            "`{name}` must be positive and finite, got {v}"
        ))),
        _ => Ok(()),
    }
}

fn at_least(name: &str, x: Option<usize>, min: usize) -> Result<(), CliError> {
    match x {
        Some(v) if v < min => Err(CliError::Config(format!(
            "`{name}` must be at least {min}, got {v}"
        ))),
        _ => Ok(()),
    }
}

impl RunConfig {
    /// Merges the config file (if any) under the flags, rejects keys the
    /// scenario does not read, fills in defaults and checks the scenario's
    /// preconditions.
    pub fn resolve(
        scenario: Scenario,
        file: Option<Params>,
        flags: Params,
    ) -> Result<RunConfig, CliError> {
        let p = file.unwrap_or_default().overlay(flags);
        let allowed = scenario.keys();
        if let Some(k) = p.set_keys().into_iter().find(|k| !allowed.contains(k)) {
            return Err(CliError::Config(format!(
                "`{k}` does not apply to {scenario}"
            )));
        }
        let p = defaults(scenario, p);
        validate(scenario, &p)?;
        Ok(RunConfig {
            scenario,
            schema_version: SCHEMA_VERSION,
            params: p,
        })
    }

    pub fn out_dir(&self) -> PathBuf {
        self.params
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from("warpcheck-out"))
    }
}

fn defaults(scenario: Scenario, mut p: Params) -> Params {
    fn set<T>(slot: &mut Option<T>, v: T) {
        slot.get_or_insert(v);
    }
    match scenario {
        Scenario::ShaYang => {
            set(&mut p.n, 2);
            set(&mut p.m, 2);
            set(&mut p.t_end, 50.0);
            set(&mut p.grid, 10_000);
            set(&mut p.tol, 1e-10);
            set(&mut p.lambda, 0.0);
        }
        Scenario::Neck => {
            set(&mut p.nu, 0.1);
            set(&mut p.n, 5);
            set(&mut p.s, vec![0.5, 0.25, 0.1, 0.01]);
            set(&mut p.kappa, 1.0);
            set(&mut p.grid, 2000);
        }
        Scenario::Closability => {
            set(&mut p.n, 4);
            set(&mut p.c_max, 1.0);
            set(&mut p.kappa, 1.0);
            set(&mut p.grid, 1000);
            set(&mut p.lambda, 0.0);
        }
        Scenario::Gn => {
            set(&mut p.n, 5);
            set(&mut p.eps, 0.2);
            let n = p.n.unwrap_or(5) as f64;
            set(&mut p.rho, -(n - 2.0));
            set(&mut p.grid, 10_000);
            set(&mut p.tol, 1e-12);
            set(&mut p.lambda, 0.0);
        }
        Scenario::Docking => {
            set(&mut p.n, 3);
            set(&mut p.check_round, false);
            set(&mut p.grid, 2000);
            set(&mut p.lambda, 0.0);
        }
        Scenario::LimitSpace => {
            set(&mut p.n, 5);
            set(&mut p.radii, vec![1.0]);
            set(&mut p.c_max, 1.0);
            set(&mut p.kappa, 1.0);
            set(&mut p.grid, 2000);
        }
        Scenario::Glue => {
            set(&mut p.n, 4);
            set(&mut p.tol, 1e-12);
        }
        Scenario::Export => {
            set(&mut p.points, 1001);
            match p.profile {
                Some(ProfileId::ShaYangF | ProfileId::ShaYangH) => {
                    set(&mut p.n, 2);
                    set(&mut p.m, 2);
                    set(&mut p.t_end, 50.0);
                    set(&mut p.tol, 1e-10);
                }
                Some(ProfileId::Neck) => {
                    set(&mut p.nu, 0.1);
                    set(&mut p.s, vec![0.5]);
                }
                Some(ProfileId::K) => set(&mut p.eps, 0.2),
                Some(ProfileId::Collar) => set(&mut p.c, 0.25),
                Some(ProfileId::Closability) => {
                    set(&mut p.n, 5);
                    set(&mut p.eps, 0.2);
                    set(&mut p.tol, 1e-12);
                }
                Some(ProfileId::DockingR) | None => {}
            }
        }
    }
    set(&mut p.json, false);
    set(&mut p.csv, false);
    set(&mut p.parallel, false);
    p
}

fn validate(scenario: Scenario, p: &Params) -> Result<(), CliError> {
    for (name, x) in [
        ("T", p.t_end),
        ("nu", p.nu),
        ("eps", p.eps),
        ("c_max", p.c_max),
        ("c", p.c),
        ("kappa", p.kappa),
        ("radius_a", p.radius_a),
        ("radius_b", p.radius_b),
        ("tol", p.tol),
    ] {
        positive(name, x)?;
    }
    for (name, xs) in [("s", &p.s), ("radii", &p.radii)] {
        if let Some(xs) = xs {
            if xs.is_empty() {
                return Err(CliError::Config(format!(
                    "`{name}` needs at least one value"
                )));
            }
            for &x in xs {
                positive(name, Some(x))?;
            }
        }
    }
    if let Some(l) = p.lambda {
        if !l.is_finite() {
            return Err(CliError::Config(format!(
                "`lambda` must be finite, got {l}"
            )));
        }
    }
    at_least("grid", p.grid, 2)?;
    at_least("points", p.points, 2)?;
    match scenario {
        Scenario::ShaYang => {
            at_least("n", p.n, 2)?;
            at_least("m", p.m, 2)?;
        }
        Scenario::Neck | Scenario::Gn | Scenario::Docking | Scenario::LimitSpace => {
            at_least("n", p.n, 3)?
        }
        Scenario::Closability | Scenario::Glue => at_least("n", p.n, 2)?,
        Scenario::Export => {
            if p.profile.is_none() {
                return Err(CliError::Config("export needs `profile`".into()));
            }
            if let Some(s) = &p.s {
                if s.len() != 1 {
                    return Err(CliError::Config(
                        "export takes a single value of `s`".into(),
                    ));
                }
            }
        }
    }
    if scenario == Scenario::Glue {
        let given = [p.radius_a, p.kappa_a, p.radius_b, p.kappa_b]
            .iter()
            .filter(|x| x.is_some())
            .count();
        if given != 0 && given != 4 {
            return Err(CliError::Config(
                "glue needs all of radius_a, kappa_a, radius_b, kappa_b, or none".into(),
            ));
        }
    }
    Ok(())
}
