//! JSON verification reports.
//!
//! Every number is written as a decimal string (the shortest round-trip
//! form, `NaN` and `inf` included) so reports compare byte for
//! byte across platforms. Maps are ordered, so equal runs give equal files.

use std::path::PathBuf;

use serde_json::{json, Map, Value};
use warpcheck_core::constructions::{Relation, ScenarioVerdict};

use crate::config::RunConfig;
use crate::CliError;

pub fn num(x: f64) -> Value {
    Value::String(format!("{x:?}"))
}

/// Replaces every JSON number with its decimal string.
pub fn stringify(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(match n.as_f64() {
            Some(x) if !(n.is_u64() || n.is_i64()) => format!("{x:?}"),
            _ => n.to_string(),
        }),
        Value::Array(xs) => Value::Array(xs.into_iter().map(stringify).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, stringify(v))).collect()),
        other => other,
    }
}

fn number_map<'a>(m: impl IntoIterator<Item = (&'a String, &'a f64)>) -> Value {
    Value::Object(m.into_iter().map(|(k, &v)| (k.clone(), num(v))).collect())
}

pub fn build(
    config: &RunConfig,
    verdict: &ScenarioVerdict,
    artifacts: &[PathBuf],
) -> Result<Value, CliError> {
    let checks: Vec<Value> = verdict
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "anchor": c.anchor,
                "value": num(c.value),
                "relation": c.relation.to_string(),
                "threshold": num(c.threshold),
                "pass": c.pass,
            })
        })
        .collect();
    let mut reports = Map::new();
    for (name, r) in &verdict.reports {
        reports.insert(name.clone(), stringify(serde_json::to_value(r)?));
    }
    Ok(json!({
        "schema_version": config.schema_version,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "scenario": verdict.scenario,
        "config": stringify(serde_json::to_value(config)?),
        "checks": checks,
        "overall_pass": verdict.overall_pass,
        "metrics": number_map(&verdict.metrics),
        "tolerances": number_map(&verdict.tolerances),
        "metadata": verdict.metadata,
        "reports": reports,
        "artifacts": artifacts.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    }))
}

pub fn render(report: &Value) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn relation(s: &str) -> Option<Relation> {
    Some(match s {
        "<=" => Relation::AtMost,
        "<" => Relation::Below,
        ">=" => Relation::AtLeast,
        ">" => Relation::Above,
        _ => return None,
    })
}

/// Re-judges every check of a written report from its recorded value,
/// relation and threshold, and returns the overall verdict. Fails if a
/// recorded `pass` flag disagrees with the recomputation.
pub fn revalidate(report: &Value) -> Result<bool, CliError> {
    let bad = |msg: String| CliError::Config(format!("malformed report: {msg}"));
    let checks = report["checks"]
        .as_array()
        .ok_or_else(|| bad("no `checks` array".into()))?;
    let mut all = true;
    for c in checks {
        let name = c["name"].as_str().unwrap_or("?");
        let field = |k: &str| -> Result<f64, CliError> {
            c[k].as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(format!("check `{name}` has no numeric `{k}`")))
        };
        let rel = c["relation"]
            .as_str()
            .and_then(relation)
            .ok_or_else(|| bad(format!("check `{name}` has no relation")))?;
        let pass = rel.holds(field("value")?, field("threshold")?);
        if Some(pass) != c["pass"].as_bool() {
            return Err(bad(format!("check `{name}` records the wrong verdict")));
        }
        all &= pass;
    }
    if Some(all) != report["overall_pass"].as_bool() {
        return Err(bad("`overall_pass` disagrees with the checks".into()));
    }
    Ok(all)
}
