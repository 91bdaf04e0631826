use std::path::{Path, PathBuf};

use warpcheck_core::profiles::WarpProfile;

use crate::CliError;

/// Writes `profile` sampled at `points` evenly spaced points as
/// `t,f,fp,fpp`, one row per point.
pub fn write_profile_csv(
    path: &Path,
    profile: &WarpProfile,
    points: usize,
) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["t", "f", "fp", "fpp"]).map_err(io)?;
    for (t, j) in profile.sample(points) {
        w.write_record([t, j.f, j.fp, j.fpp].map(|x| format!("{x:?}")))
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(())
}

/// File name for a profile attached to a scenario verdict.
pub fn profile_file(dir: &Path, scenario: &str, name: &str) -> PathBuf {
    let clean: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    dir.join(format!("{scenario}_{clean}.csv"))
}
