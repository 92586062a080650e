//! Cohort manifest and session CSV formats.
//!
//! Manifest: `child_id,age_years,gender,sems_label,session_file` with gender
//! `f` or `m`; session paths are resolved relative to the manifest's
//! directory. Session files: one row per frame,
//! `timestamp_ms,tip_pressure,...,writing_speed` in channel order.
//!
//! All files are UTF-8, Unix line endings, comma-separated, unquoted. Floats
//! are written with Rust's shortest round-trip formatting (at most 17
//! significant digits), so write-then-parse is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::model::{ChildMeta, Gender, SensorFrame, WritingSession};
use crate::error::{Error, Result};

pub const MANIFEST_HEADER: &str = "child_id,age_years,gender,sems_label,session_file";
pub const SESSION_HEADER: &str =
    "timestamp_ms,tip_pressure,finger_pressure,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,angle,writing_speed";

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_f64(path: &Path, line: usize, field: &str, cell: &str) -> Result<f64> {
    let v: f64 = cell
        .parse()
        .map_err(|_| Error::parse(path, line, format!("non-numeric {field}: `{cell}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("non-finite {field}: `{cell}`")));
    }
    Ok(v)
}

/// Parses a cohort manifest and every session file it references.
///
/// Checks (not repairs) the session invariants: strictly increasing
/// timestamps, non-negative pressures and speed, label within
/// `[0, scale_max]`. Every failure names the file and line.
pub fn parse_cohort(manifest_path: &Path, scale_max: f64) -> Result<Vec<WritingSession>> {
    let text = read_to_string(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut lines = text.lines().enumerate();

    match lines.next() {
        Some((_, header)) if header.trim_end() == MANIFEST_HEADER => {}
        Some((_, header)) => {
            return Err(Error::parse(
                manifest_path,
                1,
                format!("bad manifest header `{header}`, expected `{MANIFEST_HEADER}`"),
            ))
        }
        None => return Err(Error::parse(manifest_path, 1, "empty manifest")),
    }

    let mut sessions = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end();
        if row.is_empty() {
            continue;
        }
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != 5 {
            return Err(Error::parse(
                manifest_path,
                line,
                format!("expected 5 columns, got {}", cells.len()),
            ));
        }
        let child_id = cells[0].to_string();
        let age_years = parse_f64(manifest_path, line, "age_years", cells[1])?;
        if age_years <= 0.0 {
            return Err(Error::parse(manifest_path, line, "age_years must be > 0"));
        }
        let gender = match cells[2] {
            "f" => Gender::Female,
            "m" => Gender::Male,
            other => {
                return Err(Error::parse(
                    manifest_path,
                    line,
                    format!("gender must be `f` or `m`, got `{other}`"),
                ))
            }
        };
        let sems_label = parse_f64(manifest_path, line, "sems_label", cells[3])?;
        if !(0.0..=scale_max).contains(&sems_label) {
            return Err(Error::parse(
                manifest_path,
                line,
                format!("sems_label {sems_label} outside [0, {scale_max}]"),
            ));
        }
        let session_path = base.join(cells[4]);
        let frames = parse_session(&session_path)?;
        if frames.is_empty() {
            return Err(Error::parse(&session_path, 1, "session has no frames"));
        }
        sessions.push(WritingSession {
            meta: ChildMeta {
                child_id,
                age_years,
                gender,
            },
            frames,
            sems_label,
        });
    }
    Ok(sessions)
}

/// Parses one session CSV into frames, applying the frame invariants.
pub fn parse_session(path: &Path) -> Result<Vec<SensorFrame>> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    match lines.next() {
        Some((_, header)) if header.trim_end() == SESSION_HEADER => {}
        Some((_, header)) => {
            return Err(Error::parse(
                path,
                1,
                format!("bad session header `{header}`"),
            ))
        }
        None => return Err(Error::parse(path, 1, "empty session file")),
    }

    let mut frames: Vec<SensorFrame> = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end();
        if row.is_empty() {
            continue;
        }
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != 11 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 11 columns, got {}", cells.len()),
            ));
        }
        let timestamp_ms: u64 = cells[0].parse().map_err(|_| {
            Error::parse(path, line, format!("non-integer timestamp_ms: `{}`", cells[0]))
        })?;
        let mut ch = [0.0; 10];
        for (i, cell) in cells[1..].iter().enumerate() {
            ch[i] = parse_f64(path, line, super::CHANNEL_NAMES[i], cell)?;
        }
        if let Some(prev) = frames.last() {
            if timestamp_ms <= prev.timestamp_ms {
                return Err(Error::parse(
                    path,
                    line,
                    format!(
                        "timestamps must be strictly increasing ({} after {})",
                        timestamp_ms, prev.timestamp_ms
                    ),
                ));
            }
        }
        for (name, value) in [("tip_pressure", ch[0]), ("finger_pressure", ch[1]), ("writing_speed", ch[9])] {
            if value < 0.0 {
                return Err(Error::parse(
                    path,
                    line,
                    format!("{name} must be non-negative, got {value}"),
                ));
            }
        }
        frames.push(SensorFrame::from_channels(timestamp_ms, ch));
    }
    Ok(frames)
}

/// Writes `contents` to `path` atomically (write to a sibling temp file, then
/// rename).
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|source| Error::Io {
        path: tmp.clone(),
        source,
    })?;
    fs::rename(&tmp, path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn session_csv(frames: &[SensorFrame]) -> String {
    let mut out = String::new();
    out.push_str(SESSION_HEADER);
    out.push('\n');
    for f in frames {
        write!(out, "{}", f.timestamp_ms).unwrap();
        for v in f.channels() {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Writes a cohort (manifest plus one session CSV per child) under `dir`.
/// Returns the manifest path.
pub fn write_cohort(sessions: &[WritingSession], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut manifest = String::from(MANIFEST_HEADER);
    manifest.push('\n');
    for (i, s) in sessions.iter().enumerate() {
        let file = format!("session_{i:03}.csv");
        write_atomic(&dir.join(&file), &session_csv(&s.frames))?;
        writeln!(
            manifest,
            "{},{},{},{},{}",
            s.meta.child_id,
            s.meta.age_years,
            s.meta.gender.literal(),
            s.sems_label,
            file
        )
        .unwrap();
    }
    let manifest_path = dir.join("manifest.csv");
    write_atomic(&manifest_path, &manifest)?;
    Ok(manifest_path)
}
