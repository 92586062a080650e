//! Cohort file-format tests: parsing, error reporting with file and line,
//! and lossless write/parse round-trips.

use std::fs;

use proptest::prelude::*;
use sensoscore::data::{
    generate_synthetic_cohort, parse_cohort, write_cohort, ChildMeta, Gender, SensorFrame,
    SynthConfig, WritingSession, MANIFEST_HEADER, SESSION_HEADER,
};
use sensoscore::error::Error;

fn write_files(dir: &std::path::Path, manifest_rows: &[&str], session: &str) -> std::path::PathBuf {
    let manifest = format!("{MANIFEST_HEADER}\n{}\n", manifest_rows.join("\n"));
    fs::write(dir.join("manifest.csv"), manifest).unwrap();
    fs::write(dir.join("s0.csv"), session).unwrap();
    dir.join("manifest.csv")
}

#[test]
fn parses_a_minimal_cohort() {
    let dir = tempfile::tempdir().unwrap();
    let session = format!(
        "{SESSION_HEADER}\n0,1,2,3,4,5,6,7,8,45,10\n10,1.5,2,3,4,5,6,7,8,44,9\n20,2,2,3,4,5,6,7,8,43,8\n"
    );
    let manifest = write_files(dir.path(), &["kid1,8.5,f,3.25,s0.csv"], &session);
    let cohort = parse_cohort(&manifest, 12.0).unwrap();
    assert_eq!(cohort.len(), 1);
    assert_eq!(cohort[0].frames.len(), 3);
    assert_eq!(cohort[0].meta.child_id, "kid1");
    assert_eq!(cohort[0].meta.gender, Gender::Female);
    assert_eq!(cohort[0].sems_label, 3.25);
    assert_eq!(cohort[0].frames[1].tip_pressure, 1.5);
}

#[test]
fn wrong_column_count_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    // 9 value columns instead of 10
    let session = format!("{SESSION_HEADER}\n0,1,2,3,4,5,6,7,8,45\n");
    let manifest = write_files(dir.path(), &["kid1,8.5,f,3,s0.csv"], &session);
    match parse_cohort(&manifest, 12.0).unwrap_err() {
        Error::Parse { path, line, message } => {
            assert!(path.ends_with("s0.csv"));
            assert_eq!(line, 2);
            assert!(message.contains("11 columns"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn non_monotonic_timestamps_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let session = format!(
        "{SESSION_HEADER}\n0,1,2,3,4,5,6,7,8,45,10\n10,1,2,3,4,5,6,7,8,45,10\n10,1,2,3,4,5,6,7,8,45,10\n"
    );
    let manifest = write_files(dir.path(), &["kid1,8.5,m,3,s0.csv"], &session);
    match parse_cohort(&manifest, 12.0).unwrap_err() {
        Error::Parse { line, message, .. } => {
            assert_eq!(line, 4);
            assert!(message.contains("strictly increasing"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn label_out_of_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let session = format!("{SESSION_HEADER}\n0,1,2,3,4,5,6,7,8,45,10\n");
    let manifest = write_files(dir.path(), &["kid1,8.5,f,12.5,s0.csv"], &session);
    match parse_cohort(&manifest, 12.0).unwrap_err() {
        Error::Parse { line, message, .. } => {
            assert_eq!(line, 2);
            assert!(message.contains("sems_label"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_session_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = format!("{MANIFEST_HEADER}\nkid1,8.5,f,3,missing.csv\n");
    fs::write(dir.path().join("manifest.csv"), manifest).unwrap();
    match parse_cohort(&dir.path().join("manifest.csv"), 12.0).unwrap_err() {
        Error::Io { path, .. } => assert!(path.ends_with("missing.csv")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn bad_gender_and_non_numeric_cells_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let session = format!("{SESSION_HEADER}\n0,1,2,3,4,5,6,7,8,45,10\n");
    let manifest = write_files(dir.path(), &["kid1,8.5,x,3,s0.csv"], &session);
    assert!(matches!(parse_cohort(&manifest, 12.0), Err(Error::Parse { line: 2, .. })));

    let session_bad = format!("{SESSION_HEADER}\n0,1,2,oops,4,5,6,7,8,45,10\n");
    let manifest2 = write_files(dir.path(), &["kid1,8.5,f,3,s0.csv"], &session_bad);
    match parse_cohort(&manifest2, 12.0).unwrap_err() {
        Error::Parse { line, message, .. } => {
            assert_eq!(line, 2);
            assert!(message.contains("acc_x"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn negative_pressure_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let session = format!("{SESSION_HEADER}\n0,-1,2,3,4,5,6,7,8,45,10\n");
    let manifest = write_files(dir.path(), &["kid1,8.5,f,3,s0.csv"], &session);
    assert!(matches!(parse_cohort(&manifest, 12.0), Err(Error::Parse { line: 2, .. })));
}

#[test]
fn generated_cohort_round_trips_through_files() {
    let cfg = SynthConfig {
        cohort_size: 3,
        frames_per_session: 150,
        ..SynthConfig::default()
    };
    let cohort = generate_synthetic_cohort(&cfg, 42).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_cohort(&cohort, dir.path()).unwrap();
    let back = parse_cohort(&manifest, cfg.scale_max).unwrap();
    assert_eq!(cohort, back);

    // byte-identical on rewrite
    let dir2 = tempfile::tempdir().unwrap();
    write_cohort(&cohort, dir2.path()).unwrap();
    for name in ["manifest.csv", "session_000.csv", "session_002.csv"] {
        let a = fs::read(dir.path().join(name)).unwrap();
        let b = fs::read(dir2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Arbitrary finite channel values survive write -> parse exactly.
    #[test]
    fn session_round_trip_is_lossless(
        rows in proptest::collection::vec(
            proptest::array::uniform10(-1e12f64..1e12), 1..40),
        age in 5.0f64..15.0,
        label in 0.0f64..12.0,
    ) {
        let frames: Vec<SensorFrame> = rows
            .iter()
            .enumerate()
            .map(|(t, ch)| {
                let mut ch = *ch;
                // keep the non-negative channels non-negative
                ch[0] = ch[0].abs();
                ch[1] = ch[1].abs();
                ch[9] = ch[9].abs();
                SensorFrame::from_channels(t as u64 * 7 + 1, ch)
            })
            .collect();
        let session = WritingSession {
            meta: ChildMeta {
                child_id: "p".into(),
                age_years: age,
                gender: Gender::Male,
            },
            frames,
            sems_label: label,
        };
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_cohort(std::slice::from_ref(&session), dir.path()).unwrap();
        let back = parse_cohort(&manifest, 12.0).unwrap();
        prop_assert_eq!(&back[0], &session);
    }
}
