//! The subcommands. Each writes its artifacts atomically and finishes with a
//! run manifest.

use std::path::Path;

use sensoscore::attention::{importance_report, overall_csv, per_timestep_csv, train_imv};
use sensoscore::data::{
    generate_synthetic_cohort, normalize, parse_cohort, parse_session, segment_session, ChildMeta,
    Gender, WritingSession,
};
use sensoscore::error::{Error, Result};
use sensoscore::pipeline::{
    architecture_sweep, combined_csv, combined_importance, dump_trace, predict_sems, run_cv,
    svr_importance_csv, svr_input_importance, sweep_csv, ModelBundle,
};
use sensoscore::seeds;

use crate::config::ResolvedConfig;
use crate::manifest::{ensure_dir, RunRecorder};

pub fn generate(cfg: &ResolvedConfig, out_dir: &Path) -> Result<()> {
    let mut rec = RunRecorder::new("generate");
    ensure_dir(out_dir)?;
    let cohort = generate_synthetic_cohort(&cfg.synth, cfg.seed)?;
    let manifest_path = sensoscore::data::write_cohort(&cohort, out_dir)?;
    for i in 0..cohort.len() {
        rec.output(out_dir.join(format!("session_{i:03}.csv")));
    }
    rec.output(manifest_path);
    rec.finish(out_dir, cfg)?;
    println!(
        "generated {} sessions x {} frames under {}",
        cohort.len(),
        cfg.synth.frames_per_session,
        out_dir.display()
    );
    Ok(())
}

fn history_csv(history: &sensoscore::lstm::TrainingHistory) -> String {
    let mut out = String::from("epoch,train_mse,val_mse\n");
    for (e, (t, v)) in history.train_mse.iter().zip(&history.val_mse).enumerate() {
        out.push_str(&format!("{},{},{}\n", e + 1, t, v));
    }
    out
}

fn validation_csv(report: &sensoscore::pipeline::ValidationReport) -> String {
    let mut out = String::from("metric,value\n");
    let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    for (level, row) in [("window", &report.window), ("child", &report.child)] {
        out.push_str(&format!("{level}_rmse,{}\n", row.rmse));
        out.push_str(&format!("{level}_accuracy,{}\n", cell(row.accuracy)));
        out.push_str(&format!("{level}_f1,{}\n", cell(row.f1)));
        out.push_str(&format!("{level}_sensitivity,{}\n", cell(row.sensitivity)));
        out.push_str(&format!("{level}_specificity,{}\n", cell(row.specificity)));
    }
    out.push_str(&format!("best_epoch,{}\n", report.history.best_epoch + 1));
    out
}

pub fn train(cfg: &ResolvedConfig, cohort_manifest: &Path, out_dir: &Path) -> Result<()> {
    let mut rec = RunRecorder::new("train");
    rec.input(cohort_manifest);
    ensure_dir(out_dir)?;
    let cohort = parse_cohort(cohort_manifest, cfg.scale_max)?;
    let (models, report) = sensoscore::pipeline::train_pipeline(&cohort, &cfg.pipeline)?;

    let bundle = ModelBundle::new(&models, &cfg.pipeline);
    let bundle_path = out_dir.join("bundle.json");
    bundle.save(&bundle_path)?;
    rec.output(bundle_path);
    rec.write(out_dir.join("validation_metrics.csv"), &validation_csv(&report))?;
    rec.write(out_dir.join("training_history.csv"), &history_csv(&report.history))?;
    rec.finish(out_dir, cfg)?;
    println!(
        "trained on {} children; validation child-level RMSE {:.4} (best epoch {})",
        report.train_children.len(),
        report.child.rmse,
        report.history.best_epoch + 1
    );
    Ok(())
}

pub fn crossval(cfg: &ResolvedConfig, cohort_manifest: &Path, out_dir: &Path) -> Result<()> {
    let mut rec = RunRecorder::new("crossval");
    rec.input(cohort_manifest);
    ensure_dir(out_dir)?;
    let cohort = parse_cohort(cohort_manifest, cfg.scale_max)?;
    let report = run_cv(&cohort, &cfg.pipeline)?;
    rec.write(out_dir.join("cv_report.csv"), &report.to_csv())?;
    rec.finish(out_dir, cfg)?;
    let child = report.child_aggregate();
    println!(
        "{} trials; child-level RMSE {:.4} +/- {:.4}",
        report.trials.len(),
        child.mean.rmse,
        child.std.rmse
    );
    Ok(())
}

pub fn sweep(cfg: &ResolvedConfig, cohort_manifest: &Path, out_dir: &Path) -> Result<()> {
    let mut rec = RunRecorder::new("sweep");
    rec.input(cohort_manifest);
    ensure_dir(out_dir)?;
    let cohort = parse_cohort(cohort_manifest, cfg.scale_max)?;
    let rows = architecture_sweep(&cohort, &cfg.pipeline, &cfg.sweep_grid)?;
    rec.write(out_dir.join("table1.csv"), &sweep_csv(&rows))?;
    rec.finish(out_dir, cfg)?;
    println!("swept {} architectures", rows.len());
    Ok(())
}

pub fn predict(
    cfg_root: &ResolvedConfig,
    bundle_path: &Path,
    session_path: &Path,
    age: f64,
    gender: Gender,
    child_id: Option<String>,
    out_dir: Option<&Path>,
) -> Result<()> {
    let bundle = ModelBundle::load(bundle_path)?;
    let frames = parse_session(session_path)?;
    if frames.is_empty() {
        return Err(Error::parse(session_path, 1, "session has no frames"));
    }
    let child_id = child_id.unwrap_or_else(|| {
        session_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "unknown".into())
    });
    if age <= 0.0 {
        return Err(Error::invalid_config("age", "must be > 0"));
    }
    let session = WritingSession {
        meta: ChildMeta {
            child_id,
            age_years: age,
            gender,
        },
        frames,
        sems_label: 0.0,
    };
    let prediction = predict_sems(&session, &bundle.models(), &bundle.config)?;
    let json = serde_json::to_string_pretty(&prediction).expect("prediction serializes");
    println!("{json}");

    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        let mut rec = RunRecorder::new("predict");
        rec.input(bundle_path);
        rec.input(session_path);
        rec.write(dir.join("prediction.json"), &json)?;
        rec.finish(dir, cfg_root)?;
    }
    Ok(())
}

pub fn interpret(cfg: &ResolvedConfig, cohort_manifest: &Path, out_dir: &Path) -> Result<()> {
    let mut rec = RunRecorder::new("interpret");
    rec.input(cohort_manifest);
    ensure_dir(out_dir)?;
    let cohort = parse_cohort(cohort_manifest, cfg.scale_max)?;
    let (models, report) = sensoscore::pipeline::train_pipeline(&cohort, &cfg.pipeline)?;

    let windows_of = |children: &[String]| -> Result<Vec<sensoscore::data::LabeledWindow>> {
        let mut out = Vec::new();
        for s in cohort.iter().filter(|s| children.contains(&s.meta.child_id)) {
            for w in segment_session(s, cfg.pipeline.num_segments, cfg.pipeline.window_len)? {
                out.push(normalize(&w, &models.stats));
            }
        }
        Ok(out)
    };
    let train_windows = windows_of(&report.train_children)?;
    let val_windows = windows_of(&report.val_children)?;

    let mut imv_cfg = cfg.pipeline.train.clone();
    imv_cfg.rng_seed = seeds::derive(cfg.pipeline.rng_seed, "imv_train");
    let imv = train_imv(&train_windows, &val_windows, &imv_cfg, cfg.pipeline.imv_seg_size)
        .map_err(|e| Error::in_stage("imv", e))?;
    let imv_report = importance_report(&imv, &val_windows)?;

    let svr_imps = svr_input_importance(&models, &cohort, &cfg.pipeline, 10)?;
    let merged = combined_importance(&imv_report, &svr_imps);

    rec.write(out_dir.join("overall.csv"), &overall_csv(&imv_report))?;
    rec.write(out_dir.join("per_timestep.csv"), &per_timestep_csv(&imv_report))?;
    rec.write(out_dir.join("importance_svr.csv"), &svr_importance_csv(&svr_imps))?;
    rec.write(out_dir.join("combined_ranking.csv"), &combined_csv(&merged))?;
    rec.finish(out_dir, cfg)?;
    println!(
        "top channel: {} ({:.3})",
        imv_report.ranked_names()[0],
        imv_report.overall[imv_report.ranking[0]]
    );
    Ok(())
}

pub fn trace(
    cfg_root: &ResolvedConfig,
    bundle_path: &Path,
    session_path: &Path,
    out_dir: &Path,
    window_index: usize,
) -> Result<()> {
    let bundle = ModelBundle::load(bundle_path)?;
    let frames = parse_session(session_path)?;
    if frames.is_empty() {
        return Err(Error::parse(session_path, 1, "session has no frames"));
    }
    let session = WritingSession {
        meta: ChildMeta {
            child_id: session_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "unknown".into()),
            age_years: 8.0,
            gender: Gender::Female,
        },
        frames,
        sems_label: 0.0,
    };
    ensure_dir(out_dir)?;
    let mut rec = RunRecorder::new("trace");
    rec.input(bundle_path);
    rec.input(session_path);
    let files = dump_trace(&session, &bundle.models(), &bundle.config, out_dir, window_index)?;
    for f in &files.files {
        rec.output(f.clone());
    }
    rec.finish(out_dir, cfg_root)?;
    println!(
        "traced window {} (lstm score {:.4}) into {} files",
        files.window_index,
        files.prediction,
        files.files.len()
    );
    Ok(())
}
