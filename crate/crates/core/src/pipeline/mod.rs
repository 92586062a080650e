//! End-to-end composition: segment a session, score windows with the LSTM,
//! average per child, combine with age and gender through the SVR, and clamp
//! to the score scale. Plus the Monte-Carlo cross-validation harness,
//! architecture sweep, activation-trace export, permutation importance for
//! the SVR inputs, and the serialized model bundle.

mod bundle;
mod config;
mod cv;
mod importance;
mod predict;
mod split;
mod sweep;
mod trace;
mod train;

pub use bundle::{ModelBundle, BUNDLE_VERSION};
pub use config::PipelineConfig;
pub use cv::{run_cv, CvReport, LevelAggregate, MetricsRow, TrialRecord};
pub use importance::{
    combined_csv, combined_importance, svr_importance_csv, svr_input_importance, FeatureImportance,
};
pub use predict::{predict_sems, ScorePrediction};
pub use sweep::{architecture_sweep, sweep_csv, SweepRow};
pub use trace::{dump_trace, TraceFiles};
pub use train::{train_pipeline, TrainedModels, ValidationReport};
