//! Benchmark harness: reads a corpus manifest, obtains one prediction per
//! page from files or a model server, scores it and renders the tables.

pub mod endpoint;
pub mod error;
pub mod manifest;
pub mod predict;
pub mod report;
pub mod run;

pub use endpoint::{request_body, Endpoint, EndpointConfig, Prompts};
pub use error::{EvalError, Result};
pub use manifest::{load_manifest, parse_manifest};
pub use predict::{
    fetch_predictions, ConditionKind, EvalCondition, PredictionFlag, PredictionSet, PredictionSource, Provenance,
};
pub use report::{parse_scores, render_report, scores_jsonl, write_outputs, EvalReport, ReportFormat};
pub use run::{run_eval, EvalRun};
