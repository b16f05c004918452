//! Training-data curation: the area/loss/aesthetic filter cascade,
//! Chamfer-gated preference pairs, and the DPO objective.

mod dpo;
mod filter;
mod pairs;
mod scores;

pub use dpo::{dpo_loss, dpo_loss_grad, DpoBatch, DpoGrad, DpoPair};
pub use filter::{run_filter_cascade, run_filter_cascade_on_areas, CascadeOutcome, DropReason};
pub use pairs::{
    build_pair_manifest, decide_pair, merge_annotations, Choice, PairCandidate, PairDecision,
    PairManifest, PairOutcome, PairRow, PairRule,
};
pub use scores::ScoreTable;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CurationError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("missing {table} scores for: {}", ids.join(", "))]
    MissingScores { table: String, ids: Vec<String> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Thresholds for the filter cascade and pair gating. Loaded from TOML;
/// absent keys take the defaults below, and the two thresholds have none.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurationConfig {
    pub area_min: f64,
    /// Meshes whose test loss exceeds this are flagged. `None` disables the
    /// loss stage.
    pub loss_threshold: Option<f64>,
    pub aesthetic_keep_fraction: f64,
    pub face_min: u32,
    /// Chamfer gate for preference pairs.
    pub cd_threshold: Option<f64>,
}

impl Default for CurationConfig {
    fn default() -> Self {
        Self {
            area_min: 1.0,
            loss_threshold: None,
            aesthetic_keep_fraction: 0.2,
            face_min: 5000,
            cd_threshold: None,
        }
    }
}

impl CurationConfig {
    pub fn from_toml(text: &str) -> Result<Self, CurationError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CurationError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CurationError> {
        let bad = |m: String| Err(CurationError::Config(m));
        if self.area_min.is_nan() || self.area_min < 0.0 {
            return bad(format!(
                "area_min must be nonnegative, got {}",
                self.area_min
            ));
        }
        if !(self.aesthetic_keep_fraction > 0.0 && self.aesthetic_keep_fraction <= 1.0) {
            return bad(format!(
                "aesthetic_keep_fraction must be in (0, 1], got {}",
                self.aesthetic_keep_fraction
            ));
        }
        if let Some(t) = self.loss_threshold.filter(|t| t.is_nan() || *t < 0.0) {
            return bad(format!("loss_threshold must be nonnegative, got {t}"));
        }
        if let Some(t) = self.cd_threshold.filter(|t| t.is_nan() || *t <= 0.0) {
            return bad(format!("cd_threshold must be positive, got {t}"));
        }
        Ok(())
    }
}
