use std::collections::HashSet;
use std::fmt::{self, Write as _};

use super::{CurationConfig, CurationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairOutcome {
    DiscardBoth,
    PreferFirst,
    PreferSecond,
    NeedsHuman,
}

impl PairOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DiscardBoth => "DISCARD_BOTH",
            Self::PreferFirst => "PREFER_FIRST",
            Self::PreferSecond => "PREFER_SECOND",
            Self::NeedsHuman => "NEEDS_HUMAN",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Self::DiscardBoth,
            Self::PreferFirst,
            Self::PreferSecond,
            Self::NeedsHuman,
        ]
        .into_iter()
        .find(|o| o.as_str() == s)
    }
}

impl fmt::Display for PairOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which Chamfer rule produced a [`PairDecision`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRule {
    BothAboveThreshold,
    OnlyFirstWithin,
    OnlySecondWithin,
    BothWithin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairDecision {
    pub outcome: PairOutcome,
    pub rationale: PairRule,
}

/// Gates two generations on their Chamfer distance to the reference: both
/// over `tau` are discarded, exactly one within `tau` wins, and two geometric
/// passes go to a human.
pub fn decide_pair(cd_first: f64, cd_second: f64, tau: f64) -> PairDecision {
    let (first_ok, second_ok) = (cd_first <= tau, cd_second <= tau);
    let (outcome, rationale) = match (first_ok, second_ok) {
        (false, false) => (PairOutcome::DiscardBoth, PairRule::BothAboveThreshold),
        (true, false) => (PairOutcome::PreferFirst, PairRule::OnlyFirstWithin),
        (false, true) => (PairOutcome::PreferSecond, PairRule::OnlySecondWithin),
        (true, true) => (PairOutcome::NeedsHuman, PairRule::BothWithin),
    };
    PairDecision { outcome, rationale }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    A,
    B,
}

/// Two generations for one condition, with their metrics precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCandidate {
    pub condition_id: String,
    pub mesh_a: String,
    pub mesh_b: String,
    pub cd_a: f64,
    pub cd_b: f64,
    pub faces_a: u32,
    pub faces_b: u32,
}

impl PairCandidate {
    /// Tab-separated `condition_id A B cd_A cd_B faces_A faces_B`; a header
    /// row starting with `condition_id` is skipped.
    pub fn parse_tsv(text: &str) -> Result<Vec<Self>, CurationError> {
        let mut out = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with("condition_id") {
                continue;
            }
            let err = |message: String| CurationError::Parse {
                line: n + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 7 {
                return Err(err(format!("expected 7 columns, found {}", cols.len())));
            }
            let float = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| err(format!("`{s}` is not a number")))
            };
            let count = |s: &str| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| err(format!("`{s}` is not a face count")))
            };
            out.push(Self {
                condition_id: cols[0].to_string(),
                mesh_a: cols[1].to_string(),
                mesh_b: cols[2].to_string(),
                cd_a: float(cols[3])?,
                cd_b: float(cols[4])?,
                faces_a: count(cols[5])?,
                faces_b: count(cols[6])?,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub condition_id: String,
    pub a: String,
    pub b: String,
    pub cd_a: f64,
    pub cd_b: f64,
    pub outcome: PairOutcome,
    /// `None` for discarded pairs and for pairs awaiting annotation.
    pub chosen: Option<Choice>,
}

impl PairRow {
    fn key(&self) -> (&str, &str, &str) {
        (&self.condition_id, &self.a, &self.b)
    }

    pub fn is_resolved(&self) -> bool {
        self.outcome == PairOutcome::DiscardBoth || self.chosen.is_some()
    }
}

pub const MANIFEST_HEADER: &str = "condition_id\tA\tB\tcd_A\tcd_B\toutcome\tchosen";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairManifest {
    pub rows: Vec<PairRow>,
}

impl PairManifest {
    pub fn unresolved(&self) -> impl Iterator<Item = &PairRow> {
        self.rows.iter().filter(|r| !r.is_resolved())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(MANIFEST_HEADER);
        out.push('\n');
        for r in &self.rows {
            let chosen = match r.chosen {
                Some(Choice::A) => "A",
                Some(Choice::B) => "B",
                None => "",
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{chosen}",
                r.condition_id, r.a, r.b, r.cd_a, r.cd_b, r.outcome
            );
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, CurationError> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with("condition_id") {
                continue;
            }
            let err = |message: String| CurationError::Parse {
                line: n + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if !(6..=7).contains(&cols.len()) {
                return Err(err(format!("expected 7 columns, found {}", cols.len())));
            }
            let float = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| err(format!("`{s}` is not a number")))
            };
            let outcome = PairOutcome::parse(cols[5].trim())
                .ok_or_else(|| err(format!("unknown outcome `{}`", cols[5])))?;
            let chosen = match cols.get(6).map(|s| s.trim()).unwrap_or("") {
                "" => None,
                "A" => Some(Choice::A),
                "B" => Some(Choice::B),
                other => return Err(err(format!("chosen must be A, B or empty, got `{other}`"))),
            };
            rows.push(PairRow {
                condition_id: cols[0].to_string(),
                a: cols[1].to_string(),
                b: cols[2].to_string(),
                cd_a: float(cols[3])?,
                cd_b: float(cols[4])?,
                outcome,
                chosen,
            });
        }
        let manifest = Self { rows };
        manifest.check()?;
        Ok(manifest)
    }

    fn check(&self) -> Result<(), CurationError> {
        let mut keys = HashSet::new();
        for r in &self.rows {
            if !keys.insert(r.key()) {
                return Err(CurationError::Structural(format!(
                    "duplicate pair ({}, {}, {})",
                    r.condition_id, r.a, r.b
                )));
            }
            let expected = match r.outcome {
                PairOutcome::DiscardBoth => r.chosen.is_none(),
                PairOutcome::PreferFirst => r.chosen == Some(Choice::A),
                PairOutcome::PreferSecond => r.chosen == Some(Choice::B),
                PairOutcome::NeedsHuman => true,
            };
            if !expected {
                return Err(CurationError::Structural(format!(
                    "pair ({}, {}, {}): chosen {:?} contradicts {}",
                    r.condition_id, r.a, r.b, r.chosen, r.outcome
                )));
            }
        }
        Ok(())
    }
}

/// Drops candidates below the face floor and labels the rest with
/// [`decide_pair`]. Requires `cfg.cd_threshold`.
pub fn build_pair_manifest(
    candidates: &[PairCandidate],
    cfg: &CurationConfig,
) -> Result<PairManifest, CurationError> {
    cfg.validate()?;
    let tau = cfg
        .cd_threshold
        .ok_or_else(|| CurationError::Config("cd_threshold is required to gate pairs".into()))?;
    let mut keys = HashSet::new();
    let mut rows = Vec::new();
    for c in candidates {
        if !keys.insert((
            c.condition_id.as_str(),
            c.mesh_a.as_str(),
            c.mesh_b.as_str(),
        )) {
            return Err(CurationError::Structural(format!(
                "duplicate candidate ({}, {}, {})",
                c.condition_id, c.mesh_a, c.mesh_b
            )));
        }
        if !(c.cd_a >= 0.0 && c.cd_b >= 0.0) {
            return Err(CurationError::Domain(format!(
                "Chamfer distances must be nonnegative in ({}, {}, {})",
                c.condition_id, c.mesh_a, c.mesh_b
            )));
        }
        if c.faces_a < cfg.face_min || c.faces_b < cfg.face_min {
            continue;
        }
        let decision = decide_pair(c.cd_a, c.cd_b, tau);
        rows.push(PairRow {
            condition_id: c.condition_id.clone(),
            a: c.mesh_a.clone(),
            b: c.mesh_b.clone(),
            cd_a: c.cd_a,
            cd_b: c.cd_b,
            outcome: decision.outcome,
            chosen: match decision.outcome {
                PairOutcome::PreferFirst => Some(Choice::A),
                PairOutcome::PreferSecond => Some(Choice::B),
                _ => None,
            },
        });
    }
    Ok(PairManifest { rows })
}

/// Fills `chosen` on pending rows from an annotated copy of the manifest.
/// Annotated rows must match a row of `manifest`; rows already decided must
/// not be overridden.
pub fn merge_annotations(
    manifest: &PairManifest,
    annotated: &PairManifest,
) -> Result<PairManifest, CurationError> {
    let mut merged = manifest.clone();
    for a in &annotated.rows {
        let row = merged
            .rows
            .iter_mut()
            .find(|r| r.key() == a.key())
            .ok_or_else(|| {
                CurationError::Structural(format!(
                    "annotated pair ({}, {}, {}) is not in the manifest",
                    a.condition_id, a.a, a.b
                ))
            })?;
        match (row.outcome, a.chosen) {
            (PairOutcome::NeedsHuman, Some(choice)) => row.chosen = Some(choice),
            (_, choice) if choice == row.chosen || choice.is_none() => {}
            _ => {
                return Err(CurationError::Structural(format!(
                    "annotation for ({}, {}, {}) overrides a {} decision",
                    a.condition_id, a.a, a.b, row.outcome
                )))
            }
        }
    }
    merged.check()?;
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_table() {
        let tau = 0.1;
        assert_eq!(
            decide_pair(2.0 * tau, 3.0 * tau, tau).outcome,
            PairOutcome::DiscardBoth
        );
        assert_eq!(
            decide_pair(tau / 2.0, 2.0 * tau, tau).outcome,
            PairOutcome::PreferFirst
        );
        assert_eq!(
            decide_pair(2.0 * tau, tau / 2.0, tau).outcome,
            PairOutcome::PreferSecond
        );
        let d = decide_pair(tau / 2.0, tau / 2.0, tau);
        assert_eq!(
            d,
            PairDecision {
                outcome: PairOutcome::NeedsHuman,
                rationale: PairRule::BothWithin
            }
        );
        // The threshold itself passes.
        assert_eq!(decide_pair(tau, 1.0, tau).outcome, PairOutcome::PreferFirst);
    }

    fn candidate(cond: &str, cd_a: f64, cd_b: f64, faces: u32) -> PairCandidate {
        PairCandidate {
            condition_id: cond.into(),
            mesh_a: format!("{cond}_a"),
            mesh_b: format!("{cond}_b"),
            cd_a,
            cd_b,
            faces_a: faces,
            faces_b: faces + 10,
        }
    }

    fn cfg() -> CurationConfig {
        CurationConfig {
            cd_threshold: Some(0.1),
            ..CurationConfig::default()
        }
    }

    #[test]
    fn manifest_rows() {
        let m = build_pair_manifest(
            &[
                candidate("small", 0.01, 0.5, 4000),
                candidate("c1", 0.01, 0.5, 6000),
                candidate("c2", 0.5, 0.6, 6000),
            ],
            &cfg(),
        )
        .unwrap();
        assert_eq!(m.rows.len(), 2);
        assert_eq!(m.rows[0].chosen, Some(Choice::A));
        assert_eq!(m.rows[1].outcome, PairOutcome::DiscardBoth);
        assert_eq!(PairManifest::from_tsv(&m.to_tsv()).unwrap(), m);
    }

    #[test]
    fn requires_threshold_and_unique_rows() {
        let c = candidate("c", 0.0, 0.0, 9000);
        assert!(matches!(
            build_pair_manifest(std::slice::from_ref(&c), &CurationConfig::default()),
            Err(CurationError::Config(_))
        ));
        assert!(matches!(
            build_pair_manifest(&[c.clone(), c], &cfg()),
            Err(CurationError::Structural(_))
        ));
    }

    #[test]
    fn annotation_round_trip() {
        let m = build_pair_manifest(
            &[
                candidate("h", 0.01, 0.02, 8000),
                candidate("p", 0.5, 0.02, 8000),
            ],
            &cfg(),
        )
        .unwrap();
        assert_eq!(m.unresolved().count(), 1);
        let exported = m.to_tsv();
        assert!(exported.lines().nth(1).unwrap().ends_with("NEEDS_HUMAN\t"));
        let filled = exported.replace("NEEDS_HUMAN\t", "NEEDS_HUMAN\tB");
        let merged = merge_annotations(&m, &PairManifest::from_tsv(&filled).unwrap()).unwrap();
        assert_eq!(merged.unresolved().count(), 0);
        assert_eq!(merged.rows[0].chosen, Some(Choice::B));
        assert_eq!(merged.rows[1], m.rows[1]);

        let overriding = exported.replace("PREFER_SECOND\tB", "PREFER_SECOND\tA");
        assert!(PairManifest::from_tsv(&overriding).is_err());
    }

    #[test]
    fn parse_candidates() {
        let text =
            "condition_id\tA\tB\tcd_A\tcd_B\tfaces_A\tfaces_B\nc\tx\ty\t0.1\t0.2\t6000\t7000\n";
        let c = PairCandidate::parse_tsv(text).unwrap();
        assert_eq!(c[0].faces_b, 7000);
        assert!(PairCandidate::parse_tsv("c\tx\ty\t0.1\n").is_err());
    }
}
