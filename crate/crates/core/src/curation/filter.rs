use std::fmt;

use super::{CurationConfig, CurationError, ScoreTable};
use crate::mesh::{mesh_area, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// Surface area under `area_min`.
    Area,
    /// Flagged by test loss and not in the aesthetic top fraction.
    Aesthetic,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropReason::Area => "area",
            DropReason::Aesthetic => "aesthetic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CascadeOutcome {
    /// In input order.
    pub kept: Vec<String>,
    pub dropped: Vec<(String, DropReason)>,
    /// Flagged by loss but kept on aesthetic score.
    pub rescued: Vec<String>,
}

pub fn run_filter_cascade(
    meshes: &[(String, Mesh)],
    losses: &ScoreTable,
    aesthetics: &ScoreTable,
    cfg: &CurationConfig,
) -> Result<CascadeOutcome, CurationError> {
    let areas: Vec<(String, f64)> = meshes
        .iter()
        .map(|(id, m)| (id.clone(), mesh_area(m)))
        .collect();
    run_filter_cascade_on_areas(&areas, losses, aesthetics, cfg)
}

/// The cascade with precomputed surface areas:
///
/// 1. drop meshes with area below `area_min`;
/// 2. flag survivors whose loss exceeds `loss_threshold` (skipped when unset);
/// 3. keep the top `aesthetic_keep_fraction` of flagged meshes by aesthetic
///    score, including every mesh tied with the last one kept, and drop the
///    other flagged meshes.
pub fn run_filter_cascade_on_areas(
    areas: &[(String, f64)],
    losses: &ScoreTable,
    aesthetics: &ScoreTable,
    cfg: &CurationConfig,
) -> Result<CascadeOutcome, CurationError> {
    cfg.validate()?;
    let mut seen = std::collections::HashSet::new();
    if let Some((id, _)) = areas.iter().find(|(id, _)| !seen.insert(id.as_str())) {
        return Err(CurationError::Structural(format!(
            "duplicate mesh id `{id}`"
        )));
    }

    let survivors: Vec<&str> = areas
        .iter()
        .filter(|(_, a)| *a >= cfg.area_min)
        .map(|(id, _)| id.as_str())
        .collect();

    let flagged: Vec<&str> = match cfg.loss_threshold {
        None => Vec::new(),
        Some(threshold) => {
            let scores = lookup(losses, &survivors)?;
            survivors
                .iter()
                .zip(scores)
                .filter(|(_, loss)| *loss > threshold)
                .map(|(id, _)| *id)
                .collect()
        }
    };

    let mut rescued = std::collections::HashSet::new();
    if !flagged.is_empty() {
        let scores = lookup(aesthetics, &flagged)?;
        let mut ranked = scores.clone();
        ranked.sort_by(|a, b| b.total_cmp(a));
        // Guard against products like 0.2 * 15 = 3.0000000000000004.
        let keep = ((cfg.aesthetic_keep_fraction * flagged.len() as f64 - 1e-9).ceil() as usize)
            .clamp(1, flagged.len());
        let cut = ranked[keep - 1];
        rescued.extend(
            flagged
                .iter()
                .zip(&scores)
                .filter(|(_, s)| **s >= cut)
                .map(|(id, _)| *id),
        );
    }
    let flagged: std::collections::HashSet<&str> = flagged.into_iter().collect();

    let mut out = CascadeOutcome::default();
    for (id, area) in areas {
        if *area < cfg.area_min {
            out.dropped.push((id.clone(), DropReason::Area));
        } else if !flagged.contains(id.as_str()) {
            out.kept.push(id.clone());
        } else if rescued.contains(id.as_str()) {
            out.kept.push(id.clone());
            out.rescued.push(id.clone());
        } else {
            out.dropped.push((id.clone(), DropReason::Aesthetic));
        }
    }
    Ok(out)
}

fn lookup(table: &ScoreTable, ids: &[&str]) -> Result<Vec<f64>, CurationError> {
    let missing: Vec<String> = ids
        .iter()
        .filter(|id| table.get(id).is_none())
        .map(|id| id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CurationError::MissingScores {
            table: table.label.clone(),
            ids: missing,
        });
    }
    Ok(ids
        .iter()
        .map(|id| table.get(id).expect("checked above"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(label: &str, entries: &[(&str, f64)]) -> ScoreTable {
        let mut t = ScoreTable::new(label);
        for (id, s) in entries {
            t.insert(*id, *s).unwrap();
        }
        t
    }

    fn cfg(loss: f64) -> CurationConfig {
        CurationConfig {
            loss_threshold: Some(loss),
            ..CurationConfig::default()
        }
    }

    #[test]
    fn small_area_is_dropped() {
        let tri = Mesh::new(
            vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let out = run_filter_cascade(
            &[("t".into(), tri)],
            &ScoreTable::new("loss"),
            &ScoreTable::new("aes"),
            &CurationConfig::default(),
        )
        .unwrap();
        assert_eq!(out.dropped, vec![("t".to_string(), DropReason::Area)]);
        assert!(out.kept.is_empty());
    }

    #[test]
    fn low_loss_is_kept_without_aesthetics() {
        let areas = vec![("a".to_string(), 5.0)];
        let out = run_filter_cascade_on_areas(
            &areas,
            &table("loss", &[("a", 0.1)]),
            &ScoreTable::new("aes"),
            &cfg(1.0),
        )
        .unwrap();
        assert_eq!(out.kept, ["a"]);
    }

    #[test]
    fn top_fraction_of_flagged() {
        let ids: Vec<String> = (0..10).map(|i| format!("m{i}")).collect();
        let areas: Vec<(String, f64)> = ids.iter().map(|i| (i.clone(), 2.0)).collect();
        let losses = table(
            "loss",
            &ids.iter().map(|i| (i.as_str(), 9.0)).collect::<Vec<_>>(),
        );
        let aes_scores = [0.3, 0.9, 0.1, 0.5, 0.95, 0.2, 0.4, 0.6, 0.7, 0.8];
        let aes = table(
            "aes",
            &ids.iter()
                .map(String::as_str)
                .zip(aes_scores)
                .collect::<Vec<_>>(),
        );
        let out = run_filter_cascade_on_areas(&areas, &losses, &aes, &cfg(1.0)).unwrap();
        assert_eq!(out.kept, ["m1", "m4"]);
        assert_eq!(out.dropped.len(), 8);
        assert!(out.dropped.iter().all(|(_, r)| *r == DropReason::Aesthetic));
    }

    #[test]
    fn ties_at_the_cut_are_kept() {
        let areas: Vec<(String, f64)> = (0..5).map(|i| (format!("m{i}"), 2.0)).collect();
        let losses = table(
            "loss",
            &[
                ("m0", 5.0),
                ("m1", 5.0),
                ("m2", 5.0),
                ("m3", 5.0),
                ("m4", 5.0),
            ],
        );
        let aes = table(
            "aes",
            &[
                ("m0", 0.5),
                ("m1", 0.9),
                ("m2", 0.9),
                ("m3", 0.1),
                ("m4", 0.2),
            ],
        );
        let out = run_filter_cascade_on_areas(&areas, &losses, &aes, &cfg(1.0)).unwrap();
        assert_eq!(out.kept, ["m1", "m2"]);
    }

    #[test]
    fn missing_scores_are_listed() {
        let areas = vec![
            ("a".to_string(), 2.0),
            ("b".to_string(), 2.0),
            ("tiny".to_string(), 0.1),
        ];
        let err = run_filter_cascade_on_areas(
            &areas,
            &table("loss", &[("a", 0.0)]),
            &ScoreTable::new("aes"),
            &cfg(1.0),
        )
        .unwrap_err();
        assert_eq!(
            err,
            CurationError::MissingScores {
                table: "loss".into(),
                ids: vec!["b".into()]
            }
        );
        let err = run_filter_cascade_on_areas(
            &areas,
            &table("loss", &[("a", 3.0), ("b", 0.0)]),
            &ScoreTable::new("aes"),
            &cfg(1.0),
        )
        .unwrap_err();
        assert_eq!(
            err,
            CurationError::MissingScores {
                table: "aes".into(),
                ids: vec!["a".into()]
            }
        );
    }

    #[test]
    fn deterministic() {
        let areas: Vec<(String, f64)> = (0..30)
            .map(|i| (format!("m{i}"), 0.5 + i as f64 * 0.1))
            .collect();
        let losses = table(
            "loss",
            &areas
                .iter()
                .map(|(i, a)| (i.as_str(), a * 3.0 % 2.0))
                .collect::<Vec<_>>(),
        );
        let aes = table(
            "aes",
            &areas
                .iter()
                .map(|(i, a)| (i.as_str(), (a * 7.0).sin()))
                .collect::<Vec<_>>(),
        );
        let first = run_filter_cascade_on_areas(&areas, &losses, &aes, &cfg(1.0)).unwrap();
        assert_eq!(
            first,
            run_filter_cascade_on_areas(&areas, &losses, &aes, &cfg(1.0)).unwrap()
        );
        assert_eq!(first.kept.len() + first.dropped.len(), 30);
    }
}
