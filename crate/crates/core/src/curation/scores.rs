use std::collections::BTreeMap;

use super::CurationError;

/// Externally computed per-mesh scores (test losses, aesthetic ratings).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreTable {
    pub label: String,
    scores: BTreeMap<String, f64>,
}

impl ScoreTable {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            scores: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, score: f64) -> Result<(), CurationError> {
        let id = id.into();
        if !score.is_finite() {
            return Err(CurationError::Domain(format!(
                "non-finite score for `{id}`"
            )));
        }
        if self.scores.contains_key(&id) {
            return Err(CurationError::Structural(format!(
                "`{id}` scored twice in {}",
                self.label
            )));
        }
        self.scores.insert(id, score);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.scores.get(id).copied()
    }

    /// Entries in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(id, s)| (id.as_str(), *s))
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Parses `<id> <float>` lines; blank lines and `#` comments are skipped.
    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self, CurationError> {
        let mut table = Self::new(label);
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CurationError::Parse {
                line: n + 1,
                message,
            };
            let mut toks = line.split_whitespace();
            let (Some(id), Some(score), None) = (toks.next(), toks.next(), toks.next()) else {
                return Err(err(format!("expected `<id> <score>`, got `{line}`")));
            };
            let score: f64 = score
                .parse()
                .map_err(|_| err(format!("`{score}` is not a number")))?;
            table.insert(id, score).map_err(|e| err(e.to_string()))?;
        }
        Ok(table)
    }
}
