//! Fixed-size context windows for truncated training, and length-bucketed
//! batch plans.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tokenizer::VocabSpec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PackingError {
    #[error("invalid window spec: {0}")]
    Spec(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub window_length: usize,
    pub stride: usize,
    pub pad_id: u32,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self::for_vocab(9000, &VocabSpec::default())
    }
}

impl WindowSpec {
    /// Disjoint windows of `window_length`, padded with the first id past the
    /// vocabulary.
    pub fn for_vocab(window_length: usize, vocab: &VocabSpec) -> Self {
        Self {
            window_length,
            stride: window_length,
            pad_id: vocab.vocab_size(),
        }
    }

    pub fn with_stride(self, stride: usize) -> Self {
        Self { stride, ..self }
    }

    pub fn validate(&self, vocab: &VocabSpec) -> Result<(), PackingError> {
        if self.window_length == 0 || self.stride == 0 || self.stride > self.window_length {
            return Err(PackingError::Spec(format!(
                "need 1 <= stride ({}) <= window ({})",
                self.stride, self.window_length
            )));
        }
        if self.pad_id < vocab.vocab_size() {
            return Err(PackingError::Spec(format!(
                "pad id {} collides with the vocabulary (size {})",
                self.pad_id,
                vocab.vocab_size()
            )));
        }
        Ok(())
    }

    /// Window starts for a sequence of `len` tokens.
    pub fn offsets(&self, len: usize) -> impl Iterator<Item = usize> {
        (0..len).step_by(self.stride)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub ids: Vec<u32>,
    pub valid_length: usize,
    pub source: String,
    pub offset: usize,
}

/// Cuts `ids` into windows starting at `0, s, 2s, ...`, right-padding the
/// last ones with `pad_id`.
pub fn split_windows(ids: &[u32], source: &str, spec: &WindowSpec) -> Vec<Window> {
    assert!(spec.stride >= 1, "stride must be positive");
    spec.offsets(ids.len())
        .map(|offset| {
            let end = (offset + spec.window_length).min(ids.len());
            let mut window = ids[offset..end].to_vec();
            let valid_length = window.len();
            window.resize(spec.window_length, spec.pad_id);
            Window {
                ids: window,
                valid_length,
                source: source.to_string(),
                offset,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    pub batches: Vec<Vec<String>>,
    pub batch_size: usize,
}

impl BatchPlan {
    /// `batch <n>: <id> <id> ...`, one line per batch.
    pub fn to_manifest(&self) -> String {
        let mut out = String::new();
        for (n, batch) in self.batches.iter().enumerate() {
            let _ = writeln!(out, "batch {n}: {}", batch.join(" "));
        }
        out
    }

    pub fn from_manifest(text: &str) -> Result<Self, PackingError> {
        let mut batches = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: &str| PackingError::Manifest {
                line: n + 1,
                message: message.to_string(),
            };
            let (head, ids) = line.split_once(':').ok_or_else(|| err("missing `:`"))?;
            let index = head
                .strip_prefix("batch ")
                .and_then(|i| i.trim().parse::<usize>().ok())
                .ok_or_else(|| err("expected `batch <n>`"))?;
            if index != batches.len() {
                return Err(err("batches out of order"));
            }
            batches.push(
                ids.split_whitespace()
                    .map(str::to_string)
                    .collect::<Vec<_>>(),
            );
        }
        let batch_size = batches.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            batches,
            batch_size,
        })
    }
}

/// Sorts sequences longest first, cuts consecutive runs of `batch_size`, then
/// shuffles the order of the batches (not their members) with `seed`.
pub fn bucket_sequences(lengths: &[(String, usize)], batch_size: usize, seed: u64) -> BatchPlan {
    assert!(batch_size >= 1, "batch size must be positive");
    let mut sorted: Vec<&(String, usize)> = lengths.iter().collect();
    sorted.sort_by_key(|&(_, len)| std::cmp::Reverse(*len));
    let mut batches: Vec<Vec<String>> = sorted
        .chunks(batch_size)
        .map(|c| c.iter().map(|(id, _)| id.clone()).collect())
        .collect();
    batches.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    BatchPlan {
        batches,
        batch_size,
    }
}

/// Length-blind baseline: shuffle all sequences, then cut batches.
pub fn random_batches(lengths: &[(String, usize)], batch_size: usize, seed: u64) -> BatchPlan {
    assert!(batch_size >= 1, "batch size must be positive");
    let mut ids: Vec<String> = lengths.iter().map(|(id, _)| id.clone()).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    BatchPlan {
        batches: ids.chunks(batch_size).map(<[String]>::to_vec).collect(),
        batch_size,
    }
}

/// Share of pad tokens when every member of a batch is run for as many
/// window steps as the batch's longest member needs.
pub fn padding_fraction(
    plan: &BatchPlan,
    lengths: &[(String, usize)],
    spec: &WindowSpec,
) -> Result<f64, PackingError> {
    let by_id: HashMap<&str, usize> = lengths.iter().map(|(id, n)| (id.as_str(), *n)).collect();
    if by_id.len() != lengths.len() {
        return Err(PackingError::Structural(
            "duplicate sequence id in lengths".into(),
        ));
    }
    let mut seen = HashMap::with_capacity(by_id.len());
    let (mut pads, mut total) = (0u128, 0u128);
    for batch in &plan.batches {
        let mut members = Vec::with_capacity(batch.len());
        for id in batch {
            let len = *by_id
                .get(id.as_str())
                .ok_or_else(|| PackingError::Structural(format!("plan id `{id}` has no length")))?;
            if seen.insert(id.as_str(), ()).is_some() {
                return Err(PackingError::Structural(format!(
                    "id `{id}` is in more than one batch"
                )));
            }
            members.push(len);
        }
        let longest = members.iter().copied().max().unwrap_or(0);
        let steps = longest.div_ceil(spec.stride);
        for len in members {
            for t in 0..steps {
                let valid = len.saturating_sub(t * spec.stride).min(spec.window_length);
                pads += (spec.window_length - valid) as u128;
                total += spec.window_length as u128;
            }
        }
    }
    if seen.len() != by_id.len() {
        return Err(PackingError::Structural(format!(
            "plan covers {} of {} sequences",
            seen.len(),
            by_id.len()
        )));
    }
    Ok(if total == 0 {
        0.0
    } else {
        pads as f64 / total as f64
    })
}
