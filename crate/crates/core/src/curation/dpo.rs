//! DPO objective on precomputed sequence log-probabilities:
//!
//! ```text
//! z    = beta * ((log pi(y+) - log ref(y+)) - (log pi(y-) - log ref(y-)))
//! loss = mean over pairs of -log sigmoid(z)
//! ```

use super::CurationError;

/// Summed log-probabilities of one preference pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpoPair {
    pub policy_chosen: f64,
    pub reference_chosen: f64,
    pub policy_rejected: f64,
    pub reference_rejected: f64,
}

impl DpoPair {
    fn values(&self) -> [f64; 4] {
        [
            self.policy_chosen,
            self.reference_chosen,
            self.policy_rejected,
            self.reference_rejected,
        ]
    }

    /// `(log pi(y+) - log ref(y+)) - (log pi(y-) - log ref(y-))`.
    pub fn margin(&self) -> f64 {
        (self.policy_chosen - self.reference_chosen)
            - (self.policy_rejected - self.reference_rejected)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpoBatch {
    pub pairs: Vec<DpoPair>,
    pub beta: f64,
}

impl DpoBatch {
    pub fn validate(&self) -> Result<(), CurationError> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(CurationError::Domain(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if self.pairs.is_empty() {
            return Err(CurationError::Domain("empty DPO batch".into()));
        }
        for (n, p) in self.pairs.iter().enumerate() {
            if let Some(v) = p.values().into_iter().find(|v| !v.is_finite() || *v > 0.0) {
                return Err(CurationError::Domain(format!(
                    "pair {n}: log-probability {v} is not a finite value <= 0"
                )));
            }
        }
        Ok(())
    }

    /// Rows of `policy_chosen reference_chosen policy_rejected
    /// reference_rejected`, tab- or space-separated. `#` starts a comment.
    pub fn parse_tsv(text: &str, beta: f64) -> Result<Self, CurationError> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| CurationError::Parse {
                    line: n + 1,
                    message: format!("expected four numbers, got `{line}`"),
                })?;
            let [pc, rc, pr, rr] = vals[..] else {
                return Err(CurationError::Parse {
                    line: n + 1,
                    message: format!("expected four columns, found {}", vals.len()),
                });
            };
            pairs.push(DpoPair {
                policy_chosen: pc,
                reference_chosen: rc,
                policy_rejected: pr,
                reference_rejected: rr,
            });
        }
        Ok(Self { pairs, beta })
    }
}

/// `-log sigmoid(x) = log(1 + e^-x)` without overflow.
fn neg_log_sigmoid(x: f64) -> f64 {
    (-x).max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn dpo_loss(batch: &DpoBatch) -> Result<f64, CurationError> {
    batch.validate()?;
    let total: f64 = batch
        .pairs
        .iter()
        .map(|p| neg_log_sigmoid(batch.beta * p.margin()))
        .sum();
    Ok(total / batch.pairs.len() as f64)
}

/// Partial derivatives of [`dpo_loss`] with respect to one pair's inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpoGrad {
    pub policy_chosen: f64,
    pub reference_chosen: f64,
    pub policy_rejected: f64,
    pub reference_rejected: f64,
}

pub fn dpo_loss_grad(batch: &DpoBatch) -> Result<Vec<DpoGrad>, CurationError> {
    batch.validate()?;
    let n = batch.pairs.len() as f64;
    Ok(batch
        .pairs
        .iter()
        .map(|p| {
            let g = batch.beta * sigmoid(-batch.beta * p.margin()) / n;
            DpoGrad {
                policy_chosen: -g,
                reference_chosen: g,
                policy_rejected: g,
                reference_rejected: -g,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn pair(delta_chosen: f64, delta_rejected: f64) -> DpoPair {
        DpoPair {
            policy_chosen: -1e5 + delta_chosen,
            reference_chosen: -1e5,
            policy_rejected: -2e5 + delta_rejected,
            reference_rejected: -2e5,
        }
    }

    #[test]
    fn balanced_margin_is_ln2() {
        for beta in [0.0, 0.01, 0.1, 1.0, 10.0] {
            let loss = dpo_loss(&DpoBatch {
                pairs: vec![pair(0.0, 0.0)],
                beta,
            })
            .unwrap();
            assert!((loss - LN_2).abs() < 1e-12);
        }
    }

    #[test]
    fn hand_value() {
        let p = DpoPair {
            policy_chosen: -1.0 + LN_2,
            reference_chosen: -1.0,
            policy_rejected: -1.0 - LN_2,
            reference_rejected: -1.0,
        };
        let b = DpoBatch {
            pairs: vec![p],
            beta: 1.0,
        };
        assert!((dpo_loss(&b).unwrap() - -(0.8f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn monotone_and_stable() {
        let loss = |d: f64| {
            dpo_loss(&DpoBatch {
                pairs: vec![pair(d, 0.0)],
                beta: 1.0,
            })
            .unwrap()
        };
        let mut prev = f64::INFINITY;
        for d in [-5.0, -1.0, 0.0, 1.0, 5.0, 50.0, 500.0] {
            let l = loss(d);
            assert!(l < prev && l >= 0.0);
            prev = l;
        }
        assert!(loss(-1e4).is_finite());
        assert!(loss(1e4) < 1e-300);
        let rejected = |d: f64| {
            dpo_loss(&DpoBatch {
                pairs: vec![pair(0.0, d)],
                beta: 1.0,
            })
            .unwrap()
        };
        assert!(rejected(1.0) > rejected(0.0));
    }

    #[test]
    fn gradient_at_zero() {
        let g = dpo_loss_grad(&DpoBatch {
            pairs: vec![pair(0.0, 0.0)],
            beta: 1.0,
        })
        .unwrap();
        assert_eq!(g[0].policy_chosen, -0.5);
        assert_eq!(g[0].policy_chosen + g[0].reference_chosen, 0.0);
        assert_eq!(g[0].policy_rejected, 0.5);
    }

    #[test]
    fn invalid_batches() {
        assert!(dpo_loss(&DpoBatch {
            pairs: vec![],
            beta: 1.0
        })
        .is_err());
        assert!(dpo_loss(&DpoBatch {
            pairs: vec![pair(0.0, 0.0)],
            beta: -1.0
        })
        .is_err());
        let mut p = pair(0.0, 0.0);
        p.policy_chosen = f64::NAN;
        assert!(matches!(
            dpo_loss(&DpoBatch {
                pairs: vec![p],
                beta: 1.0
            }),
            Err(CurationError::Domain(_))
        ));
        p.policy_chosen = 0.5;
        assert!(dpo_loss_grad(&DpoBatch {
            pairs: vec![p],
            beta: 1.0
        })
        .is_err());
    }

    #[test]
    fn parse_rows() {
        let b = DpoBatch::parse_tsv("# pc rc pr rr\n-1\t-1\t-2\t-2\n-3 -3 -4 -4\n", 0.1).unwrap();
        assert_eq!(b.pairs.len(), 2);
        assert!((dpo_loss(&b).unwrap() - LN_2).abs() < 1e-15);
        assert!(DpoBatch::parse_tsv("-1 -1 -2\n", 0.1).is_err());
    }
}
