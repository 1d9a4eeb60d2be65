//! Impression-level ranking metrics and their macro average.
//!
//! Items are ordered by score descending; equal scores keep ascending input
//! index. Ties count 0.5 in AUC and are resolved by index everywhere else.

use std::fmt;

use crate::error::{Error, Result};

/// Labels and model scores for one impression.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpressionEval {
    pub labels: Vec<bool>,
    pub scores: Vec<f64>,
}

impl ImpressionEval {
    pub fn new(labels: Vec<bool>, scores: Vec<f64>) -> Self {
        assert_eq!(labels.len(), scores.len(), "labels and scores differ in length");
        Self { labels, scores }
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn negatives(&self) -> usize {
        self.labels.len() - self.positives()
    }

    /// Both classes present.
    pub fn is_scorable(&self) -> bool {
        self.positives() > 0 && self.negatives() > 0
    }
}

/// Indices by score descending, ties by ascending index.
pub fn ranking_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Pairwise AUC; `None` when either class is missing.
pub fn auc(e: &ImpressionEval) -> Option<f64> {
    let (p, n) = (e.positives(), e.negatives());
    if p == 0 || n == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..e.scores.len()).collect();
    order.sort_by(|&a, &b| e.scores[a].total_cmp(&e.scores[b]));

    let mut wins = 0.0;
    let mut negatives_below = 0usize;
    let mut i = 0;
    while i < order.len() {
        let score = e.scores[order[i]];
        let mut j = i;
        let (mut pos, mut neg) = (0usize, 0usize);
        while j < order.len() && e.scores[order[j]] == score {
            if e.labels[order[j]] {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        if j == i {
            // NaN never equals itself; treat it as its own group
            if e.labels[order[i]] {
                pos += 1;
            } else {
                neg += 1;
            }
            j = i + 1;
        }
        wins += (pos * negatives_below) as f64 + 0.5 * (pos * neg) as f64;
        negatives_below += neg;
        i = j;
    }
    Some(wins / (p * n) as f64)
}

/// Mean reciprocal rank over the positives; `None` without positives.
pub fn mrr(e: &ImpressionEval) -> Option<f64> {
    let p = e.positives();
    if p == 0 {
        return None;
    }
    let total: f64 = ranking_order(&e.scores)
        .iter()
        .enumerate()
        .filter(|(_, &idx)| e.labels[idx])
        .map(|(rank, _)| 1.0 / (rank + 1) as f64)
        .sum();
    Some(total / p as f64)
}

fn discount(position: usize) -> f64 {
    1.0 / ((position + 2) as f64).log2()
}

/// nDCG over the top `k` with binary gains; `None` without positives or
/// when `k == 0`.
pub fn ndcg_at_k(e: &ImpressionEval, k: usize) -> Option<f64> {
    let p = e.positives();
    if p == 0 || k == 0 {
        return None;
    }
    let dcg: f64 = ranking_order(&e.scores)
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, &idx)| e.labels[idx])
        .map(|(pos, _)| discount(pos))
        .sum();
    let idcg: f64 = (0..p.min(k)).map(discount).sum();
    Some(dcg / idcg)
}

/// Macro-averaged metrics over scorable impressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub auc: f64,
    pub mrr: f64,
    pub ndcg5: f64,
    pub ndcg10: f64,
    pub impressions: usize,
    pub skipped: usize,
}

pub const REPORT_KEYS: [&str; 6] = ["auc", "mrr", "ndcg@5", "ndcg@10", "impressions", "skipped"];

impl fmt::Display for MetricsReport {
    /// `key=value` lines in fixed order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "auc={}", self.auc)?;
        writeln!(f, "mrr={}", self.mrr)?;
        writeln!(f, "ndcg@5={}", self.ndcg5)?;
        writeln!(f, "ndcg@10={}", self.ndcg10)?;
        writeln!(f, "impressions={}", self.impressions)?;
        writeln!(f, "skipped={}", self.skipped)
    }
}

/// Per-impression metrics, then an arithmetic mean in input order.
/// Single-class impressions are skipped and counted.
pub fn evaluate_dataset(impressions: &[ImpressionEval]) -> Result<MetricsReport> {
    let mut sums = [0.0; 4];
    let mut used = 0;
    let mut skipped = 0;
    for e in impressions {
        if !e.is_scorable() {
            skipped += 1;
            continue;
        }
        let values = [
            auc(e).expect("scorable"),
            mrr(e).expect("scorable"),
            ndcg_at_k(e, 5).expect("scorable"),
            ndcg_at_k(e, 10).expect("scorable"),
        ];
        for (s, v) in sums.iter_mut().zip(values) {
            *s += v;
        }
        used += 1;
    }
    if used == 0 {
        return Err(Error::EmptyReport { skipped });
    }
    let n = used as f64;
    Ok(MetricsReport {
        auc: sums[0] / n,
        mrr: sums[1] / n,
        ndcg5: sums[2] / n,
        ndcg10: sums[3] / n,
        impressions: used,
        skipped,
    })
}
