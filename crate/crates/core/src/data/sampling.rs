use std::collections::HashMap;

use super::{tokenize, ImpressionRecord, NewsRecord, Vocabulary, UNK_ID};
use crate::layers::PAD_ID;
use crate::model::{ModelConfig, TrainingInstance};
use crate::numerics::Rng;

/// Title token ids, padded or truncated to `max_title`.
///
/// A title with no tokens becomes a single UNK so every article has at
/// least one attendable position.
pub fn encode_title(title: &str, vocab: &Vocabulary, max_title: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = tokenize(title)
        .iter()
        .take(max_title)
        .map(|t| vocab.id(t))
        .collect();
    if ids.is_empty() {
        ids.push(UNK_ID);
    }
    ids.resize(max_title, PAD_ID);
    ids
}

/// Encoded titles keyed by news id.
#[derive(Debug, Clone, Default)]
pub struct NewsIndex {
    titles: HashMap<String, Vec<usize>>,
    max_title: usize,
}

impl NewsIndex {
    pub fn build(news: &[NewsRecord], vocab: &Vocabulary, max_title: usize) -> Self {
        let titles = news
            .iter()
            .map(|r| (r.news_id.clone(), encode_title(&r.title, vocab, max_title)))
            .collect();
        Self { titles, max_title }
    }

    pub fn get(&self, news_id: &str) -> Option<&[usize]> {
        self.titles.get(news_id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.titles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.titles.is_empty()
    }

    pub fn pad_row(&self) -> Vec<usize> {
        vec![PAD_ID; self.max_title]
    }

    /// Most recent `max_history` known articles, padded to `max_history`
    /// rows. Returns the rows, the mask and the number of unknown ids.
    pub fn history_rows(
        &self,
        history: &[String],
        max_history: usize,
    ) -> (Vec<Vec<usize>>, Vec<bool>, usize) {
        let known: Vec<&[usize]> = history.iter().filter_map(|id| self.get(id)).collect();
        let missing = history.len() - known.len();
        let start = known.len().saturating_sub(max_history);
        let mut rows: Vec<Vec<usize>> = known[start..].iter().map(|t| t.to_vec()).collect();
        let mut mask = vec![true; rows.len()];
        rows.resize(max_history, self.pad_row());
        mask.resize(max_history, false);
        (rows, mask, missing)
    }
}

/// Counters reported alongside generated instances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SamplingReport {
    pub instances: usize,
    /// Clicked ids absent from the news index.
    pub missing_clicked: usize,
    /// Non-clicked or history ids absent from the news index.
    pub missing_other: usize,
    /// Impressions that yielded nothing (no positive or no negative).
    pub dropped_impressions: usize,
}

/// One training instance per clicked article, with `K` negatives drawn from
/// the same impression's non-clicked articles.
///
/// Negatives are drawn without replacement when at least `K` exist and with
/// replacement otherwise. Each impression samples from its own stream keyed
/// by `(base seed, impression_id)`, so output does not depend on record order.
pub fn make_training_instances(
    records: &[ImpressionRecord],
    index: &NewsIndex,
    config: &ModelConfig,
    rng: &mut Rng,
) -> (Vec<TrainingInstance>, SamplingReport) {
    let base_seed = rng.next_u64();
    let k = config.neg_k;
    let mut report = SamplingReport::default();
    let mut out = Vec::new();
    for record in records {
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        for (id, clicked) in &record.impressions {
            match (index.get(id), clicked) {
                (Some(t), true) => positives.push(t),
                (Some(t), false) => negatives.push(t),
                (None, true) => report.missing_clicked += 1,
                (None, false) => report.missing_other += 1,
            }
        }
        if positives.is_empty() || negatives.is_empty() {
            report.dropped_impressions += 1;
            continue;
        }
        let (history, history_mask, missing) =
            index.history_rows(&record.history, config.max_history);
        report.missing_other += missing;

        let mut stream = Rng::for_key(base_seed, &record.impression_id);
        for pos in positives {
            let picks: Vec<usize> = if negatives.len() >= k {
                stream.sample_distinct(negatives.len(), k)
            } else {
                (0..k).map(|_| stream.below(negatives.len())).collect()
            };
            let mut candidates = Vec::with_capacity(k + 1);
            candidates.push(pos.to_vec());
            candidates.extend(picks.into_iter().map(|i| negatives[i].to_vec()));
            out.push(TrainingInstance {
                history: history.clone(),
                history_mask: history_mask.clone(),
                candidates,
            });
        }
    }
    report.instances = out.len();
    (out, report)
}

/// A full impression prepared for scoring, with its true labels.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalImpression {
    pub impression_id: String,
    pub history: Vec<Vec<usize>>,
    pub history_mask: Vec<bool>,
    pub news_ids: Vec<String>,
    pub candidates: Vec<Vec<usize>>,
    pub labels: Vec<bool>,
}

/// Converts impressions for evaluation; candidates missing from the index
/// are dropped and counted.
pub fn make_eval_impressions(
    records: &[ImpressionRecord],
    index: &NewsIndex,
    config: &ModelConfig,
) -> (Vec<EvalImpression>, usize) {
    let mut missing = 0;
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        let (history, history_mask, _) = index.history_rows(&record.history, config.max_history);
        let mut news_ids = Vec::new();
        let mut candidates = Vec::new();
        let mut labels = Vec::new();
        for (id, clicked) in &record.impressions {
            match index.get(id) {
                Some(t) => {
                    news_ids.push(id.clone());
                    candidates.push(t.to_vec());
                    labels.push(*clicked);
                }
                None => missing += 1,
            }
        }
        if candidates.is_empty() {
            continue;
        }
        out.push(EvalImpression {
            impression_id: record.impression_id.clone(),
            history,
            history_mask,
            news_ids,
            candidates,
            labels,
        });
    }
    (out, missing)
}
