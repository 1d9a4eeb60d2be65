#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use nram::data::ImpressionRecord;
use nram::model::{ModelConfig, ModelParams};
use nram::numerics::Rng;
use nram::synthetic::{two_topic_impressions, two_topic_news, CorpusSpec};

pub struct Fixture {
    pub news: PathBuf,
    pub train: PathBuf,
    pub valid: PathBuf,
    pub test: PathBuf,
}

fn write_behaviors(path: &Path, records: &[ImpressionRecord]) {
    let text: String = records.iter().map(|r| r.to_tsv_line() + "\n").collect();
    fs::write(path, text).unwrap();
}

/// Writes a small two-topic corpus in MIND layout under `dir`.
pub fn write_corpus(dir: &Path, seed: u64, train: usize, valid: usize, test: usize) -> Fixture {
    let spec = CorpusSpec::default();
    let mut rng = Rng::seed(seed);
    let news = two_topic_news(&spec, &mut rng);
    let f = Fixture {
        news: dir.join("news.tsv"),
        train: dir.join("train.tsv"),
        valid: dir.join("valid.tsv"),
        test: dir.join("test.tsv"),
    };
    let text: String = news.iter().map(|n| n.to_tsv_line() + "\n").collect();
    fs::write(&f.news, text).unwrap();
    write_behaviors(&f.train, &two_topic_impressions(&spec, train, "T", &mut rng));
    write_behaviors(&f.valid, &two_topic_impressions(&spec, valid, "V", &mut rng));
    write_behaviors(&f.test, &two_topic_impressions(&spec, test, "E", &mut rng));
    f
}

pub const VOCAB: usize = 9;

/// A random configuration inside d_model <= 12, h <= 3, M <= 4, N_hist <= 3, K <= 2.
pub fn minimal_config(rng: &mut Rng, seed: u64) -> ModelConfig {
    let (d_model, heads) = [(6, 2), (6, 3), (8, 2), (12, 3), (4, 1), (9, 3)][rng.below(6)];
    ModelConfig {
        d_model,
        heads,
        d_attn: 2 + rng.below(5),
        max_title: 1 + rng.below(4),
        max_history: 1 + rng.below(3),
        neg_k: 1 + rng.below(2),
        seed,
    }
}

/// Title of 1..=max_len real tokens followed by padding up to `width`.
pub fn random_title(rng: &mut Rng, max_len: usize, width: usize) -> Vec<usize> {
    let len = 1 + rng.below(max_len);
    let mut t: Vec<usize> = (0..len).map(|_| 1 + rng.below(VOCAB - 1)).collect();
    t.resize(width, 0);
    t
}

pub fn random_params(config: &ModelConfig, rng: &mut Rng) -> ModelParams {
    ModelParams::random(config, VOCAB, rng).unwrap()
}
