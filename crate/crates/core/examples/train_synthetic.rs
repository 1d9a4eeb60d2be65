//! Trains a small model on the built-in two-topic corpus, where each user
//! archetype only clicks articles of its own topic, and prints the epoch
//! history followed by held-out metrics.
//!
//!     cargo run --release --example train_synthetic
//!     cargo run --release --example train_synthetic -- --shuffled
//!
//! `--shuffled` permutes the training and validation labels first; the model
//! then has nothing to learn and the held-out AUC should sit near 0.5.

use nram::data::{build_vocabulary, make_eval_impressions, make_training_instances, NewsIndex};
use nram::model::{ModelConfig, ModelParams};
use nram::numerics::Rng;
use nram::synthetic::{shuffle_labels, two_topic_impressions, two_topic_news, CorpusSpec};
use nram::trainer::{evaluate_model, train, TrainConfig};

fn main() -> nram::Result<()> {
    let shuffled = std::env::args().any(|a| a == "--shuffled");
    let spec = CorpusSpec::default();
    let mut rng = Rng::seed(7);

    let news = two_topic_news(&spec, &mut rng);
    let mut train_records = two_topic_impressions(&spec, 500, "T", &mut rng);
    let mut valid_records = two_topic_impressions(&spec, 200, "V", &mut rng);
    let test_records = two_topic_impressions(&spec, 1000, "E", &mut rng);
    if shuffled {
        train_records = shuffle_labels(&train_records, &mut rng);
        valid_records = shuffle_labels(&valid_records, &mut rng);
    }

    let config = ModelConfig {
        d_model: 12,
        heads: 3,
        d_attn: 8,
        max_title: 4,
        max_history: 5,
        neg_k: 2,
        seed: 7,
    };
    let vocab = build_vocabulary(&news, 1)?;
    let index = NewsIndex::build(&news, &vocab, config.max_title);
    let mut model_rng = Rng::seed(config.seed);
    let initial = ModelParams::random(&config, vocab.len(), &mut model_rng)?;
    let (instances, report) = make_training_instances(&train_records, &index, &config, &mut model_rng);
    let (valid, _) = make_eval_impressions(&valid_records, &index, &config);
    let (test, _) = make_eval_impressions(&test_records, &index, &config);
    println!("vocabulary={} instances={}", vocab.len(), report.instances);

    let cfg = TrainConfig {
        batch_size: 32,
        max_epochs: 20,
        ..TrainConfig::default()
    };
    let (params, history) = train(&initial, &instances, &valid, &cfg)?;
    print!("{history}");
    println!("best_epoch={}", history.best_epoch);
    print!("{}", evaluate_model(&params, &test, 1)?);
    Ok(())
}
