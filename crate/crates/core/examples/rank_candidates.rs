//! Trains briefly on the two-topic corpus and ranks a mixed candidate list
//! for one user of each archetype.

use nram::data::{build_vocabulary, make_eval_impressions, make_training_instances, NewsIndex};
use nram::model::{rank_candidates, ModelConfig, ModelParams};
use nram::numerics::Rng;
use nram::synthetic::{two_topic_impressions, two_topic_news, CorpusSpec};
use nram::trainer::{train, TrainConfig};

fn main() -> nram::Result<()> {
    let spec = CorpusSpec::default();
    let mut rng = Rng::seed(3);
    let news = two_topic_news(&spec, &mut rng);
    let train_records = two_topic_impressions(&spec, 300, "T", &mut rng);
    let valid_records = two_topic_impressions(&spec, 50, "V", &mut rng);

    let config = ModelConfig {
        d_model: 12,
        heads: 3,
        d_attn: 8,
        max_title: 4,
        max_history: 5,
        neg_k: 2,
        seed: 3,
    };
    let vocab = build_vocabulary(&news, 1)?;
    let index = NewsIndex::build(&news, &vocab, config.max_title);
    let initial = ModelParams::random(&config, vocab.len(), &mut rng)?;
    let (instances, _) = make_training_instances(&train_records, &index, &config, &mut rng);
    let (valid, _) = make_eval_impressions(&valid_records, &index, &config);
    let cfg = TrainConfig {
        learning_rate: 0.01,
        batch_size: 32,
        max_epochs: 3,
        ..TrainConfig::default()
    };
    let (params, _) = train(&initial, &instances, &valid, &cfg)?;

    let candidate_ids = ["N0_10", "N1_10", "N0_11", "N1_11", "N1_12"];
    let candidates: Vec<Vec<usize>> = candidate_ids
        .iter()
        .map(|id| index.get(id).unwrap().to_vec())
        .collect();
    for (label, read) in [("alpha reader", ["N0_1", "N0_2", "N0_3"]), ("beta reader", ["N1_1", "N1_2", "N1_3"])] {
        let ids: Vec<String> = read.iter().map(|s| s.to_string()).collect();
        let (history, mask, _) = index.history_rows(&ids, config.max_history);
        println!("{label}:");
        for (i, score) in rank_candidates(&history, &mask, &candidates, &params)? {
            println!("  {}\t{score:.3}", candidate_ids[i]);
        }
    }
    Ok(())
}
