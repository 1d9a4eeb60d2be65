//! MIND-format ingestion: `news.tsv` / `behaviors.tsv` parsing,
//! tokenization, vocabulary, pretrained vectors, negative sampling and
//! category statistics.

mod behaviors;
mod embeddings;
mod news;
mod sampling;
mod stats;
mod tokenize;
mod vocab;

pub use behaviors::{
    parse_behaviors_str, parse_behaviors_tsv, parse_impression_token, ImpressionRecord,
    BEHAVIOR_COLUMNS,
};
pub use embeddings::{load_pretrained_embeddings, parse_pretrained_embeddings, UNCOVERED_INIT_BOUND};
pub use news::{parse_news_str, parse_news_tsv, NewsRecord, NEWS_COLUMNS};
pub use sampling::{
    encode_title, make_eval_impressions, make_training_instances, EvalImpression, NewsIndex,
    SamplingReport,
};
pub use stats::{category_stats, CategoryCount};
pub use tokenize::tokenize;
pub use vocab::{build_vocabulary, Vocabulary, PAD_TOKEN, UNK_ID, UNK_TOKEN};
