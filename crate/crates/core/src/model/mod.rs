//! The recommender: news encoder, user encoder, inner-product click scoring
//! and the sampled softmax loss, plus checkpoint serialization.

mod checkpoint;
mod config;
mod params;
mod recommender;

pub use checkpoint::{
    checkpoint_bytes, load_checkpoint, parse_checkpoint, save_checkpoint, FORMAT_VERSION, MAGIC,
};
pub use config::ModelConfig;
pub use params::ModelParams;
pub use recommender::{
    click_score, encode_news, encode_user, instance_backward, instance_loss, rank_candidates,
    score_candidates, title_mask, InstanceGradient, TrainingInstance,
};
