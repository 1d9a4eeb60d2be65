//! Embedding lookup, multi-head self-attention and additive-attention
//! pooling, each with a hand-derived backward pass.

mod additive;
mod attention;
mod embedding;

pub use additive::{
    additive_attention_pool, additive_attention_pool_backward, AdditiveAttentionParams, PoolCache,
};
pub use attention::{
    multi_head_self_attention, multi_head_self_attention_backward, AttentionCache,
    MultiHeadParams,
};
pub use embedding::{embed, embed_backward, EmbeddingTable, PAD_ID};
pub(crate) use attention::head_dim;
