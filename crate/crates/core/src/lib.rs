//! Attention-based neural news recommendation without a tensor framework.
//!
//! Titles are embedded, mixed by multi-head self-attention and pooled with
//! additive attention into news vectors; a user's clicked history goes
//! through the same two attention stages to give a user vector; a click is
//! scored by the inner product of the two. Training uses a softmax over one
//! clicked and `K` unclicked articles from the same impression. Every
//! backward pass is derived by hand and checked against finite differences.
//!
//! | module | contents |
//! |---|---|
//! | [`numerics`] | tensors, masked softmax, RNG, gradient checker |
//! | [`layers`] | embedding, multi-head self-attention, additive pooling |
//! | [`model`] | encoders, click scoring, loss, checkpoints |
//! | [`data`] | MIND `news.tsv` / `behaviors.tsv`, vocabulary, sampling |
//! | [`metrics`] | AUC, MRR, nDCG@k |
//! | [`trainer`] | Adam, early stopping |
//! | [`synthetic`] | two-topic corpus with a known answer |
//! | [`cli`] | the `nram` command line |

pub mod cli;
pub mod data;
pub mod error;
pub mod layers;
pub mod metrics;
pub mod model;
pub mod numerics;
pub mod synthetic;
pub mod trainer;

pub use error::{Error, Result};
