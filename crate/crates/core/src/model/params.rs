use super::ModelConfig;
use crate::error::{Error, Result};
use crate::layers::{AdditiveAttentionParams, EmbeddingTable, MultiHeadParams};
use crate::numerics::{Parameters, Rng, Tensor};

/// Every learnable tensor of the recommender.
///
/// The same type doubles as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub embedding: EmbeddingTable,
    pub news_mha: MultiHeadParams,
    pub news_pool: AdditiveAttentionParams,
    pub user_mha: MultiHeadParams,
    pub user_pool: AdditiveAttentionParams,
}

impl ModelParams {
    pub fn random(config: &ModelConfig, vocab_size: usize, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let embedding = EmbeddingTable::random(vocab_size, config.d_model, rng);
        Self::with_embedding(config, embedding, rng)
    }

    /// Random encoder weights around a given (e.g. pretrained) embedding table.
    pub fn with_embedding(
        config: &ModelConfig,
        embedding: EmbeddingTable,
        rng: &mut Rng,
    ) -> Result<Self> {
        config.validate()?;
        if embedding.dim() != config.d_model {
            return Err(Error::Config(format!(
                "embedding dimension {} does not match d_model {}",
                embedding.dim(),
                config.d_model
            )));
        }
        if embedding.vocab_size() < 2 {
            return Err(Error::Config("vocabulary must contain PAD and UNK".into()));
        }
        let news_mha = MultiHeadParams::random(config.d_model, config.heads, rng)?;
        let news_pool = AdditiveAttentionParams::random(config.d_model, config.d_attn, rng)?;
        let user_mha = MultiHeadParams::random(config.d_model, config.heads, rng)?;
        let user_pool = AdditiveAttentionParams::random(config.d_model, config.d_attn, rng)?;
        Ok(Self {
            embedding,
            news_mha,
            news_pool,
            user_mha,
            user_pool,
        })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            embedding: self.embedding.zeros_like(),
            news_mha: self.news_mha.zeros_like(),
            news_pool: self.news_pool.zeros_like(),
            user_mha: self.user_mha.zeros_like(),
            user_pool: self.user_pool.zeros_like(),
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.vocab_size()
    }

    /// Checks that every tensor has the shape `config` implies.
    pub fn check_shapes(&self, config: &ModelConfig) -> Result<()> {
        let d = config.d_model;
        let d_k = config.d_k();
        let mut expected: Vec<Vec<usize>> = vec![vec![self.vocab_size(), d]];
        for _ in 0..2 {
            for _ in 0..3 * config.heads {
                expected.push(vec![d, d_k]);
            }
            expected.push(vec![config.heads * d_k, d]);
            expected.push(vec![d, config.d_attn]);
            expected.push(vec![config.d_attn]);
            expected.push(vec![config.d_attn]);
        }
        // the two encoders interleave as mha, pool, mha, pool
        let actual: Vec<Vec<usize>> = self.tensors().iter().map(|t| t.shape().to_vec()).collect();
        if actual != expected {
            return Err(Error::Config(format!(
                "parameter shapes do not match config {config:?}"
            )));
        }
        Ok(())
    }
}

impl Parameters for ModelParams {
    fn tensors(&self) -> Vec<&Tensor> {
        let mut out = self.embedding.tensors();
        out.extend(self.news_mha.tensors());
        out.extend(self.news_pool.tensors());
        out.extend(self.user_mha.tensors());
        out.extend(self.user_pool.tensors());
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = self.embedding.tensors_mut();
        out.extend(self.news_mha.tensors_mut());
        out.extend(self.news_pool.tensors_mut());
        out.extend(self.user_mha.tensors_mut());
        out.extend(self.user_pool.tensors_mut());
        out
    }
}
