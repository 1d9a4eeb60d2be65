use crate::error::{Error, Result};

/// Architecture and sampling hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub d_model: usize,
    pub heads: usize,
    /// Hidden size of the additive-attention scorer.
    pub d_attn: usize,
    /// Title length in tokens (pad/truncate).
    pub max_title: usize,
    /// History length in articles (most recent kept).
    pub max_history: usize,
    /// Negatives per positive.
    pub neg_k: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            d_model: 300,
            heads: 15,
            d_attn: 200,
            max_title: 30,
            max_history: 50,
            neg_k: 4,
            seed: 42,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        crate::layers::head_dim(self.d_model, self.heads)?;
        let positive = [
            ("d_attn", self.d_attn),
            ("max_title", self.max_title),
            ("max_history", self.max_history),
            ("neg_k", self.neg_k),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn d_k(&self) -> usize {
        self.d_model / self.heads
    }

    /// `key=value` lines, one per field.
    pub fn describe(&self) -> String {
        format!(
            "d_model={}\nheads={}\nd_attn={}\nmax_title={}\nmax_history={}\nneg_k={}\nseed={}\n",
            self.d_model,
            self.heads,
            self.d_attn,
            self.max_title,
            self.max_history,
            self.neg_k,
            self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ModelConfig::default();
        c.validate().unwrap();
        assert_eq!(c.d_k(), 20);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            ModelConfig { d_model: 301, ..Default::default() },
            ModelConfig { neg_k: 0, ..Default::default() },
            ModelConfig { max_title: 0, ..Default::default() },
            ModelConfig { max_history: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}
