use crate::error::{Error, Result};
use crate::numerics::{Parameters, Rng, Tensor};

pub const PAD_ID: usize = 0;

/// Word embedding matrix `[vocab × d_model]`. Row 0 is the pad row and
/// stays zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub matrix: Tensor,
}

impl EmbeddingTable {
    /// Uniform init on `±1/√d_model`, pad row zero.
    pub fn random(vocab_size: usize, d_model: usize, rng: &mut Rng) -> Self {
        let bound = 1.0 / (d_model as f64).sqrt();
        let mut matrix = Tensor::zeros(&[vocab_size, d_model]);
        for row in 1..vocab_size {
            for v in matrix.row_mut(row) {
                *v = rng.uniform(-bound, bound);
            }
        }
        Self { matrix }
    }

    pub fn from_matrix(mut matrix: Tensor) -> Result<Self> {
        if matrix.rank() != 2 || matrix.rows() == 0 {
            return Err(Error::Config(format!(
                "embedding matrix must be rank 2 with a pad row, got {:?}",
                matrix.shape()
            )));
        }
        matrix.row_mut(PAD_ID).fill(0.0);
        Ok(Self { matrix })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            matrix: Tensor::zeros(self.matrix.shape()),
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn zero_pad_row(&mut self) {
        self.matrix.row_mut(PAD_ID).fill(0.0);
    }
}

impl Parameters for EmbeddingTable {
    fn tensors(&self) -> Vec<&Tensor> {
        vec![&self.matrix]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.matrix]
    }
}

/// Looks up one row per token id.
pub fn embed(token_ids: &[usize], table: &EmbeddingTable) -> Result<Tensor> {
    let d = table.dim();
    let vocab_size = table.vocab_size();
    let mut out = Tensor::zeros(&[token_ids.len(), d]);
    for (j, &id) in token_ids.iter().enumerate() {
        if id >= vocab_size {
            return Err(Error::OutOfVocabulary { id, vocab_size });
        }
        out.row_mut(j).copy_from_slice(table.matrix.row(id));
    }
    Ok(out)
}

/// Scatter-adds `upstream` rows into `grad`; the pad row never accumulates.
pub fn embed_backward(token_ids: &[usize], upstream: &Tensor, grad: &mut EmbeddingTable) {
    for (j, &id) in token_ids.iter().enumerate() {
        if id == PAD_ID {
            continue;
        }
        let src = upstream.row(j);
        for (g, s) in grad.matrix.row_mut(id).iter_mut().zip(src) {
            *g += s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::finite_difference_check;

    fn table() -> EmbeddingTable {
        EmbeddingTable::random(5, 4, &mut Rng::seed(1))
    }

    #[test]
    fn pad_ids_give_zero_rows() {
        let out = embed(&[0, 0, 0], &table()).unwrap();
        assert_eq!(out, Tensor::zeros(&[3, 4]));
    }

    #[test]
    fn lookup_returns_row() {
        let mut t = table();
        t.matrix.row_mut(3).copy_from_slice(&[0.0, 0.0, 1.0, 0.0]);
        let out = embed(&[3], &t).unwrap();
        assert_eq!(out.data(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn out_of_vocabulary() {
        assert!(matches!(
            embed(&[5], &table()),
            Err(Error::OutOfVocabulary { id: 5, vocab_size: 5 })
        ));
    }

    #[test]
    fn backward_of_sum_counts_occurrences() {
        let t = table();
        let ids = [2, 2];
        let mut grad = t.zeros_like();
        embed_backward(&ids, &Tensor::from_vec(&[2, 4], vec![1.0; 8]).unwrap(), &mut grad);
        assert_eq!(grad.matrix.row(2), &[2.0; 4]);
        let check = finite_difference_check(
            |p: &EmbeddingTable| Ok(embed(&ids, p)?.data().iter().sum()),
            &t,
            &grad,
            1e-5,
        )
        .unwrap();
        assert!(check.max_relative_error < 1e-8, "{check:?}");
    }
}
