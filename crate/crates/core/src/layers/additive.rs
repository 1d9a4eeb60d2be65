use crate::error::{Error, Result};
use crate::numerics::{dot, masked_softmax, matmul, matmul_a_bt, matmul_at_b, Parameters, Rng, Tensor};

/// Learned pooling query: `score_i = v_aᵀ tanh(W_aᵀ h_i + b_a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveAttentionParams {
    /// `[d_model × d_attn]`
    pub w_a: Tensor,
    pub b_a: Tensor,
    pub v_a: Tensor,
}

impl AdditiveAttentionParams {
    /// `W_a` on `±1/√d_model`, `v_a` on `±1/√d_attn`, `b_a` zero.
    pub fn random(d_model: usize, d_attn: usize, rng: &mut Rng) -> Result<Self> {
        if d_attn == 0 || d_model == 0 {
            return Err(Error::Config(format!(
                "additive attention needs positive sizes, got d_model={d_model} d_attn={d_attn}"
            )));
        }
        let bound = 1.0 / (d_model as f64).sqrt();
        let w_a = (0..d_model * d_attn).map(|_| rng.uniform(-bound, bound)).collect();
        let v_bound = 1.0 / (d_attn as f64).sqrt();
        let v_a = (0..d_attn).map(|_| rng.uniform(-v_bound, v_bound)).collect();
        Ok(Self {
            w_a: Tensor::from_vec(&[d_model, d_attn], w_a)?,
            b_a: Tensor::zeros(&[d_attn]),
            v_a: Tensor::vector(v_a),
        })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            w_a: Tensor::zeros(self.w_a.shape()),
            b_a: Tensor::zeros(self.b_a.shape()),
            v_a: Tensor::zeros(self.v_a.shape()),
        }
    }

    pub fn d_attn(&self) -> usize {
        self.v_a.len()
    }
}

impl Parameters for AdditiveAttentionParams {
    fn tensors(&self) -> Vec<&Tensor> {
        vec![&self.w_a, &self.b_a, &self.v_a]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.w_a, &mut self.b_a, &mut self.v_a]
    }
}

#[derive(Debug, Clone)]
pub struct PoolCache {
    h: Tensor,
    hidden: Tensor,
    weights: Vec<f64>,
}

impl PoolCache {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Collapses `h` (`[L × d_model]`) to one vector with learned attention weights.
pub fn additive_attention_pool(
    h: &Tensor,
    mask: &[bool],
    params: &AdditiveAttentionParams,
) -> Result<(Tensor, PoolCache)> {
    if h.rank() != 2 || mask.len() != h.rows() || h.cols() != params.w_a.rows() {
        return Err(Error::Dimension {
            op: "additive_attention_pool",
            left: h.shape().to_vec(),
            right: vec![mask.len(), params.w_a.rows()],
        });
    }
    let mut hidden = matmul(h, &params.w_a)?;
    for row in 0..hidden.rows() {
        for (z, b) in hidden.row_mut(row).iter_mut().zip(params.b_a.data()) {
            *z = (*z + b).tanh();
        }
    }
    let scores: Vec<f64> = (0..hidden.rows())
        .map(|i| dot(hidden.row(i), params.v_a.data()))
        .collect();
    let weights = masked_softmax(&scores, mask)?;
    let mut pooled = vec![0.0; h.cols()];
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (r, x) in pooled.iter_mut().zip(h.row(i)) {
            *r += w * x;
        }
    }
    Ok((
        Tensor::vector(pooled),
        PoolCache {
            h: h.clone(),
            hidden,
            weights,
        },
    ))
}

/// Gradients of [`additive_attention_pool`], including the coupling between
/// rows introduced by the softmax.
pub fn additive_attention_pool_backward(
    cache: &PoolCache,
    upstream: &Tensor,
    params: &AdditiveAttentionParams,
) -> Result<(Tensor, AdditiveAttentionParams)> {
    let h = &cache.h;
    let w = &cache.weights;
    let dr = upstream.data();
    if dr.len() != h.cols() {
        return Err(Error::Dimension {
            op: "additive_attention_pool_backward",
            left: h.shape().to_vec(),
            right: upstream.shape().to_vec(),
        });
    }
    let len = h.rows();
    let d_weight: Vec<f64> = (0..len).map(|i| dot(h.row(i), dr)).collect();
    let inner: f64 = w.iter().zip(&d_weight).map(|(a, b)| a * b).sum();
    let d_score: Vec<f64> = w
        .iter()
        .zip(&d_weight)
        .map(|(a, g)| a * (g - inner))
        .collect();

    let mut dh = Tensor::zeros(h.shape());
    for i in 0..len {
        for (out, g) in dh.row_mut(i).iter_mut().zip(dr) {
            *out = w[i] * g;
        }
    }

    let d_attn = params.d_attn();
    let mut d_pre = Tensor::zeros(&[len, d_attn]);
    let mut d_v = vec![0.0; d_attn];
    for i in 0..len {
        let act = cache.hidden.row(i);
        for (dv, a) in d_v.iter_mut().zip(act) {
            *dv += d_score[i] * a;
        }
        for (j, out) in d_pre.row_mut(i).iter_mut().enumerate() {
            *out = d_score[i] * params.v_a.data()[j] * (1.0 - act[j] * act[j]);
        }
    }
    let mut d_b = vec![0.0; d_attn];
    for i in 0..len {
        for (db, z) in d_b.iter_mut().zip(d_pre.row(i)) {
            *db += z;
        }
    }
    dh.add_assign(&matmul_a_bt(&d_pre, &params.w_a)?)?;
    let grads = AdditiveAttentionParams {
        w_a: matmul_at_b(h, &d_pre)?,
        b_a: Tensor::vector(d_b),
        v_a: Tensor::vector(d_v),
    };
    Ok((dh, grads))
}
