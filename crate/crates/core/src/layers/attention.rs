use crate::error::{Error, Result};
use crate::numerics::{masked_softmax, matmul, matmul_a_bt, matmul_at_b, Parameters, Rng, Tensor};

/// Per-head query/key/value projections plus the shared output projection.
///
/// Each `w_q[i]`, `w_k[i]`, `w_v[i]` is `[d_model × d_k]`; `w_o` is
/// `[(heads · d_k) × d_model]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiHeadParams {
    pub w_q: Vec<Tensor>,
    pub w_k: Vec<Tensor>,
    pub w_v: Vec<Tensor>,
    pub w_o: Tensor,
}

impl MultiHeadParams {
    pub fn random(d_model: usize, heads: usize, rng: &mut Rng) -> Result<Self> {
        let d_k = head_dim(d_model, heads)?;
        let bound = 1.0 / (d_model as f64).sqrt();
        let mut init = |rows: usize, cols: usize| {
            let data = (0..rows * cols).map(|_| rng.uniform(-bound, bound)).collect();
            Tensor::from_vec(&[rows, cols], data).expect("shape matches data")
        };
        let w_q = (0..heads).map(|_| init(d_model, d_k)).collect();
        let w_k = (0..heads).map(|_| init(d_model, d_k)).collect();
        let w_v = (0..heads).map(|_| init(d_model, d_k)).collect();
        let w_o = init(heads * d_k, d_model);
        Ok(Self { w_q, w_k, w_v, w_o })
    }

    pub fn zeros_like(&self) -> Self {
        let z = |ts: &[Tensor]| ts.iter().map(|t| Tensor::zeros(t.shape())).collect();
        Self {
            w_q: z(&self.w_q),
            w_k: z(&self.w_k),
            w_v: z(&self.w_v),
            w_o: Tensor::zeros(self.w_o.shape()),
        }
    }

    pub fn heads(&self) -> usize {
        self.w_q.len()
    }

    pub fn d_model(&self) -> usize {
        self.w_o.cols()
    }

    pub fn d_k(&self) -> usize {
        self.w_q[0].cols()
    }
}

impl Parameters for MultiHeadParams {
    fn tensors(&self) -> Vec<&Tensor> {
        self.w_q
            .iter()
            .chain(&self.w_k)
            .chain(&self.w_v)
            .chain(std::iter::once(&self.w_o))
            .collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        self.w_q
            .iter_mut()
            .chain(self.w_k.iter_mut())
            .chain(self.w_v.iter_mut())
            .chain(std::iter::once(&mut self.w_o))
            .collect()
    }
}

pub(crate) fn head_dim(d_model: usize, heads: usize) -> Result<usize> {
    if heads == 0 || d_model == 0 || d_model % heads != 0 {
        return Err(Error::Config(format!(
            "d_model ({d_model}) must be a positive multiple of the head count ({heads})"
        )));
    }
    Ok(d_model / heads)
}

/// Forward state needed by the backward pass.
#[derive(Debug, Clone)]
pub struct AttentionCache {
    x: Tensor,
    q: Vec<Tensor>,
    k: Vec<Tensor>,
    v: Vec<Tensor>,
    /// Row-wise attention weights `[L × L]` per head.
    attn: Vec<Tensor>,
    concat: Tensor,
}

impl AttentionCache {
    pub fn attention_weights(&self) -> &[Tensor] {
        &self.attn
    }
}

/// Scaled dot-product self-attention over `heads` subspaces with a key-side
/// padding mask.
pub fn multi_head_self_attention(
    x: &Tensor,
    mask: &[bool],
    params: &MultiHeadParams,
) -> Result<(Tensor, AttentionCache)> {
    let len = x.rows();
    if x.rank() != 2 || x.cols() != params.d_model() || mask.len() != len {
        return Err(Error::Dimension {
            op: "multi_head_self_attention",
            left: x.shape().to_vec(),
            right: vec![mask.len(), params.d_model()],
        });
    }
    if !mask.iter().any(|&m| m) {
        return Err(Error::DegenerateMask);
    }
    let heads = params.heads();
    let d_k = params.d_k();
    let scale = 1.0 / (d_k as f64).sqrt();

    let mut concat = Tensor::zeros(&[len, heads * d_k]);
    let mut cache = AttentionCache {
        x: x.clone(),
        q: Vec::with_capacity(heads),
        k: Vec::with_capacity(heads),
        v: Vec::with_capacity(heads),
        attn: Vec::with_capacity(heads),
        concat: Tensor::zeros(&[0]),
    };
    for i in 0..heads {
        let q = matmul(x, &params.w_q[i])?;
        let k = matmul(x, &params.w_k[i])?;
        let v = matmul(x, &params.w_v[i])?;
        let mut attn = matmul_a_bt(&q, &k)?;
        for row in 0..len {
            let logits: Vec<f64> = attn.row(row).iter().map(|s| s * scale).collect();
            let probs = masked_softmax(&logits, mask)?;
            attn.row_mut(row).copy_from_slice(&probs);
        }
        let head = matmul(&attn, &v)?;
        concat.set_column_block(i * d_k, &head);
        cache.q.push(q);
        cache.k.push(k);
        cache.v.push(v);
        cache.attn.push(attn);
    }
    let out = matmul(&concat, &params.w_o)?;
    cache.concat = concat;
    Ok((out, cache))
}

/// Gradients of [`multi_head_self_attention`] w.r.t. its input and parameters.
pub fn multi_head_self_attention_backward(
    cache: &AttentionCache,
    upstream: &Tensor,
    params: &MultiHeadParams,
) -> Result<(Tensor, MultiHeadParams)> {
    let heads = params.heads();
    let d_k = params.d_k();
    let len = cache.x.rows();
    let scale = 1.0 / (d_k as f64).sqrt();
    let mut grads = params.zeros_like();

    grads.w_o = matmul_at_b(&cache.concat, upstream)?;
    let d_concat = matmul_a_bt(upstream, &params.w_o)?;
    let mut dx = Tensor::zeros(cache.x.shape());

    for i in 0..heads {
        let d_head = d_concat.column_block(i * d_k, d_k);
        let attn = &cache.attn[i];
        let d_attn = matmul_a_bt(&d_head, &cache.v[i])?;
        let d_v = matmul_at_b(attn, &d_head)?;

        // softmax Jacobian, row by row; masked keys have zero weight and so
        // zero gradient
        let mut d_scores = Tensor::zeros(&[len, len]);
        for row in 0..len {
            let a = attn.row(row);
            let g = d_attn.row(row);
            let inner: f64 = a.iter().zip(g).map(|(p, d)| p * d).sum();
            for (out, (p, d)) in d_scores.row_mut(row).iter_mut().zip(a.iter().zip(g)) {
                *out = p * (d - inner) * scale;
            }
        }
        let d_q = matmul(&d_scores, &cache.k[i])?;
        let d_k_mat = matmul_at_b(&d_scores, &cache.q[i])?;

        grads.w_q[i] = matmul_at_b(&cache.x, &d_q)?;
        grads.w_k[i] = matmul_at_b(&cache.x, &d_k_mat)?;
        grads.w_v[i] = matmul_at_b(&cache.x, &d_v)?;
        dx.add_assign(&matmul_a_bt(&d_q, &params.w_q[i])?)?;
        dx.add_assign(&matmul_a_bt(&d_k_mat, &params.w_k[i])?)?;
        dx.add_assign(&matmul_a_bt(&d_v, &params.w_v[i])?)?;
    }
    Ok((dx, grads))
}
