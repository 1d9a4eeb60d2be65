use super::ModelParams;
use crate::error::{Error, Result};
use crate::layers::{
    additive_attention_pool, additive_attention_pool_backward, embed, embed_backward,
    multi_head_self_attention, multi_head_self_attention_backward, AttentionCache, PoolCache,
    PAD_ID,
};
use crate::numerics::{accumulate, dot, masked_softmax, Tensor};

/// One positive candidate (index 0) plus `K` sampled negatives, with the
/// user's padded click history. All titles are padded token-id rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingInstance {
    pub history: Vec<Vec<usize>>,
    pub history_mask: Vec<bool>,
    pub candidates: Vec<Vec<usize>>,
}

impl TrainingInstance {
    pub const POSITIVE_INDEX: usize = 0;

    pub fn candidate_masks(&self) -> Vec<Vec<bool>> {
        self.candidates.iter().map(|c| title_mask(c)).collect()
    }
}

/// `true` at every non-pad position.
pub fn title_mask(tokens: &[usize]) -> Vec<bool> {
    tokens.iter().map(|&t| t != PAD_ID).collect()
}

struct NewsCache {
    tokens: Vec<usize>,
    attention: AttentionCache,
    pool: PoolCache,
}

fn encode_news_cached(
    tokens: &[usize],
    mask: &[bool],
    params: &ModelParams,
) -> Result<(Tensor, NewsCache)> {
    if tokens.len() != mask.len() {
        return Err(Error::Dimension {
            op: "encode_news",
            left: vec![tokens.len()],
            right: vec![mask.len()],
        });
    }
    if !mask.iter().any(|&m| m) {
        return Err(Error::DegenerateTitle);
    }
    let x = embed(tokens, &params.embedding)?;
    let (h, attention) = multi_head_self_attention(&x, mask, &params.news_mha)?;
    let (r, pool) = additive_attention_pool(&h, mask, &params.news_pool)?;
    Ok((
        r,
        NewsCache {
            tokens: tokens.to_vec(),
            attention,
            pool,
        },
    ))
}

fn encode_news_backward(
    cache: &NewsCache,
    upstream: &Tensor,
    params: &ModelParams,
    grads: &mut ModelParams,
) -> Result<()> {
    let (dh, d_pool) = additive_attention_pool_backward(&cache.pool, upstream, &params.news_pool)?;
    accumulate(&mut grads.news_pool, &d_pool);
    let (dx, d_mha) = multi_head_self_attention_backward(&cache.attention, &dh, &params.news_mha)?;
    accumulate(&mut grads.news_mha, &d_mha);
    embed_backward(&cache.tokens, &dx, &mut grads.embedding);
    Ok(())
}

/// News vector of one title: embed, self-attend over tokens, pool.
pub fn encode_news(tokens: &[usize], mask: &[bool], params: &ModelParams) -> Result<Tensor> {
    Ok(encode_news_cached(tokens, mask, params)?.0)
}

struct UserCache {
    history: Vec<Option<NewsCache>>,
    mask: Vec<bool>,
    attention: AttentionCache,
    pool: PoolCache,
}

fn encode_user_cached(
    history: &[Vec<usize>],
    mask: &[bool],
    params: &ModelParams,
) -> Result<Option<(Tensor, UserCache)>> {
    if history.len() != mask.len() {
        return Err(Error::Dimension {
            op: "encode_user",
            left: vec![history.len()],
            right: vec![mask.len()],
        });
    }
    if !mask.iter().any(|&m| m) {
        return Ok(None);
    }
    let d = params.embedding.dim();
    let mut stacked = Tensor::zeros(&[history.len(), d]);
    let mut caches = Vec::with_capacity(history.len());
    for (i, (tokens, &present)) in history.iter().zip(mask).enumerate() {
        if !present {
            caches.push(None);
            continue;
        }
        let (r, cache) = encode_news_cached(tokens, &title_mask(tokens), params)?;
        stacked.row_mut(i).copy_from_slice(r.data());
        caches.push(Some(cache));
    }
    let (h, attention) = multi_head_self_attention(&stacked, mask, &params.user_mha)?;
    let (u, pool) = additive_attention_pool(&h, mask, &params.user_pool)?;
    Ok(Some((
        u,
        UserCache {
            history: caches,
            mask: mask.to_vec(),
            attention,
            pool,
        },
    )))
}

fn encode_user_backward(
    cache: &UserCache,
    upstream: &Tensor,
    params: &ModelParams,
    grads: &mut ModelParams,
) -> Result<()> {
    let (dh, d_pool) = additive_attention_pool_backward(&cache.pool, upstream, &params.user_pool)?;
    accumulate(&mut grads.user_pool, &d_pool);
    let (d_stacked, d_mha) =
        multi_head_self_attention_backward(&cache.attention, &dh, &params.user_mha)?;
    accumulate(&mut grads.user_mha, &d_mha);
    for (i, news) in cache.history.iter().enumerate() {
        if let (Some(news), true) = (news, cache.mask[i]) {
            let dr = Tensor::vector(d_stacked.row(i).to_vec());
            encode_news_backward(news, &dr, params, grads)?;
        }
    }
    Ok(())
}

/// User vector from the clicked-news history.
///
/// Returns `Ok(None)` for a cold-start user (no unmasked history rows);
/// callers treat that as the zero vector.
pub fn encode_user(
    history: &[Vec<usize>],
    mask: &[bool],
    params: &ModelParams,
) -> Result<Option<Tensor>> {
    Ok(encode_user_cached(history, mask, params)?.map(|(u, _)| u))
}

/// Inner-product click score.
pub fn click_score(user: &Tensor, news: &Tensor) -> Result<f64> {
    if user.len() != news.len() {
        return Err(Error::Dimension {
            op: "click_score",
            left: user.shape().to_vec(),
            right: news.shape().to_vec(),
        });
    }
    Ok(dot(user.data(), news.data()))
}

fn user_or_zero(user: Option<Tensor>, d: usize) -> Tensor {
    user.unwrap_or_else(|| Tensor::zeros(&[d]))
}

/// Negative log-likelihood of the positive under a softmax over all
/// `K + 1` candidate scores. Also returns the raw scores.
pub fn instance_loss(instance: &TrainingInstance, params: &ModelParams) -> Result<(f64, Vec<f64>)> {
    let d = params.embedding.dim();
    let user = user_or_zero(
        encode_user(&instance.history, &instance.history_mask, params)?,
        d,
    );
    let mut scores = Vec::with_capacity(instance.candidates.len());
    for tokens in &instance.candidates {
        let r = encode_news(tokens, &title_mask(tokens), params)?;
        scores.push(click_score(&user, &r)?);
    }
    Ok((softmax_nll(&scores)?, scores))
}

fn softmax_nll(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln() + max;
    Ok(log_sum - scores[TrainingInstance::POSITIVE_INDEX])
}

/// Loss, scores and the gradient of the loss w.r.t. every parameter.
#[derive(Debug, Clone)]
pub struct InstanceGradient {
    pub loss: f64,
    pub scores: Vec<f64>,
    /// `∂loss/∂scores`, i.e. `softmax(scores) - onehot(positive)`.
    pub score_grad: Vec<f64>,
    pub grads: ModelParams,
}

/// End-to-end backward pass of [`instance_loss`].
///
/// Embedding gradients from the candidate and history paths accumulate into
/// one table; the pad row is always zero.
pub fn instance_backward(
    instance: &TrainingInstance,
    params: &ModelParams,
) -> Result<InstanceGradient> {
    let d = params.embedding.dim();
    let user = encode_user_cached(&instance.history, &instance.history_mask, params)?;
    let user_vec = user
        .as_ref()
        .map(|(u, _)| u.clone())
        .unwrap_or_else(|| Tensor::zeros(&[d]));

    let mut news = Vec::with_capacity(instance.candidates.len());
    let mut scores = Vec::with_capacity(instance.candidates.len());
    for tokens in &instance.candidates {
        let (r, cache) = encode_news_cached(tokens, &title_mask(tokens), params)?;
        scores.push(click_score(&user_vec, &r)?);
        news.push((r, cache));
    }
    let loss = softmax_nll(&scores)?;
    let mut score_grad = masked_softmax(&scores, &vec![true; scores.len()])?;
    score_grad[TrainingInstance::POSITIVE_INDEX] -= 1.0;

    let mut grads = params.zeros_like();
    let mut d_user = vec![0.0; d];
    for ((r, cache), &g) in news.iter().zip(&score_grad) {
        for (du, x) in d_user.iter_mut().zip(r.data()) {
            *du += g * x;
        }
        let dr = user_vec.map(|u| g * u);
        encode_news_backward(cache, &dr, params, &mut grads)?;
    }
    if let Some((_, cache)) = &user {
        encode_user_backward(cache, &Tensor::vector(d_user), params, &mut grads)?;
    }
    grads.embedding.zero_pad_row();
    Ok(InstanceGradient {
        loss,
        scores,
        score_grad,
        grads,
    })
}

/// Scores every candidate for one user and sorts descending; equal scores
/// keep their input order.
pub fn rank_candidates(
    history: &[Vec<usize>],
    history_mask: &[bool],
    candidates: &[Vec<usize>],
    params: &ModelParams,
) -> Result<Vec<(usize, f64)>> {
    let mut ranked: Vec<(usize, f64)> = score_candidates(history, history_mask, candidates, params)?
        .into_iter()
        .enumerate()
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

/// Raw click scores in input order.
pub fn score_candidates(
    history: &[Vec<usize>],
    history_mask: &[bool],
    candidates: &[Vec<usize>],
    params: &ModelParams,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let user = user_or_zero(
        encode_user(history, history_mask, params)?,
        params.embedding.dim(),
    );
    candidates
        .iter()
        .map(|tokens| click_score(&user, &encode_news(tokens, &title_mask(tokens), params)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelConfig;
    use crate::numerics::{Parameters, Rng};

    fn small() -> (ModelConfig, ModelParams) {
        let config = ModelConfig {
            d_model: 6,
            heads: 2,
            d_attn: 4,
            max_title: 3,
            max_history: 2,
            neg_k: 1,
            seed: 0,
        };
        let params = ModelParams::random(&config, 8, &mut Rng::seed(1)).unwrap();
        (config, params)
    }

    #[test]
    fn click_score_examples() {
        let e = Tensor::vector(vec![1.0, 0.0]);
        assert_eq!(click_score(&e, &e).unwrap(), 1.0);
        assert_eq!(
            click_score(&e, &Tensor::vector(vec![0.0, 1.0])).unwrap(),
            0.0
        );
        assert_eq!(
            click_score(&Tensor::vector(vec![1.0, 2.0]), &Tensor::vector(vec![3.0, -1.0]))
                .unwrap(),
            1.0
        );
        assert!(click_score(&e, &Tensor::vector(vec![1.0])).is_err());
    }

    #[test]
    fn all_pad_title_is_rejected() {
        let (_, p) = small();
        assert!(matches!(
            encode_news(&[0, 0, 0], &[false; 3], &p),
            Err(Error::DegenerateTitle)
        ));
    }

    #[test]
    fn empty_history_is_cold_start() {
        let (_, p) = small();
        let hist = vec![vec![0; 3]; 2];
        assert!(encode_user(&hist, &[false, false], &p).unwrap().is_none());
        let ranked = rank_candidates(&hist, &[false, false], &[vec![2, 0, 0], vec![3, 4, 0]], &p)
            .unwrap();
        assert_eq!(ranked, vec![(0, 0.0), (1, 0.0)]);
    }

    #[test]
    fn cold_start_instance_has_uniform_loss_and_zero_grads() {
        let (_, p) = small();
        let inst = TrainingInstance {
            history: vec![vec![0; 3]; 2],
            history_mask: vec![false, false],
            candidates: vec![vec![2, 3, 0], vec![4, 0, 0]],
        };
        let g = instance_backward(&inst, &p).unwrap();
        assert!((g.loss - 2f64.ln()).abs() < 1e-15);
        assert!(g.grads.tensors().iter().all(|t| t.data().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn score_grad_sums_to_zero_and_pad_row_is_zero() {
        let (_, p) = small();
        let inst = TrainingInstance {
            history: vec![vec![2, 5, 0], vec![6, 0, 0]],
            history_mask: vec![true, true],
            candidates: vec![vec![3, 0, 0], vec![4, 7, 1]],
        };
        let g = instance_backward(&inst, &p).unwrap();
        assert!(g.score_grad.iter().sum::<f64>().abs() < 1e-12);
        assert!(g.grads.embedding.matrix.row(0).iter().all(|&v| v == 0.0));
        let (loss, scores) = instance_loss(&inst, &p).unwrap();
        assert_eq!(loss, g.loss);
        assert_eq!(scores, g.scores);
    }

    #[test]
    fn empty_candidates_rejected() {
        let (_, p) = small();
        assert!(matches!(
            rank_candidates(&[vec![2, 0, 0]], &[true], &[], &p),
            Err(Error::EmptyCandidates)
        ));
    }
}
