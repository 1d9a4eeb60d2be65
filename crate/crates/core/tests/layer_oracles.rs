//! Layers and the full forward pass against straightforward scalar-loop
//! reimplementations written from the formulas.

mod common;

use nram::layers::{additive_attention_pool, multi_head_self_attention, AdditiveAttentionParams, MultiHeadParams};
use nram::model::{encode_news, instance_loss, title_mask, ModelParams, TrainingInstance};
use nram::numerics::{Rng, Tensor};

use common::{minimal_config, random_params, random_title};

type Mat = Vec<Vec<f64>>;

fn to_mat(t: &Tensor) -> Mat {
    (0..t.rows()).map(|i| t.row(i).to_vec()).collect()
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            for p in 0..k {
                out[i][j] += a[i][p] * b[p][j];
            }
        }
    }
    out
}

fn softmax(logits: &[f64], mask: &[bool]) -> Vec<f64> {
    let max = logits
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&x, _)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits
        .iter()
        .zip(mask)
        .map(|(&x, &m)| if m { (x - max).exp() } else { 0.0 })
        .collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|v| v / z).collect()
}

fn naive_mha(x: &Mat, mask: &[bool], p: &MultiHeadParams) -> Mat {
    let l = x.len();
    let d_k = p.d_k();
    let mut concat = vec![Vec::new(); l];
    for h in 0..p.heads() {
        let q = mul(x, &to_mat(&p.w_q[h]));
        let k = mul(x, &to_mat(&p.w_k[h]));
        let v = mul(x, &to_mat(&p.w_v[h]));
        for i in 0..l {
            let logits: Vec<f64> = (0..l)
                .map(|j| (0..d_k).map(|c| q[i][c] * k[j][c]).sum::<f64>() / (d_k as f64).sqrt())
                .collect();
            let a = softmax(&logits, mask);
            for c in 0..d_k {
                concat[i].push((0..l).map(|j| a[j] * v[j][c]).sum());
            }
        }
    }
    mul(&concat, &to_mat(&p.w_o))
}

fn naive_pool(h: &Mat, mask: &[bool], p: &AdditiveAttentionParams) -> Vec<f64> {
    let w = to_mat(&p.w_a);
    let d_a = p.b_a.len();
    let scores: Vec<f64> = h
        .iter()
        .map(|row| {
            (0..d_a)
                .map(|a| {
                    let pre: f64 = (0..row.len()).map(|i| w[i][a] * row[i]).sum::<f64>() + p.b_a.data()[a];
                    p.v_a.data()[a] * pre.tanh()
                })
                .sum()
        })
        .collect();
    let weights = softmax(&scores, mask);
    let d = h[0].len();
    (0..d)
        .map(|c| (0..h.len()).map(|i| weights[i] * h[i][c]).sum())
        .collect()
}

fn naive_news(tokens: &[usize], p: &ModelParams) -> Vec<f64> {
    let x: Mat = tokens
        .iter()
        .map(|&t| p.embedding.matrix.row(t).to_vec())
        .collect();
    let mask = title_mask(tokens);
    naive_pool(&naive_mha(&x, &mask, &p.news_mha), &mask, &p.news_pool)
}

fn naive_loss(inst: &TrainingInstance, p: &ModelParams) -> f64 {
    let d = p.embedding.dim();
    let rows: Vec<Vec<f64>> = inst
        .history
        .iter()
        .zip(&inst.history_mask)
        .map(|(t, &m)| if m { naive_news(t, p) } else { vec![0.0; d] })
        .collect();
    let user = if inst.history_mask.iter().any(|&m| m) {
        let h = naive_mha(&rows, &inst.history_mask, &p.user_mha);
        naive_pool(&h, &inst.history_mask, &p.user_pool)
    } else {
        vec![0.0; d]
    };
    let scores: Vec<f64> = inst
        .candidates
        .iter()
        .map(|c| naive_news(c, p).iter().zip(&user).map(|(a, b)| a * b).sum())
        .collect();
    let z: f64 = scores.iter().map(|s| s.exp()).sum();
    z.ln() - scores[0]
}

fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Tensor {
    let data = (0..rows * cols).map(|_| rng.uniform(-1.0, 1.0)).collect();
    Tensor::from_vec(&[rows, cols], data).unwrap()
}

fn random_mask(rng: &mut Rng, l: usize) -> Vec<bool> {
    let mut mask: Vec<bool> = (0..l).map(|_| rng.below(3) > 0).collect();
    mask[rng.below(l)] = true;
    mask
}

#[test]
fn attention_matches_naive_loops() {
    for seed in 0..50 {
        let mut rng = Rng::seed(seed);
        let (d, h) = [(6, 2), (6, 3), (8, 4), (12, 3), (5, 1)][rng.below(5)];
        let l = 1 + rng.below(6);
        let params = MultiHeadParams::random(d, h, &mut rng).unwrap();
        let x = random_matrix(&mut rng, l, d);
        let mask = random_mask(&mut rng, l);
        let (out, cache) = multi_head_self_attention(&x, &mask, &params).unwrap();
        let want = naive_mha(&to_mat(&x), &mask, &params);
        for i in 0..l {
            for c in 0..d {
                assert!((out.row(i)[c] - want[i][c]).abs() < 1e-10, "seed {seed}");
            }
        }
        for a in cache.attention_weights() {
            for i in 0..l {
                let row = a.row(i);
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for (j, &m) in mask.iter().enumerate() {
                    if !m {
                        assert_eq!(row[j], 0.0);
                    }
                }
            }
        }
    }
}

#[test]
fn pooling_matches_naive_loops() {
    for seed in 0..50 {
        let mut rng = Rng::seed(seed);
        let d = 2 + rng.below(10);
        let l = 1 + rng.below(6);
        let mut params = AdditiveAttentionParams::random(d, 1 + rng.below(6), &mut rng).unwrap();
        for v in params.b_a.data_mut() {
            *v = rng.uniform(-0.5, 0.5);
        }
        let h = random_matrix(&mut rng, l, d);
        let mask = random_mask(&mut rng, l);
        let (r, cache) = additive_attention_pool(&h, &mask, &params).unwrap();
        let want = naive_pool(&to_mat(&h), &mask, &params);
        for (a, b) in r.data().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "seed {seed}");
        }
        assert!((cache.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn news_encoder_and_loss_match_naive_forward() {
    for seed in 0..50 {
        let mut rng = Rng::seed(seed);
        let config = minimal_config(&mut rng, seed);
        let params = random_params(&config, &mut rng);
        let m = config.max_title;
        let title = random_title(&mut rng, m, m);
        let r = encode_news(&title, &title_mask(&title), &params).unwrap();
        for (a, b) in r.data().iter().zip(naive_news(&title, &params)) {
            assert!((a - b).abs() < 1e-10, "seed {seed}");
        }

        let history = (0..config.max_history).map(|_| random_title(&mut rng, m, m)).collect();
        let history_mask: Vec<bool> = (0..config.max_history).map(|_| rng.below(3) > 0).collect();
        let candidates = (0..=config.neg_k).map(|_| random_title(&mut rng, m, m)).collect();
        let inst = TrainingInstance {
            history,
            history_mask,
            candidates,
        };
        let (loss, _) = instance_loss(&inst, &params).unwrap();
        assert!((loss - naive_loss(&inst, &params)).abs() < 1e-10, "seed {seed}");
    }
}
