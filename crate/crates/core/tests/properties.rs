mod common;

use std::collections::HashMap;

use nram::data::{build_vocabulary, make_training_instances, ImpressionRecord, NewsIndex, NewsRecord};
use nram::model::{rank_candidates, ModelConfig};
use nram::numerics::{masked_softmax, matmul, Rng, Tensor};
use proptest::prelude::*;

use common::{minimal_config, random_params, random_title};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Tensor> {
    prop::collection::vec(-1.0f64..1.0, rows * cols)
        .prop_map(move |data| Tensor::from_vec(&[rows, cols], data).unwrap())
}

proptest! {
    #[test]
    fn softmax_sums_to_one_with_exact_zeros(
        pairs in prop::collection::vec((-50.0f64..50.0, any::<bool>()), 1..12)
    ) {
        let (logits, mut mask): (Vec<f64>, Vec<bool>) = pairs.into_iter().unzip();
        mask[0] = true;
        let p = masked_softmax(&logits, &mask).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (v, m) in p.iter().zip(&mask) {
            if !m {
                prop_assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn matmul_is_associative_at_tolerance(
        (a, b, c) in (1usize..=8, 1usize..=8, 1usize..=8, 1usize..=8)
            .prop_flat_map(|(n, k, m, p)| (matrix(n, k), matrix(k, m), matrix(m, p)))
    ) {
        let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
        let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-9);
    }

    #[test]
    fn duplicated_candidates_rank_in_adjacent_pairs(seed in 0u64..500, n in 1usize..6) {
        let mut rng = Rng::seed(seed);
        let config = minimal_config(&mut rng, seed);
        let params = random_params(&config, &mut rng);
        let m = config.max_title;
        let history: Vec<Vec<usize>> = (0..config.max_history).map(|_| random_title(&mut rng, m, m)).collect();
        let mask = vec![true; history.len()];
        let candidates: Vec<Vec<usize>> = (0..n).map(|_| random_title(&mut rng, m, m)).collect();
        let once = rank_candidates(&history, &mask, &candidates, &params).unwrap();
        let doubled: Vec<Vec<usize>> = candidates.iter().flat_map(|c| [c.clone(), c.clone()]).collect();
        let twice = rank_candidates(&history, &mask, &doubled, &params).unwrap();
        for (pair, (idx, score)) in twice.chunks(2).zip(&once) {
            prop_assert_eq!(pair[0].0, 2 * idx);
            prop_assert_eq!(pair[1].0, 2 * idx + 1);
            prop_assert_eq!(pair[0].1, *score);
        }
    }

    #[test]
    fn same_seed_same_stream(seed in any::<u64>()) {
        let (mut a, mut b) = (Rng::seed(seed), Rng::seed(seed));
        for _ in 0..32 {
            prop_assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}

fn article(id: &str) -> NewsRecord {
    NewsRecord {
        news_id: id.into(),
        category: "c".into(),
        subcategory: "s".into(),
        title: format!("word{id}"),
        r#abstract: String::new(),
        url: String::new(),
        title_entities: "[]".into(),
        abstract_entities: "[]".into(),
    }
}

/// Negatives are drawn uniformly: with 1 click and 6 skips at K = 2, every
/// skip appears with probability 1/3. Pearson chi-square, 5 degrees of
/// freedom, critical value 20.52 at p = 0.001.
#[test]
fn negative_sampling_is_uniform() {
    let ids: Vec<String> = (0..7).map(|i| format!("n{i}")).collect();
    let news: Vec<NewsRecord> = ids.iter().map(|i| article(i)).collect();
    let vocab = build_vocabulary(&news, 1).unwrap();
    let config = ModelConfig {
        d_model: 6,
        heads: 2,
        d_attn: 4,
        max_title: 1,
        max_history: 1,
        neg_k: 2,
        seed: 0,
    };
    let index = NewsIndex::build(&news, &vocab, 1);
    let records: Vec<ImpressionRecord> = (0..6000)
        .map(|n| ImpressionRecord {
            impression_id: n.to_string(),
            user_id: "u".into(),
            time: String::new(),
            history: vec![],
            impressions: ids
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), i == 0))
                .collect(),
        })
        .collect();
    let (instances, report) = make_training_instances(&records, &index, &config, &mut Rng::seed(5));
    assert_eq!(report.instances, 6000);

    let token_to_id: HashMap<usize, usize> =
        (1..7).map(|i| (index.get(&ids[i]).unwrap()[0], i)).collect();
    let mut counts = [0usize; 7];
    for inst in &instances {
        let negs: Vec<usize> = inst.candidates[1..].iter().map(|c| token_to_id[&c[0]]).collect();
        assert_ne!(negs[0], negs[1], "sampled with replacement although 6 skips exist");
        for n in negs {
            counts[n] += 1;
        }
    }
    let expected = 6000.0 * 2.0 / 6.0;
    let chi2: f64 = counts[1..]
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < 20.52, "chi-square {chi2} for counts {counts:?}");
}
