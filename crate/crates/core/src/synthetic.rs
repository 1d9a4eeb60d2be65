//! Generator for a small two-topic MIND-format corpus with a known answer:
//! two user archetypes, each clicking only articles of its own topic.

use crate::data::{ImpressionRecord, NewsRecord};
use crate::numerics::Rng;

pub const TOPICS: [&str; 2] = ["alpha", "beta"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSpec {
    /// Articles per topic.
    pub articles_per_topic: usize,
    /// Distinct title words per topic (topics share none).
    pub words_per_topic: usize,
    pub title_len: usize,
    pub users_per_archetype: usize,
    pub history_len: std::ops::RangeInclusive<usize>,
    pub clicks: std::ops::RangeInclusive<usize>,
    pub non_clicks: std::ops::RangeInclusive<usize>,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            articles_per_topic: 20,
            words_per_topic: 12,
            title_len: 4,
            users_per_archetype: 25,
            history_len: 2..=5,
            clicks: 1..=2,
            non_clicks: 2..=4,
        }
    }
}

fn pick(rng: &mut Rng, range: &std::ops::RangeInclusive<usize>) -> usize {
    range.start() + rng.below(range.end() - range.start() + 1)
}

/// `2 · articles_per_topic` news records; article `N{t}_{i}` belongs to topic `t`.
pub fn two_topic_news(spec: &CorpusSpec, rng: &mut Rng) -> Vec<NewsRecord> {
    let mut out = Vec::with_capacity(2 * spec.articles_per_topic);
    for (t, topic) in TOPICS.iter().enumerate() {
        for i in 0..spec.articles_per_topic {
            let words: Vec<String> = (0..spec.title_len)
                .map(|_| format!("{topic}{}", rng.below(spec.words_per_topic)))
                .collect();
            out.push(NewsRecord {
                news_id: format!("N{t}_{i}"),
                category: topic.to_string(),
                subcategory: format!("{topic}-{}", i % 3),
                title: words.join(" "),
                r#abstract: String::new(),
                url: format!("https://example.invalid/{t}/{i}"),
                title_entities: "[]".into(),
                abstract_entities: "[]".into(),
            });
        }
    }
    out
}

fn topic_ids(spec: &CorpusSpec, topic: usize) -> Vec<String> {
    (0..spec.articles_per_topic)
        .map(|i| format!("N{topic}_{i}"))
        .collect()
}

/// Impressions where users of archetype `t` have a topic-`t` history, click
/// only topic-`t` articles and skip the other topic.
pub fn two_topic_impressions(
    spec: &CorpusSpec,
    count: usize,
    id_prefix: &str,
    rng: &mut Rng,
) -> Vec<ImpressionRecord> {
    let ids = [topic_ids(spec, 0), topic_ids(spec, 1)];
    (0..count)
        .map(|n| {
            let archetype = rng.below(2);
            let user = rng.below(spec.users_per_archetype);
            let own = &ids[archetype];
            let other = &ids[1 - archetype];
            let history = (0..pick(rng, &spec.history_len))
                .map(|_| own[rng.below(own.len())].clone())
                .collect();
            let mut shown: Vec<(String, bool)> = Vec::new();
            let clicks = pick(rng, &spec.clicks);
            let non_clicks = pick(rng, &spec.non_clicks);
            for i in rng.sample_distinct(own.len(), clicks) {
                shown.push((own[i].clone(), true));
            }
            for i in rng.sample_distinct(other.len(), non_clicks) {
                shown.push((other[i].clone(), false));
            }
            rng.shuffle(&mut shown);
            ImpressionRecord {
                impression_id: format!("{id_prefix}{}", n + 1),
                user_id: format!("U{archetype}_{user}"),
                time: "11/15/2019 8:00:00 AM".into(),
                history,
                impressions: shown,
            }
        })
        .collect()
}

/// Permutes click labels within every impression, destroying any relation
/// between history and clicks while keeping click counts.
pub fn shuffle_labels(records: &[ImpressionRecord], rng: &mut Rng) -> Vec<ImpressionRecord> {
    records
        .iter()
        .map(|r| {
            let mut labels: Vec<bool> = r.impressions.iter().map(|(_, l)| *l).collect();
            rng.shuffle(&mut labels);
            let mut out = r.clone();
            for ((_, l), new) in out.impressions.iter_mut().zip(labels) {
                *l = new;
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::tokenize;
    use std::collections::HashSet;

    #[test]
    fn topics_are_token_disjoint() {
        let spec = CorpusSpec::default();
        let news = two_topic_news(&spec, &mut Rng::seed(1));
        assert_eq!(news.len(), 40);
        let vocab = |topic: &str| -> HashSet<String> {
            news.iter()
                .filter(|n| n.category == topic)
                .flat_map(|n| tokenize(&n.title))
                .collect()
        };
        assert!(vocab("alpha").is_disjoint(&vocab("beta")));
    }

    #[test]
    fn clicks_follow_archetype() {
        let spec = CorpusSpec::default();
        for r in two_topic_impressions(&spec, 50, "t", &mut Rng::seed(2)) {
            let topic = &r.user_id[1..2];
            for (id, clicked) in &r.impressions {
                assert_eq!(*clicked, &id[1..2] == topic);
            }
            assert!(r.history.iter().all(|h| &h[1..2] == topic));
        }
    }

    #[test]
    fn shuffled_labels_keep_counts() {
        let spec = CorpusSpec::default();
        let recs = two_topic_impressions(&spec, 20, "t", &mut Rng::seed(3));
        let shuffled = shuffle_labels(&recs, &mut Rng::seed(4));
        for (a, b) in recs.iter().zip(&shuffled) {
            assert_eq!(a.clicked().count(), b.clicked().count());
        }
    }
}
