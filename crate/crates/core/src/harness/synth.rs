//! Planted-topic corpus generator.
//!
//! Each topic owns a disjoint vocabulary: a few core words that most of its
//! posts repeat, plus a wider pool sampled per post. A shared noise pool is
//! mixed in at `noise_ratio`. Authors are grouped into per-topic communities so
//! that replies and mentions mostly connect posts of the same topic.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::PostRecord;
use crate::rng::seeded;
use crate::text::Normalizer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub topics: usize,
    /// Content posts in total, dealt round-robin over the topics.
    pub posts: usize,
    pub core_words: usize,
    pub topic_words: usize,
    pub noise_words: usize,
    /// Core words drawn per post, inclusive range.
    pub core_per_post: (usize, usize),
    /// Pool or noise tokens drawn per post, inclusive range.
    pub pool_per_post: (usize, usize),
    /// Probability that any emitted token is drawn from the noise pool.
    pub noise_ratio: f64,
    pub users_per_topic: usize,
    /// Extra follow records per user.
    pub follows_per_user: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            topics: 3,
            posts: 4000,
            core_words: 2,
            topic_words: 8,
            noise_words: 60,
            core_per_post: (2, 2),
            pool_per_post: (30, 40),
            noise_ratio: 0.05,
            users_per_topic: 120,
            follows_per_user: 1,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub records: Vec<PostRecord>,
    /// Planted topic of each record; `None` for structural records.
    pub topic_of_record: Vec<Option<usize>>,
    /// Core words first, then the wider pool, per topic.
    pub vocabularies: Vec<Vec<String>>,
    pub noise: Vec<String>,
    pub config: SynthConfig,
}

impl SynthCorpus {
    /// Topic of each content edge, in edge id order.
    pub fn content_topics(&self) -> Vec<usize> {
        self.topic_of_record.iter().flatten().copied().collect()
    }

    /// Interest queries built from one topic's vocabulary: two core words and
    /// `extra` pool words. Returns `(topic, keywords)`.
    pub fn queries<R: Rng + ?Sized>(&self, n: usize, extra: usize, rng: &mut R) -> Vec<(usize, String)> {
        let core = self.config.core_words;
        (0..n)
            .map(|i| {
                let t = i % self.config.topics;
                let vocab = &self.vocabularies[t];
                let mut words: Vec<&String> = vocab[..core].choose_multiple(rng, 2.min(core)).collect();
                words.extend(vocab[core..].choose_multiple(rng, extra));
                (t, words.into_iter().cloned().collect::<Vec<_>>().join(" "))
            })
            .collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

const CONSONANTS: &[u8] = b"bdfgklmnprtvz";
const VOWELS: &[u8] = b"aiou";

/// Pseudo-words that survive normalization unchanged and are pairwise distinct.
fn word_pool<R: Rng + ?Sized>(n: usize, rng: &mut R, normalizer: &Normalizer, taken: &mut HashSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.gen_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push(*CONSONANTS.choose(rng).unwrap() as char);
            w.push(*VOWELS.choose(rng).unwrap() as char);
        }
        if taken.contains(&w) {
            continue;
        }
        if normalizer.normalize(&w) != [w.clone()] {
            continue;
        }
        taken.insert(w.clone());
        out.push(w);
    }
    out
}

pub fn generate(config: &SynthConfig) -> SynthCorpus {
    let mut rng = seeded(config.seed);
    let normalizer = Normalizer::default();
    let mut taken = HashSet::new();
    let vocabularies: Vec<Vec<String>> = (0..config.topics)
        .map(|_| word_pool(config.core_words + config.topic_words, &mut rng, &normalizer, &mut taken))
        .collect();
    let noise = word_pool(config.noise_words, &mut rng, &normalizer, &mut taken);

    let mut order: Vec<usize> = (0..config.posts).map(|i| i % config.topics).collect();
    order.shuffle(&mut rng);

    let user = |t: usize, i: usize| format!("t{t}u{i}");
    let mut records = Vec::with_capacity(order.len());
    let mut topic_of_record = Vec::with_capacity(order.len());
    let mut by_topic: Vec<Vec<usize>> = vec![Vec::new(); config.topics];

    for (n, &t) in order.iter().enumerate() {
        let author_topic = if rng.gen_bool(0.05) { rng.gen_range(0..config.topics) } else { t };
        let author = user(author_topic, rng.gen_range(0..config.users_per_topic));
        let text = post_text(config, &vocabularies[t], &noise, &mut rng);
        let roll: f64 = rng.gen();
        let (kind, parent, target) = if roll < 0.55 || by_topic[t].is_empty() {
            ("post", None, None)
        } else if roll < 0.80 {
            let pool = &by_topic[t];
            let p = pool[rng.gen_range(0..pool.len())];
            ("reply", Some(records_id(p)), None)
        } else if roll < 0.90 {
            let pool = &by_topic[t];
            let p = pool[rng.gen_range(0..pool.len())];
            ("repost", Some(records_id(p)), None)
        } else {
            ("mention", None, Some(user(t, rng.gen_range(0..config.users_per_topic))))
        };
        by_topic[t].push(n);
        records.push(PostRecord {
            id: records_id(n),
            author,
            kind: kind.to_string(),
            target_user: target,
            parent_post: parent,
            text,
        });
        topic_of_record.push(Some(t));
    }

    let n_users = config.topics * config.users_per_topic;
    for i in 0..n_users * config.follows_per_user {
        let (ta, tb) = (rng.gen_range(0..config.topics), rng.gen_range(0..config.topics));
        records.push(PostRecord {
            id: format!("f{i}"),
            author: user(ta, rng.gen_range(0..config.users_per_topic)),
            kind: "follow".into(),
            target_user: Some(user(tb, rng.gen_range(0..config.users_per_topic))),
            parent_post: None,
            text: String::new(),
        });
        topic_of_record.push(None);
    }

    SynthCorpus {
        records,
        topic_of_record,
        vocabularies,
        noise,
        config: config.clone(),
    }
}

fn records_id(n: usize) -> String {
    format!("p{n}")
}

fn post_text<R: Rng + ?Sized>(config: &SynthConfig, vocab: &[String], noise: &[String], rng: &mut R) -> String {
    let core = &vocab[..config.core_words];
    let pool = &vocab[config.core_words..];
    let mut words: Vec<&str> = Vec::new();
    let (lo, hi) = config.core_per_post;
    let n_core = rng.gen_range(lo.min(core.len())..=hi.min(core.len()));
    words.extend(core.choose_multiple(rng, n_core).map(String::as_str));
    let n_pool = rng.gen_range(config.pool_per_post.0..=config.pool_per_post.1);
    for _ in 0..n_pool {
        if !noise.is_empty() && rng.gen_bool(config.noise_ratio.clamp(0.0, 1.0)) {
            words.push(noise.choose(rng).unwrap());
        } else {
            words.push(pool.choose(rng).unwrap());
        }
    }
    words.shuffle(rng);
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SocialGraph;

    #[test]
    fn small_corpus_shape() {
        let cfg = SynthConfig { posts: 150, users_per_topic: 10, ..Default::default() };
        let c = generate(&cfg);
        let g = SocialGraph::build(&c.records).unwrap();
        assert_eq!(g.content_len(), 150);
        assert_eq!(g.structural_edges().len(), 30);
        assert_eq!(c.content_topics().len(), 150);
        let all: HashSet<&String> = c.vocabularies.iter().flatten().chain(&c.noise).collect();
        assert_eq!(all.len(), 3 * 10 + 60);
        assert_eq!(generate(&cfg).to_jsonl(), c.to_jsonl());
    }
}
