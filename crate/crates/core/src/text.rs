//! Text normalization and the TF-IDF vector space model.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::stopwords;

/// Sparse nonnegative term-weight vector, entries sorted by term id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TermVector {
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl TermVector {
    /// Builds a vector from `(term, weight)` pairs. Repeated terms are summed,
    /// zero weights dropped.
    ///
    /// Panics on negative or non-finite weights.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for (t, w) in pairs {
            assert!(w.is_finite() && w >= 0.0, "term weight must be finite and >= 0, got {w}");
            *acc.entry(t).or_insert(0.0) += w;
        }
        Self::from_sorted(acc.into_iter().filter(|&(_, w)| w > 0.0).collect())
    }

    /// Dense convenience constructor; index i becomes term id i.
    pub fn from_dense(weights: &[f64]) -> Self {
        Self::from_pairs(weights.iter().enumerate().map(|(i, &w)| (i as u32, w)))
    }

    fn from_sorted(entries: Vec<(u32, f64)>) -> Self {
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        TermVector { entries, norm }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn get(&self, term: u32) -> f64 {
        self.entries
            .binary_search_by_key(&term, |&(t, _)| t)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn dot(&self, other: &TermVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Component-wise mean of `vectors`. Empty input gives the empty vector.
    pub fn mean<'a>(vectors: impl IntoIterator<Item = &'a TermVector>) -> TermVector {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        let mut n = 0usize;
        for v in vectors {
            n += 1;
            for &(t, w) in &v.entries {
                *acc.entry(t).or_insert(0.0) += w;
            }
        }
        if n == 0 {
            return TermVector::default();
        }
        let n = n as f64;
        Self::from_sorted(acc.into_iter().map(|(t, w)| (t, w / n)).filter(|&(_, w)| w > 0.0).collect())
    }
}

/// Cosine similarity; 0 when either vector is empty.
pub fn cosine_similarity(a: &TermVector, b: &TermVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    (a.dot(b) / (a.norm * b.norm)).clamp(0.0, 1.0)
}

/// Euclidean distance over the union of supports.
pub fn euclidean_distance(a: &TermVector, b: &TermVector) -> f64 {
    let (x, y) = (&a.entries, &b.entries);
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < x.len() || j < y.len() {
        let d = match (x.get(i), y.get(j)) {
            (Some(&(ta, wa)), Some(&(tb, wb))) if ta == tb => {
                i += 1;
                j += 1;
                wa - wb
            }
            (Some(&(ta, wa)), Some(&(tb, _))) if ta < tb => {
                i += 1;
                wa
            }
            (Some(&(_, wa)), None) => {
                i += 1;
                wa
            }
            (_, Some(&(_, wb))) => {
                j += 1;
                wb
            }
            (None, None) => unreachable!(),
        };
        acc += d * d;
    }
    acc.sqrt()
}

/// Tokenizer, stopword filter and stemmer.
pub struct Normalizer {
    stemmer: Stemmer,
    stopwords: HashSet<String>,
}

impl fmt::Debug for Normalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Normalizer").field("stopwords", &self.stopwords.len()).finish()
    }
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::with_stopwords(stopwords::ENGLISH.iter().map(|s| s.to_string()))
    }
}

impl Normalizer {
    pub fn with_stopwords(words: impl IntoIterator<Item = String>) -> Self {
        Normalizer {
            stemmer: Stemmer::create(Algorithm::English),
            stopwords: words.into_iter().map(|w| w.trim().to_lowercase()).filter(|w| !w.is_empty()).collect(),
        }
    }

    /// Loads a stopword file with one word per line.
    pub fn from_stopword_file(path: impl AsRef<Path>) -> Result<Self> {
        let content = fs::read_to_string(path)?;
        Ok(Self::with_stopwords(content.lines().map(str::to_string)))
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    /// Lowercases, strips URLs, @handles and hashtag markers, drops stopwords
    /// and returns the stemmed terms in order.
    pub fn normalize(&self, raw: &str) -> Vec<String> {
        let lower = raw.to_lowercase();
        let mut terms = Vec::new();
        for token in lower.split_whitespace() {
            if token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.") {
                continue;
            }
            if token.starts_with('@') {
                continue;
            }
            let token = token.trim_start_matches('#');
            for word in token.split(|c: char| !(c.is_alphanumeric() || c == '\'')) {
                let word = word.trim_matches('\'');
                if word.is_empty() || self.stopwords.contains(word) {
                    continue;
                }
                for part in word.split('\'') {
                    if part.is_empty() || self.stopwords.contains(part) {
                        continue;
                    }
                    terms.push(self.stemmer.stem(part).into_owned());
                }
            }
        }
        terms
    }

    /// Like [`Normalizer::normalize`] but accepts arbitrary bytes; invalid UTF-8 is dropped.
    pub fn normalize_bytes(&self, raw: &[u8]) -> Vec<String> {
        let text = String::from_utf8_lossy(raw).replace(char::REPLACEMENT_CHARACTER, "");
        self.normalize(&text)
    }
}

/// Relative term frequency of every distinct term.
pub fn term_frequency(terms: &[String]) -> Result<BTreeMap<String, f64>> {
    if terms.is_empty() {
        return Err(Error::EmptyTerms);
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in terms {
        *counts.entry(t.clone()).or_insert(0) += 1;
    }
    let n = terms.len() as f64;
    Ok(counts.into_iter().map(|(t, c)| (t, c as f64 / n)).collect())
}

/// Term dictionary with document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, u32>,
    doc_freq: Vec<u32>,
    corpus_size: usize,
    /// `None` for the natural logarithm.
    log_base: Option<f64>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, id: u32) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn doc_freq(&self, term: &str) -> Option<u32> {
        self.term_id(term).map(|i| self.doc_freq[i as usize])
    }

    /// `log(|corpus| / n_t)` in the configured base.
    pub fn idf(&self, term: &str) -> Result<f64> {
        let id = self.term_id(term).ok_or_else(|| Error::UnknownTerm(term.to_string()))?;
        Ok(self.idf_by_id(id))
    }

    fn idf_by_id(&self, id: u32) -> f64 {
        let ratio = self.corpus_size as f64 / self.doc_freq[id as usize] as f64;
        match self.log_base {
            None => ratio.ln(),
            Some(b) => ratio.ln() / b.ln(),
        }
    }

    /// Rebuilds the lookup index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
    }
}

/// Builds the vocabulary and TF-IDF vectors for pre-tokenized documents.
///
/// Term ids follow first appearance; documents without terms get the empty vector.
pub fn tfidf_vectorize(docs: &[Vec<String>], log_base: Option<f64>) -> (Vocabulary, Vec<TermVector>) {
    if let Some(b) = log_base {
        assert!(b > 0.0 && b != 1.0, "idf log base must be positive and != 1");
    }
    let mut vocab = Vocabulary {
        terms: Vec::new(),
        index: HashMap::new(),
        doc_freq: Vec::new(),
        corpus_size: docs.len(),
        log_base,
    };
    for doc in docs {
        let mut seen = HashSet::new();
        for t in doc {
            let id = match vocab.index.get(t) {
                Some(&id) => id,
                None => {
                    let id = vocab.terms.len() as u32;
                    vocab.terms.push(t.clone());
                    vocab.index.insert(t.clone(), id);
                    vocab.doc_freq.push(0);
                    id
                }
            };
            if seen.insert(id) {
                vocab.doc_freq[id as usize] += 1;
            }
        }
    }

    let vectors = docs
        .par_iter()
        .map(|doc| {
            if doc.is_empty() {
                return TermVector::default();
            }
            let n = doc.len() as f64;
            let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
            for t in doc {
                *counts.entry(vocab.index[t]).or_insert(0) += 1;
            }
            TermVector::from_sorted(
                counts
                    .into_iter()
                    .map(|(id, c)| (id, c as f64 / n * vocab.idf_by_id(id)))
                    .filter(|&(_, w)| w > 0.0)
                    .collect(),
            )
        })
        .collect();
    (vocab, vectors)
}

/// Normalizes every content edge's text and attaches its TF-IDF vector.
pub fn vectorize_graph(graph: &mut SocialGraph, normalizer: &Normalizer, log_base: Option<f64>) -> Vocabulary {
    let docs: Vec<Vec<String>> = graph
        .content_edges()
        .par_iter()
        .map(|e| normalizer.normalize(&e.raw_text))
        .collect();
    let (vocab, vectors) = tfidf_vectorize(&docs, log_base);
    graph.set_vectors(vectors);
    vocab
}

/// A user's interest profile: stemmed terms weighted by term frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct InterestVector {
    terms: Vec<(String, f64)>,
}

impl InterestVector {
    pub fn terms(&self) -> &[(String, f64)] {
        &self.terms
    }

    /// Space-joined terms, for reports.
    pub fn label(&self) -> String {
        self.terms.iter().map(|(t, _)| t.as_str()).collect::<Vec<_>>().join(" ")
    }

    /// Projects onto the vocabulary's term ids. Terms absent from the corpus get
    /// fresh ids past the vocabulary so they still count toward the norm.
    pub fn embed(&self, vocab: &Vocabulary) -> TermVector {
        let mut next = vocab.len() as u32;
        TermVector::from_pairs(self.terms.iter().map(|(t, w)| {
            let id = vocab.term_id(t).unwrap_or_else(|| {
                next += 1;
                next - 1
            });
            (id, *w)
        }))
    }
}

/// Keeps the `top_n` highest-TF terms of the keywords plus optional profile text.
pub fn extract_interests(
    normalizer: &Normalizer,
    keywords: &str,
    profile_text: Option<&str>,
    top_n: usize,
) -> Result<InterestVector> {
    let mut terms = normalizer.normalize(keywords);
    if let Some(p) = profile_text {
        terms.extend(normalizer.normalize(p));
    }
    if terms.is_empty() {
        return Err(Error::EmptyInterests);
    }
    let mut tf: Vec<(String, f64)> = term_frequency(&terms)?.into_iter().collect();
    // BTreeMap order is lexicographic, so a stable sort keeps that order on ties.
    tf.sort_by(|a, b| b.1.total_cmp(&a.1));
    tf.truncate(top_n.max(1));
    Ok(InterestVector { terms: tf })
}
