// Normalizes a handful of posts, builds TF-IDF vectors and ranks the posts
// against an interest profile by cosine similarity.

use eho_forage::text::{cosine_similarity, extract_interests, tfidf_vectorize, Normalizer};

const POSTS: &[&str] = &[
    "RT @ml_weekly: Deep learning models keep getting bigger https://t.co/x1",
    "Learning to bake sourdough bread this weekend",
    "Machine learning on graphs: a survey of #GraphNeuralNetworks",
    "The machine was running all night",
    "Football results from the weekend",
];

pub fn run_example() -> Vec<(usize, f64)> {
    let normalizer = Normalizer::default();
    let docs: Vec<Vec<String>> = POSTS.iter().map(|p| normalizer.normalize(p)).collect();
    let (vocab, vectors) = tfidf_vectorize(&docs, None);
    let interest = extract_interests(&normalizer, "machine learning on graphs", Some("I read about learning machines"), 10).unwrap();
    let query = interest.embed(&vocab);
    let mut ranked: Vec<(usize, f64)> = vectors.iter().map(|v| cosine_similarity(v, &query)).enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

fn main() {
    for (i, sim) in run_example() {
        println!("{sim:.3}  {}", POSTS[i]);
    }
}
