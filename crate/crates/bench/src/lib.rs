//! Synthetic inputs for the benchmarks.

use coword_core::{Corpus, KeywordKind, Paper};
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const VENUES: [&str; 3] = ["InfoVis", "SciVis", "VAST"];

/// A corpus of `papers` papers over ten years and three venues. Keywords are
/// drawn from a vocabulary of `vocabulary` terms with rank-frequency weights
/// `1 / rank`, three to six per paper.
pub fn synthetic_corpus(papers: usize, vocabulary: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights =
        WeightedIndex::new((1..=vocabulary).map(|r| 1.0 / r as f64)).expect("non-empty vocabulary");
    let papers = (0..papers)
        .map(|i| {
            let n = rng.gen_range(3..=6).min(vocabulary);
            let mut keywords: Vec<String> = Vec::with_capacity(n);
            while keywords.len() < n {
                let k = format!("keyword {:04}", weights.sample(&mut rng));
                if !keywords.contains(&k) {
                    keywords.push(k);
                }
            }
            Paper {
                id: format!("p{i:05}"),
                title: format!("Paper {i}"),
                venue: VENUES[i % VENUES.len()].to_owned(),
                year: 2004 + (i % 10) as i32,
                keywords,
            }
        })
        .collect();
    Corpus::new(papers, "synthetic", KeywordKind::Author).expect("generated corpus is valid")
}

/// `n` random points in `dim` dimensions with coordinates in `0..10`.
pub fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(0.0..10.0)).collect())
        .collect()
}
