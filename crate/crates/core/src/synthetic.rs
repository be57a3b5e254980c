//! Synthetic corpora from order-2 character Markov sources.
//!
//! Each source is a random sparse chain over `a..z` and space: every
//! two-character context allows a handful of letters plus, after a letter, a
//! space. Documents drawn from one source share many short substrings, while
//! documents from different sources share few, which gives a corpus whose
//! correct grouping is known.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::Rng;

use crate::corpus::Document;
use crate::error::Result;
use crate::seed::{derive_seed, rng_from};

const ALPHABET: &[u8; 27] = b"abcdefghijklmnopqrstuvwxyz ";
const SPACE: usize = 26;

#[derive(Debug, Clone)]
pub struct MarkovSource {
    /// Per context `27 * prev2 + prev1`: allowed next symbols and a sampler.
    table: Vec<(Vec<u8>, WeightedIndex<u32>)>,
}

impl MarkovSource {
    /// A random source where each context allows `branching` letters.
    pub fn random<R: Rng>(rng: &mut R, branching: usize) -> Self {
        let branching = branching.clamp(1, 26);
        let mut table = Vec::with_capacity(27 * 27);
        for ctx in 0..27 * 27 {
            let prev = ctx % 27;
            let mut symbols: Vec<u8> = sample(rng, 26, branching)
                .into_iter()
                .map(|i| ALPHABET[i])
                .collect();
            let mut weights: Vec<u32> = (0..branching).map(|_| rng.gen_range(1..=8)).collect();
            if prev != SPACE {
                let letters: u32 = weights.iter().sum();
                symbols.push(b' ');
                weights.push((letters / 4).max(1));
            }
            let sampler = WeightedIndex::new(&weights).expect("positive weights");
            table.push((symbols, sampler));
        }
        MarkovSource { table }
    }

    pub fn generate<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        let (mut p2, mut p1) = (SPACE, SPACE);
        while out.len() < len {
            let (symbols, sampler) = &self.table[27 * p2 + p1];
            let b = symbols[sampler.sample(rng)];
            out.push(b);
            p2 = p1;
            p1 = if b == b' ' {
                SPACE
            } else {
                (b - b'a') as usize
            };
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticConfig {
    pub sources: usize,
    pub docs_per_source: usize,
    pub doc_bytes: usize,
    pub branching: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            sources: 4,
            docs_per_source: 3,
            doc_bytes: 50 * 1024,
            branching: 3,
        }
    }
}

/// Documents `S{i}.D{j}`: `docs_per_source` independent samples from each of
/// `sources` random Markov sources.
pub fn markov_corpus(cfg: &SyntheticConfig, seed: u64) -> Result<Vec<Document>> {
    let mut docs = Vec::with_capacity(cfg.sources * cfg.docs_per_source);
    for s in 0..cfg.sources {
        let mut rng = rng_from(derive_seed(seed, &["source".into(), (s as u64).into()]));
        let source = MarkovSource::random(&mut rng, cfg.branching);
        for d in 0..cfg.docs_per_source {
            let mut rng = rng_from(derive_seed(
                seed,
                &["document".into(), (s as u64).into(), (d as u64).into()],
            ));
            let text = source.generate(&mut rng, cfg.doc_bytes);
            docs.push(Document::new(format!("S{s}"), format!("D{d}"), text)?);
        }
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape_and_determinism() {
        let cfg = SyntheticConfig {
            doc_bytes: 2000,
            ..Default::default()
        };
        let a = markov_corpus(&cfg, 5).unwrap();
        assert_eq!(a.len(), 12);
        assert!(a.iter().all(|d| d.len() == 2000));
        assert_eq!(a[0].id(), "S0.D0");
        assert_eq!(a[11].id(), "S3.D2");
        assert_eq!(a, markov_corpus(&cfg, 5).unwrap());
        assert_ne!(a, markov_corpus(&cfg, 6).unwrap());
        let words = a[0].words();
        assert!(words.len() > 200, "{}", words.len());
        assert!(!a[0].text().windows(2).any(|w| w == b"  "));
    }
}
