//! Length-preserving word replacement driven by a frequency table.
//!
//! A distortion is a word selection (which words, by cumulative frequency
//! mass under some ordering) combined with a substitution mode (what each
//! character of a selected word becomes). Every combination keeps the byte
//! length of the document unchanged.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{scan_words, Document, FrequencyTable};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionOrder {
    MostFrequentFirst,
    LeastFrequentFirst,
    RandomPermutation(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubstitutionMode {
    Asterisk,
    RandomChars(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionSpec {
    pub order: SelectionOrder,
    pub mode: SubstitutionMode,
    /// Fraction of the table's total mass to cover, in `[0, 1]`.
    pub p: f64,
}

/// Seedless selection order, as named on the command line and in CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    Most,
    Least,
    Random,
}

/// Seedless substitution mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    Asterisk,
    RandomChars,
}

impl OrderKind {
    pub const ALL: [OrderKind; 3] = [OrderKind::Most, OrderKind::Least, OrderKind::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            OrderKind::Most => "most",
            OrderKind::Least => "least",
            OrderKind::Random => "random",
        }
    }

    pub fn with_seed(self, seed: u64) -> SelectionOrder {
        match self {
            OrderKind::Most => SelectionOrder::MostFrequentFirst,
            OrderKind::Least => SelectionOrder::LeastFrequentFirst,
            OrderKind::Random => SelectionOrder::RandomPermutation(seed),
        }
    }
}

impl ModeKind {
    pub const ALL: [ModeKind; 2] = [ModeKind::Asterisk, ModeKind::RandomChars];

    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Asterisk => "asterisk",
            ModeKind::RandomChars => "random-chars",
        }
    }

    pub fn with_seed(self, seed: u64) -> SubstitutionMode {
        match self {
            ModeKind::Asterisk => SubstitutionMode::Asterisk,
            ModeKind::RandomChars => SubstitutionMode::RandomChars(seed),
        }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "most" => Ok(OrderKind::Most),
            "least" => Ok(OrderKind::Least),
            "random" => Ok(OrderKind::Random),
            _ => Err(Error::invalid(format!(
                "unknown selection order `{s}` (expected most, least or random)"
            ))),
        }
    }
}

impl FromStr for ModeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asterisk" => Ok(ModeKind::Asterisk),
            "random-chars" | "random" => Ok(ModeKind::RandomChars),
            _ => Err(Error::invalid(format!(
                "unknown substitution mode `{s}` (expected asterisk or random-chars)"
            ))),
        }
    }
}

fn check_fraction(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "mass fraction {p} is outside [0, 1]"
        )))
    }
}

/// Table words arranged by `order`. Ties are broken by lexicographic order.
pub fn arrange(table: &FrequencyTable, order: SelectionOrder) -> Vec<(&str, u64)> {
    // table iteration is already lexicographic, and the sorts below are stable
    let mut words: Vec<(&str, u64)> = table.iter().collect();
    match order {
        SelectionOrder::MostFrequentFirst => words.sort_by_key(|a| std::cmp::Reverse(a.1)),
        SelectionOrder::LeastFrequentFirst => words.sort_by_key(|a| a.1),
        SelectionOrder::RandomPermutation(seed) => words.shuffle(&mut rng_from(seed)),
    }
    words
}

/// The shortest prefix of the arranged words whose mass reaches `p` of the total.
pub fn select_words(
    table: &FrequencyTable,
    order: SelectionOrder,
    p: f64,
) -> Result<HashSet<String>> {
    check_fraction(p)?;
    let mut selected = HashSet::new();
    if p == 0.0 {
        return Ok(selected);
    }
    let target = p * table.total_mass() as f64;
    let mut cumulative = 0u64;
    for (word, mass) in arrange(table, order) {
        selected.insert(word.to_string());
        cumulative += mass;
        if cumulative as f64 >= target {
            break;
        }
    }
    Ok(selected)
}

/// Replaces every character of each word occurrence whose lowercased form is
/// in `words`. `RandomChars` draws from a stream keyed by the mode seed and the
/// document id, so documents can be processed in any order.
pub fn distort(doc: &Document, words: &HashSet<String>, mode: SubstitutionMode) -> Document {
    let mut text = doc.text().to_vec();
    if words.is_empty() {
        return doc.with_text(text);
    }
    let mut rng = match mode {
        SubstitutionMode::RandomChars(seed) => Some(rng_from(derive_seed(
            seed,
            &["document".into(), doc.id().into()],
        ))),
        SubstitutionMode::Asterisk => None,
    };
    let mut key = String::new();
    scan_words(doc.text(), |start, end| {
        key.clear();
        key.extend(
            doc.text()[start..end]
                .iter()
                .map(|b| b.to_ascii_lowercase() as char),
        );
        if !words.contains(&key) {
            return;
        }
        for byte in &mut text[start..end] {
            *byte = match rng.as_mut() {
                Some(rng) => b'a' + rng.gen_range(0..26u8),
                None => b'*',
            };
        }
    });
    doc.with_text(text)
}

/// Selects once, then distorts every document with the same word set.
pub fn apply_spec(
    corpus: &[Document],
    table: &FrequencyTable,
    spec: &DistortionSpec,
) -> Result<Vec<Document>> {
    let words = select_words(table, spec.order, spec.p)?;
    Ok(corpus
        .iter()
        .map(|doc| distort(doc, &words, spec.mode))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> FrequencyTable {
        FrequencyTable::from_counts([("a", 50), ("b", 30), ("c", 20)]).unwrap()
    }

    fn set(words: &[&str]) -> HashSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn doc(text: &str) -> Document {
        Document::new("G", "T", text).unwrap()
    }

    #[test]
    fn selection_examples() {
        let t = abc();
        assert_eq!(
            select_words(&t, SelectionOrder::MostFrequentFirst, 0.6).unwrap(),
            set(&["a", "b"])
        );
        assert_eq!(
            select_words(&t, SelectionOrder::LeastFrequentFirst, 0.6).unwrap(),
            set(&["a", "b", "c"])
        );
        for order in [
            SelectionOrder::MostFrequentFirst,
            SelectionOrder::LeastFrequentFirst,
            SelectionOrder::RandomPermutation(9),
        ] {
            assert!(select_words(&t, order, 0.0).unwrap().is_empty());
            assert_eq!(select_words(&t, order, 1.0).unwrap(), t.words());
        }
        assert!(select_words(&t, SelectionOrder::MostFrequentFirst, 1.5).is_err());
        assert!(select_words(&t, SelectionOrder::MostFrequentFirst, -0.1).is_err());
    }

    #[test]
    fn ties_break_lexicographically() {
        let t = FrequencyTable::from_counts([("zeta", 5), ("alpha", 5), ("mid", 5)]).unwrap();
        let most: Vec<_> = arrange(&t, SelectionOrder::MostFrequentFirst)
            .into_iter()
            .map(|w| w.0)
            .collect();
        assert_eq!(most, vec!["alpha", "mid", "zeta"]);
        let least: Vec<_> = arrange(&t, SelectionOrder::LeastFrequentFirst)
            .into_iter()
            .map(|w| w.0)
            .collect();
        assert_eq!(least, vec!["alpha", "mid", "zeta"]);
    }

    #[test]
    fn distort_examples() {
        let d = doc("the cat");
        assert_eq!(
            distort(&d, &set(&["the"]), SubstitutionMode::Asterisk).text(),
            b"*** cat"
        );
        assert_eq!(
            distort(&d, &set(&[]), SubstitutionMode::Asterisk).text(),
            b"the cat"
        );
        assert_eq!(
            distort(&d, &set(&[]), SubstitutionMode::RandomChars(3)).text(),
            b"the cat"
        );

        let a = distort(&d, &set(&["the"]), SubstitutionMode::RandomChars(42));
        let b = distort(&d, &set(&["the"]), SubstitutionMode::RandomChars(42));
        assert_eq!(a, b);
        assert_eq!(&a.text()[3..], b" cat");
        assert!(a.text()[..3].iter().all(u8::is_ascii_lowercase));
        assert_eq!(a.id(), d.id());
    }

    #[test]
    fn out_of_vocabulary_words_survive_full_selection() {
        let t = FrequencyTable::from_counts([("the", 100), ("knight", 5), ("and", 60)]).unwrap();
        let d = doc("The knight and Dulcinea and Micomicona.");
        let all = select_words(&t, SelectionOrder::MostFrequentFirst, 1.0).unwrap();
        let out = distort(&d, &all, SubstitutionMode::Asterisk);
        assert_eq!(out.text(), b"*** ****** *** Dulcinea *** Micomicona.");
    }

    #[test]
    fn matching_is_case_insensitive_and_keeps_span() {
        let d = doc("THE The the theme");
        let out = distort(&d, &set(&["the"]), SubstitutionMode::Asterisk);
        assert_eq!(out.text(), b"*** *** *** theme");
    }

    #[test]
    fn apply_spec_at_zero_is_identity() {
        let corpus = vec![doc("a b c"), Document::new("H", "U", "c b a").unwrap()];
        let spec = DistortionSpec {
            order: SelectionOrder::MostFrequentFirst,
            mode: SubstitutionMode::RandomChars(1),
            p: 0.0,
        };
        assert_eq!(apply_spec(&corpus, &abc(), &spec).unwrap(), corpus);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in OrderKind::ALL {
            assert_eq!(k.as_str().parse::<OrderKind>().unwrap(), k);
        }
        for k in ModeKind::ALL {
            assert_eq!(k.as_str().parse::<ModeKind>().unwrap(), k);
        }
    }

    fn any_order() -> impl Strategy<Value = SelectionOrder> {
        prop_oneof![
            Just(SelectionOrder::MostFrequentFirst),
            Just(SelectionOrder::LeastFrequentFirst),
            any::<u64>().prop_map(SelectionOrder::RandomPermutation),
        ]
    }

    proptest! {
        #[test]
        fn selection_is_prefix_monotone(
            counts in proptest::collection::vec(("[a-f]{1,3}", 1u64..500), 1..40),
            order in any_order(),
            p1 in 0.0f64..=1.0,
            p2 in 0.0f64..=1.0,
        ) {
            let t = FrequencyTable::from_counts(counts).unwrap();
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let small = select_words(&t, order, lo).unwrap();
            let large = select_words(&t, order, hi).unwrap();
            prop_assert!(small.is_subset(&large));
        }

        #[test]
        fn asterisk_is_idempotent_and_length_preserving(
            text in "[a-dA-D' ,.]{0,120}",
            chosen in proptest::collection::hash_set("[a-d]{1,2}", 0..6),
        ) {
            let d = doc(&text);
            let once = distort(&d, &chosen, SubstitutionMode::Asterisk);
            prop_assert_eq!(once.len(), d.len());
            let twice = distort(&once, &chosen, SubstitutionMode::Asterisk);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn unselected_bytes_are_untouched(
            text in "[a-dA-D' ,.]{0,120}",
            chosen in proptest::collection::hash_set("[a-d]{1,2}", 0..6),
            seed in any::<u64>(),
        ) {
            let d = doc(&text);
            let out = distort(&d, &chosen, SubstitutionMode::RandomChars(seed));
            prop_assert_eq!(out.len(), d.len());
            let mut hit = vec![false; d.len()];
            for w in d.words() {
                if chosen.contains(&w.normalized) {
                    hit[w.start..w.end].iter_mut().for_each(|h| *h = true);
                }
            }
            for (i, (a, b)) in d.text().iter().zip(out.text()).enumerate() {
                if hit[i] {
                    prop_assert!(b.is_ascii_lowercase());
                } else {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
