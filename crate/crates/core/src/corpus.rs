//! Documents, word tokenization and word-frequency tables.
//!
//! Text is handled as raw bytes. A *word* is a maximal run of ASCII letters,
//! where an apostrophe counts as part of the run only when it sits between two
//! letters (`quixote's`). Everything else is gap. Bytes at or above 0x80 are
//! rejected so spans are always one byte per character.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    id: String,
    group_tag: String,
    title_tag: String,
    text: Vec<u8>,
}

impl Document {
    /// Builds a document whose id is `<group_tag>.<title_tag>`.
    pub fn new(
        group_tag: impl Into<String>,
        title_tag: impl Into<String>,
        text: impl Into<Vec<u8>>,
    ) -> Result<Self> {
        let group_tag = group_tag.into();
        let title_tag = title_tag.into();
        if group_tag.is_empty() {
            return Err(Error::invalid("document group tag is empty"));
        }
        let text = text.into();
        check_ascii(&text)?;
        Ok(Document {
            id: format!("{group_tag}.{title_tag}"),
            group_tag,
            title_tag,
            text,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn group_tag(&self) -> &str {
        &self.group_tag
    }

    pub fn title_tag(&self) -> &str {
        &self.title_tag
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Same id and tags, different content. The caller guarantees `text` is ASCII.
    pub(crate) fn with_text(&self, text: Vec<u8>) -> Document {
        debug_assert!(text.is_ascii());
        Document {
            id: self.id.clone(),
            group_tag: self.group_tag.clone(),
            title_tag: self.title_tag.clone(),
            text,
        }
    }

    pub fn words(&self) -> Vec<WordOccurrence> {
        let mut out = Vec::new();
        scan_words(&self.text, |start, end| {
            out.push(WordOccurrence::new(&self.text, start, end))
        });
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordOccurrence {
    pub start: usize,
    pub end: usize,
    pub normalized: String,
}

impl WordOccurrence {
    fn new(text: &[u8], start: usize, end: usize) -> Self {
        let normalized = text[start..end]
            .iter()
            .map(|b| b.to_ascii_lowercase() as char)
            .collect();
        WordOccurrence {
            start,
            end,
            normalized,
        }
    }
}

fn check_ascii(text: &[u8]) -> Result<()> {
    match text.iter().position(|b| !b.is_ascii()) {
        Some(offset) => Err(Error::Decode {
            offset,
            byte: text[offset],
        }),
        None => Ok(()),
    }
}

/// Calls `emit(start, end)` for every word span, in order. Input must be ASCII.
pub(crate) fn scan_words(text: &[u8], mut emit: impl FnMut(usize, usize)) {
    let n = text.len();
    let mut i = 0;
    while i < n {
        if !text[i].is_ascii_alphabetic() {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        loop {
            if i < n && text[i].is_ascii_alphabetic() {
                i += 1;
            } else if i + 1 < n && text[i] == b'\'' && text[i + 1].is_ascii_alphabetic() {
                i += 2;
            } else {
                break;
            }
        }
        emit(start, i);
    }
}

/// Splits `text` into word occurrences, sorted by start and non-overlapping.
pub fn tokenize(text: &[u8]) -> Result<Vec<WordOccurrence>> {
    check_ascii(text)?;
    let mut out = Vec::new();
    scan_words(text, |start, end| {
        out.push(WordOccurrence::new(text, start, end))
    });
    Ok(out)
}

/// Word → corpus frequency mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    entries: BTreeMap<String, u64>,
    total_mass: u64,
}

impl FrequencyTable {
    /// Builds a table from `(word, mass)` pairs. Words are lowercased and
    /// duplicates merged; zero masses are dropped.
    pub fn from_counts<I, S>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut entries = BTreeMap::new();
        for (word, mass) in counts {
            if mass == 0 {
                continue;
            }
            *entries.entry(word.as_ref().to_lowercase()).or_insert(0u64) += mass;
        }
        if entries.is_empty() {
            return Err(Error::invalid("frequency table is empty"));
        }
        let total_mass = entries.values().sum();
        Ok(FrequencyTable {
            entries,
            total_mass,
        })
    }

    /// Token counts over a set of documents.
    pub fn from_documents(docs: &[Document]) -> Result<Self> {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for doc in docs {
            for w in doc.words() {
                *counts.entry(w.normalized).or_insert(0) += 1;
            }
        }
        Self::from_counts(counts)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        load_frequency_table(BufReader::new(file), &path.display().to_string())
    }

    pub fn mass(&self, word: &str) -> Option<u64> {
        self.entries.get(word).copied()
    }

    pub fn total_mass(&self) -> u64 {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in lexicographic word order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, m)| (w.as_str(), *m))
    }

    /// Writes `word<TAB>mass` lines in lexicographic order, readable by
    /// [`FrequencyTable::load`].
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut body = String::new();
        for (word, mass) in self.iter() {
            body.push_str(&format!("{word}\t{mass}\n"));
        }
        fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn words(&self) -> HashSet<String> {
        self.entries.keys().cloned().collect()
    }
}

/// Parses `word<whitespace>mass` lines. `#` starts a comment line.
pub fn load_frequency_table(reader: impl BufRead, source_name: &str) -> Result<FrequencyTable> {
    let mut counts = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            source_name: source_name.to_string(),
            line: lineno,
            message,
        };
        let mut fields = line.split_whitespace();
        let (Some(word), Some(mass), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected `word mass`, got `{line}`")));
        };
        let mass: u64 = mass
            .parse()
            .map_err(|_| parse_err(format!("mass `{mass}` is not a non-negative integer")))?;
        counts.push((word.to_string(), mass));
    }
    FrequencyTable::from_counts(counts)
}

/// One manifest record: a text file and the tags that name it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub group_tag: String,
    pub title_tag: String,
}

/// Reads a tab-separated manifest: `path<TAB>group_tag<TAB>title_tag`.
/// Relative paths are resolved against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut entries = Vec::new();
    for (idx, line) in body.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                source_name: path.display().to_string(),
                line: idx + 1,
                message: "expected `path<TAB>group_tag<TAB>title_tag`".into(),
            });
        }
        entries.push(ManifestEntry {
            path: base.join(fields[0]),
            group_tag: fields[1].to_string(),
            title_tag: fields[2].to_string(),
        });
    }
    Ok(entries)
}

pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    let path = path.as_ref();
    let mut body = String::from("# path\tgroup_tag\ttitle_tag\n");
    for e in entries {
        body.push_str(&format!(
            "{}\t{}\t{}\n",
            e.path.display(),
            e.group_tag,
            e.title_tag
        ));
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Loads every document named by the manifest at `path`.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    corpus_from_manifest(&load_manifest(path)?)
}

pub fn corpus_from_manifest(entries: &[ManifestEntry]) -> Result<Vec<Document>> {
    let mut docs = Vec::with_capacity(entries.len());
    for entry in entries {
        let text = fs::read(&entry.path).map_err(|e| Error::io(&entry.path, e))?;
        let doc = Document::new(&entry.group_tag, &entry.title_tag, text).map_err(|e| match e {
            Error::Decode { offset, byte } => Error::invalid(format!(
                "{}: non-ASCII byte 0x{byte:02x} at offset {offset}",
                entry.path.display()
            )),
            other => other,
        })?;
        docs.push(doc);
    }
    check_unique_ids(&docs)?;
    Ok(docs)
}

pub fn check_unique_ids(docs: &[Document]) -> Result<()> {
    let mut seen = HashSet::new();
    for d in docs {
        if !seen.insert(d.id()) {
            return Err(Error::DuplicateId(d.id().to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triples(occ: &[WordOccurrence]) -> Vec<(&str, usize, usize)> {
        occ.iter()
            .map(|o| (o.normalized.as_str(), o.start, o.end))
            .collect()
    }

    #[test]
    fn tokenize_examples() {
        assert!(tokenize(b"").unwrap().is_empty());
        let occ = tokenize(b"The cat, the hat.").unwrap();
        assert_eq!(
            triples(&occ),
            vec![
                ("the", 0, 3),
                ("cat", 4, 7),
                ("the", 9, 12),
                ("hat", 13, 16)
            ]
        );
        let occ = tokenize(b"Don Quixote's ass").unwrap();
        let words: Vec<_> = occ.iter().map(|o| o.normalized.as_str()).collect();
        assert_eq!(words, vec!["don", "quixote's", "ass"]);
    }

    #[test]
    fn edge_apostrophes_are_gaps() {
        let occ = tokenize(b"'tis rock 'n' roll'' o'").unwrap();
        let words: Vec<_> = occ.iter().map(|o| o.normalized.as_str()).collect();
        assert_eq!(words, vec!["tis", "rock", "n", "roll", "o"]);
    }

    #[test]
    fn multibyte_input_is_rejected_with_offset() {
        let err = tokenize("ab\u{e9}".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Decode { offset: 2, .. }), "{err}");
    }

    #[test]
    fn frequency_table_examples() {
        let t = load_frequency_table("a 50\nb 30\nc 20".as_bytes(), "t").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.total_mass(), 100);

        let t = load_frequency_table("# comment\nThe 5\nthe 10\n".as_bytes(), "t").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.mass("the"), Some(15));

        let err = load_frequency_table("xyz".as_bytes(), "t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = load_frequency_table("a 1\nb -3".as_bytes(), "t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(load_frequency_table("# nothing\n".as_bytes(), "t").is_err());
    }

    #[test]
    fn frequency_table_save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("freq.tsv");
        let t = FrequencyTable::from_counts([("the", 9), ("don't", 2), ("a", 4)]).unwrap();
        t.save(&path).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "a\t4\ndon't\t2\nthe\t9\n"
        );
        assert_eq!(FrequencyTable::load(&path).unwrap(), t);
    }

    #[test]
    fn corpus_ids_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["a.txt", "b.txt"] {
            fs::write(dir.path().join(name), "some words").unwrap();
        }
        let manifest = dir.path().join("manifest.tsv");
        fs::write(&manifest, "a.txt\tAP\tAEoC\nb.txt\tAP\tAEoM\n").unwrap();
        let docs = load_corpus(&manifest).unwrap();
        let ids: Vec<_> = docs.iter().map(Document::id).collect();
        assert_eq!(ids, vec!["AP.AEoC", "AP.AEoM"]);

        fs::write(&manifest, "a.txt\tAP\tAEoC\n").unwrap();
        assert_eq!(load_corpus(&manifest).unwrap().len(), 1);

        fs::write(&manifest, "a.txt\tAP\tX\nb.txt\tAP\tX\n").unwrap();
        assert!(matches!(load_corpus(&manifest), Err(Error::DuplicateId(id)) if id == "AP.X"));

        fs::write(&manifest, "missing.txt\tAP\tX\n").unwrap();
        assert!(matches!(load_corpus(&manifest), Err(Error::Io { .. })));
    }

    proptest! {
        #[test]
        fn gaps_and_words_reconstruct_text(text in "[a-zA-Z' ,.\\n-]{0,200}") {
            let bytes = text.as_bytes();
            let occ = tokenize(bytes).unwrap();
            let mut rebuilt = Vec::new();
            let mut cursor = 0;
            for o in &occ {
                prop_assert!(cursor <= o.start && o.start < o.end && o.end <= bytes.len());
                rebuilt.extend_from_slice(&bytes[cursor..o.start]);
                rebuilt.extend_from_slice(&bytes[o.start..o.end]);
                cursor = o.end;
            }
            rebuilt.extend_from_slice(&bytes[cursor..]);
            prop_assert_eq!(rebuilt, bytes.to_vec());
        }

        #[test]
        fn retokenizing_a_span_yields_itself(text in "[a-zA-Z' ,.]{0,200}") {
            let bytes = text.as_bytes();
            for o in tokenize(bytes).unwrap() {
                let again = tokenize(&bytes[o.start..o.end]).unwrap();
                prop_assert_eq!(again.len(), 1);
                prop_assert_eq!((again[0].start, again[0].end), (0, o.end - o.start));
            }
        }

        #[test]
        fn total_mass_is_sum(counts in proptest::collection::vec(("[a-dA-D]{1,2}", 1u64..1000), 1..30)) {
            let t = FrequencyTable::from_counts(counts.clone()).unwrap();
            prop_assert_eq!(t.total_mass(), counts.iter().map(|c| c.1).sum::<u64>());
            prop_assert_eq!(t.iter().map(|(_, m)| m).sum::<u64>(), t.total_mass());
        }
    }
}
