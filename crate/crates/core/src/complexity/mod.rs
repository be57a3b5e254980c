//! Compressed sizes as a complexity estimate, and the normalized compression
//! distance built on them.
//!
//! For a compressor `C`, the distance between byte strings `x` and `y` is
//!
//! ```text
//! max(C(xy) - C(x), C(yx) - C(y)) / max(C(x), C(y))
//! ```
//!
//! Both concatenation orders are compressed. Sizes count the whole container
//! output, headers included, so constant overhead largely cancels.

mod cache;
mod compressor;

use std::fmt::Write as _;

use rayon::prelude::*;

pub use cache::SizeCache;
pub use compressor::{compressor_from_name, Bzip2, Compressor, Gzip, Lzma};

use crate::corpus::Document;
use crate::error::{Error, Result};

/// Default slack above 1 tolerated before an entry is reported as out of range.
pub const DEFAULT_NCD_SLACK: f64 = 0.1;

fn ncd_from_sizes(cx: u64, cy: u64, cxy: u64, cyx: u64) -> f64 {
    let num = (cxy as f64 - cx as f64).max(cyx as f64 - cy as f64);
    num / cx.max(cy) as f64
}

pub fn ncd(c: &dyn Compressor, x: &[u8], y: &[u8]) -> Result<f64> {
    ncd_cached(c, &SizeCache::in_memory(), x, y)
}

pub fn ncd_cached(c: &dyn Compressor, cache: &SizeCache, x: &[u8], y: &[u8]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("ncd of an empty input is undefined"));
    }
    let cx = cache.size(c, &[x])?;
    let cy = cache.size(c, &[y])?;
    let cxy = cache.size(c, &[x, y])?;
    let cyx = cache.size(c, &[y, x])?;
    Ok(ncd_from_sizes(cx, cy, cxy, cyx))
}

/// Symmetric matrix of pairwise distances, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NcdMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

/// An entry outside `[0, 1 + slack]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub a: String,
    pub b: String,
    pub value: f64,
}

impl NcdMatrix {
    /// `values` is row-major `n × n` and must be exactly symmetric.
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(Error::invalid(format!(
                "matrix has {} values for {n} labels",
                values.len()
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::invalid(format!(
                        "matrix is not symmetric at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix contains a non-finite value"));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::DuplicateId(dup.clone()));
        }
        Ok(NcdMatrix { labels, values })
    }

    /// Builds a matrix from the strict upper triangle; the diagonal is zero.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::new(labels, values)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.labels.len() + j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Same distances under a new label order: `order[k]` is the old index of
    /// the k-th label.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let labels = order.iter().map(|&i| self.labels[i].clone()).collect();
        let n = order.len();
        let mut values = vec![0.0; n * n];
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                values[a * n + b] = self.get(i, j);
            }
        }
        Self::new(labels, values)
    }

    /// Off-diagonal entries outside `[0, 1 + slack]`.
    pub fn bound_violations(&self, slack: f64) -> Vec<BoundViolation> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j);
                if !(0.0..=1.0 + slack).contains(&v) {
                    out.push(BoundViolation {
                        a: self.labels[i].clone(),
                        b: self.labels[j].clone(),
                        value: v,
                    });
                }
            }
        }
        out
    }

    /// Tab-separated text: a header `ids<TAB>label…`, then one row per label.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("ids");
        for l in &self.labels {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.len() {
                let _ = write!(out, "\t{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let parse_err = |line: usize, message: &str| Error::Parse {
            source_name: "matrix".into(),
            line,
            message: message.into(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty matrix file"))?;
        let labels: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
        let n = labels.len();
        let mut values = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (idx, line) in lines {
            let mut fields = line.split('\t');
            if fields.next() != labels.get(rows).map(String::as_str) {
                return Err(parse_err(idx + 1, "row label does not match header order"));
            }
            let row: Vec<f64> = fields
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(idx + 1, "malformed number"))?;
            if row.len() != n {
                return Err(parse_err(idx + 1, "row width differs from header"));
            }
            values.extend(row);
            rows += 1;
        }
        if rows != n {
            return Err(parse_err(
                text.lines().count(),
                "row count differs from header",
            ));
        }
        Self::new(labels, values)
    }
}

/// Pairwise distances over `docs`. Each `C(x)` is computed once; each
/// unordered pair compresses both concatenation orders. Work runs on the
/// current rayon pool and the result does not depend on scheduling.
pub fn ncd_matrix(c: &dyn Compressor, docs: &[Document], cache: &SizeCache) -> Result<NcdMatrix> {
    let n = docs.len();
    if n < 2 {
        return Err(Error::invalid("an NCD matrix needs at least two documents"));
    }
    crate::corpus::check_unique_ids(docs)?;
    if let Some(d) = docs.iter().find(|d| d.is_empty()) {
        return Err(Error::invalid(format!("document `{}` is empty", d.id())));
    }
    let name_failure = |subject: String, e: Error| match e {
        Error::Compression {
            compressor,
            message,
            ..
        } => Error::Compression {
            compressor,
            subject,
            message,
        },
        other => other,
    };
    let singles: Vec<u64> = docs
        .par_iter()
        .map(|d| {
            cache
                .size(c, &[d.text()])
                .map_err(|e| name_failure(format!("document `{}`", d.id()), e))
        })
        .collect::<Result<_>>()?;

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (docs[i].text(), docs[j].text());
            let joint = || -> Result<(u64, u64)> {
                let cxy = cache.size(c, &[x, y])?;
                let cyx = if i == j { cxy } else { cache.size(c, &[y, x])? };
                Ok((cxy, cyx))
            };
            let (cxy, cyx) = joint().map_err(|e| {
                name_failure(format!("pair ({}, {})", docs[i].id(), docs[j].id()), e)
            })?;
            Ok(ncd_from_sizes(singles[i], singles[j], cxy, cyx))
        })
        .collect::<Result<_>>()?;

    let mut values = vec![0.0; n * n];
    for (&(i, j), &v) in pairs.iter().zip(&entries) {
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
    let m = NcdMatrix::new(docs.iter().map(|d| d.id().to_string()).collect(), values)?;
    for v in m.bound_violations(DEFAULT_NCD_SLACK) {
        log::warn!(
            "NCD({}, {}) = {} is outside [0, 1 + {DEFAULT_NCD_SLACK}]",
            v.a,
            v.b,
            v.value
        );
    }
    if let Some(window) = c.window() {
        let longest = docs.iter().map(Document::len).max().unwrap_or(0);
        if 2 * longest > window {
            log::warn!(
                "{}: window of {window} bytes is smaller than the largest concatenated pair; \
                 distances will drift toward 1",
                c.name()
            );
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityStats {
    /// `(document id, compressed size in bytes)` in corpus order.
    pub per_doc: Vec<(String, u64)>,
    pub mean: f64,
}

/// Compressed size of each document, an upper estimate of its complexity.
pub fn complexity_stats(
    c: &dyn Compressor,
    docs: &[Document],
    cache: &SizeCache,
) -> Result<ComplexityStats> {
    if docs.is_empty() {
        return Err(Error::invalid("complexity of an empty corpus"));
    }
    let per_doc: Vec<(String, u64)> = docs
        .par_iter()
        .map(|d| Ok((d.id().to_string(), cache.size(c, &[d.text()])?)))
        .collect::<Result<_>>()?;
    let mean = per_doc.iter().map(|(_, s)| *s as f64).sum::<f64>() / per_doc.len() as f64;
    Ok(ComplexityStats { per_doc, mean })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn random_bytes(seed: u64, len: usize) -> Vec<u8> {
        let mut v = vec![0u8; len];
        crate::seed::rng_from(seed).fill_bytes(&mut v);
        v
    }

    #[test]
    fn self_distance_is_small_and_unrelated_is_near_one() {
        let c = Lzma::default();
        let a = random_bytes(4, 4096);
        let same = ncd(&c, &a, &a).unwrap();
        assert!(same < 0.1, "{same}");
        let r = random_bytes(5, 4096);
        let far = ncd(&c, &a, &r).unwrap();
        assert!(far > 0.9 && far <= 1.1, "{far}");
    }

    #[test]
    fn symmetric_under_swap() {
        let c = Lzma::default();
        for seed in 0..4 {
            let x = random_bytes(seed, 1024);
            let y = random_bytes(seed + 100, 1024);
            assert_eq!(ncd(&c, &x, &y).unwrap(), ncd(&c, &y, &x).unwrap());
        }
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(ncd(&Lzma::default(), b"", b"x").is_err());
    }

    #[test]
    fn matrix_of_two_and_identical_documents() {
        let text: Vec<u8> = random_bytes(9, 3000)
            .iter()
            .map(|b| b'a' + b % 26)
            .collect();
        let docs = vec![
            Document::new("A", "x", text.clone()).unwrap(),
            Document::new("A", "y", text).unwrap(),
        ];
        let cache = SizeCache::in_memory();
        let m = ncd_matrix(&Lzma::default(), &docs, &cache).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!(m.get(0, 1) < 0.1, "{}", m.get(0, 1));
        // warm cache gives the identical matrix
        let again = ncd_matrix(&Lzma::default(), &docs, &cache).unwrap();
        assert_eq!(m, again);
        assert!(ncd_matrix(&Lzma::default(), &docs[..1], &cache).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let labels = vec!["a".to_string(), "b".into(), "c".into()];
        let m = NcdMatrix::from_fn(labels, |i, j| 0.1 * (i + j) as f64 + 1.0 / 3.0).unwrap();
        assert_eq!(NcdMatrix::from_tsv(&m.to_tsv()).unwrap(), m);
        assert!(NcdMatrix::from_tsv("ids\ta\tb\na\t0\t1\nb\t0.5\t0\n").is_err());
    }

    #[test]
    fn complexity_of_one_document_is_its_size() {
        let d = Document::new("A", "x", "some text some text").unwrap();
        let c = Gzip { level: 9 };
        let stats =
            complexity_stats(&c, std::slice::from_ref(&d), &SizeCache::in_memory()).unwrap();
        assert_eq!(stats.mean, c.compressed_size(d.text()).unwrap() as f64);
    }
}
