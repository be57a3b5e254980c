//! Clustering text by compression, and measuring how word-level distortion
//! of the text changes the result.
//!
//! A corpus of documents is distorted by replacing the characters of
//! selected words ([`distortion`]), pairwise normalized compression
//! distances are computed ([`complexity`]), an unrooted binary tree is fitted
//! to the distances ([`clustering`]) and the tree is scored against the known
//! grouping of the documents ([`evaluation`]). [`harness`] runs the whole
//! grid of distortion settings.
//!
//! ```
//! use ncdlab::clustering::{build_tree, to_newick};
//! use ncdlab::complexity::NcdMatrix;
//!
//! let labels = ["a", "b", "c", "d"].map(String::from).to_vec();
//! let d = [
//!     [0.0, 0.1, 0.9, 0.9],
//!     [0.1, 0.0, 0.9, 0.9],
//!     [0.9, 0.9, 0.0, 0.1],
//!     [0.9, 0.9, 0.1, 0.0],
//! ];
//! let m = NcdMatrix::from_fn(labels, |i, j| d[i][j]).unwrap();
//! let report = build_tree(&m, 100, 7).unwrap();
//! assert_eq!(report.score.normalized, 1.0);
//! assert_eq!(to_newick(&report.tree), "(a,b,(c,d));");
//! ```

pub mod clustering;
pub mod complexity;
pub mod corpus;
pub mod distortion;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod seed;
pub mod synthetic;

pub use error::{Error, Result};

/// The guide's chapters, compiled so their snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/distortion.md")]
    mod distortion {}
    #[doc = include_str!("../../../book/src/ncd.md")]
    mod ncd {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/error.md")]
    mod error {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
}
