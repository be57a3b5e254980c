//! Newick text for unrooted binary trees.
//!
//! Output is written from the internal node next to leaf 0, which gives a
//! trifurcating top level, e.g. `(a,(b,c),(d,e));`. Children are ordered by
//! the smallest leaf index they contain, so a tree has exactly one rendering.
//! Labels containing any of `()[]':;,` or whitespace are single-quoted with
//! embedded quotes doubled.
//!
//! Input accepts the usual Newick grammar:
//!
//! ```text
//! tree    := subtree ';'
//! subtree := '(' subtree (',' subtree)* ')' label? length? | label length?
//! length  := ':' number
//! ```
//!
//! with `[...]` comments anywhere between tokens. Branch lengths and internal
//! labels are read and discarded. A bifurcating root is suppressed; every
//! other internal node must have exactly two children.

use super::Dendrogram;
use crate::error::{Error, Result};

fn needs_quotes(label: &str) -> bool {
    label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || "()[]':;,".contains(c))
}

fn push_label(out: &mut String, label: &str) {
    if needs_quotes(label) {
        out.push('\'');
        out.push_str(&label.replace('\'', "''"));
        out.push('\'');
    } else {
        out.push_str(label);
    }
}

pub fn to_newick(t: &Dendrogram) -> String {
    fn min_leaf(t: &Dendrogram, parent: usize, v: usize) -> usize {
        t.leaves_beyond(parent, v)[0]
    }

    fn write(t: &Dendrogram, parent: usize, v: usize, out: &mut String) {
        if t.is_leaf(v) {
            push_label(out, &t.labels()[v]);
            return;
        }
        let mut kids: Vec<(usize, usize)> = t
            .neighbors(v)
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| (min_leaf(t, v, w), w))
            .collect();
        kids.sort_unstable();
        out.push('(');
        for (k, (_, w)) in kids.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write(t, v, *w, out);
        }
        out.push(')');
    }

    let root = t.neighbors(0)[0];
    let mut out = String::new();
    // usize::MAX is never a neighbor, so all three branches are written
    write(t, usize::MAX, root, &mut out);
    out.push(';');
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Default)]
struct RawNode {
    label: Option<String>,
    children: Vec<usize>,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            source_name: "newick".into(),
            line: 1 + self.src[..self.pos.min(self.src.len())]
                .iter()
                .filter(|&&b| b == b'\n')
                .count(),
            message: format!("{} (byte {})", message.into(), self.pos),
        }
    }

    fn skip_blank(&mut self) -> Result<()> {
        loop {
            match self.src.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let close = self.src[self.pos..]
                        .iter()
                        .position(|&b| b == b']')
                        .ok_or_else(|| self.err("unterminated comment"))?;
                    self.pos += close + 1;
                }
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<u8>> {
        self.skip_blank()?;
        Ok(self.src.get(self.pos).copied())
    }

    fn expect(&mut self, want: u8) -> Result<()> {
        if self.peek()? == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", want as char)))
        }
    }

    fn label(&mut self) -> Result<Option<String>> {
        match self.peek()? {
            Some(b'\'') => {
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.src.get(self.pos) {
                        None => return Err(self.err("unterminated quoted label")),
                        Some(b'\'') if self.src.get(self.pos + 1) == Some(&b'\'') => {
                            out.push(b'\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(&b) => {
                            out.push(b);
                            self.pos += 1;
                        }
                    }
                }
                String::from_utf8(out)
                    .map(Some)
                    .map_err(|_| self.err("label is not UTF-8"))
            }
            _ => {
                let start = self.pos;
                while let Some(&b) = self.src.get(self.pos) {
                    if b.is_ascii_whitespace() || b"()[]':;,".contains(&b) {
                        break;
                    }
                    self.pos += 1;
                }
                if start == self.pos {
                    return Ok(None);
                }
                let raw = std::str::from_utf8(&self.src[start..self.pos])
                    .map_err(|_| self.err("label is not UTF-8"))?;
                Ok(Some(raw.to_string()))
            }
        }
    }

    fn length(&mut self) -> Result<()> {
        if self.peek()? == Some(b':') {
            self.pos += 1;
            self.skip_blank()?;
            let start = self.pos;
            while let Some(&b) = self.src.get(self.pos) {
                if b.is_ascii_digit() || b"+-.eE".contains(&b) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            std::str::from_utf8(&self.src[start..self.pos])
                .ok()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| self.err("malformed branch length"))?;
        }
        Ok(())
    }

    fn subtree(&mut self, nodes: &mut Vec<RawNode>) -> Result<usize> {
        let id = nodes.len();
        nodes.push(RawNode::default());
        if self.peek()? == Some(b'(') {
            self.pos += 1;
            loop {
                let child = self.subtree(nodes)?;
                nodes[id].children.push(child);
                match self.peek()? {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected `,` or `)`")),
                }
            }
            let _internal_label = self.label()?;
        } else {
            let label = self
                .label()?
                .ok_or_else(|| self.err("leaf without a label"))?;
            nodes[id].label = Some(label);
        }
        self.length()?;
        Ok(id)
    }
}

/// Parses one Newick tree. Labels are taken verbatim (underscores are kept).
pub fn parse_newick(text: &str) -> Result<Dendrogram> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut nodes = Vec::new();
    let root = p.subtree(&mut nodes)?;
    p.expect(b';')?;
    if p.peek()?.is_some() {
        return Err(p.err("trailing input after `;`"));
    }

    let root_kids = nodes[root].children.len();
    if !(root_kids == 2 || root_kids == 3) {
        return Err(p.err(format!("root has {root_kids} children; expected 2 or 3")));
    }
    for (i, node) in nodes.iter().enumerate() {
        if i != root && !node.children.is_empty() && node.children.len() != 2 {
            return Err(p.err(format!(
                "internal node has {} children; the tree must be binary",
                node.children.len()
            )));
        }
    }

    // leaves first, in order of appearance
    let mut labels = Vec::new();
    let mut new_id = vec![usize::MAX; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        if node.children.is_empty() {
            new_id[i] = labels.len();
            labels.push(node.label.clone().expect("leaves carry labels"));
        }
    }
    let n = labels.len();
    if n < 3 {
        return Err(p.err(format!("a dendrogram needs at least 3 leaves, got {n}")));
    }
    let mut next = n;
    for (i, node) in nodes.iter().enumerate() {
        if !node.children.is_empty() && !(i == root && root_kids == 2) {
            new_id[i] = next;
            next += 1;
        }
    }

    let mut edges = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        if i == root && root_kids == 2 {
            continue;
        }
        for &c in &node.children {
            edges.push((new_id[i], new_id[c]));
        }
    }
    if root_kids == 2 {
        let (a, b) = (nodes[root].children[0], nodes[root].children[1]);
        edges.push((new_id[a], new_id[b]));
    }
    Dendrogram::from_edges(labels, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::enumerate_trees;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("L{i}")).collect()
    }

    #[test]
    fn writes_canonical_form() {
        let t =
            Dendrogram::from_edges(names(4), &[(0, 4), (1, 4), (4, 5), (2, 5), (3, 5)]).unwrap();
        assert_eq!(to_newick(&t), "(L0,L1,(L2,L3));");
    }

    #[test]
    fn reads_rooted_lengths_comments_and_quotes() {
        let t = parse_newick("((a:0.1,b:2e-3)x:0.5,[note]('c d',e)) ;").unwrap();
        assert_eq!(t.labels(), &["a", "b", "c d", "e"]);
        let expected = parse_newick("(a,b,('c d',e));").unwrap();
        assert!(t.same_topology(&expected));
        let q = parse_newick("('it''s',b,c);").unwrap();
        assert_eq!(q.labels()[0], "it's");
        assert_eq!(to_newick(&q), "('it''s',b,c);");
        assert_eq!(parse_newick("(A_B,c,d);").unwrap().labels()[0], "A_B");
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "(a,b,c)",
            "(a,b);",
            "(a,(b,c,d),e);",
            "(a,b,c,d);",
            "(a,,c);",
            "(a,b,c); extra",
            "(a,b,c:x);",
            "(a,b,[c);",
            "(a,a,b);",
        ] {
            assert!(parse_newick(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn every_small_topology_round_trips() {
        for n in 3..=6 {
            for t in enumerate_trees(&names(n)).unwrap() {
                let text = to_newick(&t);
                let back = parse_newick(&text).unwrap();
                assert!(back.same_topology(&t), "{text}");
                assert_eq!(to_newick(&back), text);
            }
        }
    }
}
