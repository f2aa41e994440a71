//! Newick serialization and the two-line tanglegram file format.
//!
//! A `.tgl` file is two Newick lines (left tree, then right tree) with
//! optional `#` comment lines; leaves are matched by label equality, and
//! `# map left=right` comment directives override individual pairings
//! for mismatched nomenclature. Only strictly binary trees are accepted.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::tangle::{TangleError, Tanglegram};
use crate::tree::{BinaryTree, NodeId, TreeBuilder, TreeError};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum NewickError {
    #[error("unexpected end of input at byte {0}")]
    UnexpectedEnd(usize),
    #[error("unexpected `{found}` at byte {pos}, expected {expected}")]
    Unexpected {
        pos: usize,
        found: char,
        expected: &'static str,
    },
    #[error("node at byte {pos} has {arity} children, trees must be strictly binary")]
    NonBinary { pos: usize, arity: usize },
    #[error("empty leaf label at byte {0}")]
    EmptyLabel(usize),
    #[error("duplicate leaf label `{label}` at byte {pos}")]
    DuplicateLabel { pos: usize, label: String },
    #[error("malformed branch length at byte {0}")]
    BadLength(usize),
    #[error("trailing input after `;` at byte {0}")]
    TrailingInput(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Error, Debug)]
pub enum LoadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Newick { line: usize, source: NewickError },
    #[error("expected two tree lines, found {0}")]
    WrongTreeCount(usize),
    #[error("line {0}: malformed `# map` directive (expected `# map left=right`)")]
    BadMapDirective(usize),
    #[error(transparent)]
    Tangle(#[from] TangleError),
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    builder: TreeBuilder,
    seen: HashMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            bytes: text.as_bytes(),
            pos: 0,
            builder: TreeBuilder::new(),
            seen: HashMap::new(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn subtree(&mut self) -> Result<NodeId, NewickError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                let open = self.pos;
                self.pos += 1;
                let first = self.subtree()?;
                self.skip_ws();
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        return Err(NewickError::NonBinary {
                            pos: open,
                            arity: 1,
                        })
                    }
                    Some(c) => {
                        return Err(NewickError::Unexpected {
                            pos: self.pos,
                            found: c as char,
                            expected: "`,`",
                        })
                    }
                    None => return Err(NewickError::UnexpectedEnd(self.pos)),
                }
                let second = self.subtree()?;
                self.skip_ws();
                match self.peek() {
                    Some(b')') => self.pos += 1,
                    Some(b',') => {
                        // Count the extra children for the diagnostic.
                        let mut arity = 2;
                        while self.peek() == Some(b',') {
                            self.pos += 1;
                            self.subtree()?;
                            self.skip_ws();
                            arity += 1;
                        }
                        return Err(NewickError::NonBinary { pos: open, arity });
                    }
                    Some(c) => {
                        return Err(NewickError::Unexpected {
                            pos: self.pos,
                            found: c as char,
                            expected: "`)` or `,`",
                        })
                    }
                    None => return Err(NewickError::UnexpectedEnd(self.pos)),
                }
                // Internal labels are tolerated and dropped.
                self.label_text();
                self.branch_length()?;
                Ok(self.builder.join(first, second))
            }
            Some(_) => {
                let start = self.pos;
                let label = self.label_text();
                if label.is_empty() {
                    let found = self.peek().map(|b| b as char).unwrap_or('\0');
                    return Err(NewickError::Unexpected {
                        pos: start,
                        found,
                        expected: "a leaf label or `(`",
                    });
                }
                if self.seen.insert(label.clone(), start).is_some() {
                    return Err(NewickError::DuplicateLabel { pos: start, label });
                }
                self.branch_length()?;
                Ok(self.builder.leaf(label))
            }
            None => Err(NewickError::UnexpectedEnd(self.pos)),
        }
    }

    fn label_text(&mut self) -> String {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if matches!(b, b'(' | b')' | b',' | b':' | b';') || b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn branch_length(&mut self) -> Result<(), NewickError> {
        self.skip_ws();
        if self.peek() != Some(b':') {
            return Ok(());
        }
        self.pos += 1;
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
        if text.parse::<f64>().is_err() {
            return Err(NewickError::BadLength(start));
        }
        Ok(())
    }
}

/// Parse one strictly binary Newick string terminated by `;`. Branch
/// lengths are accepted and discarded; inner-node labels likewise.
pub fn parse_newick(text: &str) -> Result<BinaryTree, NewickError> {
    let mut p = Parser::new(text);
    let root = p.subtree()?;
    p.skip_ws();
    match p.peek() {
        Some(b';') => p.pos += 1,
        Some(c) => {
            return Err(NewickError::Unexpected {
                pos: p.pos,
                found: c as char,
                expected: "`;`",
            })
        }
        None => return Err(NewickError::UnexpectedEnd(p.pos)),
    }
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(NewickError::TrailingInput(p.pos));
    }
    Ok(p.builder.build(root)?)
}

/// Serialize a tree in stored child order: `parse(write(t))` reproduces
/// `t` exactly.
pub fn write_newick(tree: &BinaryTree) -> String {
    let mut out = String::new();
    write_node(tree, tree.root(), &mut out);
    out.push(';');
    out
}

fn write_node(tree: &BinaryTree, v: NodeId, out: &mut String) {
    match tree.children(v) {
        Some([a, b]) => {
            out.push('(');
            write_node(tree, a, out);
            out.push(',');
            write_node(tree, b, out);
            out.push(')');
        }
        None => out.push_str(tree.label(v).expect("leaf has a label")),
    }
}

/// Parse the two-line tanglegram format from a string.
pub fn parse_tanglegram(text: &str) -> Result<Tanglegram, LoadError> {
    let mut trees: Vec<(usize, BinaryTree)> = Vec::new();
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(entry) = rest.strip_prefix("map ") {
                let (l, r) = entry
                    .split_once('=')
                    .ok_or(LoadError::BadMapDirective(idx + 1))?;
                let (l, r) = (l.trim(), r.trim());
                if l.is_empty() || r.is_empty() {
                    return Err(LoadError::BadMapDirective(idx + 1));
                }
                map.insert(l.to_string(), r.to_string());
            }
            continue;
        }
        let tree = parse_newick(line).map_err(|source| LoadError::Newick {
            line: idx + 1,
            source,
        })?;
        trees.push((idx + 1, tree));
    }
    if trees.len() != 2 {
        return Err(LoadError::WrongTreeCount(trees.len()));
    }
    let right = trees.pop().expect("two trees").1;
    let left = trees.pop().expect("two trees").1;
    Ok(Tanglegram::match_by_labels_mapped(left, right, &map)?)
}

pub fn load_tanglegram(path: impl AsRef<Path>) -> Result<Tanglegram, LoadError> {
    parse_tanglegram(&fs::read_to_string(path)?)
}

/// Two-line serialization; matching is implied by the labels.
pub fn write_tanglegram(t: &Tanglegram) -> String {
    format!("{}\n{}\n", write_newick(t.left()), write_newick(t.right()))
}

pub fn save_tanglegram(t: &Tanglegram, path: impl AsRef<Path>) -> Result<(), LoadError> {
    fs::write(path, write_tanglegram(t))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossings::count_crossings;
    use crate::tangle::Orientation;

    #[test]
    fn two_leaf_round_trip() {
        let t = parse_newick("(a,b);").unwrap();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(write_newick(&t), "(a,b);");
    }

    #[test]
    fn complete_four_leaves() {
        let t = parse_newick("((a,b),(c,d));").unwrap();
        assert_eq!(t.leaf_count(), 4);
        assert_eq!(t.height(), 2);
        assert_eq!(write_newick(&t), "((a,b),(c,d));");
    }

    #[test]
    fn ternary_rejected() {
        assert_eq!(
            parse_newick("(a,b,c);").unwrap_err(),
            NewickError::NonBinary { pos: 0, arity: 3 }
        );
    }

    #[test]
    fn unary_rejected() {
        assert_eq!(
            parse_newick("((a),b);").unwrap_err(),
            NewickError::NonBinary { pos: 1, arity: 1 }
        );
    }

    #[test]
    fn duplicate_label_rejected_with_position() {
        assert_eq!(
            parse_newick("(a,(b,a));").unwrap_err(),
            NewickError::DuplicateLabel {
                pos: 6,
                label: "a".into()
            }
        );
    }

    #[test]
    fn missing_semicolon() {
        assert!(matches!(
            parse_newick("(a,b)").unwrap_err(),
            NewickError::UnexpectedEnd(_)
        ));
    }

    #[test]
    fn trailing_garbage() {
        assert!(matches!(
            parse_newick("(a,b); junk").unwrap_err(),
            NewickError::TrailingInput(_)
        ));
    }

    #[test]
    fn branch_lengths_discarded() {
        let t = parse_newick("((a:0.5,b:1):2,(c:0.1,d:0.2):3);").unwrap();
        assert_eq!(write_newick(&t), "((a,b),(c,d));");
    }

    #[test]
    fn identity_file() {
        let t = parse_tanglegram("(a,b);\n(a,b);\n").unwrap();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(
            count_crossings(&t, &Orientation::unflipped(&t))
                .unwrap()
                .value(),
            0
        );
    }

    #[test]
    fn crossed_file() {
        let t = parse_tanglegram("(a,b);\n(b,a);\n").unwrap();
        assert_eq!(
            count_crossings(&t, &Orientation::unflipped(&t))
                .unwrap()
                .value(),
            1
        );
    }

    #[test]
    fn label_mismatch_fails() {
        let err = parse_tanglegram("(a,b);\n(a,c);\n").unwrap_err();
        assert!(matches!(
            err,
            LoadError::Tangle(TangleError::UnmatchedLabel(_))
        ));
    }

    #[test]
    fn comments_and_map_directives() {
        let text = "# sample instance\n# map a=x\n# map b=y\n(a,b);\n(x,y);\n";
        let t = parse_tanglegram(text).unwrap();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(
            count_crossings(&t, &Orientation::unflipped(&t))
                .unwrap()
                .value(),
            0
        );
    }

    #[test]
    fn file_round_trip() {
        let text = "((a,b),(c,d));\n(((d,c),b),a);\n";
        let t = parse_tanglegram(text).unwrap();
        assert_eq!(write_tanglegram(&t), text);
    }
}
