use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Rational, WeightVector};

/// Ordered binary tree over leaves `b_1 .. b_n` (1-based).
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum AlphabeticTree {
    Leaf(usize),
    Internal(Box<AlphabeticTree>, Box<AlphabeticTree>),
}

impl AlphabeticTree {
    pub fn join(left: AlphabeticTree, right: AlphabeticTree) -> Self {
        AlphabeticTree::Internal(Box::new(left), Box::new(right))
    }

    /// Leaf labels in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(0, &mut |leaf, _| out.push(leaf));
        out
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            AlphabeticTree::Leaf(_) => 1,
            AlphabeticTree::Internal(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Edge depth of each leaf, in left-to-right order.
    pub fn depths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(0, &mut |_, d| out.push(d));
        out
    }

    fn visit(&self, depth: usize, f: &mut impl FnMut(usize, usize)) {
        match self {
            AlphabeticTree::Leaf(i) => f(*i, depth),
            AlphabeticTree::Internal(l, r) => {
                l.visit(depth + 1, f);
                r.visit(depth + 1, f);
            }
        }
    }

    /// Leaves read `1, 2, ..., n` left to right.
    pub fn is_alphabetic(&self) -> bool {
        self.leaves().iter().enumerate().all(|(k, &i)| i == k + 1)
    }

    /// Reflects the tree and relabels leaf `i` as `n + 1 - i`, so the result
    /// is again alphabetic.
    pub fn mirror(&self) -> AlphabeticTree {
        let n = self.leaf_count();
        self.mirror_with(n)
    }

    fn mirror_with(&self, n: usize) -> AlphabeticTree {
        match self {
            AlphabeticTree::Leaf(i) => AlphabeticTree::Leaf(n + 1 - i),
            AlphabeticTree::Internal(l, r) => {
                AlphabeticTree::join(r.mirror_with(n), l.mirror_with(n))
            }
        }
    }

    /// Parses the parenthesized text form, e.g. `((b1 b2) b3)`.
    pub fn parse(text: &str) -> Result<AlphabeticTree> {
        let mut p = TreeParser {
            src: text.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let tree = p.node()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        if !tree.is_alphabetic() {
            return Err(Error::parse(1, 1, "leaves are not b1..bn in order"));
        }
        Ok(tree)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&NestedNode::from(self)).expect("tree serializes")
    }

    pub fn from_json(text: &str) -> Result<AlphabeticTree> {
        let node: NestedNode = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        let tree = AlphabeticTree::from(node);
        if !tree.is_alphabetic() {
            return Err(Error::parse(1, 1, "leaves are not b1..bn in order"));
        }
        Ok(tree)
    }
}

impl fmt::Display for AlphabeticTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabeticTree::Leaf(i) => write!(f, "b{i}"),
            AlphabeticTree::Internal(l, r) => write!(f, "({l} {r})"),
        }
    }
}

impl fmt::Debug for AlphabeticTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct TreeParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TreeParser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::parse(1, self.pos + 1, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn node(&mut self) -> Result<AlphabeticTree> {
        match self.src.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let left = self.node()?;
                let before = self.pos;
                self.skip_ws();
                if self.pos == before {
                    return Err(self.error("expected whitespace between children"));
                }
                let right = self.node()?;
                self.skip_ws();
                if self.src.get(self.pos) != Some(&b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(AlphabeticTree::join(left, right))
            }
            Some(b'b') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match digits.parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(AlphabeticTree::Leaf(i)),
                    _ => {
                        self.pos = start;
                        Err(self.error("expected leaf index >= 1"))
                    }
                }
            }
            _ => Err(self.error("expected `(` or `b<index>`")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NestedNode {
    Leaf {
        leaf: usize,
    },
    Internal {
        left: Box<NestedNode>,
        right: Box<NestedNode>,
    },
}

impl From<&AlphabeticTree> for NestedNode {
    fn from(t: &AlphabeticTree) -> Self {
        match t {
            AlphabeticTree::Leaf(i) => NestedNode::Leaf { leaf: *i },
            AlphabeticTree::Internal(l, r) => NestedNode::Internal {
                left: Box::new(NestedNode::from(&**l)),
                right: Box::new(NestedNode::from(&**r)),
            },
        }
    }
}

impl From<NestedNode> for AlphabeticTree {
    fn from(n: NestedNode) -> Self {
        match n {
            NestedNode::Leaf { leaf } => AlphabeticTree::Leaf(leaf),
            NestedNode::Internal { left, right } => {
                AlphabeticTree::join(AlphabeticTree::from(*left), AlphabeticTree::from(*right))
            }
        }
    }
}

/// Outcome of a solver run; `Failure` is the designated failure solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Solution(AlphabeticTree),
    Failure,
}

impl SolveResult {
    pub fn tree(&self) -> Option<&AlphabeticTree> {
        match self {
            SolveResult::Solution(t) => Some(t),
            SolveResult::Failure => None,
        }
    }

    pub fn is_solution(&self) -> bool {
        matches!(self, SolveResult::Solution(_))
    }
}

/// Weighted external path length `sum w_i * depth(b_i)`.
pub fn tree_cost(tree: &AlphabeticTree, w: &WeightVector) -> Result<Rational> {
    let n = tree.leaf_count();
    if n != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            found: n,
        });
    }
    let mut total = Rational::zero();
    let mut bad = None;
    tree.visit(0, &mut |leaf, depth| match w.get(leaf) {
        Some(x) => total = &total + &x.mul_int(depth as i64),
        None => bad = Some(leaf),
    });
    match bad {
        Some(index) => Err(Error::IndexOutOfRange {
            index,
            len: w.len(),
        }),
        None => Ok(total),
    }
}

/// Builds the unique alphabetic tree with the given leaf depths, merging
/// equal-depth neighbours on a stack. Returns `Failure` when none exists.
pub fn reconstruct_from_depths(depths: &[usize]) -> SolveResult {
    let mut stack: Vec<(AlphabeticTree, usize)> = Vec::with_capacity(depths.len());
    for (k, &d) in depths.iter().enumerate() {
        stack.push((AlphabeticTree::Leaf(k + 1), d));
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1].1;
            if top == 0 || stack[stack.len() - 2].1 != top {
                break;
            }
            let (right, _) = stack.pop().unwrap();
            let (left, _) = stack.pop().unwrap();
            stack.push((AlphabeticTree::join(left, right), top - 1));
        }
    }
    match stack.pop() {
        Some((tree, 0)) if stack.is_empty() => SolveResult::Solution(tree),
        _ => SolveResult::Failure,
    }
}
