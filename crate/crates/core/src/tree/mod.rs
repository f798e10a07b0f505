//! Expression trees over `{+, -, *, protected /}` and the six slope inputs.
//!
//! Every node result is saturated to `±SATURATION`, which keeps evaluation
//! total and finite for any finite input. The same node arithmetic
//! ([`apply`], [`logistic`]) is reused by the semantic operators so that a
//! materialized lineage evaluates bit-identically to lineage replay.

mod gen;
mod text;

pub use gen::{random_tree, ConstantRange, GenMethod, TreeGenConfig};
pub use text::ParseError;

use std::fmt;

use crate::data::{Features, FEATURE_COUNT};

/// Divisors with magnitude at or below this make protected division return 1.
pub const PROTECTED_DIV_THRESHOLD: f64 = 1e-9;

/// Bound applied to every node result.
pub const SATURATION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    /// Protected division.
    Div,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }
}

#[inline]
pub fn saturate(x: f64) -> f64 {
    x.clamp(-SATURATION, SATURATION)
}

/// Node arithmetic shared by tree evaluation and semantic operators.
#[inline]
pub fn apply(op: Op, a: f64, b: f64) -> f64 {
    let v = match op {
        Op::Add => a + b,
        Op::Sub => a - b,
        Op::Mul => a * b,
        Op::Div => {
            if b.abs() <= PROTECTED_DIV_THRESHOLD {
                1.0
            } else {
                a / b
            }
        }
    };
    saturate(v)
}

/// Logistic squashing into `[0, 1]`.
#[inline]
pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Zero-based feature index, `< FEATURE_COUNT`.
    Var(usize),
    Const(f64),
    Binary {
        op: Op,
        left: Box<Node>,
        right: Box<Node>,
    },
    /// Only produced when materializing tree-mode mutations; never generated
    /// at random.
    Logistic(Box<Node>),
}

impl Node {
    pub fn binary(op: Op, left: Node, right: Node) -> Node {
        Node::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn eval(&self, x: &Features) -> f64 {
        match self {
            Node::Var(i) => x[*i],
            Node::Const(c) => *c,
            Node::Binary { op, left, right } => apply(*op, left.eval(x), right.eval(x)),
            Node::Logistic(inner) => logistic(inner.eval(x)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Var(_) | Node::Const(_) => 1,
            Node::Binary { left, right, .. } => 1 + left.size() + right.size(),
            Node::Logistic(inner) => 1 + inner.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Var(_) | Node::Const(_) => 1,
            Node::Binary { left, right, .. } => 1 + left.depth().max(right.depth()),
            Node::Logistic(inner) => 1 + inner.depth(),
        }
    }

    fn nth(&self, mut index: usize) -> Result<&Node, usize> {
        if index == 0 {
            return Ok(self);
        }
        index -= 1;
        match self {
            Node::Var(_) | Node::Const(_) => Err(index),
            Node::Logistic(inner) => inner.nth(index),
            Node::Binary { left, right, .. } => match left.nth(index) {
                Ok(n) => Ok(n),
                Err(rest) => right.nth(rest),
            },
        }
    }

    fn replace_nth(&mut self, mut index: usize, with: &mut Option<Node>) -> usize {
        if index == 0 {
            if let Some(n) = with.take() {
                *self = n;
            }
            return usize::MAX;
        }
        index -= 1;
        match self {
            Node::Var(_) | Node::Const(_) => index,
            Node::Logistic(inner) => inner.replace_nth(index, with),
            Node::Binary { left, right, .. } => {
                let rest = left.replace_nth(index, with);
                if with.is_none() {
                    usize::MAX
                } else {
                    right.replace_nth(rest, with)
                }
            }
        }
    }

    fn check_vars(&self) -> bool {
        match self {
            Node::Var(i) => *i < FEATURE_COUNT,
            Node::Const(c) => c.is_finite(),
            Node::Binary { left, right, .. } => left.check_vars() && right.check_vars(),
            Node::Logistic(inner) => inner.check_vars(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionTree {
    root: Node,
}

impl ExpressionTree {
    /// Panics if a variable index is out of range or a constant is not finite.
    pub fn new(root: Node) -> Self {
        assert!(root.check_vars(), "invalid terminal in expression tree");
        ExpressionTree { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    pub fn evaluate(&self, features: &Features) -> f64 {
        self.root.eval(features)
    }

    /// Outputs on each row, in order.
    pub fn semantics(&self, rows: &[Features]) -> Vec<f64> {
        rows.iter().map(|r| self.root.eval(r)).collect()
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// A lone terminal has depth 1.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Preorder node access.
    pub fn subtree(&self, index: usize) -> Option<&Node> {
        self.root.nth(index).ok()
    }

    /// Copy of this tree with the preorder node at `index` replaced.
    pub fn replace_subtree(&self, index: usize, with: Node) -> Option<ExpressionTree> {
        let mut root = self.root.clone();
        let mut slot = Some(with);
        root.replace_nth(index, &mut slot);
        if slot.is_some() {
            return None;
        }
        Some(ExpressionTree { root })
    }

    pub fn to_text(&self) -> String {
        text::to_text(&self.root)
    }

    pub fn parse_text(s: &str) -> Result<ExpressionTree, ParseError> {
        text::parse(s).map(|root| ExpressionTree { root })
    }
}

impl fmt::Display for ExpressionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
