use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ExpressionTree, Node, Op};
use crate::data::FEATURE_COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenMethod {
    Grow,
    Full,
    RampedHalfAndHalf,
}

/// Range for ephemeral random constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantRange {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeGenConfig {
    pub min_depth: usize,
    pub max_depth: usize,
    pub method: GenMethod,
    /// `None` disables constant leaves.
    pub constants: Option<ConstantRange>,
}

impl Default for TreeGenConfig {
    /// Ramped half-and-half over depths 2..=6, variables only.
    fn default() -> Self {
        TreeGenConfig {
            min_depth: 2,
            max_depth: 6,
            method: GenMethod::RampedHalfAndHalf,
            constants: None,
        }
    }
}

impl TreeGenConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.min_depth < 1 {
            return Err("min_depth must be at least 1".into());
        }
        if self.max_depth < self.min_depth {
            return Err(format!(
                "max_depth {} is below min_depth {}",
                self.max_depth, self.min_depth
            ));
        }
        if let Some(c) = self.constants {
            if !(c.low.is_finite() && c.high.is_finite() && c.low <= c.high) {
                return Err(format!("invalid constant range [{}, {}]", c.low, c.high));
            }
        }
        Ok(())
    }
}

/// Draw a random tree whose depth lies in `[min_depth, max_depth]`.
/// Consumes randomness from `rng` only, so equal generator states yield
/// equal trees.
pub fn random_tree<R: Rng + ?Sized>(cfg: &TreeGenConfig, rng: &mut R) -> ExpressionTree {
    debug_assert!(cfg.validate().is_ok());
    let root = match cfg.method {
        GenMethod::Full => full(cfg, cfg.max_depth, 1, rng),
        GenMethod::Grow => grow(cfg, cfg.max_depth, 1, rng),
        GenMethod::RampedHalfAndHalf => {
            let depth = rng.gen_range(cfg.min_depth..=cfg.max_depth);
            if rng.gen_bool(0.5) {
                full(cfg, depth, 1, rng)
            } else {
                grow(cfg, depth, 1, rng)
            }
        }
    };
    ExpressionTree { root }
}

fn terminal<R: Rng + ?Sized>(cfg: &TreeGenConfig, rng: &mut R) -> Node {
    match cfg.constants {
        Some(c) => {
            let k = rng.gen_range(0..=FEATURE_COUNT);
            if k == FEATURE_COUNT {
                Node::Const(if c.low == c.high {
                    c.low
                } else {
                    rng.gen_range(c.low..c.high)
                })
            } else {
                Node::Var(k)
            }
        }
        None => Node::Var(rng.gen_range(0..FEATURE_COUNT)),
    }
}

fn function<R: Rng + ?Sized>(
    cfg: &TreeGenConfig,
    max_depth: usize,
    depth: usize,
    rng: &mut R,
    child: fn(&TreeGenConfig, usize, usize, &mut R) -> Node,
) -> Node {
    let op = Op::ALL[rng.gen_range(0..Op::ALL.len())];
    let left = child(cfg, max_depth, depth + 1, rng);
    let right = child(cfg, max_depth, depth + 1, rng);
    Node::binary(op, left, right)
}

fn full<R: Rng + ?Sized>(cfg: &TreeGenConfig, max_depth: usize, depth: usize, rng: &mut R) -> Node {
    if depth >= max_depth {
        terminal(cfg, rng)
    } else {
        function(cfg, max_depth, depth, rng, full)
    }
}

fn grow<R: Rng + ?Sized>(cfg: &TreeGenConfig, max_depth: usize, depth: usize, rng: &mut R) -> Node {
    if depth >= max_depth {
        return terminal(cfg, rng);
    }
    if depth < cfg.min_depth {
        return function(cfg, max_depth, depth, rng, grow);
    }
    let terminals = FEATURE_COUNT + usize::from(cfg.constants.is_some());
    if rng.gen_range(0..Op::ALL.len() + terminals) < Op::ALL.len() {
        function(cfg, max_depth, depth, rng, grow)
    } else {
        terminal(cfg, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn leaf_depths(n: &Node, depth: usize, out: &mut Vec<usize>) {
        match n {
            Node::Var(_) | Node::Const(_) => out.push(depth),
            Node::Binary { left, right, .. } => {
                leaf_depths(left, depth + 1, out);
                leaf_depths(right, depth + 1, out);
            }
            Node::Logistic(inner) => leaf_depths(inner, depth + 1, out),
        }
    }

    #[test]
    fn depth_one_is_a_terminal() {
        let cfg = TreeGenConfig {
            min_depth: 1,
            max_depth: 1,
            method: GenMethod::RampedHalfAndHalf,
            constants: None,
        };
        let t = random_tree(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(matches!(t.root(), Node::Var(_)));
    }

    #[test]
    fn full_puts_every_leaf_at_max_depth() {
        let cfg = TreeGenConfig {
            min_depth: 1,
            max_depth: 3,
            method: GenMethod::Full,
            constants: None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let t = random_tree(&cfg, &mut rng);
            let mut d = Vec::new();
            leaf_depths(t.root(), 1, &mut d);
            assert!(d.iter().all(|&x| x == 3));
            assert_eq!(t.size(), 7);
        }
    }

    #[test]
    fn same_seed_same_tree() {
        let cfg = TreeGenConfig::default();
        let a = random_tree(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
        let b = random_tree(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn generation_respects_depth_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for method in [GenMethod::Grow, GenMethod::Full, GenMethod::RampedHalfAndHalf] {
            let cfg = TreeGenConfig {
                min_depth: 2,
                max_depth: 6,
                method,
                constants: Some(ConstantRange { low: -1.0, high: 1.0 }),
            };
            for _ in 0..10_000 / 3 + 1 {
                let d = random_tree(&cfg, &mut rng).depth();
                assert!((2..=6).contains(&d), "{method:?} produced depth {d}");
            }
        }
    }

    #[test]
    fn constants_within_range() {
        let cfg = TreeGenConfig {
            min_depth: 3,
            max_depth: 5,
            method: GenMethod::Full,
            constants: Some(ConstantRange { low: 0.5, high: 0.75 }),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut seen = 0;
        for _ in 0..100 {
            let t = random_tree(&cfg, &mut rng);
            for i in 0..t.size() {
                if let Some(Node::Const(c)) = t.subtree(i) {
                    assert!((0.5..0.75).contains(c));
                    seen += 1;
                }
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = TreeGenConfig::default();
        cfg.min_depth = 0;
        assert!(cfg.validate().is_err());
        cfg.min_depth = 4;
        cfg.max_depth = 3;
        assert!(cfg.validate().is_err());
    }
}
