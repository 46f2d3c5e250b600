//! The tree-quotient algebra: the free algebra on generators indexed by
//! finite binary strings, modulo the ideal generated by `A_s ∧ A_t` for `s` a
//! proper prefix of `t`.
//!
//! A homomorphism to `{0, 1}` kills the ideal iff the set of generators it
//! sends to 1 is prefix-incomparable, so the points of the quotient are
//! modeled by finite antichains of nodes ([`AntichainPoint`]). An elementary
//! conjunction `(U, V)` is nonzero iff `U` is itself an antichain disjoint
//! from `V`, with `W = U` as the witnessing point.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::term::{Conjunction, Dnf};

/// Largest supported node depth.
pub const MAX_DEPTH: usize = 128;

/// Default bound on the number of generators the brute-force oracle accepts.
pub const DEFAULT_BRUTE_BOUND: usize = 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("invalid node `{0}`: expected a string of 0/1 of length at most {MAX_DEPTH}")]
    InvalidNode(String),
    #[error("nodes {0} and {1} are prefix-comparable")]
    NotAntichain(TreeNode, TreeNode),
    #[error("conjunction is zero modulo the kernel; no witnessing point exists")]
    ZeroConjunction,
    #[error("brute force over {count} generators exceeds the bound of {bound}")]
    TooManyGenerators { count: usize, bound: usize },
    #[error("generator {0} of the DNF is missing from the oracle's generator set")]
    MissingGenerator(TreeNode),
}

/// A finite binary string. Bit `i` is stored at bit position `i` of `bits`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeNode {
    len: u8,
    bits: u128,
}

fn low_mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

impl TreeNode {
    /// The empty string ε.
    pub const ROOT: TreeNode = TreeNode { len: 0, bits: 0 };

    pub fn root() -> Self {
        Self::ROOT
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, TreeError> {
        if bits.len() > MAX_DEPTH {
            return Err(TreeError::InvalidNode(format!("<{} bits>", bits.len())));
        }
        let packed = bits
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i));
        Ok(TreeNode { len: bits.len() as u8, bits: packed })
    }

    pub fn depth(&self) -> usize {
        self.len as usize
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.depth(), "bit {i} out of range for depth {}", self.depth());
        (self.bits >> i) & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.depth()).map(|i| self.bit(i)).collect()
    }

    /// `self` extended by one bit, or `None` at [`MAX_DEPTH`].
    pub fn child(&self, bit: bool) -> Option<Self> {
        if self.depth() >= MAX_DEPTH {
            return None;
        }
        Some(TreeNode { len: self.len + 1, bits: self.bits | ((bit as u128) << self.len) })
    }

    /// The initial segment of length `m` (which must not exceed the depth).
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.depth());
        TreeNode { len: m as u8, bits: self.bits & low_mask(m) }
    }

    pub fn is_prefix_of(&self, other: &TreeNode) -> bool {
        self.len <= other.len && other.bits & low_mask(self.depth()) == self.bits
    }

    pub fn is_proper_prefix_of(&self, other: &TreeNode) -> bool {
        self.len < other.len && self.is_prefix_of(other)
    }

    pub fn is_comparable(&self, other: &TreeNode) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// All nodes of depth at most `max_depth`, in lexicographic order.
    pub fn all_up_to(max_depth: usize) -> Vec<TreeNode> {
        let mut out = vec![TreeNode::ROOT];
        let mut frontier = vec![TreeNode::ROOT];
        for _ in 0..max_depth {
            frontier = frontier
                .iter()
                .flat_map(|n| [n.child(false), n.child(true)])
                .flatten()
                .collect();
            out.extend_from_slice(&frontier);
        }
        out.sort();
        out
    }
}

/// Lexicographic on the bit string, shorter prefixes first.
impl Ord for TreeNode {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.depth().min(other.depth());
        let diff = (self.bits ^ other.bits) & low_mask(common);
        if diff != 0 {
            let i = diff.trailing_zeros();
            return ((self.bits >> i) & 1).cmp(&((other.bits >> i) & 1));
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for TreeNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.depth() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            f.write_str("ε")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

impl FromStr for TreeNode {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(TreeError::InvalidNode(s.to_string())),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        TreeNode::from_bits(&bits).map_err(|_| TreeError::InvalidNode(s.to_string()))
    }
}

impl Serialize for TreeNode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TreeNode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the quotient's Stone space: a finite set of pairwise
/// prefix-incomparable nodes. `A_s` holds at the point iff `s` is a member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct AntichainPoint {
    nodes: BTreeSet<TreeNode>,
}

impl AntichainPoint {
    pub fn new<I: IntoIterator<Item = TreeNode>>(nodes: I) -> Result<Self, TreeError> {
        let nodes: BTreeSet<TreeNode> = nodes.into_iter().collect();
        let list: Vec<&TreeNode> = nodes.iter().collect();
        for (i, s) in list.iter().enumerate() {
            for t in &list[i + 1..] {
                if s.is_comparable(t) {
                    return Err(TreeError::NotAntichain(**s, **t));
                }
            }
        }
        Ok(AntichainPoint { nodes })
    }

    pub fn nodes(&self) -> &BTreeSet<TreeNode> {
        &self.nodes
    }

    pub fn contains(&self, s: &TreeNode) -> bool {
        self.nodes.contains(s)
    }

    pub fn satisfies(&self, c: &Conjunction<TreeNode>) -> bool {
        c.satisfied_by(|g| self.contains(g))
    }

    /// Value of `d` at this point.
    pub fn evaluate(&self, d: &Dnf<TreeNode>) -> bool {
        d.eval_with(|g| self.contains(g))
    }
}

impl<'de> Deserialize<'de> for AntichainPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let nodes = Vec::<TreeNode>::deserialize(d)?;
        AntichainPoint::new(nodes).map_err(serde::de::Error::custom)
    }
}

/// `A_s` holds at `p`.
pub fn point_membership(s: &TreeNode, p: &AntichainPoint) -> bool {
    p.contains(s)
}

/// The kernel ideal, described by its generating schema only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelIdeal;

impl KernelIdeal {
    pub fn is_generator(&self, s: &TreeNode, t: &TreeNode) -> bool {
        s.is_proper_prefix_of(t)
    }

    /// `A_s ∧ A_t` when `s ⊊ t`.
    pub fn generator(&self, s: &TreeNode, t: &TreeNode) -> Option<Conjunction<TreeNode>> {
        self.is_generator(s, t).then(|| Conjunction::new([*s, *t], []))
    }
}

fn is_antichain(nodes: &BTreeSet<TreeNode>) -> bool {
    let list: Vec<&TreeNode> = nodes.iter().collect();
    list.iter()
        .enumerate()
        .all(|(i, s)| list[i + 1..].iter().all(|t| !s.is_comparable(t)))
}

pub fn conjunction_is_zero_mod_kernel(c: &Conjunction<TreeNode>) -> bool {
    c.is_contradictory() || !is_antichain(c.positive())
}

/// Decides whether `d` lies in the kernel ideal.
pub fn is_zero_mod_kernel(d: &Dnf<TreeNode>) -> bool {
    d.conjuncts().all(conjunction_is_zero_mod_kernel)
}

/// `A_s ∧ A_t = 0` in the quotient.
pub fn star_check(s: &TreeNode, t: &TreeNode) -> bool {
    is_zero_mod_kernel(&Conjunction::new([*s, *t], []).into())
}

/// The point `W = U` at which a nonzero conjunction holds.
pub fn witness_point(c: &Conjunction<TreeNode>) -> Result<AntichainPoint, TreeError> {
    if conjunction_is_zero_mod_kernel(c) {
        return Err(TreeError::ZeroConjunction);
    }
    AntichainPoint::new(c.positive().iter().copied())
}

/// Brute-force search over the antichains contained in a fixed generator set.
/// Conjunctions are given as bitmasks over the sorted generators.
#[derive(Debug, Clone)]
pub struct AntichainOracle {
    index: Vec<TreeNode>,
    comparable: Vec<u64>,
}

impl AntichainOracle {
    pub fn new(gens: &BTreeSet<TreeNode>, bound: usize) -> Result<Self, TreeError> {
        if gens.len() > bound.min(64) {
            return Err(TreeError::TooManyGenerators { count: gens.len(), bound });
        }
        let index: Vec<TreeNode> = gens.iter().copied().collect();
        let comparable = index
            .iter()
            .map(|s| {
                index
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| s.is_comparable(t))
                    .fold(0u64, |m, (j, _)| m | (1 << j))
            })
            .collect();
        Ok(AntichainOracle { index, comparable })
    }

    pub fn generators(&self) -> &[TreeNode] {
        &self.index
    }

    /// The bit of `g`.
    pub fn bit_of(&self, g: &TreeNode) -> Result<u64, TreeError> {
        self.index
            .binary_search(g)
            .map(|i| 1 << i)
            .map_err(|_| TreeError::MissingGenerator(*g))
    }

    pub fn masks(&self, d: &Dnf<TreeNode>) -> Result<Vec<(u64, u64)>, TreeError> {
        d.conjuncts()
            .map(|c| {
                let fold = |set: &BTreeSet<TreeNode>| {
                    set.iter().try_fold(0u64, |m, g| Ok::<_, TreeError>(m | self.bit_of(g)?))
                };
                Ok((fold(c.positive())?, fold(c.negative())?))
            })
            .collect()
    }

    /// An antichain, as a mask, satisfying one of the `(positive, negative)`
    /// conjuncts.
    pub fn search(&self, conjuncts: &[(u64, u64)]) -> Option<u64> {
        self.run(conjuncts, 0, 0)
    }

    fn run(&self, conjuncts: &[(u64, u64)], i: usize, chosen: u64) -> Option<u64> {
        let decided = 1u64.checked_shl(i as u32).map_or(u64::MAX, |b| b - 1);
        let open = conjuncts
            .iter()
            .any(|&(pos, neg)| pos & decided & !chosen == 0 && neg & chosen == 0);
        if !open {
            return None;
        }
        if i == self.comparable.len() {
            return Some(chosen);
        }
        if self.comparable[i] & chosen == 0 {
            if let Some(found) = self.run(conjuncts, i + 1, chosen | (1 << i)) {
                return Some(found);
            }
        }
        self.run(conjuncts, i + 1, chosen)
    }

    pub fn point(&self, mask: u64) -> AntichainPoint {
        AntichainPoint::new(
            self.index.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, g)| *g),
        )
        .expect("search yields antichains only")
    }

    pub fn witness(&self, d: &Dnf<TreeNode>) -> Result<Option<AntichainPoint>, TreeError> {
        Ok(self.search(&self.masks(d)?).map(|m| self.point(m)))
    }
}

/// Enumerates the antichains contained in `gens` and searches for one at
/// which `d` holds. Returns that point, or `None` when `d` is zero mod the
/// kernel. Exponential in `gens.len()`.
pub fn brute_force_witness(
    d: &Dnf<TreeNode>,
    gens: &BTreeSet<TreeNode>,
    bound: usize,
) -> Result<Option<AntichainPoint>, TreeError> {
    AntichainOracle::new(gens, bound)?.witness(d)
}

/// Independent oracle for [`is_zero_mod_kernel`]: true iff no antichain
/// `W ⊆ gens` satisfies a conjunct of `d`.
pub fn brute_force_zero_mod_kernel(
    d: &Dnf<TreeNode>,
    gens: &BTreeSet<TreeNode>,
    bound: usize,
) -> Result<bool, TreeError> {
    brute_force_witness(d, gens, bound).map(|w| w.is_none())
}
