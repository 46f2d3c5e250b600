//! The algebra of sets `M ⊆ ℕ` with `2k ∈ M ⟺ 2k+1 ∈ M` for all but finitely
//! many `k`, restricted to eventually periodic members, together with block
//! schemas for infinite antichains, lazy unions of their components and the
//! point-mass differences `μ_n = δ_{2n} − δ_{2n+1}`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ep::{lcm, EpSet, Membership};
use crate::scalar::Scalar;
use crate::separation::{Carrier, Element, PresentedAntichain, SeparationError, SeparationWitness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairError {
    #[error("set is not in the pair algebra: the pairing condition fails infinitely often")]
    NotInAlgebra,
    #[error("an infinite antichain schema is required; ad-hoc finite lists carry no infiniteness certificate")]
    SchemaRequired,
    #[error("invalid block schema: {0}")]
    InvalidSchema(String),
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

/// The least `N` such that `2k ∈ s ⟺ 2k+1 ∈ s` for every `k ≥ N`, or `None`
/// if no such `N` exists.
pub fn in_pair_algebra(s: &EpSet) -> Option<usize> {
    let paired = |k: usize| s.contains(2 * k) == s.contains(2 * k + 1);
    // From k0 on, 2k is past the threshold and the pairing condition is
    // periodic in k with period dividing s.period().
    let k0 = s.threshold().div_ceil(2);
    if (k0..k0 + s.period()).any(|k| !paired(k)) {
        return None;
    }
    Some((0..k0).rev().find(|&k| !paired(k)).map_or(0, |k| k + 1))
}

/// A member of the pair algebra with its vanish index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PairElement {
    set: EpSet,
    vanish_index: usize,
}

impl PairElement {
    pub fn new(set: EpSet) -> Result<Self, PairError> {
        let vanish_index = in_pair_algebra(&set).ok_or(PairError::NotInAlgebra)?;
        Ok(PairElement { set, vanish_index })
    }

    pub fn set(&self) -> &EpSet {
        &self.set
    }

    pub fn vanish_index(&self) -> usize {
        self.vanish_index
    }

    /// Re-checks the pairing condition for every `k ≥ vanish_index` by
    /// scanning up to one full period past the threshold.
    pub fn verify_certificate(&self) -> bool {
        let s = &self.set;
        let end = self.vanish_index.max(s.threshold().div_ceil(2)) + lcm(2, 2 * s.period());
        (self.vanish_index..end).all(|k| s.contains(2 * k) == s.contains(2 * k + 1))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.set.union(&other.set)).expect("pair algebra is closed under union")
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::new(self.set.intersection(&other.set))
            .expect("pair algebra is closed under intersection")
    }

    pub fn complement(&self) -> Self {
        Self::new(self.set.complement()).expect("pair algebra is closed under complement")
    }
}

impl Membership for PairElement {
    fn contains(&self, n: usize) -> bool {
        self.set.contains(n)
    }
}

/// Adds the partner `n ^ 1` of every member. The result differs from `s` in
/// finitely many places and is pair-closed everywhere.
pub fn pair_closure(s: &EpSet) -> Result<PairElement, PairError> {
    in_pair_algebra(s).ok_or(PairError::NotInAlgebra)?;
    let threshold = s.threshold() + s.threshold() % 2;
    let closed = EpSet::from_fn(threshold, lcm(s.period(), 2), |n| {
        s.contains(n) || s.contains(n ^ 1)
    });
    PairElement::new(closed)
}

/// `[2n ∈ e] − [2n+1 ∈ e]`.
pub fn mu_eval<S: Scalar>(n: usize, e: &impl Membership) -> S {
    let value = e.contains(2 * n) as i64 - e.contains(2 * n + 1) as i64;
    S::from_int(value)
}

/// An infinite antichain of finite sets: component `n` is
/// `{start + n·stride + i : mask[i]}`. Components are disjoint because
/// `width ≤ stride`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSchema {
    start: usize,
    stride: usize,
    mask: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct BlockRepr {
    start: usize,
    stride: usize,
    width: usize,
}

impl BlockSchema {
    pub fn new(start: usize, stride: usize, mask: Vec<bool>) -> Result<Self, PairError> {
        if stride == 0 {
            return Err(PairError::InvalidSchema("stride must be positive".into()));
        }
        if mask.len() > stride {
            return Err(PairError::InvalidSchema(format!(
                "width {} exceeds stride {stride}; blocks would overlap",
                mask.len()
            )));
        }
        Ok(BlockSchema { start, stride, mask })
    }

    /// Component `n` is the whole window `[start + n·stride, … + width)`.
    pub fn full(start: usize, stride: usize, width: usize) -> Result<Self, PairError> {
        Self::new(start, stride, vec![true; width])
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn width(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn component_elements(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        let base = self.start + n * self.stride;
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| base + i)
    }

    pub fn component(&self, n: usize) -> EpSet {
        EpSet::finite(self.component_elements(n))
    }

    /// The index of the component containing `x`, if any.
    pub fn component_of(&self, x: usize) -> Option<usize> {
        let offset = x.checked_sub(self.start)?;
        let (n, i) = (offset / self.stride, offset % self.stride);
        self.mask.get(i).copied().unwrap_or(false).then_some(n)
    }

    fn closure_of(&self, n: usize) -> BTreeSet<usize> {
        self.component_elements(n).flat_map(|x| [x, x ^ 1]).collect()
    }
}

/// Union of the components of `block` whose index lies in `selection`; when
/// `closed`, each component is replaced by its pair closure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LazyPairUnion {
    block: BlockSchema,
    selection: EpSet,
    closed: bool,
}

impl LazyPairUnion {
    pub fn new(block: BlockSchema, selection: EpSet, closed: bool) -> Self {
        LazyPairUnion { block, selection, closed }
    }

    pub fn block(&self) -> &BlockSchema {
        &self.block
    }

    pub fn selection(&self) -> &EpSet {
        &self.selection
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    fn raw_contains(&self, x: usize) -> bool {
        self.block.component_of(x).is_some_and(|n| self.selection.contains(n))
    }

    /// The denoted set as an eventually periodic set.
    pub fn to_ep_set(&self) -> EpSet {
        let b = &self.block;
        let threshold = b.start + self.selection.threshold() * b.stride + 2;
        let mut period = self.selection.period() * b.stride;
        if self.closed {
            period = lcm(period, 2);
        }
        EpSet::from_fn(threshold + threshold % 2, period, |x| self.contains(x))
    }
}

impl Membership for LazyPairUnion {
    fn contains(&self, x: usize) -> bool {
        self.raw_contains(x) || (self.closed && self.raw_contains(x ^ 1))
    }
}

#[derive(Serialize, Deserialize)]
struct LazyRepr {
    block: BlockRepr,
    selection: EpSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    closed: bool,
}

impl Serialize for LazyPairUnion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let b = &self.block;
        let full = b.mask.iter().all(|&m| m);
        LazyRepr {
            block: BlockRepr { start: b.start, stride: b.stride, width: b.width() },
            selection: self.selection.clone(),
            mask: (!full).then(|| b.mask.iter().map(|&m| if m { '1' } else { '0' }).collect()),
            closed: self.closed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LazyPairUnion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = LazyRepr::deserialize(d)?;
        let block = block_from_parts(repr.block.start, repr.block.stride, repr.block.width, repr.mask)
            .map_err(D::Error::custom)?;
        Ok(LazyPairUnion::new(block, repr.selection, repr.closed))
    }
}

fn block_from_parts(
    start: usize,
    stride: usize,
    width: usize,
    mask: Option<String>,
) -> Result<BlockSchema, PairError> {
    let mask = match mask {
        None => vec![true; width],
        Some(m) => m
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(PairError::InvalidSchema(format!("mask `{m}`"))),
            })
            .collect::<Result<Vec<bool>, _>>()?,
    };
    if mask.len() != width {
        return Err(PairError::InvalidSchema("mask length differs from width".into()));
    }
    BlockSchema::new(start, stride, mask)
}

#[derive(Serialize, Deserialize)]
struct SchemaRepr {
    start: usize,
    stride: usize,
    width: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<String>,
}

impl Serialize for BlockSchema {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let full = self.mask.iter().all(|&m| m);
        SchemaRepr {
            start: self.start,
            stride: self.stride,
            width: self.width(),
            mask: (!full).then(|| self.mask.iter().map(|&m| if m { '1' } else { '0' }).collect()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockSchema {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SchemaRepr::deserialize(d)?;
        block_from_parts(r.start, r.stride, r.width, r.mask).map_err(serde::de::Error::custom)
    }
}

/// The index set of greedily selected components: ascending, a component is
/// kept iff its pair closure misses the closures of all kept predecessors.
///
/// Conflicts reach back at most `reach` indices and depend on the index only
/// through the parity of its block start, so the greedy run is a finite-state
/// process and its outcome is eventually periodic.
pub fn greedy_selection(schema: &BlockSchema) -> EpSet {
    let reach = (schema.width() + 1) / schema.stride + 1;
    assert!(reach < 64, "conflict reach too large");
    let conflict = |n: usize, m: usize| !schema.closure_of(n).is_disjoint(&schema.closure_of(m));

    let mut decisions: Vec<bool> = Vec::new();
    let mut seen: HashMap<(usize, u64), usize> = HashMap::new();
    let (cycle_start, cycle_end) = loop {
        let n = decisions.len();
        let history = (1..=reach.min(n))
            .filter(|&d| decisions[n - d])
            .fold(0u64, |acc, d| acc | (1 << d));
        if let Some(&earlier) = seen.get(&(n % 2, history)) {
            break (earlier, n);
        }
        seen.insert((n % 2, history), n);
        let keep = (1..=reach.min(n)).all(|d| !decisions[n - d] || !conflict(n - d, n));
        decisions.push(keep);
    };
    EpSet::new(decisions[..cycle_start].to_vec(), decisions[cycle_start..cycle_end].to_vec())
        .expect("cycle is non-empty")
}

/// Members of `s` whose rank in the ascending enumeration has the given
/// parity.
pub fn positions_with_parity(s: &EpSet, odd: bool) -> EpSet {
    let threshold = s.threshold();
    let period = 2 * s.period();
    let mut rank = 0usize;
    let mut bits = Vec::with_capacity(threshold + period);
    for n in 0..threshold + period {
        let member = s.contains(n);
        bits.push(member && (rank % 2 == 1) == odd);
        rank += member as usize;
    }
    let pattern = bits.split_off(threshold);
    EpSet::new(bits, pattern).expect("period is positive")
}

/// Separation witness for an antichain given by a block schema: close every
/// component, greedily drop conflicting closures, and take the union of the
/// even-positioned survivors. `M1` are the even-positioned survivors and
/// `M0` the odd-positioned ones.
pub fn wssp_witness(ac: &PresentedAntichain) -> Result<SeparationWitness, PairError> {
    let schema = match ac {
        PresentedAntichain::Blocks { schema, .. } => schema,
        _ => return Err(PairError::SchemaRequired),
    };
    let selection = greedy_selection(schema);
    let below = positions_with_parity(&selection, false);
    let disjoint = positions_with_parity(&selection, true);
    let union = LazyPairUnion::new(schema.clone(), below.clone(), true);
    Ok(SeparationWitness::new(Element::Union(union), Carrier::PairAlgebra, below, disjoint)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separation::check_wssp_witness;
    use num_rational::BigRational;

    #[test]
    fn membership_in_algebra() {
        assert_eq!(in_pair_algebra(&EpSet::progression(0, 2).unwrap()), None);
        assert_eq!(in_pair_algebra(&EpSet::finite([0, 1, 2])), Some(2));
        assert_eq!(in_pair_algebra(&EpSet::full()), Some(0));
        assert_eq!(in_pair_algebra(&EpSet::empty()), Some(0));
        // pairs {4k, 4k+1}: in the algebra everywhere
        let blocks = EpSet::progression(0, 4).unwrap().union(&EpSet::progression(1, 4).unwrap());
        assert_eq!(in_pair_algebra(&blocks), Some(0));
    }

    #[test]
    fn closures() {
        assert_eq!(pair_closure(&EpSet::finite([0])).unwrap().set(), &EpSet::finite([0, 1]));
        assert_eq!(
            pair_closure(&EpSet::finite([0, 1, 2])).unwrap().set(),
            &EpSet::finite([0, 1, 2, 3])
        );
        let closed = EpSet::finite([2, 3]).union(&EpSet::progression(10, 1).unwrap());
        assert_eq!(pair_closure(&closed).unwrap().set(), &closed);
        assert_eq!(
            pair_closure(&EpSet::progression(0, 2).unwrap()),
            Err(PairError::NotInAlgebra)
        );
        assert_eq!(pair_closure(&EpSet::finite([5])).unwrap().vanish_index(), 0);
    }

    #[test]
    fn mu_values() {
        let tail = EpSet::finite([0]).union(&EpSet::progression(6, 1).unwrap());
        let e = PairElement::new(tail).unwrap();
        assert_eq!(mu_eval::<BigRational>(0, &e), BigRational::from_int(1));
        let e = EpSet::finite(0..10);
        assert_eq!(mu_eval::<BigRational>(2, &e), BigRational::from_int(0));
        assert_eq!(mu_eval::<f64>(1, &EpSet::finite([3])), -1.0);
    }

    #[test]
    fn blocks_and_unions() {
        let schema = BlockSchema::new(1, 5, vec![true, false, true]).unwrap();
        assert_eq!(schema.component(2), EpSet::finite([11, 13]));
        assert_eq!(schema.component_of(13), Some(2));
        assert_eq!(schema.component_of(12), None);
        assert_eq!(schema.component_of(0), None);
        assert!(BlockSchema::full(0, 2, 3).is_err());

        let union = LazyPairUnion::new(schema.clone(), EpSet::progression(1, 3).unwrap(), true);
        let ep = union.to_ep_set();
        for x in 0..400 {
            assert_eq!(ep.contains(x), union.contains(x), "x = {x}");
        }
    }

    #[test]
    fn greedy_on_singletons() {
        // A_n = {n}: closures {2j, 2j+1} pairwise collide, so odd n are dropped
        let schema = BlockSchema::full(0, 1, 1).unwrap();
        assert_eq!(greedy_selection(&schema), EpSet::progression(0, 2).unwrap());
        // A_n = {4n}: closures stay disjoint
        let schema = BlockSchema::full(0, 4, 1).unwrap();
        assert_eq!(greedy_selection(&schema), EpSet::full());
    }

    #[test]
    fn parity_positions() {
        let s = EpSet::progression(3, 3).unwrap();
        assert_eq!(positions_with_parity(&s, false), EpSet::progression(3, 6).unwrap());
        assert_eq!(positions_with_parity(&s, true), EpSet::progression(6, 6).unwrap());
    }

    #[test]
    fn witness_for_pair_blocks() {
        let ac = PresentedAntichain::blocks(Carrier::PairAlgebra, BlockSchema::full(0, 4, 2).unwrap())
            .unwrap();
        let w = wssp_witness(&ac).unwrap();
        assert_eq!(w.below(), &EpSet::progression(0, 2).unwrap());
        assert_eq!(w.disjoint(), &EpSet::progression(1, 2).unwrap());
        assert!(check_wssp_witness(&ac, &w, 50).unwrap());

        // not pair-closed components {4n}
        let ac = PresentedAntichain::blocks(Carrier::PairAlgebra, BlockSchema::full(0, 4, 1).unwrap())
            .unwrap();
        let w = wssp_witness(&ac).unwrap();
        assert!(check_wssp_witness(&ac, &w, 50).unwrap());

        // {0}, {1}, {2}, ...: index 1 is dropped
        let ac = PresentedAntichain::blocks(Carrier::PairAlgebra, BlockSchema::full(0, 1, 1).unwrap())
            .unwrap();
        let w = wssp_witness(&ac).unwrap();
        assert!(!w.below().contains(1) && !w.disjoint().contains(1));
        assert!(check_wssp_witness(&ac, &w, 100).unwrap());
    }

    #[test]
    fn finite_lists_are_rejected() {
        let ac = PresentedAntichain::set_list(
            Carrier::PairAlgebra,
            vec![EpSet::finite([0]), EpSet::finite([4])],
        )
        .unwrap();
        assert_eq!(wssp_witness(&ac).unwrap_err(), PairError::SchemaRequired);
    }

    #[test]
    fn json_forms() {
        let u = LazyPairUnion::new(BlockSchema::full(0, 4, 2).unwrap(), EpSet::progression(0, 2).unwrap(), false);
        let text = serde_json::to_string(&u).unwrap();
        assert_eq!(
            text,
            r#"{"block":{"start":0,"stride":4,"width":2},"selection":{"threshold":0,"period":2,"prefix":"","pattern":"10"}}"#
        );
        assert_eq!(serde_json::from_str::<LazyPairUnion>(&text).unwrap(), u);
    }
}
