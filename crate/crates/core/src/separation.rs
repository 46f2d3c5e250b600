//! Separation witnesses for countable antichains and the independent-family
//! construction over the tree quotient.
//!
//! Index sets of witnesses are eventually periodic sets whose infiniteness is
//! read off their pattern bits; nothing is concluded from sampling. Checks of
//! "`A_n ≤ A`" and "`A_n ∧ A = 0`" are exact in every carrier and are run for
//! the indices below a caller-supplied horizon.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ep::{lcm, EpSet, Membership};
use crate::pair::{in_pair_algebra, BlockSchema, LazyPairUnion};
use crate::term::{Conjunction, Dnf};
use crate::tree::{
    brute_force_zero_mod_kernel, is_zero_mod_kernel, AntichainPoint, TreeError, TreeNode,
    MAX_DEPTH,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("carrier {0:?} cannot represent the required infinite join")]
    UnsupportedCarrier(Carrier),
    #[error("element is not a member of the {0:?} carrier")]
    NotInCarrier(Carrier),
    #[error("index {0} is not presented by the antichain")]
    IndexNotPresented(usize),
    #[error("elements {0} and {1} of the family are not disjoint")]
    NotAntichain(usize, usize),
    #[error("index set `{0}` is not certified infinite")]
    NotInfinite(&'static str),
    #[error("the index sets of a witness must be disjoint")]
    OverlappingIndexSets,
    #[error("branches {0} and {1} are the same sequence")]
    IndistinguishableBranches(usize, usize),
    #[error("split index {0} is out of range")]
    InvalidSplit(usize),
    #[error("invalid branch: {0}")]
    InvalidBranch(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// The Boolean algebra an antichain and its witnesses live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Carrier {
    /// The free algebra on tree-indexed generators modulo the prefix kernel.
    TreeQuotient,
    /// All subsets of ℕ (eventually periodic ones and lazy unions).
    PowerSet,
    /// Sets that are pair-closed from some point on.
    PairAlgebra,
}

/// `{start + j·step}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Progression {
    pub start: usize,
    pub step: usize,
}

impl Progression {
    pub fn contains(&self, n: usize) -> bool {
        n >= self.start && (n - self.start).is_multiple_of(self.step)
    }

    pub fn to_ep_set(&self) -> EpSet {
        EpSet::progression(self.start, self.step).expect("step is positive")
    }
}

impl Default for Progression {
    /// Even depths from 2 on.
    fn default() -> Self {
        Progression { start: 2, step: 2 }
    }
}

/// An eventually periodic infinite branch `x ∈ 2^ℕ` together with the depths
/// whose prefixes `x|k` make up `A_x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BranchSelection {
    prefix: Vec<bool>,
    period: Vec<bool>,
    selected: Progression,
}

impl BranchSelection {
    /// The antichain starts at depth 1, so `selected.start ≥ 1`;
    /// `selected.step ≥ 2` leaves infinitely many depths out.
    pub fn new(prefix: Vec<bool>, period: Vec<bool>, selected: Progression) -> Result<Self, SeparationError> {
        if period.is_empty() {
            return Err(SeparationError::InvalidBranch("empty period".into()));
        }
        if selected.start == 0 {
            return Err(SeparationError::InvalidBranch("selected depths start at 1 or later".into()));
        }
        if selected.step < 2 {
            return Err(SeparationError::InvalidBranch(format!(
                "selected depths step {} leaves only finitely many depths out",
                selected.step
            )));
        }
        Ok(BranchSelection { prefix, period, selected })
    }

    pub fn with_default_depths(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self, SeparationError> {
        Self::new(prefix, period, Progression::default())
    }

    /// Parses `prefix` and `period` given as bit strings.
    pub fn parse(prefix: &str, period: &str, selected: Progression) -> Result<Self, SeparationError> {
        let bits = |s: &str| {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(SeparationError::InvalidBranch(format!("bit string `{s}`"))),
                })
                .collect::<Result<Vec<bool>, _>>()
        };
        Self::new(bits(prefix)?, bits(period)?, selected)
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn selected(&self) -> Progression {
        self.selected
    }

    pub fn bit(&self, i: usize) -> bool {
        match self.prefix.get(i) {
            Some(&b) => b,
            None => self.period[(i - self.prefix.len()) % self.period.len()],
        }
    }

    /// The node `x|m`.
    pub fn truncate(&self, m: usize) -> Result<TreeNode, SeparationError> {
        if m > MAX_DEPTH {
            return Err(SeparationError::InvalidBranch(format!("depth {m} exceeds {MAX_DEPTH}")));
        }
        let bits: Vec<bool> = (0..m).map(|i| self.bit(i)).collect();
        Ok(TreeNode::from_bits(&bits)?)
    }

    /// The first position where the two sequences differ.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let window = self.prefix.len().max(other.prefix.len())
            + lcm(self.period.len(), other.period.len());
        (0..window).find(|&i| self.bit(i) != other.bit(i))
    }

    pub fn is_selected(&self, depth: usize) -> bool {
        self.selected.contains(depth)
    }

    pub fn selected_depths(&self) -> EpSet {
        self.selected.to_ep_set()
    }

    /// Depths at or beyond the first selected depth that are not selected.
    pub fn rejected_depths(&self) -> EpSet {
        let s = self.selected;
        EpSet::from_fn(s.start, s.step, |d| d >= s.start && !s.contains(d))
    }
}

#[derive(Serialize, Deserialize)]
struct BranchRepr {
    prefix: String,
    period: String,
    #[serde(default)]
    selected: Progression,
}

impl Serialize for BranchSelection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect();
        BranchRepr { prefix: bits(&self.prefix), period: bits(&self.period), selected: self.selected }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BranchSelection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = BranchRepr::deserialize(d)?;
        BranchSelection::parse(&r.prefix, &r.period, r.selected).map_err(serde::de::Error::custom)
    }
}

/// `A_x`: the join of `A_{x|k}` over the selected depths `k`, realized in the
/// antichain-point model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BranchJoin {
    branch: BranchSelection,
}

impl BranchJoin {
    pub fn branch(&self) -> &BranchSelection {
        &self.branch
    }

    /// `W ∈ A_x` iff some member of `W` is `x|k` for a selected `k`.
    pub fn contains_point(&self, w: &AntichainPoint) -> bool {
        w.nodes().iter().any(|node| {
            let k = node.depth();
            self.branch.is_selected(k)
                && self.branch.truncate(k).map(|p| p == *node).unwrap_or(false)
        })
    }

    /// The finite join over the selected depths up to and including the first
    /// selected depth beyond `max_depth`. For any element whose nodes have
    /// depth at most `max_depth`, order and disjointness against this join
    /// coincide with those against `A_x`: deeper selected prefixes all behave
    /// like the first one.
    pub fn truncated(&self, max_depth: usize) -> Result<Dnf<TreeNode>, SeparationError> {
        let last = self
            .branch
            .selected_depths()
            .next_at_or_after(max_depth + 1)
            .expect("selected depths are infinite");
        let conjuncts = (0..=last)
            .filter(|&k| self.branch.is_selected(k))
            .map(|k| Ok(Conjunction::new([self.branch.truncate(k)?], [])))
            .collect::<Result<Vec<_>, SeparationError>>()?;
        Ok(Dnf::from_conjunctions(conjuncts))
    }

    /// The separation witness for the branch antichain: `M1` the selected
    /// depths, `M0` the rejected ones.
    pub fn wssp_witness(&self) -> SeparationWitness {
        SeparationWitness::new(
            Element::BranchJoin(self.clone()),
            Carrier::TreeQuotient,
            self.branch.selected_depths(),
            self.branch.rejected_depths(),
        )
        .expect("progressions with step ≥ 2 give disjoint infinite sets")
    }
}

/// `A_x` for the branch.
pub fn construct_a_x(b: &BranchSelection) -> BranchJoin {
    BranchJoin { branch: b.clone() }
}

/// An element of one of the supported carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Element {
    Tree(Dnf<TreeNode>),
    BranchJoin(BranchJoin),
    Set(EpSet),
    Union(LazyPairUnion),
}

impl Element {
    fn as_set(&self) -> Option<EpSet> {
        match self {
            Element::Set(s) => Some(s.clone()),
            Element::Union(u) => Some(u.to_ep_set()),
            _ => None,
        }
    }

    fn is_in(&self, carrier: Carrier) -> bool {
        match (carrier, self) {
            (Carrier::TreeQuotient, Element::Tree(_) | Element::BranchJoin(_)) => true,
            (Carrier::PowerSet, Element::Set(_) | Element::Union(_)) => true,
            (Carrier::PairAlgebra, Element::Set(s)) => in_pair_algebra(s).is_some(),
            (Carrier::PairAlgebra, Element::Union(u)) => in_pair_algebra(&u.to_ep_set()).is_some(),
            _ => false,
        }
    }
}

fn max_node_depth(d: &Dnf<TreeNode>) -> usize {
    d.generators().iter().map(TreeNode::depth).max().unwrap_or(0)
}

fn tree_side(a: &Element, b: &Element) -> Result<(Dnf<TreeNode>, Dnf<TreeNode>), SeparationError> {
    let lhs = match a {
        Element::Tree(d) => d.clone(),
        other => {
            return Err(SeparationError::CarrierMismatch(format!(
                "left operand {other:?} is not a finite tree element"
            )))
        }
    };
    let rhs = match b {
        Element::Tree(d) => d.clone(),
        Element::BranchJoin(j) => j.truncated(max_node_depth(&lhs))?,
        other => {
            return Err(SeparationError::CarrierMismatch(format!(
                "{other:?} is not a tree-quotient element"
            )))
        }
    };
    Ok((lhs, rhs))
}

fn set_side(a: &Element) -> Result<EpSet, SeparationError> {
    a.as_set().ok_or_else(|| {
        SeparationError::CarrierMismatch(format!("{a:?} is not a set element"))
    })
}

/// `a ≤ b` in the carrier.
pub fn leq(carrier: Carrier, a: &Element, b: &Element) -> Result<bool, SeparationError> {
    match carrier {
        Carrier::TreeQuotient => {
            let (lhs, rhs) = tree_side(a, b)?;
            Ok(is_zero_mod_kernel(&lhs.meet(&rhs.complement())))
        }
        Carrier::PowerSet | Carrier::PairAlgebra => {
            let lhs = set_side(a)?;
            if lhs.is_infinite() {
                return Ok(lhs.is_subset(&set_side(b)?));
            }
            Ok(lhs.iter().all(|x| element_contains(b, x)))
        }
    }
}

/// `a ∧ b = 0` in the carrier.
pub fn disjoint(carrier: Carrier, a: &Element, b: &Element) -> Result<bool, SeparationError> {
    match carrier {
        Carrier::TreeQuotient => {
            let (lhs, rhs) = tree_side(a, b)?;
            Ok(is_zero_mod_kernel(&lhs.meet(&rhs)))
        }
        Carrier::PowerSet | Carrier::PairAlgebra => {
            let lhs = set_side(a)?;
            if lhs.is_infinite() {
                return Ok(lhs.is_disjoint(&set_side(b)?));
            }
            Ok(!lhs.iter().any(|x| element_contains(b, x)))
        }
    }
}

fn element_contains(e: &Element, x: usize) -> bool {
    match e {
        Element::Set(s) => s.contains(x),
        Element::Union(u) => u.contains(x),
        _ => false,
    }
}

/// How pairwise disjointness of a presented antichain is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisjointnessCertificate {
    /// Prefixes of one branch are comparable, so their meets lie in the kernel.
    BranchPrefixes,
    /// Components occupy non-overlapping blocks.
    BlockWindows,
    /// Every pair of the finite list was checked.
    CheckedPairs { count: usize },
}

/// A countable antichain, materialized up to a horizon or given by a schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PresentedAntichain {
    /// `A_n = A_{x|n}` for `1 ≤ n ≤ horizon`.
    Branch { branch: BranchSelection, horizon: usize },
    /// An explicit finite list of tree-quotient elements.
    TreeList(Vec<Dnf<TreeNode>>),
    /// An explicit finite list of sets.
    SetList { carrier: Carrier, elements: Vec<EpSet> },
    /// An infinite block schema.
    Blocks { carrier: Carrier, schema: BlockSchema },
}

impl PresentedAntichain {
    pub fn tree_list(elements: Vec<Dnf<TreeNode>>) -> Result<Self, SeparationError> {
        for i in 0..elements.len() {
            for j in i + 1..elements.len() {
                if !is_zero_mod_kernel(&elements[i].meet(&elements[j])) {
                    return Err(SeparationError::NotAntichain(i, j));
                }
            }
        }
        Ok(PresentedAntichain::TreeList(elements))
    }

    pub fn set_list(carrier: Carrier, elements: Vec<EpSet>) -> Result<Self, SeparationError> {
        if carrier == Carrier::TreeQuotient {
            return Err(SeparationError::CarrierMismatch("sets in the tree quotient".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            if !Element::Set(e.clone()).is_in(carrier) {
                return Err(SeparationError::NotInCarrier(carrier));
            }
            for (j, f) in elements.iter().enumerate().skip(i + 1) {
                if !e.is_disjoint(f) {
                    return Err(SeparationError::NotAntichain(i, j));
                }
            }
        }
        Ok(PresentedAntichain::SetList { carrier, elements })
    }

    pub fn blocks(carrier: Carrier, schema: BlockSchema) -> Result<Self, SeparationError> {
        if carrier == Carrier::TreeQuotient {
            return Err(SeparationError::CarrierMismatch("blocks in the tree quotient".into()));
        }
        Ok(PresentedAntichain::Blocks { carrier, schema })
    }

    pub fn carrier(&self) -> Carrier {
        match self {
            PresentedAntichain::Branch { .. } | PresentedAntichain::TreeList(_) => {
                Carrier::TreeQuotient
            }
            PresentedAntichain::SetList { carrier, .. }
            | PresentedAntichain::Blocks { carrier, .. } => *carrier,
        }
    }

    pub fn certificate(&self) -> DisjointnessCertificate {
        match self {
            PresentedAntichain::Branch { .. } => DisjointnessCertificate::BranchPrefixes,
            PresentedAntichain::Blocks { .. } => DisjointnessCertificate::BlockWindows,
            PresentedAntichain::TreeList(v) => {
                DisjointnessCertificate::CheckedPairs { count: v.len() * v.len().saturating_sub(1) / 2 }
            }
            PresentedAntichain::SetList { elements, .. } => DisjointnessCertificate::CheckedPairs {
                count: elements.len() * elements.len().saturating_sub(1) / 2,
            },
        }
    }

    pub fn element(&self, n: usize) -> Result<Element, SeparationError> {
        match self {
            PresentedAntichain::Branch { branch, horizon } => {
                if n == 0 || n > *horizon {
                    return Err(SeparationError::IndexNotPresented(n));
                }
                Ok(Element::Tree(Conjunction::new([branch.truncate(n)?], []).into()))
            }
            PresentedAntichain::TreeList(v) => v
                .get(n)
                .cloned()
                .map(Element::Tree)
                .ok_or(SeparationError::IndexNotPresented(n)),
            PresentedAntichain::SetList { elements, .. } => elements
                .get(n)
                .cloned()
                .map(Element::Set)
                .ok_or(SeparationError::IndexNotPresented(n)),
            PresentedAntichain::Blocks { schema, .. } => Ok(Element::Set(schema.component(n))),
        }
    }

    /// Element `n` as a set, for set carriers.
    pub fn set_element(&self, n: usize) -> Result<EpSet, SeparationError> {
        match self.element(n)? {
            Element::Set(s) => Ok(s),
            other => Err(SeparationError::CarrierMismatch(format!("{other:?} is not a set"))),
        }
    }

    /// Indices materialized below `horizon`.
    pub fn indices_below(&self, horizon: usize) -> Vec<usize> {
        (0..horizon).filter(|&n| self.element(n).is_ok()).collect()
    }
}

/// The antichain `{A_{x|n} : 1 ≤ n ≤ horizon}` of a branch.
pub fn branch_antichain(b: &BranchSelection, horizon: usize) -> PresentedAntichain {
    PresentedAntichain::Branch { branch: b.clone(), horizon }
}

/// An element `A` with index sets `M1 ⊆ {n : A_n ≤ A}` and
/// `M0 ⊆ {n : A_n ∧ A = 0}`, both certified infinite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationWitness {
    element: Element,
    carrier: Carrier,
    below: EpSet,
    disjoint: EpSet,
}

impl SeparationWitness {
    pub fn new(
        element: Element,
        carrier: Carrier,
        below: EpSet,
        disjoint: EpSet,
    ) -> Result<Self, SeparationError> {
        if !below.is_infinite() {
            return Err(SeparationError::NotInfinite("M1"));
        }
        if !disjoint.is_infinite() {
            return Err(SeparationError::NotInfinite("M0"));
        }
        if !below.is_disjoint(&disjoint) {
            return Err(SeparationError::OverlappingIndexSets);
        }
        Ok(SeparationWitness { element, carrier, below, disjoint })
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    /// `M1`.
    pub fn below(&self) -> &EpSet {
        &self.below
    }

    /// `M0`.
    pub fn disjoint(&self) -> &EpSet {
        &self.disjoint
    }
}

/// An element `A` and an infinite index set `N` with `A_{2n} ≤ A` and
/// `A_{2n+1} ∧ A = 0` for `n ∈ N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SspWitness {
    element: Element,
    carrier: Carrier,
    indices: EpSet,
}

impl SspWitness {
    pub fn new(element: Element, carrier: Carrier, indices: EpSet) -> Result<Self, SeparationError> {
        if !indices.is_infinite() {
            return Err(SeparationError::NotInfinite("N"));
        }
        Ok(SspWitness { element, carrier, indices })
    }

    pub fn indices(&self) -> &EpSet {
        &self.indices
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    /// The same element read as a weak witness: `M1 = 2N`, `M0 = 2N + 1`.
    pub fn to_wssp(&self) -> SeparationWitness {
        SeparationWitness::new(
            self.element.clone(),
            self.carrier,
            self.indices.affine_image(2, 0),
            self.indices.affine_image(2, 1),
        )
        .expect("images of an infinite set under n ↦ 2n, 2n+1 are infinite and disjoint")
    }
}

fn check_carrier(ac: &PresentedAntichain, carrier: Carrier, e: &Element) -> Result<(), SeparationError> {
    if ac.carrier() != carrier {
        return Err(SeparationError::CarrierMismatch(format!(
            "antichain in {:?}, witness in {carrier:?}",
            ac.carrier()
        )));
    }
    if !e.is_in(carrier) {
        return Err(SeparationError::NotInCarrier(carrier));
    }
    Ok(())
}

/// Checks `A_n ≤ A` for `n ∈ M1` and `A_n ∧ A = 0` for `n ∈ M0`, for every
/// index below `horizon`.
pub fn check_wssp_witness(
    ac: &PresentedAntichain,
    w: &SeparationWitness,
    horizon: usize,
) -> Result<bool, SeparationError> {
    check_carrier(ac, w.carrier, &w.element)?;
    for n in w.below.elements_below(horizon) {
        if !leq(w.carrier, &ac.element(n)?, &w.element)? {
            return Ok(false);
        }
    }
    for n in w.disjoint.elements_below(horizon) {
        if !disjoint(w.carrier, &ac.element(n)?, &w.element)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `A_{2n} ≤ A` and `A_{2n+1} ∧ A = 0` for every `n ∈ N` with
/// `2n + 1 < horizon`.
pub fn check_ssp_witness(
    ac: &PresentedAntichain,
    w: &SspWitness,
    horizon: usize,
) -> Result<bool, SeparationError> {
    check_carrier(ac, w.carrier, &w.element)?;
    for n in w.indices.elements_below(horizon / 2) {
        if 2 * n + 1 >= horizon {
            break;
        }
        if !leq(w.carrier, &ac.element(2 * n)?, &w.element)?
            || !disjoint(w.carrier, &ac.element(2 * n + 1)?, &w.element)?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `sup` bounds `{A_n : n ∈ M}` below `horizon` and equals the
/// union of that subfamily, the least upper bound in a power set.
pub fn check_scp_witness(
    ac: &PresentedAntichain,
    m: &EpSet,
    sup: &Element,
    horizon: usize,
) -> Result<bool, SeparationError> {
    let schema = match ac {
        PresentedAntichain::Blocks { carrier: Carrier::PowerSet, schema } => schema,
        other => return Err(SeparationError::UnsupportedCarrier(other.carrier())),
    };
    if !m.is_infinite() {
        return Err(SeparationError::NotInfinite("M"));
    }
    check_carrier(ac, Carrier::PowerSet, sup)?;
    for n in m.elements_below(horizon) {
        if !leq(Carrier::PowerSet, &ac.element(n)?, sup)? {
            return Ok(false);
        }
    }
    let canonical = LazyPairUnion::new(schema.clone(), m.clone(), false);
    Ok(set_side(sup)? == canonical.to_ep_set())
}

/// Outcome of the checks on an independence witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndependenceChecks {
    /// The witness nodes are pairwise prefix-incomparable.
    pub antichain: bool,
    /// The witness lies in `A_{x_i}` for every `i ∈ F`.
    pub inside_f: bool,
    /// The witness lies outside `A_{x_i}` for every `i ∈ G`.
    pub outside_g: bool,
    /// The meet of the chosen generators is nonzero by the decision procedure.
    pub nonzero_decision: bool,
    /// ... and by the brute-force oracle.
    pub nonzero_oracle: bool,
}

impl IndependenceChecks {
    pub fn all(&self) -> bool {
        self.antichain && self.inside_f && self.outside_g && self.nonzero_decision && self.nonzero_oracle
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    /// `{x_i | m_i}`, sorted.
    pub witness: Vec<TreeNode>,
    /// The least `m` at which all `x_i | m` are distinct.
    pub common_depth: usize,
    /// `m_i` per branch.
    pub depths: Vec<usize>,
    pub checks: IndependenceChecks,
    pub verified: bool,
}

/// Builds the point witnessing `⋀_{i∈F} A_{x_i} ∧ ⋀_{i∉F} A_{x_i}ᶜ ≠ 0`.
///
/// With `m` the first depth at which the branches are pairwise distinct,
/// branch `i ∈ F` contributes `x_i | m_i` for the least selected `m_i ≥ m`
/// and branch `i ∉ F` the least rejected one.
pub fn independence_meet(
    branches: &[BranchSelection],
    f: &BTreeSet<usize>,
    brute_bound: usize,
) -> Result<IndependenceReport, SeparationError> {
    if let Some(&bad) = f.iter().find(|&&i| i >= branches.len()) {
        return Err(SeparationError::InvalidSplit(bad));
    }
    let mut common_depth = 0;
    for i in 0..branches.len() {
        for j in i + 1..branches.len() {
            let d = branches[i]
                .first_difference(&branches[j])
                .ok_or(SeparationError::IndistinguishableBranches(i, j))?;
            common_depth = common_depth.max(d + 1);
        }
    }

    let depths: Vec<usize> = branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let admissible = if f.contains(&i) { b.selected_depths() } else { b.rejected_depths() };
            admissible.next_at_or_after(common_depth).expect("admissible depths are infinite")
        })
        .collect();
    let nodes = branches
        .iter()
        .zip(&depths)
        .map(|(b, &m)| b.truncate(m))
        .collect::<Result<Vec<TreeNode>, _>>()?;

    let point = AntichainPoint::new(nodes.iter().copied());
    let antichain = point.is_ok();
    let point = point.unwrap_or_default();
    let joins: Vec<BranchJoin> = branches.iter().map(construct_a_x).collect();
    let inside_f = antichain && f.iter().all(|&i| joins[i].contains_point(&point));
    let outside_g = antichain
        && (0..branches.len()).filter(|i| !f.contains(i)).all(|i| !joins[i].contains_point(&point));

    let meet: Dnf<TreeNode> = Conjunction::new(nodes.iter().copied(), []).into();
    let nonzero_decision = !is_zero_mod_kernel(&meet);
    let gens: BTreeSet<TreeNode> = nodes.iter().copied().collect();
    let nonzero_oracle = !brute_force_zero_mod_kernel(&meet, &gens, brute_bound)?;

    let checks = IndependenceChecks { antichain, inside_f, outside_g, nonzero_decision, nonzero_oracle };
    let mut witness = nodes;
    witness.sort();
    Ok(IndependenceReport { witness, common_depth, depths, checks, verified: checks.all() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::DEFAULT_BRUTE_BOUND;

    fn branch(prefix: &str, period: &str) -> BranchSelection {
        BranchSelection::parse(prefix, period, Progression::default()).unwrap()
    }

    fn n(s: &str) -> TreeNode {
        s.parse().unwrap()
    }

    #[test]
    fn branch_antichain_materializes_prefixes() {
        let ac = branch_antichain(&branch("", "0"), 3);
        let got: Vec<Element> = (1..=3).map(|i| ac.element(i).unwrap()).collect();
        let want: Vec<Element> = ["0", "00", "000"]
            .iter()
            .map(|s| Element::Tree(Conjunction::new([n(s)], []).into()))
            .collect();
        assert_eq!(got, want);
        assert_eq!(ac.element(0), Err(SeparationError::IndexNotPresented(0)));
        assert_eq!(ac.element(4), Err(SeparationError::IndexNotPresented(4)));

        let ac = branch_antichain(&branch("", "01"), 2);
        assert_eq!(ac.element(2).unwrap(), Element::Tree(Conjunction::new([n("01")], []).into()));
    }

    #[test]
    fn branch_antichain_is_disjoint_mod_kernel() {
        let ac = branch_antichain(&branch("1", "10"), 6);
        for i in 1..=6 {
            for j in i + 1..=6 {
                let (a, b) = (ac.element(i).unwrap(), ac.element(j).unwrap());
                assert!(disjoint(Carrier::TreeQuotient, &a, &b).unwrap(), "{i} {j}");
            }
        }
    }

    #[test]
    fn a_x_point_membership() {
        let a = construct_a_x(&branch("", "0"));
        let pt = |nodes: &[&str]| AntichainPoint::new(nodes.iter().map(|s| n(s))).unwrap();
        assert!(a.contains_point(&pt(&["00"])));
        assert!(!a.contains_point(&pt(&["000"])));
        assert!(!a.contains_point(&pt(&["0"])));
        assert!(a.contains_point(&pt(&["0000", "1"])));
    }

    #[test]
    fn wssp_on_branch() {
        let b = branch("", "0");
        let ac = branch_antichain(&b, 12);
        let a = construct_a_x(&b);
        assert!(check_wssp_witness(&ac, &a.wssp_witness(), 12).unwrap());

        let odds = EpSet::progression(1, 2).unwrap();
        let evens = EpSet::progression(2, 2).unwrap();
        let w = SeparationWitness::new(Element::BranchJoin(a.clone()), Carrier::TreeQuotient, evens, odds.clone())
            .unwrap();
        assert!(check_wssp_witness(&ac, &w, 12).unwrap());

        // an odd index claimed below A
        let bad_below = EpSet::progression(2, 2).unwrap().union(&EpSet::finite([3]));
        let w = SeparationWitness::new(
            Element::BranchJoin(a),
            Carrier::TreeQuotient,
            bad_below,
            EpSet::progression(5, 2).unwrap(),
        )
        .unwrap();
        assert!(!check_wssp_witness(&ac, &w, 12).unwrap());
    }

    #[test]
    fn witness_validation() {
        let e = Element::Set(EpSet::empty());
        assert_eq!(
            SeparationWitness::new(e.clone(), Carrier::PowerSet, EpSet::finite([0]), EpSet::full()),
            Err(SeparationError::NotInfinite("M1"))
        );
        assert_eq!(
            SeparationWitness::new(e, Carrier::PowerSet, EpSet::full(), EpSet::progression(0, 2).unwrap()),
            Err(SeparationError::OverlappingIndexSets)
        );
    }

    #[test]
    fn carrier_mismatch() {
        let b = branch("", "0");
        let ac = branch_antichain(&b, 4);
        let w = SeparationWitness::new(
            Element::Set(EpSet::full()),
            Carrier::PowerSet,
            EpSet::progression(0, 2).unwrap(),
            EpSet::progression(1, 2).unwrap(),
        )
        .unwrap();
        assert!(matches!(check_wssp_witness(&ac, &w, 4), Err(SeparationError::CarrierMismatch(_))));
    }

    #[test]
    fn ssp_on_branch() {
        let b = branch("", "1");
        let ac = branch_antichain(&b, 21);
        // join of the even-indexed prefixes, N = {n ≥ 1}
        let a = construct_a_x(&b);
        let w = SspWitness::new(Element::BranchJoin(a), Carrier::TreeQuotient, EpSet::progression(1, 1).unwrap())
            .unwrap();
        assert!(check_ssp_witness(&ac, &w, 21).unwrap());
        assert!(check_wssp_witness(&ac, &w.to_wssp(), 21).unwrap());

        // the top element is disjoint from nothing nonzero
        let top = SspWitness::new(
            Element::Tree(Dnf::one()),
            Carrier::TreeQuotient,
            EpSet::progression(1, 1).unwrap(),
        )
        .unwrap();
        assert!(!check_ssp_witness(&ac, &top, 21).unwrap());
    }

    #[test]
    fn scp_in_power_set() {
        let schema = BlockSchema::full(0, 3, 2).unwrap();
        let ac = PresentedAntichain::blocks(Carrier::PowerSet, schema.clone()).unwrap();
        let evens = EpSet::progression(0, 2).unwrap();
        let sup = Element::Union(LazyPairUnion::new(schema.clone(), evens.clone(), false));
        assert!(check_scp_witness(&ac, &evens, &sup, 40).unwrap());

        let missing = Element::Set(LazyPairUnion::new(schema, evens.clone(), false).to_ep_set().difference(&EpSet::finite([6, 7])));
        assert!(!check_scp_witness(&ac, &evens, &missing, 40).unwrap());

        let tree = branch_antichain(&branch("", "0"), 4);
        assert_eq!(
            check_scp_witness(&tree, &evens, &sup, 4),
            Err(SeparationError::UnsupportedCarrier(Carrier::TreeQuotient))
        );
    }

    #[test]
    fn independence_two_constant_branches() {
        let branches = [branch("", "0"), branch("", "1")];
        let report = independence_meet(&branches, &BTreeSet::from([0]), DEFAULT_BRUTE_BOUND).unwrap();
        assert_eq!(report.common_depth, 1);
        assert_eq!(report.depths, vec![2, 3]);
        assert_eq!(report.witness, vec![n("00"), n("111")]);
        assert!(report.verified);
    }

    #[test]
    fn independence_all_in_f() {
        let branches = [branch("", "0"), branch("0", "1"), branch("", "10"), branch("11", "0")];
        let report =
            independence_meet(&branches, &(0..4).collect(), DEFAULT_BRUTE_BOUND).unwrap();
        assert!(report.verified);
        assert!(report.depths.iter().all(|d| d % 2 == 0));
    }

    #[test]
    fn independence_rejects_equal_branches() {
        // 0101... written two ways
        let branches = [branch("", "01"), branch("01", "0101")];
        assert_eq!(
            independence_meet(&branches, &BTreeSet::new(), DEFAULT_BRUTE_BOUND),
            Err(SeparationError::IndistinguishableBranches(0, 1))
        );
        assert_eq!(
            independence_meet(&branches[..1], &BTreeSet::from([3]), DEFAULT_BRUTE_BOUND),
            Err(SeparationError::InvalidSplit(3))
        );
    }

    #[test]
    fn branch_json() {
        let b: BranchSelection =
            serde_json::from_str(r#"{"prefix":"010","period":"01","selected":{"start":2,"step":2}}"#).unwrap();
        assert_eq!(b.truncate(5).unwrap(), n("01001"));
        let b: BranchSelection = serde_json::from_str(r#"{"prefix":"","period":"1"}"#).unwrap();
        assert_eq!(b.selected(), Progression::default());
        assert!(serde_json::from_str::<BranchSelection>(r#"{"prefix":"","period":""}"#).is_err());
        assert!(serde_json::from_str::<BranchSelection>(
            r#"{"prefix":"","period":"1","selected":{"start":0,"step":1}}"#
        )
        .is_err());
    }
}
