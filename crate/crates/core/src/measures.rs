//! Finite-support finitely additive signed measures on subsets of ℕ, greedy
//! thinning of measure/antichain pairs, the even/odd union witness of
//! non-convergence, and the inequalities behind positive decompositions.
//!
//! Everything is generic over [`Scalar`]; strict inequalities are only
//! meaningful with an exact instantiation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ep::{EpSet, Membership};
use crate::scalar::Scalar;
use crate::separation::{Element, PresentedAntichain, SeparationError, SeparationWitness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("|μ_{index}(A_{index})| = {value} does not exceed ε")]
    HypothesisViolation { index: usize, value: String },
    #[error("thinning kept {0} indices; at least 2 are needed")]
    EmptySelection(usize),
    #[error("measure index {0} is not presented")]
    IndexNotPresented(usize),
    #[error("ε and η must be positive")]
    NonPositive,
    #[error("alternation bound fails at selected index {index}")]
    VerificationFailure { index: usize },
    #[error("decomposition fails at index {index}: {clause}")]
    Decomposition { index: usize, clause: Clause },
    #[error("witness element is inconsistent with B_{index} ({reason})")]
    WitnessMismatch { index: usize, reason: &'static str },
    #[error("witness element is not a set")]
    NotASet,
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

/// A finitely additive signed measure with finitely many atoms; zero weights
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FasMeasure<S> {
    atoms: BTreeMap<usize, S>,
}

impl<S: Scalar> FasMeasure<S> {
    /// Sums repeated atoms and drops zero weights.
    pub fn new<I: IntoIterator<Item = (usize, S)>>(atoms: I) -> Self {
        let mut map: BTreeMap<usize, S> = BTreeMap::new();
        for (i, w) in atoms {
            let slot = map.entry(i).or_insert_with(S::zero);
            *slot = slot.clone() + w;
        }
        map.retain(|_, w| !w.is_zero());
        FasMeasure { atoms: map }
    }

    pub fn zero() -> Self {
        FasMeasure { atoms: BTreeMap::new() }
    }

    pub fn dirac(i: usize) -> Self {
        Self::new([(i, S::one())])
    }

    /// `δ_{2n} − δ_{2n+1}`.
    pub fn pair_difference(n: usize) -> Self {
        Self::new([(2 * n, S::one()), (2 * n + 1, -S::one())])
    }

    pub fn atoms(&self) -> &BTreeMap<usize, S> {
        &self.atoms
    }

    pub fn weight(&self, i: usize) -> S {
        self.atoms.get(&i).cloned().unwrap_or_else(S::zero)
    }

    pub fn eval(&self, a: &impl Membership) -> S {
        self.atoms
            .iter()
            .filter(|(&i, _)| a.contains(i))
            .fold(S::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// The value on the top element.
    pub fn total_mass(&self) -> S {
        self.atoms.values().fold(S::zero(), |acc, w| acc + w.clone())
    }

    pub fn variation(&self) -> S {
        self.atoms.values().fold(S::zero(), |acc, w| acc + w.abs())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.values().all(|w| !w.is_negative())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.atoms.iter().map(|(&i, w)| (i, w.clone() * c.clone())))
    }
}

impl<S: Scalar> Add for &FasMeasure<S> {
    type Output = FasMeasure<S>;

    fn add(self, rhs: Self) -> FasMeasure<S> {
        FasMeasure::new(self.atoms.iter().chain(&rhs.atoms).map(|(&i, w)| (i, w.clone())))
    }
}

impl<S: Scalar> Neg for &FasMeasure<S> {
    type Output = FasMeasure<S>;

    fn neg(self) -> FasMeasure<S> {
        FasMeasure::new(self.atoms.iter().map(|(&i, w)| (i, -w.clone())))
    }
}

impl<S: Scalar> Sub for &FasMeasure<S> {
    type Output = FasMeasure<S>;

    fn sub(self, rhs: Self) -> FasMeasure<S> {
        self + &-rhs
    }
}

impl<S: Scalar> fmt::Display for FasMeasure<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, w)) in self.atoms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({w})δ{i}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<(usize, i64, i64)>,
}

impl Serialize for FasMeasure<BigRational> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        let atoms = self
            .atoms
            .iter()
            .map(|(&i, w)| match (w.numer().to_i64(), w.denom().to_i64()) {
                (Some(n), Some(d)) => Ok((i, n, d)),
                _ => Err(serde::ser::Error::custom(format!("weight at atom {i} exceeds 64 bits"))),
            })
            .collect::<Result<Vec<_>, Ser::Error>>()?;
        MeasureRepr { atoms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FasMeasure<BigRational> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        let atoms = repr
            .atoms
            .into_iter()
            .map(|(i, num, den)| {
                if den == 0 {
                    Err(serde::de::Error::custom(format!("zero denominator at atom {i}")))
                } else {
                    Ok((i, BigRational::from_ratio(num, den)))
                }
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        Ok(FasMeasure::new(atoms))
    }
}

/// `μ(A)`.
pub fn measure_eval<S: Scalar>(mu: &FasMeasure<S>, a: &impl Membership) -> S {
    mu.eval(a)
}

/// A sequence of measures materialized on demand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(
    rename_all = "kebab-case",
    bound(serialize = "FasMeasure<S>: Serialize", deserialize = "FasMeasure<S>: Deserialize<'de>")
)]
pub enum MeasureFamily<S> {
    Explicit(Vec<FasMeasure<S>>),
    /// `n ↦ δ_{2n} − δ_{2n+1}`.
    PairDifference,
}

impl<S: Scalar> MeasureFamily<S> {
    pub fn measure(&self, n: usize) -> Result<FasMeasure<S>, MeasureError> {
        match self {
            MeasureFamily::Explicit(v) => v.get(n).cloned().ok_or(MeasureError::IndexNotPresented(n)),
            MeasureFamily::PairDifference => Ok(FasMeasure::pair_difference(n)),
        }
    }

    /// A uniform bound on the variation norms.
    pub fn variation_bound(&self) -> S {
        match self {
            MeasureFamily::Explicit(v) => v
                .iter()
                .map(FasMeasure::variation)
                .fold(S::zero(), |acc, x| if x > acc { x } else { acc }),
            MeasureFamily::PairDifference => S::from_int(2),
        }
    }
}

fn third<S: Scalar>(x: &S) -> S {
    x.clone() / S::from_int(3)
}

/// Output of [`rosenthal_thin`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thinning<S> {
    /// Selected indices, ascending.
    pub selected: Vec<usize>,
    /// `Σ_{n ∈ selected, n ≠ k} |μ_k(A_n)|` for each selected `k`.
    pub cross_sums: Vec<S>,
    /// `ε / 3`.
    pub bound: S,
}

/// Greedy thinning: ascending over `[0, horizon)`, an index is kept iff
/// every cross-sum over the kept indices, including its own, stays below
/// `ε/3`.
pub fn rosenthal_thin<S: Scalar>(
    fam: &MeasureFamily<S>,
    ac: &PresentedAntichain,
    eps: &S,
    horizon: usize,
) -> Result<Thinning<S>, MeasureError> {
    if !eps.is_positive() {
        return Err(MeasureError::NonPositive);
    }
    let measures = (0..horizon).map(|k| fam.measure(k)).collect::<Result<Vec<_>, _>>()?;
    let sets = (0..horizon).map(|n| ac.set_element(n)).collect::<Result<Vec<_>, _>>()?;
    for (k, mu) in measures.iter().enumerate() {
        let diagonal = mu.eval(&sets[k]);
        if diagonal.abs() <= *eps {
            return Err(MeasureError::HypothesisViolation { index: k, value: diagonal.to_string() });
        }
    }
    let cross = |k: usize, n: usize| measures[k].eval(&sets[n]).abs();
    let bound = third(eps);

    let mut selected: Vec<usize> = Vec::new();
    let mut sums: Vec<S> = Vec::new();
    for c in 0..horizon {
        let own = selected.iter().fold(S::zero(), |acc, &n| acc + cross(c, n));
        if own >= bound {
            continue;
        }
        let grown: Vec<S> = selected.iter().zip(&sums).map(|(&k, s)| s.clone() + cross(k, c)).collect();
        if grown.iter().any(|s| *s >= bound) {
            continue;
        }
        selected.push(c);
        sums = grown;
        sums.push(own);
    }
    if selected.len() < 2 {
        return Err(MeasureError::EmptySelection(selected.len()));
    }
    Ok(Thinning { selected, cross_sums: sums, bound })
}

/// One selected index of an alternation report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternationRow<S> {
    pub index: usize,
    /// Rank within the selection.
    pub position: usize,
    /// `μ_k(A)`.
    pub value: S,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternationReport<S> {
    pub rows: Vec<AlternationRow<S>>,
    /// `2ε/3`, exceeded by `|μ_k(A)|` at even positions.
    pub lower: S,
    /// `ε/3`, bounding `|μ_k(A)|` at odd positions.
    pub upper: S,
    /// Least even-position value minus greatest odd-position value, in
    /// absolute terms.
    pub gap: S,
}

/// `A` is the union of the antichain members at even positions of
/// `selected`; checks `|μ_k(A)| > 2ε/3` at even and `< ε/3` at odd
/// positions.
pub fn alternation_witness<S: Scalar>(
    fam: &MeasureFamily<S>,
    ac: &PresentedAntichain,
    eps: &S,
    selected: &[usize],
) -> Result<(EpSet, AlternationReport<S>), MeasureError> {
    if selected.len() < 2 {
        return Err(MeasureError::EmptySelection(selected.len()));
    }
    let mut a = EpSet::empty();
    for &n in selected.iter().step_by(2) {
        a = a.union(&ac.set_element(n)?);
    }
    let upper = third(eps);
    let lower = upper.clone() + upper.clone();

    let mut rows = Vec::with_capacity(selected.len());
    let mut least_even: Option<S> = None;
    let mut greatest_odd: Option<S> = None;
    for (position, &k) in selected.iter().enumerate() {
        let value = fam.measure(k)?.eval(&a);
        let size = value.abs();
        let holds = if position % 2 == 0 {
            let v = size > lower;
            if least_even.as_ref().is_none_or(|m| size < *m) {
                least_even = Some(size);
            }
            v
        } else {
            let v = size < upper;
            if greatest_odd.as_ref().is_none_or(|m| size > *m) {
                greatest_odd = Some(size);
            }
            v
        };
        if !holds {
            return Err(MeasureError::VerificationFailure { index: k });
        }
        rows.push(AlternationRow { index: k, position, value, holds });
    }
    let gap = least_even.expect("two or more rows") - greatest_odd.expect("two or more rows");
    Ok((a, AlternationReport { rows, lower, upper, gap }))
}

/// One index of a positive decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTerm<S> {
    pub mu: FasMeasure<S>,
    pub lambda: FasMeasure<S>,
    pub nu: FasMeasure<S>,
    pub b: EpSet,
}

/// `μ_n = λ_n + ν_n` with `λ_n ≥ 0` of total mass `η` and `λ_n(B_n) > 3η/4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveDecomposition<S> {
    pub eta: S,
    pub terms: Vec<DecompositionTerm<S>>,
}

/// The clause of a positive decomposition that fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// `μ_n = λ_n + ν_n`.
    Sum,
    /// `λ_n ≥ 0`.
    Nonnegative,
    /// `λ_n` of the top element equals `η`.
    TotalMass,
    /// `λ_n(B_n) > 3η/4`.
    Concentration,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Sum => "μ_n ≠ λ_n + ν_n",
            Clause::Nonnegative => "λ_n has a negative atom",
            Clause::TotalMass => "λ_n total mass ≠ η",
            Clause::Concentration => "λ_n(B_n) ≤ 3η/4",
        })
    }
}

fn three_quarters<S: Scalar>(eta: &S) -> S {
    eta.clone() * S::from_ratio(3, 4)
}

fn term<S>(d: &PositiveDecomposition<S>, n: usize) -> Result<&DecompositionTerm<S>, MeasureError> {
    d.terms.get(n).ok_or(MeasureError::IndexNotPresented(n))
}

/// Checks every clause for the indices below `horizon`; the error names the
/// first failing index and clause.
pub fn verify_positive_decomposition<S: Scalar>(
    d: &PositiveDecomposition<S>,
    horizon: usize,
) -> Result<(), MeasureError> {
    if !d.eta.is_positive() {
        return Err(MeasureError::NonPositive);
    }
    for n in 0..horizon {
        let t = term(d, n)?;
        let fail = |clause| Err(MeasureError::Decomposition { index: n, clause });
        if t.mu != &t.lambda + &t.nu {
            return fail(Clause::Sum);
        }
        if !t.lambda.is_nonnegative() {
            return fail(Clause::Nonnegative);
        }
        if t.lambda.total_mass() != d.eta {
            return fail(Clause::TotalMass);
        }
        if t.lambda.eval(&t.b) <= three_quarters(&d.eta) {
            return fail(Clause::Concentration);
        }
    }
    Ok(())
}

/// One index of a Grothendieck inequality report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityRow<S> {
    pub index: usize,
    /// Whether the index is in `M1` (else `M0`).
    pub below: bool,
    /// `μ_n(A)`.
    pub value: S,
    /// `η/2 + ν_n(A)` on `M1`, `η/4 + ν_n(A)` on `M0`.
    pub bound: S,
    pub holds: bool,
    /// On `M1`: `μ_n(A) > 3η/4 + ν_n(A)`. Always false on `M0`.
    pub stronger_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrothendieckReport<S> {
    pub rows: Vec<InequalityRow<S>>,
    pub passed: bool,
    /// Every `M1` row also meets the `3η/4` bound.
    pub stronger_bound: bool,
}

fn witness_set(w: &SeparationWitness) -> Result<EpSet, MeasureError> {
    match w.element() {
        Element::Set(s) => Ok(s.clone()),
        Element::Union(u) => Ok(u.to_ep_set()),
        _ => Err(MeasureError::NotASet),
    }
}

/// `μ_n(A) > η/2 + ν_n(A)` for `n ∈ M1` and `μ_n(A) < η/4 + ν_n(A)` for
/// `n ∈ M0`, below `horizon`. `B_n ≤ A` on `M1` and `B_n ∧ A = 0` on `M0`
/// are required of the witness.
pub fn positive_grothendieck_check<S: Scalar>(
    d: &PositiveDecomposition<S>,
    w: &SeparationWitness,
    horizon: usize,
) -> Result<GrothendieckReport<S>, MeasureError> {
    verify_positive_decomposition(d, horizon)?;
    let a = witness_set(w)?;
    let half = d.eta.clone() / S::from_int(2);
    let quarter = d.eta.clone() / S::from_int(4);
    let strong = three_quarters(&d.eta);

    let mut rows = Vec::new();
    for n in 0..horizon {
        let below = w.below().contains(n);
        if !below && !w.disjoint().contains(n) {
            continue;
        }
        let t = term(d, n)?;
        if below && !t.b.is_subset(&a) {
            return Err(MeasureError::WitnessMismatch { index: n, reason: "B_n is not below A" });
        }
        if !below && !t.b.is_disjoint(&a) {
            return Err(MeasureError::WitnessMismatch { index: n, reason: "B_n meets A" });
        }
        let value = t.mu.eval(&a);
        let nu = t.nu.eval(&a);
        let (bound, holds, stronger_holds) = if below {
            let bound = half.clone() + nu.clone();
            let holds = value > bound;
            (bound, holds, value > strong.clone() + nu)
        } else {
            let bound = quarter.clone() + nu;
            let holds = value < bound;
            (bound, holds, false)
        };
        rows.push(InequalityRow { index: n, below, value, bound, holds, stronger_holds });
    }
    let passed = rows.iter().all(|r| r.holds);
    let stronger_bound = rows.iter().filter(|r| r.below).all(|r| r.stronger_holds);
    Ok(GrothendieckReport { rows, passed, stronger_bound })
}

/// The decomposition `λ_n = δ_{2n}`, `η = 1`, `ν_n = 0`, `B_n = {2n}` for
/// `n < len`, optionally with `ν_n` added to both `μ_n` and the term.
pub fn dirac_decomposition<S: Scalar>(
    len: usize,
    perturbation: impl Fn(usize) -> FasMeasure<S>,
) -> PositiveDecomposition<S> {
    let terms = (0..len)
        .map(|n| {
            let lambda = FasMeasure::dirac(2 * n);
            let nu = perturbation(n);
            DecompositionTerm { mu: &lambda + &nu, lambda, nu, b: EpSet::finite([2 * n]) }
        })
        .collect();
    PositiveDecomposition { eta: S::one(), terms }
}
