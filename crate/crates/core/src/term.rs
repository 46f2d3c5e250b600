//! Boolean terms over named generators and their disjunctive normal form.
//!
//! Semantics is the free Boolean algebra: a term denotes the function from
//! generator assignments to `{0, 1}`. A [`Dnf`] is kept canonical up to
//! subsumption, so the zero element is exactly the DNF with no conjuncts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("no value assigned to generator `{0}`")]
    MissingAssignment(String),
    #[error("malformed term: {0}")]
    Malformed(String),
}

/// A Boolean term. `G` is the generator identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term<G> {
    Zero,
    One,
    Var(G),
    Meet(Box<Term<G>>, Box<Term<G>>),
    Join(Box<Term<G>>, Box<Term<G>>),
    Not(Box<Term<G>>),
}

impl<G: Ord + Clone> Term<G> {
    pub fn var(g: G) -> Self {
        Term::Var(g)
    }

    pub fn meet(self, other: Term<G>) -> Self {
        Term::Meet(Box::new(self), Box::new(other))
    }

    pub fn join(self, other: Term<G>) -> Self {
        Term::Join(Box::new(self), Box::new(other))
    }

    pub fn complement(self) -> Self {
        Term::Not(Box::new(self))
    }

    /// Meet of all terms; the empty meet is `One`.
    pub fn meet_all<I: IntoIterator<Item = Term<G>>>(terms: I) -> Self {
        terms.into_iter().reduce(Term::meet).unwrap_or(Term::One)
    }

    /// Join of all terms; the empty join is `Zero`.
    pub fn join_all<I: IntoIterator<Item = Term<G>>>(terms: I) -> Self {
        terms.into_iter().reduce(Term::join).unwrap_or(Term::Zero)
    }

    pub fn generators(&self) -> BTreeSet<G> {
        let mut out = BTreeSet::new();
        self.collect_generators(&mut out);
        out
    }

    fn collect_generators(&self, out: &mut BTreeSet<G>) {
        match self {
            Term::Zero | Term::One => {}
            Term::Var(g) => {
                out.insert(g.clone());
            }
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.collect_generators(out);
                b.collect_generators(out);
            }
            Term::Not(a) => a.collect_generators(out),
        }
    }

    /// Evaluates under a partial assignment given as a lookup function.
    pub fn eval_with<F>(&self, lookup: &F) -> Result<bool, TermError>
    where
        F: Fn(&G) -> Option<bool>,
        G: fmt::Debug,
    {
        Ok(match self {
            Term::Zero => false,
            Term::One => true,
            Term::Var(g) => {
                lookup(g).ok_or_else(|| TermError::MissingAssignment(format!("{g:?}")))?
            }
            Term::Meet(a, b) => a.eval_with(lookup)? && b.eval_with(lookup)?,
            Term::Join(a, b) => a.eval_with(lookup)? || b.eval_with(lookup)?,
            Term::Not(a) => !a.eval_with(lookup)?,
        })
    }

    pub fn eval(&self, assignment: &BTreeMap<G, bool>) -> Result<bool, TermError>
    where
        G: fmt::Debug,
    {
        self.eval_with(&|g: &G| assignment.get(g).copied())
    }

    pub fn to_dnf(&self) -> Dnf<G> {
        self.dnf_with_polarity(true)
    }

    fn dnf_with_polarity(&self, positive: bool) -> Dnf<G> {
        match (self, positive) {
            (Term::Zero, true) | (Term::One, false) => Dnf::zero(),
            (Term::One, true) | (Term::Zero, false) => Dnf::one(),
            (Term::Var(g), true) => Dnf::literal(g.clone(), true),
            (Term::Var(g), false) => Dnf::literal(g.clone(), false),
            (Term::Meet(a, b), true) | (Term::Join(a, b), false) => {
                a.dnf_with_polarity(positive).meet(&b.dnf_with_polarity(positive))
            }
            (Term::Join(a, b), true) | (Term::Meet(a, b), false) => {
                a.dnf_with_polarity(positive).join(&b.dnf_with_polarity(positive))
            }
            (Term::Not(a), p) => a.dnf_with_polarity(!p),
        }
    }
}

/// True iff `t` denotes zero in the free algebra.
pub fn is_zero_free<G: Ord + Clone>(t: &Term<G>) -> bool {
    t.to_dnf().is_zero()
}

/// True iff the terms are pairwise disjoint in the free algebra.
pub fn is_antichain_free<G: Ord + Clone>(terms: &[Term<G>]) -> bool {
    let dnfs: Vec<Dnf<G>> = terms.iter().map(Term::to_dnf).collect();
    dnfs.iter().enumerate().all(|(i, a)| {
        dnfs[i + 1..].iter().all(|b| a.meet(b).is_zero())
    })
}

/// A meet of positive literals `pos` and negated literals `neg`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conjunction<G> {
    pos: BTreeSet<G>,
    neg: BTreeSet<G>,
}

impl<G: Ord + Clone> Conjunction<G> {
    pub fn new<P, N>(pos: P, neg: N) -> Self
    where
        P: IntoIterator<Item = G>,
        N: IntoIterator<Item = G>,
    {
        Conjunction { pos: pos.into_iter().collect(), neg: neg.into_iter().collect() }
    }

    /// The empty conjunction (top).
    pub fn top() -> Self {
        Conjunction { pos: BTreeSet::new(), neg: BTreeSet::new() }
    }

    pub fn positive(&self) -> &BTreeSet<G> {
        &self.pos
    }

    pub fn negative(&self) -> &BTreeSet<G> {
        &self.neg
    }

    /// A generator occurs both positively and negatively.
    pub fn is_contradictory(&self) -> bool {
        self.pos.intersection(&self.neg).next().is_some()
    }

    /// Every assignment satisfying `other` satisfies `self`.
    pub fn subsumes(&self, other: &Self) -> bool {
        self.pos.is_subset(&other.pos) && self.neg.is_subset(&other.neg)
    }

    pub fn meet(&self, other: &Self) -> Self {
        Conjunction {
            pos: self.pos.union(&other.pos).cloned().collect(),
            neg: self.neg.union(&other.neg).cloned().collect(),
        }
    }

    pub fn generators(&self) -> BTreeSet<G> {
        self.pos.union(&self.neg).cloned().collect()
    }

    pub fn satisfied_by<F: Fn(&G) -> bool>(&self, holds: F) -> bool {
        self.pos.iter().all(&holds) && !self.neg.iter().any(holds)
    }

    pub fn to_term(&self) -> Term<G> {
        Term::meet_all(
            self.pos
                .iter()
                .map(|g| Term::var(g.clone()))
                .chain(self.neg.iter().map(|g| Term::var(g.clone()).complement())),
        )
    }
}

/// Disjunctive normal form, subsumption-pruned. No conjunct is contradictory
/// and no conjunct subsumes another.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dnf<G> {
    conjuncts: BTreeSet<Conjunction<G>>,
}

impl<G: Ord + Clone> Dnf<G> {
    pub fn zero() -> Self {
        Dnf { conjuncts: BTreeSet::new() }
    }

    pub fn one() -> Self {
        Dnf { conjuncts: BTreeSet::from([Conjunction::top()]) }
    }

    pub fn literal(g: G, positive: bool) -> Self {
        let c = if positive {
            Conjunction::new([g], [])
        } else {
            Conjunction::new([], [g])
        };
        Dnf { conjuncts: BTreeSet::from([c]) }
    }

    /// Normalizes an arbitrary collection of conjunctions.
    pub fn from_conjunctions<I: IntoIterator<Item = Conjunction<G>>>(iter: I) -> Self {
        let mut candidates: Vec<Conjunction<G>> =
            iter.into_iter().filter(|c| !c.is_contradictory()).collect();
        // Shorter conjunctions first so that subsumers are kept.
        candidates.sort_by_key(|c| c.pos.len() + c.neg.len());
        let mut kept: Vec<Conjunction<G>> = Vec::with_capacity(candidates.len());
        for c in candidates {
            if !kept.iter().any(|k| k.subsumes(&c)) {
                kept.push(c);
            }
        }
        Dnf { conjuncts: kept.into_iter().collect() }
    }

    pub fn conjuncts(&self) -> impl Iterator<Item = &Conjunction<G>> {
        self.conjuncts.iter()
    }

    pub fn len(&self) -> usize {
        self.conjuncts.len()
    }

    pub fn is_zero(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn join(&self, other: &Self) -> Self {
        Dnf::from_conjunctions(self.conjuncts.iter().chain(other.conjuncts.iter()).cloned())
    }

    pub fn meet(&self, other: &Self) -> Self {
        Dnf::from_conjunctions(
            self.conjuncts
                .iter()
                .flat_map(|a| other.conjuncts.iter().map(move |b| a.meet(b))),
        )
    }

    pub fn complement(&self) -> Self {
        // De Morgan: the complement of a join of conjunctions is the meet of
        // the joins of their negated literals.
        self.conjuncts.iter().fold(Dnf::one(), |acc, c| {
            let negated = Dnf::from_conjunctions(
                c.pos
                    .iter()
                    .map(|g| Conjunction::new([], [g.clone()]))
                    .chain(c.neg.iter().map(|g| Conjunction::new([g.clone()], []))),
            );
            acc.meet(&negated)
        })
    }

    pub fn generators(&self) -> BTreeSet<G> {
        self.conjuncts.iter().flat_map(|c| c.generators()).collect()
    }

    pub fn eval_with<F: Fn(&G) -> bool>(&self, holds: F) -> bool {
        self.conjuncts.iter().any(|c| c.satisfied_by(&holds))
    }

    pub fn to_term(&self) -> Term<G> {
        Term::join_all(self.conjuncts.iter().map(Conjunction::to_term))
    }
}

impl<G: Ord + Clone> From<Conjunction<G>> for Dnf<G> {
    fn from(c: Conjunction<G>) -> Self {
        Dnf::from_conjunctions([c])
    }
}

// JSON representation.

#[derive(Serialize, Deserialize)]
struct TermRepr {
    op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    args: Option<Vec<TermRepr>>,
}

impl TermRepr {
    fn from_term<G: Display>(t: &Term<G>) -> Self {
        let node = |op: &str, args: Vec<TermRepr>| TermRepr {
            op: op.to_string(),
            id: None,
            args: if args.is_empty() { None } else { Some(args) },
        };
        match t {
            Term::Zero => node("zero", vec![]),
            Term::One => node("one", vec![]),
            Term::Var(g) => TermRepr { op: "var".into(), id: Some(g.to_string()), args: None },
            Term::Meet(a, b) => node("meet", vec![Self::from_term(a), Self::from_term(b)]),
            Term::Join(a, b) => node("join", vec![Self::from_term(a), Self::from_term(b)]),
            Term::Not(a) => node("not", vec![Self::from_term(a)]),
        }
    }

    fn into_term<G>(self) -> Result<Term<G>, TermError>
    where
        G: Ord + Clone + FromStr,
        G::Err: Display,
    {
        let args = self.args.unwrap_or_default();
        let mut terms = args
            .into_iter()
            .map(TermRepr::into_term)
            .collect::<Result<Vec<Term<G>>, _>>()?;
        match self.op.as_str() {
            "zero" if terms.is_empty() => Ok(Term::Zero),
            "one" if terms.is_empty() => Ok(Term::One),
            "var" if terms.is_empty() => {
                let id = self
                    .id
                    .ok_or_else(|| TermError::Malformed("`var` without `id`".into()))?;
                id.parse()
                    .map(Term::Var)
                    .map_err(|e| TermError::Malformed(format!("bad generator id `{id}`: {e}")))
            }
            // n-ary meet and join are accepted and folded left.
            "meet" => Ok(Term::meet_all(terms)),
            "join" => Ok(Term::join_all(terms)),
            "not" if terms.len() == 1 => Ok(terms.pop().unwrap().complement()),
            op => Err(TermError::Malformed(format!(
                "operator `{op}` with {} argument(s)",
                terms.len()
            ))),
        }
    }
}

impl<G: Display> Serialize for Term<G> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TermRepr::from_term(self).serialize(s)
    }
}

impl<'de, G> Deserialize<'de> for Term<G>
where
    G: Ord + Clone + FromStr,
    G::Err: Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        TermRepr::deserialize(d)?.into_term().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ConjunctionRepr {
    #[serde(rename = "U", default)]
    pos: Vec<String>,
    #[serde(rename = "V", default)]
    neg: Vec<String>,
}

impl<G: Display> Serialize for Conjunction<G> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConjunctionRepr {
            pos: self.pos.iter().map(ToString::to_string).collect(),
            neg: self.neg.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de, G> Deserialize<'de> for Conjunction<G>
where
    G: Ord + Clone + FromStr,
    G::Err: Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ConjunctionRepr::deserialize(d)?;
        let parse = |ids: Vec<String>| -> Result<BTreeSet<G>, D::Error> {
            ids.into_iter()
                .map(|id| {
                    id.parse().map_err(|e| {
                        serde::de::Error::custom(format!("bad generator id `{id}`: {e}"))
                    })
                })
                .collect()
        };
        Ok(Conjunction { pos: parse(repr.pos)?, neg: parse(repr.neg)? })
    }
}

/// Serialized as the sorted list of its conjuncts.
impl<G: Display> Serialize for Dnf<G> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.conjuncts.iter())
    }
}

/// Any list of conjunctions is accepted and normalized.
impl<'de, G> Deserialize<'de> for Dnf<G>
where
    G: Ord + Clone + FromStr,
    G::Err: Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let list = Vec::<Conjunction<G>>::deserialize(d)?;
        Ok(Dnf::from_conjunctions(list))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type T = Term<String>;

    fn v(name: &str) -> T {
        Term::var(name.to_string())
    }

    fn conj(pos: &[&str], neg: &[&str]) -> Conjunction<String> {
        Conjunction::new(
            pos.iter().map(|s| s.to_string()),
            neg.iter().map(|s| s.to_string()),
        )
    }

    fn assign(pairs: &[(&str, bool)]) -> BTreeMap<String, bool> {
        pairs.iter().map(|(k, b)| (k.to_string(), *b)).collect()
    }

    #[test]
    fn distributes_meet_over_join() {
        let t = v("g1").meet(v("g2").join(v("g3")));
        let expected =
            Dnf::from_conjunctions([conj(&["g1", "g2"], &[]), conj(&["g1", "g3"], &[])]);
        assert_eq!(t.to_dnf(), expected);
        assert_eq!(t.to_dnf().len(), 2);
    }

    #[test]
    fn complement_is_negative_literal() {
        assert_eq!(v("g1").complement().to_dnf(), Dnf::from(conj(&[], &["g1"])));
    }

    #[test]
    fn eval_laws() {
        let contradiction = v("g1").meet(v("g1").complement());
        let middle = v("g1").join(v("g1").complement());
        for b in [false, true] {
            let a = assign(&[("g1", b)]);
            assert!(!contradiction.eval(&a).unwrap());
            assert!(middle.eval(&a).unwrap());
        }
        let t = v("g1").meet(v("g2").complement());
        assert!(t.eval(&assign(&[("g1", true), ("g2", false)])).unwrap());
    }

    #[test]
    fn eval_reports_missing_assignment() {
        let t = v("g1").meet(v("g2"));
        let err = t.eval(&assign(&[("g1", true)])).unwrap_err();
        assert!(matches!(err, TermError::MissingAssignment(_)));
    }

    #[test]
    fn zero_detection() {
        assert!(is_zero_free(&v("g1").meet(v("g1").complement())));
        // disjoint F and G: an elementary meet of free generators is nonzero
        let f = ["a", "b", "c"].map(v);
        let g = ["d", "e"].map(|n| v(n).complement());
        assert!(!is_zero_free(&Term::meet_all(f.into_iter().chain(g))));
    }

    #[test]
    fn antichains() {
        let a = v("g1").meet(v("g2").complement());
        let b = v("g2").meet(v("g1").complement());
        assert!(is_antichain_free(&[a, b]));
        assert!(!is_antichain_free(&[v("g1"), v("g1").meet(v("g2"))]));
    }

    #[test]
    fn subsumption_pruning() {
        let d = Dnf::from_conjunctions([conj(&["a"], &[]), conj(&["a", "b"], &["c"])]);
        assert_eq!(d, Dnf::from(conj(&["a"], &[])));
        assert!(Dnf::from(conj(&["a"], &["a"])).is_zero());
        assert_eq!(Dnf::<String>::zero().complement(), Dnf::one());
        assert_eq!(Dnf::<String>::one().complement(), Dnf::zero());
    }

    #[test]
    fn json_round_trip() {
        let t = v("g1").meet(v("g2").join(v("g3").complement()));
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.starts_with(r#"{"op":"meet","args":[{"op":"var","id":"g1"}"#));
        let back: T = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);

        let d = t.to_dnf();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"[{"U":["g1"],"V":["g3"]},{"U":["g1","g2"],"V":[]}]"#);
        let back: Dnf<String> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(serde_json::from_str::<T>(r#"{"op":"var"}"#).is_err());
        assert!(serde_json::from_str::<T>(r#"{"op":"xor","args":[]}"#).is_err());
        assert!(serde_json::from_str::<T>(r#"{"op":"not","args":[]}"#).is_err());
    }
}
