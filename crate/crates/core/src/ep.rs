//! Eventually periodic subsets of ℕ.
//!
//! A set is stored as membership bits for `[0, threshold)` followed by one
//! period of bits repeated forever. Every constructor canonicalizes (minimal
//! period, then minimal threshold), so structural equality is set equality.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EpError {
    #[error("period must be at least 1")]
    EmptyPeriod,
    #[error("step must be at least 1")]
    ZeroStep,
    #[error("malformed eventually periodic set: {0}")]
    Malformed(String),
}

/// Decidable membership in a subset of ℕ.
pub trait Membership {
    fn contains(&self, n: usize) -> bool;
}

impl Membership for std::collections::BTreeSet<usize> {
    fn contains(&self, n: usize) -> bool {
        std::collections::BTreeSet::contains(self, &n)
    }
}

impl<T: Membership + ?Sized> Membership for &T {
    fn contains(&self, n: usize) -> bool {
        (**self).contains(n)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EpSet {
    prefix: Vec<bool>,
    pattern: Vec<bool>,
}

/// Coarse shape of an eventually periodic set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classification {
    Empty,
    Finite { size: usize },
    /// `missing` is the size of the complement.
    Cofinite { missing: usize },
    InfiniteCoinfinite,
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl EpSet {
    /// Membership bits for `[0, prefix.len())`, then `pattern` repeated.
    pub fn new(prefix: Vec<bool>, pattern: Vec<bool>) -> Result<Self, EpError> {
        if pattern.is_empty() {
            return Err(EpError::EmptyPeriod);
        }
        Ok(Self::canonical(prefix, pattern))
    }

    /// The set `{n : f(n)}`, where `f` must be periodic with period `period`
    /// from `threshold` on.
    pub fn from_fn<F: Fn(usize) -> bool>(threshold: usize, period: usize, f: F) -> Self {
        assert!(period >= 1);
        let prefix = (0..threshold).map(&f).collect();
        let pattern = (threshold..threshold + period).map(&f).collect();
        Self::canonical(prefix, pattern)
    }

    pub fn empty() -> Self {
        EpSet { prefix: vec![], pattern: vec![false] }
    }

    pub fn full() -> Self {
        EpSet { prefix: vec![], pattern: vec![true] }
    }

    pub fn finite<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        let elements: Vec<usize> = elements.into_iter().collect();
        let end = elements.iter().max().map_or(0, |m| m + 1);
        let mut prefix = vec![false; end];
        for e in elements {
            prefix[e] = true;
        }
        Self::canonical(prefix, vec![false])
    }

    /// `{start + j·step : j ≥ 0}`.
    pub fn progression(start: usize, step: usize) -> Result<Self, EpError> {
        if step == 0 {
            return Err(EpError::ZeroStep);
        }
        Ok(Self::from_fn(start, step, |n| n >= start && (n - start).is_multiple_of(step)))
    }

    pub fn threshold(&self) -> usize {
        self.prefix.len()
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn prefix_bits(&self) -> &[bool] {
        &self.prefix
    }

    pub fn pattern_bits(&self) -> &[bool] {
        &self.pattern
    }

    pub fn contains(&self, n: usize) -> bool {
        match self.prefix.get(n) {
            Some(&b) => b,
            None => self.pattern[(n - self.prefix.len()) % self.pattern.len()],
        }
    }

    fn canonical(mut prefix: Vec<bool>, pattern: Vec<bool>) -> Self {
        let p = pattern.len();
        let period = (1..=p)
            .filter(|d| p.is_multiple_of(*d))
            .find(|&d| (d..p).all(|i| pattern[i] == pattern[i - d]))
            .unwrap_or(p);
        let mut pattern: Vec<bool> = pattern[..period].to_vec();
        // Pull the threshold down while the last prefix bit agrees with the
        // periodic continuation one period later.
        while let Some(&last) = prefix.last() {
            if last != pattern[period - 1] {
                break;
            }
            prefix.pop();
            pattern.rotate_right(1);
        }
        EpSet { prefix, pattern }
    }

    fn combine(&self, other: &EpSet, op: impl Fn(bool, bool) -> bool) -> EpSet {
        let threshold = self.threshold().max(other.threshold());
        let period = lcm(self.period(), other.period());
        EpSet::from_fn(threshold, period, |n| op(self.contains(n), other.contains(n)))
    }

    pub fn union(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> EpSet {
        EpSet {
            prefix: self.prefix.iter().map(|b| !b).collect(),
            pattern: self.pattern.iter().map(|b| !b).collect(),
        }
    }

    /// `{a·n + b : n ∈ self}`.
    pub fn affine_image(&self, a: usize, b: usize) -> EpSet {
        assert!(a >= 1);
        let threshold = b + a * self.threshold();
        EpSet::from_fn(threshold, a * self.period(), |m| {
            m >= b && (m - b).is_multiple_of(a) && self.contains((m - b) / a)
        })
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.classify(), Classification::Empty)
    }

    /// Infinite iff some pattern bit is set. This is the structural
    /// infiniteness certificate used for index sets.
    pub fn is_infinite(&self) -> bool {
        self.pattern.iter().any(|&b| b)
    }

    pub fn is_subset(&self, other: &EpSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &EpSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn classify(&self) -> Classification {
        let count = |want: bool| self.prefix.iter().filter(|&&b| b == want).count();
        if self.pattern.iter().all(|&b| !b) {
            match count(true) {
                0 => Classification::Empty,
                size => Classification::Finite { size },
            }
        } else if self.pattern.iter().all(|&b| b) {
            Classification::Cofinite { missing: count(false) }
        } else {
            Classification::InfiniteCoinfinite
        }
    }

    /// Decides equality by comparing on `[0, max threshold + lcm periods)`.
    /// Agrees with `==` on canonical forms; kept as an independent check.
    pub fn agrees_on_window(&self, other: &EpSet) -> bool {
        let window = self.threshold().max(other.threshold()) + lcm(self.period(), other.period());
        (0..window).all(|n| self.contains(n) == other.contains(n))
    }

    /// Ascending elements; infinite when the set is.
    pub fn iter(&self) -> EpIter<'_> {
        EpIter { set: self, next: 0 }
    }

    /// Ascending elements below `bound`.
    pub fn elements_below(&self, bound: usize) -> impl Iterator<Item = usize> + '_ {
        (0..bound).filter(move |&n| self.contains(n))
    }

    /// Smallest element `≥ n`.
    pub fn next_at_or_after(&self, n: usize) -> Option<usize> {
        let horizon = n.max(self.threshold()) + self.period();
        (n..horizon).find(|&m| self.contains(m))
    }
}

impl Membership for EpSet {
    fn contains(&self, n: usize) -> bool {
        EpSet::contains(self, n)
    }
}

pub struct EpIter<'a> {
    set: &'a EpSet,
    next: usize,
}

impl Iterator for EpIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let found = self.set.next_at_or_after(self.next)?;
        self.next = found + 1;
        Some(found)
    }
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Result<Vec<bool>, EpError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(EpError::Malformed(format!("bit string `{s}`"))),
        })
        .collect()
}

impl fmt::Debug for EpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpSet({}|{})", bits_to_string(&self.prefix), bits_to_string(&self.pattern))
    }
}

#[derive(Serialize, Deserialize)]
struct EpRepr {
    threshold: usize,
    period: usize,
    prefix: String,
    pattern: String,
}

impl Serialize for EpSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EpRepr {
            threshold: self.threshold(),
            period: self.period(),
            prefix: bits_to_string(&self.prefix),
            pattern: bits_to_string(&self.pattern),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EpSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = EpRepr::deserialize(d)?;
        let prefix = parse_bits(&repr.prefix).map_err(D::Error::custom)?;
        let pattern = parse_bits(&repr.pattern).map_err(D::Error::custom)?;
        if prefix.len() != repr.threshold || pattern.len() != repr.period {
            return Err(D::Error::custom(
                "prefix/pattern lengths disagree with threshold/period",
            ));
        }
        EpSet::new(prefix, pattern).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> EpSet {
        EpSet::progression(0, 2).unwrap()
    }

    fn odds() -> EpSet {
        EpSet::progression(1, 2).unwrap()
    }

    #[test]
    fn membership() {
        assert!(evens().contains(4));
        assert!(!evens().contains(5));
        assert_eq!(evens().threshold(), 0);
        assert_eq!(evens().period(), 2);
        assert_eq!(evens().pattern_bits(), &[true, false]);
    }

    #[test]
    fn boolean_operations() {
        assert_eq!(evens().union(&odds()), EpSet::full());
        assert_eq!(evens().intersection(&odds()), EpSet::empty());
        assert_eq!(evens().complement(), odds());
        assert_eq!(EpSet::full().difference(&evens()), odds());
    }

    #[test]
    fn canonical_forms() {
        // 0 1 | 1 0 1 0 ... is the odds shifted into canonical form
        let s = EpSet::new(vec![false, true], vec![false, true, false, true]).unwrap();
        assert_eq!(s, odds());
        assert_eq!(s.threshold(), 0);
        let t = EpSet::new(vec![true, true, true], vec![false, false]).unwrap();
        assert_eq!(t, EpSet::finite([0, 1, 2]));
        assert_eq!(EpSet::new(vec![], vec![]), Err(EpError::EmptyPeriod));
    }

    #[test]
    fn classification() {
        assert_eq!(EpSet::finite([0, 1, 2]).classify(), Classification::Finite { size: 3 });
        assert_eq!(
            EpSet::finite([0, 1, 2]).complement().classify(),
            Classification::Cofinite { missing: 3 }
        );
        assert_eq!(evens().classify(), Classification::InfiniteCoinfinite);
        assert_eq!(EpSet::empty().classify(), Classification::Empty);
        assert_eq!(EpSet::full().classify(), Classification::Cofinite { missing: 0 });
    }

    #[test]
    fn affine_images_and_iteration() {
        let doubled = EpSet::finite([0, 3]).union(&EpSet::progression(5, 3).unwrap());
        let image = doubled.affine_image(2, 1);
        for n in 0..60 {
            let expect = n % 2 == 1 && doubled.contains((n - 1) / 2);
            assert_eq!(image.contains(n), expect, "n = {n}");
        }
        let first: Vec<usize> = EpSet::progression(2, 3).unwrap().iter().take(4).collect();
        assert_eq!(first, vec![2, 5, 8, 11]);
        let all: Vec<usize> = EpSet::finite([4, 1]).iter().collect();
        assert_eq!(all, vec![1, 4]);
        assert_eq!(EpSet::empty().iter().next(), None);
    }

    #[test]
    fn json_schema() {
        let s = EpSet::new(vec![true, false, false], vec![true, false]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"threshold":2,"period":2,"prefix":"10","pattern":"01"}"#);
        assert_eq!(serde_json::from_str::<EpSet>(&text).unwrap(), s);
        let bad = r#"{"threshold":2,"period":1,"prefix":"1","pattern":"0"}"#;
        assert!(serde_json::from_str::<EpSet>(bad).is_err());
    }
}
