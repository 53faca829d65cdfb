//! Permutations in one-line notation and classical pattern containment.
//!
//! Values and positions exposed through the public API are 1-based, matching
//! the usual combinatorial conventions. Internally values live in a `Vec<u32>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation of `{1, …, n}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Permutation(Vec<u32>);

/// Positions (1-based, strictly increasing) of an occurrence of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceWitness {
    pub positions: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Reverse,
    Complement,
    Inverse,
}

impl Permutation {
    /// Validates that `values` is a rearrangement of `1..=n`.
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for (i, &v) in values.iter().enumerate() {
            if v == 0 || v as usize > n {
                return Err(Error::NotAPermutation {
                    len: n,
                    reason: format!("value {v} at position {} is out of range", i + 1),
                });
            }
            if std::mem::replace(&mut seen[v as usize - 1], true) {
                return Err(Error::NotAPermutation {
                    len: n,
                    reason: format!("value {v} repeated at position {}", i + 1),
                });
            }
        }
        Ok(Permutation(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(values.clone()).is_ok());
        Permutation(values)
    }

    pub fn empty() -> Self {
        Permutation(Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    /// `n (n-1) … 1`.
    pub fn decreasing(n: usize) -> Self {
        Permutation((1..=n as u32).rev().collect())
    }

    /// Rescales a sequence of distinct integers to the permutation with the
    /// same relative order.
    pub fn standardize(seq: &[u32]) -> Self {
        let mut order: Vec<usize> = (0..seq.len()).collect();
        order.sort_unstable_by_key(|&i| seq[i]);
        let mut out = vec![0u32; seq.len()];
        for (rank, &i) in order.iter().enumerate() {
            out[i] = rank as u32 + 1;
        }
        Permutation(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn into_values(self) -> Vec<u32> {
        self.0
    }

    /// Value at 1-based `position`.
    pub fn at(&self, position: usize) -> Option<u32> {
        position.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    /// 1-based position of `value`.
    pub fn position_of(&self, value: u32) -> Option<usize> {
        self.0.iter().position(|&v| v == value).map(|i| i + 1)
    }

    /// Leftmost occurrence of `pattern`, lexicographically on position sequences.
    pub fn contains(&self, pattern: &Permutation) -> Option<OccurrenceWitness> {
        PatternMatcher::new(pattern).find(&self.0).map(|positions| OccurrenceWitness {
            positions: positions.into_iter().map(|p| p + 1).collect(),
        })
    }

    pub fn avoids(&self, pattern: &Permutation) -> bool {
        !PatternMatcher::new(pattern).occurs(&self.0)
    }

    pub fn avoids_all(&self, patterns: &[Permutation]) -> bool {
        patterns.iter().all(|p| self.avoids(p))
    }

    pub fn reverse(&self) -> Self {
        Permutation(self.0.iter().rev().copied().collect())
    }

    pub fn complement(&self) -> Self {
        let n = self.0.len() as u32;
        Permutation(self.0.iter().map(|&v| n + 1 - v).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut out = vec![0u32; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            out[v as usize - 1] = i as u32 + 1;
        }
        Permutation(out)
    }

    pub fn symmetry(&self, kind: Symmetry) -> Self {
        match kind {
            Symmetry::Reverse => self.reverse(),
            Symmetry::Complement => self.complement(),
            Symmetry::Inverse => self.inverse(),
        }
    }

    /// The `k`-inflation at 1-based `position`: the entry is replaced by `k`
    /// consecutive increasing values and larger entries shift up by `k - 1`.
    pub fn inflate(&self, position: usize, k: usize) -> Result<Self> {
        if position == 0 || position > self.len() {
            return Err(Error::PositionOutOfRange { position, len: self.len() });
        }
        if k == 0 {
            return Err(Error::InvalidArgument("inflation factor must be at least 1".into()));
        }
        let pivot = self.0[position - 1];
        let shift = k as u32 - 1;
        let mut out = Vec::with_capacity(self.len() + k - 1);
        for (i, &v) in self.0.iter().enumerate() {
            if i + 1 == position {
                out.extend(pivot..pivot + k as u32);
            } else if v > pivot {
                out.push(v + shift);
            } else {
                out.push(v);
            }
        }
        Ok(Permutation(out))
    }

    /// 1-based positions of the left-to-right maxima.
    pub fn ltr_maxima(&self) -> Vec<usize> {
        let mut best = 0;
        let mut out = Vec::new();
        for (i, &v) in self.0.iter().enumerate() {
            if v > best {
                best = v;
                out.push(i + 1);
            }
        }
        out
    }

    /// Collapses the leading run `π1, π1+1, …, π1+r` to its first entry.
    /// Returns `r` together with the rescaled remainder.
    pub fn deflate_leading_run(&self) -> Result<(usize, Self)> {
        if self.is_empty() {
            return Err(Error::Precondition("cannot deflate the empty permutation".into()));
        }
        let v = &self.0;
        let mut r = 0;
        while r + 1 < v.len() && v[r + 1] == v[r] + 1 {
            r += 1;
        }
        let mut rest = Vec::with_capacity(v.len() - r);
        rest.push(v[0]);
        rest.extend_from_slice(&v[r + 1..]);
        Ok((r, Permutation::standardize(&rest)))
    }

    /// Deletes the entry at 1-based `position` and rescales.
    pub fn delete_at(&self, position: usize) -> Result<Self> {
        if position == 0 || position > self.len() {
            return Err(Error::PositionOutOfRange { position, len: self.len() });
        }
        let removed = self.0[position - 1];
        Ok(Permutation(
            self.0
                .iter()
                .enumerate()
                .filter(|&(i, _)| i + 1 != position)
                .map(|(_, &v)| if v > removed { v - 1 } else { v })
                .collect(),
        ))
    }

    /// Inserts the new maximum `n + 1` right after 1-based `position` (0 means at the front).
    pub fn insert_max_after(&self, position: usize) -> Result<Self> {
        if position > self.len() {
            return Err(Error::PositionOutOfRange { position, len: self.len() });
        }
        let mut out = self.0.clone();
        out.insert(position, self.len() as u32 + 1);
        Ok(Permutation(out))
    }

    /// Every pattern of length `n - 1`, with duplicates removed.
    pub fn one_point_deletions(&self) -> Vec<Self> {
        let mut out: Vec<Self> = (1..=self.len()).map(|p| self.delete_at(p).unwrap()).collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 9 {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
        } else {
            for (i, v) in self.0.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts the compact digit form (`4132`) and the comma-separated form
    /// (`10,3,1,2,…`). Surrounding whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let lead = s.len() - s.trim_start().len();
        let body = s.trim();
        let mut values = Vec::new();
        if body.contains(',') {
            let mut offset = lead;
            for tok in body.split(',') {
                let t = tok.trim();
                let at = offset + (tok.len() - tok.trim_start().len()) + 1;
                let v: u32 = t.parse().map_err(|_| Error::Parse {
                    position: at,
                    message: format!("expected a positive integer, found {t:?}"),
                })?;
                values.push(v);
                offset += tok.len() + 1;
            }
        } else {
            for (i, c) in body.char_indices() {
                let d = c.to_digit(10).filter(|&d| d > 0).ok_or_else(|| Error::Parse {
                    position: lead + i + 1,
                    message: format!("expected a digit 1-9, found {c:?}"),
                })?;
                values.push(d);
            }
        }
        Permutation::new(values).map_err(|e| match e {
            Error::NotAPermutation { reason, .. } => Error::Parse { position: 0, message: reason },
            other => other,
        })
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a permutation literal; panics on malformed input. Test and fixture helper.
pub fn perm(s: &str) -> Permutation {
    s.parse().unwrap_or_else(|e| panic!("bad permutation literal {s:?}: {e}"))
}

/// Precomputed search data for one pattern.
///
/// For pattern index `j`, `below[j]` / `above[j]` name the earlier pattern
/// index holding the nearest smaller / larger value. A host value placed at
/// `j` must fall strictly inside the window those two already-placed values
/// define.
#[derive(Debug, Clone)]
pub struct PatternMatcher {
    below: Vec<Option<usize>>,
    above: Vec<Option<usize>>,
}

impl PatternMatcher {
    pub fn new(pattern: &Permutation) -> Self {
        let p = pattern.values();
        let mut below = Vec::with_capacity(p.len());
        let mut above = Vec::with_capacity(p.len());
        for j in 0..p.len() {
            let lo = (0..j).filter(|&i| p[i] < p[j]).max_by_key(|&i| p[i]);
            let hi = (0..j).filter(|&i| p[i] > p[j]).min_by_key(|&i| p[i]);
            below.push(lo);
            above.push(hi);
        }
        PatternMatcher { below, above }
    }

    pub fn pattern_len(&self) -> usize {
        self.below.len()
    }

    /// Lexicographically smallest 0-based position sequence of an occurrence.
    pub fn find(&self, host: &[u32]) -> Option<Vec<usize>> {
        let k = self.pattern_len();
        if k > host.len() {
            return None;
        }
        let mut chosen = vec![0usize; k];
        self.search(host, 0, 0, &mut chosen).then_some(chosen)
    }

    pub fn occurs(&self, host: &[u32]) -> bool {
        let k = self.pattern_len();
        if k > host.len() {
            return false;
        }
        let mut buf = [0usize; 16];
        if k <= buf.len() {
            self.search(host, 0, 0, &mut buf[..k])
        } else {
            self.search(host, 0, 0, &mut vec![0; k])
        }
    }

    /// Whether an occurrence exists whose first entry is `host[0]`.
    pub fn occurs_anchored(&self, host: &[u32]) -> bool {
        let k = self.pattern_len();
        if k == 0 {
            return true;
        }
        if k > host.len() {
            return false;
        }
        let mut buf = [0usize; 16];
        if k <= buf.len() {
            self.search(host, 1, 1, &mut buf[..k])
        } else {
            self.search(host, 1, 1, &mut vec![0; k])
        }
    }

    fn search(&self, host: &[u32], j: usize, start: usize, chosen: &mut [usize]) -> bool {
        let k = chosen.len();
        if j == k {
            return true;
        }
        let lo = self.below[j].map(|i| host[chosen[i]]);
        let hi = self.above[j].map(|i| host[chosen[i]]);
        for p in start..=host.len() - (k - j) {
            let v = host[p];
            if lo.is_some_and(|lo| v <= lo) || hi.is_some_and(|hi| v >= hi) {
                continue;
            }
            chosen[j] = p;
            if self.search(host, j + 1, p + 1, chosen) {
                return true;
            }
        }
        false
    }
}

/// Rearranges `v` into its lexicographic successor; returns `false` (leaving
/// `v` unchanged) when `v` is already the last arrangement.
pub fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The permutation of rank `rank` (0-based) among `S_n` in lexicographic order.
pub fn unrank(n: usize, mut rank: u64) -> Permutation {
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial(i);
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(idx));
    }
    Permutation(out)
}

/// Iterator over `S_n` in lexicographic order.
pub struct LexPermutations {
    current: Vec<u32>,
    remaining: u64,
}

impl LexPermutations {
    pub fn new(n: usize) -> Self {
        Self::range(n, 0, factorial(n))
    }

    /// Ranks `start .. start + count`.
    pub fn range(n: usize, start: u64, count: u64) -> Self {
        let count = count.min(factorial(n).saturating_sub(start));
        LexPermutations { current: unrank(n, start.min(factorial(n) - 1)).0, remaining: count }
    }

    /// Visits each permutation as a slice without allocating.
    pub fn for_each_slice(mut self, mut f: impl FnMut(&[u32])) {
        while self.remaining > 0 {
            f(&self.current);
            self.remaining -= 1;
            if self.remaining > 0 {
                next_permutation(&mut self.current);
            }
        }
    }
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.remaining == 0 {
            return None;
        }
        let out = Permutation(self.current.clone());
        self.remaining -= 1;
        if self.remaining > 0 {
            next_permutation(&mut self.current);
        }
        Some(out)
    }
}

pub fn all_permutations(n: usize) -> LexPermutations {
    LexPermutations::new(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Containment by trying every index subset.
    fn brute_contains(host: &Permutation, pattern: &Permutation) -> bool {
        let n = host.len();
        let k = pattern.len();
        if k > n {
            return false;
        }
        (0u32..1 << n).filter(|m| m.count_ones() as usize == k).any(|mask| {
            let sub: Vec<u32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| host.values()[i]).collect();
            Permutation::standardize(&sub) == *pattern
        })
    }

    fn patterns_up_to(k: usize) -> Vec<Permutation> {
        (0..=k).flat_map(all_permutations).collect()
    }

    #[test]
    fn constructor_rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!(Permutation::new(vec![]).is_ok());
        assert!("1224".parse::<Permutation>().is_err());
    }

    #[test]
    fn parse_reports_position() {
        match "41x2".parse::<Permutation>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("unexpected {other:?}"),
        }
        match "10,3,a".parse::<Permutation>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn notation_round_trip() {
        let p = perm("4132");
        assert_eq!(p.to_string(), "4132");
        let long: Permutation = "10,3,1,2,4,5,6,7,8,9".parse().unwrap();
        assert_eq!(long.len(), 10);
        assert_eq!(long.to_string(), "10,3,1,2,4,5,6,7,8,9");
        assert_eq!(long.to_string().parse::<Permutation>().unwrap(), long);
        assert_eq!("".parse::<Permutation>().unwrap(), Permutation::empty());
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"4132\"");
    }

    #[test]
    fn contains_examples() {
        let w = perm("4132").contains(&perm("132")).unwrap();
        assert_eq!(w.positions, vec![2, 3, 4]);
        assert!(perm("25341").avoids(&perm("213")));
        assert_eq!(perm("361425").contains(&perm("1324")).unwrap().positions, vec![3, 4, 5, 6]);
        assert!(perm("2413").avoids(&perm("321")));
        // empty pattern
        assert_eq!(perm("21").contains(&Permutation::empty()).unwrap().positions, Vec::<usize>::new());
        assert!(Permutation::empty().avoids(&perm("1")));
    }

    #[test]
    fn leftmost_occurrence_is_lexicographic() {
        // 2 1 4 3 5: occurrences of 12 start at (1,3) lexicographically first
        assert_eq!(perm("21435").contains(&perm("12")).unwrap().positions, vec![1, 3]);
        assert_eq!(perm("315762498").contains(&perm("321")).unwrap().positions, vec![4, 5, 6]);
    }

    #[test]
    fn contains_agrees_with_subset_scan() {
        let pats = patterns_up_to(4);
        for n in 0..=7 {
            for host in all_permutations(n) {
                for p in &pats {
                    assert_eq!(host.contains(p).is_some(), brute_contains(&host, p), "{host} {p}");
                }
            }
        }
    }

    #[test]
    fn contains_is_compatible_with_symmetries() {
        let pats = patterns_up_to(4);
        for n in 0..=6 {
            for host in all_permutations(n) {
                for p in &pats {
                    let c = host.contains(p).is_some();
                    assert_eq!(c, host.reverse().contains(&p.reverse()).is_some());
                    assert_eq!(c, host.complement().contains(&p.complement()).is_some());
                }
            }
        }
    }

    #[test]
    fn witness_positions_are_an_occurrence() {
        let pats = patterns_up_to(4);
        for host in all_permutations(6) {
            for p in &pats {
                if let Some(w) = host.contains(p) {
                    let sub: Vec<u32> = w.positions.iter().map(|&i| host.at(i).unwrap()).collect();
                    assert!(w.positions.windows(2).all(|x| x[0] < x[1]));
                    assert_eq!(Permutation::standardize(&sub), *p);
                }
            }
        }
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(perm("132").reverse(), perm("231"));
        assert_eq!(perm("132").complement(), perm("312"));
        // position-of-value table for 4132: 1@2, 2@4, 3@3, 4@1
        assert_eq!(perm("4132").inverse(), perm("2431"));
        for p in all_permutations(5) {
            for kind in [Symmetry::Reverse, Symmetry::Complement, Symmetry::Inverse] {
                assert_eq!(p.symmetry(kind).symmetry(kind), p);
            }
        }
    }

    #[test]
    fn inflate_examples() {
        let p = perm("45132");
        let at = p.position_of(3).unwrap();
        assert_eq!(p.inflate(at, 3).unwrap(), perm("6713452"));
        assert_eq!(p.inflate(2, 1).unwrap(), p);
        // 5 becomes 5,6; nothing above 5 to shift
        assert_eq!(perm("51423").inflate(1, 2).unwrap(), perm("561423"));
        assert!(p.inflate(6, 2).is_err());
        assert!(p.inflate(0, 2).is_err());
        assert!(p.inflate(1, 0).is_err());
    }

    #[test]
    fn inflate_then_collapse_is_identity() {
        for n in 1..=6 {
            for p in all_permutations(n) {
                for i in 1..=n {
                    for k in 1..=3 {
                        let q = p.inflate(i, k).unwrap();
                        assert_eq!(q.len(), n + k - 1);
                        let mut vals = q.values().to_vec();
                        vals.drain(i..i + k - 1);
                        assert_eq!(Permutation::standardize(&vals), p);
                    }
                }
            }
        }
    }

    #[test]
    fn ltr_maxima_examples() {
        let p = perm("315762498");
        let vals: Vec<u32> = p.ltr_maxima().iter().map(|&i| p.at(i).unwrap()).collect();
        assert_eq!(vals, vec![3, 5, 7, 9]);
        assert_eq!(Permutation::decreasing(6).ltr_maxima(), vec![1]);
        assert_eq!(Permutation::identity(5).ltr_maxima(), vec![1, 2, 3, 4, 5]);
        for n in 1..=6 {
            for p in all_permutations(n) {
                assert_eq!(p.ltr_maxima().len() == 1, p.at(1) == Some(n as u32));
            }
        }
    }

    #[test]
    fn deflate_examples() {
        assert_eq!(perm("567148923").deflate_leading_run().unwrap(), (2, perm("5146723")));
        assert_eq!(perm("21").deflate_leading_run().unwrap(), (0, perm("21")));
        assert_eq!(Permutation::identity(7).deflate_leading_run().unwrap(), (6, perm("1")));
        assert_eq!(perm("1").deflate_leading_run().unwrap(), (0, perm("1")));
        assert!(Permutation::empty().deflate_leading_run().is_err());
        for n in 1..=7 {
            for p in all_permutations(n) {
                let (r, q) = p.deflate_leading_run().unwrap();
                assert_eq!(q.inflate(1, r + 1).unwrap(), p);
            }
        }
    }

    #[test]
    fn lex_iteration_and_ranges() {
        let all: Vec<_> = all_permutations(4).collect();
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(unrank(4, 23), perm("4321"));
        let mut chunked = Vec::new();
        for start in (0..24).step_by(5) {
            chunked.extend(LexPermutations::range(4, start, 5));
        }
        assert_eq!(chunked, all);
        assert_eq!(all_permutations(0).collect::<Vec<_>>(), vec![Permutation::empty()]);
    }

    proptest! {
        #[test]
        fn standardize_preserves_order(mut v in proptest::collection::vec(0u32..1000, 0..12)) {
            v.sort_unstable();
            v.dedup();
            let rev: Vec<u32> = v.iter().rev().copied().collect();
            prop_assert_eq!(Permutation::standardize(&rev), Permutation::decreasing(v.len()));
        }

        #[test]
        fn parse_display_round_trip(n in 0usize..14, rank in any::<u64>()) {
            let p = unrank(n, rank % factorial(n));
            prop_assert_eq!(p.to_string().parse::<Permutation>().unwrap(), p);
        }
    }
}
