//! Deciding whether the σ-sortable permutations form a class.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::catalan_number;
use crate::error::{Error, Result};
use crate::perm::{factorial, perm, LexPermutations, Permutation};
use num_bigint::BigUint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    IsClass,
    NotClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonClassWitness {
    /// A σ-sortable permutation ...
    pub alpha: Permutation,
    /// ... containing this pattern, which is not σ-sortable.
    pub pattern: Permutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStatus {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basis: Option<Vec<Permutation>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<NonClassWitness>,
}

impl ClassStatus {
    fn class(mut basis: Vec<Permutation>) -> Self {
        basis.sort();
        ClassStatus { verdict: Verdict::IsClass, basis: Some(basis), witness: None }
    }

    fn non_class(alpha: Permutation, pattern: Permutation) -> Self {
        ClassStatus {
            verdict: Verdict::NotClass,
            basis: None,
            witness: Some(NonClassWitness { alpha, pattern }),
        }
    }

    pub fn is_class(&self) -> bool {
        self.verdict == Verdict::IsClass
    }
}

/// σ with its first two entries swapped.
pub fn sigma_hat(sigma: &Permutation) -> Result<Permutation> {
    if sigma.len() < 2 {
        return Err(Error::PatternTooShort { pattern: sigma.to_string(), len: sigma.len(), min: 2 });
    }
    let mut v = sigma.values().to_vec();
    v.swap(0, 1);
    Permutation::new(v)
}

fn hat_avoids_231(sigma: &Permutation) -> bool {
    sigma_hat(sigma).map(|h| h.avoids(&perm("231"))).unwrap_or(false)
}

/// Witnesses for the length-3 machines whose sortable set is not a class.
const LENGTH_THREE_WITNESSES: [(&str, &str, &str); 5] = [
    ("123", "4132", "132"),
    ("132", "2413", "132"),
    ("213", "4132", "132"),
    ("231", "361425", "1324"),
    ("312", "3142", "132"),
];

/// For `σ = 21` (West's right-greedy two-stack device): 35241 sorts, 3241 does not.
const WEST_WITNESS: (&str, &str) = ("35241", "3241");

pub fn classify(sigma: &Permutation) -> Result<ClassStatus> {
    match sigma.len() {
        0 | 1 => Err(Error::PatternTooShort { pattern: sigma.to_string(), len: sigma.len(), min: 2 }),
        2 if sigma.is_identity() => Ok(ClassStatus::class(vec![perm("213")])),
        2 => Ok(ClassStatus::non_class(perm(WEST_WITNESS.0), perm(WEST_WITNESS.1))),
        k => {
            if hat_avoids_231(sigma) {
                let alpha = nonclass_witness(sigma)?;
                let pattern = if k == 3 {
                    let row = LENGTH_THREE_WITNESSES.iter().find(|r| perm(r.0) == *sigma).unwrap();
                    perm(row.2)
                } else {
                    perm("132")
                };
                Ok(ClassStatus::non_class(alpha, pattern))
            } else {
                let reversed = sigma.reverse();
                let p132 = perm("132");
                if reversed.avoids(&p132) {
                    Ok(ClassStatus::class(vec![p132, reversed]))
                } else {
                    Ok(ClassStatus::class(vec![p132]))
                }
            }
        }
    }
}

/// A σ-sortable permutation of length `|σ| + 1` containing 132, for σ whose
/// swapped form σ̂ avoids 231.
pub fn nonclass_witness(sigma: &Permutation) -> Result<Permutation> {
    let k = sigma.len();
    if k < 3 {
        return Err(Error::PatternTooShort { pattern: sigma.to_string(), len: k, min: 3 });
    }
    if !hat_avoids_231(sigma) {
        return Err(Error::Precondition(format!("σ̂ of {sigma} contains 231, so Sort(σ) is a class")));
    }
    if k == 3 {
        let row = LENGTH_THREE_WITNESSES
            .iter()
            .find(|r| perm(r.0) == *sigma)
            .expect("every length-3 σ with σ̂ avoiding 231 is tabulated");
        return Ok(perm(row.1));
    }
    let s = sigma.values();
    let (s1, s2) = (s[0], s[1]);
    let mut alpha = Vec::with_capacity(k + 1);
    if s1 < s2 {
        let lift = |v: u32| if v < s1 { v } else { v + 1 };
        alpha.extend(s[2..].iter().rev().map(|&v| lift(v)));
        alpha.push(s1);
        alpha.push(lift(s2));
        alpha.push(lift(s1));
    } else {
        let lift = |v: u32| if v <= s2 { v } else { v + 1 };
        alpha.extend(s.iter().rev().map(|&v| lift(v)));
        alpha.push(s2 + 1);
    }
    Permutation::new(alpha)
}

/// `#{σ ∈ S_n : σ̂ avoids 231}` by scanning `S_n`.
pub fn count_nonclass_exhaustive(n: usize) -> u64 {
    let p231 = perm("231");
    let block = factorial(n.saturating_sub(1));
    (0..n.max(1) as u64)
        .into_par_iter()
        .map(|b| {
            LexPermutations::range(n, b * block, block)
                .filter(|s| sigma_hat(s).is_ok_and(|h| h.avoids(&p231)))
                .count() as u64
        })
        .sum()
}

/// Exhaustive scan up to length 8, the Catalan number beyond.
pub fn count_nonclass(n: usize) -> Result<BigUint> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("count_nonclass needs n ≥ 3, got {n}")));
    }
    if n <= 8 {
        Ok(BigUint::from(count_nonclass_exhaustive(n)))
    } else {
        Ok(catalan_number(n))
    }
}

/// For σ avoiding 231: whether `Sort(σ)` has a two-element basis, i.e. whether
/// `σ1 σ2 σ3` is a 321.
pub fn has_two_element_basis(sigma: &Permutation) -> Result<bool> {
    if sigma.len() < 3 {
        return Err(Error::PatternTooShort { pattern: sigma.to_string(), len: sigma.len(), min: 3 });
    }
    if !sigma.reverse().avoids(&perm("132")) {
        return Err(Error::Precondition(format!("{sigma} contains 231")));
    }
    let s = sigma.values();
    Ok(s[0] > s[1] && s[1] > s[2])
}

pub fn is_antichain(set: &[Permutation]) -> bool {
    set.iter().enumerate().all(|(i, a)| {
        set.iter().enumerate().all(|(j, b)| i == j || a.avoids(b))
    })
}

/// Outcome of an empirical downward-closure check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    ClosedUpTo(usize),
    Violation { member: Permutation, pattern: Permutation },
}

/// `members[n]` must hold exactly the members of length `n`, for every
/// `n ≤ up_to`. Reports the first member (by length, then lexicographically)
/// having a one-point deletion outside the set.
pub fn is_downward_closed(members: &[BTreeSet<Permutation>], up_to: usize) -> Result<Closure> {
    if members.len() <= up_to {
        return Err(Error::IncompleteInput(format!(
            "need member sets for lengths 0..={up_to}, got {}",
            members.len()
        )));
    }
    for (n, set) in members.iter().enumerate().take(up_to + 1) {
        if let Some(bad) = set.iter().find(|p| p.len() != n) {
            return Err(Error::IncompleteInput(format!("{bad} filed under length {n}")));
        }
    }
    // One-point deletions suffice: every pattern is reached by a chain of them.
    for n in 1..=up_to {
        for p in &members[n] {
            if let Some(q) = p.one_point_deletions().into_iter().find(|q| !members[n - 1].contains(q)) {
                return Ok(Closure::Violation { member: p.clone(), pattern: q });
            }
        }
    }
    Ok(Closure::ClosedUpTo(up_to))
}

/// Every violation `(π, τ)` with `τ` a one-point deletion of `π`.
pub fn closure_violations(members: &[BTreeSet<Permutation>], up_to: usize) -> Vec<(Permutation, Permutation)> {
    let mut out = Vec::new();
    for n in 1..=up_to.min(members.len().saturating_sub(1)) {
        for p in &members[n] {
            for q in p.one_point_deletions() {
                if !members[n - 1].contains(&q) {
                    out.push((p.clone(), q));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use crate::enumerate::sortable_members;
    use crate::machine::is_sortable;

    fn sorted_sets(sigma: &Permutation, up_to: usize) -> Vec<BTreeSet<Permutation>> {
        (0..=up_to).map(|n| sortable_members(sigma, n).unwrap().into_iter().collect()).collect()
    }

    #[test]
    fn sigma_hat_examples() {
        assert_eq!(sigma_hat(&perm("321")).unwrap(), perm("231"));
        assert_eq!(sigma_hat(&perm("123")).unwrap(), perm("213"));
        assert!(sigma_hat(&perm("1")).is_err());
        for n in 2..=6 {
            for s in all_permutations(n) {
                let h = sigma_hat(&s).unwrap();
                assert_eq!(sigma_hat(&h).unwrap(), s);
                assert_eq!(h.values()[2..], s.values()[2..]);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let c = classify(&perm("321")).unwrap();
        assert_eq!(c.verdict, Verdict::IsClass);
        assert_eq!(c.basis.unwrap(), vec![perm("123"), perm("132")]);

        let c = classify(&perm("123")).unwrap();
        assert_eq!(c.verdict, Verdict::NotClass);
        let w = c.witness.unwrap();
        assert!(w.alpha.contains(&w.pattern).is_some());
        assert_eq!(w.pattern, perm("132"));
        assert!(!is_sortable(&w.pattern, &perm("123")).unwrap());

        let c = classify(&perm("54321")).unwrap();
        assert_eq!(c.basis.unwrap(), vec![perm("12345"), perm("132")]);
        assert!(classify(&perm("1")).is_err());
    }

    #[test]
    fn length_two_special_cases() {
        let c = classify(&perm("12")).unwrap();
        assert_eq!(c.basis.unwrap(), vec![perm("213")]);
        let c = classify(&perm("21")).unwrap();
        let w = c.witness.unwrap();
        assert!(is_sortable(&w.alpha, &perm("21")).unwrap());
        assert!(!is_sortable(&w.pattern, &perm("21")).unwrap());
        assert!(w.alpha.contains(&w.pattern).is_some());
    }

    #[test]
    fn bases_are_antichains() {
        for n in 3..=6 {
            for s in all_permutations(n) {
                if let Some(b) = classify(&s).unwrap().basis {
                    assert!(is_antichain(&b), "{s}");
                }
            }
        }
    }

    #[test]
    fn witness_examples() {
        assert_eq!(nonclass_witness(&perm("231")).unwrap(), perm("361425"));
        assert_eq!(nonclass_witness(&perm("132")).unwrap(), perm("2413"));
        assert!(nonclass_witness(&perm("321")).is_err());
        assert!(nonclass_witness(&perm("12")).is_err());
        // 4321: σ̂ = 3421 contains 231
        assert!(nonclass_witness(&perm("4321")).is_err());
    }

    #[test]
    fn witnesses_are_valid_for_lengths_four_to_six() {
        let p132 = perm("132");
        for n in 4..=6 {
            for s in all_permutations(n).filter(hat_avoids_231) {
                let a = nonclass_witness(&s).unwrap();
                assert_eq!(a.len(), n + 1);
                assert!(a.contains(&p132).is_some(), "{s} -> {a}");
                assert!(is_sortable(&a, &s).unwrap(), "{s} -> {a}");
                assert!(!is_sortable(&p132, &s).unwrap());
            }
        }
    }

    #[test]
    fn table_rows_for_length_three() {
        for (s, a, p) in LENGTH_THREE_WITNESSES {
            let (s, a, p) = (perm(s), perm(a), perm(p));
            assert!(is_sortable(&a, &s).unwrap());
            assert!(!is_sortable(&p, &s).unwrap());
            assert!(a.contains(&p).is_some());
        }
    }

    #[test]
    fn nonclass_counts() {
        assert_eq!(count_nonclass(3).unwrap(), BigUint::from(5u32));
        assert_eq!(count_nonclass(4).unwrap(), BigUint::from(14u32));
        assert_eq!(count_nonclass(7).unwrap(), BigUint::from(429u32));
        for n in 3..=8 {
            assert_eq!(BigUint::from(count_nonclass_exhaustive(n)), catalan_number(n));
        }
        assert_eq!(count_nonclass(12).unwrap(), BigUint::from(208012u32));
        assert!(count_nonclass(2).is_err());
    }

    #[test]
    fn two_element_basis() {
        assert!(has_two_element_basis(&perm("321")).unwrap());
        assert!(has_two_element_basis(&perm("54123")).unwrap());
        assert!(!has_two_element_basis(&perm("213")).unwrap());
        assert!(has_two_element_basis(&perm("231")).is_err());
        for n in 3..=6 {
            for s in all_permutations(n).filter(|s| s.avoids(&perm("231"))) {
                let c = classify(&s).unwrap();
                let two = c.basis.as_ref().is_some_and(|b| b.len() == 2);
                assert_eq!(has_two_element_basis(&s).unwrap(), two, "{s}");
            }
        }
    }

    #[test]
    fn closure_examples() {
        let sets = sorted_sets(&perm("123"), 5);
        assert!(matches!(is_downward_closed(&sets, 5).unwrap(), Closure::Violation { .. }));
        assert!(closure_violations(&sets, 5).contains(&(perm("4132"), perm("132"))));

        let av: Vec<BTreeSet<_>> = (0..=6)
            .map(|n| all_permutations(n).filter(|p| p.avoids(&perm("231"))).collect())
            .collect();
        assert_eq!(is_downward_closed(&av, 6).unwrap(), Closure::ClosedUpTo(6));

        let sets = sorted_sets(&perm("321"), 6);
        assert_eq!(is_downward_closed(&sets, 6).unwrap(), Closure::ClosedUpTo(6));

        assert!(matches!(is_downward_closed(&sets, 7), Err(Error::IncompleteInput(_))));
        let mut bad = sets.clone();
        bad[3].insert(perm("12"));
        assert!(is_downward_closed(&bad, 6).is_err());
    }

    #[test]
    fn classify_agrees_with_brute_force_closure() {
        let up_to = 8;
        for k in 3..=4 {
            for s in all_permutations(k) {
                let status = classify(&s).unwrap();
                let sets = sorted_sets(&s, up_to);
                let closure = is_downward_closed(&sets, up_to).unwrap();
                match status.verdict {
                    Verdict::NotClass => assert!(matches!(closure, Closure::Violation { .. }), "{s}"),
                    Verdict::IsClass => {
                        assert_eq!(closure, Closure::ClosedUpTo(up_to), "{s}");
                        let basis = status.basis.unwrap();
                        for (n, set) in sets.iter().enumerate() {
                            let av = all_permutations(n).filter(|p| p.avoids_all(&basis)).count();
                            assert_eq!(set.len(), av, "{s} n={n}");
                        }
                    }
                }
            }
        }
    }
}
