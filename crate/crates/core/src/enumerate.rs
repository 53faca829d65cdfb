//! Counting: exhaustive scans of `S_n`, closed formulas, and generating-function
//! expansions, with the bookkeeping needed to cross-check one against another.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::SigmaMachine;
use crate::perm::{factorial, perm, LexPermutations, PatternMatcher, Permutation};
use crate::paths::{avoids_uhd, SchroderPath};
use crate::series::{expand_rational, Polynomial, PowerSeries};

/// Largest permutation length an exhaustive scan may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_n: usize,
}

impl Budget {
    pub const DEFAULT: Budget = Budget { max_n: 10 };
    pub const EXTENDED: Budget = Budget { max_n: 11 };

    pub fn check(self, n: usize) -> Result<()> {
        if n > self.max_n {
            let hint = if n <= Budget::EXTENDED.max_n { " (use extended mode)" } else { "" };
            return Err(Error::BudgetExceeded { n, limit: self.max_n, hint });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

/// Splits `S_n` into contiguous lexicographic rank ranges.
fn rank_chunks(n: usize) -> Vec<(u64, u64)> {
    let total = factorial(n);
    let chunk = (total / 512).max(5040);
    (0..total.div_ceil(chunk)).map(|i| (i * chunk, chunk.min(total - i * chunk))).collect()
}

fn machine_for(sigma: &Permutation) -> Result<SigmaMachine> {
    SigmaMachine::new(sigma)
}

/// `|Sort_n(σ)|` by running the machine on every permutation of length `n`.
pub fn brute_sortable(sigma: &Permutation, n: usize, budget: Budget) -> Result<u64> {
    brute_sortable_with_progress(sigma, n, budget, &|_, _| {})
}

/// As [`brute_sortable`]; `progress(done, total)` is called as rank ranges finish.
pub fn brute_sortable_with_progress(
    sigma: &Permutation,
    n: usize,
    budget: Budget,
    progress: &(dyn Fn(u64, u64) + Sync),
) -> Result<u64> {
    budget.check(n)?;
    let proto = machine_for(sigma)?;
    let total = factorial(n);
    let done = std::sync::atomic::AtomicU64::new(0);
    let count = rank_chunks(n)
        .into_par_iter()
        .map_init(
            || proto.clone(),
            |m, (start, len)| {
                let mut c = 0u64;
                LexPermutations::range(n, start, len).for_each_slice(|p| {
                    if m.sorts(p) {
                        c += 1;
                    }
                });
                let d = done.fetch_add(len, std::sync::atomic::Ordering::Relaxed) + len;
                progress(d, total);
                c
            },
        )
        .sum();
    Ok(count)
}

/// Single-threaded scan in lexicographic order.
pub fn brute_sortable_serial(sigma: &Permutation, n: usize, budget: Budget) -> Result<u64> {
    budget.check(n)?;
    let mut m = machine_for(sigma)?;
    let mut c = 0;
    LexPermutations::new(n).for_each_slice(|p| {
        if m.sorts(p) {
            c += 1;
        }
    });
    Ok(c)
}

/// The members of `Sort_n(σ)` in lexicographic order.
pub fn sortable_members(sigma: &Permutation, n: usize) -> Result<Vec<Permutation>> {
    Budget::DEFAULT.check(n)?;
    let proto = machine_for(sigma)?;
    let chunks: Vec<Vec<Permutation>> = rank_chunks(n)
        .into_par_iter()
        .map_init(
            || proto.clone(),
            |m, (start, len)| LexPermutations::range(n, start, len).filter(|p| m.sorts(p.values())).collect(),
        )
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// `|Av_n(patterns)|` by scanning all of `S_n`.
pub fn av_count_scan(patterns: &[Permutation], n: usize, budget: Budget) -> Result<u64> {
    budget.check(n)?;
    let matchers: Vec<PatternMatcher> = patterns.iter().map(PatternMatcher::new).collect();
    Ok(rank_chunks(n)
        .into_par_iter()
        .map(|(start, len)| {
            let mut c = 0u64;
            LexPermutations::range(n, start, len).for_each_slice(|p| {
                if matchers.iter().all(|m| !m.occurs(p)) {
                    c += 1;
                }
            });
            c
        })
        .sum())
}

/// `|Av_n(p, q)|`, exhaustively: permutations are built left to right and a
/// branch is dropped as soon as its prefix contains `p` or `q`, since every
/// completion would too.
pub fn av_pair_count(p: &Permutation, q: &Permutation, n: usize, budget: Budget) -> Result<u64> {
    budget.check(n)?;
    // occurrences ending at the newest entry are anchored occurrences of the
    // reversed pattern in the reversed prefix
    let matchers = [PatternMatcher::new(&p.reverse()), PatternMatcher::new(&q.reverse())];
    fn grow(n: usize, rev: &mut Vec<u32>, used: &mut [bool], ms: &[PatternMatcher]) -> u64 {
        if rev.len() == n {
            return 1;
        }
        let mut total = 0;
        for v in 1..=n as u32 {
            if used[v as usize - 1] {
                continue;
            }
            rev.insert(0, v);
            if !ms.iter().any(|m| m.occurs_anchored(rev)) {
                used[v as usize - 1] = true;
                total += grow(n, rev, used, ms);
                used[v as usize - 1] = false;
            }
            rev.remove(0);
        }
        total
    }
    if n == 0 {
        return Ok(u64::from(!p.is_empty() && !q.is_empty()));
    }
    Ok((1..=n as u32)
        .into_par_iter()
        .map(|v| {
            let mut rev = vec![v];
            if matchers.iter().any(|m| m.occurs(&rev)) {
                return 0;
            }
            let mut used = vec![false; n];
            used[v as usize - 1] = true;
            grow(n, &mut rev, &mut used, &matchers)
        })
        .sum())
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `C_n = binom(2n, n) / (n + 1)`.
pub fn catalan_number(n: usize) -> BigUint {
    binomial(2 * n as u64, n as u64) / (n as u64 + 1)
}

/// `C_0 … C_N` by the product formula.
pub fn catalan(order: usize) -> Vec<BigUint> {
    (0..=order).map(catalan_number).collect()
}

/// `C(x) = (1 - sqrt(1 - 4x)) / (2x)` through `x^order`.
pub fn catalan_series(order: usize) -> Result<PowerSeries> {
    let root = PowerSeries::from_i64s(&[1, -4], order + 1).sqrt()?;
    let numer = &PowerSeries::one(order + 1) - &root;
    numer.div_exact_scalar(&BigInt::from(2))?.div_x(1)
}

/// `a_n = C_n - 2 C_{n-1}` for `n ≥ 2`, with `a_0 = a_1 = 0`.
pub fn a_seq(order: usize) -> Vec<BigInt> {
    (0..=order)
        .map(|n| {
            if n < 2 {
                BigInt::zero()
            } else {
                BigInt::from(catalan_number(n)) - 2 * BigInt::from(catalan_number(n - 1))
            }
        })
        .collect()
}

/// `A(x) = (1 - 4x + 2x^2 - (1 - 2x) sqrt(1 - 4x)) / (2x)`.
pub fn a_series(order: usize) -> Result<PowerSeries> {
    let o = order + 1;
    let root = PowerSeries::from_i64s(&[1, -4], o).sqrt()?;
    let numer = &PowerSeries::from_i64s(&[1, -4, 2], o) - &(&PowerSeries::from_i64s(&[1, -2], o) * &root);
    numer.div_exact_scalar(&BigInt::from(2))?.div_x(1)
}

/// `x^2 C(x)^4`.
pub fn x2_catalan_fourth(order: usize) -> Result<PowerSeries> {
    let c = catalan_series(order)?;
    Ok(c.pow(4).mul_x(2).truncate(order))
}

/// `#{π ∈ Av_n(231) : π1 π2 π3 ≅ 321}` by scanning `S_n`.
pub fn a_brute(n: usize, budget: Budget) -> Result<u64> {
    budget.check(n)?;
    let m = PatternMatcher::new(&perm("231"));
    let mut c = 0;
    LexPermutations::new(n).for_each_slice(|p| {
        if p.len() >= 3 && p[0] > p[1] && p[1] > p[2] && !m.occurs(p) {
            c += 1;
        }
    });
    Ok(c)
}

/// `|Sort_n(123)| = 1 + Σ_{h=1}^{n-1} (n-h) C_h` for `n ≥ 1`; the empty
/// permutation gives 1 at `n = 0`.
pub fn sort123_count(order: usize) -> Vec<BigUint> {
    (0..=order)
        .map(|n| {
            (1..n).fold(BigUint::one(), |acc, h| acc + catalan_number(h) * BigUint::from((n - h) as u64))
        })
        .collect()
}

/// `(1 - x)^2 / (1 - 2x + x C(x))`.
pub fn sort123_quotient_series(order: usize) -> Result<PowerSeries> {
    let c = catalan_series(order)?;
    let den = &PowerSeries::from_i64s(&[1, -2], order) + &c.mul_x(1).truncate(order);
    PowerSeries::from_i64s(&[1, -2, 1], order).div(&den)
}

/// `1/(1 - x) + x (C(x) - 1) / (1 - x)^2`: paths made only of `H` steps, or
/// `H`s, a nonempty Dyck path, then `H`s.
pub fn sort123_series(order: usize) -> Result<PowerSeries> {
    let c = catalan_series(order)?;
    let one_minus_x = PowerSeries::from_i64s(&[1, -1], order);
    let geo = PowerSeries::one(order).div(&one_minus_x)?;
    let dyck = (&c - &PowerSeries::one(order)).mul_x(1).truncate(order);
    Ok(&geo + &(&(&geo * &dyck) * &geo))
}

/// Number of `UHD`-avoiding Schröder paths of the given semilength, by listing all Schröder paths.
pub fn uhd_avoiding_paths(semilength: usize) -> u64 {
    SchroderPath::all(semilength).iter().filter(|p| avoids_uhd(p)).count() as u64
}

/// `G_k` from `G_{k+1} = G_k - x G_{k-1}`, `G_0 = G_1 = 1`.
pub fn catalan_polynomial(k: usize) -> Polynomial {
    let (mut prev, mut cur) = (Polynomial::one(), Polynomial::one());
    for _ in 1..k {
        let next = &cur - &prev.shift(1);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `Σ_i binom(k - i, i) (-x)^i`.
pub fn catalan_polynomial_closed(k: usize) -> Polynomial {
    Polynomial::new(
        (0..=k / 2)
            .map(|i| {
                let b = BigInt::from(binomial((k - i) as u64, i as u64));
                if i % 2 == 0 { b } else { -b }
            })
            .collect(),
    )
}

/// Coefficients of `F_k = G_k / G_{k+1}`: Dyck paths of height at most `k`.
pub fn bounded_height_count(k: usize, order: usize) -> Result<PowerSeries> {
    expand_rational(&catalan_polynomial(k), &catalan_polynomial(k + 1), order)
}

/// Dyck paths of semilength `0..=order` and height at most `k`, by a walk
/// over heights.
pub fn bounded_height_dp(k: usize, order: usize) -> Vec<BigUint> {
    // ways[h] = number of prefixes of the current length ending at height h
    let mut ways = vec![BigUint::zero(); k + 1];
    ways[0] = BigUint::one();
    let mut out = vec![BigUint::one()];
    for _ in 1..=order {
        for _ in 0..2 {
            let mut next = vec![BigUint::zero(); k + 1];
            for h in 0..=k {
                if ways[h].is_zero() {
                    continue;
                }
                if h < k {
                    next[h + 1] += &ways[h];
                }
                if h > 0 {
                    next[h - 1] += &ways[h];
                }
            }
            ways = next;
        }
        out.push(ways[0].clone());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Formula,
    Gf,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Formula => "formula",
            Method::Gf => "gf",
        })
    }
}

/// Result of comparing a report against another route to the same numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub against: String,
    /// Indices `n` compared.
    pub from: usize,
    pub to: usize,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_mismatch: Option<usize>,
}

/// A named integer sequence together with where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub name: String,
    pub offset: usize,
    #[serde(with = "crate::series::big_list")]
    pub values: Vec<BigInt>,
    pub method: Method,
    pub checks: Vec<CrossCheck>,
}

impl SequenceReport {
    pub fn new(name: impl Into<String>, offset: usize, values: Vec<BigInt>, method: Method) -> Self {
        SequenceReport { name: name.into(), offset, values, method, checks: Vec::new() }
    }

    pub fn from_u64(name: impl Into<String>, offset: usize, values: &[u64], method: Method) -> Self {
        Self::new(name, offset, values.iter().map(|&v| BigInt::from(v)).collect(), method)
    }

    pub fn value_at(&self, n: usize) -> Option<&BigInt> {
        n.checked_sub(self.offset).and_then(|i| self.values.get(i))
    }

    fn last_index(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.offset + self.values.len() - 1)
    }

    /// Compares against `other` on the overlapping index range and records the outcome.
    pub fn cross_check(&mut self, against: impl Into<String>, other: &SequenceReport) -> bool {
        let from = self.offset.max(other.offset);
        let to = match (self.last_index(), other.last_index()) {
            (Some(a), Some(b)) => a.min(b),
            _ => {
                self.checks.push(CrossCheck { against: against.into(), from, to: from, agree: true, first_mismatch: None });
                return true;
            }
        };
        let first_mismatch = (from..=to).find(|&n| self.value_at(n) != other.value_at(n));
        let agree = first_mismatch.is_none();
        self.checks.push(CrossCheck { against: against.into(), from, to, agree, first_mismatch });
        agree
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.agree)
    }

    /// OEIS b-file lines: `n a(n)`.
    pub fn to_bfile(&self) -> String {
        self.values.iter().enumerate().map(|(i, v)| format!("{} {v}\n", i + self.offset)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,value\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{},{v}\n", i + self.offset));
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("{} [{}]\n", self.name, self.method);
        let width = self.values.iter().map(|v| v.to_string().len()).max().unwrap_or(1).max(5);
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("  n={:<3} {:>width$}\n", i + self.offset, v.to_string()));
        }
        for c in &self.checks {
            s.push_str(&format!(
                "  check vs {} on n={}..{}: {}\n",
                c.against,
                c.from,
                c.to,
                if c.agree { "agree".to_string() } else { format!("MISMATCH at n={}", c.first_mismatch.unwrap()) }
            ));
        }
        s
    }
}

/// Brute counts `|Sort_n(σ)|` for `n = 0..=max_n` as a report.
pub fn sortable_sequence(sigma: &Permutation, max_n: usize, budget: Budget) -> Result<SequenceReport> {
    let values = (0..=max_n).map(|n| brute_sortable(sigma, n, budget)).collect::<Result<Vec<_>>>()?;
    Ok(SequenceReport::from_u64(format!("Sort_n({sigma})"), 0, &values, Method::Brute))
}

pub fn to_bigints(v: &[BigUint]) -> Vec<BigInt> {
    v.iter().map(|x| BigInt::from(x.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{first_pass, is_sortable};
    use crate::perm::all_permutations;

    fn u(v: &[BigUint]) -> Vec<u64> {
        v.iter().map(|x| u64::try_from(x).unwrap()).collect()
    }

    fn s(p: &PowerSeries) -> Vec<i64> {
        p.coeffs().iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(brute_sortable(&perm("123"), 11, Budget::DEFAULT), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(av_pair_count(&perm("132"), &perm("123"), 12, Budget::EXTENDED), Err(Error::BudgetExceeded { .. })));
        assert!(Budget::EXTENDED.check(11).is_ok());
    }

    #[test]
    fn brute_examples() {
        assert_eq!(brute_sortable(&perm("231"), 5, Budget::DEFAULT).unwrap(), 102);
        assert_eq!(brute_sortable(&perm("132"), 7, Budget::DEFAULT).unwrap(), 731);
        assert_eq!(brute_sortable(&perm("12"), 0, Budget::DEFAULT).unwrap(), 1);
    }

    #[test]
    fn serial_and_parallel_scans_agree() {
        for sigma in ["123", "231", "4321"] {
            for n in 0..=8 {
                let sigma = perm(sigma);
                assert_eq!(
                    brute_sortable(&sigma, n, Budget::DEFAULT).unwrap(),
                    brute_sortable_serial(&sigma, n, Budget::DEFAULT).unwrap()
                );
            }
        }
    }

    #[test]
    fn members_match_count() {
        let m = sortable_members(&perm("123"), 6).unwrap();
        assert_eq!(m.len() as u64, brute_sortable(&perm("123"), 6, Budget::DEFAULT).unwrap());
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sortability_two_formulations_agree() {
        let p231 = perm("231");
        let sigmas: Vec<Permutation> = (2..=4).flat_map(all_permutations).collect();
        for n in 0..=7 {
            for pi in all_permutations(n) {
                for sigma in &sigmas {
                    let a = is_sortable(&pi, sigma).unwrap();
                    let b = first_pass(&pi, sigma).unwrap().avoids(&p231);
                    assert_eq!(a, b, "{pi} {sigma}");
                }
            }
        }
    }

    #[test]
    fn catalan_examples() {
        assert_eq!(u(&catalan(4)), vec![1, 1, 2, 5, 14]);
        assert_eq!(catalan_number(10), BigUint::from(16796u32));
        let series = catalan_series(30).unwrap();
        assert_eq!(to_bigints(&catalan(30)), series.into_coeffs());
    }

    #[test]
    fn a_examples() {
        let a: Vec<i64> = a_seq(10).iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(a, vec![0, 0, 0, 1, 4, 14, 48, 165, 572, 2002, 7072]);
        for n in 0..=9 {
            assert_eq!(a_brute(n, Budget::DEFAULT).unwrap() as i64, a[n], "n={n}");
        }
        assert_eq!(s(&a_series(10).unwrap()), a);
        // x^2 C^4 runs one index ahead of the sequence
        let shifted = s(&x2_catalan_fourth(10).unwrap());
        assert_eq!(shifted[..10], a[1..]);
    }

    #[test]
    fn sort123_examples() {
        let v = u(&sort123_count(10));
        assert_eq!(v[..7], [1, 1, 2, 5, 13, 35, 99]);
        let gf = s(&sort123_series(10).unwrap());
        assert_eq!(gf.iter().map(|&x| x as u64).collect::<Vec<_>>(), v);
        for n in 1..=8 {
            assert_eq!(uhd_avoiding_paths(n - 1), v[n]);
            assert_eq!(brute_sortable(&perm("123"), n, Budget::DEFAULT).unwrap(), v[n]);
        }
    }

    #[test]
    fn sort123_quotient_is_reciprocal() {
        let q = sort123_quotient_series(12).unwrap();
        let s = sort123_series(12).unwrap();
        assert_eq!(&q * &s, PowerSeries::one(12));
    }

    #[test]
    fn catalan_polynomials() {
        assert_eq!(catalan_polynomial(0), Polynomial::one());
        assert_eq!(catalan_polynomial(1), Polynomial::one());
        assert_eq!(catalan_polynomial(2), Polynomial::from_i64s(&[1, -1]));
        assert_eq!(catalan_polynomial(3), Polynomial::from_i64s(&[1, -2]));
        for k in 0..=20 {
            assert_eq!(catalan_polynomial(k), catalan_polynomial_closed(k), "k={k}");
        }
    }

    #[test]
    fn bounded_height_examples() {
        let row = s(&bounded_height_count(2, 10).unwrap());
        assert_eq!(row, vec![1, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512]);
        assert_eq!(s(&bounded_height_count(4, 7).unwrap())[7], 365);
        assert_eq!(s(&bounded_height_count(6, 8).unwrap())[8], 1416);
        for k in 0..=8 {
            let dp = bounded_height_dp(k, 15);
            let gf = bounded_height_count(k, 15).unwrap();
            assert_eq!(to_bigints(&dp), gf.into_coeffs(), "k={k}");
        }
        // height 0 admits only the empty path
        assert_eq!(u(&bounded_height_dp(0, 3)), vec![1, 0, 0, 0]);
    }

    #[test]
    fn av_pair_examples() {
        for n in 1..=10 {
            assert_eq!(av_pair_count(&perm("132"), &perm("123"), n, Budget::DEFAULT).unwrap(), 1 << (n - 1));
        }
        let row: Vec<u64> = (1..=9)
            .map(|n| av_pair_count(&perm("132"), &perm("43125"), n, Budget::DEFAULT).unwrap())
            .collect();
        assert_eq!(row, vec![1, 2, 5, 14, 41, 121, 355, 1033, 2986]);
        assert_eq!(av_pair_count(&perm("132"), &perm("54123"), 7, Budget::DEFAULT).unwrap(), 355);
    }

    #[test]
    fn generating_tree_matches_full_scan() {
        let pats: Vec<Permutation> = (3..=4).flat_map(all_permutations).collect();
        for q in pats.iter().step_by(3) {
            for n in 0..=7 {
                let p = perm("132");
                assert_eq!(
                    av_pair_count(&p, q, n, Budget::DEFAULT).unwrap(),
                    av_count_scan(&[p.clone(), q.clone()], n, Budget::DEFAULT).unwrap(),
                    "{q} n={n}"
                );
            }
        }
    }

    #[test]
    fn report_cross_check_and_formats() {
        let mut a = SequenceReport::from_u64("c", 0, &[1, 1, 2, 5], Method::Formula);
        let b = SequenceReport::from_u64("c", 1, &[1, 2, 5, 14], Method::Brute);
        assert!(a.cross_check("brute", &b));
        assert_eq!((a.checks[0].from, a.checks[0].to), (1, 3));
        let c = SequenceReport::from_u64("c", 0, &[1, 1, 3], Method::Gf);
        assert!(!a.cross_check("gf", &c));
        assert_eq!(a.checks[1].first_mismatch, Some(2));
        assert_eq!(b.to_bfile(), "1 1\n2 2\n3 5\n4 14\n");
        assert!(a.to_csv().starts_with("n,value\n0,1\n"));
        let big = SequenceReport::new("big", 0, vec![BigInt::from(10).pow(30)], Method::Formula);
        let json = serde_json::to_string(&big).unwrap();
        assert!(json.contains("\"1000000000000000000000000000000\""));
        let back: SequenceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, big);
        let small = serde_json::to_value(&b).unwrap();
        assert_eq!(small["values"], serde_json::json!([1, 2, 5, 14]));
    }
}
