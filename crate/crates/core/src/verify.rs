//! Recomputes every golden table and cross-check up to a length budget.

use serde::Serialize;

use crate::classify::count_nonclass_exhaustive;
use crate::enumerate::{
    a_brute, a_seq, a_series, av_pair_count, bounded_height_count, brute_sortable, catalan_number, sort123_count,
    sort123_quotient_series, sortable_members, uhd_avoiding_paths, x2_catalan_fourth, Budget,
};
use crate::error::Result;
use crate::machine::{is_sortable, stacksort};
use crate::paths::{schroder_from_sortable123, sortable123_from_schroder};
use crate::perm::{all_permutations, perm, Permutation};
use crate::series::expand_rational;
use crate::tables::{decreasing_table, nonclass_table, pattern_table, two_basis_table};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    /// Largest length examined.
    pub max_n: usize,
    pub compared: usize,
    pub passed: bool,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub budget: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("verification up to n = {}\n", self.budget);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            s.push_str(&format!(
                "  {} {:<width$}  n ≤ {:<2}  {} compared\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_n,
                c.compared
            ));
            for m in c.mismatches.iter().take(5) {
                s.push_str(&format!("       {m}\n"));
            }
            if c.mismatches.len() > 5 {
                s.push_str(&format!("       ... {} more\n", c.mismatches.len() - 5));
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        s.push_str(&format!("{} checks, {failed} failed\n", self.checks.len()));
        s
    }
}

#[derive(Default)]
struct Tally {
    compared: usize,
    mismatches: Vec<String>,
}

impl Tally {
    fn eq<T: PartialEq + std::fmt::Display>(&mut self, what: impl FnOnce() -> String, got: T, want: T) {
        self.compared += 1;
        if got != want {
            self.mismatches.push(format!("{}: got {got}, expected {want}", what()));
        }
    }

    fn finish(self, name: &str, max_n: usize) -> Check {
        Check { name: name.into(), max_n, compared: self.compared, passed: self.mismatches.is_empty(), mismatches: self.mismatches }
    }
}

/// Runs all checks with lengths up to `budget`; lengths above 10 need the extended budget.
pub fn verify_all(budget: usize) -> Result<VerifyReport> {
    verify_with_progress(budget, &mut |_| {})
}

/// As [`verify_all`], calling `on_check` after each check completes.
pub fn verify_with_progress(budget: usize, on_check: &mut dyn FnMut(&Check)) -> Result<VerifyReport> {
    let limit = if budget > Budget::DEFAULT.max_n { Budget::EXTENDED } else { Budget::DEFAULT };
    limit.check(budget)?;
    let mut checks = Vec::new();
    if budget == 0 {
        return Ok(VerifyReport { budget, checks });
    }
    let mut push = |c: Check| {
        on_check(&c);
        checks.push(c);
    };
    let b = budget;
    let p231 = perm("231");

    let top = b.min(9);
    let mut t = Tally::default();
    for n in 0..=top {
        let count = all_permutations(n).filter(|p| stacksort(p).is_identity()).count() as u64;
        let avoiders = all_permutations(n).filter(|p| p.avoids(&p231)).count() as u64;
        t.eq(|| format!("stacksort n={n}"), count, avoiders);
        t.eq(|| format!("stacksort n={n} vs C_n"), count, u64::try_from(catalan_number(n)).unwrap());
    }
    push(t.finish("stacksort sorts Av(231)", top));

    let mut t = Tally::default();
    let p213 = perm("213");
    for n in 0..=top {
        let sortable = sortable_members(&perm("12"), n)?;
        let avoiders: Vec<_> = all_permutations(n).filter(|p| p.avoids(&p213)).collect();
        t.compared += 1;
        if sortable != avoiders {
            t.mismatches.push(format!("n={n}: Sort_n(12) differs from Av_n(213)"));
        }
    }
    push(t.finish("Sort(12) = Av(213)", top));

    let mut t = Tally::default();
    for row in nonclass_table().rows.iter().filter(|r| r.sortable.len() <= b) {
        t.eq(|| format!("{} sortable by {}", row.sortable, row.sigma), is_sortable(&row.sortable, &row.sigma)?, true);
        t.eq(|| format!("{} sortable by {}", row.pattern, row.sigma), is_sortable(&row.pattern, &row.sigma)?, false);
        t.eq(|| format!("{} contains {}", row.sortable, row.pattern), row.sortable.contains(&row.pattern).is_some(), true);
    }
    push(t.finish("table: length-3 non-classes", b));

    let mut t = Tally::default();
    let top_nc = b.min(8);
    for n in 3..=top_nc {
        t.eq(|| format!("non-classes n={n}"), count_nonclass_exhaustive(n), u64::try_from(catalan_number(n)).unwrap());
    }
    push(t.finish("non-classes counted by C_n", top_nc));

    let mut t = Tally::default();
    let dec = decreasing_table();
    for row in &dec.rows {
        let k = row.k;
        let gf = bounded_height_count(k - 1, b)?;
        let rho = Permutation::decreasing(k);
        for (i, &printed) in row.values.iter().enumerate() {
            let n = i + dec.offset;
            if n > b {
                break;
            }
            t.eq(|| format!("k={k} n={n} brute"), brute_sortable(&rho, n, limit)?, printed);
            t.eq(|| format!("k={k} n={n} Av(132,12..k)"), av_pair_count(&perm("132"), &Permutation::identity(k), n, limit)?, printed);
            t.eq(|| format!("k={k} n={n} G_(k-1)/G_k"), gf.coeff(n).to_string(), printed.to_string());
        }
    }
    push(t.finish("table: decreasing patterns", b));

    let mut t = Tally::default();
    for row in two_basis_table().rows {
        let order = row.offset + row.sequence.len() - 1;
        let gf = expand_rational(&row.numerator_poly(), &row.denominator_poly(), order)?;
        for (n, printed) in row.indexed().filter(|&(n, _)| n <= b) {
            t.eq(|| format!("{} n={n} GF", row.patterns[0]), gf.coeff(n).to_string(), printed.to_string());
            for sigma in &row.patterns {
                t.eq(|| format!("{sigma} n={n} Av(132,σ^r)"), av_pair_count(&perm("132"), &sigma.reverse(), n, limit)?, printed);
            }
        }
    }
    push(t.finish("table: two-element bases", b));

    let mut t = Tally::default();
    let pat = pattern_table();
    for row in &pat.rows {
        for (i, &printed) in row.values.iter().enumerate() {
            let n = i + pat.offset;
            if n > b {
                break;
            }
            t.eq(|| format!("σ={} n={n}", row.sigma), brute_sortable(&row.sigma, n, limit)?, printed);
        }
    }
    push(t.finish("table: length-3 patterns", b));

    let mut t = Tally::default();
    const PRINTED_A: [u64; 9] = [0, 0, 1, 4, 14, 48, 165, 572, 2002];
    let top_a = b.min(PRINTED_A.len() - 1);
    let closed = a_seq(top_a);
    let gf = a_series(top_a)?;
    let quartic = x2_catalan_fourth(top_a)?;
    for (n, &printed) in PRINTED_A.iter().enumerate().take(top_a + 1) {
        let printed = printed.to_string();
        t.eq(|| format!("a_{n} closed form"), closed[n].to_string(), printed.clone());
        t.eq(|| format!("a_{n} A(x)"), gf.coeff(n).to_string(), printed.clone());
        t.eq(|| format!("a_{n} x^2 C^4"), quartic.coeff(n).to_string(), printed.clone());
        t.eq(|| format!("a_{n} brute"), a_brute(n, limit)?.to_string(), printed);
    }
    push(t.finish("a_n", top_a));

    let mut t = Tally::default();
    let formula = sort123_count(b);
    let quotient = sort123_quotient_series(b)?;
    for n in 1..=b {
        let f = formula[n].to_string();
        t.eq(|| format!("n={n} brute"), brute_sortable(&perm("123"), n, limit)?.to_string(), f.clone());
        t.eq(|| format!("n={n} UHD-avoiding paths"), uhd_avoiding_paths(n - 1).to_string(), f.clone());
        t.eq(|| format!("n={n} (1-x)^2/(1-2x+xC)"), quotient.coeff(n).to_string(), f);
    }
    push(t.finish("Sort(123) counts", b));

    let mut t = Tally::default();
    for n in 1..=top {
        for p in sortable_members(&perm("123"), n)? {
            let back = sortable123_from_schroder(&schroder_from_sortable123(&p)?)?;
            t.compared += 1;
            if back != p {
                t.mismatches.push(format!("{p} maps back to {back}"));
            }
        }
    }
    push(t.finish("Schröder bijection round trip", top));

    Ok(VerifyReport { budget, checks })
}
