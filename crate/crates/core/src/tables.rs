//! Golden tables, loaded from the JSON fixtures shipped with the crate.

use serde::{Deserialize, Serialize};

use crate::perm::Permutation;
use crate::series::Polynomial;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonClassRow {
    pub sigma: Permutation,
    pub sortable: Permutation,
    pub pattern: Permutation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonClassTable {
    pub description: String,
    pub rows: Vec<NonClassRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoBasisRow {
    pub length: usize,
    pub patterns: Vec<Permutation>,
    /// Factors of the numerator, lowest degree first.
    pub numerator: Vec<Vec<i64>>,
    pub denominator: Vec<Vec<i64>>,
    /// Index of the first printed term.
    pub offset: usize,
    pub sequence: Vec<u64>,
    pub oeis: Option<String>,
}

impl TwoBasisRow {
    fn product(factors: &[Vec<i64>]) -> Polynomial {
        factors.iter().fold(Polynomial::one(), |acc, f| &acc * &Polynomial::from_i64s(f))
    }

    pub fn numerator_poly(&self) -> Polynomial {
        Self::product(&self.numerator)
    }

    pub fn denominator_poly(&self) -> Polynomial {
        Self::product(&self.denominator)
    }

    /// `(n, printed value)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.sequence.iter().enumerate().map(|(i, &v)| (i + self.offset, v))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoBasisTable {
    pub description: String,
    pub rows: Vec<TwoBasisRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecreasingRow {
    pub k: usize,
    pub values: Vec<u64>,
    pub oeis: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecreasingTable {
    pub description: String,
    pub offset: usize,
    pub rows: Vec<DecreasingRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternRow {
    pub sigma: Permutation,
    pub values: Vec<u64>,
    pub oeis: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternTable {
    pub description: String,
    pub offset: usize,
    pub rows: Vec<PatternRow>,
}

const SEC3: &str = include_str!("../fixtures/sec3_table.json");
const FIG3: &str = include_str!("../fixtures/figure3.json");
const SEC4: &str = include_str!("../fixtures/sec4_table.json");
const SEC6: &str = include_str!("../fixtures/sec6_table.json");

/// Length-3 non-class witnesses.
pub fn nonclass_table() -> NonClassTable {
    serde_json::from_str(SEC3).expect("bundled fixture is valid")
}

/// Two-element-basis classes with their generating functions.
pub fn two_basis_table() -> TwoBasisTable {
    serde_json::from_str(FIG3).expect("bundled fixture is valid")
}

/// Counts for the decreasing-pattern machines, k = 3..7, n = 0..11.
pub fn decreasing_table() -> DecreasingTable {
    serde_json::from_str(SEC4).expect("bundled fixture is valid")
}

/// Counts for σ ∈ {132, 213, 231, 312}, n = 0..11.
pub fn pattern_table() -> PatternTable {
    serde_json::from_str(SEC6).expect("bundled fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        assert_eq!(nonclass_table().rows.len(), 5);
        let fig = two_basis_table();
        assert_eq!(fig.rows.iter().map(|r| r.patterns.len()).sum::<usize>(), 19);
        assert!(fig.rows.iter().all(|r| r.patterns.iter().all(|p| p.len() == r.length)));
        assert_eq!(decreasing_table().rows.len(), 5);
        assert!(pattern_table().rows.iter().all(|r| r.values.len() == 12));
    }

    #[test]
    fn printed_gf_factors_multiply_out() {
        let fig = two_basis_table();
        let r = fig.rows.iter().find(|r| r.patterns[0].to_string() == "32145").unwrap();
        assert_eq!(r.denominator_poly(), Polynomial::from_i64s(&[-1, 7, -17, 17, -7, 1]));
    }
}
