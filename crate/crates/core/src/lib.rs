//! Pattern-avoiding stacks in series.
//!
//! A σ-machine passes its input through a stack whose contents must avoid
//! σ, then through a stack that must stay increasing. This crate runs those
//! machines, decides when their sortable permutations form a class, counts
//! them, and implements the lattice-path bijections for the `123` case.

#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod enumerate;
pub mod error;
pub mod machine;
pub mod paths;
pub mod perm;
pub mod series;
pub mod tables;
pub mod verify;

pub use classify::{classify, nonclass_witness, sigma_hat, ClassStatus, NonClassWitness, Verdict};
pub use enumerate::{brute_sortable, Budget, Method, SequenceReport};
pub use error::{Error, Result};
pub use machine::{can_push, first_pass, is_sortable, run_machine, stacksort, Move, MachineTrace, RestrictedStack, SigmaMachine};
pub use paths::{DyckPath, SchroderPath, Step};
pub use perm::{perm, PatternMatcher, Permutation};
pub use series::{Polynomial, PowerSeries};
