//! The four command type systems.
//!
//! Each system is available in two presentations: the recursive safety
//! predicates and typing functions ([`analyze`]), and the inductive typing
//! rules, decided by exhaustive derivation ([`oracle`]). [`check_lemma_equiv`]
//! compares them.

mod analysis;
pub mod flags;
mod lemma;
pub mod oracle;

pub use analysis::{analyze, first_failure, Analysis, SystemId};
pub use lemma::{check_lemma_equiv, recursive_types, LemmaCheck, LemmaReport, TypeSet};
pub use oracle::{deriv_set_rw, deriv_set_rw_with, deriv_set_vs, derivable_expr_levels, LevelSet, PairSet, WhileRule};
