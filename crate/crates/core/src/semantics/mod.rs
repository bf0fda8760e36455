//! Interleaving small-step semantics over bounded stores, and decision
//! procedures for noninterference properties on the resulting finite graphs.

mod bisim;
mod lts;
mod predicates;
mod state;
mod step;

use thiserror::Error;

pub use bisim::{
    secure, secure_in, Counterexample, Mismatch, SecBisimMode, SecurityRelation, Side, Verdict,
    MAX_RELATION_NODES,
};
pub use lts::{build_lts, Bounds, Lts, DEFAULT_NODE_CAP};
pub use predicates::{
    cpt_atom, cpt_atom_witness, cpt_test, cpt_test_witness, discr, discr_witness, may_terminate,
    may_terminate_witness, pres_atom, pres_atom_witness,
};
pub use state::{eval_aexp, eval_bexp, low_equiv, State, StoreDomain, MAX_MODULUS};
pub use step::{step, Config, Residual};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("variable `{0}` is not in the store")]
    UnknownVariable(String),
    #[error("modulus {0} out of range (2..={max})", max = MAX_MODULUS)]
    InvalidModulus(i64),
    #[error("value {value} outside [0, {modulus})")]
    ValueOutOfRange { value: i64, modulus: i64 },
    #[error("stores range over different variables or moduli")]
    DomainMismatch,
    #[error("configuration graph exceeds the node cap of {cap}")]
    NodeCapExceeded { cap: usize },
    #[error("configuration graph has {nodes} nodes; pair relations are limited to {limit}")]
    RelationTooLarge { nodes: usize, limit: usize },
    #[error("expected an assignment")]
    NotAnAtom,
}
