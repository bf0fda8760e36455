//! Language-based noninterference for a parallel while-language.
//!
//! Four security type systems are implemented as structurally recursive
//! predicates over commands ([`typesys::analyze`]), checked against
//! exhaustive derivation in the original inductive rules
//! ([`typesys::oracle`]), and validated semantically by deciding security
//! bisimilarity on bounded-integer configuration graphs ([`semantics`]).
//!
//! ```
//! use nicheck::lang::parse_program;
//! use nicheck::typesys::analyze;
//!
//! let p = parse_program("low l; high h; if h = 0 then h := 1 else h := 2 fi; l := 1").unwrap();
//! let a = analyze(&p.body, &p.sec_env).unwrap();
//! assert!(a.safe1 && a.safe4);
//! assert!(!a.safe3);
//! ```

pub mod cli;
pub mod lang;
pub mod report;
pub mod semantics;
pub mod typesys;
pub mod typing;
pub mod validate;

// The guide's Rust snippets run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/language.md")]
    mod language {}
    #[doc = include_str!("../../../book/src/type-systems.md")]
    mod type_systems {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    mod semantics {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
