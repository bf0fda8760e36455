//! The parallel while-language: syntax trees, concrete grammar, and
//! syntactic utilities.

mod ast;
pub mod enumerate;
mod level;
pub mod parse;
pub mod print;

pub use ast::{no_while, vars_of, AExp, ArithOp, BExp, Cmd, CmpOp, HasVars, Program, SecEnv};
pub use enumerate::{enumerate_aexps, enumerate_bexps, enumerate_cmds, random_cmd, RandomSpec};
pub use level::{leq, Level};
pub use parse::{parse_program, parse_program_spanned, ParseError, ParseErrorKind, Pos, SpanTree};
pub use print::pretty_print;
