use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::level::Level;

/// Security classification of program variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SecEnv {
    levels: BTreeMap<String, Level>,
}

impl SecEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous level if `name` was already classified.
    pub fn insert(&mut self, name: impl Into<String>, level: Level) -> Option<Level> {
        self.levels.insert(name.into(), level)
    }

    pub fn get(&self, name: &str) -> Option<Level> {
        self.levels.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.levels.contains_key(name)
    }

    /// Variables in name order.
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.levels.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Level)> {
        self.levels.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, Level)> for SecEnv {
    fn from_iter<I: IntoIterator<Item = (S, Level)>>(iter: I) -> Self {
        let mut env = SecEnv::new();
        for (name, level) in iter {
            env.insert(name, level);
        }
        env
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
        }
    }
}

/// Arithmetic expressions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AExp {
    Const(u64),
    Var(String),
    BinOp(ArithOp, Box<AExp>, Box<AExp>),
}

/// Boolean tests.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BExp {
    Bool(bool),
    Cmp(CmpOp, AExp, AExp),
    Not(Box<BExp>),
    And(Box<BExp>, Box<BExp>),
    Or(Box<BExp>, Box<BExp>),
}

/// Commands of the parallel while-language. Assignment is the only atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cmd {
    Assign(String, AExp),
    Seq(Box<Cmd>, Box<Cmd>),
    If(BExp, Box<Cmd>, Box<Cmd>),
    While(BExp, Box<Cmd>),
    Par(Box<Cmd>, Box<Cmd>),
}

/// A classified command.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub sec_env: SecEnv,
    pub body: Cmd,
}

impl AExp {
    pub fn var(name: impl Into<String>) -> Self {
        AExp::Var(name.into())
    }

    pub fn bin(op: ArithOp, l: AExp, r: AExp) -> Self {
        AExp::BinOp(op, Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(l: AExp, r: AExp) -> Self {
        Self::bin(ArithOp::Add, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(l: AExp, r: AExp) -> Self {
        Self::bin(ArithOp::Sub, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(l: AExp, r: AExp) -> Self {
        Self::bin(ArithOp::Mul, l, r)
    }

    /// Number of expression nodes.
    pub fn size(&self) -> usize {
        match self {
            AExp::Const(_) | AExp::Var(_) => 1,
            AExp::BinOp(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            AExp::Const(_) => {}
            AExp::Var(x) => {
                out.insert(x.clone());
            }
            AExp::BinOp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl BExp {
    pub fn cmp(op: CmpOp, l: AExp, r: AExp) -> Self {
        BExp::Cmp(op, l, r)
    }

    pub fn eq(l: AExp, r: AExp) -> Self {
        BExp::Cmp(CmpOp::Eq, l, r)
    }

    pub fn lt(l: AExp, r: AExp) -> Self {
        BExp::Cmp(CmpOp::Lt, l, r)
    }

    pub fn le(l: AExp, r: AExp) -> Self {
        BExp::Cmp(CmpOp::Le, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(b: BExp) -> Self {
        BExp::Not(Box::new(b))
    }

    pub fn and(l: BExp, r: BExp) -> Self {
        BExp::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: BExp, r: BExp) -> Self {
        BExp::Or(Box::new(l), Box::new(r))
    }

    /// Number of expression nodes, counting arithmetic subterms.
    pub fn size(&self) -> usize {
        match self {
            BExp::Bool(_) => 1,
            BExp::Cmp(_, l, r) => 1 + l.size() + r.size(),
            BExp::Not(b) => 1 + b.size(),
            BExp::And(l, r) | BExp::Or(l, r) => 1 + l.size() + r.size(),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            BExp::Bool(_) => {}
            BExp::Cmp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            BExp::Not(b) => b.collect_vars(out),
            BExp::And(l, r) | BExp::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl Cmd {
    pub fn assign(x: impl Into<String>, e: AExp) -> Self {
        Cmd::Assign(x.into(), e)
    }

    pub fn seq(a: Cmd, b: Cmd) -> Self {
        Cmd::Seq(Box::new(a), Box::new(b))
    }

    pub fn if_(t: BExp, a: Cmd, b: Cmd) -> Self {
        Cmd::If(t, Box::new(a), Box::new(b))
    }

    pub fn while_(t: BExp, body: Cmd) -> Self {
        Cmd::While(t, Box::new(body))
    }

    pub fn par(a: Cmd, b: Cmd) -> Self {
        Cmd::Par(Box::new(a), Box::new(b))
    }

    /// Number of command constructors, atoms included.
    pub fn size(&self) -> usize {
        match self {
            Cmd::Assign(..) => 1,
            Cmd::Seq(a, b) | Cmd::Par(a, b) | Cmd::If(_, a, b) => 1 + a.size() + b.size(),
            Cmd::While(_, c) => 1 + c.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Cmd::Assign(..) => 1,
            Cmd::Seq(a, b) | Cmd::Par(a, b) | Cmd::If(_, a, b) => 1 + a.depth().max(b.depth()),
            Cmd::While(_, c) => 1 + c.depth(),
        }
    }

    /// Immediate command children, left to right.
    pub fn children(&self) -> Vec<&Cmd> {
        match self {
            Cmd::Assign(..) => vec![],
            Cmd::Seq(a, b) | Cmd::Par(a, b) | Cmd::If(_, a, b) => vec![a, b],
            Cmd::While(_, c) => vec![c],
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Cmd::Assign(x, e) => {
                out.insert(x.clone());
                e.collect_vars(out);
            }
            Cmd::Seq(a, b) | Cmd::Par(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Cmd::If(t, a, b) => {
                t.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Cmd::While(t, c) => {
                t.collect_vars(out);
                c.collect_vars(out);
            }
        }
    }
}

/// Anything with a set of variable occurrences.
pub trait HasVars {
    fn vars(&self) -> BTreeSet<String>;
}

impl HasVars for AExp {
    fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl HasVars for BExp {
    fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl HasVars for Cmd {
    fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

/// All variables read or written in `node`.
pub fn vars_of<T: HasVars + ?Sized>(node: &T) -> BTreeSet<String> {
    node.vars()
}

/// True iff no `While` occurs anywhere in `c`.
pub fn no_while(c: &Cmd) -> bool {
    match c {
        Cmd::Assign(..) => true,
        Cmd::Seq(a, b) | Cmd::Par(a, b) | Cmd::If(_, a, b) => no_while(a) && no_while(b),
        Cmd::While(..) => false,
    }
}

impl fmt::Display for AExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::aexp_to_string(self))
    }
}

impl fmt::Display for BExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::bexp_to_string(self))
    }
}

impl fmt::Display for Cmd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::cmd_inline(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn vars_of_expressions() {
        assert_eq!(vars_of(&AExp::add(AExp::var("l"), AExp::Const(1))), set(&["l"]));
        assert_eq!(vars_of(&AExp::Const(42)), set(&[]));
        assert_eq!(vars_of(&BExp::eq(AExp::var("l"), AExp::var("h"))), set(&["l", "h"]));
    }

    #[test]
    fn vars_of_commands_include_guards_and_targets() {
        let c = Cmd::while_(
            BExp::lt(AExp::var("a"), AExp::Const(2)),
            Cmd::assign("b", AExp::var("c")),
        );
        assert_eq!(vars_of(&c), set(&["a", "b", "c"]));
    }

    #[test]
    fn no_while_examples() {
        assert!(no_while(&Cmd::assign("l", AExp::Const(0))));
        let w = Cmd::while_(BExp::Bool(true), Cmd::assign("h", AExp::Const(0)));
        assert!(!no_while(&w));
        let i = Cmd::if_(
            BExp::eq(AExp::var("h"), AExp::Const(0)),
            Cmd::assign("h", AExp::Const(1)),
            Cmd::assign("h", AExp::Const(2)),
        );
        assert!(no_while(&i));
        assert!(!no_while(&Cmd::par(i, w)));
    }

    #[test]
    fn sizes() {
        let a = Cmd::assign("l", AExp::Const(0));
        assert_eq!(a.size(), 1);
        assert_eq!(Cmd::seq(a.clone(), a.clone()).size(), 3);
        assert_eq!(Cmd::while_(BExp::Bool(true), a.clone()).size(), 2);
        assert_eq!(Cmd::if_(BExp::Bool(true), a.clone(), a).size(), 3);
    }
}
