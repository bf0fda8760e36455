//! Exhaustive and seeded-random command generators used to build test corpora.

use std::collections::BTreeSet;

use rand::Rng;

use super::ast::{AExp, ArithOp, BExp, Cmd, CmpOp};

fn dedup<T: Ord + Clone>(xs: &[T]) -> Vec<T> {
    let mut seen = BTreeSet::new();
    xs.iter().filter(|x| seen.insert((*x).clone())).cloned().collect()
}

/// Every command with at most `max_nodes` command constructors, atoms drawn
/// from `vars × expr_pool` and guards from `test_pool`.
///
/// Commands are listed by size, then by constructor (`:=`, `;`, `||`, `if`,
/// `while`), then by operands in pool order. Duplicate pool entries are
/// ignored.
pub fn enumerate_cmds(
    max_nodes: usize,
    vars: &[String],
    expr_pool: &[AExp],
    test_pool: &[BExp],
) -> Vec<Cmd> {
    let vars = dedup(vars);
    let exprs = dedup(expr_pool);
    let tests = dedup(test_pool);

    // by_size[n] holds the commands of size exactly n.
    let mut by_size: Vec<Vec<Cmd>> = vec![Vec::new(); max_nodes + 1];
    for n in 1..=max_nodes {
        let mut out = Vec::new();
        if n == 1 {
            for x in &vars {
                for e in &exprs {
                    out.push(Cmd::Assign(x.clone(), e.clone()));
                }
            }
        } else {
            let pairs = |out: &mut Vec<Cmd>, mk: &dyn Fn(Cmd, Cmd) -> Cmd| {
                for i in 1..n - 1 {
                    for a in &by_size[i] {
                        for b in &by_size[n - 1 - i] {
                            out.push(mk(a.clone(), b.clone()));
                        }
                    }
                }
            };
            pairs(&mut out, &Cmd::seq);
            pairs(&mut out, &Cmd::par);
            for t in &tests {
                pairs(&mut out, &|a, b| Cmd::if_(t.clone(), a, b));
            }
            for t in &tests {
                for body in &by_size[n - 1] {
                    out.push(Cmd::while_(t.clone(), body.clone()));
                }
            }
        }
        by_size[n] = out;
    }
    by_size.into_iter().flatten().collect()
}

/// Every arithmetic expression with at most `max_nodes` nodes, built from
/// `leaves` with all three operators, listed by size.
pub fn enumerate_aexps(max_nodes: usize, leaves: &[AExp]) -> Vec<AExp> {
    aexps_by_size(max_nodes, leaves).into_iter().flatten().collect()
}

fn aexps_by_size(max_nodes: usize, leaves: &[AExp]) -> Vec<Vec<AExp>> {
    let mut by_size: Vec<Vec<AExp>> = vec![Vec::new(); max_nodes + 1];
    for n in 1..=max_nodes {
        if n == 1 {
            by_size[1] = dedup(leaves);
            continue;
        }
        let mut out = Vec::new();
        for op in [ArithOp::Add, ArithOp::Sub, ArithOp::Mul] {
            for i in 1..n - 1 {
                for l in &by_size[i] {
                    for r in &by_size[n - 1 - i] {
                        out.push(AExp::bin(op, l.clone(), r.clone()));
                    }
                }
            }
        }
        by_size[n] = out;
    }
    by_size
}

/// Every test with at most `max_nodes` nodes (arithmetic subterms included),
/// with comparison operands drawn from [`enumerate_aexps`] over `leaves`.
pub fn enumerate_bexps(max_nodes: usize, leaves: &[AExp]) -> Vec<BExp> {
    let arith = aexps_by_size(max_nodes, leaves);
    let mut by_size: Vec<Vec<BExp>> = vec![Vec::new(); max_nodes + 1];
    for n in 1..=max_nodes {
        let mut out = Vec::new();
        if n == 1 {
            out.extend([BExp::Bool(true), BExp::Bool(false)]);
        }
        for op in [CmpOp::Eq, CmpOp::Lt, CmpOp::Le] {
            for i in 1..n.saturating_sub(1) {
                for l in &arith[i] {
                    for r in &arith[n - 1 - i] {
                        out.push(BExp::Cmp(op, l.clone(), r.clone()));
                    }
                }
            }
        }
        if n >= 2 {
            for b in &by_size[n - 1] {
                out.push(BExp::not(b.clone()));
            }
        }
        for mk in [BExp::and as fn(BExp, BExp) -> BExp, BExp::or] {
            for i in 1..n.saturating_sub(1) {
                for l in &by_size[i] {
                    for r in &by_size[n - 1 - i] {
                        out.push(mk(l.clone(), r.clone()));
                    }
                }
            }
        }
        by_size[n] = out;
    }
    by_size.into_iter().flatten().collect()
}

/// Knobs for [`random_cmd`].
#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub vars: Vec<String>,
    pub max_depth: usize,
    /// Depth bound for generated arithmetic expressions.
    pub expr_depth: usize,
    /// Constants are drawn from `0..max_const`.
    pub max_const: u64,
}

impl RandomSpec {
    pub fn new(vars: Vec<String>, max_depth: usize) -> Self {
        Self { vars, max_depth, expr_depth: 2, max_const: 3 }
    }
}

pub fn random_aexp<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec, depth: usize) -> AExp {
    if depth <= 1 || rng.random_bool(0.5) {
        if spec.vars.is_empty() || rng.random_bool(0.4) {
            AExp::Const(rng.random_range(0..spec.max_const.max(1)))
        } else {
            AExp::Var(spec.vars[rng.random_range(0..spec.vars.len())].clone())
        }
    } else {
        let op = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul][rng.random_range(0..3)];
        let l = random_aexp(rng, spec, depth - 1);
        let r = random_aexp(rng, spec, depth - 1);
        AExp::bin(op, l, r)
    }
}

pub fn random_bexp<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec, depth: usize) -> BExp {
    let pick = if depth <= 1 { rng.random_range(0..2) } else { rng.random_range(0..5) };
    match pick {
        0 => BExp::Bool(rng.random_bool(0.5)),
        1 => {
            let op = [CmpOp::Eq, CmpOp::Lt, CmpOp::Le][rng.random_range(0..3)];
            BExp::Cmp(op, random_aexp(rng, spec, spec.expr_depth), random_aexp(rng, spec, spec.expr_depth))
        }
        2 => BExp::not(random_bexp(rng, spec, depth - 1)),
        3 => BExp::and(random_bexp(rng, spec, depth - 1), random_bexp(rng, spec, depth - 1)),
        _ => BExp::or(random_bexp(rng, spec, depth - 1), random_bexp(rng, spec, depth - 1)),
    }
}

/// A random command of depth at most `spec.max_depth` (at least 1).
pub fn random_cmd<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec) -> Cmd {
    random_cmd_at(rng, spec, spec.max_depth.max(1))
}

fn random_cmd_at<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec, depth: usize) -> Cmd {
    let atom = |rng: &mut R| {
        let x = spec.vars[rng.random_range(0..spec.vars.len())].clone();
        Cmd::Assign(x, random_aexp(rng, spec, spec.expr_depth))
    };
    if depth <= 1 || rng.random_bool(0.25) {
        return atom(rng);
    }
    match rng.random_range(0..4) {
        0 => Cmd::seq(random_cmd_at(rng, spec, depth - 1), random_cmd_at(rng, spec, depth - 1)),
        1 => Cmd::if_(
            random_bexp(rng, spec, 2),
            random_cmd_at(rng, spec, depth - 1),
            random_cmd_at(rng, spec, depth - 1),
        ),
        2 => Cmd::while_(random_bexp(rng, spec, 2), random_cmd_at(rng, spec, depth - 1)),
        _ => Cmd::par(random_cmd_at(rng, spec, depth - 1), random_cmd_at(rng, spec, depth - 1)),
    }
}
