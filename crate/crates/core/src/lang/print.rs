//! Rendering back into the concrete grammar.
//!
//! Output is minimal-parenthesis but always reparses to the same tree:
//! `+`, `-`, `*`, `and`, `or` are left-associative, `;` is
//! right-associative.

use super::ast::{AExp, ArithOp, BExp, Cmd, Program};
use super::level::Level;

fn arith_prec(e: &AExp) -> u8 {
    match e {
        AExp::BinOp(ArithOp::Add | ArithOp::Sub, ..) => 1,
        AExp::BinOp(ArithOp::Mul, ..) => 2,
        AExp::Const(_) | AExp::Var(_) => 3,
    }
}

fn write_aexp(e: &AExp, out: &mut String) {
    match e {
        AExp::Const(n) => out.push_str(&n.to_string()),
        AExp::Var(x) => out.push_str(x),
        AExp::BinOp(op, l, r) => {
            let p = arith_prec(e);
            write_wrapped(arith_prec(l) < p, out, |o| write_aexp(l, o));
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_wrapped(arith_prec(r) <= p, out, |o| write_aexp(r, o));
        }
    }
}

fn bool_prec(b: &BExp) -> u8 {
    match b {
        BExp::Or(..) => 1,
        BExp::And(..) => 2,
        BExp::Not(_) | BExp::Bool(_) | BExp::Cmp(..) => 3,
    }
}

fn write_bexp(b: &BExp, out: &mut String) {
    match b {
        BExp::Bool(true) => out.push_str("true"),
        BExp::Bool(false) => out.push_str("false"),
        BExp::Cmp(op, l, r) => {
            write_aexp(l, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_aexp(r, out);
        }
        BExp::Not(inner) => {
            out.push_str("not ");
            write_wrapped(bool_prec(inner) < 3, out, |o| write_bexp(inner, o));
        }
        BExp::And(l, r) | BExp::Or(l, r) => {
            let p = bool_prec(b);
            let kw = if p == 1 { " or " } else { " and " };
            write_wrapped(bool_prec(l) < p, out, |o| write_bexp(l, o));
            out.push_str(kw);
            write_wrapped(bool_prec(r) <= p, out, |o| write_bexp(r, o));
        }
    }
}

fn write_wrapped(paren: bool, out: &mut String, f: impl FnOnce(&mut String)) {
    if paren {
        out.push('(');
    }
    f(out);
    if paren {
        out.push(')');
    }
}

pub fn aexp_to_string(e: &AExp) -> String {
    let mut s = String::new();
    write_aexp(e, &mut s);
    s
}

pub fn bexp_to_string(b: &BExp) -> String {
    let mut s = String::new();
    write_bexp(b, &mut s);
    s
}

fn write_inline(c: &Cmd, out: &mut String) {
    match c {
        Cmd::Assign(x, e) => {
            out.push_str(x);
            out.push_str(" := ");
            write_aexp(e, out);
        }
        Cmd::Seq(a, b) => {
            write_wrapped(matches!(**a, Cmd::Seq(..)), out, |o| write_inline(a, o));
            out.push_str("; ");
            write_inline(b, out);
        }
        Cmd::If(t, a, b) => {
            out.push_str("if ");
            write_bexp(t, out);
            out.push_str(" then ");
            write_inline(a, out);
            out.push_str(" else ");
            write_inline(b, out);
            out.push_str(" fi");
        }
        Cmd::While(t, body) => {
            out.push_str("while ");
            write_bexp(t, out);
            out.push_str(" do ");
            write_inline(body, out);
            out.push_str(" od");
        }
        Cmd::Par(a, b) => {
            out.push_str("{ ");
            write_inline(a, out);
            out.push_str(" || ");
            write_inline(b, out);
            out.push_str(" }");
        }
    }
}

/// Single-line rendering of a command.
pub fn cmd_inline(c: &Cmd) -> String {
    let mut s = String::new();
    write_inline(c, &mut s);
    s
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_block(c: &Cmd, depth: usize, out: &mut String) {
    match c {
        Cmd::Seq(a, b) => {
            if matches!(**a, Cmd::Seq(..)) {
                indent(out, depth);
                out.push('(');
                write_inline(a, out);
                out.push(')');
            } else {
                write_block(a, depth, out);
            }
            out.push_str(";\n");
            write_block(b, depth, out);
        }
        Cmd::If(t, a, b) => {
            indent(out, depth);
            out.push_str("if ");
            write_bexp(t, out);
            out.push_str(" then\n");
            write_block(a, depth + 1, out);
            out.push('\n');
            indent(out, depth);
            out.push_str("else\n");
            write_block(b, depth + 1, out);
            out.push('\n');
            indent(out, depth);
            out.push_str("fi");
        }
        Cmd::While(t, body) => {
            indent(out, depth);
            out.push_str("while ");
            write_bexp(t, out);
            out.push_str(" do\n");
            write_block(body, depth + 1, out);
            out.push('\n');
            indent(out, depth);
            out.push_str("od");
        }
        Cmd::Assign(..) | Cmd::Par(..) => {
            indent(out, depth);
            write_inline(c, out);
        }
    }
}

/// Renders a program as declarations (low first) followed by the body.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    for level in Level::ALL {
        let names: Vec<&str> = p
            .sec_env
            .iter()
            .filter(|(_, l)| *l == level)
            .map(|(x, _)| x)
            .collect();
        if !names.is_empty() {
            out.push_str(level.keyword());
            out.push(' ');
            out.push_str(&names.join(", "));
            out.push_str(";\n");
        }
    }
    write_block(&p.body, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::SecEnv;

    #[test]
    fn single_assignment() {
        let p = Program {
            sec_env: [("l", Level::Lo)].into_iter().collect::<SecEnv>(),
            body: Cmd::assign("l", AExp::Const(0)),
        };
        assert_eq!(pretty_print(&p), "low l;\nl := 0");
    }

    #[test]
    fn par_uses_braces() {
        let a = Cmd::assign("l", AExp::Const(1));
        let c = Cmd::par(a.clone(), Cmd::par(a.clone(), a));
        assert_eq!(cmd_inline(&c), "{ l := 1 || { l := 1 || l := 1 } }");
    }

    #[test]
    fn associativity_parens() {
        let x = || AExp::var("x");
        assert_eq!(aexp_to_string(&AExp::sub(x(), AExp::sub(x(), x()))), "x - (x - x)");
        assert_eq!(aexp_to_string(&AExp::sub(AExp::sub(x(), x()), x())), "x - x - x");
        assert_eq!(aexp_to_string(&AExp::mul(AExp::add(x(), x()), x())), "(x + x) * x");
        let t = BExp::Bool(true);
        assert_eq!(
            bexp_to_string(&BExp::and(BExp::or(t.clone(), t.clone()), BExp::not(BExp::and(t.clone(), t)))),
            "(true or true) and not (true and true)"
        );
        let a = Cmd::assign("x", x());
        assert_eq!(
            cmd_inline(&Cmd::seq(Cmd::seq(a.clone(), a.clone()), a)),
            "(x := x; x := x); x := x"
        );
    }
}
