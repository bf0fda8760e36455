//! Rule-faithful derivability oracles.
//!
//! Each function computes the full set of types a term can be given by the
//! inductive typing rules, by applying the syntax-directed rules to the
//! derivable sets of the immediate subterms and then saturating under the
//! subtyping rule. None of this goes through the recursive characterisations
//! in [`super::analysis`]; the two are compared in [`super::lemma`].

use std::collections::BTreeSet;

use crate::lang::{no_while, vars_of, Cmd, Level, SecEnv};
use crate::typing::{level_of, ExprOrTest, TypeError};

use super::SystemId;

pub type LevelSet = BTreeSet<Level>;
/// Pairs `(write, read)`.
pub type PairSet = BTreeSet<(Level, Level)>;

/// Which loop rule the write/read systems use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhileRule {
    /// Guard typed at the read level: `tst :: l'`, `c : (l, l')`, `l' ≤ l`.
    Standard,
    /// Guard typed separately: `tst :: l0`, `c : (l, l')`, `l0 ∨ l' ≤ l`,
    /// concluding `(l, l0 ∨ l')`.
    Primed,
}

/// Levels derivable for an expression or test from the base rules
/// ("`lo` if every variable is low", "`hi` always") closed upward.
pub fn derivable_expr_levels<'a>(
    e: impl Into<ExprOrTest<'a>>,
    env: &SecEnv,
) -> Result<LevelSet, TypeError> {
    let vars = match e.into() {
        ExprOrTest::Exp(a) => vars_of(a),
        ExprOrTest::Test(b) => vars_of(b),
    };
    let mut all_low = true;
    for x in &vars {
        if level_of(env, x)? != Level::Lo {
            all_low = false;
        }
    }
    let mut base = LevelSet::from([Level::Hi]);
    if all_low {
        base.insert(Level::Lo);
    }
    Ok(close_up(&base))
}

fn close_up(s: &LevelSet) -> LevelSet {
    Level::ALL
        .into_iter()
        .filter(|k| s.iter().any(|l| l.leq(*k)))
        .collect()
}

fn close_down(s: &LevelSet) -> LevelSet {
    Level::ALL
        .into_iter()
        .filter(|k| s.iter().any(|l| k.leq(*l)))
        .collect()
}

/// Closure under the command subtyping rule: write type downward, read type upward.
fn close_pairs(s: &PairSet) -> PairSet {
    let mut out = PairSet::new();
    for w in Level::ALL {
        for r in Level::ALL {
            if s.iter().any(|(w1, r1)| w.leq(*w1) && r1.leq(r)) {
                out.insert((w, r));
            }
        }
    }
    out
}

/// `{ l : c ::_sys l }` for the single-level systems `Vs1` and `Vs2`.
///
/// # Panics
///
/// If `sys` is a write/read system.
pub fn deriv_set_vs(c: &Cmd, env: &SecEnv, sys: SystemId) -> Result<LevelSet, TypeError> {
    assert!(sys.is_single_level(), "{sys} types commands with level pairs");
    let concluded: LevelSet = match c {
        Cmd::Assign(x, e) => {
            let lx = level_of(env, x)?;
            if derivable_expr_levels(e, env)?.contains(&lx) {
                LevelSet::from([lx])
            } else {
                LevelSet::new()
            }
        }
        Cmd::Seq(a, b) | Cmd::Par(a, b) => {
            let da = deriv_set_vs(a, env, sys)?;
            let db = deriv_set_vs(b, env, sys)?;
            da.intersection(&db).copied().collect()
        }
        Cmd::If(t, a, b) => {
            let tt = derivable_expr_levels(t, env)?;
            let da = deriv_set_vs(a, env, sys)?;
            let db = deriv_set_vs(b, env, sys)?;
            da.intersection(&db)
                .copied()
                .filter(|l| match sys {
                    SystemId::Vs1 => tt.contains(l),
                    _ => tt.contains(&Level::Lo),
                })
                .collect()
        }
        Cmd::While(t, body) => {
            let tt = derivable_expr_levels(t, env)?;
            let db = deriv_set_vs(body, env, sys)?;
            if tt.contains(&Level::Lo) && !db.is_empty() {
                LevelSet::from([Level::Lo])
            } else {
                LevelSet::new()
            }
        }
    };
    Ok(close_down(&concluded))
}

/// `{ (l, l') : c ::_sys (l, l') }` for the write/read systems `Bc` and `Mb`.
pub fn deriv_set_rw(c: &Cmd, env: &SecEnv, sys: SystemId) -> Result<PairSet, TypeError> {
    deriv_set_rw_with(c, env, sys, WhileRule::Standard)
}

/// As [`deriv_set_rw`] with an explicit choice of loop rule.
///
/// # Panics
///
/// If `sys` is a single-level system.
pub fn deriv_set_rw_with(
    c: &Cmd,
    env: &SecEnv,
    sys: SystemId,
    rule: WhileRule,
) -> Result<PairSet, TypeError> {
    assert!(!sys.is_single_level(), "{sys} types commands with single levels");
    let rec = |sub: &Cmd| deriv_set_rw_with(sub, env, sys, rule);
    let mut concluded = PairSet::new();
    match c {
        Cmd::Assign(x, e) => {
            let lx = level_of(env, x)?;
            if derivable_expr_levels(e, env)?.contains(&lx) {
                for r in Level::ALL {
                    concluded.insert((lx, r));
                }
            }
        }
        Cmd::Seq(a, b) => {
            let da = rec(a)?;
            let db = rec(b)?;
            for &(w1, r1) in &da {
                for &(w2, r2) in &db {
                    if r1.leq(w2) {
                        concluded.insert((w1.meet(w2), r1.join(r2)));
                    }
                }
            }
        }
        Cmd::If(t, a, b) => {
            let tt = derivable_expr_levels(t, env)?;
            let da = rec(a)?;
            let db = rec(b)?;
            let loop_free = no_while(a) && no_while(b);
            for &l0 in &tt {
                for &(w, r) in da.intersection(&db) {
                    if l0.leq(w) {
                        let read = if sys == SystemId::Mb && loop_free { Level::Lo } else { l0.join(r) };
                        concluded.insert((w, read));
                    }
                }
            }
        }
        Cmd::While(t, body) => {
            let tt = derivable_expr_levels(t, env)?;
            let db = rec(body)?;
            for &(w, r) in &db {
                match rule {
                    WhileRule::Standard => {
                        if tt.contains(&r) && r.leq(w) {
                            concluded.insert((w, r));
                        }
                    }
                    WhileRule::Primed => {
                        for &l0 in &tt {
                            if l0.join(r).leq(w) {
                                concluded.insert((w, l0.join(r)));
                            }
                        }
                    }
                }
            }
        }
        Cmd::Par(a, b) => {
            let da = rec(a)?;
            let db = rec(b)?;
            concluded = da.intersection(&db).copied().collect();
        }
    }
    Ok(close_pairs(&concluded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{AExp, BExp};

    fn env() -> SecEnv {
        [("l", Level::Lo), ("l2", Level::Lo), ("h", Level::Hi), ("h2", Level::Hi)]
            .into_iter()
            .collect()
    }

    fn h_is_0() -> BExp {
        BExp::eq(AExp::var("h"), AExp::Const(0))
    }

    use Level::{Hi, Lo};

    #[test]
    fn expression_rules() {
        let e = env();
        assert_eq!(derivable_expr_levels(&AExp::var("l"), &e).unwrap(), LevelSet::from([Lo, Hi]));
        assert_eq!(derivable_expr_levels(&AExp::var("h"), &e).unwrap(), LevelSet::from([Hi]));
        assert_eq!(derivable_expr_levels(&BExp::Bool(true), &e).unwrap(), LevelSet::from([Lo, Hi]));
    }

    #[test]
    fn vs_examples() {
        let e = env();
        let c = Cmd::assign("h", AExp::Const(1));
        assert_eq!(deriv_set_vs(&c, &e, SystemId::Vs1).unwrap(), LevelSet::from([Lo, Hi]));
        let c = Cmd::assign("l", AExp::var("h"));
        assert!(deriv_set_vs(&c, &e, SystemId::Vs1).unwrap().is_empty());
        let c = Cmd::if_(h_is_0(), Cmd::assign("h", AExp::Const(1)), Cmd::assign("h", AExp::Const(2)));
        assert!(deriv_set_vs(&c, &e, SystemId::Vs2).unwrap().is_empty());
        assert_eq!(deriv_set_vs(&c, &e, SystemId::Vs1).unwrap(), LevelSet::from([Lo, Hi]));
    }

    #[test]
    fn rw_examples() {
        let e = env();
        let c = Cmd::assign("h", AExp::Const(1));
        assert_eq!(
            deriv_set_rw(&c, &e, SystemId::Bc).unwrap(),
            PairSet::from([(Lo, Lo), (Lo, Hi), (Hi, Lo), (Hi, Hi)])
        );
        let c = Cmd::assign("l", AExp::var("h"));
        assert!(deriv_set_rw(&c, &e, SystemId::Bc).unwrap().is_empty());
        let c = Cmd::while_(h_is_0(), Cmd::assign("h", AExp::var("h")));
        assert_eq!(deriv_set_rw(&c, &e, SystemId::Bc).unwrap(), PairSet::from([(Lo, Hi), (Hi, Hi)]));
        assert_eq!(
            deriv_set_rw_with(&c, &e, SystemId::Bc, WhileRule::Primed).unwrap(),
            PairSet::from([(Lo, Hi), (Hi, Hi)])
        );
    }

    #[test]
    fn mb_forgets_guards_of_loop_free_branches() {
        let e = env();
        let c = Cmd::if_(h_is_0(), Cmd::assign("h", AExp::Const(1)), Cmd::assign("h", AExp::Const(2)));
        assert!(deriv_set_rw(&c, &e, SystemId::Mb).unwrap().contains(&(Hi, Lo)));
        assert!(!deriv_set_rw(&c, &e, SystemId::Bc).unwrap().contains(&(Hi, Lo)));
    }

    #[test]
    #[should_panic]
    fn vs_oracle_rejects_pair_systems() {
        let _ = deriv_set_vs(&Cmd::assign("h", AExp::Const(1)), &env(), SystemId::Bc);
    }
}
