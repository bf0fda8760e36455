//! Semantic counterparts of the syntactic flags, decided exhaustively over
//! bounded stores.

use std::collections::HashMap;

use crate::lang::{BExp, Cmd, SecEnv};

use super::lts::{build_lts, Bounds};
use super::state::{eval_aexp, eval_bexp, State, StoreDomain};
use super::step::Config;
use super::SemanticsError;

/// A reachable configuration whose low store differs from the start store.
pub fn discr_witness(c: &Cmd, env: &SecEnv, bounds: Bounds) -> Result<Option<(State, Config)>, SemanticsError> {
    let lts = build_lts(c, env, bounds)?;
    for &init in lts.initials() {
        let start = &lts.node(init).state;
        let low = start.low_projection();
        let reach = lts.reachable_from(init);
        if let Some(i) = reach.iter_ones().find(|&i| lts.node(i).state.low_projection() != low) {
            return Ok(Some((start.clone(), lts.node(i).clone())));
        }
    }
    Ok(None)
}

/// Discreet: no execution ever changes the low part of the store.
pub fn discr(c: &Cmd, env: &SecEnv, bounds: Bounds) -> Result<bool, SemanticsError> {
    Ok(discr_witness(c, env, bounds)?.is_none())
}

/// A start store from which no terminated configuration is reachable.
pub fn may_terminate_witness(c: &Cmd, env: &SecEnv, bounds: Bounds) -> Result<Option<State>, SemanticsError> {
    let lts = build_lts(c, env, bounds)?;
    for &init in lts.initials() {
        if !lts.reachable_from(init).iter_ones().any(|i| lts.is_terminated(i)) {
            return Ok(Some(lts.node(init).state.clone()));
        }
    }
    Ok(None)
}

/// May-terminate: every start store has some terminating execution.
pub fn may_terminate(c: &Cmd, env: &SecEnv, bounds: Bounds) -> Result<bool, SemanticsError> {
    Ok(may_terminate_witness(c, env, bounds)?.is_none())
}

/// Groups every store of `domain` by its low projection.
fn low_classes(domain: &std::sync::Arc<StoreDomain>) -> Vec<Vec<State>> {
    let mut classes: HashMap<Vec<i64>, Vec<State>> = HashMap::new();
    let mut order = Vec::new();
    for s in domain.all_states() {
        let key = s.low_projection();
        if !classes.contains_key(&key) {
            order.push(key.clone());
        }
        classes.entry(key).or_default().push(s);
    }
    order.into_iter().map(|k| classes.remove(&k).unwrap()).collect()
}

fn domain_for(vars: std::collections::BTreeSet<String>, env: &SecEnv, modulus: i64) -> Result<std::sync::Arc<StoreDomain>, SemanticsError> {
    if let Some(x) = vars.into_iter().find(|x| !env.contains(x)) {
        return Err(SemanticsError::UnknownVariable(x));
    }
    StoreDomain::new(env, modulus)
}

/// Two low-equivalent stores on which the test disagrees.
pub fn cpt_test_witness(b: &BExp, env: &SecEnv, modulus: i64) -> Result<Option<(State, State)>, SemanticsError> {
    let domain = domain_for(crate::lang::vars_of(b), env, modulus)?;
    for class in low_classes(&domain) {
        let first = &class[0];
        let v = eval_bexp(b, first)?;
        for t in &class[1..] {
            if eval_bexp(b, t)? != v {
                return Ok(Some((first.clone(), t.clone())));
            }
        }
    }
    Ok(None)
}

/// Compatible test: evaluates the same on low-equivalent stores.
pub fn cpt_test(b: &BExp, env: &SecEnv, modulus: i64) -> Result<bool, SemanticsError> {
    Ok(cpt_test_witness(b, env, modulus)?.is_none())
}

fn exec_atom(a: &Cmd, s: &State) -> Result<State, SemanticsError> {
    match a {
        Cmd::Assign(x, e) => s.with(x, eval_aexp(e, s)?),
        _ => Err(SemanticsError::NotAnAtom),
    }
}

fn atom_domain(a: &Cmd, env: &SecEnv, modulus: i64) -> Result<std::sync::Arc<StoreDomain>, SemanticsError> {
    if !matches!(a, Cmd::Assign(..)) {
        return Err(SemanticsError::NotAnAtom);
    }
    domain_for(crate::lang::vars_of(a), env, modulus)
}

/// Two low-equivalent stores that the atom maps to low-distinguishable ones.
pub fn cpt_atom_witness(a: &Cmd, env: &SecEnv, modulus: i64) -> Result<Option<(State, State)>, SemanticsError> {
    let domain = atom_domain(a, env, modulus)?;
    for class in low_classes(&domain) {
        let first = &class[0];
        let out = exec_atom(a, first)?.low_projection();
        for t in &class[1..] {
            if exec_atom(a, t)?.low_projection() != out {
                return Ok(Some((first.clone(), t.clone())));
            }
        }
    }
    Ok(None)
}

/// Compatible atom: low-equivalent inputs give low-equivalent outputs.
pub fn cpt_atom(a: &Cmd, env: &SecEnv, modulus: i64) -> Result<bool, SemanticsError> {
    Ok(cpt_atom_witness(a, env, modulus)?.is_none())
}

/// A store whose low part the atom changes.
pub fn pres_atom_witness(a: &Cmd, env: &SecEnv, modulus: i64) -> Result<Option<State>, SemanticsError> {
    let domain = atom_domain(a, env, modulus)?;
    for s in domain.all_states() {
        if exec_atom(a, &s)?.low_projection() != s.low_projection() {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Low-preserving atom: the output store is low-equivalent to the input.
pub fn pres_atom(a: &Cmd, env: &SecEnv, modulus: i64) -> Result<bool, SemanticsError> {
    Ok(pres_atom_witness(a, env, modulus)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{AExp, Level};

    fn env() -> SecEnv {
        [("l", Level::Lo), ("h", Level::Hi)].into_iter().collect()
    }

    fn b2() -> Bounds {
        Bounds::new(2)
    }

    #[test]
    fn discreet_commands() {
        let e = env();
        assert!(discr(&Cmd::assign("h", AExp::add(AExp::var("h"), AExp::Const(1))), &e, b2()).unwrap());
        let (start, _) = discr_witness(&Cmd::assign("l", AExp::Const(0)), &e, b2()).unwrap().unwrap();
        assert_eq!(start.get("l"), Some(1));
        let c = Cmd::seq(Cmd::assign("h", AExp::Const(1)), Cmd::assign("h", AExp::Const(0)));
        assert!(discr(&c, &e, b2()).unwrap());
    }

    #[test]
    fn termination() {
        let e = env();
        let spin = Cmd::while_(BExp::Bool(true), Cmd::assign("h", AExp::var("h")));
        assert!(!may_terminate(&spin, &e, b2()).unwrap());
        assert!(may_terminate(&Cmd::assign("l", AExp::Const(0)), &e, b2()).unwrap());
        let c = Cmd::if_(BExp::eq(AExp::var("h"), AExp::Const(0)), Cmd::assign("h", AExp::Const(1)), spin);
        let s = may_terminate_witness(&c, &e, b2()).unwrap().unwrap();
        assert_ne!(s.get("h"), Some(0));
    }

    #[test]
    fn compatible_tests() {
        let e = env();
        assert!(cpt_test(&BExp::lt(AExp::var("l"), AExp::Const(2)), &e, 2).unwrap());
        let (s, t) = cpt_test_witness(&BExp::eq(AExp::var("h"), AExp::Const(0)), &e, 2).unwrap().unwrap();
        assert_ne!(s.get("h"), t.get("h"));
        assert!(cpt_test(&BExp::Bool(true), &e, 2).unwrap());
    }

    #[test]
    fn compatible_atoms() {
        let e = env();
        assert!(!cpt_atom(&Cmd::assign("l", AExp::var("h")), &e, 2).unwrap());
        assert!(cpt_atom(&Cmd::assign("h", AExp::var("l")), &e, 2).unwrap());
        assert!(cpt_atom(&Cmd::assign("l", AExp::Const(1)), &e, 2).unwrap());
        assert_eq!(
            cpt_atom(&Cmd::while_(BExp::Bool(true), Cmd::assign("l", AExp::Const(1))), &e, 2),
            Err(SemanticsError::NotAnAtom)
        );
    }

    #[test]
    fn preserving_atoms() {
        let e = env();
        assert!(pres_atom(&Cmd::assign("h", AExp::var("l")), &e, 2).unwrap());
        let s = pres_atom_witness(&Cmd::assign("l", AExp::Const(0)), &e, 2).unwrap().unwrap();
        assert_eq!(s.get("l"), Some(1));
        // Writes a low variable, but never changes it.
        assert!(pres_atom(&Cmd::assign("l", AExp::var("l")), &e, 2).unwrap());
    }
}
