//! Security typing of arithmetic expressions and tests.
//!
//! An expression or test is typable at every level above its minimal type,
//! the join of the levels of the variables it mentions.

use thiserror::Error;

use crate::lang::{vars_of, AExp, BExp, Level, SecEnv};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("variable `{0}` has no security level")]
    UnknownVariable(String),
}

/// Either side of the expression/test split; both are typed the same way.
#[derive(Debug, Clone, Copy)]
pub enum ExprOrTest<'a> {
    Exp(&'a AExp),
    Test(&'a BExp),
}

impl<'a> From<&'a AExp> for ExprOrTest<'a> {
    fn from(e: &'a AExp) -> Self {
        ExprOrTest::Exp(e)
    }
}

impl<'a> From<&'a BExp> for ExprOrTest<'a> {
    fn from(b: &'a BExp) -> Self {
        ExprOrTest::Test(b)
    }
}

pub(crate) fn level_of(env: &SecEnv, x: &str) -> Result<Level, TypeError> {
    env.get(x).ok_or_else(|| TypeError::UnknownVariable(x.to_string()))
}

/// Join of the levels of the variables in `e`; `Lo` for variable-free terms.
pub fn min_tp<'a>(e: impl Into<ExprOrTest<'a>>, env: &SecEnv) -> Result<Level, TypeError> {
    let vars = match e.into() {
        ExprOrTest::Exp(a) => vars_of(a),
        ExprOrTest::Test(b) => vars_of(b),
    };
    vars.iter().try_fold(Level::Lo, |acc, x| Ok(acc.join(level_of(env, x)?)))
}

/// `e :: l`, decided through the minimal type.
pub fn has_type<'a>(e: impl Into<ExprOrTest<'a>>, l: Level, env: &SecEnv) -> Result<bool, TypeError> {
    Ok(min_tp(e, env)?.leq(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> SecEnv {
        [("l", Level::Lo), ("l2", Level::Lo), ("h", Level::Hi)].into_iter().collect()
    }

    #[test]
    fn min_tp_examples() {
        let e = env();
        assert_eq!(min_tp(&AExp::add(AExp::var("h"), AExp::Const(1)), &e), Ok(Level::Hi));
        assert_eq!(min_tp(&AExp::Const(42), &e), Ok(Level::Lo));
        assert_eq!(min_tp(&AExp::add(AExp::var("l"), AExp::var("h")), &e), Ok(Level::Hi));
        assert_eq!(min_tp(&BExp::lt(AExp::var("l"), AExp::var("l2")), &e), Ok(Level::Lo));
    }

    #[test]
    fn has_type_examples() {
        let e = env();
        let lh = AExp::add(AExp::var("l"), AExp::var("h"));
        assert_eq!(has_type(&lh, Level::Hi, &e), Ok(true));
        assert_eq!(has_type(&lh, Level::Lo, &e), Ok(false));
        assert_eq!(has_type(&AExp::Const(7), Level::Lo, &e), Ok(true));
    }

    #[test]
    fn unknown_variable() {
        assert_eq!(
            min_tp(&AExp::var("z"), &env()),
            Err(TypeError::UnknownVariable("z".into()))
        );
    }
}
