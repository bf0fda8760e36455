use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::lang::{AExp, ArithOp, BExp, CmpOp, Level, SecEnv};

use super::SemanticsError;

/// Largest supported modulus; keeps products of two values inside `i64`.
pub const MAX_MODULUS: i64 = 1 << 16;

/// The variables a store ranges over, with their levels, and the modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StoreDomain {
    names: Vec<String>,
    levels: Vec<Level>,
    modulus: i64,
}

impl StoreDomain {
    pub fn new(env: &SecEnv, modulus: i64) -> Result<Arc<Self>, SemanticsError> {
        if !(2..=MAX_MODULUS).contains(&modulus) {
            return Err(SemanticsError::InvalidModulus(modulus));
        }
        Ok(Arc::new(StoreDomain {
            names: env.vars().map(str::to_string).collect(),
            levels: env.iter().map(|(_, l)| l).collect(),
            modulus,
        }))
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn level(&self, idx: usize) -> Level {
        self.levels[idx]
    }

    /// Number of distinct stores, or `None` on overflow.
    pub fn store_count(&self) -> Option<usize> {
        let m = usize::try_from(self.modulus).ok()?;
        (0..self.names.len()).try_fold(1usize, |acc, _| acc.checked_mul(m))
    }

    /// Every store, in lexicographic order of the value vector.
    pub fn all_states(self: &Arc<Self>) -> impl Iterator<Item = State> + '_ {
        let total = self.store_count().unwrap_or(usize::MAX);
        let n = self.names.len();
        (0..total).map(move |mut k| {
            let mut values = vec![0i64; n];
            for slot in values.iter_mut().rev() {
                *slot = (k % self.modulus as usize) as i64;
                k /= self.modulus as usize;
            }
            State { domain: Arc::clone(self), values }
        })
    }
}

/// A store: one value in `[0, m)` per declared variable.
#[derive(Clone)]
pub struct State {
    domain: Arc<StoreDomain>,
    values: Vec<i64>,
}

impl State {
    pub fn new(domain: Arc<StoreDomain>, values: Vec<i64>) -> Result<Self, SemanticsError> {
        if values.len() != domain.len() {
            return Err(SemanticsError::DomainMismatch);
        }
        if let Some(&v) = values.iter().find(|v| !(0..domain.modulus).contains(*v)) {
            return Err(SemanticsError::ValueOutOfRange { value: v, modulus: domain.modulus });
        }
        Ok(State { domain, values })
    }

    /// Builds a store from `(name, value)` pairs; unnamed variables are 0.
    pub fn from_pairs(domain: Arc<StoreDomain>, pairs: &[(&str, i64)]) -> Result<Self, SemanticsError> {
        let mut values = vec![0; domain.len()];
        for (name, v) in pairs {
            let idx = domain
                .index_of(name)
                .ok_or_else(|| SemanticsError::UnknownVariable(name.to_string()))?;
            values[idx] = *v;
        }
        State::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<StoreDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.domain.index_of(name).map(|i| self.values[i])
    }

    pub(crate) fn lookup(&self, name: &str) -> Result<i64, SemanticsError> {
        self.get(name).ok_or_else(|| SemanticsError::UnknownVariable(name.to_string()))
    }

    pub(crate) fn with(&self, name: &str, v: i64) -> Result<State, SemanticsError> {
        let idx = self
            .domain
            .index_of(name)
            .ok_or_else(|| SemanticsError::UnknownVariable(name.to_string()))?;
        let mut values = self.values.clone();
        values[idx] = v;
        Ok(State { domain: Arc::clone(&self.domain), values })
    }

    /// The values of low variables, in name order.
    pub fn low_projection(&self) -> Vec<i64> {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.domain.level(*i) == Level::Lo)
            .map(|(_, v)| *v)
            .collect()
    }
}

// Equality, ordering and hashing look at values only; states are only ever
// compared within a single domain.
impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for State {}

impl Hash for State {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.values.hash(h);
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        self.values.cmp(&other.values)
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (name, v)) in self.domain.names.iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={v}")?;
        }
        f.write_str("}")
    }
}

/// Arithmetic modulo the store's modulus; subtraction wraps into `[0, m)`.
pub fn eval_aexp(e: &AExp, s: &State) -> Result<i64, SemanticsError> {
    let m = s.domain.modulus;
    Ok(match e {
        AExp::Const(n) => (*n % m as u64) as i64,
        AExp::Var(x) => s.lookup(x)?,
        AExp::BinOp(op, l, r) => {
            let (a, b) = (eval_aexp(l, s)?, eval_aexp(r, s)?);
            match op {
                ArithOp::Add => (a + b).rem_euclid(m),
                ArithOp::Sub => (a - b).rem_euclid(m),
                ArithOp::Mul => (a * b).rem_euclid(m),
            }
        }
    })
}

/// Comparisons act on the reduced representatives in `[0, m)`.
pub fn eval_bexp(b: &BExp, s: &State) -> Result<bool, SemanticsError> {
    Ok(match b {
        BExp::Bool(v) => *v,
        BExp::Cmp(op, l, r) => {
            let (x, y) = (eval_aexp(l, s)?, eval_aexp(r, s)?);
            match op {
                CmpOp::Eq => x == y,
                CmpOp::Lt => x < y,
                CmpOp::Le => x <= y,
            }
        }
        BExp::Not(inner) => !eval_bexp(inner, s)?,
        BExp::And(l, r) => eval_bexp(l, s)? && eval_bexp(r, s)?,
        BExp::Or(l, r) => eval_bexp(l, s)? || eval_bexp(r, s)?,
    })
}

/// `s ≈ t`: agreement on every low variable.
pub fn low_equiv(s: &State, t: &State, env: &SecEnv) -> Result<bool, SemanticsError> {
    if s.domain.names != t.domain.names || s.domain.modulus != t.domain.modulus {
        return Err(SemanticsError::DomainMismatch);
    }
    for (i, name) in s.domain.names.iter().enumerate() {
        let level = env
            .get(name)
            .ok_or_else(|| SemanticsError::UnknownVariable(name.clone()))?;
        if level == Level::Lo && s.values[i] != t.values[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> SecEnv {
        [("l", Level::Lo), ("h", Level::Hi)].into_iter().collect()
    }

    fn st(m: i64, l: i64, h: i64) -> State {
        State::from_pairs(StoreDomain::new(&env(), m).unwrap(), &[("l", l), ("h", h)]).unwrap()
    }

    #[test]
    fn arithmetic_wraps() {
        let s = st(4, 2, 0);
        assert_eq!(eval_aexp(&AExp::add(AExp::var("l"), AExp::Const(3)), &s), Ok(1));
        assert_eq!(eval_aexp(&AExp::sub(AExp::Const(0), AExp::Const(1)), &s), Ok(3));
        assert_eq!(eval_aexp(&AExp::var("h"), &s), Ok(0));
        assert_eq!(eval_aexp(&AExp::Const(9), &s), Ok(1));
    }

    #[test]
    fn tests_evaluate() {
        let s = st(4, 1, 0);
        assert_eq!(eval_bexp(&BExp::lt(AExp::var("l"), AExp::Const(2)), &s), Ok(true));
        assert_eq!(eval_bexp(&BExp::not(BExp::Bool(true)), &s), Ok(false));
        let both = BExp::and(
            BExp::eq(AExp::var("h"), AExp::Const(0)),
            BExp::eq(AExp::var("l"), AExp::Const(0)),
        );
        assert_eq!(eval_bexp(&both, &s), Ok(false));
    }

    #[test]
    fn low_equivalence() {
        let e = env();
        assert_eq!(low_equiv(&st(2, 0, 0), &st(2, 0, 1), &e), Ok(true));
        assert_eq!(low_equiv(&st(2, 0, 0), &st(2, 1, 0), &e), Ok(false));
        assert_eq!(low_equiv(&st(2, 1, 1), &st(2, 1, 1), &e), Ok(true));
        assert_eq!(low_equiv(&st(2, 0, 0), &st(3, 0, 0), &e), Err(SemanticsError::DomainMismatch));
    }

    #[test]
    fn enumerates_all_stores_in_order() {
        let d = StoreDomain::new(&env(), 3).unwrap();
        let all: Vec<_> = d.all_states().map(|s| s.values().to_vec()).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[8], vec![2, 2]);
    }

    #[test]
    fn rejects_bad_values() {
        let d = StoreDomain::new(&env(), 2).unwrap();
        assert!(State::new(Arc::clone(&d), vec![0, 2]).is_err());
        assert!(State::new(d, vec![0]).is_err());
        assert!(StoreDomain::new(&env(), 1).is_err());
    }
}
