//! Comparison of the two presentations of each type system: derivable types
//! from the rules versus the set described by the recursive functions.

use std::fmt;

use crate::lang::{Cmd, Level, SecEnv};
use crate::typing::TypeError;

use super::oracle::{deriv_set_rw, deriv_set_vs, LevelSet, PairSet};
use super::{analyze, Analysis, SystemId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeSet {
    Levels(LevelSet),
    Pairs(PairSet),
}

impl TypeSet {
    fn render_diff(a: &TypeSet, b: &TypeSet) -> Option<String> {
        match (a, b) {
            (TypeSet::Levels(x), TypeSet::Levels(y)) => {
                x.symmetric_difference(y).next().map(|l| l.to_string())
            }
            (TypeSet::Pairs(x), TypeSet::Pairs(y)) => {
                x.symmetric_difference(y).next().map(|(w, r)| format!("({w}, {r})"))
            }
            _ => Some("<shape mismatch>".into()),
        }
    }
}

impl fmt::Display for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = match self {
            TypeSet::Levels(s) => s.iter().map(Level::to_string).collect(),
            TypeSet::Pairs(s) => s.iter().map(|(w, r)| format!("({w}, {r})")).collect(),
        };
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// One system's comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCheck {
    pub system: SystemId,
    /// Types derivable by the rules.
    pub derived: TypeSet,
    /// Types admitted by the safety predicate and typing functions.
    pub recursive: TypeSet,
}

impl LemmaCheck {
    pub fn agrees(&self) -> bool {
        self.derived == self.recursive
    }

    /// A type in exactly one of the two sets.
    pub fn witness(&self) -> Option<String> {
        TypeSet::render_diff(&self.derived, &self.recursive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub analysis: Analysis,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_agree(&self) -> bool {
        self.checks.iter().all(LemmaCheck::agrees)
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.agrees())
    }
}

/// The recursive side for one system.
pub fn recursive_types(a: &Analysis, sys: SystemId) -> TypeSet {
    let safe = a.safe(sys);
    match sys {
        SystemId::Vs1 | SystemId::Vs2 => TypeSet::Levels(
            Level::ALL
                .into_iter()
                .filter(|l| safe && l.leq(a.max_tp1))
                .collect(),
        ),
        SystemId::Bc | SystemId::Mb => {
            let min_read = if sys == SystemId::Bc { a.min_rtp } else { a.min_trtp };
            let mut pairs = PairSet::new();
            for w in Level::ALL {
                for r in Level::ALL {
                    if safe && w.leq(a.max_wtp) && min_read.leq(r) {
                        pairs.insert((w, r));
                    }
                }
            }
            TypeSet::Pairs(pairs)
        }
    }
}

pub fn check_lemma_equiv(c: &Cmd, env: &SecEnv) -> Result<LemmaReport, TypeError> {
    let analysis = analyze(c, env)?;
    let mut checks = Vec::with_capacity(4);
    for sys in SystemId::ALL {
        let derived = if sys.is_single_level() {
            TypeSet::Levels(deriv_set_vs(c, env, sys)?)
        } else {
            TypeSet::Pairs(deriv_set_rw(c, env, sys)?)
        };
        checks.push(LemmaCheck { system: sys, derived, recursive: recursive_types(&analysis, sys) });
    }
    Ok(LemmaReport { analysis, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::AExp;

    fn env() -> SecEnv {
        [("l", Level::Lo), ("h", Level::Hi)].into_iter().collect()
    }

    #[test]
    fn rejected_assignment_has_empty_sides() {
        let r = check_lemma_equiv(&Cmd::assign("l", AExp::var("h")), &env()).unwrap();
        assert!(r.all_agree());
        for c in &r.checks {
            assert_eq!(c.derived.to_string(), "{}");
        }
    }

    #[test]
    fn accepted_assignment() {
        let r = check_lemma_equiv(&Cmd::assign("h", AExp::var("l")), &env()).unwrap();
        assert!(r.all_agree());
        assert_eq!(r.checks[0].derived, TypeSet::Levels(LevelSet::from([Level::Lo, Level::Hi])));
        assert_eq!(r.checks[0].recursive, r.checks[0].derived);
    }

    #[test]
    fn witness_names_offending_type() {
        let check = LemmaCheck {
            system: SystemId::Bc,
            derived: TypeSet::Pairs(PairSet::from([(Level::Lo, Level::Hi)])),
            recursive: TypeSet::Pairs(PairSet::new()),
        };
        assert!(!check.agrees());
        assert_eq!(check.witness().as_deref(), Some("(lo, hi)"));
    }
}
