//! The type systems restated over two-valued flags.
//!
//! Over `{lo, hi}` every typing function collapses to a boolean (`fhigh`,
//! `high`, `low`, `wlow`), and the safety predicates become plain boolean
//! recursions over those flags. This module computes them that way, without
//! any lattice arithmetic, as a second route to [`super::analyze`].
//!
//! Where a clause can be simplified using `fhigh ⟹ safe1` or
//! `high ⟹ safe3 ∧ safe4`, the simplified form is used. The analogous
//! shortcut with the reading flag `low` is *not* valid: `l := h` reads
//! nothing, so it is `low`, yet it is rejected by every system.

use crate::lang::{vars_of, BExp, AExp, Cmd, Level, SecEnv};
use crate::typing::{level_of, TypeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Flags {
    pub safe1: bool,
    pub safe2: bool,
    pub safe3: bool,
    pub safe4: bool,
    pub fhigh: bool,
    pub high: bool,
    pub low: bool,
    pub wlow: bool,
    pub no_while: bool,
}

fn all_low<'a>(vars: impl IntoIterator<Item = &'a String>, env: &SecEnv) -> Result<bool, TypeError> {
    let mut ok = true;
    for x in vars {
        ok &= level_of(env, x)? == Level::Lo;
    }
    Ok(ok)
}

fn low_exp(e: &AExp, env: &SecEnv) -> Result<bool, TypeError> {
    all_low(&vars_of(e), env)
}

fn low_test(t: &BExp, env: &SecEnv) -> Result<bool, TypeError> {
    all_low(&vars_of(t), env)
}

pub fn flags(c: &Cmd, env: &SecEnv) -> Result<Flags, TypeError> {
    Ok(match c {
        Cmd::Assign(x, e) => {
            let high = level_of(env, x)? == Level::Hi;
            let safe = high || low_exp(e, env)?;
            Flags {
                safe1: safe,
                safe2: safe,
                safe3: safe,
                safe4: safe,
                fhigh: high,
                high,
                low: true,
                wlow: true,
                no_while: true,
            }
        }
        Cmd::Seq(a, b) => {
            let (a, b) = (flags(a, env)?, flags(b, env)?);
            Flags {
                safe1: a.safe1 && b.safe1,
                safe2: a.safe2 && b.safe2,
                safe3: a.safe3 && b.safe3 && (a.low || b.high),
                safe4: (a.safe1 && b.safe4) || (a.safe4 && b.high),
                fhigh: a.fhigh && b.fhigh,
                high: a.high && b.high,
                low: a.low && b.low,
                wlow: a.wlow && b.wlow,
                no_while: a.no_while && b.no_while,
            }
        }
        Cmd::If(t, a, b) => {
            let lt = low_test(t, env)?;
            let (a, b) = (flags(a, env)?, flags(b, env)?);
            let fhigh = a.fhigh && b.fhigh;
            let high = a.high && b.high;
            Flags {
                safe1: if lt { a.safe1 && b.safe1 } else { fhigh },
                safe2: lt && a.safe2 && b.safe2,
                safe3: if lt { a.safe3 && b.safe3 } else { high },
                safe4: if lt { a.safe4 && b.safe4 } else { high },
                fhigh,
                high,
                low: lt && a.low && b.low,
                wlow: (lt && a.wlow && b.wlow) || (a.no_while && b.no_while),
                no_while: a.no_while && b.no_while,
            }
        }
        Cmd::While(t, body) => {
            let lt = low_test(t, env)?;
            let c = flags(body, env)?;
            let safe1 = lt && c.safe1;
            Flags {
                safe1,
                safe2: lt && c.safe2,
                safe3: c.safe3 && ((lt && c.low) || c.high),
                safe4: safe1 || c.high,
                fhigh: false,
                high: c.high,
                low: lt && c.low,
                wlow: lt && c.wlow,
                no_while: false,
            }
        }
        Cmd::Par(a, b) => {
            let (a, b) = (flags(a, env)?, flags(b, env)?);
            Flags {
                safe1: a.safe1 && b.safe1,
                safe2: a.safe2 && b.safe2,
                safe3: a.safe3 && b.safe3,
                safe4: a.safe4 && b.safe4,
                fhigh: a.fhigh && b.fhigh,
                high: a.high && b.high,
                low: a.low && b.low,
                wlow: a.wlow && b.wlow,
                no_while: a.no_while && b.no_while,
            }
        }
    })
}
