use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lang::{Cmd, Level, SecEnv};
use crate::typing::{level_of, min_tp, TypeError};

/// The four command type systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemId {
    /// Volpano-Smith possibilistic: `c ::₁ l`.
    Vs1,
    /// Volpano-Smith scheduler-independent: `c ::₂ l`.
    Vs2,
    /// Boudol-Castellani termination-insensitive: `c ::₃ (l, l')`.
    Bc,
    /// Matos-Boudol termination-reading refinement: `c ::₄ (l, l')`.
    Mb,
}

impl SystemId {
    pub const ALL: [SystemId; 4] = [SystemId::Vs1, SystemId::Vs2, SystemId::Bc, SystemId::Mb];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::Vs1 => "vs1",
            SystemId::Vs2 => "vs2",
            SystemId::Bc => "bc",
            SystemId::Mb => "mb",
        }
    }

    /// Whether commands are typed by a single level rather than a write/read pair.
    pub fn is_single_level(self) -> bool {
        matches!(self, SystemId::Vs1 | SystemId::Vs2)
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SystemId::ALL
            .into_iter()
            .find(|sys| sys.name() == s)
            .ok_or_else(|| format!("unknown type system `{s}`"))
    }
}

/// Every recursive typing function and safety predicate of a command,
/// computed in one structural pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Analysis {
    pub safe1: bool,
    pub safe2: bool,
    pub safe3: bool,
    pub safe4: bool,
    /// Maximal type under `::₁` and `::₂`.
    pub max_tp1: Level,
    /// Maximum writing type.
    pub max_wtp: Level,
    /// Minimum reading type.
    pub min_rtp: Level,
    /// Minimum termination-reading type.
    pub min_trtp: Level,
    pub no_while_flag: bool,
}

impl Analysis {
    pub fn safe(&self, sys: SystemId) -> bool {
        match sys {
            SystemId::Vs1 => self.safe1,
            SystemId::Vs2 => self.safe2,
            SystemId::Bc => self.safe3,
            SystemId::Mb => self.safe4,
        }
    }

    /// Finite and high: writes only high variables and has no loop.
    pub fn fhigh(&self) -> bool {
        self.max_tp1 == Level::Hi
    }

    pub fn high(&self) -> bool {
        self.max_wtp == Level::Hi
    }

    /// Control flow depends on low variables only.
    pub fn low_cmd(&self) -> bool {
        self.min_rtp == Level::Lo
    }

    /// Guards that can affect termination are all low.
    pub fn wlow(&self) -> bool {
        self.min_trtp == Level::Lo
    }

    fn assign(lhs: Level, rhs: Level) -> Self {
        let ok = rhs.leq(lhs);
        Analysis {
            safe1: ok,
            safe2: ok,
            safe3: ok,
            safe4: ok,
            max_tp1: lhs,
            max_wtp: lhs,
            min_rtp: Level::Lo,
            min_trtp: Level::Lo,
            no_while_flag: true,
        }
    }

    fn seq(a: &Self, b: &Self) -> Self {
        Analysis {
            safe1: a.safe1 && b.safe1,
            safe2: a.safe2 && b.safe2,
            safe3: a.safe3 && b.safe3 && a.min_rtp.leq(b.max_wtp),
            safe4: a.safe4 && b.safe4 && a.min_trtp.leq(b.max_wtp),
            max_tp1: a.max_tp1.meet(b.max_tp1),
            max_wtp: a.max_wtp.meet(b.max_wtp),
            min_rtp: a.min_rtp.join(b.min_rtp),
            min_trtp: a.min_trtp.join(b.min_trtp),
            no_while_flag: a.no_while_flag && b.no_while_flag,
        }
    }

    fn cond(guard: Level, a: &Self, b: &Self) -> Self {
        let max_tp1 = a.max_tp1.meet(b.max_tp1);
        let max_wtp = a.max_wtp.meet(b.max_wtp);
        let no_while_flag = a.no_while_flag && b.no_while_flag;
        Analysis {
            safe1: a.safe1 && b.safe1 && guard.leq(max_tp1),
            safe2: guard == Level::Lo && a.safe2 && b.safe2,
            safe3: a.safe3 && b.safe3 && guard.leq(max_wtp),
            safe4: a.safe4 && b.safe4 && guard.leq(max_wtp),
            max_tp1,
            max_wtp,
            min_rtp: guard.join(a.min_rtp).join(b.min_rtp),
            min_trtp: if no_while_flag {
                Level::Lo
            } else {
                guard.join(a.min_trtp).join(b.min_trtp)
            },
            no_while_flag,
        }
    }

    fn while_(guard: Level, body: &Self) -> Self {
        Analysis {
            safe1: body.safe1 && guard == Level::Lo,
            safe2: body.safe2 && guard == Level::Lo,
            safe3: body.safe3 && guard.join(body.min_rtp).leq(body.max_wtp),
            safe4: body.safe4 && guard.join(body.min_trtp).leq(body.max_wtp),
            max_tp1: Level::Lo,
            max_wtp: body.max_wtp,
            min_rtp: guard.join(body.min_rtp),
            min_trtp: guard.join(body.min_trtp),
            no_while_flag: false,
        }
    }

    fn par(a: &Self, b: &Self) -> Self {
        Analysis {
            safe1: a.safe1 && b.safe1,
            safe2: a.safe2 && b.safe2,
            safe3: a.safe3 && b.safe3,
            safe4: a.safe4 && b.safe4,
            max_tp1: a.max_tp1.meet(b.max_tp1),
            max_wtp: a.max_wtp.meet(b.max_wtp),
            min_rtp: a.min_rtp.join(b.min_rtp),
            min_trtp: a.min_trtp.join(b.min_trtp),
            no_while_flag: a.no_while_flag && b.no_while_flag,
        }
    }
}

/// Post-order walk; `visit` sees each subterm's path and analysis.
fn walk(
    c: &Cmd,
    env: &SecEnv,
    path: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize], &Analysis),
) -> Result<Analysis, TypeError> {
    let mut child = |i: usize, sub: &Cmd, path: &mut Vec<usize>| {
        path.push(i);
        let r = walk(sub, env, path, visit);
        path.pop();
        r
    };
    let result = match c {
        Cmd::Assign(x, e) => Analysis::assign(level_of(env, x)?, min_tp(e, env)?),
        Cmd::Seq(a, b) => {
            let a = child(0, a, path)?;
            let b = child(1, b, path)?;
            Analysis::seq(&a, &b)
        }
        Cmd::If(t, a, b) => {
            let guard = min_tp(t, env)?;
            let a = child(0, a, path)?;
            let b = child(1, b, path)?;
            Analysis::cond(guard, &a, &b)
        }
        Cmd::While(t, body) => {
            let guard = min_tp(t, env)?;
            let body = child(0, body, path)?;
            Analysis::while_(guard, &body)
        }
        Cmd::Par(a, b) => {
            let a = child(0, a, path)?;
            let b = child(1, b, path)?;
            Analysis::par(&a, &b)
        }
    };
    visit(path, &result);
    Ok(result)
}

pub fn analyze(c: &Cmd, env: &SecEnv) -> Result<Analysis, TypeError> {
    walk(c, env, &mut Vec::new(), &mut |_, _| {})
}

/// Path (child indices, see [`Cmd::children`]) of the first subterm in
/// post-order that `sys` rejects. All of that subterm's children are
/// accepted, so the rejection is due to its own clause.
pub fn first_failure(c: &Cmd, env: &SecEnv, sys: SystemId) -> Result<Option<Vec<usize>>, TypeError> {
    let mut found: Option<Vec<usize>> = None;
    walk(c, env, &mut Vec::new(), &mut |path, a| {
        if found.is_none() && !a.safe(sys) {
            found = Some(path.to_vec());
        }
    })?;
    Ok(found)
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

    fn num(n: u64) -> AExp {
        AExp::Const(n)
    }

    fn h_is_0() -> BExp {
        BExp::eq(AExp::var("h"), num(0))
    }

    #[test]
    fn low_from_high_is_rejected_everywhere() {
        let a = analyze(&Cmd::assign("l", AExp::var("h")), &env()).unwrap();
        assert!(!a.safe1 && !a.safe2 && !a.safe3 && !a.safe4);
    }

    #[test]
    fn high_loop() {
        let c = Cmd::while_(h_is_0(), Cmd::assign("h", AExp::var("h")));
        let a = analyze(&c, &env()).unwrap();
        assert_eq!(a.max_tp1, Level::Lo);
        assert!(!a.safe1);
        assert!(a.safe3);
        assert!(a.safe4);
        assert_eq!(a.min_rtp, Level::Hi);
    }

    #[test]
    fn high_branch_then_low_write() {
        let c = Cmd::seq(
            Cmd::if_(h_is_0(), Cmd::assign("h", num(1)), Cmd::assign("h", num(2))),
            Cmd::assign("l", num(1)),
        );
        let a = analyze(&c, &env()).unwrap();
        assert!(a.safe1);
        assert!(!a.safe2);
        assert!(!a.safe3);
        assert!(a.safe4);
        assert_eq!(a.min_trtp, Level::Lo);
    }

    #[test]
    fn upward_assignment() {
        let a = analyze(&Cmd::assign("h", AExp::var("l")), &env()).unwrap();
        assert!(a.safe1 && a.safe2 && a.safe3 && a.safe4);
        assert_eq!(a.max_tp1, Level::Hi);
        assert!(a.fhigh());
    }

    #[test]
    fn first_failure_localises() {
        let bad = Cmd::assign("l", AExp::var("h"));
        let c = Cmd::seq(Cmd::assign("h", num(0)), Cmd::par(Cmd::assign("l", num(0)), bad));
        assert_eq!(first_failure(&c, &env(), SystemId::Vs1).unwrap(), Some(vec![1, 1]));
        let ok = Cmd::assign("h", num(0));
        assert_eq!(first_failure(&ok, &env(), SystemId::Mb).unwrap(), None);

        // The Seq node itself is at fault under bc.
        let c = Cmd::seq(
            Cmd::if_(h_is_0(), Cmd::assign("h", num(1)), Cmd::assign("h", num(2))),
            Cmd::assign("l", num(1)),
        );
        assert_eq!(first_failure(&c, &env(), SystemId::Bc).unwrap(), Some(vec![]));
        assert_eq!(first_failure(&c, &env(), SystemId::Vs2).unwrap(), Some(vec![0]));
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let c = Cmd::assign("zz", num(0));
        assert_eq!(analyze(&c, &env()), Err(TypeError::UnknownVariable("zz".into())));
    }

    #[test]
    fn system_names_round_trip() {
        for s in SystemId::ALL {
            assert_eq!(s.name().parse::<SystemId>(), Ok(s));
        }
        assert!("vs3".parse::<SystemId>().is_err());
    }
}
