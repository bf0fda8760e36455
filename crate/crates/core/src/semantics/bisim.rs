//! Security bisimilarity by greatest-fixpoint refinement.
//!
//! Start from every pair of configurations with low-equivalent stores and
//! repeatedly drop pairs that violate the transfer clause of the chosen mode
//! (checked in both directions, so the relation stays symmetric). What is
//! left is the largest security bisimulation of that mode on the graph.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lang::{Cmd, SecEnv};

use super::lts::{build_lts, Bounds, Lts};
use super::step::Config;
use super::SemanticsError;

/// Largest graph the pair relation is materialised for (`n²` bits).
pub const MAX_RELATION_NODES: usize = 60_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SecBisimMode {
    /// Lock-step: each step matched by exactly one step, termination matched by termination.
    #[serde(rename = "strong")]
    Strong,
    /// Each step matched by zero or one step.
    #[serde(rename = "zo")]
    ZeroOne,
    /// Each step matched by any number of steps.
    #[serde(rename = "weak")]
    Weak,
    /// `Weak`, and termination must be matched by reachable termination.
    #[serde(rename = "weakt")]
    WeakT,
}

impl SecBisimMode {
    pub const ALL: [SecBisimMode; 4] =
        [SecBisimMode::Strong, SecBisimMode::ZeroOne, SecBisimMode::Weak, SecBisimMode::WeakT];

    pub fn name(self) -> &'static str {
        match self {
            SecBisimMode::Strong => "strong",
            SecBisimMode::ZeroOne => "zo",
            SecBisimMode::Weak => "weak",
            SecBisimMode::WeakT => "weakt",
        }
    }
}

impl fmt::Display for SecBisimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SecBisimMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SecBisimMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Why a pair of configurations is not related.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    /// `mover` can step to `to` and the other side has no related answer.
    UnmatchedStep { mover: Side, to: Config },
    /// `terminated` has finished and the other side cannot answer it.
    Termination { terminated: Side },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub left: Config,
    pub right: Config,
    pub mismatch: Mismatch,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::UnmatchedStep { mover, to } => {
                write!(f, "{} step to {to} has no matching answer", side_name(*mover))
            }
            Mismatch::Termination { terminated } => {
                write!(f, "{} side terminates, other side cannot match", side_name(*terminated))
            }
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vs {}: {}", self.left, self.right, self.mismatch)
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Secure,
    Insecure(Box<Counterexample>),
}

impl Verdict {
    pub fn is_secure(&self) -> bool {
        matches!(self, Verdict::Secure)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Secure => None,
            Verdict::Insecure(cx) => Some(cx),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Failure {
    Step(usize),
    Termination,
}

/// The largest security bisimulation of one mode over an [`Lts`].
pub struct SecurityRelation<'a> {
    lts: &'a Lts,
    mode: SecBisimMode,
    rows: Vec<BitVec>,
    // Keyed by (a, b) with a < b; the side is relative to `a` being left.
    reasons: HashMap<(usize, usize), (Side, Failure)>,
    candidates: usize,
    sizes: Vec<usize>,
}

fn intersects(x: &BitVec, y: &BitVec) -> bool {
    x.as_raw_slice().iter().zip(y.as_raw_slice()).any(|(p, q)| p & q != 0)
}

impl<'a> SecurityRelation<'a> {
    pub fn compute(lts: &'a Lts, mode: SecBisimMode) -> Result<Self, SemanticsError> {
        let n = lts.node_count();
        if n > MAX_RELATION_NODES {
            return Err(SemanticsError::RelationTooLarge { nodes: n, limit: MAX_RELATION_NODES });
        }
        let mut groups: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for i in 0..n {
            groups.entry(lts.node(i).state.low_projection()).or_default().push(i);
        }
        let mut rows = vec![bitvec![0; n]; n];
        let mut candidates = 0;
        for members in groups.values() {
            candidates += members.len() * (members.len() - 1) / 2;
            for &a in members {
                for &b in members {
                    rows[a].set(b, true);
                }
            }
        }

        let needs_reach = matches!(mode, SecBisimMode::Weak | SecBisimMode::WeakT);
        let reach: Vec<BitVec> =
            if needs_reach { (0..n).map(|i| lts.reachable_from(i)).collect() } else { Vec::new() };
        let mut terminal = bitvec![0; n];
        for i in 0..n {
            terminal.set(i, lts.is_terminated(i));
        }

        let mut rel = SecurityRelation {
            lts,
            mode,
            rows,
            reasons: HashMap::new(),
            candidates,
            sizes: Vec::new(),
        };
        rel.sizes.push(rel.pair_count());
        loop {
            let mut changed = false;
            for a in 0..n {
                let partners: Vec<usize> = rel.rows[a].iter_ones().filter(|&b| b > a).collect();
                for b in partners {
                    let failure = rel
                        .clause(a, b, &reach, &terminal)
                        .map(|f| (Side::Left, f))
                        .or_else(|| rel.clause(b, a, &reach, &terminal).map(|f| (Side::Right, f)));
                    if let Some(reason) = failure {
                        rel.rows[a].set(b, false);
                        rel.rows[b].set(a, false);
                        rel.reasons.insert((a, b), reason);
                        changed = true;
                    }
                }
            }
            rel.sizes.push(rel.pair_count());
            if !changed {
                break;
            }
        }
        Ok(rel)
    }

    /// Transfer clause for `(a, b)` with `a` moving; `None` if it holds.
    fn clause(&self, a: usize, b: usize, reach: &[BitVec], terminal: &BitVec) -> Option<Failure> {
        let lts = self.lts;
        let r = &self.rows;
        match self.mode {
            SecBisimMode::Strong => {
                if lts.is_terminated(a) && !lts.is_terminated(b) {
                    return Some(Failure::Termination);
                }
                lts.successors(a)
                    .iter()
                    .find(|&&a2| !lts.successors(b).iter().any(|&b2| r[a2][b2]))
                    .map(|&a2| Failure::Step(a2))
            }
            SecBisimMode::ZeroOne => lts
                .successors(a)
                .iter()
                .find(|&&a2| !(r[a2][b] || lts.successors(b).iter().any(|&b2| r[a2][b2])))
                .map(|&a2| Failure::Step(a2)),
            SecBisimMode::Weak | SecBisimMode::WeakT => {
                if let Some(&a2) = lts.successors(a).iter().find(|&&a2| !intersects(&r[a2], &reach[b])) {
                    return Some(Failure::Step(a2));
                }
                if self.mode == SecBisimMode::WeakT && lts.is_terminated(a) {
                    let answered = r[a]
                        .as_raw_slice()
                        .iter()
                        .zip(reach[b].as_raw_slice())
                        .zip(terminal.as_raw_slice())
                        .any(|((x, y), t)| x & y & t != 0);
                    if !answered {
                        return Some(Failure::Termination);
                    }
                }
                None
            }
        }
    }

    pub fn mode(&self) -> SecBisimMode {
        self.mode
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a][b]
    }

    /// Unordered off-diagonal pairs currently related.
    pub fn pair_count(&self) -> usize {
        let total: usize = self.rows.iter().map(|r| r.count_ones()).sum();
        (total - self.rows.len()) / 2
    }

    /// Unordered off-diagonal low-equivalent pairs the refinement started from.
    pub fn candidate_count(&self) -> usize {
        self.candidates
    }

    /// Relation size before refinement and after each pass.
    pub fn size_history(&self) -> &[usize] {
        &self.sizes
    }

    fn mismatch(&self, a: usize, b: usize) -> Option<Mismatch> {
        let (key, flipped) = if a < b { ((a, b), false) } else { ((b, a), true) };
        let &(side, failure) = self.reasons.get(&key)?;
        let side = if flipped { side.flip() } else { side };
        Some(match failure {
            Failure::Step(to) => Mismatch::UnmatchedStep { mover: side, to: self.lts.node(to).clone() },
            Failure::Termination => Mismatch::Termination { terminated: side },
        })
    }

    /// Secure iff every pair of low-equivalent initial configurations is
    /// related; otherwise the first unrelated pair in store order.
    pub fn verdict(&self) -> Verdict {
        let init = self.lts.initials();
        for (p, &a) in init.iter().enumerate() {
            for &b in &init[p + 1..] {
                if a == b || self.contains(a, b) {
                    continue;
                }
                let (sa, sb) = (&self.lts.node(a).state, &self.lts.node(b).state);
                if sa.low_projection() != sb.low_projection() {
                    continue;
                }
                let mismatch = self.mismatch(a, b).expect("removed pairs carry a reason");
                return Verdict::Insecure(Box::new(Counterexample {
                    left: self.lts.node(a).clone(),
                    right: self.lts.node(b).clone(),
                    mismatch,
                }));
            }
        }
        Verdict::Secure
    }
}

pub fn secure_in(lts: &Lts, mode: SecBisimMode) -> Result<Verdict, SemanticsError> {
    Ok(SecurityRelation::compute(lts, mode)?.verdict())
}

/// Decides whether `c` is related to itself from every pair of
/// low-equivalent stores under `mode`.
pub fn secure(c: &Cmd, env: &SecEnv, bounds: Bounds, mode: SecBisimMode) -> Result<Verdict, SemanticsError> {
    let lts = build_lts(c, env, bounds)?;
    secure_in(&lts, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{AExp, BExp, Level};

    fn env() -> SecEnv {
        [("l", Level::Lo), ("h", Level::Hi)].into_iter().collect()
    }

    fn check(c: &Cmd, mode: SecBisimMode) -> Verdict {
        secure(c, &env(), Bounds::new(2), mode).unwrap()
    }

    #[test]
    fn direct_leak_is_caught_by_every_mode() {
        let c = Cmd::assign("l", AExp::var("h"));
        for mode in SecBisimMode::ALL {
            let v = check(&c, mode);
            let cx = v.counterexample().expect("insecure");
            assert_eq!(cx.left.state.get("l"), cx.right.state.get("l"));
            assert_ne!(cx.left.state.get("h"), cx.right.state.get("h"));
        }
    }

    #[test]
    fn upward_flow_is_secure() {
        let c = Cmd::assign("h", AExp::var("l"));
        for mode in SecBisimMode::ALL {
            assert!(check(&c, mode).is_secure(), "{mode}");
        }
    }

    #[test]
    fn high_loop_separates_termination_sensitivity() {
        let c = Cmd::while_(BExp::eq(AExp::var("h"), AExp::Const(0)), Cmd::assign("h", AExp::var("h")));
        assert!(check(&c, SecBisimMode::Weak).is_secure());
        assert!(check(&c, SecBisimMode::ZeroOne).is_secure());
        assert!(!check(&c, SecBisimMode::WeakT).is_secure());
        assert!(!check(&c, SecBisimMode::Strong).is_secure());
    }

    #[test]
    fn timing_difference_is_strong_only() {
        let c = Cmd::if_(
            BExp::eq(AExp::var("h"), AExp::Const(0)),
            Cmd::assign("h", AExp::Const(1)),
            Cmd::seq(Cmd::assign("h", AExp::Const(1)), Cmd::assign("h", AExp::Const(1))),
        );
        assert!(!check(&c, SecBisimMode::Strong).is_secure());
        assert!(check(&c, SecBisimMode::ZeroOne).is_secure());
        assert!(check(&c, SecBisimMode::Weak).is_secure());
        assert!(check(&c, SecBisimMode::WeakT).is_secure());
    }

    #[test]
    fn refinement_shrinks_monotonically() {
        let c = Cmd::seq(
            Cmd::while_(BExp::eq(AExp::var("h"), AExp::Const(0)), Cmd::assign("h", AExp::var("h"))),
            Cmd::assign("l", AExp::var("h")),
        );
        let lts = build_lts(&c, &env(), Bounds::new(2)).unwrap();
        for mode in SecBisimMode::ALL {
            let rel = SecurityRelation::compute(&lts, mode).unwrap();
            let sizes = rel.size_history();
            assert_eq!(sizes[0], rel.candidate_count());
            assert!(sizes.windows(2).all(|w| w[1] <= w[0]));
            assert!(sizes.len() - 1 <= rel.candidate_count() + 1);
        }
    }

    #[test]
    fn mode_names() {
        for m in SecBisimMode::ALL {
            assert_eq!(m.name().parse::<SecBisimMode>(), Ok(m));
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
    }
}
