use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use bitvec::prelude::*;

use crate::lang::{vars_of, Cmd, SecEnv};

use super::state::StoreDomain;
use super::step::{step, Config};
use super::SemanticsError;

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

/// Store modulus and exploration limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub modulus: i64,
    pub node_cap: usize,
}

impl Bounds {
    pub fn new(modulus: i64) -> Self {
        Bounds { modulus, node_cap: DEFAULT_NODE_CAP }
    }

    pub fn with_cap(mut self, node_cap: usize) -> Self {
        self.node_cap = node_cap;
        self
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::new(2)
    }
}

/// The finite configuration graph of a command run from every store.
#[derive(Debug, Clone)]
pub struct Lts {
    domain: Arc<StoreDomain>,
    nodes: Vec<Config>,
    succ: Vec<Vec<usize>>,
    initials: Vec<usize>,
}

impl Lts {
    pub fn domain(&self) -> &Arc<StoreDomain> {
        &self.domain
    }

    pub fn nodes(&self) -> &[Config] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Config {
        &self.nodes[i]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    /// Initial configurations, one per store, in store enumeration order.
    pub fn initials(&self) -> &[usize] {
        &self.initials
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_terminated(&self, i: usize) -> bool {
        self.nodes[i].is_terminated()
    }

    /// Edges as configuration pairs, independent of node numbering.
    pub fn edge_set(&self) -> BTreeSet<(Config, Config)> {
        let mut out = BTreeSet::new();
        for (i, succ) in self.succ.iter().enumerate() {
            for &j in succ {
                out.insert((self.nodes[i].clone(), self.nodes[j].clone()));
            }
        }
        out
    }

    /// Nodes reachable from `from` in zero or more steps.
    pub fn reachable_from(&self, from: usize) -> BitVec {
        let mut seen = bitvec![0; self.nodes.len()];
        let mut stack = vec![from];
        seen.set(from, true);
        while let Some(i) = stack.pop() {
            for &j in &self.succ[i] {
                if !seen[j] {
                    seen.set(j, true);
                    stack.push(j);
                }
            }
        }
        seen
    }
}

/// Breadth-first closure of `step` from `(c, s)` for every store `s`.
pub fn build_lts(c: &Cmd, env: &SecEnv, bounds: Bounds) -> Result<Lts, SemanticsError> {
    if let Some(x) = vars_of(c).into_iter().find(|x| !env.contains(x)) {
        return Err(SemanticsError::UnknownVariable(x));
    }
    let domain = StoreDomain::new(env, bounds.modulus)?;
    let cap = bounds.node_cap;
    match domain.store_count() {
        Some(n) if n <= cap => {}
        _ => return Err(SemanticsError::NodeCapExceeded { cap }),
    }

    let mut index: HashMap<Config, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut queue = VecDeque::new();
    let mut initials = Vec::new();
    for s in domain.all_states() {
        let cfg = Config::running(c.clone(), s);
        let id = *index.entry(cfg.clone()).or_insert_with(|| {
            nodes.push(cfg);
            queue.push_back(nodes.len() - 1);
            nodes.len() - 1
        });
        initials.push(id);
    }

    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    while let Some(i) = queue.pop_front() {
        let next = step(&nodes[i])?;
        let mut ids = Vec::with_capacity(next.len());
        for cfg in next {
            let id = match index.get(&cfg) {
                Some(&id) => id,
                None => {
                    if nodes.len() >= cap {
                        return Err(SemanticsError::NodeCapExceeded { cap });
                    }
                    nodes.push(cfg.clone());
                    succ.push(Vec::new());
                    index.insert(cfg, nodes.len() - 1);
                    queue.push_back(nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            ids.push(id);
        }
        succ[i] = ids;
    }
    Ok(Lts { domain, nodes, succ, initials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{AExp, BExp, Level};

    #[test]
    fn single_assignment_graph() {
        let env: SecEnv = [("l", Level::Lo)].into_iter().collect();
        let lts = build_lts(&Cmd::assign("l", AExp::Const(1)), &env, Bounds::new(2)).unwrap();
        // Both stores finish in the same terminated configuration.
        assert_eq!(lts.node_count(), 3);
        assert_eq!(lts.initials().len(), 2);
        assert_eq!((0..3).filter(|&i| lts.is_terminated(i)).count(), 1);
    }

    #[test]
    fn divergent_loop_has_cycle_and_no_terminal() {
        let env: SecEnv = [("h", Level::Hi)].into_iter().collect();
        let c = Cmd::while_(BExp::Bool(true), Cmd::assign("h", AExp::var("h")));
        let lts = build_lts(&c, &env, Bounds::new(2)).unwrap();
        assert!((0..lts.node_count()).all(|i| !lts.is_terminated(i)));
        let init = lts.initials()[0];
        let next = lts.successors(init)[0];
        assert!(lts.reachable_from(next)[init]);
    }

    #[test]
    fn cap_is_enforced() {
        let env: SecEnv = [("a", Level::Lo), ("b", Level::Lo)].into_iter().collect();
        let c = Cmd::assign("a", AExp::var("b"));
        assert_eq!(
            build_lts(&c, &env, Bounds::new(4).with_cap(19)).unwrap_err(),
            SemanticsError::NodeCapExceeded { cap: 19 }
        );
        assert_eq!(
            build_lts(&c, &env, Bounds::new(4).with_cap(10)).unwrap_err(),
            SemanticsError::NodeCapExceeded { cap: 10 }
        );
        // 16 initial stores plus 4 final ones.
        assert_eq!(build_lts(&c, &env, Bounds::new(4).with_cap(20)).unwrap().node_count(), 20);
    }

    #[test]
    fn unknown_variable() {
        let env: SecEnv = [("a", Level::Lo)].into_iter().collect();
        assert!(matches!(
            build_lts(&Cmd::assign("z", AExp::Const(0)), &env, Bounds::new(2)),
            Err(SemanticsError::UnknownVariable(_))
        ));
    }
}
