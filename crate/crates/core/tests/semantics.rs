use std::collections::BTreeSet;

use nicheck::lang::Cmd;
use nicheck::semantics::{build_lts, step, Bounds, Config, SecBisimMode, SecurityRelation, StoreDomain};
use nicheck::validate::{corpus_env, exhaustive_corpus, random_corpus, trace_suite};

/// Depth-first closure using only `step`, independent of node numbering.
fn edges_by_dfs(c: &Cmd, modulus: i64) -> BTreeSet<(Config, Config)> {
    let domain = StoreDomain::new(&corpus_env(), modulus).unwrap();
    let mut seen = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let mut stack: Vec<Config> = domain.all_states().map(|s| Config::running(c.clone(), s)).collect();
    while let Some(cfg) = stack.pop() {
        if !seen.insert(cfg.clone()) {
            continue;
        }
        for next in step(&cfg).unwrap() {
            edges.insert((cfg.clone(), next.clone()));
            stack.push(next);
        }
    }
    edges
}

#[test]
fn graph_does_not_depend_on_traversal_order() {
    let env = corpus_env();
    for c in exhaustive_corpus(3).iter().step_by(7).chain(random_corpus(40, 5, 4).iter()) {
        let Ok(lts) = build_lts(c, &env, Bounds::new(2).with_cap(20_000)) else { continue };
        assert_eq!(lts.edge_set(), edges_by_dfs(c, 2), "{c}");
    }
}

#[test]
fn running_configurations_always_step() {
    let env = corpus_env();
    for c in exhaustive_corpus(3) {
        let lts = build_lts(&c, &env, Bounds::new(2)).unwrap();
        for i in 0..lts.node_count() {
            assert_eq!(lts.successors(i).is_empty(), lts.is_terminated(i), "{}", lts.node(i));
            let again = step(lts.node(i)).unwrap();
            let listed: Vec<Config> = lts.successors(i).iter().map(|&j| lts.node(j).clone()).collect();
            assert_eq!(again, listed, "step is a function of the configuration");
        }
    }
}

#[test]
fn refinement_is_monotone_and_bounded() {
    let env = corpus_env();
    for c in exhaustive_corpus(3).iter().step_by(5) {
        let lts = build_lts(c, &env, Bounds::new(2)).unwrap();
        for mode in SecBisimMode::ALL {
            let rel = SecurityRelation::compute(&lts, mode).unwrap();
            let sizes = rel.size_history();
            assert_eq!(sizes[0], rel.candidate_count());
            assert!(sizes.windows(2).all(|w| w[1] <= w[0]), "{c} {mode:?}: {sizes:?}");
            assert!(sizes.len() <= rel.candidate_count() + 2);
            assert_eq!(*sizes.last().unwrap(), rel.pair_count());
        }
    }
}

#[test]
fn relation_is_symmetric_and_low_equivalent() {
    let env = corpus_env();
    for c in exhaustive_corpus(2) {
        let lts = build_lts(&c, &env, Bounds::new(3)).unwrap();
        for mode in SecBisimMode::ALL {
            let rel = SecurityRelation::compute(&lts, mode).unwrap();
            for a in 0..lts.node_count() {
                for b in 0..lts.node_count() {
                    if rel.contains(a, b) {
                        assert!(rel.contains(b, a));
                        assert_eq!(lts.node(a).state.low_projection(), lts.node(b).state.low_projection());
                    }
                }
            }
        }
    }
}

#[test]
fn loop_free_verdicts_match_an_independent_executor() {
    for m in [2, 3] {
        let r = trace_suite(&exhaustive_corpus(4), m);
        assert!(r.passed(), "{:?}", r.discrepancies);
        assert!(r.checked > 0);
    }
}
