//! Corpus-driven validation: the recursive characterizations against the
//! rule oracles, the algebraic relations between the four systems, the
//! syntactic-versus-semantic strengthenings, and soundness of each system
//! against its security-bisimulation mode.
//!
//! Every suite runs over the exhaustive corpus (all commands up to a size
//! bound on variables `l`, `l2` (low) and `h` (high), with fixed
//! expression and test pools) plus a seeded random corpus. Work is spread
//! over threads but results are collected in corpus order, so the summary is
//! a pure function of the configuration.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::lang::{
    enumerate_aexps, enumerate_bexps, enumerate_cmds, random_cmd, AExp, BExp, Cmd, Level, RandomSpec,
    SecEnv,
};
use crate::semantics::{
    build_lts, cpt_atom, cpt_test, discr, eval_aexp, eval_bexp, may_terminate, pres_atom, SecBisimMode,
    SecurityRelation, SemanticsError, State, StoreDomain,
};
use crate::typesys::flags::flags;
use crate::typesys::oracle::WhileRule;
use crate::typesys::{analyze, check_lemma_equiv, deriv_set_rw_with, derivable_expr_levels, SystemId};
use crate::typing::min_tp;

/// At most this many discrepancies are kept per suite; the count is exact.
const MAX_LISTED: usize = 20;

/// The security mode each system is claimed sound for.
pub fn mode_for(sys: SystemId) -> SecBisimMode {
    match sys {
        SystemId::Vs1 => SecBisimMode::WeakT,
        SystemId::Vs2 => SecBisimMode::Strong,
        SystemId::Bc => SecBisimMode::ZeroOne,
        SystemId::Mb => SecBisimMode::Weak,
    }
}

/// `l`, `l2` low and `h` high.
pub fn corpus_env() -> SecEnv {
    [("l", Level::Lo), ("l2", Level::Lo), ("h", Level::Hi)].into_iter().collect()
}

pub fn corpus_vars() -> Vec<String> {
    ["l", "l2", "h"].map(String::from).to_vec()
}

/// `0, 1, l, h, l+1, h+1`.
pub fn expr_pool() -> Vec<AExp> {
    vec![
        AExp::Const(0),
        AExp::Const(1),
        AExp::var("l"),
        AExp::var("h"),
        AExp::add(AExp::var("l"), AExp::Const(1)),
        AExp::add(AExp::var("h"), AExp::Const(1)),
    ]
}

/// `true, l = 0, h = 0, l < h`.
pub fn test_pool() -> Vec<BExp> {
    vec![
        BExp::Bool(true),
        BExp::eq(AExp::var("l"), AExp::Const(0)),
        BExp::eq(AExp::var("h"), AExp::Const(0)),
        BExp::lt(AExp::var("l"), AExp::var("h")),
    ]
}

/// Every pool atom `x := e`.
pub fn atom_pool() -> Vec<Cmd> {
    enumerate_cmds(1, &corpus_vars(), &expr_pool(), &test_pool())
}

/// All commands with at most `max_size` command nodes over the pools.
pub fn exhaustive_corpus(max_size: usize) -> Vec<Cmd> {
    enumerate_cmds(max_size, &corpus_vars(), &expr_pool(), &test_pool())
}

/// `count` seeded random commands of depth at most `max_depth`.
pub fn random_corpus(count: usize, seed: u64, max_depth: usize) -> Vec<Cmd> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RandomSpec::new(corpus_vars(), max_depth);
    (0..count).map(|_| random_cmd(&mut rng, &spec)).collect()
}

/// Leaves for the expression corpus: the corpus variables and `0`, `1`.
pub fn expr_leaves() -> Vec<AExp> {
    vec![AExp::Const(0), AExp::Const(1), AExp::var("l"), AExp::var("l2"), AExp::var("h")]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidateConfig {
    pub max_size: usize,
    pub modulus: i64,
    pub random: usize,
    pub seed: u64,
    pub random_depth: usize,
    /// Largest expression (in nodes) in the expression-typing suite.
    pub max_expr_size: usize,
    /// Node cap for configuration graphs of exhaustive-corpus commands.
    pub node_cap: usize,
    /// Node cap for random commands; larger graphs are counted as skipped.
    pub random_node_cap: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            max_size: 3,
            modulus: 2,
            random: 0,
            seed: 0,
            random_depth: 6,
            max_expr_size: 5,
            node_cap: crate::semantics::DEFAULT_NODE_CAP,
            random_node_cap: 1_500,
        }
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    /// Individual property instances checked.
    pub checked: usize,
    /// Instances that could not be decided within the configured bounds.
    pub skipped: usize,
    pub discrepancy_count: usize,
    /// The first few discrepancies, in corpus order.
    pub discrepancies: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, checked: 0, skipped: 0, discrepancy_count: 0, discrepancies: Vec::new() }
    }

    fn absorb(&mut self, o: Outcome) {
        self.checked += o.checked;
        self.skipped += o.skipped;
        self.discrepancy_count += o.problems.len();
        let room = MAX_LISTED.saturating_sub(self.discrepancies.len());
        self.discrepancies.extend(o.problems.into_iter().take(room));
    }

    pub fn passed(&self) -> bool {
        self.discrepancy_count == 0
    }
}

/// Per-item result before merging.
#[derive(Default)]
struct Outcome {
    checked: usize,
    skipped: usize,
    problems: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.problems.push(describe());
        }
    }
}

fn run_suite<T: Sync>(name: &'static str, items: &[T], f: impl Fn(&T) -> Outcome + Sync) -> SuiteResult {
    let outcomes: Vec<Outcome> = items.par_iter().map(&f).collect();
    let mut res = SuiteResult::new(name);
    for o in outcomes {
        res.absorb(o);
    }
    res
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub config: ValidateConfig,
    pub corpus_size: usize,
    pub random_size: usize,
    pub suites: Vec<SuiteResult>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "corpus: {} commands (size <= {}), {} random (seed {}, depth <= {}), modulus {}",
            self.corpus_size, c.max_size, self.random_size, c.seed, c.random_depth, c.modulus
        )?;
        for s in &self.suites {
            write!(f, "{:<22} checked {:>8}  discrepancies {}", s.name, s.checked, s.discrepancy_count)?;
            if s.skipped > 0 {
                write!(f, "  skipped {}", s.skipped)?;
            }
            writeln!(f)?;
            for d in &s.discrepancies {
                writeln!(f, "    {d}")?;
            }
        }
        write!(f, "{}", if self.passed() { "all suites green" } else { "DISCREPANCIES FOUND" })
    }
}

/// Expression typing: the rule-derived levels are exactly those above `min_tp`.
pub fn expression_suite(max_nodes: usize) -> SuiteResult {
    let env = corpus_env();
    let leaves = expr_leaves();
    let above = |m: Level| Level::ALL.into_iter().filter(|l| m.leq(*l)).collect::<std::collections::BTreeSet<_>>();
    let aexps = enumerate_aexps(max_nodes, &leaves);
    let bexps = enumerate_bexps(max_nodes, &leaves);
    let mut res = run_suite("expression-typing", &aexps, |e| {
        let mut o = Outcome::default();
        let derived = derivable_expr_levels(e, &env).expect("corpus variables are declared");
        let expected = above(min_tp(e, &env).expect("corpus variables are declared"));
        o.check(derived == expected, || format!("{}: derived {derived:?}, minTp gives {expected:?}", crate::lang::print::aexp_to_string(e)));
        o
    });
    res.absorb(
        bexps
            .par_iter()
            .map(|b| {
                let mut o = Outcome::default();
                let derived = derivable_expr_levels(b, &env).expect("corpus variables are declared");
                let expected = above(min_tp(b, &env).expect("corpus variables are declared"));
                o.check(derived == expected, || {
                    format!("{}: derived {derived:?}, minTp gives {expected:?}", crate::lang::print::bexp_to_string(b))
                });
                o
            })
            .reduce(Outcome::default, |mut a, b| {
                a.checked += b.checked;
                a.problems.extend(b.problems);
                a
            }),
    );
    res
}

/// Derivable type sets against the recursive characterizations, for all
/// four systems; also checks that the alternative loop rule derives the
/// same pairs.
pub fn lemma_suite(cmds: &[Cmd]) -> SuiteResult {
    let env = corpus_env();
    run_suite("lemma-equivalence", cmds, |c| {
        let mut o = Outcome::default();
        let report = check_lemma_equiv(c, &env).expect("corpus variables are declared");
        for check in &report.checks {
            o.check(check.agrees(), || {
                format!("{}: {} {}", check.system, c, check.witness().unwrap_or_default())
            });
        }
        for sys in [SystemId::Bc, SystemId::Mb] {
            let std = deriv_set_rw_with(c, &env, sys, WhileRule::Standard).expect("declared");
            let primed = deriv_set_rw_with(c, &env, sys, WhileRule::Primed).expect("declared");
            o.check(std == primed, || format!("{sys}: loop rules differ on {c}: {std:?} vs {primed:?}"));
        }
        o
    })
}

/// `safe1 = safe4 ∧ wlow`, the implication chain, the ordering of the
/// typing functions, and agreement of the boolean-flag clauses.
pub fn identity_suite(cmds: &[Cmd]) -> SuiteResult {
    let env = corpus_env();
    run_suite("identities", cmds, |c| {
        let mut o = Outcome::default();
        let a = analyze(c, &env).expect("corpus variables are declared");
        o.check(a.safe1 == (a.safe4 && a.wlow()), || format!("safe1 = safe4 and wlow fails on {c}"));
        o.check(!a.safe2 || a.safe1, || format!("safe2 => safe1 fails on {c}"));
        o.check(!a.safe1 || a.safe4, || format!("safe1 => safe4 fails on {c}"));
        o.check(!a.safe3 || a.safe4, || format!("safe3 => safe4 fails on {c}"));
        o.check(a.min_trtp.leq(a.min_rtp), || format!("minTRtp <= minRtp fails on {c}"));
        o.check(a.max_tp1.leq(a.max_wtp), || format!("maxTp1 <= maxWtp fails on {c}"));
        let fl = flags(c, &env).expect("corpus variables are declared");
        let same = (fl.safe1, fl.safe2, fl.safe3, fl.safe4, fl.fhigh, fl.high, fl.low, fl.wlow, fl.no_while)
            == (a.safe1, a.safe2, a.safe3, a.safe4, a.fhigh(), a.high(), a.low_cmd(), a.wlow(), a.no_while_flag);
        o.check(same, || format!("flag clauses disagree with typing functions on {c}: {fl:?}"));
        o
    })
}

fn moduli_for_atoms(modulus: i64) -> Vec<i64> {
    let mut ms = vec![2, 3, modulus];
    ms.sort_unstable();
    ms.dedup();
    ms
}

/// Syntactic checks imply their semantic counterparts: on pool tests and
/// atoms at moduli 2, 3 and the configured one, and `fhigh ⇒ discr ∧ mayT`
/// on the command corpus.
pub fn strengthening_suite(cmds: &[Cmd], modulus: i64, node_cap: usize) -> SuiteResult {
    let env = corpus_env();
    let bounds = crate::semantics::Bounds::new(modulus).with_cap(node_cap);
    let mut res = SuiteResult::new("strengthening");
    for m in moduli_for_atoms(modulus) {
        let mut o = Outcome::default();
        for b in test_pool() {
            let low = min_tp(&b, &env).expect("declared") == Level::Lo;
            let cpt = cpt_test(&b, &env, m).expect("declared");
            o.check(!low || cpt, || format!("m={m}: low test {} is not cpt", crate::lang::print::bexp_to_string(&b)));
        }
        for a in atom_pool() {
            let an = analyze(&a, &env).expect("declared");
            let pres = pres_atom(&a, &env, m).expect("pool atoms are assignments");
            let cpt = cpt_atom(&a, &env, m).expect("pool atoms are assignments");
            o.check(!an.fhigh() || pres, || format!("m={m}: fhigh atom {a} is not pres"));
            o.check(!an.safe1 || cpt, || format!("m={m}: safe1 atom {a} is not cpt"));
        }
        res.absorb(o);
    }
    res.absorb(
        cmds.par_iter()
            .map(|c| {
                let mut o = Outcome::default();
                let a = analyze(c, &env).expect("declared");
                if a.fhigh() {
                    match (discr(c, &env, bounds), may_terminate(c, &env, bounds)) {
                        (Ok(d), Ok(t)) => o.check(d && t, || format!("fhigh {c}: discr={d} mayT={t}")),
                        _ => o.skipped += 1,
                    }
                }
                o
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Outcome::default(), |mut acc, o| {
                acc.checked += o.checked;
                acc.skipped += o.skipped;
                acc.problems.extend(o.problems);
                acc
            }),
    );
    res
}

/// Verdicts of all four modes, or `None` if the graph is out of bounds.
fn all_mode_verdicts(c: &Cmd, env: &SecEnv, modulus: i64, cap: usize) -> Option<[bool; 4]> {
    let lts = match build_lts(c, env, crate::semantics::Bounds::new(modulus).with_cap(cap)) {
        Ok(lts) => lts,
        Err(SemanticsError::NodeCapExceeded { .. }) => return None,
        Err(e) => panic!("unexpected error on {c}: {e}"),
    };
    let mut out = [false; 4];
    for (i, mode) in SecBisimMode::ALL.into_iter().enumerate() {
        match SecurityRelation::compute(&lts, mode) {
            Ok(rel) => out[i] = rel.verdict().is_secure(),
            Err(SemanticsError::RelationTooLarge { .. }) => return None,
            Err(e) => panic!("unexpected error on {c}: {e}"),
        }
    }
    Some(out)
}

fn mode_index(mode: SecBisimMode) -> usize {
    SecBisimMode::ALL.iter().position(|m| *m == mode).expect("every mode is listed")
}

/// Every accepted command is secure in its system's mode, and the modes
/// are ordered `strong ⇒ weakt ⇒ weak` and `zo ⇒ weak`.
pub fn soundness_suite(cmds: &[Cmd], modulus: i64, node_cap: usize) -> SuiteResult {
    let env = corpus_env();
    run_suite("soundness", cmds, |c| {
        let mut o = Outcome::default();
        let a = analyze(c, &env).expect("declared");
        let Some(v) = all_mode_verdicts(c, &env, modulus, node_cap) else {
            o.skipped += 1;
            return o;
        };
        for sys in SystemId::ALL {
            let mode = mode_for(sys);
            if a.safe(sys) {
                o.check(v[mode_index(mode)], || format!("{sys}-safe but not {}-secure: {c}", mode.name()));
            }
        }
        let [strong, zo, weak, weakt] =
            [SecBisimMode::Strong, SecBisimMode::ZeroOne, SecBisimMode::Weak, SecBisimMode::WeakT]
                .map(|m| v[mode_index(m)]);
        o.check(!strong || weakt, || format!("strong but not weakt: {c}"));
        o.check(!weakt || weak, || format!("weakt but not weak: {c}"));
        o.check(!zo || weak, || format!("zo but not weak: {c}"));
        o
    })
}

/// Runs a deterministic loop-free command to completion, recording the low
/// projection after every step with consecutive repeats removed.
pub fn low_trace(c: &Cmd, s: &State) -> Result<Vec<Vec<i64>>, SemanticsError> {
    fn run(c: &Cmd, s: State, trace: &mut Vec<Vec<i64>>) -> Result<State, SemanticsError> {
        let mut note = |st: &State| {
            let low = st.low_projection();
            if trace.last() != Some(&low) {
                trace.push(low);
            }
        };
        match c {
            Cmd::Assign(x, e) => {
                let v = eval_aexp(e, &s)?;
                let out = s.with(x, v)?;
                note(&out);
                Ok(out)
            }
            Cmd::Seq(a, b) => {
                let mid = run(a, s, trace)?;
                run(b, mid, trace)
            }
            Cmd::If(t, a, b) => {
                let branch = if eval_bexp(t, &s)? { a } else { b };
                run(branch, s, trace)
            }
            Cmd::While(..) | Cmd::Par(..) => panic!("low_trace needs a deterministic loop-free command"),
        }
    }
    let mut trace = vec![s.low_projection()];
    run(c, s.clone(), &mut trace)?;
    Ok(trace)
}

fn is_sequential(c: &Cmd) -> bool {
    match c {
        Cmd::Assign(..) => true,
        Cmd::Seq(a, b) | Cmd::If(_, a, b) => is_sequential(a) && is_sequential(b),
        Cmd::While(..) | Cmd::Par(..) => false,
    }
}

/// For deterministic loop-free commands, compares the bisimulation verdicts
/// with an independent executor: every secure mode implies equal final low
/// stores, and the weak modes hold exactly when stutter-free low traces of
/// low-equivalent runs coincide.
pub fn trace_suite(cmds: &[Cmd], modulus: i64) -> SuiteResult {
    let env = corpus_env();
    let seq: Vec<&Cmd> = cmds.iter().filter(|c| is_sequential(c)).collect();
    run_suite("trace-cross-check", &seq, |c| {
        let mut o = Outcome::default();
        let v = all_mode_verdicts(c, &env, modulus, usize::MAX).expect("loop-free graphs are small");
        let domain = StoreDomain::new(&env, modulus).expect("valid modulus");
        let traces: Vec<(Vec<i64>, Vec<Vec<i64>>)> = domain
            .all_states()
            .map(|s| (s.low_projection(), low_trace(c, &s).expect("declared")))
            .collect();
        let mut finals_agree = true;
        let mut traces_agree = true;
        for (i, (li, ti)) in traces.iter().enumerate() {
            for (lj, tj) in &traces[i + 1..] {
                if li == lj {
                    finals_agree &= ti.last() == tj.last();
                    traces_agree &= ti == tj;
                }
            }
        }
        for mode in SecBisimMode::ALL {
            let secure = v[mode_index(mode)];
            o.check(!secure || finals_agree, || format!("{}-secure but final low stores differ: {c}", mode.name()));
        }
        for mode in [SecBisimMode::Weak, SecBisimMode::WeakT] {
            let secure = v[mode_index(mode)];
            o.check(secure == traces_agree, || {
                format!("{} verdict {secure} but low traces agree = {traces_agree}: {c}", mode.name())
            });
        }
        o
    })
}

/// Runs every suite. Returns an error for out-of-range parameters.
pub fn run(config: &ValidateConfig) -> Result<Summary, SemanticsError> {
    StoreDomain::new(&corpus_env(), config.modulus)?;
    let corpus = exhaustive_corpus(config.max_size);
    let random = random_corpus(config.random, config.seed, config.random_depth);
    let both: Vec<Cmd> = corpus.iter().chain(&random).cloned().collect();

    let mut soundness = soundness_suite(&corpus, config.modulus, config.node_cap);
    let random_sound = soundness_suite(&random, config.modulus, config.random_node_cap);
    soundness.checked += random_sound.checked;
    soundness.skipped += random_sound.skipped;
    soundness.discrepancy_count += random_sound.discrepancy_count;
    let room = MAX_LISTED.saturating_sub(soundness.discrepancies.len());
    soundness.discrepancies.extend(random_sound.discrepancies.into_iter().take(room));

    let suites = vec![
        expression_suite(config.max_expr_size),
        lemma_suite(&both),
        identity_suite(&both),
        strengthening_suite(&corpus, config.modulus, config.node_cap),
        soundness,
        trace_suite(&both, config.modulus),
    ];
    Ok(Summary { config: config.clone(), corpus_size: corpus.len(), random_size: random.len(), suites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools_have_documented_shape() {
        assert_eq!(atom_pool().len(), 18);
        assert_eq!(exhaustive_corpus(3).len(), 18 + 72 + 2232);
    }

    #[test]
    fn random_corpus_is_seeded() {
        assert_eq!(random_corpus(20, 7, 6), random_corpus(20, 7, 6));
        assert_ne!(random_corpus(20, 7, 6), random_corpus(20, 8, 6));
        assert!(random_corpus(200, 1, 6).iter().all(|c| c.depth() <= 6));
    }

    #[test]
    fn low_trace_removes_stutter() {
        let env = corpus_env();
        let d = StoreDomain::new(&env, 2).unwrap();
        let s = State::from_pairs(d, &[("l", 1)]).unwrap();
        let c = Cmd::seq(Cmd::assign("h", AExp::Const(1)), Cmd::seq(Cmd::assign("l", AExp::Const(0)), Cmd::assign("l", AExp::Const(0))));
        // Projection order is (l, l2).
        assert_eq!(low_trace(&c, &s).unwrap(), vec![vec![1, 0], vec![0, 0]]);
    }

    #[test]
    fn small_run_is_green_and_deterministic() {
        let cfg = ValidateConfig { max_size: 2, random: 30, seed: 3, max_expr_size: 3, ..Default::default() };
        let a = run(&cfg).unwrap();
        assert!(a.passed(), "{a}");
        assert_eq!(a.to_string(), run(&cfg).unwrap().to_string());
    }

    #[test]
    fn bad_modulus_is_rejected() {
        let cfg = ValidateConfig { modulus: 1, ..Default::default() };
        assert_eq!(run(&cfg).unwrap_err(), SemanticsError::InvalidModulus(1));
    }
}
