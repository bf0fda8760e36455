//! Machine-readable and human-readable results of analysing one program.
//!
//! The JSON layout is
//!
//! ```text
//! { "program": "...",
//!   "systems": { "vs1": {"safe", "maxTp1", "firstFailure"?},
//!                "vs2": {"safe", "maxTp1", "firstFailure"?},
//!                "bc":  {"safe", "maxWtp", "minRtp", "firstFailure"?},
//!                "mb":  {"safe", "minTRtp", "firstFailure"?} },
//!   "flags": {"fhigh", "high", "low", "wlow", "noWhile"},
//!   "semantic": {"mode", "secure", "lts_nodes", "counterexample"?}? }
//! ```
//!
//! Systems that were not selected are omitted.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::lang::{pretty_print, Level, Pos, Program, SpanTree};
use crate::semantics::{Counterexample, SecBisimMode, Verdict};
use crate::typesys::{analyze, first_failure, Analysis, SystemId};
use crate::typing::TypeError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleLevelVerdict {
    pub safe: bool,
    #[serde(rename = "maxTp1")]
    pub max_tp1: Level,
    #[serde(rename = "firstFailure", default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BcVerdict {
    pub safe: bool,
    #[serde(rename = "maxWtp")]
    pub max_wtp: Level,
    #[serde(rename = "minRtp")]
    pub min_rtp: Level,
    #[serde(rename = "firstFailure", default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbVerdict {
    pub safe: bool,
    #[serde(rename = "minTRtp")]
    pub min_trtp: Level,
    #[serde(rename = "firstFailure", default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Pos>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Systems {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vs1: Option<SingleLevelVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vs2: Option<SingleLevelVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BcVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mb: Option<MbVerdict>,
}

impl Systems {
    /// `(system, safe)` for every reported system, in canonical order.
    pub fn verdicts(&self) -> Vec<(SystemId, bool)> {
        let mut out = Vec::new();
        if let Some(v) = &self.vs1 {
            out.push((SystemId::Vs1, v.safe));
        }
        if let Some(v) = &self.vs2 {
            out.push((SystemId::Vs2, v.safe));
        }
        if let Some(v) = &self.bc {
            out.push((SystemId::Bc, v.safe));
        }
        if let Some(v) = &self.mb {
            out.push((SystemId::Mb, v.safe));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedFlags {
    pub fhigh: bool,
    pub high: bool,
    pub low: bool,
    pub wlow: bool,
    #[serde(rename = "noWhile")]
    pub no_while: bool,
}

impl From<&Analysis> for DerivedFlags {
    fn from(a: &Analysis) -> Self {
        DerivedFlags { fhigh: a.fhigh(), high: a.high(), low: a.low_cmd(), wlow: a.wlow(), no_while: a.no_while_flag }
    }
}

/// A counterexample rendered as replayable configurations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub left: String,
    pub right: String,
    pub reason: String,
}

impl From<&Counterexample> for CounterexampleReport {
    fn from(c: &Counterexample) -> Self {
        CounterexampleReport { left: c.left.to_string(), right: c.right.to_string(), reason: c.mismatch.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticReport {
    pub mode: SecBisimMode,
    pub secure: bool,
    pub lts_nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleReport>,
}

impl SemanticReport {
    pub fn new(mode: SecBisimMode, lts_nodes: usize, verdict: &Verdict) -> Self {
        SemanticReport {
            mode,
            secure: verdict.is_secure(),
            lts_nodes,
            counterexample: verdict.counterexample().map(CounterexampleReport::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub program: String,
    pub systems: Systems,
    pub flags: DerivedFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic: Option<SemanticReport>,
}

impl Report {
    /// Type-checks `program` under `selected` systems. With `spans`, each
    /// rejecting system reports where its first failing subterm starts.
    pub fn analyze(program: &Program, spans: Option<&SpanTree>, selected: &[SystemId]) -> Result<Report, TypeError> {
        let (c, env) = (&program.body, &program.sec_env);
        let a = analyze(c, env)?;
        let locate = |sys: SystemId| -> Result<Option<Pos>, TypeError> {
            Ok(match (spans, first_failure(c, env, sys)?) {
                (Some(tree), Some(path)) => tree.lookup(&path),
                _ => None,
            })
        };
        let mut systems = Systems::default();
        for &sys in selected {
            let first_failure = locate(sys)?;
            let safe = a.safe(sys);
            match sys {
                SystemId::Vs1 => systems.vs1 = Some(SingleLevelVerdict { safe, max_tp1: a.max_tp1, first_failure }),
                SystemId::Vs2 => systems.vs2 = Some(SingleLevelVerdict { safe, max_tp1: a.max_tp1, first_failure }),
                SystemId::Bc => {
                    systems.bc = Some(BcVerdict { safe, max_wtp: a.max_wtp, min_rtp: a.min_rtp, first_failure })
                }
                SystemId::Mb => systems.mb = Some(MbVerdict { safe, min_trtp: a.min_trtp, first_failure }),
            }
        }
        Ok(Report { program: pretty_print(program), systems, flags: DerivedFlags::from(&a), semantic: None })
    }

    /// Whether every reported system accepts the program.
    pub fn all_accept(&self) -> bool {
        self.systems.verdicts().iter().all(|(_, safe)| *safe)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let at = |p: &Option<Pos>| p.map(|p| format!(" (first failure at {}:{})", p.line, p.column)).unwrap_or_default();
        let verdict = |safe: bool| if safe { "accept" } else { "reject" };
        let s = &self.systems;
        if let Some(v) = &s.vs1 {
            let _ = writeln!(out, "vs1: {}  maxTp1={}{}", verdict(v.safe), v.max_tp1, at(&v.first_failure));
        }
        if let Some(v) = &s.vs2 {
            let _ = writeln!(out, "vs2: {}  maxTp1={}{}", verdict(v.safe), v.max_tp1, at(&v.first_failure));
        }
        if let Some(v) = &s.bc {
            let _ = writeln!(
                out,
                "bc:  {}  maxWtp={} minRtp={}{}",
                verdict(v.safe),
                v.max_wtp,
                v.min_rtp,
                at(&v.first_failure)
            );
        }
        if let Some(v) = &s.mb {
            let _ = writeln!(out, "mb:  {}  minTRtp={}{}", verdict(v.safe), v.min_trtp, at(&v.first_failure));
        }
        let f = &self.flags;
        let _ = writeln!(
            out,
            "flags: fhigh={} high={} low={} wlow={} noWhile={}",
            f.fhigh, f.high, f.low, f.wlow, f.no_while
        );
        if let Some(sem) = &self.semantic {
            let _ = writeln!(
                out,
                "semantic[{}]: {}  ({} configurations)",
                sem.mode.name(),
                if sem.secure { "secure" } else { "insecure" },
                sem.lts_nodes
            );
            if let Some(cx) = &sem.counterexample {
                let _ = writeln!(out, "  left:  {}", cx.left);
                let _ = writeln!(out, "  right: {}", cx.right);
                let _ = writeln!(out, "  {}", cx.reason);
            }
        }
        out
    }
}
