use std::fmt;

use crate::lang::Cmd;

use super::state::{eval_aexp, eval_bexp, State};
use super::SemanticsError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Residual {
    Running(Cmd),
    Terminated,
}

/// A runtime configuration: what is left to run, and the store.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub residual: Residual,
    pub state: State,
}

impl Config {
    pub fn running(c: Cmd, state: State) -> Self {
        Config { residual: Residual::Running(c), state }
    }

    pub fn terminated(state: State) -> Self {
        Config { residual: Residual::Terminated, state }
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self.residual, Residual::Terminated)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.residual {
            Residual::Running(c) => write!(f, "<{c}, {}>", self.state),
            Residual::Terminated => write!(f, "<done, {}>", self.state),
        }
    }
}

fn step_cmd(c: &Cmd, s: &State) -> Result<Vec<(Residual, State)>, SemanticsError> {
    Ok(match c {
        Cmd::Assign(x, e) => {
            let v = eval_aexp(e, s)?;
            vec![(Residual::Terminated, s.with(x, v)?)]
        }
        Cmd::Seq(head, tail) => step_cmd(head, s)?
            .into_iter()
            .map(|(r, s2)| match r {
                Residual::Terminated => (Residual::Running((**tail).clone()), s2),
                Residual::Running(h2) => (Residual::Running(Cmd::seq(h2, (**tail).clone())), s2),
            })
            .collect(),
        Cmd::If(t, a, b) => {
            let branch = if eval_bexp(t, s)? { a } else { b };
            vec![(Residual::Running((**branch).clone()), s.clone())]
        }
        Cmd::While(t, body) => {
            if eval_bexp(t, s)? {
                vec![(Residual::Running(Cmd::seq((**body).clone(), c.clone())), s.clone())]
            } else {
                vec![(Residual::Terminated, s.clone())]
            }
        }
        Cmd::Par(a, b) => {
            let mut out = Vec::new();
            for (r, s2) in step_cmd(a, s)? {
                out.push(match r {
                    Residual::Terminated => (Residual::Running((**b).clone()), s2),
                    Residual::Running(a2) => (Residual::Running(Cmd::par(a2, (**b).clone())), s2),
                });
            }
            for (r, s2) in step_cmd(b, s)? {
                out.push(match r {
                    Residual::Terminated => (Residual::Running((**a).clone()), s2),
                    Residual::Running(b2) => (Residual::Running(Cmd::par((**a).clone(), b2)), s2),
                });
            }
            out
        }
    })
}

/// All one-step successors, sorted and duplicate-free. Terminated
/// configurations have none.
pub fn step(cfg: &Config) -> Result<Vec<Config>, SemanticsError> {
    let c = match &cfg.residual {
        Residual::Terminated => return Ok(Vec::new()),
        Residual::Running(c) => c,
    };
    let mut out: Vec<Config> = step_cmd(c, &cfg.state)?
        .into_iter()
        .map(|(residual, state)| Config { residual, state })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}
