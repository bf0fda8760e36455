//! The `nicheck` command line.
//!
//! Exit codes: `0` accepted / secure / all suites green, `1` rejected /
//! insecure / discrepancies found, `2` usage, input or parse errors, `3`
//! state-space bounds exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::lang::{parse_program_spanned, Program, SpanTree};
use crate::report::{Report, SemanticReport};
use crate::semantics::{build_lts, Bounds, SecBisimMode, SecurityRelation, SemanticsError, DEFAULT_NODE_CAP};
use crate::typesys::SystemId;
use crate::validate::{mode_for, ValidateConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nicheck", version, about = "Security type systems and noninterference checks for a parallel while-language")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type-check a program under one or all security type systems.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SystemArg::All)]
        system: SystemArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide security bisimilarity over bounded stores.
    Semantic {
        file: PathBuf,
        /// Defaults to the mode of the strictest accepting system, else `weak`.
        #[arg(long, value_parser = parse_mode)]
        mode: Option<SecBisimMode>,
        #[arg(long, default_value_t = 2)]
        modulus: i64,
        /// Maximum number of configurations to explore.
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the validation suites over the exhaustive and random corpora.
    Validate {
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        modulus: i64,
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Vs1,
    Vs2,
    Bc,
    Mb,
    All,
}

impl SystemArg {
    fn systems(self) -> Vec<SystemId> {
        match self {
            SystemArg::Vs1 => vec![SystemId::Vs1],
            SystemArg::Vs2 => vec![SystemId::Vs2],
            SystemArg::Bc => vec![SystemId::Bc],
            SystemArg::Mb => vec![SystemId::Mb],
            SystemArg::All => SystemId::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn parse_mode(s: &str) -> Result<SecBisimMode, String> {
    s.parse()
}

/// Systems from strictest to most permissive, for picking a default mode.
const STRICTNESS: [SystemId; 4] = [SystemId::Vs2, SystemId::Vs1, SystemId::Bc, SystemId::Mb];

/// The mode paired with the strictest system accepting the program, or
/// `weak` if none does.
pub fn default_mode(report: &Report) -> SecBisimMode {
    let verdicts = report.systems.verdicts();
    STRICTNESS
        .into_iter()
        .find(|sys| verdicts.contains(&(*sys, true)))
        .map(mode_for)
        .unwrap_or(SecBisimMode::Weak)
}

/// Parses the arguments (including the program name) and runs the command,
/// writing to `out` and `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    match cli.command {
        Command::Analyze { file, system, format } => analyze_cmd(&file, system, format, out, err),
        Command::Semantic { file, mode, modulus, cap, format } => {
            semantic_cmd(&file, mode, Bounds::new(modulus).with_cap(cap), format, out, err)
        }
        Command::Validate { max_size, modulus, random, seed } => {
            let config = ValidateConfig { max_size, modulus, random, seed, ..Default::default() };
            validate_cmd(&config, out, err)
        }
    }
}

fn load(file: &Path, err: &mut dyn Write) -> Result<(Program, SpanTree), i32> {
    let src = std::fs::read_to_string(file).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", file.display());
        EXIT_ERROR
    })?;
    parse_program_spanned(&src).map_err(|e| {
        let _ = writeln!(err, "{}:{e}", file.display());
        EXIT_ERROR
    })
}

fn emit(report: &Report, format: Format, out: &mut dyn Write) {
    let _ = match format {
        Format::Text => write!(out, "{}", report.to_text()),
        Format::Json => writeln!(out, "{}", report.to_json()),
    };
}

fn analyze_cmd(file: &Path, system: SystemArg, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (program, spans) = match load(file, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let report = match Report::analyze(&program, Some(&spans), &system.systems()) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", file.display());
            return EXIT_ERROR;
        }
    };
    emit(&report, format, out);
    if report.all_accept() {
        EXIT_OK
    } else {
        EXIT_REJECTED
    }
}

fn semantics_exit(file: &Path, e: SemanticsError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "{}: {e}", file.display());
    match e {
        SemanticsError::NodeCapExceeded { .. } | SemanticsError::RelationTooLarge { .. } => EXIT_CAP,
        _ => EXIT_ERROR,
    }
}

fn semantic_cmd(
    file: &Path,
    mode: Option<SecBisimMode>,
    bounds: Bounds,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (program, spans) = match load(file, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let mut report = match Report::analyze(&program, Some(&spans), &SystemId::ALL) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", file.display());
            return EXIT_ERROR;
        }
    };
    let mode = mode.unwrap_or_else(|| default_mode(&report));
    let lts = match build_lts(&program.body, &program.sec_env, bounds) {
        Ok(lts) => lts,
        Err(e) => return semantics_exit(file, e, err),
    };
    let verdict = match SecurityRelation::compute(&lts, mode) {
        Ok(rel) => rel.verdict(),
        Err(e) => return semantics_exit(file, e, err),
    };
    report.semantic = Some(SemanticReport::new(mode, lts.node_count(), &verdict));
    emit(&report, format, out);
    if verdict.is_secure() {
        EXIT_OK
    } else {
        EXIT_REJECTED
    }
}

fn validate_cmd(config: &ValidateConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if config.max_size == 0 {
        let _ = writeln!(err, "error: --max-size must be at least 1");
        return EXIT_ERROR;
    }
    match crate::validate::run(config) {
        Ok(summary) => {
            let _ = writeln!(out, "{summary}");
            if summary.passed() {
                EXIT_OK
            } else {
                EXIT_REJECTED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("nicheck").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn default_mode_follows_strictest_system() {
        let report = |src: &str| {
            let (p, _) = parse_program_spanned(src).unwrap();
            Report::analyze(&p, None, &SystemId::ALL).unwrap()
        };
        assert_eq!(default_mode(&report("low l; high h; h := l")), SecBisimMode::Strong);
        assert_eq!(default_mode(&report("low l; high h; l := h")), SecBisimMode::Weak);
        assert_eq!(default_mode(&report("low l; high h; while h = 0 do h := h od")), SecBisimMode::ZeroOne);
        assert_eq!(
            default_mode(&report("low l; high h; if h = 0 then h := 1 else h := 2 fi; l := 1")),
            SecBisimMode::WeakT
        );
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["analyze"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["validate", "--max-size", "0"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["validate", "--modulus", "1"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_ERROR);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("analyze"));
    }

    #[test]
    fn missing_file_exits_2() {
        let (code, _, err) = run_args(&["analyze", "/nonexistent/prog.while"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("cannot read"));
    }
}
