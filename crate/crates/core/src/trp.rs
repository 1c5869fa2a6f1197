//! Bridge to an external temporal-resolution prover.
//!
//! The spec is activated, past operators are removed and the result is
//! translated to LTL. Every top-level conjunct goes on its own labelled line
//! `label: formula`, followed by one unit line per activation variable. The
//! prover reads the file named on its command line and answers on stdout.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::activation::{activate, restrict_core, Algorithm, UcResult};
use crate::bmc::{bmc_check, BmcConfig, BmcVerdict};
use crate::formula::{Formula, Spec, ACTIVATION_PREFIX};
use crate::parser::{parse_formula_with, ParseOptions};
use crate::translate::{end_axioms, ftol, remove_past};

pub const INPUT_PLACEHOLDER: &str = "{input}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dialect {
    /// `sat`, `unsat` followed by `core: names…`, or a line reporting that
    /// the input simplified to false.
    #[default]
    Labelled,
}

#[derive(Debug, Clone)]
pub struct ProverConfig {
    pub executable: Option<PathBuf>,
    /// Arguments; `{input}` is replaced by the input file path. An empty
    /// list passes the path as the only argument.
    pub args: Vec<String>,
    pub timeout: Option<Duration>,
    pub dialect: Dialect,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig { executable: None, args: Vec::new(), timeout: Some(Duration::from_secs(60)), dialect: Dialect::Labelled }
    }
}

#[derive(Debug, Error)]
pub enum TrpError {
    #[error("prover unavailable")]
    Unavailable,
    #[error("prover timed out")]
    Timeout,
    #[error("prover i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("prover exited with status {code:?}: {stderr}")]
    Exit { code: Option<i32>, stderr: String },
    #[error("unparseable prover output: {raw:?}")]
    Unparseable { raw: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProverVerdict {
    Sat,
    Unsat(BTreeSet<String>),
    ReducedToFalse,
}

/// Prover input for `s`.
pub fn export_tr(s: &Spec) -> String {
    let mut out = String::new();
    for (i, ax) in end_axioms().iter().enumerate() {
        let _ = writeln!(out, "end_{}: {ax}", i + 1);
    }
    let activated = match activate(s) {
        Ok(a) => a,
        Err(_) => {
            let _ = writeln!(out, "spec: false");
            return out;
        }
    };
    let removed = remove_past(&activated.psi);
    let mut n = 0;
    for c in removed.future_formula.top_level_conjuncts() {
        n += 1;
        let _ = writeln!(out, "psi_{n}: {}", ftol(&c));
    }
    if n == 0 {
        let _ = writeln!(out, "psi_1: true");
    }
    for (i, m) in removed.monitors.iter().enumerate() {
        let _ = writeln!(out, "mon_{}: {}", i + 1, ftol(m));
    }
    for (act, _) in &activated.bindings {
        let _ = writeln!(out, "unit{}: {act}", &act[ACTIVATION_PREFIX.len() - 1..]);
    }
    out
}

/// Reads back a file written by [`export_tr`].
pub fn parse_tr(text: &str) -> Result<Vec<(String, Formula)>, crate::parser::ParseError> {
    let opts = ParseOptions { allow_reserved: true };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (label, body) = l.split_once(':').unwrap_or(("", l));
            Ok((label.trim().to_string(), parse_formula_with(body, opts)?))
        })
        .collect()
}

pub fn run_prover(cfg: &ProverConfig, text: &str) -> Result<String, TrpError> {
    let exe = cfg.executable.as_ref().ok_or(TrpError::Unavailable)?;
    let mut input = tempfile::Builder::new().suffix(".tr").tempfile()?;
    input.write_all(text.as_bytes())?;
    input.flush()?;
    let path = input.path().to_string_lossy().into_owned();
    let args: Vec<String> = if cfg.args.is_empty() {
        vec![path]
    } else {
        cfg.args.iter().map(|a| a.replace(INPUT_PLACEHOLDER, &path)).collect()
    };
    let mut child = match Command::new(exe).args(&args).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn() {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(TrpError::Unavailable),
        Err(e) => return Err(e.into()),
    };
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let start = Instant::now();
    let status = loop {
        if cfg.timeout.is_some_and(|t| start.elapsed() >= t) {
            let _ = child.kill();
            let _ = child.wait();
            return Err(TrpError::Timeout);
        }
        if let Some(st) = child.try_wait()? {
            break st;
        }
        std::thread::sleep(Duration::from_millis(2));
    };
    let out = out_reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    if !status.success() {
        return Err(TrpError::Exit { code: status.code(), stderr: err.trim().to_string() });
    }
    Ok(out)
}

pub fn parse_verdict(raw: &str, dialect: Dialect) -> Result<ProverVerdict, TrpError> {
    let Dialect::Labelled = dialect;
    let lower = raw.to_lowercase();
    if lower.contains("simplified to false") {
        return Ok(ProverVerdict::ReducedToFalse);
    }
    let unparseable = || TrpError::Unparseable { raw: raw.to_string() };
    let first = lower.split_whitespace().next().ok_or_else(unparseable)?;
    match first {
        "sat" | "satisfiable" => Ok(ProverVerdict::Sat),
        "unsat" | "unsatisfiable" => {
            let at = raw.find("core:").ok_or_else(unparseable)?;
            let names = raw[at + "core:".len()..]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|w| !w.is_empty())
                .map(str::to_string)
                .collect();
            Ok(ProverVerdict::Unsat(names))
        }
        _ => Err(unparseable()),
    }
}

pub fn algorithm4_try(s: &Spec, cfg: &ProverConfig) -> Result<UcResult, TrpError> {
    let activated = activate(s).map_err(|e| TrpError::Unparseable { raw: e.to_string() })?;
    let raw = run_prover(cfg, &export_tr(s))?;
    Ok(match parse_verdict(&raw, cfg.dialect)? {
        ProverVerdict::Sat => UcResult::sat(Algorithm::Trp, None),
        ProverVerdict::ReducedToFalse => UcResult::reduced_to_false(Algorithm::Trp),
        ProverVerdict::Unsat(names) => {
            UcResult::unsat(Algorithm::Trp, restrict_core(&activated, names.iter().map(String::as_str)))
        }
    })
}

/// Prover failures other than malformed output become UNKNOWN.
pub fn algorithm4_uc(s: &Spec, cfg: &ProverConfig) -> UcResult {
    let start = Instant::now();
    let r = match algorithm4_try(s, cfg) {
        Ok(r) => r,
        Err(e) => UcResult::unknown(Algorithm::Trp, e.to_string()),
    };
    r.with_elapsed(start.elapsed())
}

/// A stand-in prover answering in the labelled dialect: unit lines naming an
/// activation variable are taken as assumptions, the rest is decided by
/// bounded model checking.
pub fn stub_prover(text: &str, cfg: &BmcConfig) -> Result<String, crate::parser::ParseError> {
    let lines = parse_tr(text)?;
    let mut assumptions = Vec::new();
    let mut rest = Vec::new();
    for (_, f) in lines {
        match f {
            Formula::Var(ref v) if v.starts_with(ACTIVATION_PREFIX) => assumptions.push(v.clone()),
            f => rest.push(f),
        }
    }
    if rest.contains(&Formula::False) {
        return Ok("Input formula simplified to False\n".into());
    }
    Ok(match bmc_check(&Formula::conjunction(rest), &assumptions, cfg) {
        BmcVerdict::Sat { .. } => "sat\n".into(),
        BmcVerdict::Unsat { failed, .. } => {
            format!("unsat\ncore: {}\n", failed.into_iter().collect::<Vec<_>>().join(" "))
        }
        BmcVerdict::Unknown { reason, .. } => format!("unknown: {reason}\n"),
    })
}
