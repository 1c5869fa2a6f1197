//! Benchmark runner, cross-validation and the CSV result schema.
//!
//! CSV columns, one row per (problem, algorithm):
//!
//! `problem,family,n_conjuncts,n_vars,algorithm,status,core_size,elapsed,k_reached,vbest_elapsed,vbest_algorithm`
//!
//! `status` is one of SAT, UNSAT, UNKNOWN, REDUCED_TO_FALSE, ERROR. `core_size`
//! is set iff status is UNSAT. `elapsed` is in seconds. The two `vbest_`
//! columns repeat, on every row of a problem, the fastest UNSAT-producing
//! algorithm for that problem; they are empty when no algorithm found it
//! UNSAT.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::activation::{Algorithm, Status, UcResult};
use crate::bmc::{algorithm2_uc, BmcConfig, DEFAULT_K_MAX};
use crate::budget::Deadline;
use crate::formula::Spec;
use crate::native::{algorithm3_uc, NativeConfig};
use crate::oracle::{oracle_sat_subset, oracle_sat_with, OracleConfig};
use crate::parser::parse_spec;
use crate::semantics::eval;
use crate::symbolic::{algorithm1_uc, BddMode, SymbolicConfig};
use crate::trp::{algorithm4_uc, ProverConfig};

pub const DEFAULT_TIMEOUT_SECS: f64 = 60.0;
pub const FAMILIES_FILE: &str = "families.tsv";
pub const STATUS_ERROR: &str = "ERROR";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Engine settings shared by `check`, `bench` and `crosscheck`.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Per-run limit in seconds.
    pub timeout: Option<f64>,
    pub k_max: usize,
    pub seed: u64,
    pub bdd_mode: BddMode,
    pub prover: ProverConfig,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            timeout: Some(DEFAULT_TIMEOUT_SECS),
            k_max: DEFAULT_K_MAX,
            seed: 0,
            bdd_mode: BddMode::PickOne,
            prover: ProverConfig::default(),
        }
    }
}

pub fn run_algorithm(s: &Spec, algo: Algorithm, opts: &RunOptions) -> UcResult {
    let deadline = Deadline::from_secs(opts.timeout);
    match algo {
        Algorithm::Bdd => {
            let cfg = SymbolicConfig { mode: opts.bdd_mode, deadline, ..SymbolicConfig::default() };
            algorithm1_uc(s, &cfg).result
        }
        Algorithm::Bmc => algorithm2_uc(s, &BmcConfig { k_max: opts.k_max, deadline, seed: opts.seed }),
        Algorithm::Native => algorithm3_uc(s, &NativeConfig { deadline, seed: opts.seed, ..NativeConfig::default() }),
        Algorithm::Trp => {
            let mut prover = opts.prover.clone();
            if let Some(t) = opts.timeout {
                let t = Duration::try_from_secs_f64(t.max(0.0)).unwrap_or(Duration::MAX);
                prover.timeout = Some(prover.timeout.map_or(t, |p| p.min(t)));
            }
            algorithm4_uc(s, &prover)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub problem: String,
    pub family: String,
    pub n_conjuncts: usize,
    pub n_vars: usize,
    pub algorithm: String,
    pub status: String,
    pub core_size: Option<usize>,
    pub elapsed: f64,
    pub k_reached: Option<usize>,
    pub vbest_elapsed: Option<f64>,
    pub vbest_algorithm: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub family: String,
    pub path: PathBuf,
    pub spec: Result<Spec, String>,
}

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })
}

/// `*.ltlf` files of `dir` in name order, with families from
/// `families.tsv` (`file<TAB>family` per line) when present.
pub fn load_problems(dir: &Path) -> Result<Vec<Problem>, BenchError> {
    let entries = fs::read_dir(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ltlf"))
        .collect();
    paths.sort();
    let families_path = dir.join(FAMILIES_FILE);
    let mut families = BTreeMap::new();
    if families_path.exists() {
        for line in read(&families_path)?.lines() {
            if let Some((file, fam)) = line.split_once('\t') {
                families.insert(file.trim().to_string(), fam.trim().to_string());
            }
        }
    }
    paths
        .into_iter()
        .map(|path| {
            let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            let name = path.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            let spec = parse_spec(&read(&path)?, name.clone()).map_err(|e| e.to_string());
            let family = families.get(&file).cloned().unwrap_or_else(|| "unknown".into());
            Ok(Problem { name, family, path, spec })
        })
        .collect()
}

pub fn record(p: &Problem, algo: Algorithm, r: Option<&UcResult>) -> BenchRecord {
    let (n_conjuncts, n_vars) = p.spec.as_ref().map_or((0, 0), |s| (s.len(), s.alphabet.len()));
    BenchRecord {
        problem: p.name.clone(),
        family: p.family.clone(),
        n_conjuncts,
        n_vars,
        algorithm: algo.to_string(),
        status: r.map_or(STATUS_ERROR.into(), |r| r.status.as_str().into()),
        core_size: r.and_then(UcResult::core_size),
        elapsed: r.map_or(0.0, |r| r.elapsed.as_secs_f64()),
        k_reached: r.and_then(|r| r.k_reached),
        vbest_elapsed: None,
        vbest_algorithm: None,
    }
}

/// Fills the virtual-best columns in place.
pub fn fill_virtual_best(records: &mut [BenchRecord]) {
    let mut best: BTreeMap<String, (f64, String)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.status == Status::Unsat.as_str()) {
        let e = best.entry(r.problem.clone()).or_insert((r.elapsed, r.algorithm.clone()));
        if r.elapsed < e.0 {
            *e = (r.elapsed, r.algorithm.clone());
        }
    }
    for r in records.iter_mut() {
        let b = best.get(&r.problem);
        r.vbest_elapsed = b.map(|b| b.0);
        r.vbest_algorithm = b.map(|b| b.1.clone());
    }
}

/// Runs every algorithm on every problem using up to `jobs` threads; one
/// engine instance per task. Rows come back in (problem, algorithm) order.
pub fn bench(problems: &[Problem], algos: &[Algorithm], opts: &RunOptions, jobs: usize) -> Vec<BenchRecord> {
    let tasks: Vec<(usize, usize)> =
        (0..problems.len()).flat_map(|p| (0..algos.len()).map(move |a| (p, a))).collect();
    let results: Mutex<Vec<Option<BenchRecord>>> = Mutex::new(vec![None; tasks.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1) {
            scope.spawn(|| loop {
                let t = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(p, a)) = tasks.get(t) else { break };
                let problem = &problems[p];
                let r = problem.spec.as_ref().ok().map(|s| run_algorithm(s, algos[a], opts));
                let rec = record(problem, algos[a], r.as_ref());
                results.lock().expect("results lock")[t] = Some(rec);
            });
        }
    });
    let mut records: Vec<BenchRecord> =
        results.into_inner().expect("results lock").into_iter().map(|r| r.expect("task ran")).collect();
    fill_virtual_best(&mut records);
    records
}

pub fn write_csv<W: io::Write>(out: W, records: &[BenchRecord]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<BenchRecord>, BenchError> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(BenchError::from)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconsistency {
    pub problem: String,
    pub algorithm: Option<Algorithm>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct CrosscheckReport {
    pub problems: usize,
    pub runs: usize,
    pub inconsistencies: Vec<Inconsistency>,
}

impl CrosscheckReport {
    pub fn is_consistent(&self) -> bool {
        self.inconsistencies.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for i in &self.inconsistencies {
            let who = i.algorithm.map_or("-".to_string(), |a| a.to_string());
            s.push_str(&format!("{}\t{}\t{}\n", i.problem, who, i.message));
        }
        s.push_str(&format!(
            "{} problems, {} runs, {} inconsistencies\n",
            self.problems,
            self.runs,
            self.inconsistencies.len()
        ));
        s
    }
}

/// Runs `algos` and, when it finishes within its limits, the oracle. Flags
/// disagreeing verdicts, cores the oracle finds satisfiable and witnesses
/// that do not satisfy the spec.
pub fn crosscheck(problems: &[Problem], algos: &[Algorithm], opts: &RunOptions, oracle: &OracleConfig) -> CrosscheckReport {
    let mut report = CrosscheckReport { problems: problems.len(), ..CrosscheckReport::default() };
    for p in problems {
        let mut flag = |algorithm: Option<Algorithm>, message: String| {
            report.inconsistencies.push(Inconsistency { problem: p.name.clone(), algorithm, message })
        };
        let s = match &p.spec {
            Ok(s) => s,
            Err(e) => {
                flag(None, format!("parse error: {e}"));
                continue;
            }
        };
        let expected = oracle_sat_with(&s.formula(), oracle).ok().map(|v| v.satisfiable);
        let mut seen: Vec<(Algorithm, bool)> = Vec::new();
        for &a in algos {
            let r = run_algorithm(s, a, opts);
            report.runs += 1;
            let sat = match r.status {
                Status::Sat => true,
                Status::Unsat => false,
                Status::Unknown | Status::ReducedToFalse => continue,
            };
            if let Some(e) = expected {
                if e != sat {
                    flag(Some(a), format!("{} but oracle says {}", r.status.as_str(), if e { "SAT" } else { "UNSAT" }));
                }
            }
            if let Some(&(b, other)) = seen.iter().find(|(_, v)| *v != sat) {
                flag(Some(a), format!("{} disagrees with {b} ({})", r.status.as_str(), if other { "SAT" } else { "UNSAT" }));
            }
            seen.push((a, sat));
            if let Some(w) = &r.witness {
                if !eval(&s.formula(), w, 0).unwrap_or(false) {
                    flag(Some(a), "witness does not satisfy the spec".into());
                }
            }
            if let Some(core) = &r.core {
                let labels: BTreeSet<String> = s.labels().into_iter().collect();
                if !core.is_subset(&labels) {
                    flag(Some(a), format!("core {core:?} names unknown conjuncts"));
                } else if let Ok(true) = oracle_sat_subset(s, core, oracle) {
                    flag(Some(a), format!("core {core:?} is satisfiable"));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(problem: &str, algo: &str, status: &str, elapsed: f64) -> BenchRecord {
        BenchRecord {
            problem: problem.into(),
            family: "f".into(),
            n_conjuncts: 2,
            n_vars: 1,
            algorithm: algo.into(),
            status: status.into(),
            core_size: (status == "UNSAT").then_some(2),
            elapsed,
            k_reached: None,
            vbest_elapsed: None,
            vbest_algorithm: None,
        }
    }

    #[test]
    fn virtual_best() {
        let mut rs = vec![
            rec("p", "bdd", "UNSAT", 0.5),
            rec("p", "bmc", "UNSAT", 0.2),
            rec("p", "native", "UNKNOWN", 0.01),
            rec("q", "bdd", "SAT", 0.1),
        ];
        fill_virtual_best(&mut rs);
        assert!(rs[..3].iter().all(|r| r.vbest_elapsed == Some(0.2) && r.vbest_algorithm.as_deref() == Some("bmc")));
        assert_eq!(rs[3].vbest_elapsed, None);
    }

    #[test]
    fn csv_round_trip() {
        let mut rs = vec![rec("p", "bdd", "UNSAT", 0.5), rec("q", "bmc", "SAT", 0.25)];
        fill_virtual_best(&mut rs);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "problem,family,n_conjuncts,n_vars,algorithm,status,core_size,elapsed,k_reached,vbest_elapsed,vbest_algorithm\n"
        ));
        assert_eq!(read_csv(&buf[..]).unwrap(), rs);
    }
}
