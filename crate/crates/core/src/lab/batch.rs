//! Batch classification over z-sets and test suites.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::suite::{build_test_set, DEFAULT_SUITE_SIZE};
use super::zset::build_z_set;
use super::LabError;
use crate::cfrac::{classify, Algorithm, Limits, Status};
use crate::field::{Field, VectorElement};
use crate::hensel::EmbeddingContext;
use crate::rational::Prime;

fn default_suite_size() -> usize {
    DEFAULT_SUITE_SIZE
}

fn default_a_range() -> (i64, i64) {
    (1, 10)
}

fn default_b_range() -> (i64, i64) {
    (-10, 10)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: String,
    pub format: TableFormat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub primes: Vec<u64>,
    pub degree: usize,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default = "default_suite_size")]
    pub suite_size: usize,
    #[serde(default = "default_a_range")]
    pub a_range: (i64, i64),
    #[serde(default = "default_b_range")]
    pub b_range: (i64, i64),
    /// Worker threads; the global rayon pool when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl RunConfig {
    pub fn new(primes: Vec<u64>, degree: usize, algorithms: Vec<Algorithm>) -> Self {
        RunConfig {
            primes,
            degree,
            algorithms,
            limits: Limits::default(),
            suite_size: DEFAULT_SUITE_SIZE,
            a_range: default_a_range(),
            b_range: default_b_range(),
            threads: None,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<Vec<Prime>, LabError> {
        if self.algorithms.is_empty() {
            return Err(LabError::Config("no algorithms".into()));
        }
        if self.suite_size == 0 {
            return Err(LabError::Config("suite_size must be positive".into()));
        }
        if self.degree < 2 {
            return Err(LabError::Degree(self.degree));
        }
        for a in &self.algorithms {
            if let Algorithm::Phi2 { lookahead: 0, .. } = a {
                return Err(LabError::Config("lookahead must be at least 1".into()));
            }
        }
        self.primes
            .iter()
            .map(|&p| Prime::new(p).map_err(|e| LabError::Config(e.to_string())))
            .collect()
    }
}

/// Tallies for one `(prime, algorithm)` cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub periodic: u64,
    pub height: u64,
    pub finite: u64,
    pub step_limit: u64,
}

impl Counts {
    pub fn record(&mut self, status: &Status) {
        match status {
            Status::Periodic { .. } => self.periodic += 1,
            Status::HeightExceeded { .. } => self.height += 1,
            Status::Finite { .. } => self.finite += 1,
            Status::StepLimit { .. } => self.step_limit += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.periodic + self.height + self.finite + self.step_limit
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub algorithm: Algorithm,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub prime: u64,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskError {
    pub prime: u64,
    /// The generator's minimal polynomial, when one was reached.
    pub minpoly: Option<String>,
    pub element: Option<usize>,
    pub algorithm: Option<Algorithm>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchResult {
    pub rows: Vec<TableRow>,
    pub errors: Vec<TaskError>,
    /// Number of generators per prime, aligned with `rows`.
    pub z_counts: Vec<usize>,
}

struct Workload {
    prime: u64,
    ctx: EmbeddingContext,
    elements: Vec<VectorElement>,
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".to_string())
}

/// Runs every `(prime, generator, element, algorithm)` task and tallies the
/// statuses. Task failures are collected, never fatal.
pub fn run_batch(config: &RunConfig) -> Result<BatchResult, LabError> {
    let primes = config.validate()?;
    let run = || run_tasks(config, &primes);
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| LabError::Config(e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn run_tasks(config: &RunConfig, primes: &[Prime]) -> Result<BatchResult, LabError> {
    let mut errors = Vec::new();
    let mut workloads = Vec::new();
    let mut z_counts = Vec::new();
    for &p in primes {
        let set = match build_z_set(
            p,
            config.degree,
            config.a_range.0..=config.a_range.1,
            config.b_range.0..=config.b_range.1,
        ) {
            Ok(set) => set,
            Err(e) => {
                errors.push(TaskError {
                    prime: p.get(),
                    minpoly: None,
                    element: None,
                    algorithm: None,
                    message: e.to_string(),
                });
                Vec::new()
            }
        };
        z_counts.push(set.len());
        for m in set {
            let field: Field = m.into_field();
            match build_test_set(&field, config.suite_size) {
                Ok(suite) => workloads.push(Workload {
                    prime: p.get(),
                    ctx: EmbeddingContext::new(field),
                    elements: suite.elements,
                }),
                Err(e) => errors.push(TaskError {
                    prime: p.get(),
                    minpoly: Some(field.to_string()),
                    element: None,
                    algorithm: None,
                    message: e.to_string(),
                }),
            }
        }
    }
    let tasks: Vec<(usize, usize, usize)> = workloads
        .iter()
        .enumerate()
        .flat_map(|(w, load)| {
            (0..load.elements.len())
                .flat_map(move |e| (0..config.algorithms.len()).map(move |a| (w, e, a)))
        })
        .collect();
    let outcomes: Vec<Result<Status, String>> = tasks
        .par_iter()
        .map(|&(w, e, a)| {
            let load = &workloads[w];
            let algorithm = config.algorithms[a];
            catch_unwind(AssertUnwindSafe(|| {
                classify(&load.ctx, &load.elements[e], algorithm, &config.limits)
            }))
            .map_err(panic_message)
        })
        .collect();

    let mut rows: Vec<TableRow> = primes
        .iter()
        .map(|p| TableRow {
            prime: p.get(),
            cells: config
                .algorithms
                .iter()
                .map(|&algorithm| Cell {
                    algorithm,
                    counts: Counts::default(),
                })
                .collect(),
        })
        .collect();
    for (&(w, e, a), outcome) in tasks.iter().zip(outcomes) {
        let load = &workloads[w];
        let row = primes
            .iter()
            .position(|p| p.get() == load.prime)
            .expect("known prime");
        match outcome {
            Ok(status) => rows[row].cells[a].counts.record(&status),
            Err(message) => errors.push(TaskError {
                prime: load.prime,
                minpoly: Some(load.ctx.field().to_string()),
                element: Some(e),
                algorithm: Some(config.algorithms[a]),
                message,
            }),
        }
    }
    Ok(BatchResult {
        rows,
        errors,
        z_counts,
    })
}
