//! Experiment harness: pseudorandom test suites, generator sets, batch
//! classification and table output.

mod batch;
mod bits;
mod suite;
mod table;
mod zset;

use thiserror::Error;

pub use batch::{
    run_batch, BatchResult, Cell, Counts, OutputSpec, RunConfig, TableFormat, TableRow, TaskError,
};
pub use bits::{byte_stream, irrational_bits, source_bytes, suite_sources, BitSource};
pub use suite::{
    build_test_set, build_test_set_with_budget, SuiteTrace, TestSuite, DEFAULT_BYTE_BUDGET,
    DEFAULT_SUITE_SIZE,
};
pub use table::{emit_table, parse_table, table_header, table_string};
pub use zset::{build_z_set, default_z_set, trinomial, DEFAULT_A_RANGE, DEFAULT_B_RANGE};

use crate::field::FieldError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("bit streams exhausted after {budget} bytes; raise the budget")]
    StreamExhausted { budget: usize },
    #[error("degree {0} is not supported here; need at least 2")]
    Degree(usize),
    #[error("x^{degree} + {a}x + {b}p: irreducibility not certified after {tried} primes")]
    Uncertified {
        degree: usize,
        a: i64,
        b: i64,
        tried: usize,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
