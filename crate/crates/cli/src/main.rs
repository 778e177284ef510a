use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use pcf::cfrac::{
    expand, Algorithm, Epsilon, Limits, Phi3Variant, DEFAULT_HEIGHT_CAP_EXPONENT, DEFAULT_MAX_STEPS,
};
use pcf::field::{validate_minpoly, Field, FieldElement, MinPoly, VectorElement};
use pcf::hensel::EmbeddingContext;
use pcf::lab::{build_test_set, default_z_set, emit_table, run_batch, RunConfig, TableFormat};
use pcf::rational::{parse_rational, Prime};

mod selftest;

const EXIT_VALIDATION: u8 = 2;
const EXIT_TASK_FAILURES: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pcf",
    version,
    about = "Multidimensional p-adic continued fractions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoName {
    Phi0,
    Phi1,
    Phi2,
    Phi3,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantName {
    H,
    G,
}

#[derive(Subcommand)]
enum Command {
    /// Expand one vector and report its status.
    Expand {
        #[arg(long)]
        p: u64,
        /// Lower coefficients `a1,...,an` of the monic minimal polynomial;
        /// `0` selects Q itself.
        #[arg(long, allow_hyphen_values = true)]
        minpoly: String,
        /// Components as a JSON array of ascending coefficient arrays,
        /// e.g. `[["0","1"],["0","0","1"]]`.
        #[arg(long)]
        elem: String,
        #[arg(long, value_enum)]
        algo: AlgoName,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps: i8,
        #[arg(long, default_value_t = 1)]
        lookahead: u32,
        #[arg(long, value_enum, default_value_t = VariantName::H)]
        variant: VariantName,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[arg(long, default_value_t = DEFAULT_HEIGHT_CAP_EXPONENT)]
        height_exp: u32,
        /// Print the full record as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List the generators x^d + a x + b p.
    Zset {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print a pseudorandom test suite, one JSON vector per line.
    Suite {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        minpoly: String,
        /// Vector length; must be the field degree minus one.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 100)]
        size: usize,
    },
    /// Run a batch described by a JSON config and print the table.
    Table {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatName>,
    },
    /// Check the built-in golden examples.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatName {
    Csv,
    Jsonl,
}

struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        message: message.to_string(),
    }
}

fn parse_minpoly(p: u64, text: &str) -> Result<Field, Failure> {
    let p = Prime::new(p).map_err(invalid)?;
    if text.trim() == "0" {
        return Ok(MinPoly::rational(p).into_field());
    }
    let coeffs = text
        .split(',')
        .map(|c| parse_rational(c.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    Ok(validate_minpoly(p, coeffs).map_err(invalid)?.into_field())
}

fn coefficient(v: &Value) -> Result<String, Failure> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(invalid(format!(
            "coefficient must be a string or integer, got {other}"
        ))),
    }
}

fn parse_elem(field: &Field, text: &str) -> Result<VectorElement, Failure> {
    let value: Value = serde_json::from_str(text).map_err(invalid)?;
    let comps = value
        .as_array()
        .ok_or_else(|| invalid("--elem must be a JSON array of components"))?;
    let comps = comps
        .iter()
        .map(|c| {
            let list = match c {
                Value::Array(xs) => xs.clone(),
                Value::Object(o) => o
                    .get("coeffs")
                    .and_then(Value::as_array)
                    .cloned()
                    .ok_or_else(|| invalid("component objects need a \"coeffs\" array"))?,
                scalar => vec![scalar.clone()],
            };
            let qs = list
                .iter()
                .map(|x| parse_rational(&coefficient(x)?).map_err(invalid))
                .collect::<Result<Vec<_>, _>>()?;
            FieldElement::new(field, &qs).map_err(invalid)
        })
        .collect::<Result<Vec<_>, _>>()?;
    VectorElement::new(comps).map_err(invalid)
}

fn algorithm(
    name: AlgoName,
    eps: i8,
    lookahead: u32,
    variant: VariantName,
) -> Result<Algorithm, Failure> {
    let epsilon = Epsilon::try_from(eps).map_err(invalid)?;
    if lookahead == 0 {
        return Err(invalid("--lookahead must be at least 1"));
    }
    Ok(match name {
        AlgoName::Phi0 => Algorithm::Phi0 { epsilon },
        AlgoName::Phi1 => Algorithm::Phi1 { epsilon },
        AlgoName::Phi2 => Algorithm::Phi2 { epsilon, lookahead },
        AlgoName::Phi3 => Algorithm::Phi3 {
            variant: match variant {
                VariantName::H => Phi3Variant::H,
                VariantName::G => Phi3Variant::G,
            },
        },
    })
}

fn io_failure(e: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Expand {
            p,
            minpoly,
            elem,
            algo,
            eps,
            lookahead,
            variant,
            max_steps,
            height_exp,
            json,
        } => {
            let field = parse_minpoly(p, &minpoly)?;
            let alpha = parse_elem(&field, &elem)?;
            let algorithm = algorithm(algo, eps, lookahead, variant)?;
            let limits = Limits {
                max_steps,
                height_cap_exponent: height_exp,
            };
            let ctx = EmbeddingContext::new(field.clone());
            let rec = expand(&ctx, &alpha, algorithm, &limits);
            if json {
                serde_json::to_writer_pretty(&mut out, &rec).map_err(io_failure)?;
                writeln!(out).map_err(io_failure)?;
            } else {
                writeln!(out, "field: Q(z), z root of {field} in Q_{p}").map_err(io_failure)?;
                writeln!(out, "algorithm: {algorithm}").map_err(io_failure)?;
                writeln!(out, "status: {:?}", rec.status).map_err(io_failure)?;
                writeln!(
                    out,
                    "steps: {} ({} identity)",
                    rec.steps.len(),
                    rec.identity_steps()
                )
                .map_err(io_failure)?;
                if rec.identity_dominated() {
                    writeln!(out, "warning: identity steps dominate the record")
                        .map_err(io_failure)?;
                }
                for (k, r) in rec.remainders.iter().enumerate().take(12) {
                    writeln!(out, "  [{k}] {r:?}").map_err(io_failure)?;
                }
                if rec.remainders.len() > 12 {
                    writeln!(out, "  ... {} more", rec.remainders.len() - 12)
                        .map_err(io_failure)?;
                }
            }
        }
        Command::Zset { p, degree, json } => {
            let prime = Prime::new(p).map_err(invalid)?;
            let set = default_z_set(prime, degree).map_err(invalid)?;
            for m in &set {
                if json {
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string(&m.to_json()).map_err(io_failure)?
                    )
                } else {
                    writeln!(out, "{m}")
                }
                .map_err(io_failure)?;
            }
            eprintln!("{} generators", set.len());
        }
        Command::Suite {
            p,
            minpoly,
            s,
            size,
        } => {
            let field = parse_minpoly(p, &minpoly)?;
            if let Some(s) = s {
                if s != field.dimension() {
                    return Err(invalid(format!(
                        "--s {s} does not match the field: vectors have length {}",
                        field.dimension()
                    )));
                }
            }
            let suite = build_test_set(&field, size).map_err(invalid)?;
            for v in &suite.elements {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&v.to_json()).map_err(io_failure)?
                )
                .map_err(io_failure)?;
            }
            eprintln!(
                "{} elements from {} candidates ({} rejected, {} duplicates)",
                suite.elements.len(),
                suite.trace.consumed,
                suite.trace.rejected,
                suite.trace.duplicates
            );
        }
        Command::Table { config, format } => {
            let text = fs::read_to_string(&config).map_err(invalid)?;
            let cfg: RunConfig = serde_json::from_str(&text).map_err(invalid)?;
            let result = run_batch(&cfg).map_err(invalid)?;
            let format = match (format, &cfg.output) {
                (Some(FormatName::Csv), _) => TableFormat::Csv,
                (Some(FormatName::Jsonl), _) => TableFormat::Jsonl,
                (None, Some(o)) => o.format,
                (None, None) => TableFormat::Csv,
            };
            match &cfg.output {
                Some(o) => {
                    let file = fs::File::create(&o.path).map_err(io_failure)?;
                    emit_table(
                        &result.rows,
                        &cfg.algorithms,
                        format,
                        io::BufWriter::new(file),
                    )
                    .map_err(io_failure)?;
                }
                None => emit_table(&result.rows, &cfg.algorithms, format, &mut out)
                    .map_err(io_failure)?,
            }
            for e in &result.errors {
                eprintln!(
                    "task error: {}",
                    serde_json::to_string(e).map_err(io_failure)?
                );
            }
            if !result.errors.is_empty() {
                return Err(Failure {
                    code: EXIT_TASK_FAILURES,
                    message: format!("{} task(s) failed", result.errors.len()),
                });
            }
        }
        Command::Selftest => {
            let failed = selftest::run(&mut out).map_err(io_failure)?;
            if failed > 0 {
                return Err(Failure {
                    code: EXIT_TASK_FAILURES,
                    message: format!("{failed} golden check(s) failed"),
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
