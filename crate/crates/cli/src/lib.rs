//! Command-line front end for `tropcount-core`.
//!
//! Every command writes its result to the supplied writer and reports an
//! exit status: 0 ok, 1 validation, 2 verification failure, 3 I/O,
//! 4 budget exceeded, 5 inconclusive.

pub mod suites;
pub mod table;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tropcount_core::count::{
    default_embedding, total_count_enumerated, total_count_for_type, CountOptions,
};
use tropcount_core::json::{
    graph_to_json, parse_field_matrix, parse_graph, parse_polarization, parse_torus,
};
use tropcount_core::theta::skeleton;
use tropcount_core::tori::{find_subtorus, validate_polarized_torus, SubtorusVerdict};
use tropcount_core::{
    normalize_type, nu, nu_dagger, AbelianType, Error, FieldMatrix, DEFAULT_BUDGET,
};

use crate::suites::Suite;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;
pub const EXIT_INCONCLUSIVE: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "tropcount",
    version,
    about = "Exact tropical curve counts on abelian surfaces and threefolds"
)]
pub struct Cli {
    /// Maximum number of HNF candidates examined by subgroup enumeration.
    #[arg(long, global = true, env = "TROPCOUNT_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sum over subgroups of the number of symmetric homomorphisms.
    Nu {
        /// Comma-separated factors, e.g. 2,4.
        #[arg(long = "type")]
        ty: String,
        /// Evaluate on the dual type instead.
        #[arg(long)]
        dagger: bool,
    },
    /// Values of nu on (d, ..., d) for d = 2..=max.
    Table {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long, default_value_t = 16)]
        max: u64,
        /// Append the (d1, d2) rows.
        #[arg(long)]
        pairs: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a property suite and print a JSON report.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Curve count for a polarization, by enumeration or from its type.
    Count {
        #[arg(long = "type", conflicts_with_all = ["polarization", "lattice"])]
        ty: Option<String>,
        #[arg(long, required_unless_present = "ty")]
        polarization: Option<PathBuf>,
        #[arg(long)]
        lattice: Option<PathBuf>,
        /// Attach the theta-divisor skeleton of every PPAV.
        #[arg(long)]
        skeletons: bool,
        /// Height bound of the subtorus search behind the simplicity
        /// warning; 0 skips it.
        #[arg(long, default_value_t = 0)]
        simple_height: u64,
    },
    /// Theta-divisor skeleton of a positive definite Gram matrix.
    Skeleton {
        #[arg(long)]
        gram: PathBuf,
    },
    /// Jacobian Gram matrix of a metric graph.
    Jacobian {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Decide whether a tropical torus is simple.
    Simple {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        polarization: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        height: u64,
    },
}

/// A failure that ends the command with a nonzero status.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })
}

/// Comma-separated factors in any order, normalized to invariant factors.
pub fn parse_type(text: &str) -> CliResult<AbelianType> {
    let values = text
        .split(',')
        .map(|s| {
            s.trim().parse::<u64>().map_err(|_| CliError {
                code: EXIT_VALIDATION,
                message: format!("malformed type {text:?}"),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(normalize_type(&values)?)
}

/// A Gram matrix file: either `{"D": .., "entries": ..}` or a bare array
/// of rational entries.
fn parse_gram(text: &str) -> CliResult<FieldMatrix> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let wrapped = if value.is_array() {
        json!({ "entries": value })
    } else {
        value
    };
    Ok(parse_field_matrix(&wrapped.to_string())?)
}

fn json_line(out: &mut dyn Write, v: &impl serde::Serialize) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| std::io::Error::other(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Runs one command, writing its output; returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<u8> {
    let budget = cli.budget;
    match &cli.command {
        Command::Nu { ty, dagger } => {
            let t = parse_type(ty)?;
            let v = if *dagger {
                nu_dagger(&t, budget)?
            } else {
                nu(&t, budget)?
            };
            writeln!(out, "{v}")?;
        }
        Command::Table {
            genus,
            max,
            pairs,
            format,
        } => {
            if !(2..=3).contains(genus) {
                return Err(Error::UnsupportedRank(*genus).into());
            }
            let rows = table::table_rows(*genus, *max, *pairs, budget)?;
            let text = match format {
                Format::Csv => table::to_csv(&rows),
                Format::Json => table::to_json(&rows),
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Verify { suite, seed } => {
            let report = suites::run_suite(*suite, *seed, budget)?;
            eprint!("{}", report.render());
            json_line(out, &report)?;
            if !report.pass {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Count {
            ty,
            polarization,
            lattice,
            skeletons,
            simple_height,
        } => {
            if let Some(ty) = ty {
                let t = parse_type(ty)?;
                writeln!(out, "{}", total_count_for_type(&t, budget)?)?;
                return Ok(EXIT_OK);
            }
            let path = polarization.as_ref().expect("required by clap");
            let c = parse_polarization(&read(path)?)?;
            let torus = match lattice {
                Some(p) => parse_torus(&read(p)?)?,
                None => default_embedding(c.matrix())?,
            };
            let opts = CountOptions {
                skeletons: *skeletons,
                simplicity_height: *simple_height,
                budget,
            };
            let report = total_count_enumerated(&torus, c.matrix(), opts)?;
            json_line(out, &report)?;
            if !report.agreement {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Skeleton { gram } => {
            let q = parse_gram(&read(gram)?)?;
            let sk = skeleton(&q)?;
            let mut v = graph_to_json(&sk.graph);
            v["degenerate"] = json!(sk.degenerate);
            v["selling"] = json!(sk.selling.params);
            json_line(out, &v)?;
        }
        Command::Jacobian { graph } => {
            let g = parse_graph(&read(graph)?)?;
            let v = json!({
                "genus": g.genus()?,
                "three_edge_connected": g.is_m_edge_connected(3)?,
                "gram": g.jacobian_gram()?,
            });
            json_line(out, &v)?;
        }
        Command::Simple {
            lattice,
            polarization,
            height,
        } => {
            let t = parse_torus(&read(lattice)?)?;
            if let Some(p) = polarization {
                validate_polarized_torus(&t, &parse_polarization(&read(p)?)?)?;
            }
            let verdict = find_subtorus(&t, *height)?;
            json_line(out, &verdict)?;
            if matches!(verdict, SubtorusVerdict::Inconclusive { .. }) {
                return Ok(EXIT_INCONCLUSIVE);
            }
        }
    }
    Ok(EXIT_OK)
}
