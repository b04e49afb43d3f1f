//! Command-line front end: every library construct exposed over JSON/CSV.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad flags, malformed
//! inputs), 1 on computation errors with a one-line machine-readable
//! diagnostic on stderr.

mod render;

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cumulant_poly::combinat::{
    augmented_partitions_with_caps, enumerate_partitions_with_caps, MultiIndex, SizeCaps,
};
use cumulant_poly::cumulant::{
    correlated_substitution, cumulant_polynomial_with_caps, multivariable_cumulant_polynomial,
    random_sum_cumulants, SequenceTable, SubstitutionMode, TableKind,
};
use cumulant_poly::error::{Error, Result};
use cumulant_poly::io;
use cumulant_poly::mc::{compare, simulate_moments, symbolic_moments, SampleSpec};
use cumulant_poly::models::{
    hermite, merton_cumulants, merton_moments, nef_series, sheffer_coefficients, vg_cumulants,
    vg_moments,
};
use cumulant_poly::ring::{parse_rational, rational_string, Rational, SparsePoly};
use cumulant_poly::series::{compose_multi_outer, compose_uni_outer, TruncatedSeries};
use cumulant_poly::symfunc::{
    elementary_symmetric, matrix_cumulants_from_trace_moments, sampling_invariance_check,
    trace_moments_from_matrix_cumulants, weighted_sum_moment,
};
use render::{render, Format};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "cumulants",
    version,
    about = "Exact multivariate cumulant polynomial sequences: partitions, conversions, \
             compositions, model moments, symmetric functions and Monte Carlo validation"
)]
struct Cli {
    /// Output format (JSON is canonical; csv and pretty are derived from it)
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Override the dimension cap (default 4, env CUMULANTS_MAX_DIM)
    #[arg(long, global = true)]
    max_dim: Option<usize>,

    /// Override the total-degree cap (default 12, env CUMULANTS_MAX_DEGREE)
    #[arg(long, global = true)]
    max_degree: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the partitions of a multi-index in canonical form
    Partitions {
        /// Target multi-index, e.g. 2,1
        #[arg(long)]
        index: String,
        /// Instead enumerate the augmented matrices P_n(index) for n slots
        #[arg(long)]
        augmented: Option<usize>,
    },
    /// Convert a moment table to cumulants
    M2c {
        /// Moment table (path, inline JSON, or - for stdin)
        #[arg(long)]
        moments: String,
    },
    /// Convert a cumulant table to moments
    C2m {
        /// Cumulant table (path, inline JSON, or - for stdin)
        #[arg(long)]
        cumulants: String,
    },
    /// The cumulant polynomial C_i(y) of a table, symbolic or numeric
    Cumpoly {
        #[arg(long)]
        index: String,
        /// Cumulant table input; omit with --symbolic
        #[arg(long)]
        cumulants: Option<String>,
        /// Treat the cumulants themselves as formal symbols c[j]
        #[arg(long)]
        symbolic: bool,
        /// Evaluate the polynomial at this rational y
        #[arg(long)]
        y: Option<String>,
    },
    /// Cumulants of a random sum: outer univariate table composed with an
    /// inner table
    Randsum {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        cumulants: String,
    },
    /// The multivariable cumulant polynomial over one table per slot
    Multipoly {
        #[arg(long)]
        index: String,
        /// One cumulant table per slot (repeat the flag)
        #[arg(long, required = true)]
        cumulants: Vec<String>,
        /// Joint cumulant table of the substituted vector
        #[arg(long)]
        joint: Option<String>,
        /// What the joint table substitutes for the monomials
        #[arg(long, value_parser = ["moments", "cumulants"])]
        mode: Option<String>,
        /// Evaluate at these rationals y1,...,yn
        #[arg(long)]
        y: Option<String>,
    },
    /// Compose series or tables: outer applied to one or more delta inners
    Compose {
        #[arg(long)]
        outer: String,
        /// Inner series/tables (repeat the flag for a multivariate outer)
        #[arg(long, required = true)]
        inner: Vec<String>,
    },
    /// Multivariate Hermite polynomial H_i(y, Sigma)
    Hermite {
        #[arg(long)]
        index: String,
        /// Covariance matrix as JSON (inline or path)
        #[arg(long)]
        cov: String,
    },
    /// Exponential-family expansion around x
    Nef {
        /// Point x as comma-separated rationals
        #[arg(long)]
        x: String,
        #[arg(long)]
        cumulants: String,
        #[arg(long)]
        order: u32,
    },
    /// Sheffer coefficients of g(theta) exp K(theta) with g = exp(K~)
    Sheffer {
        #[arg(long)]
        ctilde: String,
        #[arg(long)]
        cumulants: String,
        #[arg(long)]
        order: u32,
    },
    /// Model moment tables
    Model {
        #[command(subcommand)]
        model: ModelCommand,
    },
    /// Symmetric-function and random-matrix operations
    Symfun {
        #[command(subcommand)]
        fun: SymfunCommand,
    },
    /// Simulate a model and compare against the symbolic pipeline
    McValidate {
        /// Sample spec JSON (model, params, samples, seed, max_order)
        #[arg(long)]
        spec: String,
        /// Pass threshold in standard errors
        #[arg(long, default_value_t = 4.0)]
        k: f64,
        /// Override the spec's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the spec's sample count
        #[arg(long)]
        samples: Option<u64>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Model spec JSON (inline or path)
    #[arg(long)]
    spec: String,
    #[arg(long)]
    order: u32,
    /// Emit this table ("moments" of the process at its horizon, or the
    /// "cumulants" table: per unit time for merton, at time t for vg)
    #[arg(long, default_value = "moments", value_parser = ["moments", "cumulants"])]
    table: String,
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Merton jump diffusion
    Merton(ModelArgs),
    /// Common-clock variance gamma
    Vg(ModelArgs),
}

#[derive(Subcommand)]
enum SymfunCommand {
    /// Moments of a weighted sum of i.i.d. variables in the power-sum basis
    Wsum {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        cumulants: String,
        #[arg(long)]
        n: usize,
    },
    /// Elementary symmetric polynomials, exponential convention
    Elem {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: u32,
    },
    /// Trace moments from eigenvalue cumulants, or back
    Trace {
        /// Eigenvalue cumulant table (forward direction)
        #[arg(long)]
        cumulants: Option<String>,
        /// Matrix dimension (forward direction)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        order: Option<u32>,
        /// Trace-moment table JSON (backward direction)
        #[arg(long)]
        trace_moments: Option<String>,
    },
    /// Simple-random-sampling invariance check
    Invcheck {
        #[arg(long)]
        cumulants: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        order: u32,
    },
}

/// Reads an input argument: inline JSON (starts with '{' or '['), "-" for
/// stdin, or a file path.
fn read_input(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{argable}: {e}", arg_able = arg)))
}

fn read_json(arg: &str) -> Result<Value> {
    let text = read_input(arg)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))
}

fn read_table(arg: &str) -> Result<SequenceTable<Rational>> {
    io::table_from_json(&read_json(arg)?)
}

/// Reads either a series document or a table (converted to its delta
/// series) for the composition commands.
fn read_series_like(arg: &str) -> Result<TruncatedSeries<Rational>> {
    let v = read_json(arg)?;
    if v.get("coeffs").is_some() {
        io::series_from_json(&v)
    } else {
        Ok(io::table_from_json(&v)?.to_delta_series())
    }
}

fn parse_rationals_csv(arg: &str) -> Result<Vec<Rational>> {
    arg.split(',').map(parse_rational).collect()
}

fn effective_caps(cli: &Cli) -> Result<SizeCaps> {
    let mut caps = SizeCaps::default();
    if let Ok(s) = std::env::var("CUMULANTS_MAX_DIM") {
        caps.max_dim = s
            .parse()
            .map_err(|_| Error::Parse(format!("CUMULANTS_MAX_DIM: bad value {s:?}")))?;
    }
    if let Ok(s) = std::env::var("CUMULANTS_MAX_DEGREE") {
        caps.max_degree = s
            .parse()
            .map_err(|_| Error::Parse(format!("CUMULANTS_MAX_DEGREE: bad value {s:?}")))?;
    }
    if let Some(d) = cli.max_dim {
        caps.max_dim = d;
    }
    if let Some(deg) = cli.max_degree {
        caps.max_degree = deg;
    }
    Ok(caps)
}

fn check_table_caps(t: &SequenceTable<Rational>, caps: &SizeCaps) -> Result<()> {
    if t.dim() > caps.max_dim {
        return Err(Error::SizeCap(format!(
            "table dimension {} exceeds cap {}",
            t.dim(),
            caps.max_dim
        )));
    }
    if t.order() > caps.max_degree {
        return Err(Error::SizeCap(format!(
            "table order {} exceeds cap {}",
            t.order(),
            caps.max_degree
        )));
    }
    Ok(())
}

fn named_poly_with_index(index: &MultiIndex, p: &SparsePoly<Rational>) -> Value {
    let mut doc = io::named_poly_to_json(p);
    doc.as_object_mut()
        .expect("object")
        .insert("index".into(), json!(index.to_string()));
    doc
}

fn run(cli: &Cli) -> Result<Value> {
    let caps = effective_caps(cli)?;
    match &cli.command {
        Command::Partitions { index, augmented } => {
            let index: MultiIndex = index.parse()?;
            caps.check(&index)?;
            match augmented {
                None => {
                    let parts = enumerate_partitions_with_caps(&index, &caps)?;
                    Ok(json!({
                        "index": index.to_string(),
                        "count": parts.len(),
                        "partitions": io::partitions_to_json(&parts),
                    }))
                }
                Some(n) => {
                    let elements = augmented_partitions_with_caps(&index, *n, &caps)?;
                    Ok(json!({
                        "index": index.to_string(),
                        "n": n,
                        "count": elements.len(),
                        "elements": elements
                            .iter()
                            .map(io::augmented_partition_to_json)
                            .collect::<Vec<_>>(),
                    }))
                }
            }
        }
        Command::M2c { moments } => {
            let t = read_table(moments)?;
            check_table_caps(&t, &caps)?;
            let c = cumulant_poly::cumulant::cumulants_from_moments(&t)?;
            Ok(io::table_to_json(&c))
        }
        Command::C2m { cumulants } => {
            let t = read_table(cumulants)?;
            check_table_caps(&t, &caps)?;
            let m = cumulant_poly::cumulant::moments_from_cumulants(&t)?;
            Ok(io::table_to_json(&m))
        }
        Command::Cumpoly {
            index,
            cumulants,
            symbolic,
            y,
        } => {
            let index: MultiIndex = index.parse()?;
            caps.check(&index)?;
            if *symbolic {
                if y.is_some() {
                    return Err(Error::Parse(
                        "--y needs a numeric table; it cannot combine with --symbolic".into(),
                    ));
                }
                let table = SequenceTable::symbolic_cumulants(index.dim(), index.total())?;
                let poly = cumulant_polynomial_with_caps(&index, &table, &caps)?;
                let flat = poly.poly().flatten()?;
                Ok(named_poly_with_index(&index, &flat))
            } else {
                let table_arg = cumulants.as_ref().ok_or_else(|| {
                    Error::Parse("cumpoly needs --cumulants FILE or --symbolic".into())
                })?;
                let table = read_table(table_arg)?;
                check_table_caps(&table, &caps)?;
                let poly = cumulant_polynomial_with_caps(&index, &table, &caps)?;
                match y {
                    Some(y) => {
                        let value = poly.eval(&parse_rational(y)?);
                        Ok(json!({
                            "index": index.to_string(),
                            "y": y,
                            "value": rational_string(&value),
                        }))
                    }
                    None => Ok(named_poly_with_index(&index, poly.poly())),
                }
            }
        }
        Command::Randsum { outer, cumulants } => {
            let g = read_table(outer)?;
            let c = read_table(cumulants)?;
            check_table_caps(&c, &caps)?;
            let h = random_sum_cumulants(&g, &c)?;
            Ok(io::table_to_json(&h))
        }
        Command::Multipoly {
            index,
            cumulants,
            joint,
            mode,
            y,
        } => {
            let index: MultiIndex = index.parse()?;
            caps.check(&index)?;
            let tables: Vec<SequenceTable<Rational>> = cumulants
                .iter()
                .map(|arg| {
                    let t = read_table(arg)?;
                    check_table_caps(&t, &caps)?;
                    Ok(t)
                })
                .collect::<Result<_>>()?;
            if let Some(joint) = joint {
                let mode = match mode.as_deref() {
                    Some("moments") => SubstitutionMode::Moments,
                    Some("cumulants") => SubstitutionMode::Cumulants,
                    _ => {
                        return Err(Error::Parse(
                            "--joint requires --mode moments|cumulants".into(),
                        ))
                    }
                };
                let joint = read_table(joint)?;
                let value = correlated_substitution(&index, &tables, &joint, mode)?;
                return Ok(json!({
                    "index": index.to_string(),
                    "mode": match mode {
                        SubstitutionMode::Moments => "moments",
                        SubstitutionMode::Cumulants => "cumulants",
                    },
                    "value": rational_string(&value),
                }));
            }
            let poly = multivariable_cumulant_polynomial(&index, &tables)?;
            match y {
                Some(y) => {
                    let point = parse_rationals_csv(y)?;
                    let value = poly.eval(&point)?;
                    Ok(json!({
                        "index": index.to_string(),
                        "y": y,
                        "value": rational_string(&value),
                    }))
                }
                None => Ok(named_poly_with_index(&index, &poly)),
            }
        }
        Command::Compose { outer, inner } => {
            let outer = read_series_like(outer)?;
            let inners: Vec<TruncatedSeries<Rational>> = inner
                .iter()
                .map(|arg| read_series_like(arg))
                .collect::<Result<_>>()?;
            let composed = if inners.len() == 1 && outer.dim() == 1 {
                compose_uni_outer(&outer, &inners[0])?
            } else {
                compose_multi_outer(&outer, &inners)?
            };
            Ok(io::series_to_json(&composed))
        }
        Command::Hermite { index, cov } => {
            let index: MultiIndex = index.parse()?;
            caps.check(&index)?;
            let cov = io::matrix_from_json(&read_json(cov)?)?;
            let poly = hermite(&index, &cov)?;
            Ok(named_poly_with_index(&index, &poly))
        }
        Command::Nef { x, cumulants, order } => {
            let x = parse_rationals_csv(x)?;
            let c = read_table(cumulants)?;
            check_table_caps(&c, &caps)?;
            let series = nef_series(&x, &c, *order)?;
            Ok(io::series_to_json(&series))
        }
        Command::Sheffer {
            ctilde,
            cumulants,
            order,
        } => {
            let a = read_table(ctilde)?;
            let b = read_table(cumulants)?;
            check_table_caps(&a, &caps)?;
            check_table_caps(&b, &caps)?;
            let s = sheffer_coefficients(&a, &b, *order)?;
            Ok(io::table_to_json(&s))
        }
        Command::Model { model } => {
            let (args, is_merton) = match model {
                ModelCommand::Merton(a) => (a, true),
                ModelCommand::Vg(a) => (a, false),
            };
            if args.order > caps.max_degree {
                return Err(Error::SizeCap(format!(
                    "order {} exceeds cap {}",
                    args.order, caps.max_degree
                )));
            }
            let spec = read_json(&args.spec)?;
            let table = if is_merton {
                let spec = io::merton_spec_from_json(&spec)?;
                if args.table == "cumulants" {
                    merton_cumulants(&spec, args.order)?
                } else {
                    merton_moments(&spec, args.order)?
                }
            } else {
                let spec = io::vg_spec_from_json(&spec)?;
                if args.table == "cumulants" {
                    vg_cumulants(&spec, args.order)?
                } else {
                    vg_moments(&spec, args.order)?
                }
            };
            Ok(io::table_to_json(&table))
        }
        Command::Symfun { fun } => match fun {
            SymfunCommand::Wsum { i, cumulants, n } => {
                let c = read_table(cumulants)?;
                check_table_caps(&c, &caps)?;
                let (expr, expanded) = weighted_sum_moment(*i, &c, *n)?;
                Ok(json!({
                    "i": i,
                    "n": n,
                    "power_sum_basis": io::named_poly_to_json(expr.poly()),
                    "expanded": io::named_poly_to_json(&expanded),
                }))
            }
            SymfunCommand::Elem { n, order } => {
                let polys = elementary_symmetric(*n, *order)?;
                Ok(json!({
                    "n": n,
                    "order": order,
                    "polynomials": polys
                        .iter()
                        .map(io::named_poly_to_json)
                        .collect::<Vec<_>>(),
                }))
            }
            SymfunCommand::Trace {
                cumulants,
                n,
                order,
                trace_moments,
            } => match (cumulants, trace_moments) {
                (Some(cumulants), None) => {
                    let c = read_table(cumulants)?;
                    check_table_caps(&c, &caps)?;
                    let n = n.ok_or_else(|| Error::Parse("trace needs --n".into()))?;
                    let order = order.unwrap_or(c.order());
                    let tm = trace_moments_from_matrix_cumulants(&c, n, order)?;
                    Ok(io::trace_table_to_json(&tm))
                }
                (None, Some(tm)) => {
                    let tm = io::trace_table_from_json(&read_json(tm)?)?;
                    let c = matrix_cumulants_from_trace_moments(&tm)?;
                    Ok(io::table_to_json(&c))
                }
                _ => Err(Error::Parse(
                    "trace needs exactly one of --cumulants or --trace-moments".into(),
                )),
            },
            SymfunCommand::Invcheck {
                cumulants,
                n,
                m,
                order,
            } => {
                let c = read_table(cumulants)?;
                check_table_caps(&c, &caps)?;
                let report = sampling_invariance_check(&c, *n, *m, *order)?;
                Ok(json!({
                    "n": n,
                    "m": m,
                    "order": order,
                    "pass": report.pass,
                    "from_full": io::table_to_json(&report.from_full),
                    "from_sample": io::table_to_json(&report.from_sample),
                }))
            }
        },
        Command::McValidate {
            spec,
            k,
            seed,
            samples,
        } => {
            let mut spec: SampleSpec = io::sample_spec_from_json(&read_json(spec)?)?;
            if let Some(seed) = seed {
                spec.seed = *seed;
            }
            if let Some(samples) = samples {
                spec.samples = *samples;
            }
            let symbolic = symbolic_moments(&spec)?;
            let estimates = simulate_moments(&spec)?;
            let report = compare(&symbolic, &estimates, *k)?;
            Ok(io::validation_report_to_json(&spec, &report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|value| render(cli.format, &value)) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            let kind = match err {
                Error::Parse(_) => "usage",
                _ => "computation",
            };
            eprintln!("{}", json!({ "error": err.to_string(), "kind": kind }));
            match err {
                Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
