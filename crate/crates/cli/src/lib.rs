//! Command-line front end: argument and config handling, field ingestion, output, and
//! reproduction of the published tables.

pub mod config;
pub mod error;
pub mod fields;
pub mod output;
pub mod reference;
pub mod tables;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use conductor_core::bounds::{
    bound_abelian_q, bound_elliptic_q, bound_number_field, lambda_profile, scan_fields, BoundQuery,
    BoundResult, LambdaGrid, Mode, ScanConfig,
};
use conductor_core::numberfield::NumberField;
use conductor_core::optimizer::optimize_testfunc;
use conductor_core::sums::ReductionSpec;
use conductor_core::testfunc::{TestFunction, TestFunctionSpec};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use config::{QueryArgs, Settings};
use error::CliError;

const FORMATS_HINT: &str = "Input formats are described in docs/formats.md.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "conductor",
    version,
    about = "Explicit-formula lower bounds for conductors",
    after_help = FORMATS_HINT
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Elliptic curves over ℚ with per-prime reduction types.
    BoundQ(QueryArgs),
    /// Abelian varieties over ℚ of dimension --dim.
    BoundAv(QueryArgs),
    /// Bound for each field in --fields (one JSON line per field).
    BoundField(QueryArgs),
    /// Everywhere-good-reduction scan over --fields.
    ScanFields(QueryArgs),
    /// Best even polynomial autocorrelation for an abelian query over ℚ.
    OptimizeTestfunc(QueryArgs),
    /// Recompute the published tables and compare.
    ReproduceTables {
        /// Table number 1–5; all tables when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        table: Option<u8>,
        #[arg(long, value_enum, default_value = "csv")]
        out: OutFormat,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn q_grid() -> LambdaGrid {
    tables::default_grid()
}

fn field_grid() -> LambdaGrid {
    LambdaGrid {
        lo: 1.0,
        hi: 6.0,
        step: 0.01,
    }
}

/// In unconditional mode the query applies the damping itself.
fn build_testfunc(s: &Settings) -> Result<TestFunction, CliError> {
    let spec = match (&s.mode, &s.testfunc) {
        (Mode::Uncond, TestFunctionSpec::Odlyzko { .. }) => {
            TestFunctionSpec::Odlyzko { cosh_damped: false }
        }
        (Mode::Uncond, TestFunctionSpec::Poly { coeffs, .. }) => TestFunctionSpec::Poly {
            coeffs: coeffs.clone(),
            cosh_damped: false,
        },
        (_, t) => t.clone(),
    };
    Ok(spec.build()?)
}

fn query_from(
    s: &Settings,
    field: NumberField,
    dim: u32,
    spec: ReductionSpec,
) -> Result<BoundQuery, CliError> {
    Ok(BoundQuery {
        field,
        dim,
        rank: s.rank,
        spec,
        testfunc: build_testfunc(s)?,
        lambda: s.lambda,
        mode: s.mode,
        model: s.model,
        quadrature: s.quadrature,
        seed: s.seed,
    })
}

fn abelian_dim(s: &Settings) -> u32 {
    match (&s.spec, s.dim) {
        (_, Some(d)) => d,
        (ReductionSpec::Abelian { dim, .. }, None) => *dim,
        _ => 1,
    }
}

fn abelian_spec(s: &Settings, dim: u32) -> ReductionSpec {
    if s.spec.is_empty() && dim != 1 {
        ReductionSpec::unconstrained(dim)
    } else {
        s.spec.clone()
    }
}

fn emit_bounds(
    out: &mut dyn Write,
    s: &Settings,
    queries: &[(Option<&str>, BoundQuery)],
    single: impl Fn(&BoundQuery) -> conductor_core::Result<BoundResult> + Sync,
) -> Result<(), CliError> {
    use rayon::prelude::*;
    match s.out {
        OutFormat::Json => {
            let results = queries
                .par_iter()
                .map(|(label, q)| single(q).map(|r| output::bound_json(*label, &r)))
                .collect::<conductor_core::Result<Vec<_>>>()?;
            if let [one] = results.as_slice() {
                output::write_json(out, one)
            } else {
                output::write_json_lines(out, &results)
            }
        }
        OutFormat::Csv => {
            let profiles = queries
                .iter()
                .map(|(_, q)| lambda_profile(q))
                .collect::<conductor_core::Result<Vec<_>>>()?;
            let rows: Vec<_> = queries
                .iter()
                .zip(&profiles)
                .flat_map(|((label, _), p)| p.iter().map(move |r| (*label, r)))
                .collect();
            output::write_profile_csv(out, &rows)
        }
    }
}

fn load(s: &Settings) -> Result<Vec<NumberField>, CliError> {
    let path = s
        .fields
        .as_ref()
        .ok_or_else(|| CliError::Usage("--fields <path> is required".into()))?;
    Ok(fields::load_fields(path)?.0)
}

fn optimize_json(s: &Settings) -> Result<Value, CliError> {
    let dim = abelian_dim(s);
    let q = query_from(s, NumberField::rationals(), dim, abelian_spec(s, dim))?;
    let (_, o) = optimize_testfunc(&q, s.basis_degree)?;
    let mut v = json!({
        "lambda": o.lambda,
        "basis_degree": o.basis_degree,
        "coeff_model": match s.model {
            conductor_core::sums::CoefficientModel::PerTermFloor => "floor",
            conductor_core::sums::CoefficientModel::FixedTrace => "trace",
        },
        "coeffs": o.coeffs,
        "program_log_bound": o.program_log_bound,
        "polynomial": output::bound_json(None, &o.poly),
        "odlyzko": output::bound_json(None, &o.odlyzko),
    });
    output::round_value(&mut v);
    Ok(v)
}

fn with_pool<T>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::BoundQ(a) => {
            let s = Settings::resolve(&a, q_grid())?;
            if s.dim.is_some_and(|d| d != 1) || matches!(s.spec, ReductionSpec::Abelian { .. }) {
                return Err(CliError::Usage(
                    "bound-q is for elliptic curves; use bound-av for other dimensions".into(),
                ));
            }
            let q = query_from(&s, NumberField::rationals(), 1, s.spec.clone())?;
            let mut buf = Vec::new();
            with_pool(s.workers, || {
                emit_bounds(&mut buf, &s, &[(None, q)], bound_elliptic_q)
            })??;
            out.write_all(&buf)?;
        }
        Command::BoundAv(a) => {
            let s = Settings::resolve(&a, q_grid())?;
            let dim = abelian_dim(&s);
            let q = query_from(&s, NumberField::rationals(), dim, abelian_spec(&s, dim))?;
            let mut buf = Vec::new();
            with_pool(s.workers, || {
                emit_bounds(&mut buf, &s, &[(None, q)], bound_abelian_q)
            })??;
            out.write_all(&buf)?;
        }
        Command::BoundField(a) => {
            let s = Settings::resolve(&a, field_grid())?;
            if !s.spec.is_empty() {
                return Err(CliError::Usage(
                    "reduction types are only supported over ℚ (bound-q, bound-av)".into(),
                ));
            }
            let dim = s.dim.unwrap_or(1);
            let fields = load(&s)?;
            let queries = fields
                .into_iter()
                .map(|k| {
                    let label = k.label.clone();
                    query_from(&s, k, dim, ReductionSpec::default()).map(|q| (label, q))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<_> = queries
                .iter()
                .map(|(l, q)| (Some(l.as_str()), q.clone()))
                .collect();
            let mut buf = Vec::new();
            with_pool(s.workers, || {
                emit_bounds(&mut buf, &s, &refs, bound_number_field)
            })??;
            out.write_all(&buf)?;
        }
        Command::ScanFields(a) => {
            let s = Settings::resolve(&a, field_grid())?;
            let fields = load(&s)?;
            let cfg = ScanConfig {
                grid: s.lambda,
                testfunc: build_testfunc(&s)?,
                mode: s.mode,
                model: s.model,
                quadrature: s.quadrature,
                seed: s.seed,
            };
            let report = with_pool(s.workers, || scan_fields(&fields, &cfg))??;
            match s.out {
                OutFormat::Json => output::write_json(out, &output::scan_json(&report)?)?,
                OutFormat::Csv => output::write_scan_csv(out, &report.entries)?,
            }
        }
        Command::OptimizeTestfunc(a) => {
            let s = Settings::resolve(&a, q_grid())?;
            if s.out == OutFormat::Csv {
                return Err(CliError::Usage("optimize-testfunc only writes JSON".into()));
            }
            let v = with_pool(s.workers, || optimize_json(&s))??;
            output::write_json(out, &v)?;
        }
        Command::ReproduceTables {
            table,
            out: fmt,
            workers,
        } => {
            if workers == Some(0) {
                return Err(CliError::Usage("--workers must be at least 1".into()));
            }
            let rows = with_pool(workers, || tables::reproduce(table))??;
            match fmt {
                OutFormat::Csv => output::write_table_csv(out, &rows)?,
                OutFormat::Json => output::write_json(out, &output::to_rounded_value(&rows)?)?,
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command. Returns the exit
/// code: 0 on success, 1 for usage, validation or I/O errors, 2 for numerical failures.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            let _ = writeln!(err, "{FORMATS_HINT}");
            return 1;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, CliError::Usage(_)) {
                let _ = writeln!(err, "{FORMATS_HINT}");
            }
            e.exit_code()
        }
    }
}
