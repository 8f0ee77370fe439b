//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use conductor_core::bounds::{LambdaGrid, LambdaSpec, Mode};
use conductor_core::quadrature::QuadratureConfig;
use conductor_core::sums::{AbelianType, CoefficientModel, EllipticType, ReductionSpec};
use conductor_core::testfunc::TestFunctionSpec;
use serde::Deserialize;

use crate::error::CliError;
use crate::OutFormat;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridForm {
    Text(String),
    Grid(LambdaGrid),
}

impl GridForm {
    fn resolve(&self) -> Result<LambdaGrid, CliError> {
        Ok(match self {
            GridForm::Text(s) => LambdaGrid::parse(s)?,
            GridForm::Grid(g) => {
                g.validate()?;
                *g
            }
        })
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lambda: Option<f64>,
    pub lambda_grid: Option<GridForm>,
    pub rank: Option<u32>,
    pub dim: Option<u32>,
    pub mode: Option<Mode>,
    pub testfunc: Option<TestFunctionSpec>,
    pub spec: Option<ReductionSpec>,
    pub fields: Option<PathBuf>,
    pub out: Option<OutFormat>,
    pub coeff_model: Option<String>,
    pub basis_degree: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub quadrature: Option<QuadratureConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Command-line overrides shared by the query subcommands.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct QueryArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Evaluate at a single λ.
    #[arg(long, conflicts_with = "lambda_grid", allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Scan λ over lo:hi:step and keep the best bound.
    #[arg(long = "lambda-grid", value_name = "LO:HI:STEP")]
    pub lambda_grid: Option<String>,
    /// Analytic rank r.
    #[arg(long)]
    pub rank: Option<u32>,
    /// Dimension g.
    #[arg(long)]
    pub dim: Option<u32>,
    /// grh or uncond.
    #[arg(long)]
    pub mode: Option<String>,
    /// odlyzko or poly:a0,a2,…
    #[arg(long)]
    pub testfunc: Option<String>,
    /// Apply the cosh damping to the test function.
    #[arg(long)]
    pub cosh_damped: bool,
    /// JSON-lines field data file.
    #[arg(long)]
    pub fields: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub out: Option<OutFormat>,
    /// Primes of good reduction (comma-separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub good: Vec<u64>,
    /// Primes of multiplicative reduction.
    #[arg(long, value_delimiter = ',')]
    pub mult: Vec<u64>,
    /// Primes of additive reduction.
    #[arg(long, value_delimiter = ',')]
    pub add: Vec<u64>,
    /// Abelian reduction type p:g_ab,g_m,g_u (repeatable).
    #[arg(long = "bad-type", value_name = "P:K,N,M")]
    pub bad_type: Vec<String>,
    /// floor (per-term ⌊2√q^m⌋) or trace (fixed Euler factors).
    #[arg(long = "coeff-model")]
    pub coeff_model: Option<String>,
    /// Highest power x^{2d} in the optimizer basis.
    #[arg(long = "basis-degree")]
    pub basis_degree: Option<usize>,
    /// Seed for equal-degree factorization.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug)]
pub struct Settings {
    pub lambda: LambdaSpec,
    pub rank: u32,
    pub dim: Option<u32>,
    pub mode: Mode,
    pub testfunc: TestFunctionSpec,
    pub spec: ReductionSpec,
    pub fields: Option<PathBuf>,
    pub out: OutFormat,
    pub model: CoefficientModel,
    pub basis_degree: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub quadrature: QuadratureConfig,
}

fn parse_bad_type(s: &str) -> Result<(u64, AbelianType), CliError> {
    let bad = || CliError::Usage(format!("--bad-type expects p:k,n,m, got '{s}'"));
    let (p, rest) = s.split_once(':').ok_or_else(bad)?;
    let p: u64 = p.trim().parse().map_err(|_| bad())?;
    let v: Vec<u32> = rest
        .split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match v.as_slice() {
        [k, n, m] => Ok((p, AbelianType::new(*k, *n, *m))),
        _ => Err(bad()),
    }
}

fn flag_spec(args: &QueryArgs, dim: Option<u32>) -> Result<Option<ReductionSpec>, CliError> {
    let elliptic = !(args.good.is_empty() && args.mult.is_empty() && args.add.is_empty());
    if elliptic && !args.bad_type.is_empty() {
        return Err(CliError::Usage(
            "--good/--mult/--add cannot be combined with --bad-type".into(),
        ));
    }
    if elliptic {
        let mut m = BTreeMap::new();
        for (list, t) in [
            (&args.good, EllipticType::Good),
            (&args.mult, EllipticType::Multiplicative),
            (&args.add, EllipticType::Additive),
        ] {
            for &p in list {
                if m.insert(p, t).is_some() {
                    return Err(CliError::Usage(format!(
                        "prime {p} given two reduction types"
                    )));
                }
            }
        }
        return Ok(Some(ReductionSpec::Elliptic(m)));
    }
    if !args.bad_type.is_empty() {
        let mut entries = BTreeMap::new();
        for s in &args.bad_type {
            let (p, t) = parse_bad_type(s)?;
            if entries.insert(p, t).is_some() {
                return Err(CliError::Usage(format!(
                    "prime {p} given two reduction types"
                )));
            }
        }
        let dim = dim.unwrap_or_else(|| entries.values().next().map_or(1, AbelianType::dim));
        return Ok(Some(ReductionSpec::Abelian { dim, entries }));
    }
    Ok(None)
}

impl Settings {
    pub fn resolve(args: &QueryArgs, default_grid: LambdaGrid) -> Result<Self, CliError> {
        let cfg = match &args.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let lambda = if let Some(l) = args.lambda {
            LambdaSpec::Fixed(l)
        } else if let Some(g) = &args.lambda_grid {
            LambdaSpec::Grid(LambdaGrid::parse(g)?)
        } else if let Some(l) = cfg.lambda {
            LambdaSpec::Fixed(l)
        } else if let Some(g) = &cfg.lambda_grid {
            LambdaSpec::Grid(g.resolve()?)
        } else {
            LambdaSpec::Grid(default_grid)
        };
        lambda.validate()?;
        let dim = args.dim.or(cfg.dim);
        let spec = match flag_spec(args, dim)? {
            Some(s) => s,
            None => cfg.spec.clone().unwrap_or_default(),
        };
        let mode = match &args.mode {
            Some(m) => m.parse()?,
            None => cfg.mode.unwrap_or_default(),
        };
        let mut testfunc = match &args.testfunc {
            Some(t) => TestFunctionSpec::parse_cli(t)?,
            None => cfg.testfunc.clone().unwrap_or_default(),
        };
        if args.cosh_damped {
            testfunc = match testfunc {
                TestFunctionSpec::Odlyzko { .. } => TestFunctionSpec::Odlyzko { cosh_damped: true },
                TestFunctionSpec::Poly { coeffs, .. } => TestFunctionSpec::Poly {
                    coeffs,
                    cosh_damped: true,
                },
            };
        }
        let model = match args.coeff_model.as_ref().or(cfg.coeff_model.as_ref()) {
            Some(m) => m.parse()?,
            None => CoefficientModel::default(),
        };
        let workers = args.workers.or(cfg.workers);
        if workers == Some(0) {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        let quadrature = cfg.quadrature.unwrap_or_default();
        quadrature.validate()?;
        Ok(Self {
            lambda,
            rank: args.rank.or(cfg.rank).unwrap_or(0),
            dim,
            mode,
            testfunc,
            spec,
            fields: args.fields.clone().or(cfg.fields),
            out: args.out.or(cfg.out).unwrap_or(OutFormat::Json),
            model,
            basis_degree: args.basis_degree.or(cfg.basis_degree).unwrap_or(1),
            seed: args.seed.or(cfg.seed).unwrap_or(0),
            workers,
            quadrature,
        })
    }
}
