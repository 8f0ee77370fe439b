//! Assembly of conductor lower bounds, λ scans, and number-field EGR scans.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::congruence::refine_integer_bound;
use crate::error::{Error, Result};
use crate::numberfield::{IdealTable, NumberField};
use crate::quadrature::{m_lambda, QuadratureConfig, EULER_GAMMA};
use crate::sums::{prime_sum, CoefficientModel, ReductionSpec};
use crate::testfunc::TestFunction;

pub const FLAG_POSITIVITY: &str = "positivity_checked_numerically";
pub const FLAG_UNCONDITIONAL: &str = "unconditional_cosh_damped";
pub const FLAG_TRACE_MODEL: &str = "coeff_model_fixed_trace";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Grh,
    #[serde(alias = "unconditional")]
    Uncond,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "grh" => Ok(Mode::Grh),
            "uncond" | "unconditional" => Ok(Mode::Uncond),
            other => Err(Error::InvalidInput(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl LambdaGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let g = Self { lo, hi, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.step > 0.0 && self.hi.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "lambda grid needs 0 < lo <= hi and step > 0, got {}:{}:{}",
                self.lo, self.hi, self.step
            )));
        }
        if (self.hi - self.lo) / self.step > 1e6 {
            return Err(Error::InvalidInput(
                "lambda grid has more than 10^6 points".into(),
            ));
        }
        Ok(())
    }

    /// lo, lo + step, …, up to hi (inclusive, with a small tolerance).
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                let x = self.lo + i as f64 * self.step;
                // strip accumulated binary noise so printed λ values are the grid values
                (x * 1e12).round() / 1e12
            })
            .collect()
    }

    /// Parses `lo:hi:step`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "expected lo:hi:step, got '{s}'"
            )));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number '{t}' in grid")))
        };
        Self::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Fixed(f64),
    Grid(LambdaGrid),
}

impl LambdaSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            LambdaSpec::Fixed(l) => vec![*l],
            LambdaSpec::Grid(g) => g.points(),
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            LambdaSpec::Fixed(l) => *l,
            LambdaSpec::Grid(g) => *g.points().last().unwrap_or(&g.lo),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LambdaSpec::Fixed(l) if !(*l > 0.0 && l.is_finite()) => Err(Error::InvalidInput(
                format!("lambda must be positive, got {l}"),
            )),
            LambdaSpec::Fixed(_) => Ok(()),
            LambdaSpec::Grid(g) => g.validate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundQuery {
    pub field: NumberField,
    pub dim: u32,
    pub rank: u32,
    pub spec: ReductionSpec,
    pub testfunc: TestFunction,
    pub lambda: LambdaSpec,
    pub mode: Mode,
    pub model: CoefficientModel,
    pub quadrature: QuadratureConfig,
    /// Seed for equal-degree factorization.
    pub seed: u64,
}

impl BoundQuery {
    /// Elliptic curve over ℚ with Odlyzko's function, GRH, floor model.
    pub fn elliptic_q(spec: ReductionSpec, rank: u32, lambda: LambdaSpec) -> Self {
        Self {
            field: NumberField::rationals(),
            dim: 1,
            rank,
            spec,
            testfunc: TestFunction::odlyzko(),
            lambda,
            mode: Mode::Grh,
            model: CoefficientModel::PerTermFloor,
            quadrature: QuadratureConfig::default(),
            seed: 0,
        }
    }

    pub fn abelian_q(spec: ReductionSpec, dim: u32, rank: u32, lambda: LambdaSpec) -> Self {
        Self {
            dim,
            ..Self::elliptic_q(spec, rank, lambda)
        }
    }

    /// Everywhere-good-reduction query over K: r = 0, g = 1, no constraints.
    pub fn egr(field: NumberField, lambda: LambdaSpec) -> Self {
        Self {
            field,
            ..Self::elliptic_q(ReductionSpec::default(), 0, lambda)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        self.spec.validate()?;
        match &self.spec {
            ReductionSpec::Elliptic(m) if !m.is_empty() && self.dim != 1 => {
                return Err(Error::InvalidInput(
                    "elliptic reduction types need dimension 1".into(),
                ))
            }
            ReductionSpec::Abelian { dim, .. } if *dim != self.dim => {
                return Err(Error::InvalidInput(format!(
                    "reduction types have dimension {dim}, query has {}",
                    self.dim
                )))
            }
            _ => {}
        }
        self.lambda.validate()?;
        self.quadrature.validate()
    }

    /// The function actually used: cosh-damped in unconditional mode.
    pub fn effective_testfunc(&self) -> TestFunction {
        match self.mode {
            Mode::Grh => self.testfunc.clone(),
            Mode::Uncond => self.testfunc.cosh_damp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lambda_star: f64,
    /// λ·r·Φ(1/2)/n.
    pub rank_term: f64,
    /// (2/n)·S, the subtracted prime-ideal sum.
    pub prime_sum: f64,
    /// g·M_{λ,F}.
    pub arch_term: f64,
    /// 2g·log δ_K.
    pub disc_term: f64,
    pub log_bound: f64,
    #[serde(rename = "B_R")]
    pub b_r: f64,
    #[serde(rename = "B_Z", default, skip_serializing_if = "Option::is_none")]
    pub b_z: Option<u64>,
    pub egr_excluded: bool,
    pub flags: Vec<String>,
}

/// Everything about a query that does not depend on λ.
struct Prepared<'a> {
    query: &'a BoundQuery,
    f: TestFunction,
    table: IdealTable,
    n: f64,
    log_delta: f64,
    phi: f64,
    base_flags: Vec<String>,
}

impl<'a> Prepared<'a> {
    fn new(query: &'a BoundQuery) -> Result<Self> {
        query.validate()?;
        let f = query.effective_testfunc();
        let table = query
            .field
            .ideal_table(query.lambda.max().exp(), query.seed);
        let mut base_flags = Vec::new();
        if query.mode == Mode::Grh && !query.testfunc.is_autocorrelation() {
            base_flags.push(FLAG_POSITIVITY.to_string());
        }
        if query.mode == Mode::Uncond {
            base_flags.push(FLAG_UNCONDITIONAL.to_string());
        }
        if query.model == CoefficientModel::FixedTrace {
            base_flags.push(FLAG_TRACE_MODEL.to_string());
        }
        Ok(Self {
            query,
            phi: f.phi_half(),
            f,
            table,
            n: query.field.degree as f64,
            log_delta: query.field.log_root_discriminant(),
            base_flags,
        })
    }

    fn arch(&self, lambda: f64) -> Result<f64> {
        m_lambda(&self.f, lambda, &self.query.quadrature)
    }

    fn sum(&self, spec: &ReductionSpec, g: u32, lambda: f64) -> f64 {
        prime_sum(
            &self.table.classes,
            spec,
            g,
            lambda,
            |x| self.f.eval(x),
            self.query.model,
            self.query.model == CoefficientModel::PerTermFloor,
        )
        .total
    }

    /// (log bound of the query, log bound of the EGR configuration) at λ given M.
    fn evaluate_with_arch(&self, lambda: f64, m: f64) -> BoundResult {
        let q = self.query;
        let g = q.dim as f64;
        let rank_term = match q.mode {
            Mode::Grh => lambda * q.rank as f64 * self.phi / self.n,
            Mode::Uncond => 0.0,
        };
        let prime = 2.0 / self.n * self.sum(&q.spec, q.dim, lambda);
        let arch = g * m;
        let disc = 2.0 * g * self.log_delta;
        let log_bound = rank_term - prime + arch - disc;
        let egr_log = -2.0 / self.n * self.sum(&ReductionSpec::default(), 1, lambda) + m
            - 2.0 * self.log_delta;
        let b_r = log_bound.exp();
        let b_z = match &q.spec {
            ReductionSpec::Elliptic(m) if q.field.is_rationals() && q.dim == 1 => {
                refine_integer_bound(b_r.max(1.0), m).ok()
            }
            _ => None,
        };
        let mut flags = self.base_flags.clone();
        let max_norm = lambda.exp();
        for &p in &self.table.fallback_primes {
            if (p as f64) <= max_norm {
                flags.push(format!("fallback_splitting_at_{p}"));
            }
        }
        BoundResult {
            lambda_star: lambda,
            rank_term,
            prime_sum: prime,
            arch_term: arch,
            disc_term: disc,
            log_bound,
            b_r,
            b_z,
            egr_excluded: egr_log > 0.0,
            flags,
        }
    }

    fn evaluate(&self, lambda: f64) -> Result<BoundResult> {
        Ok(self.evaluate_with_arch(lambda, self.arch(lambda)?))
    }
}

/// Archimedean constants on a λ grid, shared between fields that use the same F.
pub fn arch_values(f: &TestFunction, lambdas: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    lambdas.par_iter().map(|&l| m_lambda(f, l, cfg)).collect()
}

/// Bound at every λ of the query's grid, in grid order.
pub fn lambda_profile(query: &BoundQuery) -> Result<Vec<BoundResult>> {
    let prep = Prepared::new(query)?;
    let points = query.lambda.points();
    points.par_iter().map(|&l| prep.evaluate(l)).collect()
}

fn pick_best(results: Vec<BoundResult>) -> BoundResult {
    let any_egr = results.iter().any(|r| r.egr_excluded);
    let mut best: Option<BoundResult> = None;
    for r in results {
        // strict comparison keeps the smallest λ among ties
        if best.as_ref().map_or(true, |b| r.log_bound > b.log_bound) {
            best = Some(r);
        }
    }
    let mut best = best.expect("grids are non-empty");
    best.egr_excluded = any_egr;
    best
}

/// Best bound over the query's λ grid (or the bound at its fixed λ). `egr_excluded` is
/// set when the EGR bound exceeds 1 at any grid point.
pub fn lambda_scan(query: &BoundQuery) -> Result<BoundResult> {
    Ok(pick_best(lambda_profile(query)?))
}

fn scan_with_arch(query: &BoundQuery, lambdas: &[f64], arch: &[f64]) -> Result<BoundResult> {
    let prep = Prepared::new(query)?;
    let results = lambdas
        .iter()
        .zip(arch)
        .map(|(&l, &m)| prep.evaluate_with_arch(l, m))
        .collect();
    Ok(pick_best(results))
}

/// Elliptic curves over ℚ; also reports the integer refinement B_ℤ.
pub fn bound_elliptic_q(query: &BoundQuery) -> Result<BoundResult> {
    if !query.field.is_rationals() || query.dim != 1 {
        return Err(Error::InvalidInput(
            "elliptic bound over Q needs the rational field and dimension 1".into(),
        ));
    }
    if !matches!(query.spec, ReductionSpec::Elliptic(_)) {
        return Err(Error::InvalidInput(
            "elliptic bound needs good/mult/add types".into(),
        ));
    }
    lambda_scan(query)
}

/// Abelian varieties over ℚ.
pub fn bound_abelian_q(query: &BoundQuery) -> Result<BoundResult> {
    if !query.field.is_rationals() {
        return Err(Error::InvalidInput(
            "abelian bound over Q needs the rational field".into(),
        ));
    }
    lambda_scan(query)
}

/// The per-degree bound B(K,F,λ)^g over a number field.
pub fn bound_number_field(query: &BoundQuery) -> Result<BoundResult> {
    lambda_scan(query)
}

/// 2π·e^γ, the largest root discriminant for which B(K,F,λ) can exceed 1.
pub fn prefilter_threshold() -> f64 {
    2.0 * std::f64::consts::PI * EULER_GAMMA.exp()
}

/// False when δ_K is too large for any compact test function to certify EGR.
pub fn disc_prefilter(k: &NumberField) -> bool {
    k.log_root_discriminant() <= prefilter_threshold().ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub grid: LambdaSpec,
    pub testfunc: TestFunction,
    pub mode: Mode,
    pub model: CoefficientModel,
    pub quadrature: QuadratureConfig,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            grid: LambdaSpec::Grid(LambdaGrid {
                lo: 1.0,
                hi: 6.0,
                step: 0.01,
            }),
            testfunc: TestFunction::odlyzko(),
            mode: Mode::Grh,
            model: CoefficientModel::PerTermFloor,
            quadrature: QuadratureConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldScanEntry {
    pub label: String,
    pub degree: u32,
    pub root_discriminant: f64,
    pub prefilter_passed: bool,
    #[serde(default)]
    pub lambda_star: Option<f64>,
    #[serde(default)]
    pub bound: Option<f64>,
    /// B > 1 for this field itself.
    pub direct: bool,
    /// Directly excluded or a declared subfield of an excluded field.
    pub excluded: bool,
    #[serde(default)]
    pub excluded_via: Option<String>,
    pub flags: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCount {
    pub fields: usize,
    pub direct: usize,
    pub with_subfields: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub entries: Vec<FieldScanEntry>,
    pub per_degree: BTreeMap<u32, DegreeCount>,
    pub warnings: Vec<String>,
}

/// EGR scan: prefilter, λ scan and direct exclusion per field, then exclusion passed
/// down declared subfield links.
pub fn scan_fields(fields: &[NumberField], cfg: &ScanConfig) -> Result<ScanReport> {
    cfg.grid.validate()?;
    let lambdas = cfg.grid.points();
    let f_eff = match cfg.mode {
        Mode::Grh => cfg.testfunc.clone(),
        Mode::Uncond => cfg.testfunc.cosh_damp(),
    };
    let arch = if fields.is_empty() {
        Vec::new()
    } else {
        arch_values(&f_eff, &lambdas, &cfg.quadrature)?
    };
    let mut entries: Vec<FieldScanEntry> = fields
        .par_iter()
        .map(|k| -> Result<FieldScanEntry> {
            let passed = disc_prefilter(k);
            let mut entry = FieldScanEntry {
                label: k.label.clone(),
                degree: k.degree,
                root_discriminant: k.root_discriminant(),
                prefilter_passed: passed,
                lambda_star: None,
                bound: None,
                direct: false,
                excluded: false,
                excluded_via: None,
                flags: Vec::new(),
            };
            if passed {
                let query = BoundQuery {
                    testfunc: cfg.testfunc.clone(),
                    mode: cfg.mode,
                    model: cfg.model,
                    quadrature: cfg.quadrature,
                    seed: cfg.seed,
                    ..BoundQuery::egr(k.clone(), cfg.grid)
                };
                let r = scan_with_arch(&query, &lambdas, &arch)?;
                entry.lambda_star = Some(r.lambda_star);
                entry.bound = Some(r.b_r);
                entry.direct = r.log_bound > 0.0;
                entry.excluded = entry.direct;
                entry.flags = r.flags;
            }
            Ok(entry)
        })
        .collect::<Result<_>>()?;

    let mut warnings = Vec::new();
    let by_label: HashMap<&str, usize> = fields
        .iter()
        .enumerate()
        .map(|(i, k)| (k.label.as_str(), i))
        .collect();
    // worklist over excluded fields; each subfield inherits the exclusion
    let mut stack: Vec<usize> = (0..fields.len()).filter(|&i| entries[i].excluded).collect();
    let mut reported = std::collections::HashSet::new();
    while let Some(i) = stack.pop() {
        for sub in &fields[i].subfield_labels {
            match by_label.get(sub.as_str()) {
                Some(&j) => {
                    if !entries[j].excluded {
                        entries[j].excluded = true;
                        entries[j].excluded_via = Some(fields[i].label.clone());
                        stack.push(j);
                    }
                }
                None => {
                    if reported.insert((i, sub.clone())) {
                        let w = format!(
                            "unresolved subfield label '{sub}' declared by '{}'",
                            fields[i].label
                        );
                        log::warn!("{w}");
                        warnings.push(w);
                    }
                }
            }
        }
    }

    let mut per_degree: BTreeMap<u32, DegreeCount> = BTreeMap::new();
    for e in &entries {
        let c = per_degree.entry(e.degree).or_default();
        c.fields += 1;
        c.direct += e.direct as usize;
        c.with_subfields += e.excluded as usize;
    }
    Ok(ScanReport {
        entries,
        per_degree,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::parse_field_line;
    use crate::sums::{AbelianType, EllipticType};
    use EllipticType::*;

    fn ell(e: &[(u64, EllipticType)]) -> ReductionSpec {
        ReductionSpec::Elliptic(e.iter().copied().collect())
    }

    #[test]
    fn table1_row1() {
        let q = BoundQuery::elliptic_q(
            ell(&[(3, Good), (2, Multiplicative)]),
            0,
            LambdaSpec::Fixed(1.47),
        );
        let r = bound_elliptic_q(&q).unwrap();
        assert!((r.b_r - 12.956).abs() < 0.05, "{}", r.b_r);
        assert_eq!(r.b_z, Some(14));
        let sum = r.rank_term - r.prime_sum + r.arch_term - r.disc_term;
        assert!((sum - r.log_bound).abs() < 1e-14);
        assert!(r.flags.contains(&FLAG_POSITIVITY.to_string()));
    }

    #[test]
    fn table2_row1() {
        let q = BoundQuery::elliptic_q(ReductionSpec::default(), 1, LambdaSpec::Fixed(1.68));
        let r = bound_elliptic_q(&q).unwrap();
        assert!((r.b_r - 34.566).abs() < 0.1, "{}", r.b_r);
    }

    #[test]
    fn single_point_grid_equals_fixed() {
        let spec = ell(&[(2, Additive)]);
        let a = lambda_scan(&BoundQuery::elliptic_q(
            spec.clone(),
            0,
            LambdaSpec::Fixed(1.5),
        ))
        .unwrap();
        let g = LambdaGrid::new(1.5, 1.5, 0.1).unwrap();
        let b = lambda_scan(&BoundQuery::elliptic_q(spec, 0, LambdaSpec::Grid(g))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_points() {
        let g = LambdaGrid::parse("1:3:0.01").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 201);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[200], 3.0);
        assert_eq!(p[47], 1.47);
        assert!(LambdaGrid::parse("1:3").is_err());
        assert!(LambdaGrid::parse("3:1:0.1").is_err());
        assert!(LambdaGrid::parse("1:3:0").is_err());
    }

    #[test]
    fn abelian_table3_row1() {
        let spec = ReductionSpec::Abelian {
            dim: 2,
            entries: [
                (2, AbelianType::new(0, 2, 0)),
                (3, AbelianType::new(1, 1, 0)),
            ]
            .into_iter()
            .collect(),
        };
        let r =
            bound_abelian_q(&BoundQuery::abelian_q(spec, 2, 0, LambdaSpec::Fixed(1.62))).unwrap();
        assert!((r.b_r - 185.9).abs() < 0.5, "{}", r.b_r);
        assert_eq!(r.b_z, None);
    }

    #[test]
    fn mismatched_dimension_rejected() {
        let spec = ReductionSpec::Abelian {
            dim: 2,
            entries: [(2, AbelianType::new(0, 2, 0))].into_iter().collect(),
        };
        let q = BoundQuery::abelian_q(spec, 3, 0, LambdaSpec::Fixed(1.5));
        assert!(matches!(lambda_scan(&q), Err(Error::InvalidInput(_))));
        let q = BoundQuery::abelian_q(ell(&[(2, Good)]), 2, 0, LambdaSpec::Fixed(1.5));
        assert!(lambda_scan(&q).is_err());
        let q = BoundQuery::elliptic_q(ReductionSpec::default(), 0, LambdaSpec::Fixed(-1.0));
        assert!(lambda_scan(&q).is_err());
    }

    #[test]
    fn prefilter() {
        // mpmath: 2·pi·exp(euler)
        assert!((prefilter_threshold() - 11.190_808_047_738_8).abs() < 1e-12);
        assert!(disc_prefilter(&NumberField::rationals()));
        let k = parse_field_line(r#"{"degree":2,"poly":[6,-1],"disc":-23}"#).unwrap();
        assert!(disc_prefilter(&k));
        // 11.5² = 132.25; a quadratic field with |d| = 133 has δ > 11.19
        let big = parse_field_line(r#"{"degree":2,"poly":[-33,-1],"disc":133}"#).unwrap();
        assert!(!disc_prefilter(&big));
    }

    #[test]
    fn number_field_example() {
        let k = parse_field_line(r#"{"label":"2.0.23.1","degree":2,"poly":[6,-1],"disc":-23}"#)
            .unwrap();
        let r = bound_number_field(&BoundQuery::egr(k, LambdaSpec::Fixed(1.31))).unwrap();
        assert!((r.b_r - 0.4519).abs() < 1e-3, "{}", r.b_r);
        assert!(!r.egr_excluded);
    }

    #[test]
    fn unconditional_drops_rank_and_lowers_bound() {
        let mut q = BoundQuery::elliptic_q(ReductionSpec::default(), 2, LambdaSpec::Fixed(1.8));
        let grh = lambda_scan(&q).unwrap();
        q.mode = Mode::Uncond;
        let un = lambda_scan(&q).unwrap();
        assert_eq!(un.rank_term, 0.0);
        assert!(un.b_r <= grh.b_r);
        assert!(un.flags.contains(&FLAG_UNCONDITIONAL.to_string()));
    }

    #[test]
    fn empty_scan() {
        let r = scan_fields(&[], &ScanConfig::default()).unwrap();
        assert!(r.entries.is_empty() && r.per_degree.is_empty());
    }

    #[test]
    fn result_round_trip() {
        let q = BoundQuery::elliptic_q(ell(&[(2, Multiplicative)]), 0, LambdaSpec::Fixed(1.47));
        let r = lambda_scan(&q).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"B_R\"") && s.contains("\"B_Z\""));
        let back: BoundResult = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
