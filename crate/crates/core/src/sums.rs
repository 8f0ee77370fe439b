//! Worst-case prime sums of the explicit formula under reduction-type constraints.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Roots;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numberfield::{is_prime, NormClass, NumberField};
use crate::testfunc::TestFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EllipticType {
    Good,
    Multiplicative,
    Additive,
}

impl FromStr for EllipticType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "good" | "g" => Ok(Self::Good),
            "mult" | "multiplicative" | "m" => Ok(Self::Multiplicative),
            "add" | "additive" | "a" => Ok(Self::Additive),
            other => Err(Error::InvalidInput(format!(
                "unknown reduction type '{other}'"
            ))),
        }
    }
}

impl fmt::Display for EllipticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Good => "good",
            Self::Multiplicative => "mult",
            Self::Additive => "add",
        })
    }
}

/// Abelian, toric and unipotent dimensions (g_ab, g_m, g_u) of the special fibre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianType {
    pub abelian: u32,
    pub toric: u32,
    pub unipotent: u32,
}

impl AbelianType {
    pub fn new(abelian: u32, toric: u32, unipotent: u32) -> Self {
        Self {
            abelian,
            toric,
            unipotent,
        }
    }

    pub fn good(g: u32) -> Self {
        Self::new(g, 0, 0)
    }

    pub fn dim(&self) -> u32 {
        self.abelian + self.toric + self.unipotent
    }
}

impl From<EllipticType> for AbelianType {
    fn from(t: EllipticType) -> Self {
        match t {
            EllipticType::Good => Self::new(1, 0, 0),
            EllipticType::Multiplicative => Self::new(0, 1, 0),
            EllipticType::Additive => Self::new(0, 0, 1),
        }
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.abelian, self.toric, self.unipotent)
    }
}

/// Per-prime reduction constraints. Unlisted primes are unconstrained, which is treated
/// as worst-case good reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionSpec {
    Elliptic(BTreeMap<u64, EllipticType>),
    Abelian {
        dim: u32,
        entries: BTreeMap<u64, AbelianType>,
    },
}

impl Default for ReductionSpec {
    fn default() -> Self {
        ReductionSpec::Elliptic(BTreeMap::new())
    }
}

impl ReductionSpec {
    pub fn unconstrained(dim: u32) -> Self {
        if dim == 1 {
            Self::default()
        } else {
            Self::Abelian {
                dim,
                entries: BTreeMap::new(),
            }
        }
    }

    pub fn dim(&self) -> u32 {
        match self {
            Self::Elliptic(_) => 1,
            Self::Abelian { dim, .. } => *dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Self::Elliptic(m) => m.is_empty(),
            Self::Abelian { entries, .. } => entries.is_empty(),
        }
    }

    /// Local type at `p` for an object of dimension `g`.
    pub fn local(&self, p: u64, g: u32) -> AbelianType {
        match self {
            Self::Elliptic(m) => m.get(&p).map_or(AbelianType::good(g), |&t| t.into()),
            Self::Abelian { entries, .. } => {
                entries.get(&p).copied().unwrap_or(AbelianType::good(g))
            }
        }
    }

    pub fn primes(&self) -> Vec<u64> {
        match self {
            Self::Elliptic(m) => m.keys().copied().collect(),
            Self::Abelian { entries, .. } => entries.keys().copied().collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in self.primes() {
            if !is_prime(p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
        }
        if let Self::Abelian { dim, entries } = self {
            if *dim == 0 {
                return Err(Error::InvalidInput("dimension must be at least 1".into()));
            }
            for (p, t) in entries {
                if t.dim() != *dim {
                    return Err(Error::InvalidInput(format!(
                        "type {t} at {p} does not sum to dimension {dim}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Human-readable constraint list, e.g. `2:mult 3:good`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = match self {
            Self::Elliptic(m) => m.iter().map(|(p, t)| format!("{p}:{t}")).collect(),
            Self::Abelian { entries, .. } => {
                entries.iter().map(|(p, t)| format!("{p}:{t}")).collect()
            }
        };
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Config form: `{"2":"mult","3":"add"}` or `{"2":[0,2,0]}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SpecEntry {
    Elliptic(String),
    Abelian([u32; 3]),
}

impl Serialize for ReductionSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, SpecEntry> = match self {
            Self::Elliptic(m) => m
                .iter()
                .map(|(p, t)| (p.to_string(), SpecEntry::Elliptic(t.to_string())))
                .collect(),
            Self::Abelian { entries, .. } => entries
                .iter()
                .map(|(p, t)| {
                    (
                        p.to_string(),
                        SpecEntry::Abelian([t.abelian, t.toric, t.unipotent]),
                    )
                })
                .collect(),
        };
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReductionSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw: BTreeMap<String, SpecEntry> = BTreeMap::deserialize(d)?;
        ReductionSpec::from_entries(raw.into_iter(), None).map_err(D::Error::custom)
    }
}

impl ReductionSpec {
    fn from_entries(
        entries: impl Iterator<Item = (String, SpecEntry)>,
        dim: Option<u32>,
    ) -> Result<Self> {
        let mut ell = BTreeMap::new();
        let mut ab = BTreeMap::new();
        for (k, v) in entries {
            let p: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("'{k}' is not a prime")))?;
            match v {
                SpecEntry::Elliptic(s) => {
                    ell.insert(p, s.parse::<EllipticType>()?);
                }
                SpecEntry::Abelian([a, t, u]) => {
                    ab.insert(p, AbelianType::new(a, t, u));
                }
            }
        }
        let spec = match (ell.is_empty(), ab.is_empty()) {
            (_, true) => Self::Elliptic(ell),
            (true, false) => {
                let dim = dim.unwrap_or_else(|| ab.values().next().map_or(1, |t| t.dim()));
                Self::Abelian { dim, entries: ab }
            }
            (false, false) => {
                return Err(Error::InvalidInput(
                    "cannot mix elliptic and abelian reduction types".into(),
                ))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// How the unknown local coefficients b_m are bounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientModel {
    /// Each (q, m) term bounded independently: ⌊2√(q^m)⌋ per abelian dimension, 1 per
    /// toric dimension. Weights use |F_λ|.
    #[default]
    PerTermFloor,
    /// Fixed Euler factors: abelian parts have trace −⌊2√q⌋ at every ideal, toric parts
    /// are non-split tori. Weights use the signed F_λ.
    FixedTrace,
}

impl FromStr for CoefficientModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "floor" | "per_term_floor" => Ok(Self::PerTermFloor),
            "trace" | "fixed_trace" => Ok(Self::FixedTrace),
            other => Err(Error::InvalidInput(format!(
                "unknown coefficient model '{other}'"
            ))),
        }
    }
}

/// ⌊2√n⌋ in exact integer arithmetic.
pub fn floor_two_sqrt(n: u128) -> u128 {
    (4 * n).sqrt()
}

/// αᵐ + ᾱᵐ for α + ᾱ = −⌊2√q⌋, αᾱ = q.
fn power_sum(q: u64, m: u32) -> f64 {
    let a = -(floor_two_sqrt(q as u128) as f64);
    let q = q as f64;
    let (mut t0, mut t1) = (2.0, a);
    for _ in 1..m {
        let t2 = a * t1 - q * t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// Magnitude of the (negative) local contribution per prime ideal of norm q at power m.
pub fn coefficient(t: AbelianType, q: u64, m: u32, model: CoefficientModel) -> f64 {
    match model {
        CoefficientModel::PerTermFloor => {
            let qm = (q as u128).pow(m);
            t.abelian as f64 * floor_two_sqrt(qm) as f64 + t.toric as f64
        }
        CoefficientModel::FixedTrace => {
            let toric_sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            -(t.abelian as f64) * power_sum(q, m) + t.toric as f64 * toric_sign
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumTerm {
    pub p: u64,
    pub q: u64,
    pub m: u32,
    /// Number of prime ideals sharing this norm.
    pub count: u32,
    pub coefficient: f64,
    /// F_λ(m log q)·log q / q^m.
    pub weight: f64,
    pub term: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SumBreakdown {
    pub terms: Vec<SumTerm>,
    pub total: f64,
}

/// Σ over norm classes and m with m·log q ≤ λ of count·coefficient·F(m log q / λ)·log q/q^m.
///
/// `abs_weights` selects |F| in the weight, which is what the worst-case bound needs;
/// the signed form is linear in the profile and feeds the optimizer.
pub fn prime_sum<P: Fn(f64) -> f64>(
    classes: &[NormClass],
    spec: &ReductionSpec,
    g: u32,
    lambda: f64,
    profile: P,
    model: CoefficientModel,
    abs_weights: bool,
) -> SumBreakdown {
    let mut out = SumBreakdown::default();
    for c in classes {
        let log_q = (c.q as f64).ln();
        if log_q > lambda {
            continue;
        }
        let local = spec.local(c.p, g);
        let mut m = 1u32;
        while m as f64 * log_q <= lambda {
            let mut w = profile(m as f64 * log_q / lambda);
            if abs_weights {
                w = w.abs();
            }
            let weight = w * log_q / (c.q as f64).powi(m as i32);
            let coefficient = coefficient(local, c.q, m, model);
            let term = c.count as f64 * coefficient * weight;
            out.total += term;
            out.terms.push(SumTerm {
                p: c.p,
                q: c.q,
                m,
                count: c.count,
                coefficient,
                weight,
                term,
            });
            m += 1;
        }
    }
    out
}

fn weights_are_absolute(model: CoefficientModel) -> bool {
    model == CoefficientModel::PerTermFloor
}

/// The prime-power sum over ℚ.
pub fn worst_case_sum_q(
    spec: &ReductionSpec,
    f: &TestFunction,
    lambda: f64,
    g: u32,
    model: CoefficientModel,
) -> SumBreakdown {
    worst_case_sum_field(&NumberField::rationals(), f, lambda, g, spec, model)
}

/// The prime-ideal sum over K; constraints keyed by p apply to every ideal above p.
pub fn worst_case_sum_field(
    k: &NumberField,
    f: &TestFunction,
    lambda: f64,
    g: u32,
    spec: &ReductionSpec,
    model: CoefficientModel,
) -> SumBreakdown {
    let table = k.ideal_table(lambda.exp(), 0);
    prime_sum(
        &table.classes,
        spec,
        g,
        lambda,
        |x| f.eval(x),
        model,
        weights_are_absolute(model),
    )
}
