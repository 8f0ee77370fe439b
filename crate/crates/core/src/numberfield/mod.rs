//! Number fields given by a monic defining polynomial and their discriminant, and the
//! splitting of rational primes into prime ideals.

pub mod fp_poly;

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use fp_poly::FpPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct NumberField {
    pub label: String,
    pub degree: u32,
    /// c₀..c_{n−1} of xⁿ + c_{n−1}x^{n−1} + … + c₀.
    pub poly: Vec<BigInt>,
    pub disc: BigInt,
    pub splitting_overrides: BTreeMap<u64, Vec<(u32, u32)>>,
    pub subfield_labels: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitSource {
    Dedekind,
    Override,
    ConservativeFallback,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSplit {
    pub p: u64,
    /// (e, f) per prime ideal above p.
    pub factors: Vec<(u32, u32)>,
    pub source: SplitSource,
}

/// All prime ideals above `p` with residue degree `f`, so norm q = p^f.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormClass {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    pub count: u32,
}

/// Norm classes up to a bound, plus the primes whose splitting fell back.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdealTable {
    pub classes: Vec<NormClass>,
    pub fallback_primes: Vec<u64>,
}

impl NumberField {
    pub fn rationals() -> Self {
        Self {
            label: "1.1.1.1".into(),
            degree: 1,
            poly: vec![BigInt::zero()],
            disc: BigInt::one(),
            splitting_overrides: BTreeMap::new(),
            subfield_labels: Vec::new(),
        }
    }

    pub fn is_rationals(&self) -> bool {
        self.degree == 1
    }

    /// log δ_K = log|d_K| / n.
    pub fn log_root_discriminant(&self) -> f64 {
        log_abs(&self.disc) / self.degree as f64
    }

    pub fn root_discriminant(&self) -> f64 {
        self.log_root_discriminant().exp()
    }

    fn poly_mod(&self, p: u64) -> FpPoly {
        let pb = BigInt::from(p);
        let mut c: Vec<u64> = self
            .poly
            .iter()
            .map(|a| a.mod_floor(&pb).to_u64().expect("residue fits"))
            .collect();
        c.push(1);
        FpPoly::new(c, p)
    }

    /// Splitting of `p`, with the equal-degree PRNG seeded by 0.
    pub fn split_prime(&self, p: u64) -> PrimeSplit {
        self.split_prime_seeded(p, 0)
    }

    pub fn split_prime_seeded(&self, p: u64, seed: u64) -> PrimeSplit {
        if let Some(f) = self.splitting_overrides.get(&p) {
            return PrimeSplit {
                p,
                factors: f.clone(),
                source: SplitSource::Override,
            };
        }
        let fbar = self.poly_mod(p);
        let factors = fp_poly::factor(&fbar, p, seed);
        let squarefree = factors.iter().all(|(_, k)| *k == 1);
        if squarefree || dedekind_maximal(&self.poly, &factors, p) {
            let mut ef: Vec<(u32, u32)> = factors
                .iter()
                .map(|(g, k)| (*k, g.degree().unwrap_or(0) as u32))
                .collect();
            ef.sort();
            PrimeSplit {
                p,
                factors: ef,
                source: SplitSource::Dedekind,
            }
        } else {
            PrimeSplit {
                p,
                factors: vec![(1, 1); self.degree as usize],
                source: SplitSource::ConservativeFallback,
            }
        }
    }

    /// Norm classes of prime ideals with N𝔭 ≤ x_max, sorted by norm.
    pub fn ideal_table(&self, x_max: f64, seed: u64) -> IdealTable {
        let mut table = IdealTable::default();
        if !(x_max >= 2.0) {
            return table;
        }
        let limit = x_max.floor().min(u32::MAX as f64) as u64;
        let ln_max = x_max.ln();
        for p in primes_up_to(limit) {
            let split = self.split_prime_seeded(p, seed);
            if split.source == SplitSource::ConservativeFallback {
                table.fallback_primes.push(p);
            }
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for &(_, f) in &split.factors {
                if f as f64 * (p as f64).ln() <= ln_max + 1e-12 {
                    *counts.entry(f).or_default() += 1;
                }
            }
            for (f, count) in counts {
                table.classes.push(NormClass {
                    p,
                    f,
                    q: p.pow(f),
                    count,
                });
            }
        }
        table.classes.sort_by_key(|c| (c.q, c.p));
        table
    }
}

/// Aggregated (q, count) pairs over all prime ideals with norm ≤ x_max.
pub fn prime_ideals_up_to(k: &NumberField, x_max: f64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    for c in k.ideal_table(x_max, 0).classes {
        match out.last_mut() {
            Some((q, n)) if *q == c.q => *n += c.count,
            _ => out.push((c.q, c.count)),
        }
    }
    out
}

/// Factors f mod p as (degree, multiplicity) pairs, sorted.
pub fn factor_mod_p(poly: &[BigInt], p: u64, seed: u64) -> Vec<(usize, u32)> {
    let pb = BigInt::from(p);
    let c: Vec<u64> = poly
        .iter()
        .map(|a| a.mod_floor(&pb).to_u64().expect("residue fits"))
        .collect();
    let f = FpPoly::new(c, p);
    let mut out: Vec<(usize, u32)> = fp_poly::factor(&f, p, seed)
        .into_iter()
        .map(|(g, k)| (g.degree().unwrap_or(0), k))
        .collect();
    out.sort();
    out
}

/// Dedekind's criterion: with f̄ = Π ḡᵢ^{eᵢ}, p does not divide the index of ℤ[x]/(f)
/// iff gcd(F̄₁, Ḡ, H̄) = 1 where G = Π gᵢ, H = Π gᵢ^{eᵢ−1} and F₁ = (GH − f)/p.
fn dedekind_maximal(poly: &[BigInt], factors: &[(FpPoly, u32)], p: u64) -> bool {
    let mut g = FpPoly::one();
    let mut h = FpPoly::one();
    for (gi, e) in factors {
        g = g.mul(gi, p);
        for _ in 1..*e {
            h = h.mul(gi, p);
        }
    }
    let lift =
        |a: &FpPoly| -> Vec<BigInt> { a.coeffs().iter().map(|&c| BigInt::from(c)).collect() };
    let gh = int_mul(&lift(&g), &lift(&h));
    let mut f: Vec<BigInt> = poly.to_vec();
    f.push(BigInt::one());
    let n = gh.len().max(f.len());
    let pb = BigInt::from(p);
    let f1: Vec<u64> = (0..n)
        .map(|i| {
            let a = gh.get(i).cloned().unwrap_or_default();
            let b = f.get(i).cloned().unwrap_or_default();
            let diff = a - b;
            debug_assert!(diff.is_multiple_of(&pb));
            (diff / &pb).mod_floor(&pb).to_u64().expect("residue fits")
        })
        .collect();
    let f1 = FpPoly::new(f1, p);
    f1.gcd(&g, p).gcd(&h, p).is_one()
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// ln|n| for a nonzero big integer, without overflowing f64.
pub fn log_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * LN_2
}

/// Primes ≤ n by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| k as u64)
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An integer given either as a JSON number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntLike {
    Int(i64),
    Str(String),
}

impl IntLike {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntLike::Int(v) => Ok(BigInt::from(*v)),
            IntLike::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::MalformedRecord(format!("not an integer: '{s}'"))),
        }
    }

    fn from_bigint(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntLike::Int(v),
            None => IntLike::Str(n.to_string()),
        }
    }
}

/// One line of a field data file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRecord {
    #[serde(default)]
    pub label: Option<String>,
    pub degree: u32,
    pub poly: Vec<IntLike>,
    pub disc: IntLike,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<BTreeMap<String, Vec<[u32; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subfields: Option<Vec<String>>,
}

impl From<&NumberField> for FieldRecord {
    fn from(k: &NumberField) -> Self {
        Self {
            label: Some(k.label.clone()),
            degree: k.degree,
            poly: k.poly.iter().map(IntLike::from_bigint).collect(),
            disc: IntLike::from_bigint(&k.disc),
            splitting: (!k.splitting_overrides.is_empty()).then(|| {
                k.splitting_overrides
                    .iter()
                    .map(|(p, v)| (p.to_string(), v.iter().map(|&(e, f)| [e, f]).collect()))
                    .collect()
            }),
            subfields: (!k.subfield_labels.is_empty()).then(|| k.subfield_labels.clone()),
        }
    }
}

/// Validates a record. The polynomial may list c₀..c_{n−1} (monic term implied) or
/// c₀..c_n with c_n = 1.
pub fn parse_field(record: &FieldRecord) -> Result<NumberField> {
    let n = record.degree;
    if n == 0 {
        return Err(Error::MalformedRecord("degree must be at least 1".into()));
    }
    let mut poly = record
        .poly
        .iter()
        .map(IntLike::to_bigint)
        .collect::<Result<Vec<_>>>()?;
    match poly.len() {
        l if l == n as usize => {}
        l if l == n as usize + 1 => {
            if !poly[n as usize].is_one() {
                return Err(Error::NonMonicPolynomial);
            }
            poly.pop();
        }
        l => {
            return Err(Error::MalformedRecord(format!(
                "degree {n} but {l} polynomial coefficients"
            )))
        }
    }
    let disc = record.disc.to_bigint()?;
    if disc.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    if n >= 2 && disc.abs().is_one() {
        return Err(Error::MalformedRecord(format!(
            "|d_K| = 1 is impossible in degree {n}"
        )));
    }
    let label = record.label.clone().unwrap_or_default();
    let mut overrides = BTreeMap::new();
    for (key, factors) in record.splitting.iter().flatten() {
        let p: u64 = key
            .trim()
            .parse()
            .map_err(|_| Error::MalformedRecord(format!("splitting key '{key}' is not a prime")))?;
        if !is_prime(p) {
            return Err(Error::MalformedRecord(format!(
                "splitting key {p} is not prime"
            )));
        }
        if factors.iter().any(|[e, f]| *e == 0 || *f == 0) {
            return Err(Error::MalformedRecord(format!(
                "splitting of {p}: e and f must be positive"
            )));
        }
        let total: u32 = factors.iter().map(|[e, f]| e * f).sum();
        if total != n {
            return Err(Error::MalformedRecord(format!(
                "splitting of {p}: sum of e*f is {total}, degree is {n}"
            )));
        }
        let mut ef: Vec<(u32, u32)> = factors.iter().map(|&[e, f]| (e, f)).collect();
        ef.sort();
        overrides.insert(p, ef);
    }
    Ok(NumberField {
        label,
        degree: n,
        poly,
        disc,
        splitting_overrides: overrides,
        subfield_labels: record.subfields.clone().unwrap_or_default(),
    })
}

/// Parses one JSON line of a field data file.
pub fn parse_field_line(line: &str) -> Result<NumberField> {
    let rec: FieldRecord =
        serde_json::from_str(line).map_err(|e| Error::MalformedRecord(e.to_string()))?;
    parse_field(&rec)
}
