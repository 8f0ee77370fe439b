//! Integer refinement of a real conductor bound using the allowed conductor exponents.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::sums::EllipticType;

/// Allowed exponents of p in the conductor for a given reduction type. The caps for
/// additive reduction at 2 and 3 are the standard bounds on conductor exponents.
pub fn valuation_range(p: u64, t: EllipticType) -> RangeInclusive<u32> {
    match t {
        EllipticType::Good => 0..=0,
        EllipticType::Multiplicative => 1..=1,
        EllipticType::Additive => match p {
            2 => 2..=8,
            3 => 2..=5,
            _ => 2..=2,
        },
    }
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_admissible(n: u64, spec: &BTreeMap<u64, EllipticType>) -> bool {
    spec.iter()
        .all(|(&p, &t)| valuation_range(p, t).contains(&valuation(n, p)))
}

/// Least N ≥ B with v_p(N) allowed for every constrained p.
pub fn refine_integer_bound(b: f64, spec: &BTreeMap<u64, EllipticType>) -> Result<u64> {
    if !b.is_finite() || b < 1.0 || b > 1e18 {
        return Err(Error::Domain(format!(
            "B_R must be a finite real ≥ 1, got {b}"
        )));
    }
    let base: u64 = spec
        .iter()
        .map(|(&p, &t)| p.pow(*valuation_range(p, t).start()))
        .product();
    let lower = b.ceil() as u64;
    let mut k = lower.div_ceil(base);
    // k coprime to every constrained prime is admissible, so this terminates
    loop {
        let n = k * base;
        if is_admissible(n, spec) {
            return Ok(n);
        }
        k += 1;
    }
}
