//! Dense polynomials over 𝔽_p and their factorization: squarefree decomposition,
//! distinct-degree splitting and Cantor–Zassenhaus equal-degree splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coefficients low → high, no trailing zeros; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    coeffs: Vec<u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    powmod(a, p - 2, p)
}

impl FpPoly {
    pub fn new(mut coeffs: Vec<u64>, p: u64) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut f = Self { coeffs };
        f.trim();
        f
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    pub fn x() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self, p: u64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let li = inv(self.lead(), p);
        Self::new(self.coeffs.iter().map(|&c| mulmod(c, li, p)).collect(), p)
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = o.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % p
            })
            .collect();
        Self::new(v, p)
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = o.coeffs.get(i).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        Self::new(v, p)
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = (v[i + j] + mulmod(a, b, p)) % p;
            }
        }
        Self::new(v, p)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Self, p: u64) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let dl = d.coeffs.len();
        let li = inv(d.lead(), p);
        let mut q = vec![0u64; r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let c = mulmod(r[k + dl - 1], li, p);
            q[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mulmod(c, dc, p)) % p;
            }
        }
        r.truncate(dl - 1);
        (Self::new(q, p), Self::new(r, p))
    }

    pub fn rem(&self, d: &Self, p: u64) -> Self {
        self.divrem(d, p).1
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Self, p: u64) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, p);
            a = b;
            b = r;
        }
        a.monic(p)
    }

    pub fn derivative(&self, p: u64) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mulmod(c, i as u64 % p, p))
            .collect();
        Self::new(v, p)
    }

    /// self^e mod m.
    pub fn pow_mod(&self, mut e: u128, m: &Self, p: u64) -> Self {
        let mut base = self.rem(m, p);
        let mut r = Self::one().rem(m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base, p).rem(m, p);
            }
            base = base.mul(&base, p).rem(m, p);
            e >>= 1;
        }
        r
    }

    /// Inverse of the Frobenius on a polynomial whose exponents are all multiples of p.
    fn pth_root(&self, p: u64) -> Self {
        let v = self.coeffs.iter().step_by(p as usize).copied().collect();
        Self::new(v, p)
    }
}

/// Squarefree decomposition of a monic f: pairs (s, k) with f = Π s^k, each s squarefree,
/// monic and non-constant.
pub fn squarefree_decomposition(f: &FpPoly, p: u64) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    sqf_into(&f.monic(p), p, 1, &mut out);
    out.sort_by_key(|(_, k)| *k);
    out
}

fn sqf_into(f: &FpPoly, p: u64, scale: u32, out: &mut Vec<(FpPoly, u32)>) {
    if f.deg() == 0 {
        return;
    }
    let df = f.derivative(p);
    if df.is_zero() {
        sqf_into(&f.pth_root(p), p, scale * p as u32, out);
        return;
    }
    let mut c = f.gcd(&df, p);
    let mut w = f.divrem(&c, p).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c, p);
        let z = w.divrem(&y, p).0;
        if z.deg() > 0 {
            out.push((z.monic(p), i * scale));
        }
        i += 1;
        w = y;
        c = c.divrem(&w, p).0;
    }
    if c.deg() > 0 {
        sqf_into(&c.pth_root(p), p, scale * p as u32, out);
    }
}

/// Distinct-degree factorization of a squarefree monic f: pairs (g_d, d) where g_d is the
/// product of all irreducible factors of degree d.
pub fn distinct_degree(f: &FpPoly, p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut f = f.monic(p);
    let mut h = FpPoly::x().rem(&f, p);
    let mut d = 1;
    while f.deg() >= 2 * d {
        h = h.pow_mod(p as u128, &f, p);
        let g = f.gcd(&h.sub(&FpPoly::x(), p), p);
        if !g.is_one() {
            f = f.divrem(&g, p).0;
            h = h.rem(&f, p);
            out.push((g, d));
        }
        d += 1;
    }
    if f.deg() > 0 {
        let deg = f.deg();
        out.push((f, deg));
    }
    out
}

/// Splits a product of distinct degree-d irreducibles into its factors.
pub fn equal_degree(f: &FpPoly, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let f = f.monic(p);
    let n = f.deg();
    if n == d {
        return vec![f];
    }
    loop {
        let a = random_poly(n, p, rng);
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a² + … + a^{2^{d−1}} into 𝔽₂
            let mut t = a.rem(&f, p);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t, p).rem(&f, p);
                acc = acc.add(&t, p);
            }
            acc
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            a.pow_mod(e, &f, p).sub(&FpPoly::one(), p)
        };
        let g = f.gcd(&b, p);
        if g.deg() > 0 && g.deg() < n {
            let h = f.divrem(&g, p).0;
            let mut out = equal_degree(&g, d, p, rng);
            out.extend(equal_degree(&h, d, p, rng));
            return out;
        }
    }
}

fn random_poly(n: usize, p: u64, rng: &mut ChaCha8Rng) -> FpPoly {
    FpPoly::new((0..n).map(|_| rng.gen_range(0..p)).collect(), p)
}

/// Complete factorization into monic irreducibles with multiplicities, sorted.
pub fn factor(f: &FpPoly, p: u64, seed: u64) -> Vec<(FpPoly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (s, k) in squarefree_decomposition(f, p) {
        for (g, d) in distinct_degree(&s, p) {
            for h in equal_degree(&g, d, p, &mut rng) {
                out.push((h, k));
            }
        }
    }
    out.sort_by(|a, b| (a.0.deg(), &a.0, a.1).cmp(&(b.0.deg(), &b.0, b.1)));
    out
}
