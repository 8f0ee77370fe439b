//! Gauss–Legendre quadrature, the exponential integral and the archimedean
//! constant of the explicit formula.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::testfunc::TestFunction;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Tolerances for [`integrate_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_depth: u32,
    pub nodes_per_panel: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 40,
            nodes_per_panel: 15,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidInput("abs_tol must be positive".into()));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidInput("max_depth must be at least 1".into()));
        }
        if self.nodes_per_panel < 1 {
            return Err(Error::InvalidInput(
                "nodes_per_panel must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// An n-point Gauss–Legendre rule on [-1, 1]; exact for polynomials of degree ≤ 2n − 1.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let step = p / d;
                z -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Rule with enough nodes to integrate a polynomial of the given degree exactly.
    pub fn exact_for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        sum * half
    }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p1, mut p2) = (1.0, 0.0);
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
    }
    let d = n as f64 * (z * p1 - p2) / (z * z - 1.0);
    (p1, d)
}

/// Adaptive bisection with a fixed Gauss–Legendre rule per panel.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("integration interval [{a}, {b}]")));
    }
    let rule = GaussLegendre::new(cfg.nodes_per_panel);
    let whole = rule.integrate(&f, a, b);
    refine(&f, &rule, a, b, whole, cfg.abs_tol, 1, cfg)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(f, a, mid);
    let right = rule.integrate(f, mid, b);
    let sum = left + right;
    // roundoff floor: deep panels cannot resolve below a few ulps of their own size
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if (sum - whole).abs() <= tol.max(floor) {
        return Ok(sum);
    }
    if !sum.is_finite() || depth >= cfg.max_depth {
        return Err(Error::ToleranceNotReached {
            a,
            b,
            tol: cfg.abs_tol,
        });
    }
    let l = refine(f, rule, a, mid, left, 0.5 * tol, depth + 1, cfg)?;
    let r = refine(f, rule, mid, b, right, 0.5 * tol, depth + 1, cfg)?;
    Ok(l + r)
}

/// E₁(x) = ∫ₓ^∞ e^{−t}/t dt for x > 0.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain(format!("E1 needs x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 1.0 {
        // E₁(x) = −γ − ln x − Σ_{k≥1} (−x)^k / (k·k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= -x / kf;
            let c = term / kf;
            sum += c;
            if c.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        Ok(-EULER_GAMMA - x.ln() - sum)
    } else {
        // modified Lentz on the continued fraction
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        Ok(h * (-x).exp())
    }
}

/// 1/(e^x − 1) − 1/x, bounded near 0 (limit −1/2).
fn bose_remainder(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        -0.5 + x * (1.0 / 12.0 - x2 * (1.0 / 720.0 - x2 * (1.0 / 30240.0 - x2 / 1_209_600.0)))
    } else {
        1.0 / x.exp_m1() - 1.0 / x
    }
}

/// (1 − e^{−x})/x, bounded near 0 (limit 1).
fn decay_ratio(x: f64) -> f64 {
    -(-x).exp_m1() / x
}

/// ∫₀^∞ [P(x/λ)/(e^x − 1) − P(0)·e^{−x}/x] dx for an even profile `P` that
/// vanishes outside [−1, 1].
///
/// The two `1/x` singularities are separated analytically so the numerical
/// integrand stays bounded at 0; the tail beyond λ is `−P(0)·E₁(λ)`.
pub fn archimedean_integral<P: Fn(f64) -> f64>(
    profile: P,
    profile_at_zero: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let f0 = profile_at_zero;
    let integrand = |x: f64| {
        let u = profile(x / lambda);
        (u - f0) / x + u * bose_remainder(x) + f0 * decay_ratio(x)
    };
    let head = integrate_adaptive(integrand, 0.0, lambda, cfg)?;
    Ok(head - f0 * exp_integral_e1(lambda)?)
}

/// 2·(P(0)·log 2π + I), linear in the profile `P`.
pub fn archimedean_functional<P: Fn(f64) -> f64>(
    profile: P,
    profile_at_zero: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let i = archimedean_integral(profile, profile_at_zero, lambda, cfg)?;
    Ok(2.0 * (profile_at_zero * (2.0 * PI).ln() + i))
}

/// The archimedean constant M_{λ,F} for a normalized test function.
pub fn m_lambda(f: &TestFunction, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    archimedean_functional(|y| f.eval(y), 1.0, lambda, cfg)
}

/// ∫₀^∞ [e^{−x}/(1 − e^{−x}) − e^{−x}/x] dx, which equals Euler's constant.
pub fn euler_gamma_integral(cfg: &QuadratureConfig) -> Result<f64> {
    let split = 1.0;
    let head = archimedean_integral(|_| 1.0, 1.0, split, cfg)?;
    // ∫_split^∞ dx/(e^x − 1) = −ln(1 − e^{−split})
    let tail = -(-(-split).exp()).ln_1p();
    Ok(head + tail)
}

/// Upper bound 2(log 2π + γ) on M_{λ,F} for |F| ≤ 1.
pub fn m_lambda_ceiling() -> f64 {
    2.0 * ((2.0 * PI).ln() + EULER_GAMMA)
}
