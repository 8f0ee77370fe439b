//! Mestre test functions: even weights F with F(0) = 1 supported on [-1, 1].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, GaussLegendre, QuadratureConfig};

/// Grid step used by the |F| ≤ 1 check at construction time.
const SUP_CHECK_STEP: f64 = 1e-3;

/// Odlyzko's function (1 − |x|)cos πx + sin(π|x|)/π on [-1, 1], zero elsewhere.
pub fn odlyzko_eval(x: f64) -> f64 {
    let x = x.abs();
    if x >= 1.0 {
        return 0.0;
    }
    (1.0 - x) * (PI * x).cos() + (PI * x).sin() / PI
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunctionKind {
    Odlyzko,
    /// Autocorrelation g*g of g(x) = Σ aᵢ x^{2i} on [-1/2, 1/2].
    PolyAutocorr {
        coeffs: Vec<f64>,
    },
    CoshDamped(Box<TestFunction>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    kind: TestFunctionKind,
    /// Raw value at 0; `eval` divides by it.
    normalization: f64,
    rule: Option<GaussLegendre>,
}

impl TestFunction {
    pub fn odlyzko() -> Self {
        Self {
            kind: TestFunctionKind::Odlyzko,
            normalization: 1.0,
            rule: None,
        }
    }

    /// Builds (g*g)/(g*g)(0) from the even coefficients a₀, a₂, … of g.
    pub fn autocorr(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "autocorrelation coefficients must be finite and non-empty".into(),
            ));
        }
        let d = coeffs.len() - 1;
        // g(t)g(t - x) has degree 4d
        let rule = GaussLegendre::exact_for_degree(4 * d);
        let norm = raw_autocorr(coeffs, &rule, 0.0);
        if !(norm > 0.0) {
            return Err(Error::ZeroFunction);
        }
        let f = Self {
            kind: TestFunctionKind::PolyAutocorr {
                coeffs: coeffs.to_vec(),
            },
            normalization: norm,
            rule: Some(rule),
        };
        f.check_sup_norm();
        Ok(f)
    }

    /// x ↦ F(x)/cosh x; the non-GRH substitute.
    pub fn cosh_damp(&self) -> Self {
        Self {
            kind: TestFunctionKind::CoshDamped(Box::new(self.clone())),
            normalization: 1.0,
            rule: None,
        }
    }

    pub fn kind(&self) -> &TestFunctionKind {
        &self.kind
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Even polynomial coefficients when this is an autocorrelation.
    pub fn coeffs(&self) -> Option<&[f64]> {
        match &self.kind {
            TestFunctionKind::PolyAutocorr { coeffs } => Some(coeffs),
            _ => None,
        }
    }

    pub fn is_cosh_damped(&self) -> bool {
        matches!(self.kind, TestFunctionKind::CoshDamped(_))
    }

    /// True when the Fourier transform is nonnegative by construction.
    pub fn is_autocorrelation(&self) -> bool {
        matches!(self.kind, TestFunctionKind::PolyAutocorr { .. })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() > 1.0 {
            return 0.0;
        }
        match &self.kind {
            TestFunctionKind::Odlyzko => odlyzko_eval(x),
            TestFunctionKind::PolyAutocorr { coeffs } => {
                let rule = self
                    .rule
                    .as_ref()
                    .expect("autocorrelation carries its rule");
                raw_autocorr(coeffs, rule, x) / self.normalization
            }
            TestFunctionKind::CoshDamped(inner) => inner.eval(x) / x.cosh(),
        }
    }

    /// Φ(1/2) = ∫ F.
    pub fn phi_half(&self) -> f64 {
        match &self.kind {
            TestFunctionKind::Odlyzko => 8.0 / (PI * PI),
            // ∫ g*g = (∫ g)²
            TestFunctionKind::PolyAutocorr { coeffs } => {
                let int_g: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * monomial_integral(i))
                    .sum();
                int_g * int_g / self.normalization
            }
            TestFunctionKind::CoshDamped(_) => {
                let cfg = QuadratureConfig {
                    abs_tol: 1e-13,
                    ..Default::default()
                };
                2.0 * integrate_adaptive(|x| self.eval(x), 0.0, 1.0, &cfg)
                    .expect("bounded integrand on [0, 1]")
            }
        }
    }

    /// F̂(t) = ∫ F(x) cos(tx) dx.
    pub fn fourier(&self, t: f64) -> Result<f64> {
        let cfg = QuadratureConfig {
            abs_tol: 1e-13,
            ..Default::default()
        };
        // split on the half-periods so each panel sees a bounded number of oscillations
        let pieces = ((t.abs() / PI).ceil() as usize).clamp(1, 4096);
        let h = 1.0 / pieces as f64;
        let mut total = 0.0;
        for k in 0..pieces {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            total += integrate_adaptive(|x| self.eval(x) * (t * x).cos(), a, b, &cfg)?;
        }
        Ok(2.0 * total)
    }

    /// Largest |F| seen on a grid over [0, 1].
    pub fn sup_on_grid(&self, step: f64) -> f64 {
        let n = (1.0 / step).ceil() as usize;
        (0..=n)
            .map(|k| self.eval((k as f64 * step).min(1.0)).abs())
            .fold(0.0, f64::max)
    }

    fn check_sup_norm(&self) {
        let sup = self.sup_on_grid(SUP_CHECK_STEP);
        if sup > 1.0 + 1e-12 {
            log::warn!("test function exceeds 1 in absolute value (sup ≈ {sup:.6})");
        }
    }
}

/// ∫_{−1/2}^{1/2} x^{2i} dx.
pub(crate) fn monomial_integral(i: usize) -> f64 {
    0.5f64.powi(2 * i as i32) / (2 * i + 1) as f64
}

fn even_poly(coeffs: &[f64], t: f64) -> f64 {
    let t2 = t * t;
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * t2 + a)
}

fn raw_autocorr(coeffs: &[f64], rule: &GaussLegendre, x: f64) -> f64 {
    let x = x.abs();
    if x >= 1.0 {
        return 0.0;
    }
    rule.integrate(
        |t| even_poly(coeffs, t) * even_poly(coeffs, t - x),
        x - 0.5,
        0.5,
    )
}

/// (x^{2i} * x^{2j})(x) = ∫_{|x|−1/2}^{1/2} t^{2i}(t − |x|)^{2j} dt, the unnormalized
/// autocorrelation of two basis monomials.
pub fn monomial_convolution(i: usize, j: usize, x: f64) -> f64 {
    let x = x.abs();
    if x >= 1.0 {
        return 0.0;
    }
    let rule = GaussLegendre::exact_for_degree(2 * (i + j));
    rule.integrate(
        |t| t.powi(2 * i as i32) * (t - x).powi(2 * j as i32),
        x - 0.5,
        0.5,
    )
}

/// min of F̂ over {0, step, 2·step, …, t_max}.
pub fn fourier_min(f: &TestFunction, t_max: f64, grid_step: f64) -> Result<f64> {
    if !(t_max > 0.0) || !(grid_step > 0.0) {
        return Err(Error::InvalidInput(
            "t_max and grid_step must be positive".into(),
        ));
    }
    let n = (t_max / grid_step + 1e-9).floor() as usize;
    let mut min = f64::INFINITY;
    for k in 0..=n {
        min = min.min(f.fourier(k as f64 * grid_step)?);
    }
    Ok(min)
}

/// F_λ(x) = F(x/λ).
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledTestFunction {
    pub base: TestFunction,
    pub lambda: f64,
}

impl ScaledTestFunction {
    pub fn new(base: TestFunction, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self { base, lambda })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.base.eval(x / self.lambda)
    }

    pub fn phi_half(&self) -> f64 {
        self.lambda * self.base.phi_half()
    }
}

/// Configuration form: `{"kind":"odlyzko"}` or `{"kind":"poly","coeffs":[…]}`,
/// optionally with `"cosh_damped": true`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TestFunctionSpec {
    Odlyzko {
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        cosh_damped: bool,
    },
    Poly {
        coeffs: Vec<f64>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        cosh_damped: bool,
    },
}

impl Default for TestFunctionSpec {
    fn default() -> Self {
        TestFunctionSpec::Odlyzko { cosh_damped: false }
    }
}

impl TestFunctionSpec {
    pub fn build(&self) -> Result<TestFunction> {
        let (f, damped) = match self {
            TestFunctionSpec::Odlyzko { cosh_damped } => (TestFunction::odlyzko(), *cosh_damped),
            TestFunctionSpec::Poly {
                coeffs,
                cosh_damped,
            } => (TestFunction::autocorr(coeffs)?, *cosh_damped),
        };
        Ok(if damped { f.cosh_damp() } else { f })
    }

    /// Parses the command-line form `odlyzko` or `poly:a0,a2,…`.
    pub fn parse_cli(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("odlyzko") {
            return Ok(Self::default());
        }
        let rest = s
            .strip_prefix("poly:")
            .ok_or_else(|| Error::InvalidInput(format!("unknown test function '{s}'")))?;
        let coeffs = rest
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad coefficient '{c}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TestFunctionSpec::Poly {
            coeffs,
            cosh_damped: false,
        })
    }
}

impl From<&TestFunction> for TestFunctionSpec {
    fn from(f: &TestFunction) -> Self {
        match &f.kind {
            TestFunctionKind::Odlyzko => TestFunctionSpec::Odlyzko { cosh_damped: false },
            TestFunctionKind::PolyAutocorr { coeffs } => TestFunctionSpec::Poly {
                coeffs: coeffs.clone(),
                cosh_damped: false,
            },
            TestFunctionKind::CoshDamped(inner) => match TestFunctionSpec::from(inner.as_ref()) {
                TestFunctionSpec::Odlyzko { .. } => TestFunctionSpec::Odlyzko { cosh_damped: true },
                TestFunctionSpec::Poly { coeffs, .. } => TestFunctionSpec::Poly {
                    coeffs,
                    cosh_damped: true,
                },
            },
        }
    }
}
