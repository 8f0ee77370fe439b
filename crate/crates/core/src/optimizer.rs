//! Maximizing the bound over autocorrelations g*g of even polynomials g, at fixed λ.
//!
//! The log bound is linear in the test function, so over F = g*g with
//! g = Σ aᵢ x^{2i} it is the quadratic form aᵀBa with Bᵢⱼ the functional at the
//! monomial autocorrelation x^{2i} * x^{2j}. The normalization F(0) = 1 is aᵀGa = 1 for
//! the Gram matrix G, so the optimum is the top eigenpair of the pencil (B, G).

use serde::{Deserialize, Serialize};

use crate::bounds::{lambda_scan, BoundQuery, BoundResult, LambdaSpec, Mode};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, jacobi_eigen, lower_inverse, matmul, symmetrize, transpose, Matrix};
use crate::quadrature::archimedean_functional;
use crate::sums::{prime_sum, CoefficientModel};
use crate::testfunc::{monomial_convolution, monomial_integral, TestFunction};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticProgram {
    pub g: Matrix,
    pub b: Matrix,
    pub basis_degree: usize,
}

/// Gᵢⱼ = ∫_{−1/2}^{1/2} x^{2i+2j} dx.
pub fn gram_matrix(d: usize) -> Matrix {
    (0..=d)
        .map(|i| (0..=d).map(|j| monomial_integral(i + j)).collect())
        .collect()
}

fn fixed_lambda(query: &BoundQuery) -> Result<f64> {
    match query.lambda {
        LambdaSpec::Fixed(l) => Ok(l),
        LambdaSpec::Grid(_) => Err(Error::InvalidInput(
            "the optimizer works at a fixed lambda".into(),
        )),
    }
}

/// The log-bound functional (without the rank term) at an unnormalized profile h.
fn functional<P: Fn(f64) -> f64 + Copy>(
    query: &BoundQuery,
    lambda: f64,
    classes: &[crate::numberfield::NormClass],
    model: CoefficientModel,
    h: P,
) -> Result<f64> {
    let damped = |x: f64| match query.mode {
        Mode::Grh => h(x),
        Mode::Uncond => h(x) / x.cosh(),
    };
    let n = query.field.degree as f64;
    let g = query.dim as f64;
    let h0 = h(0.0);
    let s = prime_sum(
        classes,
        &query.spec,
        query.dim,
        lambda,
        damped,
        model,
        false,
    )
    .total;
    let arch = archimedean_functional(damped, h0, lambda, &query.quadrature)?;
    Ok(-2.0 / n * s + g * arch - 2.0 * g * query.field.log_root_discriminant() * h0)
}

/// Bᵢⱼ = bound functional at x^{2i} * x^{2j}, rank term omitted.
pub fn bound_matrix(query: &BoundQuery, d: usize, model: CoefficientModel) -> Result<Matrix> {
    query.validate()?;
    let lambda = fixed_lambda(query)?;
    let table = query.field.ideal_table(lambda.exp(), query.seed);
    let mut b = vec![vec![0.0; d + 1]; d + 1];
    for i in 0..=d {
        for j in i..=d {
            let v = functional(query, lambda, &table.classes, model, |x| {
                monomial_convolution(i, j, x)
            })?;
            b[i][j] = v;
            b[j][i] = v;
        }
    }
    Ok(symmetrize(&b))
}

/// λ·r·Φ(1/2)/n on x^{2i} * x^{2j}; Φ of a convolution is the product of integrals.
pub fn rank_matrix(query: &BoundQuery, d: usize) -> Result<Matrix> {
    let lambda = fixed_lambda(query)?;
    let c = match query.mode {
        Mode::Grh => lambda * query.rank as f64 / query.field.degree as f64,
        Mode::Uncond => 0.0,
    };
    Ok((0..=d)
        .map(|i| {
            (0..=d)
                .map(|j| c * monomial_integral(i) * monomial_integral(j))
                .collect()
        })
        .collect())
}

/// Maximizes aᵀ(B + extra)a subject to aᵀGa = 1. Returns (a, value) with a₀ > 0.
pub fn maximize_quadratic(
    prog: &QuadraticProgram,
    extra: Option<&Matrix>,
) -> Result<(Vec<f64>, f64)> {
    let n = prog.g.len();
    if n == 0 || prog.b.len() != n || extra.is_some_and(|e| e.len() != n) {
        return Err(Error::InvalidInput("matrix dimensions do not agree".into()));
    }
    let mut b = prog.b.clone();
    if let Some(e) = extra {
        for i in 0..n {
            for j in 0..n {
                b[i][j] += e[i][j];
            }
        }
    }
    let b = symmetrize(&b);
    let l = cholesky(&prog.g)?;
    let li = lower_inverse(&l);
    let c = symmetrize(&matmul(&matmul(&li, &b), &transpose(&li)));
    let (vals, vecs) = jacobi_eigen(&c);
    let y: Vec<f64> = (0..n).map(|r| vecs[r][0]).collect();
    // a = L⁻ᵀ y
    let mut a: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|k| li[k][i] * y[k]).sum())
        .collect();
    let pivot = a.iter().copied().find(|x| x.abs() > 1e-300).unwrap_or(1.0);
    if pivot < 0.0 {
        a.iter_mut().for_each(|x| *x = -*x);
    }
    Ok((a, vals[0]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub lambda: f64,
    pub basis_degree: usize,
    pub coeffs: Vec<f64>,
    /// Top eigenvalue: the log bound predicted by the quadratic program.
    pub program_log_bound: f64,
    /// The bound re-evaluated through the bounds module with the constructed function.
    pub poly: BoundResult,
    /// Odlyzko's function on the same query.
    pub odlyzko: BoundResult,
}

/// Builds and solves the program, then re-evaluates the winner and Odlyzko's function.
/// A λ grid is first collapsed to the λ* of an Odlyzko scan.
pub fn optimize_testfunc(query: &BoundQuery, d: usize) -> Result<(TestFunction, OptimizeOutcome)> {
    let mut q = query.clone();
    if let LambdaSpec::Grid(_) = q.lambda {
        let odl = BoundQuery {
            testfunc: TestFunction::odlyzko(),
            ..q.clone()
        };
        q.lambda = LambdaSpec::Fixed(lambda_scan(&odl)?.lambda_star);
    }
    let lambda = fixed_lambda(&q)?;
    let prog = QuadraticProgram {
        g: gram_matrix(d),
        b: bound_matrix(&q, d, q.model)?,
        basis_degree: d,
    };
    let rank = rank_matrix(&q, d)?;
    let (coeffs, value) = maximize_quadratic(&prog, Some(&rank))?;
    let f = TestFunction::autocorr(&coeffs)?;
    let poly = lambda_scan(&BoundQuery {
        testfunc: f.clone(),
        ..q.clone()
    })?;
    let odlyzko = lambda_scan(&BoundQuery {
        testfunc: TestFunction::odlyzko(),
        ..q
    })?;
    Ok((
        f,
        OptimizeOutcome {
            lambda,
            basis_degree: d,
            coeffs,
            program_log_bound: value,
            poly,
            odlyzko,
        },
    ))
}
