//! Dense real polynomials in the monomial basis and the classical
//! orthogonal families (Jacobi, Laguerre, Hermite).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::PolyError;

/// A real polynomial `Σ coeffs[k] x^k`.
///
/// Trailing zero coefficients are dropped on construction, so the zero
/// polynomial is the empty coefficient list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self { coeffs }
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as degree 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coefficient(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut slope = 0.0;
        for &c in self.coeffs.iter().rev() {
            slope = slope * x + value;
            value = value * x + c;
        }
        (value, slope)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// `self^n` by repeated multiplication.
    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// `self - factor * other`, in place.
    pub fn sub_scaled(&mut self, factor: f64, other: &Polynomial) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= factor * b;
        }
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}

fn zip_with(p: &Polynomial, q: &Polynomial, op: impl Fn(f64, f64) -> f64) -> Polynomial {
    let n = p.coeffs.len().max(q.coeffs.len());
    Polynomial::new((0..n).map(|k| op(p.coeff(k), q.coeff(k))).collect())
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// Generalized binomial coefficient `C(a, k) = Π_{j=1..k} (a - j + 1) / j`.
pub fn binomial(a: f64, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * (a - j as f64 + 1.0) / j as f64)
}

fn check_param(name: &'static str, value: f64) -> Result<(), PolyError> {
    if value.is_finite() && value > -1.0 {
        Ok(())
    } else {
        Err(PolyError::Domain { name, value })
    }
}

/// Jacobi polynomial `J_n^{(α,β)}` from the finite sum
/// `2^{-n} Σ_k C(n+α, n-k) C(n+β, k) (x-1)^k (x+1)^{n-k}`.
pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Result<Polynomial, PolyError> {
    check_param("alpha", alpha)?;
    check_param("beta", beta)?;
    let nf = n as f64;
    let xm1 = Polynomial::linear(-1.0, 1.0);
    let xp1 = Polynomial::linear(1.0, 1.0);
    let mut sum = Polynomial::zero();
    for k in 0..=n {
        let c = binomial(nf + alpha, n - k) * binomial(nf + beta, k);
        let term = &xm1.pow(k) * &xp1.pow(n - k);
        sum = &sum + &term.scale(c);
    }
    Ok(sum.scale(0.5f64.powi(n as i32)))
}

/// Laguerre polynomial `L_n^{(α)} = Σ_k C(n+α, n-k) (-x)^k / k!`.
pub fn laguerre(n: usize, alpha: f64) -> Result<Polynomial, PolyError> {
    check_param("alpha", alpha)?;
    let nf = n as f64;
    let mut coeffs = vec![0.0; n + 1];
    let mut factorial = 1.0;
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *c = binomial(nf + alpha, n - k) * sign / factorial;
    }
    Ok(Polynomial::new(coeffs))
}

/// Physicists' Hermite polynomial `H_n`, leading coefficient `2^n`.
pub fn hermite(n: usize) -> Polynomial {
    let factorial = |k: usize| (1..=k).fold(1.0, |acc, j| acc * j as f64);
    let mut coeffs = vec![0.0; n + 1];
    for k in 0..=n / 2 {
        let power = n - 2 * k;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[power] =
            factorial(n) * sign * 2f64.powi(power as i32) / (factorial(power) * factorial(k));
    }
    Polynomial::new(coeffs)
}
