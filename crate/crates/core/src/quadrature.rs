//! Inner products `⟨p, q⟩ = ∫ p q η dx` with `η(x) = w(x) / √((x-a)(b-x))`.
//!
//! The inverse-square-root endpoint factor is absorbed exactly by the
//! Chebyshev–Gauss rule of the first kind, so for polynomial `w` the inner
//! product is exact up to rounding once `2N - 1 ≥ deg p + deg q + deg w`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::weight::WeightFn;

pub const DEFAULT_NODE_COUNT: usize = 512;

/// Highest moment order compared by the construction-time convergence check.
const CONVERGENCE_MOMENTS: usize = 32;

/// `N`-point Chebyshev–Gauss rule on `[a, b]` for the weight
/// `1/√((x-a)(b-x))`, as `(node, mass)` pairs.
///
/// The affine Jacobian cancels against the weight, so every mass is `π/N`.
pub fn chebyshev_gauss_rule(n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::Domain(
            "Chebyshev–Gauss rule needs at least one node".into(),
        ));
    }
    check_interval(a, b)?;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mass = PI / n as f64;
    Ok((1..=n)
        .map(|k| {
            let t = ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos();
            (mid + half * t, mass)
        })
        .collect())
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "interval [{a}, {b}] must be finite with a < b"
        )))
    }
}

/// Inner product induced by a regression weight on `[a, b]`.
#[derive(Clone, Debug)]
pub struct InnerProductSpec {
    a: f64,
    b: f64,
    weight: WeightFn,
    nodes: Vec<f64>,
    /// `mass_k · w(x_k)`.
    weighted_masses: Vec<f64>,
    convergence_delta: f64,
}

impl InnerProductSpec {
    pub fn new(a: f64, b: f64, weight: WeightFn, node_count: usize) -> Result<Self> {
        let (nodes, weighted_masses) = weighted_rule(node_count, a, b, &weight)?;
        let mut spec = Self {
            a,
            b,
            weight,
            nodes,
            weighted_masses,
            convergence_delta: 0.0,
        };
        spec.convergence_delta = spec.doubling_delta()?;
        Ok(spec)
    }

    pub fn with_default_nodes(a: f64, b: f64, weight: WeightFn) -> Result<Self> {
        Self::new(a, b, weight, DEFAULT_NODE_COUNT)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn weight(&self) -> &WeightFn {
        &self.weight
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Largest scaled change in the moments `∫ x^j η dx`, `j ≤ 32`, between
    /// this rule and one with twice as many nodes.
    pub fn convergence_delta(&self) -> f64 {
        self.convergence_delta
    }

    pub fn is_converged(&self) -> bool {
        self.convergence_delta <= 1e-12
    }

    /// `η(x) = w(x) / √((x-a)(b-x))` on the open interval.
    pub fn eta(&self, x: f64) -> Result<f64> {
        let w = self
            .weight
            .eval(x)
            .map_err(|source| Error::Evaluation { x, source })?;
        Ok(w / ((x - self.a) * (self.b - x)).sqrt())
    }

    /// `⟨p, q⟩`, raising the node count when the rule would not be exact
    /// for the polynomial part.
    pub fn inner_product(&self, p: &Polynomial, q: &Polynomial) -> Result<f64> {
        let required = p.degree_or_zero() + q.degree_or_zero() + 1;
        if self.node_count() < required {
            let raised = Self::new(self.a, self.b, self.weight.clone(), required)?;
            return Ok(raised.sum(p, q));
        }
        Ok(self.sum(p, q))
    }

    fn sum(&self, p: &Polynomial, q: &Polynomial) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weighted_masses)
            .map(|(&x, &wm)| wm * (p.eval(x) * q.eval(x)))
            .sum()
    }

    /// `∫ x^j η dx`.
    pub fn moment(&self, j: usize) -> f64 {
        moments(&self.nodes, &self.weighted_masses, j)[j]
    }

    fn doubling_delta(&self) -> Result<f64> {
        let (nodes2, wm2) = weighted_rule(2 * self.node_count(), self.a, self.b, &self.weight)?;
        let coarse = moments(&self.nodes, &self.weighted_masses, CONVERGENCE_MOMENTS);
        let fine = moments(&nodes2, &wm2, CONVERGENCE_MOMENTS);
        let scale = abs_moments(&nodes2, &wm2, CONVERGENCE_MOMENTS);
        Ok(coarse
            .iter()
            .zip(&fine)
            .zip(&scale)
            .map(|((c, f), s)| if *s > 0.0 { (c - f).abs() / s } else { 0.0 })
            .fold(0.0, f64::max))
    }
}

fn weighted_rule(n: usize, a: f64, b: f64, weight: &WeightFn) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = chebyshev_gauss_rule(n, a, b)?;
    let mut nodes = Vec::with_capacity(n);
    let mut weighted = Vec::with_capacity(n);
    for (x, mass) in rule {
        let w = weight
            .eval(x)
            .map_err(|source| Error::Evaluation { x, source })?;
        nodes.push(x);
        weighted.push(mass * w);
    }
    Ok((nodes, weighted))
}

fn moments(nodes: &[f64], wm: &[f64], max: usize) -> Vec<f64> {
    let mut out = vec![0.0; max + 1];
    for (&x, &m) in nodes.iter().zip(wm) {
        let mut power = m;
        for slot in out.iter_mut() {
            *slot += power;
            power *= x;
        }
    }
    out
}

fn abs_moments(nodes: &[f64], wm: &[f64], max: usize) -> Vec<f64> {
    let abs_nodes: Vec<f64> = nodes.iter().map(|x| x.abs()).collect();
    let abs_wm: Vec<f64> = wm.iter().map(|m| m.abs()).collect();
    moments(&abs_nodes, &abs_wm, max)
}

/// Free-function form of [`InnerProductSpec::inner_product`].
pub fn inner_product(p: &Polynomial, q: &Polynomial, spec: &InnerProductSpec) -> Result<f64> {
    spec.inner_product(p, q)
}
