//! Tchebycheff functions `κ(x) = (Σ γ_k x^k) √w(x)` for the basis
//! `f_k(x) = x^k √w(x)`, and their equioscillation points.
//!
//! Exact functions come from Jacobi polynomials for the weights
//! `(1-x)^α (1+x)^β`, `α, β ∈ {0, 1}`; approximate ones from the last monic
//! orthogonal polynomial under `η(x) = w(x)/√((x-a)(b-x))`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gram_schmidt::orthogonalize;
use crate::linalg;
use crate::poly::{jacobi, Polynomial};
use crate::quadrature::{InnerProductSpec, DEFAULT_NODE_COUNT};
use crate::weight::{positivity_check, Positivity, WeightFn, DEFAULT_POSITIVITY_GRID};

pub const DEFAULT_EXTREMUM_GRID: usize = 20_001;

/// Offset from an endpoint used to read the inward trend of `κ`.
const ENDPOINT_OFFSET: f64 = 1e-9;
const BISECTION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TchebKind {
    Exact,
    Approximate,
}

impl fmt::Display for TchebKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TchebKind::Exact => "exact",
            TchebKind::Approximate => "approximate",
        })
    }
}

/// Located extrema `s_1 < … < s_m` and the values `κ(s_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TchebPoints {
    points: Vec<f64>,
    values: Vec<f64>,
}

impl TchebPoints {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `max |κ(s_i)| - min |κ(s_i)|`; zero for an exact Tchebycheff function.
    pub fn equioscillation_gap(&self) -> f64 {
        let min = self
            .values
            .iter()
            .map(|v| v.abs())
            .fold(f64::INFINITY, f64::min);
        self.max_abs_value() - min
    }
}

/// Knobs for building a Tchebycheff function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TchebOptions {
    /// Chebyshev–Gauss nodes for the inner product.
    pub nodes: usize,
    /// Uniform grid size for the extremum scan.
    pub grid: usize,
    /// Sample count for the positivity precondition.
    pub positivity_grid: usize,
}

impl Default for TchebOptions {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODE_COUNT,
            grid: DEFAULT_EXTREMUM_GRID,
            positivity_grid: DEFAULT_POSITIVITY_GRID,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TchebFunction {
    poly: Polynomial,
    weight: WeightFn,
    interval: (f64, f64),
    kind: TchebKind,
    points: TchebPoints,
    quadrature_delta: Option<f64>,
}

impl TchebFunction {
    /// Locates the `m` extrema of `poly · √w` and rescales so that the
    /// largest `|κ(s_i)|` is 1.
    fn normalized(
        poly: Polynomial,
        weight: WeightFn,
        interval: (f64, f64),
        kind: TchebKind,
        m: usize,
        grid: usize,
    ) -> Result<Self> {
        if poly.degree() != Some(m - 1) {
            return Err(Error::Structure(format!(
                "polynomial part has degree {:?}, expected {}",
                poly.degree(),
                m - 1
            )));
        }
        let raw = KappaView {
            poly: &poly,
            weight: &weight,
            interval,
        };
        let located = locate_extrema(&raw, m, grid)?;
        let scale = 1.0 / located.max_abs_value();
        let poly = poly.scale(scale);
        let points = TchebPoints {
            values: located.values.iter().map(|v| v * scale).collect(),
            points: located.points,
        };
        Ok(Self {
            poly,
            weight,
            interval,
            kind,
            points,
            quadrature_delta: None,
        })
    }

    /// Coefficients `γ_0..γ_{m-1}` of the polynomial part.
    pub fn gamma(&self) -> Vec<f64> {
        let m = self.m();
        (0..m).map(|k| self.poly.coeff(k)).collect()
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn weight(&self) -> &WeightFn {
        &self.weight
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn kind(&self) -> TchebKind {
        self.kind
    }

    pub fn points(&self) -> &TchebPoints {
        &self.points
    }

    /// Doubling-check delta of the quadrature used (approximate kind only).
    pub fn quadrature_delta(&self) -> Option<f64> {
        self.quadrature_delta
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.view().eval(x)
    }

    /// The same function with `γ` negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.poly = -&self.poly;
        out.points.values.iter_mut().for_each(|v| *v = -*v);
        out
    }

    fn view(&self) -> KappaView<'_> {
        KappaView {
            poly: &self.poly,
            weight: &self.weight,
            interval: self.interval,
        }
    }
}

#[derive(Clone, Copy)]
struct KappaView<'a> {
    poly: &'a Polynomial,
    weight: &'a WeightFn,
    interval: (f64, f64),
}

impl KappaView<'_> {
    fn eval(&self, x: f64) -> Result<f64> {
        let w = self
            .weight
            .eval(x)
            .map_err(|source| Error::Evaluation { x, source })?;
        Ok(self.poly.eval(x) * w.sqrt())
    }

    /// `κ'(x) = p' √w + p w' / (2 √w)`, with `w'` by forward differentiation.
    fn derivative(&self, x: f64) -> Result<f64> {
        let (w, dw) = self
            .weight
            .eval_dual(x)
            .map_err(|source| Error::Evaluation { x, source })?;
        let (p, dp) = self.poly.eval_with_derivative(x);
        let root = w.sqrt();
        Ok(dp * root + p * dw / (2.0 * root))
    }
}

/// Locates the Tchebycheff points of `kappa` afresh with a `grid`-point scan.
pub fn find_tcheb_points(kappa: &TchebFunction, m: usize, grid: usize) -> Result<TchebPoints> {
    locate_extrema(&kappa.view(), m, grid)
}

fn locate_extrema(kappa: &KappaView<'_>, m: usize, grid: usize) -> Result<TchebPoints> {
    let (a, b) = kappa.interval;
    if grid < 3 {
        return Err(Error::Structure(format!(
            "extremum grid of {grid} points cannot bracket any interior extremum"
        )));
    }
    let step = (b - a) / (grid - 1) as f64;
    let mut interior = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut pending_zero: Option<f64> = None;
    for i in 1..grid - 1 {
        let x = a + i as f64 * step;
        let d = kappa.derivative(x)?;
        if d == 0.0 {
            pending_zero.get_or_insert(x);
            continue;
        }
        if !d.is_finite() {
            return Err(Error::Structure(format!("κ' is not finite at x = {x}")));
        }
        if let Some((px, pd)) = prev {
            if pd.signum() != d.signum() {
                let root = match pending_zero {
                    Some(z) => z,
                    None => bisect(kappa, px, x, pd)?,
                };
                interior.push(root);
            }
        }
        pending_zero = None;
        prev = Some((x, d));
    }

    let mut points = Vec::with_capacity(interior.len() + 2);
    let mut values = Vec::with_capacity(interior.len() + 2);
    let interior_values = interior
        .iter()
        .map(|&x| kappa.eval(x))
        .collect::<Result<Vec<_>>>()?;
    let peak = interior_values.iter().map(|v| v.abs()).fold(0.0, f64::max);

    if let Some(v) = endpoint_value(kappa, a, a + ENDPOINT_OFFSET, interior_values.first(), peak) {
        points.push(a);
        values.push(v);
    }
    points.extend(&interior);
    values.extend(&interior_values);
    if let Some(v) = endpoint_value(kappa, b, b - ENDPOINT_OFFSET, interior_values.last(), peak) {
        points.push(b);
        values.push(v);
    }

    if points.len() != m {
        return Err(Error::Structure(format!(
            "found {} alternating extrema, expected {m}",
            points.len()
        )));
    }
    for (i, pair) in values.windows(2).enumerate() {
        if !(pair[0] * pair[1] < 0.0) {
            return Err(Error::Structure(format!(
                "κ does not alternate between s_{} = {} and s_{} = {}",
                i + 1,
                points[i],
                i + 2,
                points[i + 1]
            )));
        }
    }
    Ok(TchebPoints { points, values })
}

/// `κ(end)` when the endpoint extends the alternation: finite, nonzero,
/// not smaller in magnitude than `κ` just inside, and opposite in sign to
/// the neighbouring interior extremum.
fn endpoint_value(
    kappa: &KappaView<'_>,
    end: f64,
    inside: f64,
    neighbour: Option<&f64>,
    peak: f64,
) -> Option<f64> {
    let v = kappa.eval(end).ok()?;
    let v_in = kappa.eval(inside).ok()?;
    if !v.is_finite() || v == 0.0 || v.abs() <= 1e-14 * peak {
        return None;
    }
    if v.abs() < v_in.abs() || v * v_in < 0.0 {
        return None;
    }
    match neighbour {
        Some(&n) if n * v >= 0.0 => None,
        _ => Some(v),
    }
}

fn bisect(kappa: &KappaView<'_>, mut lo: f64, mut hi: f64, d_lo: f64) -> Result<f64> {
    let sign_lo = d_lo.signum();
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = kappa.derivative(mid)?;
        if d == 0.0 {
            return Ok(mid);
        }
        if d.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Text of the Dette-family weight `(1-x)^α (1+x)^β`.
pub fn dette_weight_source(alpha: u8, beta: u8) -> &'static str {
    match (alpha, beta) {
        (0, 0) => "1",
        (1, 0) => "1-x",
        (0, 1) => "1+x",
        _ => "(1-x)*(1+x)",
    }
}

/// Exact Tchebycheff function `√w · J_{m-1}^{(α-1/2, β-1/2)}` for
/// `w = (1-x)^α (1+x)^β` on `[-1, 1]`.
pub fn exact_tcheb_function(m: usize, alpha: u8, beta: u8) -> Result<TchebFunction> {
    exact_tcheb_function_with_grid(m, alpha, beta, DEFAULT_EXTREMUM_GRID)
}

pub fn exact_tcheb_function_with_grid(
    m: usize,
    alpha: u8,
    beta: u8,
    grid: usize,
) -> Result<TchebFunction> {
    if alpha > 1 || beta > 1 {
        return Err(Error::Domain(format!(
            "Jacobi exponents must be 0 or 1, got α = {alpha}, β = {beta}"
        )));
    }
    if m < 2 {
        return Err(Error::Domain(format!("m must be at least 2, got {m}")));
    }
    let poly = jacobi(m - 1, alpha as f64 - 0.5, beta as f64 - 0.5)?;
    let weight = WeightFn::parse(dette_weight_source(alpha, beta)).expect("built-in weight parses");
    TchebFunction::normalized(poly, weight, (-1.0, 1.0), TchebKind::Exact, m, grid)
}

/// Approximate Tchebycheff function `v_m √w`, with `v_m` the `m`-th monic
/// orthogonal polynomial for `η(x) = w(x)/√((x-a)(b-x))`.
pub fn approx_tcheb_function(
    m: usize,
    weight: &WeightFn,
    interval: (f64, f64),
    options: TchebOptions,
) -> Result<TchebFunction> {
    if m < 2 {
        return Err(Error::Domain(format!("m must be at least 2, got {m}")));
    }
    let (a, b) = interval;
    match positivity_check(weight, a, b, options.positivity_grid) {
        Positivity::Pass => {}
        failure => return Err(Error::Domain(failure.to_string())),
    }
    let spec = InnerProductSpec::new(a, b, weight.clone(), options.nodes)?;
    let seq = orthogonalize(m, &spec)?;
    let vm = seq.last().clone();
    let mut kappa = TchebFunction::normalized(
        vm,
        weight.clone(),
        interval,
        TchebKind::Approximate,
        m,
        options.grid,
    )?;
    kappa.quadrature_delta = Some(spec.convergence_delta());
    Ok(kappa)
}

/// Sign pattern of the generalized Vandermonde determinant over sampled
/// tuples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignVerdict {
    AllPositive,
    AllNegative,
    AllNonnegative,
    AllNonpositive,
    Mixed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignReport {
    pub verdict: SignVerdict,
    pub min_det: f64,
    pub max_det: f64,
    pub samples: usize,
}

/// Samples strictly increasing tuples `t_1 < … < t_n` in `[a, b]` and
/// classifies the sign of `det(u_i(t_j))`.
///
/// A quarter of the draws pin `t_1` to `a` and, independently, a quarter
/// pin `t_n` to `b`, so weights that vanish at an endpoint are exercised.
pub fn weak_tcheb_check(
    funcs: &[&dyn Fn(f64) -> f64],
    samples: usize,
    interval: (f64, f64),
    seed: u64,
) -> SignReport {
    let n = funcs.len();
    let (a, b) = interval;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_det = f64::INFINITY;
    let mut max_det = f64::NEG_INFINITY;
    let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
    let mut t = vec![0.0; n];
    for _ in 0..samples {
        loop {
            for ti in t.iter_mut() {
                *ti = rng.random_range(a..b);
            }
            t.sort_by(f64::total_cmp);
            if rng.random_bool(0.25) {
                t[0] = a;
            }
            if rng.random_bool(0.25) {
                t[n - 1] = b;
            }
            if t.windows(2).all(|w| w[0] < w[1]) {
                break;
            }
        }
        let mut matrix = Vec::with_capacity(n * n);
        for f in funcs {
            matrix.extend(t.iter().map(|&tj| f(tj)));
        }
        let d = linalg::det(matrix, n);
        min_det = min_det.min(d);
        max_det = max_det.max(d);
        match d.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => pos += 1,
            Some(std::cmp::Ordering::Less) => neg += 1,
            _ => zero += 1,
        }
    }
    let verdict = match (pos > 0, neg > 0, zero > 0) {
        (true, true, _) => SignVerdict::Mixed,
        (true, false, false) => SignVerdict::AllPositive,
        (false, true, false) => SignVerdict::AllNegative,
        (_, false, true) => SignVerdict::AllNonnegative,
        (false, true, true) => SignVerdict::AllNonpositive,
        (false, false, false) => SignVerdict::Mixed,
    };
    SignReport {
        verdict,
        min_det,
        max_det,
        samples,
    }
}
