//! Approximate designs, Fisher information, optimality criteria and the
//! Tchebycheff-design mass formula.

mod blue;
mod search;

pub use blue::{blue_estimate, BlueEstimate, RegressionData};
pub use search::{random_search_baseline, random_search_from, SearchConfig, SearchOutcome};

use crate::error::{Error, Result};
use crate::linalg::{Lu, SymMatrix};
use crate::tcheb::{TchebFunction, TchebPoints};
use crate::weight::WeightFn;

/// Tolerance on `Σ ρ_i = 1`.
pub const MASS_SUM_TOL: f64 = 1e-12;

/// A finitely supported probability measure on the design region.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    support: Vec<f64>,
    masses: Vec<f64>,
}

impl Design {
    /// Validates strictly increasing finite support and nonnegative masses
    /// summing to one.
    pub fn new(support: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != masses.len() {
            return Err(Error::Domain(format!(
                "design needs matching non-empty support and masses ({} vs {})",
                support.len(),
                masses.len()
            )));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("support points must be finite".into()));
        }
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("support must be strictly increasing".into()));
        }
        if masses.iter().any(|&r| !(r >= 0.0)) {
            return Err(Error::Domain("masses must be nonnegative".into()));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_SUM_TOL {
            return Err(Error::Domain(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { support, masses })
    }

    /// Sorts the points, merges coincident ones and rescales the masses to
    /// sum to one.
    pub fn from_unsorted(points: &[f64], masses: &[f64]) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> =
            points.iter().copied().zip(masses.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut merged: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, r) in pairs {
            if support.last() == Some(&x) {
                *merged.last_mut().expect("parallel vectors") += r;
            } else {
                support.push(x);
                merged.push(r);
            }
        }
        let total: f64 = merged.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Domain("masses must have a positive sum".into()));
        }
        merged.iter_mut().for_each(|r| *r /= total);
        Self::new(support, merged)
    }

    /// The one-point design `{x: 1}`.
    pub fn single_point(x: f64) -> Self {
        Self {
            support: vec![x],
            masses: vec![1.0],
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_within(&self, a: f64, b: f64) -> bool {
        self.support.iter().all(|&x| a <= x && x <= b)
    }

    /// Image under `x ↦ -x`, re-sorted.
    pub fn mirrored(&self) -> Self {
        Self {
            support: self.support.iter().rev().map(|x| -x).collect(),
            masses: self.masses.iter().rev().copied().collect(),
        }
    }
}

/// `M_{jk} = Σ_i ρ_i w(x_i) x_i^{j+k}` from raw parallel slices.
pub(crate) fn fisher_from_parts(
    points: &[f64],
    masses: &[f64],
    weights: &[f64],
    m: usize,
) -> SymMatrix {
    let mut moments = vec![0.0; 2 * m - 1];
    for ((&x, &r), &w) in points.iter().zip(masses).zip(weights) {
        let mut term = r * w;
        for slot in moments.iter_mut() {
            *slot += term;
            term *= x;
        }
    }
    SymMatrix::from_fn(m, |j, k| moments[j + k])
}

fn weights_at(w: &WeightFn, points: &[f64]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&x| w.eval(x).map_err(|source| Error::Evaluation { x, source }))
        .collect()
}

/// Fisher information matrix of `mu` for the basis `√w(x) x^k`, `k < m`.
pub fn fisher_matrix(mu: &Design, m: usize, w: &WeightFn) -> Result<SymMatrix> {
    if m == 0 {
        return Err(Error::Domain("model size must be at least 1".into()));
    }
    let weights = weights_at(w, &mu.support)?;
    Ok(fisher_from_parts(&mu.support, &mu.masses, &weights, m))
}

/// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi).
pub fn min_eigenvalue(m: &SymMatrix) -> f64 {
    m.min_eigenvalue()
}

/// `λ_min(M(mu))`.
pub fn lambda_min(mu: &Design, m: usize, w: &WeightFn) -> Result<f64> {
    Ok(fisher_matrix(mu, m, w)?.min_eigenvalue())
}

/// E-, D- and A-criterion values of a design.
#[derive(Clone, Debug, PartialEq)]
pub struct Criteria {
    /// `λ_min(M)`.
    pub e_value: f64,
    /// `det(M)^{1/m}`.
    pub d_value: f64,
    /// `tr(M^{-1}) / m`.
    pub a_value: f64,
    /// Spectrum of `M`, ascending.
    pub eigenvalues: Vec<f64>,
}

impl Criteria {
    pub fn from_matrix(fisher: &SymMatrix) -> Result<Self> {
        let eigenvalues = fisher.eigenvalues();
        let m = eigenvalues.len() as f64;
        let e_value = eigenvalues[0];
        let largest = eigenvalues[eigenvalues.len() - 1];
        if !(e_value > 1e-14 * largest.abs()) {
            return Err(Error::SingularFisher { e_value });
        }
        let log_det: f64 = eigenvalues.iter().map(|l| l.ln()).sum();
        let d_value = (log_det / m).exp();
        let a_value = eigenvalues.iter().map(|l| 1.0 / l).sum::<f64>() / m;
        Ok(Self {
            e_value,
            d_value,
            a_value,
            eigenvalues,
        })
    }

    /// `Φ_p = ((1/m) tr M^{-p})^{1/p}` for finite `p > 0`.
    pub fn phi_p(&self, p: f64) -> f64 {
        let m = self.eigenvalues.len() as f64;
        let mean = self.eigenvalues.iter().map(|l| l.powf(-p)).sum::<f64>() / m;
        mean.powf(1.0 / p)
    }
}

pub fn criteria(mu: &Design, m: usize, w: &WeightFn) -> Result<Criteria> {
    Criteria::from_matrix(&fisher_matrix(mu, m, w)?)
}

/// A Tchebycheff design together with what the mass formula produced
/// before normalization.
#[derive(Clone, Debug)]
pub struct TchebDesign {
    pub design: Design,
    /// `Σ ρ_i` straight from `F^{-1}γ / γᵀγ` (after the sign choice).
    pub mass_sum_raw: f64,
    /// `+1` if `γ` was used as given, `-1` if it was negated.
    pub gamma_sign: f64,
    /// `γᵀγ`.
    pub gamma_norm_sq: f64,
}

/// Masses `ρ = F^{-1}γ / (γᵀγ)` on the Tchebycheff points, with
/// `F_{ij} = f_i(s_j)·(-1)^j` (0-based) and `f_i(x) = x^i √w(x)`.
///
/// Whichever global sign of `γ` gives nonnegative masses is kept; the
/// masses are then rescaled to sum to one.
pub fn tcheb_design(kappa: &TchebFunction, pts: &TchebPoints) -> Result<TchebDesign> {
    let m = pts.len();
    let gamma = kappa.gamma();
    if gamma.len() != m {
        return Err(Error::Structure(format!(
            "{} Tchebycheff points for {} coefficients",
            m,
            gamma.len()
        )));
    }
    let support = pts.points();
    let roots: Vec<f64> = weights_at(kappa.weight(), support)?
        .into_iter()
        .map(f64::sqrt)
        .collect();
    let mut f = vec![0.0; m * m];
    for (j, (&s, &r)) in support.iter().zip(&roots).enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let mut power = 1.0;
        for i in 0..m {
            f[i * m + j] = power * r * sign;
            power *= s;
        }
    }
    let lu = Lu::new(f, m);
    if lu.pivot_ratio() < 1e-14 {
        return Err(Error::Structure(format!(
            "Tchebycheff point matrix is numerically singular (pivot ratio {:e})",
            lu.pivot_ratio()
        )));
    }
    let gamma_norm_sq: f64 = gamma.iter().map(|g| g * g).sum();
    let rhs: Vec<f64> = gamma.iter().map(|g| g / gamma_norm_sq).collect();
    let raw = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Structure("Tchebycheff point matrix is singular".into()))?;

    const NEG_TOL: f64 = -1e-10;
    let gamma_sign = if raw.iter().all(|&r| r >= NEG_TOL) {
        1.0
    } else if raw.iter().all(|&r| -r >= NEG_TOL) {
        -1.0
    } else {
        return Err(Error::Infeasible(format!(
            "neither sign of γ gives nonnegative masses: {raw:?}"
        )));
    };
    let masses: Vec<f64> = raw
        .iter()
        .map(|&r| {
            let r = r * gamma_sign;
            if r.abs() < 1e-14 {
                0.0
            } else {
                r.max(0.0)
            }
        })
        .collect();
    let mass_sum_raw: f64 = masses.iter().sum();
    if !(mass_sum_raw > 0.0) {
        return Err(Error::Infeasible("masses vanish".into()));
    }
    let masses = masses.iter().map(|r| r / mass_sum_raw).collect();
    Ok(TchebDesign {
        design: Design::new(support.to_vec(), masses)?,
        mass_sum_raw,
        gamma_sign,
        gamma_norm_sq,
    })
}

/// `λ_min(M(mu)) / λ_min(M(reference))`.
pub fn e_efficiency(mu: &Design, reference: &Design, m: usize, w: &WeightFn) -> Result<f64> {
    let reference_value = lambda_min(reference, m, w)?;
    if !(reference_value > 0.0) {
        return Err(Error::Domain(format!(
            "reference design has λ_min = {reference_value:e}"
        )));
    }
    Ok(lambda_min(mu, m, w)? / reference_value)
}
