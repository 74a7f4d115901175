use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::weight::WeightFn;

/// Observations `y_i` taken at conditions `x_i` for the polynomial model of
/// size `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionData {
    pub conditions: Vec<f64>,
    pub responses: Vec<f64>,
    pub m: usize,
    /// Noise variance; only scales the reported covariance.
    pub sigma2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlueEstimate {
    pub theta_hat: Vec<f64>,
    /// `(XᵀX)^{-1}`, row-major `m × m`.
    pub covariance_factor: Vec<f64>,
}

impl BlueEstimate {
    /// `σ² (XᵀX)^{-1}`.
    pub fn covariance(&self, sigma2: f64) -> Vec<f64> {
        self.covariance_factor.iter().map(|c| c * sigma2).collect()
    }
}

/// Least-squares estimate from the normal equations. With a weight, each
/// row of `X` and each response is scaled by `√w(x_i)`.
pub fn blue_estimate(data: &RegressionData, w: Option<&WeightFn>) -> Result<BlueEstimate> {
    let (n, m) = (data.conditions.len(), data.m);
    if m == 0 || data.responses.len() != n {
        return Err(Error::Domain(format!(
            "need m ≥ 1 and one response per condition (m = {m}, {n} conditions, {} responses)",
            data.responses.len()
        )));
    }
    if n < m {
        return Err(Error::Domain(format!(
            "{n} observations for {m} parameters"
        )));
    }
    let mut xtx = vec![0.0; m * m];
    let mut xty = vec![0.0; m];
    for (&x, &y) in data.conditions.iter().zip(&data.responses) {
        let scale = match w {
            Some(w) => w
                .eval(x)
                .map_err(|source| Error::Evaluation { x, source })?
                .sqrt(),
            None => 1.0,
        };
        let row: Vec<f64> = (0..m).map(|k| scale * x.powi(k as i32)).collect();
        for j in 0..m {
            xty[j] += row[j] * scale * y;
            for k in 0..m {
                xtx[j * m + k] += row[j] * row[k];
            }
        }
    }
    let lu = Lu::new(xtx, m);
    if lu.pivot_ratio() < 1e-12 {
        return Err(Error::Singular(format!(
            "XᵀX is rank deficient (pivot ratio {:e})",
            lu.pivot_ratio()
        )));
    }
    let singular = || Error::Singular("XᵀX is singular".into());
    let theta_hat = lu.solve(&xty).ok_or_else(singular)?;
    let mut covariance_factor = vec![0.0; m * m];
    for k in 0..m {
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        let col = lu.solve(&e).ok_or_else(singular)?;
        for (j, v) in col.into_iter().enumerate() {
            covariance_factor[j * m + k] = v;
        }
    }
    Ok(BlueEstimate {
        theta_hat,
        covariance_factor,
    })
}
