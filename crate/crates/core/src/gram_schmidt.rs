//! Monic orthogonal polynomials for an [`InnerProductSpec`], built from the
//! monomials `1, x, x², …` in two independent ways: the projection
//! recurrence and the bordered Gram-determinant ratio.

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Polynomial;
use crate::quadrature::InnerProductSpec;

/// Relative floor on `⟨v_l, v_l⟩ / ⟨u_l, u_l⟩` below which the weight is
/// treated as vanishing.
const DEGENERACY_RATIO: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct OrthogonalSequence {
    polys: Vec<Polynomial>,
    gram_diag: Vec<f64>,
    spec: InnerProductSpec,
}

impl OrthogonalSequence {
    /// `v_1, …, v_n` (index 0 holds `v_1 = 1`).
    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// `⟨v_k, v_k⟩` for each member.
    pub fn gram_diag(&self) -> &[f64] {
        &self.gram_diag
    }

    pub fn spec(&self) -> &InnerProductSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// The last (highest-degree) member.
    pub fn last(&self) -> &Polynomial {
        self.polys.last().expect("sequence is never empty")
    }

    pub fn into_polys(self) -> Vec<Polynomial> {
        self.polys
    }

    /// Runs one more projection pass of `p` against the first `upto` members.
    pub fn project_out(&self, p: &Polynomial, upto: usize) -> Result<Polynomial> {
        let mut v = p.clone();
        for (vl, gl) in self.polys.iter().zip(&self.gram_diag).take(upto) {
            let c = self.spec.inner_product(&v, vl)? / gl;
            v.sub_scaled(c, vl);
        }
        Ok(v)
    }
}

/// Modified Gram–Schmidt on `x^0, …, x^{n-1}` with one full
/// re-orthogonalization pass.
pub fn orthogonalize(n: usize, spec: &InnerProductSpec) -> Result<OrthogonalSequence> {
    if n == 0 {
        return Err(Error::Domain("need at least one polynomial".into()));
    }
    let mut polys: Vec<Polynomial> = Vec::with_capacity(n);
    let mut gram_diag = Vec::with_capacity(n);
    for k in 0..n {
        let u = Polynomial::monomial(k);
        let mut v = u.clone();
        for _pass in 0..2 {
            for (vl, gl) in polys.iter().zip(&gram_diag) {
                let c = spec.inner_product(&v, vl)? / gl;
                v.sub_scaled(c, vl);
            }
        }
        let norm = spec.inner_product(&v, &v)?;
        let reference = spec.inner_product(&u, &u)?;
        if !(norm >= DEGENERACY_RATIO * reference) || norm <= 0.0 {
            return Err(Error::Degenerate(format!(
                "⟨v_{0}, v_{0}⟩ = {norm:e} against ⟨x^{k}, x^{k}⟩ = {reference:e}",
                k + 1
            )));
        }
        polys.push(v);
        gram_diag.push(norm);
    }
    Ok(OrthogonalSequence {
        polys,
        gram_diag,
        spec: spec.clone(),
    })
}

/// `v_k` as the ratio of the bordered Gram determinant (last row holding the
/// monomials) to the `(k-1) × (k-1)` Gram determinant, expanded along the
/// last row with each cofactor computed by pivoted LU.
pub fn orthogonalize_det(k: usize, spec: &InnerProductSpec) -> Result<Polynomial> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if k == 1 {
        return Ok(Polynomial::constant(1.0));
    }
    let rows = k - 1;
    let mut gram = vec![0.0; rows * k];
    for i in 0..rows {
        for j in 0..k {
            gram[i * k + j] =
                spec.inner_product(&Polynomial::monomial(i), &Polynomial::monomial(j))?;
        }
    }
    let minor = |skip: usize| -> f64 {
        let mut m = Vec::with_capacity(rows * rows);
        for i in 0..rows {
            for j in (0..k).filter(|&j| j != skip) {
                m.push(gram[i * k + j]);
            }
        }
        linalg::det(m, rows)
    };
    let denominator = minor(k - 1);
    if !(denominator.abs() >= 1e-300) {
        return Err(Error::Degenerate(format!(
            "Gram determinant of order {rows} is {denominator:e}"
        )));
    }
    let coeffs = (0..k)
        .map(|j| {
            let sign = if (rows + j).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sign * minor(j) / denominator
        })
        .collect();
    Ok(Polynomial::new(coeffs))
}
