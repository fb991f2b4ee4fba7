//! Simplex and tangent-space geometry.
//!
//! Compositions live on the closed simplex; the open simplex carries the
//! Aitchison vector-space structure (perturbation and powering) and is mapped
//! isometrically onto the zero-sum tangent plane by the clr transform.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};

/// Tolerance for simplex (sum to one) and tangent-plane (sum to zero) membership.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A point of the closed simplex: nonnegative parts summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Composition(Vec<f64>);

impl Composition {
    /// Validates `parts` without renormalizing.
    pub fn new(parts: Vec<f64>) -> Result<Self> {
        check_min_dim(parts.len())?;
        check_nonnegative(&parts)?;
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotOnSimplex(format!(
                "parts sum to {sum}, off by {:e}",
                sum - 1.0
            )));
        }
        Ok(Self(parts))
    }

    /// Normalizes a nonnegative vector to unit sum.
    pub fn closure(x: &[f64]) -> Result<Self> {
        check_min_dim(x.len())?;
        check_nonnegative(x)?;
        let sum: f64 = x.iter().sum();
        if sum <= 0.0 {
            return Err(Error::DegenerateInput("all parts are zero".into()));
        }
        if !sum.is_finite() {
            return Err(Error::NotOnSimplex("sum of parts overflows".into()));
        }
        Ok(Self(x.iter().map(|&v| v / sum).collect()))
    }

    /// The maximum-entropy composition with `dim` equal parts.
    pub fn uniform(dim: usize) -> Result<Self> {
        check_min_dim(dim)?;
        Ok(Self(vec![1.0 / dim as f64; dim]))
    }

    /// Wraps parts known to be nonnegative and closed.
    pub(crate) fn from_closed(parts: Vec<f64>) -> Self {
        debug_assert!(parts.len() >= 2);
        Self(parts)
    }

    pub fn parts(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_parts(self) -> Vec<f64> {
        self.0
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0)
    }

    /// Fails with [`Error::BoundaryPoint`] naming the first zero part.
    pub fn check_interior(&self) -> Result<()> {
        match self.0.iter().position(|&v| v <= 0.0) {
            Some(index) => Err(Error::BoundaryPoint { index }),
            None => Ok(()),
        }
    }

    /// Group inverse under perturbation, `closure(1 / q_i)`.
    pub fn inverse(&self) -> Result<Self> {
        self.check_interior()?;
        let inv: Vec<f64> = self.0.iter().map(|&v| 1.0 / v).collect();
        Self::closure(&inv)
    }
}

impl TryFrom<Vec<f64>> for Composition {
    type Error = Error;

    fn try_from(parts: Vec<f64>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Composition> for Vec<f64> {
    fn from(c: Composition) -> Self {
        c.0
    }
}

/// Raw nonnegative integer counts for the parts of one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountVector(Vec<u64>);

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        check_min_dim(counts.len())?;
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }

    /// Errors unless the total is at least one, as every estimator needs.
    pub fn check_nonempty(&self) -> Result<()> {
        if self.total() == 0 {
            Err(Error::DegenerateInput("counts sum to zero".into()))
        } else {
            Ok(())
        }
    }
}

/// A vector of the clr plane (components sum to zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector(Vec<f64>);

impl TangentVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_min_dim(coords.len())?;
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotInTangentPlane { sum: f64::NAN });
        }
        let sum: f64 = coords.iter().sum();
        if sum.abs() > SUM_TOLERANCE {
            return Err(Error::NotInTangentPlane { sum });
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

fn check_min_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::DegenerateInput(format!(
            "need at least 2 parts, got {dim}"
        )))
    } else {
        Ok(())
    }
}

fn check_nonnegative(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(i) => Err(Error::NotOnSimplex(format!(
            "part {i} = {} is not a finite nonnegative number",
            x[i]
        ))),
        None => Ok(()),
    }
}

fn check_pair(p: &Composition, q: &Composition) -> Result<()> {
    check_dims(p.dim(), q.dim())?;
    p.check_interior()?;
    q.check_interior()
}

pub fn closure(x: &[f64]) -> Result<Composition> {
    Composition::closure(x)
}

/// Centered log-ratio transform, `log(q_j / g(q))` with `g` the geometric mean.
pub fn clr(q: &Composition) -> Result<TangentVector> {
    q.check_interior()?;
    Ok(TangentVector(clr_unchecked(q.parts())))
}

pub(crate) fn clr_unchecked(parts: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = parts.iter().map(|v| v.ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    logs.into_iter().map(|l| l - mean).collect()
}

/// Inverse clr: `closure(exp(v))`, shifted by the max coordinate for stability.
pub fn clr_inv(v: &TangentVector) -> Composition {
    Composition::from_closed(softmax(v.coords()))
}

pub(crate) fn softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = x.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Aitchison addition: `closure(p_i * q_i)`.
pub fn perturb(p: &Composition, q: &Composition) -> Result<Composition> {
    check_pair(p, q)?;
    let prod: Vec<f64> = p
        .parts()
        .iter()
        .zip(q.parts())
        .map(|(a, b)| a * b)
        .collect();
    Composition::closure(&prod)
}

/// Aitchison scalar multiplication: `closure(q_i^a)`.
pub fn power(a: f64, q: &Composition) -> Result<Composition> {
    power_transform_fbeta(q, a)
}

/// The power transform `f_beta(q)_i = q_i^beta / sum_k q_k^beta`.
///
/// Evaluated in log space so that large `|beta|` cannot overflow.
pub fn power_transform_fbeta(q: &Composition, beta: f64) -> Result<Composition> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must be finite",
        });
    }
    q.check_interior()?;
    if beta == 1.0 {
        return Ok(q.clone());
    }
    let scaled: Vec<f64> = q.parts().iter().map(|v| beta * v.ln()).collect();
    Ok(Composition::from_closed(softmax(&scaled)))
}

/// Weighted geometric mean of a target and a composition,
/// `tau_i^(1-beta) q_i^beta / sum_k tau_k^(1-beta) q_k^beta`.
pub fn generalized_power_transform(
    q: &Composition,
    tau: &Composition,
    beta: f64,
) -> Result<Composition> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must be finite",
        });
    }
    check_pair(q, tau)?;
    if beta == 1.0 {
        return Ok(q.clone());
    }
    if beta == 0.0 {
        return Ok(tau.clone());
    }
    let logs: Vec<f64> = q
        .parts()
        .iter()
        .zip(tau.parts())
        .map(|(qi, ti)| beta * qi.ln() + (1.0 - beta) * ti.ln())
        .collect();
    Ok(Composition::from_closed(softmax(&logs)))
}

/// [`generalized_power_transform`] restricted to the nonzero parts of `q`.
/// The target is restricted to the same parts and re-closed; zeros of `q`
/// stay exact zeros. A vertex is returned unchanged.
pub fn generalized_power_transform_on_support(
    q: &Composition,
    tau: &Composition,
    beta: f64,
) -> Result<Composition> {
    check_dims(q.dim(), tau.dim())?;
    let support: Vec<usize> = (0..q.dim()).filter(|&i| q.parts()[i] > 0.0).collect();
    if support.len() == q.dim() {
        return generalized_power_transform(q, tau, beta);
    }
    if support.len() == 1 {
        return Ok(q.clone());
    }
    if let Some(&i) = support.iter().find(|&&i| tau.parts()[i] <= 0.0) {
        return Err(Error::BoundaryPoint { index: i });
    }
    let restrict = |c: &Composition| {
        Composition::closure(&support.iter().map(|&i| c.parts()[i]).collect::<Vec<_>>())
    };
    let reduced = generalized_power_transform(&restrict(q)?, &restrict(tau)?, beta)?;
    let mut parts = vec![0.0; q.dim()];
    for (&i, &v) in support.iter().zip(reduced.parts()) {
        parts[i] = v;
    }
    Ok(Composition::from_closed(parts))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be finite",
        })
    }
}

/// Point `lambda * tau + (1 - lambda) * q` on the mixture geodesic.
/// `lambda` is clamped to `[0, 1]`.
pub fn m_geodesic_point(tau: &Composition, q: &Composition, lambda: f64) -> Result<Composition> {
    check_lambda(lambda)?;
    m_geodesic_point_unclamped(tau, q, lambda.clamp(0.0, 1.0))
}

/// As [`m_geodesic_point`] but extrapolates for `lambda` outside `[0, 1]`;
/// fails if the extrapolated point leaves the simplex.
pub fn m_geodesic_point_unclamped(
    tau: &Composition,
    q: &Composition,
    lambda: f64,
) -> Result<Composition> {
    check_lambda(lambda)?;
    check_dims(tau.dim(), q.dim())?;
    let parts: Vec<f64> = tau
        .parts()
        .iter()
        .zip(q.parts())
        .map(|(t, v)| lambda * t + (1.0 - lambda) * v)
        .collect();
    if (0.0..=1.0).contains(&lambda) {
        // convex combination: stays on the simplex up to rounding
        Ok(Composition::from_closed(parts))
    } else {
        Composition::new(parts)
    }
}

/// Point `lambda (.) tau (+) (1 - lambda) (.) q` on the exponential geodesic.
/// `lambda` is clamped to `[0, 1]`.
pub fn e_geodesic_point(tau: &Composition, q: &Composition, lambda: f64) -> Result<Composition> {
    check_lambda(lambda)?;
    e_geodesic_point_unclamped(tau, q, lambda.clamp(0.0, 1.0))
}

pub fn e_geodesic_point_unclamped(
    tau: &Composition,
    q: &Composition,
    lambda: f64,
) -> Result<Composition> {
    check_lambda(lambda)?;
    generalized_power_transform(q, tau, 1.0 - lambda)
}

/// Squared Aitchison distance, computed as the squared Euclidean distance of
/// the clr images.
pub fn aitchison_distance_sq(p: &Composition, q: &Composition) -> Result<f64> {
    check_pair(p, q)?;
    let cp = clr_unchecked(p.parts());
    let cq = clr_unchecked(q.parts());
    Ok(cp.iter().zip(&cq).map(|(a, b)| (a - b).powi(2)).sum())
}

/// Squared Aitchison distance in its pairwise log-ratio form,
/// `(1/D) sum_{i<j} (log(p_i/p_j) - log(q_i/q_j))^2`.
pub fn aitchison_distance_sq_pairwise(p: &Composition, q: &Composition) -> Result<f64> {
    check_pair(p, q)?;
    let d = p.dim();
    let lp: Vec<f64> = p.parts().iter().map(|v| v.ln()).collect();
    let lq: Vec<f64> = q.parts().iter().map(|v| v.ln()).collect();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..i {
            let diff = (lp[i] - lp[j]) - (lq[i] - lq[j]);
            acc += diff * diff;
        }
    }
    Ok(acc / d as f64)
}

/// `sum_j w_j (p_j - q_j)^2` with strictly positive weights.
pub fn weighted_euclidean_sq(p: &Composition, q: &Composition, weights: &[f64]) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    check_dims(p.dim(), weights.len())?;
    if let Some(index) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidWeight {
            index,
            value: weights[index],
        });
    }
    Ok(p.parts()
        .iter()
        .zip(q.parts())
        .zip(weights)
        .map(|((a, b), w)| w * (a - b).powi(2))
        .sum())
}

/// Distance between the scaled chi-square-type distance of power-transformed
/// compositions (uniform weights `D^2`) and the squared Aitchison distance.
/// Tends to zero as `beta -> 0`.
pub fn boxcox_limit_residual(p: &Composition, q: &Composition, beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must be positive",
        });
    }
    check_pair(p, q)?;
    let d = p.dim() as f64;
    let weights = vec![d * d; p.dim()];
    let fp = power_transform_fbeta(p, beta)?;
    let fq = power_transform_fbeta(q, beta)?;
    let scaled = weighted_euclidean_sq(&fp, &fq, &weights)? / (beta * beta);
    Ok((scaled - aitchison_distance_sq(p, q)?).abs())
}
