//! Exponential-family view of the categorical / multinomial model.
//!
//! Natural coordinates `theta_j = log(q_j / q_D)` and expectation coordinates
//! `eta_j = q_j` (for `j < D`) are Legendre-dual through the free energy
//! `psi` and the negative entropy `phi`. All densities are returned in log
//! space; the base measure on `theta` is the constant 1.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{check_dims, Error, Result};
use crate::simplex::{softmax, Composition, CountVector};

/// Natural (exponential) coordinates of an interior composition, length `D - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaCoords(Vec<f64>);

impl ThetaCoords {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateInput(
                "theta needs at least one coordinate".into(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: values[i],
                reason: "coordinates must be finite",
            });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Number of parts `D` of the underlying composition.
    pub fn parts_dim(&self) -> usize {
        self.0.len() + 1
    }
}

/// Expectation coordinates: the first `D - 1` parts of a composition.
///
/// Construction accepts the closed simplex; [`phi`] requires the interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCoords(Vec<f64>);

impl EtaCoords {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateInput(
                "eta needs at least one coordinate".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::NotOnSimplex(
                "eta coordinates must be nonnegative".into(),
            ));
        }
        let sum: f64 = values.iter().sum();
        if sum > 1.0 + crate::simplex::SUM_TOLERANCE {
            return Err(Error::NotOnSimplex(format!(
                "eta coordinates sum to {sum} > 1"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Implied last part `1 - sum(eta)`.
    pub fn remainder(&self) -> f64 {
        (1.0 - self.0.iter().sum::<f64>()).max(0.0)
    }
}

/// Concentration parameters of a Dirichlet prior; all strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletParams(Vec<f64>);

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "Dirichlet needs at least 2 parameters, got {}",
                alpha.len()
            )));
        }
        if let Some(i) = alpha.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha[i],
                reason: "concentrations must be positive",
            });
        }
        Ok(Self(alpha))
    }

    /// `alpha_k = a0` for all `dim` parts.
    pub fn symmetric(dim: usize, a0: f64) -> Result<Self> {
        Self::new(vec![a0; dim])
    }

    pub fn alpha(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Posterior parameters `n + alpha`.
    pub fn updated(&self, n: &CountVector) -> Result<Self> {
        check_dims(self.dim(), n.dim())?;
        Ok(Self(
            self.0
                .iter()
                .zip(n.counts())
                .map(|(a, &c)| a + c as f64)
                .collect(),
        ))
    }
}

pub fn theta_of(q: &Composition) -> Result<ThetaCoords> {
    q.check_interior()?;
    let parts = q.parts();
    let last = parts[parts.len() - 1].ln();
    Ok(ThetaCoords(
        parts[..parts.len() - 1]
            .iter()
            .map(|v| v.ln() - last)
            .collect(),
    ))
}

pub fn eta_of(q: &Composition) -> EtaCoords {
    let parts = q.parts();
    EtaCoords(parts[..parts.len() - 1].to_vec())
}

fn logits(theta: &ThetaCoords) -> Vec<f64> {
    let mut l = theta.0.clone();
    l.push(0.0);
    l
}

/// Inverse of [`theta_of`]; a softmax over `(theta, 0)` that cannot overflow.
pub fn q_of_theta(theta: &ThetaCoords) -> Composition {
    Composition::from_closed(softmax(&logits(theta)))
}

/// Free energy `log(1 + sum_k exp(theta_k))`, evaluated with a max shift.
pub fn psi(theta: &ThetaCoords) -> f64 {
    log_sum_exp(&logits(theta))
}

pub(crate) fn log_sum_exp(x: &[f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + x.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Negative Shannon entropy in expectation coordinates,
/// `sum_k eta_k log eta_k + (1 - sum eta) log(1 - sum eta)`.
pub fn phi(eta: &EtaCoords) -> Result<f64> {
    if let Some(index) = eta.0.iter().position(|&v| v <= 0.0) {
        return Err(Error::BoundaryPoint { index });
    }
    let rest = 1.0 - eta.0.iter().sum::<f64>();
    if rest <= 0.0 {
        return Err(Error::BoundaryPoint { index: eta.0.len() });
    }
    Ok(eta.0.iter().map(|v| v * v.ln()).sum::<f64>() + rest * rest.ln())
}

/// `KL(p || q) = sum_j p_j log(p_j / q_j)` with `0 log 0 = 0`.
pub fn kl_divergence(p: &Composition, q: &Composition) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    let mut acc = 0.0;
    for (index, (&pj, &qj)) in p.parts().iter().zip(q.parts()).enumerate() {
        if pj == 0.0 {
            continue;
        }
        if qj == 0.0 {
            return Err(Error::InfiniteDivergence { index });
        }
        acc += pj * (pj / qj).ln();
    }
    Ok(acc.max(0.0))
}

/// `|phi(eta_p) + psi(theta_q) - theta_q . eta_p - KL(p || q)|`, zero up to rounding.
pub fn legendre_identity_residual(p: &Composition, q: &Composition) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    p.check_interior()?;
    let theta_q = theta_of(q)?;
    let eta_p = eta_of(p);
    let dot: f64 = theta_q.0.iter().zip(&eta_p.0).map(|(t, e)| t * e).sum();
    let lhs = phi(&eta_p)? + psi(&theta_q) - dot;
    Ok((lhs - kl_divergence(p, q)?).abs())
}

/// `log(n! / prod_j n_j!)`.
pub fn log_multinomial_coeff(n: &CountVector) -> f64 {
    ln_gamma(n.total() as f64 + 1.0)
        - n.counts()
            .iter()
            .map(|&c| ln_gamma(c as f64 + 1.0))
            .sum::<f64>()
}

/// Log multinomial probability of the counts `n` under parameter `q`.
pub fn log_multinomial_pmf(n: &CountVector, q: &Composition) -> Result<f64> {
    check_dims(n.dim(), q.dim())?;
    let mut acc = log_multinomial_coeff(n);
    for (index, (&c, &qj)) in n.counts().iter().zip(q.parts()).enumerate() {
        if c == 0 {
            continue;
        }
        if qj == 0.0 {
            return Err(Error::ImpossibleOutcome { index });
        }
        acc += c as f64 * qj.ln();
    }
    Ok(acc)
}

pub fn log_poisson_pmf(k: u64, rate: f64) -> f64 {
    let k = k as f64;
    if k == 0.0 {
        -rate
    } else {
        k * rate.ln() - rate - ln_gamma(k + 1.0)
    }
}

fn check_rates(rates: &[f64]) -> Result<()> {
    match rates.iter().position(|r| !(r.is_finite() && *r > 0.0)) {
        Some(i) => Err(Error::InvalidParameter {
            name: "lambda",
            value: rates[i],
            reason: "Poisson rates must be positive",
        }),
        None => Ok(()),
    }
}

/// Residual of the factorization of independent Poisson counts into a
/// Poisson total times a multinomial split with `q = closure(rates)`.
pub fn poisson_factorization_residual(n: &CountVector, rates: &[f64]) -> Result<f64> {
    check_dims(n.dim(), rates.len())?;
    check_rates(rates)?;
    let joint: f64 = n
        .counts()
        .iter()
        .zip(rates)
        .map(|(&k, &r)| log_poisson_pmf(k, r))
        .sum();
    let total_rate: f64 = rates.iter().sum();
    let q = Composition::closure(rates)?;
    let factored = log_poisson_pmf(n.total(), total_rate) + log_multinomial_pmf(n, &q)?;
    Ok((joint - factored).abs())
}

/// Residual of the method-of-types identity: the log-probability of one
/// ordered sequence with counts `n` equals `n phi(eta_hat) - n KL(q_hat || q)`.
pub fn method_of_types_residual(n: &CountVector, q: &Composition) -> Result<f64> {
    check_dims(n.dim(), q.dim())?;
    if let Some(index) = n.counts().iter().position(|&c| c == 0) {
        return Err(Error::BoundaryPoint { index });
    }
    q.check_interior()?;
    let total = n.total() as f64;
    let q_hat = Composition::closure(&n.as_f64())?;
    let sequence = log_multinomial_pmf(n, q)? - log_multinomial_coeff(n);
    let types = total * phi(&eta_of(&q_hat))? - total * kl_divergence(&q_hat, q)?;
    Ok((sequence - types).abs())
}

/// `log B(alpha) = sum_k lgamma(alpha_k) - lgamma(sum_k alpha_k)`.
pub fn log_mv_beta(alpha: &DirichletParams) -> f64 {
    log_mv_beta_raw(alpha.alpha())
}

pub(crate) fn log_mv_beta_raw(alpha: &[f64]) -> f64 {
    alpha.iter().map(|&a| ln_gamma(a)).sum::<f64>() - ln_gamma(alpha.iter().sum())
}

/// Log probability of one ordered sequence with counts `n` under the
/// Dirichlet-multinomial model: `log B(n + alpha) - log B(alpha)`.
pub fn log_marginal_likelihood(n: &CountVector, alpha: &DirichletParams) -> Result<f64> {
    Ok(log_mv_beta(&alpha.updated(n)?) - log_mv_beta(alpha))
}

/// Log posterior density over `theta` after observing `n` under a
/// Dirichlet(`alpha`) conjugate prior.
pub fn posterior_log_density(
    theta: &ThetaCoords,
    n: &CountVector,
    alpha: &DirichletParams,
) -> Result<f64> {
    check_dims(n.dim(), theta.parts_dim())?;
    let post = alpha.updated(n)?;
    let linear: f64 = theta.0.iter().zip(post.alpha()).map(|(t, a)| t * a).sum();
    Ok(linear - post.total() * psi(theta) - log_mv_beta(&post))
}

/// The same posterior written through a scale and a center composition:
/// `scale [sum_k theta_k c_k - psi(theta)] - log B(scale c)`.
///
/// `(n + sum alpha, (n + alpha)/(n + sum alpha))` reproduces
/// [`posterior_log_density`]; the exponential-shrinkage pair
/// `(sum tau^(1-beta) n^beta, tilde q)` gives the alternative parametrization.
pub fn posterior_log_density_reparam(
    theta: &ThetaCoords,
    scale: f64,
    center: &Composition,
) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParameter {
            name: "scale",
            value: scale,
            reason: "must be positive",
        });
    }
    check_dims(center.dim(), theta.parts_dim())?;
    center.check_interior()?;
    let linear: f64 = theta.0.iter().zip(center.parts()).map(|(t, c)| t * c).sum();
    let params: Vec<f64> = center.parts().iter().map(|c| scale * c).collect();
    Ok(scale * (linear - psi(theta)) - log_mv_beta_raw(&params))
}
