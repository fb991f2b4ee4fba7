//! Estimators of multinomial parameters from counts.
//!
//! Three estimators share one interface:
//!
//! * the empirical estimate `closure(n)`;
//! * mixture shrinkage `lambda tau + (1 - lambda) q_hat`, a point on the
//!   m-geodesic between the observed point and the target, which is also the
//!   Dirichlet-multinomial posterior mean;
//! * exponential shrinkage, the normalized weighted geometric mean
//!   `tau^(1-beta) q_hat^beta`, a point on the e-geodesic. It is applied on
//!   the nonzero parts of the counts only, so observed zeros stay exact zeros.
//!
//! Optimal weights come from the quadratic risk on the simplex (for lambda)
//! and from the Aitchison risk on the clr plane with delta-method moments
//! (for beta), see [`delta`].

pub mod delta;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::infogeo::DirichletParams;
use crate::simplex::{generalized_power_transform, Composition, CountVector};

pub use delta::{
    aitchison_loss, delta_clr_mean, delta_clr_var, delta_clr_var_printed, optimal_beta,
    optimal_beta_with, optimal_lambda_e, risk_e_curve, DeltaMoments, VarianceForm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShrinkKind {
    Mixture,
    Exponential,
}

/// An estimate together with the weight that produced it.
///
/// `weight` is `lambda` (target weight) for [`ShrinkKind::Mixture`] and
/// `beta` (data weight) for [`ShrinkKind::Exponential`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkResult {
    pub estimate: Composition,
    pub weight: f64,
    pub weight_was_clamped: bool,
    pub target: Composition,
    pub kind: ShrinkKind,
    /// Set when the nonzero support has fewer than two parts and the
    /// empirical estimate was returned unchanged.
    pub degenerate_support: bool,
}

/// A data-driven weight in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalWeight {
    pub value: f64,
    /// Value of the analytic formula before clamping.
    pub raw: f64,
    pub clamped: bool,
    /// The formula's denominator vanished and a convention was applied.
    pub degenerate: bool,
}

impl OptimalWeight {
    fn from_raw(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Self {
            value,
            raw,
            clamped: value != raw,
            degenerate: false,
        }
    }

    fn convention(value: f64) -> Self {
        Self {
            value,
            raw: value,
            clamped: false,
            degenerate: true,
        }
    }

    /// `1 - w`, for turning a target weight into a data weight.
    pub fn complement(self) -> Self {
        Self {
            value: 1.0 - self.value,
            raw: 1.0 - self.raw,
            ..self
        }
    }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

/// The observed point `n / sum(n)`; may lie on the boundary.
pub fn empirical_estimate(n: &CountVector) -> Result<Composition> {
    n.check_nonempty()?;
    Composition::closure(&n.as_f64())
}

/// `lambda tau + (1 - lambda) closure(n)`.
pub fn shrinkage_estimate(n: &CountVector, tau: &Composition, lambda: f64) -> Result<ShrinkResult> {
    check_unit_interval("lambda", lambda)?;
    check_dims(n.dim(), tau.dim())?;
    let q_hat = empirical_estimate(n)?;
    let estimate = crate::simplex::m_geodesic_point(tau, &q_hat, lambda)?;
    Ok(ShrinkResult {
        estimate,
        weight: lambda,
        weight_was_clamped: false,
        target: tau.clone(),
        kind: ShrinkKind::Mixture,
        degenerate_support: false,
    })
}

/// Posterior mean `(n + alpha) / (n + sum alpha)` under a Dirichlet prior.
pub fn dirichlet_posterior_mean(n: &CountVector, alpha: &DirichletParams) -> Result<Composition> {
    Composition::closure(alpha.updated(n)?.alpha())
}

/// Target weight and target of the mixture estimator equivalent to the
/// Dirichlet(`alpha`) posterior mean for a sample of size `n_total`.
pub fn alpha_to_lambda_tau(alpha: &DirichletParams, n_total: u64) -> Result<(f64, Composition)> {
    if n_total == 0 {
        return Err(Error::InsufficientData(
            "sample size must be at least 1".into(),
        ));
    }
    let a0 = alpha.total();
    let lambda = a0 / (n_total as f64 + a0);
    Ok((lambda, Composition::closure(alpha.alpha())?))
}

/// Plug-in variances `q_hat_j (1 - q_hat_j) / (n - 1)` of the empirical estimate.
fn plug_in_variances(q_hat: &Composition, n_total: u64) -> Vec<f64> {
    let denom = (n_total - 1) as f64;
    q_hat
        .parts()
        .iter()
        .map(|q| q * (1.0 - q) / denom)
        .collect()
}

fn check_m_risk_inputs(n: &CountVector, tau: &Composition) -> Result<Composition> {
    check_dims(n.dim(), tau.dim())?;
    if n.total() < 2 {
        return Err(Error::InsufficientData(format!(
            "variance plug-in needs at least 2 counts, got {}",
            n.total()
        )));
    }
    empirical_estimate(n)
}

/// Analytic minimizer of the plug-in quadratic risk along the m-geodesic,
/// `sum var(q_hat_j) / sum (tau_j - q_hat_j)^2`, clamped to `[0, 1]`.
///
/// When the observed point equals the target the denominator vanishes and
/// the weight is 1 by convention.
pub fn optimal_lambda(n: &CountVector, tau: &Composition) -> Result<OptimalWeight> {
    let q_hat = check_m_risk_inputs(n, tau)?;
    let var_sum: f64 = plug_in_variances(&q_hat, n.total()).iter().sum();
    let dist_sum: f64 = tau
        .parts()
        .iter()
        .zip(q_hat.parts())
        .map(|(t, q)| (t - q).powi(2))
        .sum();
    if dist_sum == 0.0 {
        return Ok(OptimalWeight::convention(1.0));
    }
    Ok(OptimalWeight::from_raw(var_sum / dist_sum))
}

/// Plug-in risk `(1 - l)^2 V + l^2 B` for every `l` in `lambdas`, with
/// `V = sum var(q_hat_j)` and the squared bias estimated without bias as
/// `B = sum (tau_j - q_hat_j)^2 - V`.
///
/// `B` is the estimate whose stationary point is [`optimal_lambda`]; it can
/// be negative, in which case the curve is concave and minimized at `l = 1`.
pub fn risk_m_curve(n: &CountVector, tau: &Composition, lambdas: &[f64]) -> Result<Vec<f64>> {
    let q_hat = check_m_risk_inputs(n, tau)?;
    let var_sum: f64 = plug_in_variances(&q_hat, n.total()).iter().sum();
    let dist_sum: f64 = tau
        .parts()
        .iter()
        .zip(q_hat.parts())
        .map(|(t, q)| (t - q).powi(2))
        .sum();
    Ok(lambdas
        .iter()
        .map(|l| (1.0 - l).powi(2) * var_sum + l * l * (dist_sum - var_sum))
        .collect())
}

/// Mixture shrinkage with the analytic weight.
pub fn shrinkage_optimal(n: &CountVector, tau: &Composition) -> Result<ShrinkResult> {
    let w = optimal_lambda(n, tau)?;
    let mut result = shrinkage_estimate(n, tau, w.value)?;
    result.weight_was_clamped = w.clamped;
    Ok(result)
}

/// Squared error `sum_j (est_j - truth_j)^2`.
pub fn sq_error_loss(est: &Composition, truth: &Composition) -> Result<f64> {
    check_dims(est.dim(), truth.dim())?;
    Ok(est
        .parts()
        .iter()
        .zip(truth.parts())
        .map(|(a, b)| (a - b).powi(2))
        .sum())
}

/// Restriction of a count vector to its nonzero parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonzeroProjection {
    support: Vec<usize>,
    reduced: Vec<u64>,
    original_dim: usize,
}

impl NonzeroProjection {
    /// Indices of the nonzero counts, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// The nonzero counts in support order.
    pub fn reduced(&self) -> &[u64] {
        &self.reduced
    }

    pub fn original_dim(&self) -> usize {
        self.original_dim
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn is_identity(&self) -> bool {
        self.support.len() == self.original_dim
    }

    /// Reduced counts as a [`CountVector`]; needs at least two nonzero parts.
    pub fn reduced_counts(&self) -> Result<CountVector> {
        CountVector::new(self.reduced.clone())
    }

    /// Restricts a full-dimension composition to the support and closes it.
    /// Every restricted part must be positive.
    pub fn restrict(&self, c: &Composition) -> Result<Composition> {
        check_dims(self.original_dim, c.dim())?;
        let parts: Vec<f64> = self.support.iter().map(|&i| c.parts()[i]).collect();
        if let Some(pos) = parts.iter().position(|&v| v <= 0.0) {
            return Err(Error::BoundaryPoint {
                index: self.support[pos],
            });
        }
        Composition::closure(&parts)
    }

    /// Places `reduced` back at the support indices; every other part is 0.
    pub fn embed_back(&self, reduced: &Composition) -> Result<Composition> {
        check_dims(self.support.len(), reduced.dim())?;
        Ok(self.embed_parts(reduced.parts()))
    }

    fn embed_parts(&self, reduced: &[f64]) -> Composition {
        let mut parts = vec![0.0; self.original_dim];
        for (&i, &v) in self.support.iter().zip(reduced) {
            parts[i] = v;
        }
        Composition::from_closed(parts)
    }
}

pub fn project_nonzero(n: &CountVector) -> Result<NonzeroProjection> {
    n.check_nonempty()?;
    let (support, reduced) = n
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i, c))
        .unzip();
    Ok(NonzeroProjection {
        support,
        reduced,
        original_dim: n.dim(),
    })
}

/// Exponential shrinkage toward `tau` with data weight `beta`, applied on the
/// nonzero support of `n` (the target is restricted and re-closed there).
pub fn exp_shrinkage_estimate(
    n: &CountVector,
    tau: &Composition,
    beta: f64,
) -> Result<ShrinkResult> {
    check_unit_interval("beta", beta)?;
    check_dims(n.dim(), tau.dim())?;
    let proj = project_nonzero(n)?;
    if proj.support_size() < 2 {
        return Ok(ShrinkResult {
            estimate: proj.embed_parts(&[1.0]),
            weight: beta,
            weight_was_clamped: false,
            target: tau.clone(),
            kind: ShrinkKind::Exponential,
            degenerate_support: true,
        });
    }
    let tau_s = proj.restrict(tau)?;
    let q_hat_s = Composition::closure(&proj.reduced_counts()?.as_f64())?;
    let est_s = generalized_power_transform(&q_hat_s, &tau_s, beta)?;
    Ok(ShrinkResult {
        estimate: proj.embed_back(&est_s)?,
        weight: beta,
        weight_was_clamped: false,
        target: tau.clone(),
        kind: ShrinkKind::Exponential,
        degenerate_support: false,
    })
}

/// Plug-in for the true parameter when optimizing `beta`: mixture shrinkage
/// on the nonzero support, toward the restricted target, with its own
/// optimal `lambda`.
pub fn support_plug_in(proj: &NonzeroProjection, tau_s: &Composition) -> Result<Composition> {
    let reduced = proj.reduced_counts()?;
    Ok(shrinkage_optimal(&reduced, tau_s)?.estimate)
}

/// Exponential shrinkage with `beta` optimized on the nonzero support.
///
/// Supports with fewer than two parts return the empirical estimate with
/// `beta = 1` and `degenerate_support` set.
pub fn exp_shrinkage_optimal(n: &CountVector, tau: &Composition) -> Result<ShrinkResult> {
    exp_shrinkage_optimal_with(n, tau, VarianceForm::DeltaMethod)
}

pub fn exp_shrinkage_optimal_with(
    n: &CountVector,
    tau: &Composition,
    form: VarianceForm,
) -> Result<ShrinkResult> {
    check_dims(n.dim(), tau.dim())?;
    let proj = project_nonzero(n)?;
    if proj.support_size() < 2 {
        return exp_shrinkage_estimate(n, tau, 1.0);
    }
    let tau_s = proj.restrict(tau)?;
    let plug_in = support_plug_in(&proj, &tau_s)?;
    let beta = optimal_beta_with(n.total(), &tau_s, &plug_in, form)?;
    let mut result = exp_shrinkage_estimate(n, tau, beta.value)?;
    result.weight_was_clamped = beta.clamped;
    Ok(result)
}
