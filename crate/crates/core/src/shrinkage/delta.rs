//! Aitchison risk of exponential shrinkage and the delta-method moments of
//! `clr(q_hat)` it depends on.
//!
//! For the empirical estimate `q_hat` of an interior `q` from `n` draws,
//!
//! ```text
//! E clr_j(q_hat)   ~ E_j = clr_j(q) - (1 - q_j)/(2 q_j n) + (1/2D) sum_k (1 - q_k)/(q_k n)
//! var clr_j(q_hat) ~ V_j = (1/n) [ (1 - 2/D)/q_j + (1/D^2) sum_k 1/q_k ]
//! ```
//!
//! `V_j` is the first-order (delta-method) variance, using
//! `d clr_j / d q_k = delta_jk / q_j - 1/(D q_k)` and the multinomial
//! covariance `(diag(q) - q q^T)/n`. An older closed form,
//! `V_j - 4 (1 - 1/D)^2 / n`, drops the sign of the off-diagonal derivative;
//! it is available as [`VarianceForm::Printed`] for comparison but does not
//! match simulation.

use serde::{Deserialize, Serialize};

use super::OptimalWeight;
use crate::error::{check_dims, Error, Result};
use crate::simplex::{aitchison_distance_sq, clr, clr_unchecked, Composition};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceForm {
    /// First-order variance of `clr(q_hat)`; agrees with Monte Carlo.
    #[default]
    DeltaMethod,
    /// `DeltaMethod - 4 (1 - 1/D)^2 / n`; may go negative and is clamped.
    Printed,
}

/// Approximate mean and variance of `clr(q_hat)` around a reference `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaMoments {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Parts whose raw variance was negative and clamped to zero.
    pub variance_clamped: Vec<bool>,
    pub n: u64,
    pub q_ref: Composition,
    pub form: VarianceForm,
}

impl DeltaMoments {
    pub fn new(q: &Composition, n_total: u64) -> Result<Self> {
        Self::with_form(q, n_total, VarianceForm::DeltaMethod)
    }

    pub fn with_form(q: &Composition, n_total: u64, form: VarianceForm) -> Result<Self> {
        let mean = delta_clr_mean(q, n_total)?;
        let raw = raw_variance(q, n_total, form)?;
        let variance_clamped = raw.iter().map(|&v| v < 0.0).collect();
        Ok(Self {
            mean,
            variance: raw.into_iter().map(|v| v.max(0.0)).collect(),
            variance_clamped,
            n: n_total,
            q_ref: q.clone(),
            form,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn any_clamped(&self) -> bool {
        self.variance_clamped.iter().any(|&c| c)
    }
}

fn check_moment_inputs(q: &Composition, n_total: u64) -> Result<()> {
    q.check_interior()?;
    if n_total == 0 {
        return Err(Error::InsufficientData(
            "sample size must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `(1 - q_k) / (q_k n)` for each part.
fn relative_variances(q: &Composition, n: f64) -> Vec<f64> {
    q.parts().iter().map(|&qk| (1.0 - qk) / (qk * n)).collect()
}

/// Second-order approximation `E_j` of `E clr_j(q_hat)`.
pub fn delta_clr_mean(q: &Composition, n_total: u64) -> Result<Vec<f64>> {
    check_moment_inputs(q, n_total)?;
    let d = q.dim() as f64;
    let rel = relative_variances(q, n_total as f64);
    let shift = rel.iter().sum::<f64>() / (2.0 * d);
    Ok(clr_unchecked(q.parts())
        .into_iter()
        .zip(&rel)
        .map(|(c, r)| c - r / 2.0 + shift)
        .collect())
}

fn raw_variance(q: &Composition, n_total: u64, form: VarianceForm) -> Result<Vec<f64>> {
    check_moment_inputs(q, n_total)?;
    let d = q.dim() as f64;
    let n = n_total as f64;
    Ok(match form {
        VarianceForm::DeltaMethod => {
            let inv_sum: f64 = q.parts().iter().map(|v| 1.0 / v).sum();
            q.parts()
                .iter()
                .map(|&qj| ((1.0 - 2.0 / d) / qj + inv_sum / (d * d)) / n)
                .collect()
        }
        VarianceForm::Printed => {
            let rel = relative_variances(q, n);
            let rel_sum: f64 = rel.iter().sum();
            let constant = (3.0 - 7.0 / d + 4.0 / (d * d)) / n;
            rel.iter()
                .map(|r| (1.0 - 2.0 / d) * r + rel_sum / (d * d) - constant)
                .collect()
        }
    })
}

/// Delta-method variance `V_j` of `clr_j(q_hat)`.
pub fn delta_clr_var(q: &Composition, n_total: u64) -> Result<Vec<f64>> {
    Ok(DeltaMoments::new(q, n_total)?.variance)
}

/// The [`VarianceForm::Printed`] variant, clamped at zero.
pub fn delta_clr_var_printed(q: &Composition, n_total: u64) -> Result<Vec<f64>> {
    Ok(DeltaMoments::with_form(q, n_total, VarianceForm::Printed)?.variance)
}

/// Aitchison loss `sum_j (clr_j(est) - clr_j(truth))^2`.
pub fn aitchison_loss(est: &Composition, truth: &Composition) -> Result<f64> {
    aitchison_distance_sq(est, truth)
}

/// Coefficients of the e-geodesic risk: `a_j = clr_j(tau) - E_j` and
/// `b_j = E_j - clr_j(truth)`.
fn risk_coefficients(
    moments: &DeltaMoments,
    tau: &Composition,
    truth: &Composition,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dims(moments.dim(), tau.dim())?;
    check_dims(moments.dim(), truth.dim())?;
    let ct = clr(tau)?;
    let cq = clr(truth)?;
    let a = ct
        .coords()
        .iter()
        .zip(&moments.mean)
        .map(|(t, e)| t - e)
        .collect();
    let b = moments
        .mean
        .iter()
        .zip(cq.coords())
        .map(|(e, c)| e - c)
        .collect();
    Ok((a, b))
}

/// Approximate Aitchison risk of exponential shrinkage with target weight
/// `l = 1 - beta`: `(1 - l)^2 sum V_j + sum (l a_j + b_j)^2`.
pub fn risk_e_curve(
    moments: &DeltaMoments,
    tau: &Composition,
    truth: &Composition,
    lambdas: &[f64],
) -> Result<Vec<f64>> {
    let (a, b) = risk_coefficients(moments, tau, truth)?;
    let var_sum: f64 = moments.variance.iter().sum();
    Ok(lambdas
        .iter()
        .map(|&l| {
            let bias: f64 = a.iter().zip(&b).map(|(aj, bj)| (l * aj + bj).powi(2)).sum();
            (1.0 - l).powi(2) * var_sum + bias
        })
        .collect())
}

/// Minimizer of [`risk_e_curve`]:
/// `[sum V_j - sum a_j b_j] / sum (V_j + a_j^2)`, clamped to `[0, 1]`.
/// A vanishing denominator yields 0 with `degenerate` set.
pub fn optimal_lambda_e(
    moments: &DeltaMoments,
    tau: &Composition,
    truth: &Composition,
) -> Result<OptimalWeight> {
    let (a, b) = risk_coefficients(moments, tau, truth)?;
    let var_sum: f64 = moments.variance.iter().sum();
    let cross: f64 = a.iter().zip(&b).map(|(aj, bj)| aj * bj).sum();
    let denom = var_sum + a.iter().map(|aj| aj * aj).sum::<f64>();
    if denom == 0.0 {
        return Ok(OptimalWeight::convention(0.0));
    }
    Ok(OptimalWeight::from_raw((var_sum - cross) / denom))
}

/// Optimal data weight `beta = 1 - lambda_min` of exponential shrinkage
/// toward `tau`, with moments evaluated at `plug_in` for a sample of size
/// `n_total`. `tau` and `plug_in` must be interior compositions of the same
/// dimension (typically the nonzero support of the sample).
pub fn optimal_beta(
    n_total: u64,
    tau: &Composition,
    plug_in: &Composition,
) -> Result<OptimalWeight> {
    optimal_beta_with(n_total, tau, plug_in, VarianceForm::DeltaMethod)
}

pub fn optimal_beta_with(
    n_total: u64,
    tau: &Composition,
    plug_in: &Composition,
    form: VarianceForm,
) -> Result<OptimalWeight> {
    let moments = DeltaMoments::with_form(plug_in, n_total, form)?;
    Ok(optimal_lambda_e(&moments, tau, plug_in)?.complement())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn comp(v: &[f64]) -> Composition {
        Composition::new(v.to_vec()).unwrap()
    }

    /// Risk written directly from its definition: the clr of exponential
    /// shrinkage is `l clr(tau) + (1 - l) clr(q_hat)`, so its expectation
    /// is `l clr(tau) + (1 - l) E` and its variance `(1 - l)^2 V`.
    fn risk_oracle(m: &DeltaMoments, tau: &Composition, truth: &Composition, l: f64) -> f64 {
        let ct = clr(tau).unwrap();
        let cq = clr(truth).unwrap();
        (0..m.dim())
            .map(|j| {
                let mean = l * ct.coords()[j] + (1.0 - l) * m.mean[j];
                (1.0 - l).powi(2) * m.variance[j] + (mean - cq.coords()[j]).powi(2)
            })
            .sum()
    }

    fn grid_argmin(m: &DeltaMoments, tau: &Composition, truth: &Composition, step: f64) -> f64 {
        let steps = (1.0 / step).round() as usize;
        (0..=steps)
            .map(|i| i as f64 * step)
            .min_by(|x, y| {
                risk_oracle(m, tau, truth, *x).total_cmp(&risk_oracle(m, tau, truth, *y))
            })
            .unwrap()
    }

    #[test]
    fn mean_examples() {
        for d in 2..8 {
            let e = delta_clr_mean(&Composition::uniform(d).unwrap(), 17).unwrap();
            for v in e {
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
            }
        }
        let e = delta_clr_mean(&comp(&[0.5, 0.25, 0.25]), 100).unwrap();
        let clr1 = 2.0 / 3.0 * std::f64::consts::LN_2;
        assert_abs_diff_eq!(e[0], clr1 - 0.005 + 0.07 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[0], 0.468765, epsilon = 1e-6);
        assert_eq!(
            delta_clr_mean(&comp(&[0.5, 0.5, 0.0]), 10),
            Err(Error::BoundaryPoint { index: 2 })
        );
    }

    #[test]
    fn printed_variance_examples() {
        let v = delta_clr_var_printed(&Composition::uniform(3).unwrap(), 10).unwrap();
        for x in v {
            assert_abs_diff_eq!(x, 1.0 / 45.0, epsilon = 1e-15);
        }
        let m =
            DeltaMoments::with_form(&comp(&[0.5, 0.25, 0.25]), 50, VarianceForm::Printed).unwrap();
        assert_abs_diff_eq!(m.variance[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.variance[1], 1.0 / 75.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.variance[2], 0.013333, epsilon = 1e-6);
    }

    #[test]
    fn printed_variance_touches_zero_without_going_negative() {
        // the printed form attains 0 at (1/2, 1/4, 1/4) and (1/2, 1/2); rounding may
        // push the raw value a hair below zero, which the clamp absorbs
        for (q, n) in [
            (vec![0.5, 0.25, 0.25], 50),
            (vec![0.5, 0.5], 7),
            (vec![0.25, 0.5, 0.25], 3),
        ] {
            let m = DeltaMoments::with_form(&comp(&q), n, VarianceForm::Printed).unwrap();
            assert!(m.variance.iter().all(|&v| v >= 0.0));
            assert!(m.variance.iter().any(|&v| v < 1e-15));
        }
    }

    #[test]
    fn delta_variance_examples() {
        // (1/n) [(1 - 2/D)/q_j + (1/D^2) sum 1/q_k]
        let v = delta_clr_var(&Composition::uniform(3).unwrap(), 10).unwrap();
        for x in v {
            assert_abs_diff_eq!(x, 0.2, epsilon = 1e-15);
        }
        let v = delta_clr_var(&comp(&[0.5, 0.25, 0.25]), 50).unwrap();
        assert_abs_diff_eq!(v[0], 16.0 / 450.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], 22.0 / 450.0, epsilon = 1e-15);
    }

    #[test]
    fn forms_differ_by_constant() {
        let q = comp(&[0.1, 0.2, 0.3, 0.15, 0.25]);
        let m = DeltaMoments::new(&q, 40).unwrap();
        let p = raw_variance(&q, 40, VarianceForm::Printed).unwrap();
        let shift = 4.0 * (1.0 - 1.0 / 5.0f64).powi(2) / 40.0;
        for (a, b) in m.variance.iter().zip(&p) {
            assert_abs_diff_eq!(a - b, shift, epsilon = 1e-15);
        }
    }

    #[test]
    fn variance_matches_finite_difference_gradient() {
        // grad^T Sigma grad with a numerical clr gradient and Sigma = (diag q - q q^T)/n
        let q = comp(&[0.05, 0.2, 0.4, 0.1, 0.25]);
        let n = 30u64;
        let v = delta_clr_var(&q, n).unwrap();
        let d = q.dim();
        let h = 1e-7;
        for (j, &vj) in v.iter().enumerate() {
            let grad: Vec<f64> = (0..d)
                .map(|k| {
                    let mut up = q.parts().to_vec();
                    let mut down = q.parts().to_vec();
                    up[k] += h;
                    down[k] -= h;
                    (clr_unchecked(&up)[j] - clr_unchecked(&down)[j]) / (2.0 * h)
                })
                .collect();
            let mut var = 0.0;
            for k in 0..d {
                for l in 0..d {
                    let qk = q.parts()[k];
                    let cov = if k == l {
                        qk * (1.0 - qk)
                    } else {
                        -qk * q.parts()[l]
                    };
                    var += grad[k] * grad[l] * cov / n as f64;
                }
            }
            assert_abs_diff_eq!(vj, var, epsilon = 1e-7);
        }
    }

    #[test]
    fn aitchison_loss_examples() {
        let p = comp(&[0.5, 0.25, 0.25]);
        let u = Composition::uniform(3).unwrap();
        assert_eq!(aitchison_loss(&p, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(aitchison_loss(&p, &u).unwrap(), 0.320303, epsilon = 1e-6);
        assert_abs_diff_eq!(
            aitchison_loss(&p, &u).unwrap(),
            crate::simplex::aitchison_distance_sq_pairwise(&p, &u).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn risk_e_endpoints() {
        let q = comp(&[0.5, 0.25, 0.25]);
        let tau = comp(&[0.2, 0.5, 0.3]);
        let m = DeltaMoments::new(&q, 50).unwrap();
        let r = risk_e_curve(&m, &tau, &q, &[0.0, 1.0]).unwrap();
        let cq = clr(&q).unwrap();
        let b2: f64 = m
            .mean
            .iter()
            .zip(cq.coords())
            .map(|(e, c)| (e - c).powi(2))
            .sum();
        assert_abs_diff_eq!(r[0], m.variance.iter().sum::<f64>() + b2, epsilon = 1e-15);
        assert_abs_diff_eq!(
            r[1],
            aitchison_distance_sq(&tau, &q).unwrap(),
            epsilon = 1e-14
        );
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let curve = risk_e_curve(&m, &tau, &q, &grid).unwrap();
        for w in curve.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] > 0.0);
        }
        assert!(matches!(
            risk_e_curve(&m, &Composition::uniform(4).unwrap(), &q, &grid),
            Err(Error::DimensionError { .. })
        ));
    }

    #[test]
    fn lambda_e_full_shrink_at_uniform_truth() {
        let u = Composition::uniform(3).unwrap();
        for form in [VarianceForm::DeltaMethod, VarianceForm::Printed] {
            let m = DeltaMoments::with_form(&u, 10, form).unwrap();
            let w = optimal_lambda_e(&m, &u, &u).unwrap();
            assert_abs_diff_eq!(w.value, 1.0, epsilon = 1e-12);
            let b = optimal_beta_with(10, &u, &u, form).unwrap();
            assert_abs_diff_eq!(b.value, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lambda_e_example_printed_form() {
        let q = comp(&[0.5, 0.25, 0.25]);
        let u = Composition::uniform(3).unwrap();
        let m = DeltaMoments::with_form(&q, 50, VarianceForm::Printed).unwrap();
        let w = optimal_lambda_e(&m, &u, &q).unwrap();
        assert!((w.value - 0.099).abs() < 0.001, "lambda_min = {}", w.value);
        assert!((grid_argmin(&m, &u, &q, 0.001) - w.value).abs() <= 0.001);
        let b = optimal_beta_with(50, &u, &q, VarianceForm::Printed).unwrap();
        assert!((b.value - 0.90).abs() < 0.01);
    }

    #[test]
    fn lambda_e_example_delta_form() {
        // sum V = 60/450; cross term from E = clr + bias shifts
        let q = comp(&[0.5, 0.25, 0.25]);
        let u = Composition::uniform(3).unwrap();
        let m = DeltaMoments::new(&q, 50).unwrap();
        let w = optimal_lambda_e(&m, &u, &q).unwrap();
        assert!((w.value - 0.3024).abs() < 5e-4, "lambda_min = {}", w.value);
        assert!((grid_argmin(&m, &u, &q, 0.001) - w.value).abs() <= 0.001);
        let b = optimal_beta(50, &u, &q).unwrap();
        assert!((b.value - 0.6976).abs() < 5e-4);
    }

    #[test]
    fn lambda_e_zero_denominator_convention() {
        let u = Composition::uniform(3).unwrap();
        let m = DeltaMoments {
            mean: vec![0.0; 3],
            variance: vec![0.0; 3],
            variance_clamped: vec![false; 3],
            n: 10,
            q_ref: u.clone(),
            form: VarianceForm::Printed,
        };
        let w = optimal_lambda_e(&m, &u, &u).unwrap();
        assert_eq!(w.value, 0.0);
        assert!(w.degenerate);
    }

    fn interior(d: usize) -> impl Strategy<Value = Composition> {
        prop::collection::vec(0.02f64..1.0, d).prop_map(|v| Composition::closure(&v).unwrap())
    }

    proptest! {
        #[test]
        fn lambda_e_matches_grid_argmin(
            (q, tau) in (2usize..=10).prop_flat_map(|d| (interior(d), interior(d))),
            n in 5u64..2000,
            printed in any::<bool>(),
        ) {
            let form = if printed { VarianceForm::Printed } else { VarianceForm::DeltaMethod };
            let m = DeltaMoments::with_form(&q, n, form).unwrap();
            let w = optimal_lambda_e(&m, &tau, &q).unwrap();
            prop_assert!((grid_argmin(&m, &tau, &q, 0.001) - w.value).abs() <= 0.001);
            let beta = optimal_beta_with(n, &tau, &q, form).unwrap();
            prop_assert!((beta.value - (1.0 - w.value)).abs() < 1e-15);
        }

        #[test]
        fn risk_curve_matches_definition(
            (q, tau) in (2usize..=8).prop_flat_map(|d| (interior(d), interior(d))),
            n in 5u64..500,
            l in 0.0f64..=1.0,
        ) {
            let m = DeltaMoments::new(&q, n).unwrap();
            let r = risk_e_curve(&m, &tau, &q, &[l]).unwrap()[0];
            prop_assert!((r - risk_oracle(&m, &tau, &q, l)).abs() < 1e-10 * r.max(1.0));
        }
    }
}
