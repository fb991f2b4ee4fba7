//! Plain Rust versions of the demo operations. Everything returns flat
//! `Vec<f64>` buffers so the bindings can hand them to JS as `Float64Array`.

use codashrink::shrinkage::{
    exp_shrinkage_optimal, optimal_lambda, optimal_lambda_e, project_nonzero, risk_e_curve,
    risk_m_curve, shrinkage_optimal, support_plug_in, DeltaMoments,
};
use codashrink::simplex::{generalized_power_transform_on_support, m_geodesic_point};
use codashrink::{Composition, CountVector, Error, Result};

fn grid(steps: u32) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidParameter {
            name: "steps",
            value: 0.0,
            reason: "need at least one step",
        });
    }
    Ok((0..=steps)
        .map(|i| f64::from(i) / f64::from(steps))
        .collect())
}

fn counts(raw: &[u32]) -> Result<CountVector> {
    let n = CountVector::new(raw.iter().map(|&c| u64::from(c)).collect())?;
    n.check_nonempty()?;
    Ok(n)
}

/// Empty `tau` means the uniform target.
fn target(tau: &[f64], dim: usize) -> Result<Composition> {
    if tau.is_empty() {
        Composition::uniform(dim)
    } else {
        Composition::closure(tau)
    }
}

/// Points along both geodesics from `q` (lambda = 0) to `tau` (lambda = 1).
///
/// Layout: the m-path as `steps + 1` rows of `D` parts, then the e-path in
/// the same shape. Zeros of `q` stay zero along the e-path.
pub fn geodesic_paths(tau: &[f64], q: &[f64], steps: u32) -> Result<Vec<f64>> {
    let q = Composition::closure(q)?;
    let tau = target(tau, q.dim())?;
    let ls = grid(steps)?;
    let mut out = Vec::with_capacity(2 * ls.len() * q.dim());
    for &l in &ls {
        out.extend_from_slice(m_geodesic_point(&tau, &q, l)?.parts());
    }
    for &l in &ls {
        out.extend_from_slice(generalized_power_transform_on_support(&q, &tau, 1.0 - l)?.parts());
    }
    Ok(out)
}

/// Estimated risk of both shrinkage families over a grid of target weights.
///
/// Layout: `steps + 1` grid values, the mixture risk at each, the
/// exponential risk at each, then `lambda*` and `lambda_min`. The
/// exponential curve lives on the nonzero support of the counts.
pub fn risk_curves(raw: &[u32], tau: &[f64], steps: u32) -> Result<Vec<f64>> {
    let n = counts(raw)?;
    let tau = target(tau, n.dim())?;
    let ls = grid(steps)?;
    let proj = project_nonzero(&n)?;
    if proj.support_size() < 2 {
        return Err(Error::InvalidParameter {
            name: "counts",
            value: proj.support_size() as f64,
            reason: "need at least two nonzero counts",
        });
    }
    let tau_s = proj.restrict(&tau)?;
    let plug_in = support_plug_in(&proj, &tau_s)?;
    let moments = DeltaMoments::new(&plug_in, n.total())?;

    let mut out = ls.clone();
    out.extend(risk_m_curve(&n, &tau, &ls)?);
    out.extend(risk_e_curve(&moments, &tau_s, &plug_in, &ls)?);
    out.push(optimal_lambda(&n, &tau)?.value);
    out.push(optimal_lambda_e(&moments, &tau_s, &plug_in)?.value);
    Ok(out)
}

/// Empirical, mixture-shrinkage and exponential-shrinkage estimates.
///
/// Layout: three rows of `D` parts in that order, then `lambda*` and `beta*`.
pub fn compare_estimators(raw: &[u32], tau: &[f64]) -> Result<Vec<f64>> {
    let n = counts(raw)?;
    let tau = target(tau, n.dim())?;
    let shrink = shrinkage_optimal(&n, &tau)?;
    let exp = exp_shrinkage_optimal(&n, &tau)?;
    let mut out = Composition::closure(&n.as_f64())?.into_parts();
    out.extend_from_slice(shrink.estimate.parts());
    out.extend_from_slice(exp.estimate.parts());
    out.push(shrink.weight);
    out.push(exp.weight);
    Ok(out)
}
