use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::infogeo::DirichletParams;
use crate::simplex::{Composition, CountVector};

/// Dirichlet draw as normalized independent Gamma(alpha_k, 1) variates.
/// Draws with an underflowed (zero) part are repeated, so the result is interior.
pub fn sample_dirichlet<R: Rng + ?Sized>(alpha: &DirichletParams, rng: &mut R) -> Composition {
    let gammas: Vec<Gamma<f64>> = alpha
        .alpha()
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("validated positive shape"))
        .collect();
    loop {
        let draws: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
        if draws.iter().all(|&x| x > 0.0) {
            if let Ok(c) = Composition::closure(&draws) {
                if c.is_interior() {
                    return c;
                }
            }
        }
    }
}

/// Multinomial draw by sequential conditional binomials. Parts with `q_j = 0`
/// always receive zero counts.
pub fn sample_multinomial<R: Rng + ?Sized>(
    q: &Composition,
    n_total: u64,
    rng: &mut R,
) -> CountVector {
    let parts = q.parts();
    let mut suffix = vec![0.0; parts.len() + 1];
    for j in (0..parts.len()).rev() {
        suffix[j] = suffix[j + 1] + parts[j];
    }
    let mut counts = vec![0u64; parts.len()];
    let mut remaining = n_total;
    for j in 0..parts.len() {
        if remaining == 0 {
            break;
        }
        if parts[j] == 0.0 {
            continue;
        }
        let k = if suffix[j + 1] <= 0.0 {
            remaining
        } else {
            let p = (parts[j] / suffix[j]).min(1.0);
            Binomial::new(remaining, p)
                .expect("probability in [0, 1]")
                .sample(rng)
        };
        counts[j] = k;
        remaining -= k;
    }
    CountVector::new(counts).expect("dimension of a composition")
}

/// Independent Poisson counts with the given positive rates.
pub fn sample_poisson_vector<R: Rng + ?Sized>(rates: &[f64], rng: &mut R) -> Result<CountVector> {
    let counts = rates
        .iter()
        .map(|&r| {
            Poisson::new(r)
                .map(|p| p.sample(rng) as u64)
                .map_err(|_| Error::InvalidParameter {
                    name: "lambda",
                    value: r,
                    reason: "Poisson rates must be positive and finite",
                })
        })
        .collect::<Result<Vec<u64>>>()?;
    CountVector::new(counts)
}
