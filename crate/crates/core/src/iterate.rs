//! Fixed-point axis extraction shared by reciprocal averaging and the
//! iterative CCA algorithm.
//!
//! Each round applies `step`, removes the components along previously
//! extracted axes and the constant (both in the W inner product), and
//! rescales to unit weighted variance. The rescaling factor converges to the
//! axis eigenvalue.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::weighted;

#[derive(Debug, Clone)]
pub(crate) struct ExtractedAxis {
    /// W-standardized scores at convergence.
    pub axis: DVector<f64>,
    /// `step(axis)` after deflation and centering, before rescaling.
    pub raw: DVector<f64>,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub change: f64,
}

pub(crate) fn initial_scores(m: usize, axis: usize, seed: Option<u64>) -> DVector<f64> {
    match seed {
        None => DVector::from_fn(m, |i, _| i as f64),
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.wrapping_add(axis as u64));
            DVector::from_fn(m, |_, _| rng.random::<f64>())
        }
    }
}

pub(crate) fn extract_axes<F>(
    weights: &DVector<f64>,
    num_axes: usize,
    seed: Option<u64>,
    tol: f64,
    max_iter: usize,
    step: F,
) -> Result<Vec<ExtractedAxis>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let m = weights.len();
    let mut found: Vec<DVector<f64>> = Vec::with_capacity(num_axes);
    let mut out = Vec::with_capacity(num_axes);
    for j in 0..num_axes {
        let mut x = start(weights, &found, initial_scores(m, j, seed))
            .or_else(|| start(weights, &found, initial_scores(m, j, Some(0x5eed ^ j as u64))))
            .ok_or_else(|| Error::Numerical(format!("could not initialize axis {}", j + 1)))?;

        let mut change = f64::INFINITY;
        let mut iterations = 0;
        let mut eigenvalue = 0.0;
        let mut raw = x.clone();
        while iterations < max_iter {
            iterations += 1;
            let mut e = step(&x);
            weighted::orthogonalize(weights, &mut e, &found);
            let mu = weighted::mean(weights, &e);
            e.add_scalar_mut(-mu);
            let norm = weighted::dot(weights, &e, &e).sqrt();
            if !(norm.is_finite() && norm > 1e-300) {
                return Err(Error::Numerical(format!("axis {} collapsed to zero (eigenvalue 0)", j + 1)));
            }
            let next = &e / norm;
            change = (&next - &x).amax();
            x = next;
            eigenvalue = norm;
            raw = e;
            if change < tol {
                break;
            }
        }
        if change.is_nan() || change >= tol {
            return Err(Error::Convergence { iterations, residual: change });
        }
        found.push(x.clone());
        out.push(ExtractedAxis { axis: x, raw, eigenvalue, iterations, change });
    }
    Ok(out)
}

fn start(weights: &DVector<f64>, found: &[DVector<f64>], mut v: DVector<f64>) -> Option<DVector<f64>> {
    let mu = weighted::mean(weights, &v);
    v.add_scalar_mut(-mu);
    weighted::orthogonalize(weights, &mut v, found);
    weighted::standardize(weights, &v)
}
