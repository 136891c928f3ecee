use nalgebra::DVector;

use super::{cooccurrence_country, orient_by_diversity};
use crate::error::Result;
use crate::ingest::SpecializationMatrix;
use crate::iterate;
use crate::ordination::SignConvention;

#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalAveraging {
    /// W-standardized leading non-trivial country axis.
    pub country_axis: DVector<f64>,
    /// `Xu · country_axis`.
    pub product_axis: DVector<f64>,
    /// Scale factor removed by the last re-standardization.
    pub eigenvalue: f64,
    pub iterations: usize,
    /// Max absolute change in the last round.
    pub change: f64,
}

/// Leading CA axis by alternating averaging with weighted re-standardization.
pub fn reciprocal_averaging(sm: &SpecializationMatrix, tol: f64, max_iter: usize) -> Result<ReciprocalAveraging> {
    sm.ensure_connected()?;
    let cc = cooccurrence_country(sm);
    let mut found = iterate::extract_axes(sm.weights(), 1, None, tol, max_iter, |v| &cc * v)?;
    let a = found.remove(0);
    let mut axis = a.axis;
    orient_by_diversity(sm, &mut axis, SignConvention::Diversity)?;
    Ok(ReciprocalAveraging {
        product_axis: sm.xu() * &axis,
        country_axis: axis,
        eigenvalue: a.eigenvalue,
        iterations: a.iterations,
        change: a.change,
    })
}
