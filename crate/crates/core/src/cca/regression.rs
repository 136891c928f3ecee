use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ingest::{CountryVariableTable, SpecializationMatrix};

/// Smallest accepted reciprocal condition number of `Y'WY`.
pub const MIN_RCOND: f64 = 1e-12;

/// The diversity-weighted regression on the country variables:
/// `T = [Y'WY]^{-1} Y'W`, so that `T v` are the coefficients and `Y T v` the
/// fitted values of regressing `v` on `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentOperator {
    y: DMatrix<f64>,
    t: DMatrix<f64>,
    /// Lower Cholesky factor of `Y'WY`.
    chol_l: DMatrix<f64>,
    rcond: f64,
}

impl EnvironmentOperator {
    /// `(z+1) × m`.
    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    /// Hat operator `H = Y T` (`m × m`).
    pub fn hat(&self) -> DMatrix<f64> {
        &self.y * &self.t
    }

    pub fn coefficients(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.t * v
    }

    /// Fitted values `Y T v`.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.y * (&self.t * v)
    }

    /// Columns spanning `span(Y)` with `Q' W Q = I`.
    pub(crate) fn w_orthonormal_basis(&self) -> DMatrix<f64> {
        let yt = self.y.transpose();
        let qt = self.chol_l.solve_lower_triangular(&yt).expect("Cholesky factor has a positive diagonal");
        qt.transpose()
    }
}

pub fn regression_operator(env: &CountryVariableTable, sm: &SpecializationMatrix) -> Result<EnvironmentOperator> {
    if env.countries() != sm.country_labels() {
        return Err(Error::Argument("country variables are not aligned with the specialization matrix".into()));
    }
    let y = env.y().clone();
    let w = sm.weights();
    if y.ncols() > y.nrows() {
        return Err(Error::OverParameterized { variables: env.z(), countries: y.nrows() });
    }
    let wy = DMatrix::from_fn(y.nrows(), y.ncols(), |i, j| w[i] * y[(i, j)]);
    let gram = y.transpose() * &wy;
    let gram = (&gram + gram.transpose()) * 0.5;

    let sv = gram.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let rcond = if smax > 0.0 { smin / smax } else { 0.0 };
    if rcond.is_nan() || rcond < MIN_RCOND {
        return Err(Error::Collinear { smallest_singular_value: smin });
    }
    let chol = gram.cholesky().ok_or(Error::Collinear { smallest_singular_value: smin })?;
    let t = chol.solve(&wy.transpose());
    Ok(EnvironmentOperator { y, t, chol_l: chol.l(), rcond })
}
