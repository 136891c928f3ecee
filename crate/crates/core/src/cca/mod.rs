//! Canonical correspondence analysis: CA with the country axes constrained
//! to linear combinations of country variables.
//!
//! The core operator is `Φ = Y T C^c`. Both `H = Y T` and `C^c` are
//! self-adjoint in the W inner product, so on `span(Y)` the eigenproblem of
//! `Φ` reduces to a small symmetric one in a W-orthonormal basis of
//! `span(Y)`. That is what [`cca_eigen`] solves. [`cca_iterative`] runs the
//! fixed-point algorithm (average, regress, standardize) axis by axis and is
//! kept as an independent check.

mod regression;
mod validate;

use nalgebra::{DMatrix, DVector};

pub use regression::{regression_operator, EnvironmentOperator, MIN_RCOND};
pub use validate::{validate_ordination, AxisResiduals, OrthogonalityReport, VALIDATION_TOL};

use crate::ca::{cooccurrence_country, cooccurrence_trace, TRIVIAL_TOL};
use crate::error::{Error, Result};
use crate::ingest::{CountryVariableTable, SpecializationMatrix};
use crate::iterate;
use crate::ordination::{
    has_repeats, inertia_shares, orientation_flips, symmetric_eigen_desc, MethodMeta, Ordination, OrdinationKind,
    Orientation, SignConvention, SolveOptions,
};
use crate::weighted;

#[derive(Debug, Clone, PartialEq)]
pub struct CcaResult {
    /// Non-trivial canonical eigenvalues, descending.
    pub lambda: Vec<f64>,
    /// Predicted country scores as produced by the solver (`m × k`).
    pub e: DMatrix<f64>,
    /// `E` standardized to weighted mean 0 and weighted variance 1.
    pub e_std: DMatrix<f64>,
    /// Product scores `Xu · E_std` (`n × k`).
    pub u: DMatrix<f64>,
    /// Country scores `C^c · E_std` (`m × k`).
    pub v: DMatrix<f64>,
    /// Regression coefficients `T · V` (`(z+1) × k`, constant last).
    pub b: DMatrix<f64>,
    pub inertia_shares: Vec<f64>,
    pub trace: f64,
    pub meta: MethodMeta,
}

impl Ordination for CcaResult {
    fn kind(&self) -> OrdinationKind {
        OrdinationKind::Cca
    }
    fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }
    fn inertia_shares(&self) -> &[f64] {
        &self.inertia_shares
    }
    fn trace(&self) -> f64 {
        self.trace
    }
    fn standardized_axes(&self) -> &DMatrix<f64> {
        &self.e_std
    }
    fn product_scores(&self) -> &DMatrix<f64> {
        &self.u
    }
    fn country_scores(&self) -> &DMatrix<f64> {
        &self.v
    }
    fn meta(&self) -> &MethodMeta {
        &self.meta
    }
}

/// `Φ = Y T C^c`, built explicitly. Solvers never need it; diagnostics do.
pub fn phi_matrix(op: &EnvironmentOperator, sm: &SpecializationMatrix) -> DMatrix<f64> {
    op.hat() * cooccurrence_country(sm)
}

fn check(sm: &SpecializationMatrix, env: &CountryVariableTable, opts: &SolveOptions) -> Result<()> {
    opts.check()?;
    if opts.num_axes > env.z() {
        return Err(Error::Argument(format!(
            "num_axes {} exceeds the number of country variables {}",
            opts.num_axes,
            env.z()
        )));
    }
    sm.ensure_connected()
}

pub fn cca_eigen(sm: &SpecializationMatrix, env: &CountryVariableTable, opts: &SolveOptions) -> Result<CcaResult> {
    check(sm, env, opts)?;
    let op = regression_operator(env, sm)?;
    let cc = cooccurrence_country(sm);
    let w = sm.weights();

    let q = op.w_orthonormal_basis();
    let wcq = DMatrix::from_fn(q.nrows(), q.ncols(), |i, j| w[i] * q[(i, j)]);
    let k_mat = wcq.transpose() * (&cc * &q);
    let (values, vectors) = symmetric_eigen_desc(k_mat);

    if (values[0] - 1.0).abs() > TRIVIAL_TOL {
        return Err(Error::Numerical(format!("trivial eigenvalue of Φ is {} instead of 1", values[0])));
    }
    if values.len() > 1 && values[1] > 1.0 - TRIVIAL_TOL {
        return Err(Error::Numerical(format!("eigenvalue 1 of Φ repeated ({})", values[1])));
    }

    let k = opts.num_axes;
    let mut e_cols = Vec::with_capacity(k);
    let mut axes = Vec::with_capacity(k);
    for j in 1..=k {
        let e = &q * vectors.column(j);
        let axis = weighted::standardize(w, &e)
            .ok_or_else(|| Error::Numerical(format!("canonical axis {j} has zero weighted variance")))?;
        e_cols.push(e);
        axes.push(axis);
    }
    let lambda = values[1..=k].to_vec();
    let meta = MethodMeta {
        solver: "eigen".into(),
        iterations: Vec::new(),
        residual: 0.0,
        repeated_eigenvalues: has_repeats(&values[1..(k + 2).min(values.len())]),
    };
    assemble(sm, env, &op, &cc, e_cols, axes, lambda, meta, opts.sign)
}

/// The iterative algorithm: from arbitrary distinct country scores, repeat
/// product averages → country averages → weighted regression on `Y` →
/// fitted values → W-orthogonalization against earlier axes → weighted
/// standardization, until the scores stop changing.
pub fn cca_iterative(sm: &SpecializationMatrix, env: &CountryVariableTable, opts: &SolveOptions) -> Result<CcaResult> {
    check(sm, env, opts)?;
    let op = regression_operator(env, sm)?;
    let cc = cooccurrence_country(sm);
    let xu = sm.xu();
    let xd_t = sm.xd().transpose();
    let step = |x: &DVector<f64>| {
        let products = xu * x;
        let countries = &xd_t * products;
        op.project(&countries)
    };
    let found = iterate::extract_axes(sm.weights(), opts.num_axes, opts.init_seed, opts.tol, opts.max_iter, step)?;
    let lambda: Vec<f64> = found.iter().map(|a| a.eigenvalue).collect();
    let meta = MethodMeta {
        solver: "iterative".into(),
        iterations: found.iter().map(|a| a.iterations).collect(),
        residual: 0.0,
        repeated_eigenvalues: has_repeats(&lambda),
    };
    let e_cols = found.iter().map(|a| a.raw.clone()).collect();
    let axes = found.into_iter().map(|a| a.axis).collect();
    assemble(sm, env, &op, &cc, e_cols, axes, lambda, meta, opts.sign)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    sm: &SpecializationMatrix,
    env: &CountryVariableTable,
    op: &EnvironmentOperator,
    cc: &DMatrix<f64>,
    mut e_cols: Vec<DVector<f64>>,
    mut axes: Vec<DVector<f64>>,
    lambda: Vec<f64>,
    mut meta: MethodMeta,
    sign: SignConvention,
) -> Result<CcaResult> {
    let w = sm.weights();
    let diversity: Vec<f64> = sm.diversity().iter().map(|&d| d as f64).collect();
    for (axis, e) in axes.iter_mut().zip(e_cols.iter_mut()) {
        let rule = match sign {
            SignConvention::Auto | SignConvention::FirstVariable => {
                Orientation::Intraclass { weights: w, variable: env.variable(0), scores: cc * &*axis }
            }
            SignConvention::Diversity => Orientation::Pearson(&diversity),
            SignConvention::LargestEntry => Orientation::LargestEntry,
        };
        if orientation_flips(axis, &rule) {
            axis.neg_mut();
            e.neg_mut();
        }
    }
    let m = sm.n_countries();
    let e_std = weighted::from_columns(m, &axes);
    let e = weighted::from_columns(m, &e_cols);
    let u = sm.xu() * &e_std;
    let v = cc * &e_std;
    let b = op.t() * &v;
    meta.residual = (0..axes.len())
        .map(|j| (op.project(&v.column(j).into_owned()) - &axes[j] * lambda[j]).amax())
        .fold(0.0, f64::max);
    let trace = cooccurrence_trace(sm);
    let shares = inertia_shares(&lambda, trace)?;
    Ok(CcaResult { lambda, e, e_std, u, v, b, inertia_shares: shares, trace, meta })
}
