//! What CA and CCA results have in common, plus the knobs every solver takes.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weighted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrdinationKind {
    Ca,
    Cca,
}

impl OrdinationKind {
    /// Axis label prefix used in reports and biplots.
    pub fn axis_prefix(self) -> &'static str {
        match self {
            OrdinationKind::Ca => "CA",
            OrdinationKind::Cca => "CCA",
        }
    }
}

/// How each extracted axis is oriented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// `Diversity` for CA, `FirstVariable` for CCA.
    #[default]
    Auto,
    /// Non-negative unweighted Pearson correlation with diversity.
    Diversity,
    /// Non-negative intraclass correlation with the first country variable.
    FirstVariable,
    /// Largest-magnitude entry positive.
    LargestEntry,
}

impl FromStr for SignConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SignConvention::Auto),
            "diversity" => Ok(SignConvention::Diversity),
            "first-variable" => Ok(SignConvention::FirstVariable),
            "largest" | "largest-entry" => Ok(SignConvention::LargestEntry),
            _ => Err(Error::Argument(format!(
                "unknown sign convention `{s}` (expected auto, diversity, first-variable, largest)"
            ))),
        }
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignConvention::Auto => "auto",
            SignConvention::Diversity => "diversity",
            SignConvention::FirstVariable => "first-variable",
            SignConvention::LargestEntry => "largest",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub num_axes: usize,
    /// Convergence threshold on the max absolute change of standardized scores.
    pub tol: f64,
    pub max_iter: usize,
    pub sign: SignConvention,
    /// Iterative solvers only: `None` starts from the standardized country
    /// index rank, `Some(seed)` from seeded random values.
    pub init_seed: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { num_axes: 1, tol: 1e-10, max_iter: 10_000, sign: SignConvention::Auto, init_seed: None }
    }
}

impl SolveOptions {
    pub fn with_axes(num_axes: usize) -> Self {
        SolveOptions { num_axes, ..Default::default() }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Argument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.num_axes == 0 {
            return Err(Error::Argument("num_axes must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Argument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Solver bookkeeping carried on every result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodMeta {
    pub solver: String,
    /// Iterations per axis; empty for direct solvers.
    pub iterations: Vec<usize>,
    /// Largest `‖A v − λ v‖∞` over retained axes.
    pub residual: f64,
    /// Two retained eigenvalues closer than `1e-10`: axes are then only
    /// determined up to rotation within their eigenspace.
    pub repeated_eigenvalues: bool,
}

/// A country/product ordination, CA or CCA.
pub trait Ordination {
    fn kind(&self) -> OrdinationKind;
    fn eigenvalues(&self) -> &[f64];
    fn inertia_shares(&self) -> &[f64];
    /// `tr(C^c)`.
    fn trace(&self) -> f64;
    /// W-standardized country axes: ECI and beyond for CA, `E_std` for CCA.
    fn standardized_axes(&self) -> &DMatrix<f64>;
    /// `U = Xu · standardized_axes`.
    fn product_scores(&self) -> &DMatrix<f64>;
    /// `V = C^c · standardized_axes`.
    fn country_scores(&self) -> &DMatrix<f64>;
    fn meta(&self) -> &MethodMeta;

    fn num_axes(&self) -> usize {
        self.eigenvalues().len()
    }
}

/// `λ_i / (trace − 1)`.
pub fn inertia_shares(eigenvalues: &[f64], trace: f64) -> Result<Vec<f64>> {
    if trace.is_nan() || trace <= 1.0 + 1e-12 {
        return Err(Error::Degenerate(format!("trace {trace} leaves no non-trivial inertia")));
    }
    Ok(eigenvalues.iter().map(|l| l / (trace - 1.0)).collect())
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
///
/// The sort is stable, so exact ties keep the solver's order.
pub(crate) fn symmetric_eigen_desc(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, vectors)
}

/// Eigenvalues closer than this are treated as one repeated eigenvalue.
pub(crate) const REPEAT_TOL: f64 = 1e-10;

pub(crate) fn has_repeats(eigenvalues: &[f64]) -> bool {
    eigenvalues.windows(2).any(|w| (w[0] - w[1]).abs() <= REPEAT_TOL)
}

/// Flip `axis` so that the orientation rule holds. `reference` is diversity
/// (unweighted Pearson) or the first standardized variable paired with the
/// axis's country scores (weighted correlation).
pub(crate) enum Orientation<'a> {
    Pearson(&'a [f64]),
    Intraclass { weights: &'a DVector<f64>, variable: DVector<f64>, scores: DVector<f64> },
    LargestEntry,
}

pub(crate) fn orientation_flips(axis: &DVector<f64>, rule: &Orientation<'_>) -> bool {
    const ZERO: f64 = 1e-10;
    let corr = match rule {
        Orientation::Pearson(reference) => weighted::pearson(axis.as_slice(), reference),
        Orientation::Intraclass { weights, variable, scores } => weighted::correlation(weights, variable, scores),
        Orientation::LargestEntry => 0.0,
    };
    if corr.abs() > ZERO {
        corr < 0.0
    } else {
        axis[weighted::argmax_abs(axis)] < 0.0
    }
}

/// Per-axis agreement of two ordinations of the same data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisAgreement {
    pub axis: usize,
    /// |weighted correlation| of the standardized country axes. For a
    /// repeated eigenvalue, the right axis is measured against the whole
    /// eigenspace spanned by the matching left axes.
    pub abs_correlation: f64,
    /// Number of retained left axes sharing this axis's eigenvalue.
    pub multiplicity: usize,
    pub eigenvalue_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub left: String,
    pub right: String,
    pub axes: Vec<AxisAgreement>,
}

impl EquivalenceReport {
    pub fn min_abs_correlation(&self) -> f64 {
        self.axes.iter().map(|a| a.abs_correlation).fold(1.0, f64::min)
    }

    pub fn max_eigenvalue_gap(&self) -> f64 {
        self.axes.iter().map(|a| a.eigenvalue_gap).fold(0.0, f64::max)
    }
}

pub fn compare_ordinations(left: &dyn Ordination, right: &dyn Ordination, weights: &DVector<f64>) -> EquivalenceReport {
    let k = left.num_axes().min(right.num_axes());
    let lambda = left.eigenvalues();
    let axes = (0..k)
        .map(|j| {
            let b = right.standardized_axes().column(j).into_owned();
            let space: Vec<usize> =
                (0..left.num_axes()).filter(|&i| (lambda[i] - lambda[j]).abs() <= REPEAT_TOL).collect();
            let fit: f64 = space
                .iter()
                .map(|&i| weighted::correlation(weights, &left.standardized_axes().column(i).into_owned(), &b).powi(2))
                .sum();
            AxisAgreement {
                axis: j + 1,
                abs_correlation: fit.sqrt(),
                multiplicity: space.len(),
                eigenvalue_gap: (lambda[j] - right.eigenvalues()[j]).abs(),
            }
        })
        .collect();
    EquivalenceReport { left: left.meta().solver.clone(), right: right.meta().solver.clone(), axes }
}
