//! Classic correspondence analysis of the specialization matrix: ECI, PCI
//! and the higher axes.

mod reciprocal;
mod reflections;

use nalgebra::{DMatrix, DVector};

pub use reciprocal::{reciprocal_averaging, ReciprocalAveraging};
pub use reflections::{method_of_reflections, ReflectionsTrace};

use crate::error::{Error, Result};
use crate::ingest::SpecializationMatrix;
use crate::iterate;
use crate::ordination::{
    has_repeats, inertia_shares, orientation_flips, symmetric_eigen_desc, MethodMeta, Ordination, OrdinationKind,
    Orientation, SignConvention, SolveOptions,
};
use crate::weighted;

/// Tolerance on the trivial eigenvalue and on the gap below it.
pub(crate) const TRIVIAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CaResult {
    /// Retained non-trivial eigenvalues of `C^c`, descending.
    pub eigenvalues: Vec<f64>,
    /// `m × k`, column 1 is the ECI. Each column has weighted mean 0 and
    /// weighted variance 1.
    pub country_axes: DMatrix<f64>,
    /// `n × k` = `Xu · country_axes`, column 1 is the PCI.
    pub product_axes: DMatrix<f64>,
    /// `m × k` = `C^c · country_axes`.
    pub country_scores: DMatrix<f64>,
    pub inertia_shares: Vec<f64>,
    pub trace: f64,
    /// Every non-trivial eigenvalue (direct solver only).
    pub spectrum: Option<Vec<f64>>,
    pub meta: MethodMeta,
}

impl Ordination for CaResult {
    fn kind(&self) -> OrdinationKind {
        OrdinationKind::Ca
    }
    fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
    fn inertia_shares(&self) -> &[f64] {
        &self.inertia_shares
    }
    fn trace(&self) -> f64 {
        self.trace
    }
    fn standardized_axes(&self) -> &DMatrix<f64> {
        &self.country_axes
    }
    fn product_scores(&self) -> &DMatrix<f64> {
        &self.product_axes
    }
    fn country_scores(&self) -> &DMatrix<f64> {
        &self.country_scores
    }
    fn meta(&self) -> &MethodMeta {
        &self.meta
    }
}

/// `C^c = Xd' · Xu`, the `m × m` country-by-country matrix. Row-stochastic.
pub fn cooccurrence_country(sm: &SpecializationMatrix) -> DMatrix<f64> {
    sm.xd().transpose() * sm.xu()
}

/// `C^p = Xu · Xd'`, the `n × n` product-by-product matrix. Row-stochastic.
pub fn cooccurrence_product(sm: &SpecializationMatrix) -> DMatrix<f64> {
    sm.xu() * sm.xd().transpose()
}

/// `tr(C^c) = Σ x_qp / (d_p s_q)`.
pub fn cooccurrence_trace(sm: &SpecializationMatrix) -> f64 {
    let (d, s, x) = (sm.diversity(), sm.ubiquity(), sm.x());
    let mut t = 0.0;
    for p in 0..x.ncols() {
        for q in 0..x.nrows() {
            if x[(q, p)] != 0.0 {
                t += 1.0 / (d[p] as f64 * s[q] as f64);
            }
        }
    }
    t
}

/// Direct CA through the symmetric matrix `D^{-1/2} X' S^{-1} X D^{-1/2}`,
/// which is similar to `C^c`. Right eigenvectors of `C^c` are recovered by
/// multiplying with `D^{-1/2}`.
pub fn ca_eigen(sm: &SpecializationMatrix, opts: &SolveOptions) -> Result<CaResult> {
    opts.check()?;
    let m = sm.n_countries();
    if opts.num_axes > m - 1 {
        return Err(Error::Argument(format!("num_axes {} exceeds m - 1 = {}", opts.num_axes, m - 1)));
    }
    sm.ensure_connected()?;

    let d = sm.diversity_vector();
    let s = sm.ubiquity_vector();
    let x = sm.x();
    let a = DMatrix::from_fn(x.nrows(), m, |q, p| x[(q, p)] / (s[q] * d[p]).sqrt());
    let (values, vectors) = symmetric_eigen_desc(a.transpose() * &a);

    if (values[0] - 1.0).abs() > TRIVIAL_TOL {
        return Err(Error::Numerical(format!("trivial eigenvalue is {} instead of 1", values[0])));
    }
    if values[1] > 1.0 - TRIVIAL_TOL {
        sm.ensure_connected()?;
        return Err(Error::Numerical(format!("eigenvalue 1 repeated ({}) on connected data", values[1])));
    }

    let k = opts.num_axes;
    let w = sm.weights();
    let mut axes = Vec::with_capacity(k);
    for j in 1..=k {
        let right = vectors.column(j).component_div(&d.map(f64::sqrt));
        let axis = weighted::standardize(w, &right)
            .ok_or_else(|| Error::Numerical(format!("axis {j} has zero weighted variance")))?;
        axes.push(axis);
    }
    let eigenvalues = values[1..=k].to_vec();
    let spectrum = values[1..].to_vec();
    let meta = MethodMeta {
        solver: "eigen".into(),
        iterations: Vec::new(),
        residual: 0.0,
        repeated_eigenvalues: has_repeats(&values[1..(k + 2).min(m)]),
    };
    assemble(sm, axes, eigenvalues, Some(spectrum), meta, opts.sign)
}

/// CA by reciprocal averaging with deflation, one axis at a time.
pub fn ca_iterative(sm: &SpecializationMatrix, opts: &SolveOptions) -> Result<CaResult> {
    opts.check()?;
    let m = sm.n_countries();
    if opts.num_axes > m - 1 {
        return Err(Error::Argument(format!("num_axes {} exceeds m - 1 = {}", opts.num_axes, m - 1)));
    }
    sm.ensure_connected()?;
    let cc = cooccurrence_country(sm);
    let found =
        iterate::extract_axes(sm.weights(), opts.num_axes, opts.init_seed, opts.tol, opts.max_iter, |v| &cc * v)?;
    let eigenvalues: Vec<f64> = found.iter().map(|a| a.eigenvalue).collect();
    let meta = MethodMeta {
        solver: "iterative".into(),
        iterations: found.iter().map(|a| a.iterations).collect(),
        residual: 0.0,
        repeated_eigenvalues: has_repeats(&eigenvalues),
    };
    let axes = found.into_iter().map(|a| a.axis).collect();
    assemble(sm, axes, eigenvalues, None, meta, opts.sign)
}

pub(crate) fn orient_by_diversity(
    sm: &SpecializationMatrix,
    axis: &mut DVector<f64>,
    sign: SignConvention,
) -> Result<()> {
    let diversity: Vec<f64> = sm.diversity().iter().map(|&d| d as f64).collect();
    let rule = match sign {
        SignConvention::Auto | SignConvention::Diversity => Orientation::Pearson(&diversity),
        SignConvention::LargestEntry => Orientation::LargestEntry,
        SignConvention::FirstVariable => {
            return Err(Error::Argument("first-variable sign convention needs country variables (CCA)".into()))
        }
    };
    if orientation_flips(axis, &rule) {
        axis.neg_mut();
    }
    Ok(())
}

fn assemble(
    sm: &SpecializationMatrix,
    mut axes: Vec<DVector<f64>>,
    eigenvalues: Vec<f64>,
    spectrum: Option<Vec<f64>>,
    mut meta: MethodMeta,
    sign: SignConvention,
) -> Result<CaResult> {
    for axis in axes.iter_mut() {
        orient_by_diversity(sm, axis, sign)?;
    }
    let m = sm.n_countries();
    let country_axes = weighted::from_columns(m, &axes);
    let cc = cooccurrence_country(sm);
    let country_scores = &cc * &country_axes;
    let product_axes = sm.xu() * &country_axes;
    meta.residual =
        (0..axes.len()).map(|j| (country_scores.column(j) - &axes[j] * eigenvalues[j]).amax()).fold(0.0, f64::max);
    let trace = cooccurrence_trace(sm);
    let shares = inertia_shares(&eigenvalues, trace)?;
    Ok(CaResult {
        eigenvalues,
        country_axes,
        product_axes,
        country_scores,
        inertia_shares: shares,
        trace,
        spectrum,
        meta,
    })
}
