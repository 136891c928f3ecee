//! Biplots: Type-1 scaled country and product coordinates, variable rays,
//! product-group centroids, and SVG/CSV output.

mod groups;
mod model;
mod svg;

use nalgebra::DMatrix;

pub use groups::{group_centroids, parse_lall_csv, CentroidRow, CentroidTable, LALL_CATEGORIES, UNMAPPED_GROUP};
pub use model::{
    assemble_biplot, write_points_csv, write_rays_csv, AxisLabel, BiplotModel, BiplotOptions, Point, PointKind,
    ProductLayer, Ray, LABEL_LIMIT,
};
pub use svg::render_svg;

use crate::error::{Error, Result};
use crate::ingest::{CountryVariableTable, SpecializationMatrix};
use crate::ordination::{Ordination, OrdinationKind};
use crate::weighted;

/// Scores divided column-wise by `√λ`. Countries stay the barycenters of
/// their products: `V̂ = Xd' Û`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledScores {
    pub kind: OrdinationKind,
    pub u_hat: DMatrix<f64>,
    pub v_hat: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub inertia_shares: Vec<f64>,
}

impl ScaledScores {
    pub fn num_axes(&self) -> usize {
        self.eigenvalues.len()
    }
}

pub fn scale_type1(result: &dyn Ordination) -> Result<ScaledScores> {
    let lambda = result.eigenvalues();
    if let Some(j) = lambda.iter().position(|&l| l.is_nan() || l <= 0.0) {
        return Err(Error::Degenerate(format!("axis {} has eigenvalue {} and cannot be scaled", j + 1, lambda[j])));
    }
    let scale = |m: &DMatrix<f64>| {
        let mut out = m.clone();
        for (j, &l) in lambda.iter().enumerate() {
            out.column_mut(j).scale_mut(1.0 / l.sqrt());
        }
        out
    };
    Ok(ScaledScores {
        kind: result.kind(),
        u_hat: scale(result.product_scores()),
        v_hat: scale(result.country_scores()),
        eigenvalues: lambda.to_vec(),
        inertia_shares: result.inertia_shares().to_vec(),
    })
}

/// Intraclass correlations `A_ij = Y_i' W Ṽ_j`, one row per country variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableRays {
    pub names: Vec<String>,
    /// `z × k`.
    pub a: DMatrix<f64>,
}

/// Correlates every country variable with every country axis `V_j`. Works
/// the same for CA and CCA; any per-axis rescaling of `V` leaves `A` unchanged.
pub fn intraclass_correlations(
    env: &CountryVariableTable,
    country_scores: &DMatrix<f64>,
    sm: &SpecializationMatrix,
) -> Result<VariableRays> {
    if env.countries() != sm.country_labels() || country_scores.nrows() != sm.n_countries() {
        return Err(Error::Argument("country variables are not aligned with the ordination".into()));
    }
    let w = sm.weights();
    let k = country_scores.ncols();
    let mut a = DMatrix::zeros(env.z(), k);
    for j in 0..k {
        let v = country_scores.column(j).into_owned();
        let v_std = weighted::standardize(w, &v)
            .ok_or_else(|| Error::Degenerate(format!("country axis {} has zero weighted variance", j + 1)))?;
        for i in 0..env.z() {
            a[(i, j)] = weighted::dot(w, &env.variable(i), &v_std);
        }
    }
    Ok(VariableRays { names: env.names().to_vec(), a })
}
