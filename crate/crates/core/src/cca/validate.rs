use nalgebra::DVector;
use serde::Serialize;

use super::EnvironmentOperator;
use crate::ingest::SpecializationMatrix;
use crate::ordination::Ordination;
use crate::weighted;

/// Relative tolerance every residual is checked against.
pub const VALIDATION_TOL: f64 = 1e-8;

/// Raw residuals of one axis. Pass/fail uses the scale-free versions
/// (divided by the norms involved).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisResiduals {
    pub axis: usize,
    /// `|d' V_j|`
    pub diversity_v: f64,
    /// `|s' U_j|`
    pub ubiquity_u: f64,
    /// `|d' E_j|` for the standardized axis.
    pub diversity_e: f64,
    /// `|E_j' W E_j − 1|`
    pub unit_variance: f64,
    /// `‖H E_j − E_j‖ / ‖E_j‖`; absent for CA.
    pub span: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub tolerance: f64,
    pub axes: Vec<AxisResiduals>,
    pub passed: bool,
}

pub fn validate_ordination(
    result: &dyn Ordination,
    sm: &SpecializationMatrix,
    env: Option<&EnvironmentOperator>,
) -> OrthogonalityReport {
    let d = sm.diversity_vector();
    let s = sm.ubiquity_vector();
    let w = sm.weights();
    // scores on a near-zero axis are themselves near zero; measure against E
    let rel = |dotp: f64, a: &DVector<f64>, b: &DVector<f64>, e: &DVector<f64>| {
        let scale = a.norm() * b.norm().max(e.norm());
        if scale > 0.0 {
            dotp / scale
        } else {
            dotp
        }
    };
    let axes = (0..result.num_axes())
        .map(|j| {
            let v = result.country_scores().column(j).into_owned();
            let u = result.product_scores().column(j).into_owned();
            let e = result.standardized_axes().column(j).into_owned();
            let diversity_v = d.dot(&v).abs();
            let ubiquity_u = s.dot(&u).abs();
            let diversity_e = d.dot(&e).abs();
            let unit_variance = (weighted::dot(w, &e, &e) - 1.0).abs();
            let span = env.map(|op| (op.project(&e) - &e).norm() / e.norm().max(f64::MIN_POSITIVE));
            let passed = rel(diversity_v, &d, &v, &e) <= VALIDATION_TOL
                && rel(ubiquity_u, &s, &u, &e) <= VALIDATION_TOL
                && rel(diversity_e, &d, &e, &e) <= VALIDATION_TOL
                && unit_variance <= VALIDATION_TOL
                && span.is_none_or(|r| r <= VALIDATION_TOL);
            AxisResiduals { axis: j + 1, diversity_v, ubiquity_u, diversity_e, unit_variance, span, passed }
        })
        .collect::<Vec<_>>();
    let passed = axes.iter().all(|a| a.passed);
    OrthogonalityReport { tolerance: VALIDATION_TOL, axes, passed }
}
