use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use super::config::{ConfigEcho, Method};
use crate::ca::ReflectionsTrace;
use crate::cca::{EnvironmentOperator, OrthogonalityReport};
use crate::error::{Error, Result};
use crate::format::fmt12;
use crate::ingest::{PruneReport, SpecializationMatrix};
use crate::ordination::{EquivalenceReport, Ordination, OrdinationKind};

fn csv_out(e: csv::Error) -> Error {
    Error::Output(e.to_string())
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Output(format!("{}: {e}", path.display())))
}

/// `<key>,<prefix>1,...,<prefix>k`, one row per label.
pub fn write_scores(path: &Path, key: &str, prefix: &str, labels: &[String], m: &DMatrix<f64>) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec![key.to_string()];
    header.extend((1..=m.ncols()).map(|j| format!("{prefix}{j}")));
    w.write_record(&header).map_err(csv_out)?;
    for (i, label) in labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(m.row(i).iter().map(|&v| fmt12(v)));
        w.write_record(&rec).map_err(csv_out)?;
    }
    w.flush()?;
    Ok(())
}

/// `variable,axis,coefficient`, constant last.
pub fn write_coefficients(path: &Path, names: &[String], b: &DMatrix<f64>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["variable", "axis", "coefficient"]).map_err(csv_out)?;
    for i in 0..b.nrows() {
        let name = names.get(i).map_or("constant", String::as_str);
        for j in 0..b.ncols() {
            w.write_record([name, &(j + 1).to_string(), &fmt12(b[(i, j)])]).map_err(csv_out)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `entity,kind,step0,...,stepK`.
pub fn write_reflections(path: &Path, sm: &SpecializationMatrix, trace: &ReflectionsTrace) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["entity".to_string(), "kind".to_string()];
    header.extend((0..trace.country.len()).map(|i| format!("step{i}")));
    w.write_record(&header).map_err(csv_out)?;
    let sides = [("country", sm.country_labels(), &trace.country), ("product", sm.product_labels(), &trace.product)];
    for (kind, labels, steps) in sides {
        for (i, label) in labels.iter().enumerate() {
            let mut rec = vec![label.clone(), kind.to_string()];
            rec.extend(steps.iter().map(|v| fmt12(v[i])));
            w.write_record(&rec).map_err(csv_out)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Output(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| super::io_error(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct BiplotSummary {
    pub axis_pair: (usize, usize),
    pub axis_labels: [String; 2],
    pub countries: usize,
    pub products: usize,
    pub centroids: usize,
    pub rays: usize,
    pub clipped: Vec<String>,
    pub unmapped_products: Vec<String>,
}

/// Everything a run computed, minus the score tables. Contains no paths or
/// timestamps, so identical inputs give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub command: &'static str,
    pub ordination: OrdinationKind,
    pub method: Method,
    pub config: ConfigEcho,
    pub input_digests: BTreeMap<String, String>,
    pub products: usize,
    pub countries: usize,
    pub pruned: PruneReport,
    pub eigenvalues: Vec<f64>,
    pub inertia_shares: Vec<f64>,
    pub trace: f64,
    /// Iterations per axis, keyed by solver; empty for direct solvers.
    pub iterations: BTreeMap<String, Vec<usize>>,
    pub solver_residuals: BTreeMap<String, f64>,
    pub repeated_eigenvalues: bool,
    pub residuals: OrthogonalityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub biplot: Option<BiplotSummary>,
    pub warnings: Vec<String>,
}

pub struct ReportInputs<'a> {
    pub command: &'static str,
    pub method: Method,
    pub config: ConfigEcho,
    pub digests: &'a BTreeMap<String, String>,
    pub sm: &'a SpecializationMatrix,
    pub operator: Option<&'a EnvironmentOperator>,
    pub equivalence: Option<EquivalenceReport>,
    pub spectrum: Option<Vec<f64>>,
}

impl RunReport {
    pub fn new<'a, T: Ordination + 'a>(inputs: ReportInputs<'_>, results: impl IntoIterator<Item = &'a T>) -> Self {
        let results: Vec<&T> = results.into_iter().collect();
        let first = results[0];
        let mut iterations = BTreeMap::new();
        let mut solver_residuals = BTreeMap::new();
        for r in &results {
            iterations.insert(r.meta().solver.clone(), r.meta().iterations.clone());
            solver_residuals.insert(r.meta().solver.clone(), r.meta().residual);
        }
        let residuals = crate::cca::validate_ordination(first, inputs.sm, inputs.operator);
        let mut warnings = Vec::new();
        if first.meta().repeated_eigenvalues {
            warnings.push("retained eigenvalues repeat; axes are only determined up to rotation".to_string());
        }
        RunReport {
            version: env!("CARGO_PKG_VERSION"),
            command: inputs.command,
            ordination: first.kind(),
            method: inputs.method,
            config: inputs.config,
            input_digests: inputs.digests.clone(),
            products: inputs.sm.n_products(),
            countries: inputs.sm.n_countries(),
            pruned: inputs.sm.pruned().clone(),
            eigenvalues: first.eigenvalues().to_vec(),
            inertia_shares: first.inertia_shares().to_vec(),
            trace: first.trace(),
            iterations,
            solver_residuals,
            repeated_eigenvalues: first.meta().repeated_eigenvalues,
            residuals,
            equivalence: inputs.equivalence,
            spectrum: inputs.spectrum,
            biplot: None,
            warnings,
        }
    }
}
