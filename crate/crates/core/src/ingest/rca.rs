use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::prune::PruneReport;
use super::trade::TradeTable;
use crate::error::{Error, Result};

/// Revealed comparative advantage, products in rows and countries in columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RcaMatrix {
    pub values: DMatrix<f64>,
    pub product_labels: Vec<String>,
    pub country_labels: Vec<String>,
    pub pruned: PruneReport,
}

/// `R_qp = (v_qp / Σ_c v_qc) / (Σ_r v_rp / Σ_rc v_rc)`: the share of country
/// `p` in world exports of `q`, relative to its share in all world exports.
///
/// Products and countries with zero total exports are dropped first.
pub fn compute_rca(t: &TradeTable) -> Result<RcaMatrix> {
    let mut product_total: BTreeMap<&str, f64> = BTreeMap::new();
    let mut country_total: BTreeMap<&str, f64> = BTreeMap::new();
    for r in t.records() {
        *product_total.entry(&r.product).or_insert(0.0) += r.value;
        *country_total.entry(&r.country).or_insert(0.0) += r.value;
    }

    let mut pruned = PruneReport::default();
    let mut keep = |totals: &BTreeMap<&str, f64>, product: bool| -> BTreeMap<String, usize> {
        let mut index = BTreeMap::new();
        for (&label, &total) in totals {
            if total > 0.0 {
                let i = index.len();
                index.insert(label.to_string(), i);
            } else if product {
                pruned.drop_product(label, "zero total exports");
            } else {
                pruned.drop_country(label, "zero total exports");
            }
        }
        index
    };
    let products = keep(&product_total, true);
    let countries = keep(&country_total, false);
    if products.len() < 2 || countries.len() < 2 {
        return Err(Error::Degenerate(format!(
            "{} products and {} countries with positive exports; need at least 2 of each",
            products.len(),
            countries.len()
        )));
    }

    let mut v = DMatrix::zeros(products.len(), countries.len());
    for r in t.records() {
        if let (Some(&q), Some(&p)) = (products.get(&r.product), countries.get(&r.country)) {
            v[(q, p)] += r.value;
        }
    }
    let grand: f64 = v.sum();
    let row_totals: Vec<f64> = v.row_iter().map(|r| r.sum()).collect();
    let col_totals: Vec<f64> = v.column_iter().map(|c| c.sum()).collect();
    let values = DMatrix::from_fn(v.nrows(), v.ncols(), |q, p| (v[(q, p)] / row_totals[q]) / (col_totals[p] / grand));

    Ok(RcaMatrix {
        values,
        product_labels: products.into_keys().collect(),
        country_labels: countries.into_keys().collect(),
        pruned,
    })
}
