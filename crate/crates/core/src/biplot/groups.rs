use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ingest::SpecializationMatrix;

/// Lall technology categories, in table order.
pub const LALL_CATEGORIES: [&str; 11] = ["PPm", "PPo", "RBa", "RBo", "LTt", "LTo", "MTa", "MTp", "MTe", "HTe", "HTo"];

/// Group for products the mapping does not mention.
pub const UNMAPPED_GROUP: &str = "unmapped";

/// Read `product,category`. Every category must be one of [`LALL_CATEGORIES`].
pub fn parse_lall_csv<R: Read>(reader: R) -> Result<BTreeMap<String, String>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows = rdr.records();
    match rows.next() {
        None => return Err(Error::EmptyTable),
        Some(h) => {
            let h = h.map_err(crate::ingest::csv_error)?;
            if h.iter().collect::<Vec<_>>() != ["product", "category"] {
                return Err(Error::Parse { line: 1, message: "expected header `product,category`".into() });
            }
        }
    }
    let mut mapping = BTreeMap::new();
    let mut unknown = BTreeSet::new();
    for row in rows {
        let row = row.map_err(crate::ingest::csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let (product, category) = (&row[0], &row[1]);
        if !LALL_CATEGORIES.contains(&category) {
            unknown.insert(category.to_string());
        }
        if mapping.insert(product.to_string(), category.to_string()).is_some() {
            return Err(Error::Parse { line, message: format!("product {product} listed twice") });
        }
    }
    if !unknown.is_empty() {
        return Err(Error::UnknownCategory(unknown.into_iter().collect()));
    }
    Ok(mapping)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidRow {
    pub group: String,
    /// Ubiquity-weighted mean of the members' scaled scores, one per axis.
    pub coords: Vec<f64>,
    pub total_ubiquity: f64,
    pub mean_ubiquity: f64,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CentroidTable {
    pub rows: Vec<CentroidRow>,
    /// Products that fell into the unmapped group.
    pub unmapped: Vec<String>,
    /// Warnings for groups named in the mapping that have no product left.
    pub warnings: Vec<String>,
}

impl CentroidTable {
    pub fn get(&self, group: &str) -> Option<&CentroidRow> {
        self.rows.iter().find(|r| r.group == group)
    }
}

fn group_rank(group: &str) -> (usize, String) {
    match LALL_CATEGORIES.iter().position(|c| *c == group) {
        Some(i) => (i, String::new()),
        None if group == UNMAPPED_GROUP => (LALL_CATEGORIES.len() + 1, String::new()),
        None => (LALL_CATEGORIES.len(), group.to_string()),
    }
}

/// Ubiquity-weighted centroid per product group. Groups follow Lall order,
/// then any other labels alphabetically, then the unmapped group.
pub fn group_centroids(
    u_hat: &DMatrix<f64>,
    sm: &SpecializationMatrix,
    mapping: &BTreeMap<String, String>,
) -> Result<CentroidTable> {
    if u_hat.nrows() != sm.n_products() {
        return Err(Error::Argument("product scores are not aligned with the specialization matrix".into()));
    }
    let ubiquity = sm.ubiquity();
    let mut members: BTreeMap<(usize, String), (String, Vec<usize>)> = BTreeMap::new();
    let mut unmapped = Vec::new();
    for (q, product) in sm.product_labels().iter().enumerate() {
        let group = match mapping.get(product) {
            Some(g) => g.as_str(),
            None => {
                unmapped.push(product.clone());
                UNMAPPED_GROUP
            }
        };
        members.entry(group_rank(group)).or_insert_with(|| (group.to_string(), Vec::new())).1.push(q);
    }

    let present: BTreeSet<&str> = members.values().map(|(g, _)| g.as_str()).collect();
    let warnings = mapping
        .values()
        .map(String::as_str)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|g| !present.contains(g))
        .map(|g| format!("group {g} has no products in the specialization matrix and is omitted"))
        .collect();

    let k = u_hat.ncols();
    let rows = members
        .into_values()
        .map(|(group, qs)| {
            let total: f64 = qs.iter().map(|&q| ubiquity[q] as f64).sum();
            let coords = (0..k)
                // s_q / total is exactly 1 for a singleton, so it reproduces the product
                .map(|j| qs.iter().map(|&q| ubiquity[q] as f64 / total * u_hat[(q, j)]).sum::<f64>())
                .collect();
            CentroidRow {
                group,
                coords,
                total_ubiquity: total,
                mean_ubiquity: total / qs.len() as f64,
                members: qs.len(),
            }
        })
        .collect();
    Ok(CentroidTable { rows, unmapped, warnings })
}
