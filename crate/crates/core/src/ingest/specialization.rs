use nalgebra::{DMatrix, DVector};
use petgraph::unionfind::UnionFind;

use super::prune::PruneReport;
use super::rca::RcaMatrix;
use crate::error::{Error, Result};

/// Binary specialization matrix `X` (products × countries) with its margins
/// and the normalized views every ordination works from.
///
/// Construction guarantees there are no all-zero rows or columns, so every
/// diversity and ubiquity is at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecializationMatrix {
    x: DMatrix<f64>,
    product_labels: Vec<String>,
    country_labels: Vec<String>,
    diversity: Vec<usize>,
    ubiquity: Vec<usize>,
    x_plus: usize,
    xu: DMatrix<f64>,
    xd: DMatrix<f64>,
    weights: DVector<f64>,
    pruned: PruneReport,
}

/// One connected piece of the product–country graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub products: Vec<usize>,
    pub countries: Vec<usize>,
}

impl SpecializationMatrix {
    /// Wrap an already-pruned 0/1 matrix.
    pub fn from_binary(x: DMatrix<f64>, product_labels: Vec<String>, country_labels: Vec<String>) -> Result<Self> {
        Self::build(x, product_labels, country_labels, PruneReport::default())
    }

    /// Same as [`from_binary`](Self::from_binary) with labels `p0..` and `c0..`.
    pub fn with_default_labels(x: DMatrix<f64>) -> Result<Self> {
        let products = (0..x.nrows()).map(|i| format!("p{i}")).collect();
        let countries = (0..x.ncols()).map(|i| format!("c{i}")).collect();
        Self::from_binary(x, products, countries)
    }

    /// Drop all-zero rows and columns of a 0/1 matrix, then build.
    pub fn pruned_from_binary(
        x: DMatrix<f64>,
        product_labels: Vec<String>,
        country_labels: Vec<String>,
        reason: &str,
    ) -> Result<Self> {
        let mut report = PruneReport::default();
        let rows: Vec<usize> = (0..x.nrows())
            .filter(|&q| {
                let keep = x.row(q).iter().any(|&v| v != 0.0);
                if !keep {
                    report.drop_product(&product_labels[q], reason);
                }
                keep
            })
            .collect();
        // One pass: removing zero rows never changes a column sum.
        let cols: Vec<usize> = (0..x.ncols())
            .filter(|&p| {
                let keep = x.column(p).iter().any(|&v| v != 0.0);
                if !keep {
                    report.drop_country(&country_labels[p], reason);
                }
                keep
            })
            .collect();
        let sub = x.select_rows(&rows).select_columns(&cols);
        let products = rows.iter().map(|&q| product_labels[q].clone()).collect();
        let countries = cols.iter().map(|&p| country_labels[p].clone()).collect();
        Self::build(sub, products, countries, report)
    }

    fn build(
        x: DMatrix<f64>,
        product_labels: Vec<String>,
        country_labels: Vec<String>,
        pruned: PruneReport,
    ) -> Result<Self> {
        let (n, m) = x.shape();
        if product_labels.len() != n || country_labels.len() != m {
            return Err(Error::Argument(format!(
                "labels ({} products, {} countries) do not match a {n}x{m} matrix",
                product_labels.len(),
                country_labels.len()
            )));
        }
        if n < 2 || m < 2 {
            return Err(Error::Degenerate(format!("specialization matrix is {n}x{m}; need at least 2x2")));
        }
        if x.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::Argument("specialization matrix must be 0/1".into()));
        }
        let ubiquity: Vec<usize> = x.row_iter().map(|r| r.sum() as usize).collect();
        let diversity: Vec<usize> = x.column_iter().map(|c| c.sum() as usize).collect();
        if let Some(q) = ubiquity.iter().position(|&s| s == 0) {
            return Err(Error::Degenerate(format!("product {} has zero ubiquity", product_labels[q])));
        }
        if let Some(p) = diversity.iter().position(|&d| d == 0) {
            return Err(Error::Degenerate(format!("country {} has zero diversity", country_labels[p])));
        }
        let x_plus: usize = diversity.iter().sum();
        let xu = DMatrix::from_fn(n, m, |q, p| x[(q, p)] / ubiquity[q] as f64);
        let xd = DMatrix::from_fn(n, m, |q, p| x[(q, p)] / diversity[p] as f64);
        let weights = DVector::from_iterator(m, diversity.iter().map(|&d| d as f64 / x_plus as f64));
        Ok(SpecializationMatrix {
            x,
            product_labels,
            country_labels,
            diversity,
            ubiquity,
            x_plus,
            xu,
            xd,
            weights,
            pruned,
        })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn product_labels(&self) -> &[String] {
        &self.product_labels
    }

    pub fn country_labels(&self) -> &[String] {
        &self.country_labels
    }

    pub fn n_products(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_countries(&self) -> usize {
        self.x.ncols()
    }

    pub fn diversity(&self) -> &[usize] {
        &self.diversity
    }

    pub fn ubiquity(&self) -> &[usize] {
        &self.ubiquity
    }

    pub fn diversity_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.diversity.len(), self.diversity.iter().map(|&d| d as f64))
    }

    pub fn ubiquity_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.ubiquity.len(), self.ubiquity.iter().map(|&s| s as f64))
    }

    pub fn x_plus(&self) -> usize {
        self.x_plus
    }

    /// Rows of `X` divided by ubiquity.
    pub fn xu(&self) -> &DMatrix<f64> {
        &self.xu
    }

    /// Columns of `X` divided by diversity.
    pub fn xd(&self) -> &DMatrix<f64> {
        &self.xd
    }

    /// Diagonal of `W`: diversity over `x_plus`.
    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn pruned(&self) -> &PruneReport {
        &self.pruned
    }

    pub(crate) fn add_pruned(&mut self, report: &PruneReport) {
        let mut merged = report.clone();
        merged.merge(&self.pruned);
        self.pruned = merged;
    }

    /// Connected components of the bipartite product–country graph, largest
    /// (by country count, then product count) first.
    pub fn components(&self) -> Vec<Component> {
        let (n, m) = self.x.shape();
        let mut uf = UnionFind::<usize>::new(n + m);
        for p in 0..m {
            for q in 0..n {
                if self.x[(q, p)] != 0.0 {
                    uf.union(q, n + p);
                }
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut comps: Vec<Component> = Vec::new();
        let slot = |root: usize, roots: &mut Vec<usize>, comps: &mut Vec<Component>| {
            roots.iter().position(|&r| r == root).unwrap_or_else(|| {
                roots.push(root);
                comps.push(Component { products: Vec::new(), countries: Vec::new() });
                roots.len() - 1
            })
        };
        for p in 0..m {
            let i = slot(uf.find(n + p), &mut roots, &mut comps);
            comps[i].countries.push(p);
        }
        for q in 0..n {
            let i = slot(uf.find(q), &mut roots, &mut comps);
            comps[i].products.push(q);
        }
        // stable: ties keep first-country order
        comps.sort_by_key(|c| std::cmp::Reverse((c.countries.len(), c.products.len())));
        comps
    }

    /// Error with the country labels of every component when the graph is
    /// not connected.
    pub fn ensure_connected(&self) -> Result<()> {
        let comps = self.components();
        if comps.len() == 1 {
            return Ok(());
        }
        Err(Error::Disconnected {
            components: comps
                .iter()
                .map(|c| c.countries.iter().map(|&p| self.country_labels[p].clone()).collect())
                .collect(),
        })
    }

    /// Restrict to the largest connected component, reporting what was cut.
    pub fn largest_component(&self) -> Result<SpecializationMatrix> {
        let comps = self.components();
        if comps.len() == 1 {
            return Ok(self.clone());
        }
        let main = &comps[0];
        let mut report = self.pruned.clone();
        for c in &comps[1..] {
            for &q in &c.products {
                report.drop_product(&self.product_labels[q], "outside largest connected component");
            }
            for &p in &c.countries {
                report.drop_country(&self.country_labels[p], "outside largest connected component");
            }
        }
        let mut products = main.products.clone();
        products.sort_unstable();
        let mut countries = main.countries.clone();
        countries.sort_unstable();
        let x = self.x.select_rows(&products).select_columns(&countries);
        Self::build(
            x,
            products.iter().map(|&q| self.product_labels[q].clone()).collect(),
            countries.iter().map(|&p| self.country_labels[p].clone()).collect(),
            report,
        )
    }
}

/// `x_qp = 1` iff `R_qp > threshold` (strictly), followed by one pruning pass.
pub fn binarize(r: &RcaMatrix, threshold: f64) -> Result<SpecializationMatrix> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::Argument(format!("threshold must be positive, got {threshold}")));
    }
    let x = r.values.map(|v| if v > threshold { 1.0 } else { 0.0 });
    let mut sm = SpecializationMatrix::pruned_from_binary(
        x,
        r.product_labels.clone(),
        r.country_labels.clone(),
        "no RCA above threshold",
    )?;
    sm.add_pruned(&r.pruned);
    Ok(sm)
}
