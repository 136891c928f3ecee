use std::collections::BTreeMap;
use std::io::Write;

use super::groups::CentroidTable;
use super::{ScaledScores, VariableRays};
use crate::error::{Error, Result};
use crate::format::fmt12;
use crate::ingest::SpecializationMatrix;

/// Raw product points are labeled only up to this many.
pub const LABEL_LIMIT: usize = 50;

/// Ray colors, assigned by variable order.
pub(crate) const PALETTE: [&str; 8] =
    ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Country,
    Product,
    Centroid,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Country => "country",
            PointKind::Product => "product",
            PointKind::Centroid => "centroid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub label: String,
    pub kind: PointKind,
    pub x: f64,
    pub y: f64,
    /// Diversity for countries, ubiquity for products, mean ubiquity for centroids.
    pub size: f64,
    pub group: Option<String>,
    pub labeled: bool,
    /// Beyond an axis cap; drawn pinned to the cap.
    pub clipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub variable: String,
    pub x: f64,
    pub y: f64,
    pub color: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisLabel {
    /// 1-based axis of the ordination.
    pub index: usize,
    pub share: f64,
    pub label: String,
    /// Upper display limit.
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BiplotOptions {
    /// Upper display limit per 1-based axis. Caps on axes outside the pair are ignored.
    pub caps: BTreeMap<usize, f64>,
    /// Extend each ray backwards through the origin as a dashed line.
    pub back_extension: bool,
}

/// Which product points to draw.
#[derive(Debug, Clone, Copy)]
pub enum ProductLayer<'a> {
    None,
    /// Every product; the optional mapping only fills the `group` column.
    Raw(Option<&'a BTreeMap<String, String>>),
    Centroids(&'a CentroidTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiplotModel {
    pub x_axis: AxisLabel,
    pub y_axis: AxisLabel,
    pub points: Vec<Point>,
    pub rays: Vec<Ray>,
    /// `kind:label` of every clipped point.
    pub clipped: Vec<String>,
    pub back_extension: bool,
}

impl BiplotModel {
    pub fn count(&self, kind: PointKind) -> usize {
        self.points.iter().filter(|p| p.kind == kind).count()
    }
}

pub fn assemble_biplot(
    scores: &ScaledScores,
    sm: &SpecializationMatrix,
    rays: Option<&VariableRays>,
    products: ProductLayer<'_>,
    axis_pair: (usize, usize),
    options: &BiplotOptions,
) -> Result<BiplotModel> {
    let k = scores.num_axes();
    let (a, b) = axis_pair;
    for axis in [a, b] {
        if axis == 0 || axis > k {
            return Err(Error::Argument(format!("axis {axis} out of range 1..={k}")));
        }
    }
    if a == b {
        return Err(Error::Argument(format!("axis pair ({a},{b}) repeats an axis")));
    }
    for (&axis, &cap) in &options.caps {
        if axis == 0 || axis > k || !cap.is_finite() {
            return Err(Error::Argument(format!("invalid cap {cap} on axis {axis}")));
        }
    }
    if scores.v_hat.nrows() != sm.n_countries() || scores.u_hat.nrows() != sm.n_products() {
        return Err(Error::Argument("scores are not aligned with the specialization matrix".into()));
    }
    let axis_label = |index: usize| {
        let share = scores.inertia_shares[index - 1];
        AxisLabel {
            index,
            share,
            label: format!("{}-{} ({:.1}%)", scores.kind.axis_prefix(), index, 100.0 * share),
            cap: options.caps.get(&index).copied(),
        }
    };
    let x_axis = axis_label(a);
    let y_axis = axis_label(b);
    let (ja, jb) = (a - 1, b - 1);

    let mut points = Vec::new();
    for (p, country) in sm.country_labels().iter().enumerate() {
        points.push(Point {
            label: country.clone(),
            kind: PointKind::Country,
            x: scores.v_hat[(p, ja)],
            y: scores.v_hat[(p, jb)],
            size: sm.diversity()[p] as f64,
            group: None,
            labeled: true,
            clipped: false,
        });
    }
    match products {
        ProductLayer::None => {}
        ProductLayer::Raw(mapping) => {
            let labeled = sm.n_products() <= LABEL_LIMIT;
            for (q, product) in sm.product_labels().iter().enumerate() {
                points.push(Point {
                    label: product.clone(),
                    kind: PointKind::Product,
                    x: scores.u_hat[(q, ja)],
                    y: scores.u_hat[(q, jb)],
                    size: sm.ubiquity()[q] as f64,
                    group: mapping.and_then(|m| m.get(product).cloned()),
                    labeled,
                    clipped: false,
                });
            }
        }
        ProductLayer::Centroids(table) => {
            for row in &table.rows {
                if row.coords.len() != k {
                    return Err(Error::Argument("centroids were computed on a different number of axes".into()));
                }
                points.push(Point {
                    label: row.group.clone(),
                    kind: PointKind::Centroid,
                    x: row.coords[ja],
                    y: row.coords[jb],
                    size: row.mean_ubiquity,
                    group: Some(row.group.clone()),
                    labeled: true,
                    clipped: false,
                });
            }
        }
    }

    let mut clipped = Vec::new();
    for pt in &mut points {
        pt.clipped = x_axis.cap.is_some_and(|c| pt.x > c) || y_axis.cap.is_some_and(|c| pt.y > c);
        if pt.clipped {
            clipped.push(format!("{}:{}", pt.kind.as_str(), pt.label));
        }
    }

    let rays = rays
        .map(|r| {
            r.names
                .iter()
                .enumerate()
                .map(|(i, name)| Ray {
                    variable: name.clone(),
                    x: r.a[(i, ja)],
                    y: r.a[(i, jb)],
                    color: PALETTE[i % PALETTE.len()],
                })
                .collect()
        })
        .unwrap_or_default();

    Ok(BiplotModel { x_axis, y_axis, points, rays, clipped, back_extension: options.back_extension })
}

fn csv_out(e: csv::Error) -> Error {
    Error::Output(e.to_string())
}

/// `entity,kind,axis_a,axis_b,size,group` with unclipped coordinates.
pub fn write_points_csv<W: Write>(model: &BiplotModel, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["entity", "kind", "axis_a", "axis_b", "size", "group"]).map_err(csv_out)?;
    for p in &model.points {
        w.write_record([
            p.label.as_str(),
            p.kind.as_str(),
            &fmt12(p.x),
            &fmt12(p.y),
            &fmt12(p.size),
            p.group.as_deref().unwrap_or(""),
        ])
        .map_err(csv_out)?;
    }
    w.flush()?;
    Ok(())
}

/// `variable,axis_a,axis_b`.
pub fn write_rays_csv<W: Write>(model: &BiplotModel, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variable", "axis_a", "axis_b"]).map_err(csv_out)?;
    for r in &model.rays {
        w.write_record([r.variable.as_str(), &fmt12(r.x), &fmt12(r.y)]).map_err(csv_out)?;
    }
    w.flush()?;
    Ok(())
}
