//! Diversity-weighted statistics on country vectors.
//!
//! Every helper takes the weight vector `w` (the diagonal of `W`), which is
//! assumed to be positive and to sum to one.

use nalgebra::{DMatrix, DVector};

pub fn mean(w: &DVector<f64>, v: &DVector<f64>) -> f64 {
    w.dot(v)
}

/// Weighted inner product `a' W b`.
pub fn dot(w: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    w.iter().zip(a.iter()).zip(b.iter()).map(|((w, a), b)| w * a * b).sum()
}

/// Weighted population variance.
pub fn variance(w: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let mu = mean(w, v);
    w.iter().zip(v.iter()).map(|(w, x)| w * (x - mu) * (x - mu)).sum()
}

/// Center to weighted mean 0 and scale to weighted variance 1.
///
/// Returns `None` when the weighted standard deviation is zero relative to
/// the magnitude of the input.
pub fn standardize(w: &DVector<f64>, v: &DVector<f64>) -> Option<DVector<f64>> {
    let mu = mean(w, v);
    let centered = v.map(|x| x - mu);
    let sd = dot(w, &centered, &centered).sqrt();
    let scale = v.amax().max(f64::MIN_POSITIVE);
    if !sd.is_finite() || sd <= 1e-12 * scale {
        return None;
    }
    Some(centered / sd)
}

/// Weighted Pearson correlation. Zero when either side has no variance.
pub fn correlation(w: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let ma = mean(w, a);
    let mb = mean(w, b);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..w.len() {
        let da = a[i] - ma;
        let db = b[i] - mb;
        sab += w[i] * da * db;
        saa += w[i] * da * da;
        sbb += w[i] * db * db;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

/// Unweighted Pearson correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

/// Remove from `v` its W-projection onto each (W-orthonormal) column of `basis`.
pub fn orthogonalize(w: &DVector<f64>, v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for b in basis {
        let c = dot(w, b, v);
        v.axpy(-c, b, 1.0);
    }
}

/// Index of the largest-magnitude entry; the first one wins ties.
pub fn argmax_abs(v: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

pub fn columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
}

pub fn from_columns(rows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}
