#![allow(dead_code)]

use econ_complexity::ingest::{standardize_environment, CountryVariableTable, CountryVariables, SpecializationMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected 0/1 matrix with `n ≤ max_n` products and `m ≤ max_m`
/// countries, labels `p0..`, `c0..`.
pub fn random_instance(seed: u64, max_n: usize, max_m: usize) -> SpecializationMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(4..=max_n);
        let m = rng.random_range(4..=max_m);
        let density = rng.random_range(0.25..0.6);
        let x = DMatrix::from_fn(n, m, |_, _| if rng.random::<f64>() < density { 1.0 } else { 0.0 });
        let products = (0..n).map(|q| format!("p{q}")).collect();
        let countries = (0..m).map(|p| format!("c{p}")).collect();
        let Ok(sm) = SpecializationMatrix::pruned_from_binary(x, products, countries, "empty") else {
            continue;
        };
        if sm.n_countries() >= 4 && sm.ensure_connected().is_ok() {
            return sm;
        }
    }
}

/// `z` random country variables aligned with `sm`.
pub fn random_env(seed: u64, sm: &SpecializationMatrix, z: usize) -> CountryVariableTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let values = DMatrix::from_fn(sm.n_countries(), z, |_, _| rng.random_range(-1.0..1.0));
    env_from(sm, values)
}

pub fn env_from(sm: &SpecializationMatrix, values: DMatrix<f64>) -> CountryVariableTable {
    let names = (0..values.ncols()).map(|i| format!("v{}", i + 1)).collect();
    let raw = CountryVariables::from_matrix(names, sm.country_labels(), &values).unwrap();
    standardize_environment(&raw, sm).unwrap()
}

pub fn f1() -> SpecializationMatrix {
    SpecializationMatrix::with_default_labels(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap()
}

/// Squared χ² distance between the profiles of countries `a` and `b`.
pub fn chi2_distance_sq(sm: &SpecializationMatrix, a: usize, b: usize) -> f64 {
    let x = sm.x();
    let (d, s) = (sm.diversity(), sm.ubiquity());
    let total = sm.x_plus() as f64;
    (0..sm.n_products())
        .map(|q| {
            let diff = x[(q, a)] / d[a] as f64 - x[(q, b)] / d[b] as f64;
            total / s[q] as f64 * diff * diff
        })
        .sum()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    econ_complexity::weighted::pearson(&ranks(a), &ranks(b))
}

/// Eigenvalues of the non-symmetric `C^c`, real parts, descending.
pub fn cooccurrence_spectrum(sm: &SpecializationMatrix) -> Vec<f64> {
    let cc = econ_complexity::ca::cooccurrence_country(sm);
    let mut eig: Vec<f64> = cc.complex_eigenvalues().iter().map(|c| c.re).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}
