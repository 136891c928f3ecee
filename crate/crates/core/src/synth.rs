//! Planted-gradient fixtures: countries with a latent ability, products with
//! a latent difficulty, and `x_qp = 1` iff ability ≥ difficulty, with each
//! entry flipped at rate ε.
//!
//! Trade values are built to reproduce the planted matrix through RCA
//! binarization, but that is not always possible: a product exported by every
//! country cannot have RCA above 1 everywhere (its RCAs average to 1). The
//! remaining disagreements are counted in [`SynthInstance::mismatches`].

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::fmt12;
use crate::ingest::{CountryVariables, SpecializationMatrix, TradeRecord, TradeTable, TRADE_HEADER};

pub const SYNTH_YEAR: i64 = 2000;

/// Target RCA for planted entries; leaves room for decimal rounding.
const RCA_MARGIN: f64 = 1.05;
const VALUE_ROUNDS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthParams {
    pub products: usize,
    pub countries: usize,
    pub epsilon: f64,
    /// Total variables; the first is the noiseless ability.
    pub variables: usize,
    /// Standard deviation of the noise added to variables after the first.
    pub noise: f64,
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams { products: 200, countries: 50, epsilon: 0.0, variables: 1, noise: 0.5, seed: 0, max_attempts: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct SynthInstance {
    pub params: SynthParams,
    /// Planted matrix after pruning empty rows and columns.
    pub planted: SpecializationMatrix,
    /// Aligned with `planted.country_labels()`.
    pub ability: Vec<f64>,
    /// Aligned with `planted.product_labels()`.
    pub difficulty: Vec<f64>,
    pub variables: CountryVariables,
    pub trade: TradeTable,
    /// Planted entries whose trade values give RCA ≤ 1.
    pub mismatches: usize,
    pub attempts: usize,
}

#[derive(Serialize)]
struct SynthSummary<'a> {
    params: &'a SynthParams,
    products: usize,
    countries: usize,
    ones: usize,
    mismatches: usize,
    attempts: usize,
}

pub fn country_code(i: usize) -> String {
    let letter = |k: usize| (b'A' + k as u8) as char;
    [letter(i / 676 % 26), letter(i / 26 % 26), letter(i % 26)].iter().collect()
}

pub fn product_code(i: usize, n: usize) -> String {
    let width = n.to_string().len().max(4);
    format!("P{:0width$}", i + 1)
}

pub fn generate(params: &SynthParams) -> Result<SynthInstance> {
    let SynthParams { products: n, countries: m, epsilon, .. } = *params;
    if n < 2 || m < 2 {
        return Err(Error::Argument(format!("need at least 2 products and 2 countries, got {n}x{m}")));
    }
    if m > 26 * 26 * 26 {
        return Err(Error::Argument(format!("at most 17576 countries have three-letter codes, got {m}")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Argument(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    if params.variables == 0 || params.noise.is_nan() || params.noise < 0.0 {
        return Err(Error::Argument("need at least one variable and non-negative noise".into()));
    }
    if params.max_attempts == 0 {
        return Err(Error::Argument("max_attempts must be at least 1".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let product_labels: Vec<String> = (0..n).map(|q| product_code(q, n)).collect();
    let country_labels: Vec<String> = (0..m).map(country_code).collect();
    let mut last_error = None;
    for attempt in 1..=params.max_attempts {
        let ability: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let difficulty: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let x = DMatrix::from_fn(n, m, |q, p| {
            let planted = ability[p] >= difficulty[q];
            let flip = epsilon > 0.0 && rng.random::<f64>() < epsilon;
            if planted != flip {
                1.0
            } else {
                0.0
            }
        });
        let sm = match SpecializationMatrix::pruned_from_binary(
            x,
            product_labels.clone(),
            country_labels.clone(),
            "empty in planted matrix",
        ) {
            Ok(sm) => sm,
            Err(e) => {
                last_error = Some(e);
                continue;
            }
        };
        if let Err(e) = sm.ensure_connected() {
            last_error = Some(e);
            continue;
        }
        let keep_c: Vec<usize> = sm.country_labels().iter().map(|c| country_labels.binary_search(c).unwrap()).collect();
        let keep_p: Vec<usize> = sm.product_labels().iter().map(|p| product_labels.binary_search(p).unwrap()).collect();
        let ability: Vec<f64> = keep_c.iter().map(|&p| ability[p]).collect();
        let difficulty: Vec<f64> = keep_p.iter().map(|&q| difficulty[q]).collect();

        let variables = make_variables(params, &ability, sm.country_labels(), &mut rng)?;
        // count against the values as written, not as computed
        let values = realize_values(sm.x()).map(|v| fmt12(v).parse::<f64>().expect("formatted float parses"));
        let mismatches = count_mismatches(sm.x(), &rca(&values));
        let mut records = Vec::new();
        for (p, country) in sm.country_labels().iter().enumerate() {
            for (q, product) in sm.product_labels().iter().enumerate() {
                if values[(q, p)] > 0.0 {
                    records.push(TradeRecord {
                        country: country.clone(),
                        product: product.clone(),
                        value: values[(q, p)],
                    });
                }
            }
        }
        let trade = TradeTable::new(SYNTH_YEAR, records)?;
        return Ok(SynthInstance {
            params: params.clone(),
            planted: sm,
            ability,
            difficulty,
            variables,
            trade,
            mismatches,
            attempts: attempt,
        });
    }
    Err(last_error.unwrap_or_else(|| Error::Degenerate("could not generate an instance".into())))
}

fn make_variables(
    params: &SynthParams,
    ability: &[f64],
    countries: &[String],
    rng: &mut ChaCha8Rng,
) -> Result<CountryVariables> {
    let m = ability.len();
    let normal = Normal::new(0.0, params.noise).map_err(|e| Error::Argument(e.to_string()))?;
    let mut names = vec!["ability".to_string()];
    let mut values = DMatrix::zeros(m, params.variables);
    values.set_column(0, &nalgebra::DVector::from_column_slice(ability));
    for i in 1..params.variables {
        names.push(format!("v{}", i + 1));
        let slope = rng.random_range(0.5..1.5) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        for p in 0..m {
            values[(p, i)] = slope * ability[p] + normal.sample(rng);
        }
    }
    CountryVariables::from_matrix(names, countries, &values)
}

fn rca(v: &DMatrix<f64>) -> DMatrix<f64> {
    let total: f64 = v.sum();
    let country: Vec<f64> = v.column_iter().map(|c| c.sum()).collect();
    let product: Vec<f64> = v.row_iter().map(|r| r.sum()).collect();
    DMatrix::from_fn(v.nrows(), v.ncols(), |q, p| {
        if v[(q, p)] == 0.0 {
            0.0
        } else {
            (v[(q, p)] / country[p]) / (product[q] / total)
        }
    })
}

fn count_mismatches(x: &DMatrix<f64>, r: &DMatrix<f64>) -> usize {
    x.iter().zip(r.iter()).filter(|(&x, &r)| x == 1.0 && r <= 1.0).count()
}

/// Values on the planted support only, so unplanted entries have RCA 0.
/// Planted entries below the margin are pushed up multiplicatively; the
/// iterate with the fewest failures wins.
fn realize_values(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut v = x.clone();
    let mut best = (v.clone(), count_mismatches(x, &rca(&v)));
    for _ in 0..VALUE_ROUNDS {
        if best.1 == 0 {
            break;
        }
        let r = rca(&v);
        for (vi, &ri) in v.iter_mut().zip(r.iter()) {
            if *vi > 0.0 && ri < RCA_MARGIN {
                *vi *= (RCA_MARGIN / ri).sqrt();
            }
        }
        // keep values in a readable range
        let max = v.max();
        v /= max / 1e6;
        let bad = count_mismatches(x, &rca(&v));
        if bad < best.1 {
            best = (v.clone(), bad);
        }
    }
    best.0
}

impl SynthInstance {
    /// Write `trade.csv`, `vars.csv`, `ability.csv`, `difficulty.csv`,
    /// `planted.csv` and `synth.json` into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let out = |e: csv::Error| Error::Output(e.to_string());

        let mut w = csv::Writer::from_path(dir.join("trade.csv")).map_err(out)?;
        w.write_record(TRADE_HEADER).map_err(out)?;
        let year = self.trade.year().to_string();
        for r in self.trade.records() {
            w.write_record([year.as_str(), &r.country, &r.product, &fmt12(r.value)]).map_err(out)?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("vars.csv")).map_err(out)?;
        let mut header = vec!["country".to_string()];
        header.extend(self.variables.names().iter().cloned());
        w.write_record(&header).map_err(out)?;
        for country in self.planted.country_labels() {
            let row = self.variables.get(country).expect("variables cover every country");
            let mut rec = vec![country.clone()];
            rec.extend(row.iter().map(|v| fmt12(v.expect("synthetic variables are complete"))));
            w.write_record(&rec).map_err(out)?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("ability.csv")).map_err(out)?;
        w.write_record(["country", "ability"]).map_err(out)?;
        for (c, a) in self.planted.country_labels().iter().zip(&self.ability) {
            w.write_record([c.as_str(), &fmt12(*a)]).map_err(out)?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("difficulty.csv")).map_err(out)?;
        w.write_record(["product", "difficulty"]).map_err(out)?;
        for (p, b) in self.planted.product_labels().iter().zip(&self.difficulty) {
            w.write_record([p.as_str(), &fmt12(*b)]).map_err(out)?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("planted.csv")).map_err(out)?;
        w.write_record(["product", "country"]).map_err(out)?;
        let x = self.planted.x();
        for (q, product) in self.planted.product_labels().iter().enumerate() {
            for (p, country) in self.planted.country_labels().iter().enumerate() {
                if x[(q, p)] == 1.0 {
                    w.write_record([product.as_str(), country.as_str()]).map_err(out)?;
                }
            }
        }
        w.flush()?;

        let summary = SynthSummary {
            params: &self.params,
            products: self.planted.n_products(),
            countries: self.planted.n_countries(),
            ones: self.planted.x_plus(),
            mismatches: self.mismatches,
            attempts: self.attempts,
        };
        let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Output(e.to_string()))?;
        fs::write(dir.join("synth.json"), json + "\n")?;
        Ok(())
    }
}
