use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use nalgebra::{DMatrix, DVector};

use super::specialization::SpecializationMatrix;
use super::trade::csv_error;
use crate::error::{Error, Result};
use crate::weighted;

/// Per-country variables as read from file. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryVariables {
    names: Vec<String>,
    rows: BTreeMap<String, Vec<Option<f64>>>,
}

impl CountryVariables {
    pub fn new(names: Vec<String>, rows: impl IntoIterator<Item = (String, Vec<Option<f64>>)>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Argument("no country variables".into()));
        }
        let mut map = BTreeMap::new();
        for (country, values) in rows {
            if values.len() != names.len() {
                return Err(Error::Argument(format!(
                    "country {country}: {} values for {} variables",
                    values.len(),
                    names.len()
                )));
            }
            if map.insert(country.clone(), values).is_some() {
                return Err(Error::Argument(format!("duplicate country {country}")));
            }
        }
        Ok(CountryVariables { names, rows: map })
    }

    /// Build from a complete `countries × variables` matrix.
    pub fn from_matrix(names: Vec<String>, countries: &[String], values: &DMatrix<f64>) -> Result<Self> {
        Self::new(
            names,
            countries.iter().enumerate().map(|(i, c)| (c.clone(), values.row(i).iter().map(|&v| Some(v)).collect())),
        )
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, country: &str) -> Option<&[Option<f64>]> {
        self.rows.get(country).map(|v| v.as_slice())
    }

    /// Countries with a value for every variable.
    pub fn complete_countries(&self) -> BTreeSet<String> {
        self.rows.iter().filter(|(_, v)| v.iter().all(Option::is_some)).map(|(c, _)| c.clone()).collect()
    }
}

/// Parse `country,<name1>,...,<namez>`; an empty cell is a missing value.
pub fn parse_variables_csv<R: Read>(reader: R) -> Result<CountryVariables> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut rows = rdr.records();
    let header = match rows.next() {
        None => return Err(Error::EmptyTable),
        Some(h) => h.map_err(csv_error)?,
    };
    if header.get(0) != Some("country") || header.len() < 2 {
        return Err(Error::Parse { line: 1, message: "expected header `country,<name1>,...`".into() });
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut seen = BTreeSet::new();
    let mut parsed = Vec::new();
    for row in rows {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != names.len() + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", names.len() + 1, row.len()),
            });
        }
        let country = row[0].to_string();
        if !seen.insert(country.clone()) {
            return Err(Error::Parse { line, message: format!("duplicate country {country}") });
        }
        let mut values = Vec::with_capacity(names.len());
        for cell in row.iter().skip(1) {
            if cell.is_empty() {
                values.push(None);
            } else {
                let v: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::Parse { line, message: format!("value `{cell}` is not numeric") })?;
                values.push(Some(v));
            }
        }
        parsed.push((country, values));
    }
    if parsed.is_empty() {
        return Err(Error::EmptyTable);
    }
    CountryVariables::new(names, parsed)
}

/// Environment matrix aligned with a specialization matrix's countries.
///
/// `y` holds the `z` diversity-weighted standardized variables followed by a
/// constant column of ones.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryVariableTable {
    names: Vec<String>,
    countries: Vec<String>,
    raw: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl CountryVariableTable {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    /// Number of variables, excluding the constant.
    pub fn z(&self) -> usize {
        self.names.len()
    }

    pub fn raw(&self) -> &DMatrix<f64> {
        &self.raw
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    /// Standardized variable `i` (0-based, excluding the constant).
    pub fn variable(&self, i: usize) -> DVector<f64> {
        self.y.column(i).into_owned()
    }
}

pub fn standardize_environment(raw: &CountryVariables, sm: &SpecializationMatrix) -> Result<CountryVariableTable> {
    let m = sm.n_countries();
    let z = raw.names().len();
    if z + 1 > m {
        return Err(Error::OverParameterized { variables: z, countries: m });
    }
    let mut missing = Vec::new();
    let mut values = DMatrix::zeros(m, z);
    for (p, country) in sm.country_labels().iter().enumerate() {
        match raw.get(country) {
            Some(row) if row.iter().all(Option::is_some) => {
                for (i, v) in row.iter().enumerate() {
                    values[(p, i)] = v.unwrap();
                }
            }
            _ => missing.push(country.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingVariables(missing));
    }

    let w = sm.weights();
    let mut y = DMatrix::zeros(m, z + 1);
    for i in 0..z {
        let col = values.column(i).into_owned();
        let std = weighted::standardize(w, &col).ok_or_else(|| Error::ConstantVariable(raw.names()[i].clone()))?;
        y.set_column(i, &std);
    }
    y.set_column(z, &DVector::from_element(m, 1.0));
    Ok(CountryVariableTable { names: raw.names().to_vec(), countries: sm.country_labels().to_vec(), raw: values, y })
}
