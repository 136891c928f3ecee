use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use crate::error::{Error, Result};

pub const TRADE_HEADER: [&str; 4] = ["year", "country", "product", "value"];

#[derive(Debug, Clone, PartialEq)]
pub struct TradeRecord {
    pub country: String,
    pub product: String,
    pub value: f64,
}

/// Export records for a single year, one record per (country, product) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeTable {
    year: i64,
    records: Vec<TradeRecord>,
}

impl TradeTable {
    /// Build a table, summing duplicate (country, product) pairs.
    ///
    /// Records come out sorted by (country, product), so input order never
    /// affects anything downstream.
    pub fn new(year: i64, records: impl IntoIterator<Item = TradeRecord>) -> Result<Self> {
        let mut merged: BTreeMap<(String, String), f64> = BTreeMap::new();
        for r in records {
            if !(r.value.is_finite() && r.value >= 0.0) {
                return Err(Error::Domain {
                    line: 0,
                    message: format!(
                        "value {} for ({}, {}) is not a non-negative number",
                        r.value, r.country, r.product
                    ),
                });
            }
            *merged.entry((r.country, r.product)).or_insert(0.0) += r.value;
        }
        if merged.is_empty() {
            return Err(Error::EmptyTable);
        }
        if merged.values().all(|&v| v == 0.0) {
            return Err(Error::Degenerate("no positive trade values".into()));
        }
        let records =
            merged.into_iter().map(|((country, product), value)| TradeRecord { country, product, value }).collect();
        Ok(TradeTable { year, records })
    }

    pub fn year(&self) -> i64 {
        self.year
    }

    pub fn records(&self) -> &[TradeRecord] {
        &self.records
    }

    pub fn countries(&self) -> BTreeSet<String> {
        self.records.iter().map(|r| r.country.clone()).collect()
    }

    /// Keep only records of the given countries.
    pub fn retain_countries(&self, keep: &BTreeSet<String>) -> Result<TradeTable> {
        TradeTable::new(self.year, self.records.iter().filter(|r| keep.contains(&r.country)).cloned())
    }

    /// Multiply every value by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<TradeTable> {
        TradeTable::new(self.year, self.records.iter().map(|r| TradeRecord { value: r.value * factor, ..r.clone() }))
    }
}

/// Parse a `year,country,product,value` CSV.
pub fn parse_trade_csv<R: Read>(reader: R) -> Result<TradeTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);

    let mut rows = rdr.records();
    let header = match rows.next() {
        None => return Err(Error::EmptyTable),
        Some(h) => h.map_err(csv_error)?,
    };
    if header.iter().collect::<Vec<_>>() != TRADE_HEADER {
        return Err(Error::Parse { line: 1, message: format!("expected header `{}`", TRADE_HEADER.join(",")) });
    }

    let mut year = None;
    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != 4 {
            return Err(Error::Parse { line, message: format!("expected 4 fields, found {}", row.len()) });
        }
        let y: i64 = row[0]
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("year `{}` is not an integer", &row[0]) })?;
        match year {
            None => year = Some(y),
            Some(prev) if prev != y => {
                return Err(Error::Domain {
                    line,
                    message: format!("year {y} differs from {prev}; one year per table"),
                })
            }
            _ => {}
        }
        let (country, product) = (row[1].to_string(), row[2].to_string());
        if country.is_empty() || product.is_empty() {
            return Err(Error::Parse { line, message: "empty country or product code".into() });
        }
        let value: f64 = row[3]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::Parse { line, message: format!("value `{}` is not numeric", &row[3]) })?;
        if value < 0.0 {
            return Err(Error::Domain { line, message: format!("negative value {value}") });
        }
        records.push(TradeRecord { country, product, value });
    }
    match year {
        None => Err(Error::EmptyTable),
        Some(y) => TradeTable::new(y, records),
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { line, message: format!("{other:?}") },
    }
}
