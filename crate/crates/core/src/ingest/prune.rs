use std::collections::BTreeMap;

use serde::Serialize;

/// Labels removed on the way from raw trade to the analyzed matrix.
///
/// `reason_per_item` keys are `product:<code>` or `country:<code>`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PruneReport {
    pub dropped_products: Vec<String>,
    pub dropped_countries: Vec<String>,
    pub reason_per_item: BTreeMap<String, String>,
}

impl PruneReport {
    pub fn drop_product(&mut self, label: &str, reason: &str) {
        self.dropped_products.push(label.to_string());
        self.reason_per_item.insert(format!("product:{label}"), reason.to_string());
    }

    pub fn drop_country(&mut self, label: &str, reason: &str) {
        self.dropped_countries.push(label.to_string());
        self.reason_per_item.insert(format!("country:{label}"), reason.to_string());
    }

    pub fn merge(&mut self, other: &PruneReport) {
        self.dropped_products.extend(other.dropped_products.iter().cloned());
        self.dropped_countries.extend(other.dropped_countries.iter().cloned());
        self.reason_per_item.extend(other.reason_per_item.iter().map(|(k, v)| (k.clone(), v.clone())));
    }

    pub fn is_empty(&self) -> bool {
        self.dropped_products.is_empty() && self.dropped_countries.is_empty()
    }
}
