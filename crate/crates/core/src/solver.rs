//! Named, interchangeable solvers for CA and CCA.
//!
//! The CLI's `--method` flag is a lookup in a [`SolverRegistry`]. The
//! built-in registry holds a direct `eigen` solver and an `iterative`
//! fixed-point solver for each analysis; callers may register more.

use std::collections::BTreeMap;

use crate::ca::{ca_eigen, ca_iterative, CaResult};
use crate::cca::{cca_eigen, cca_iterative, CcaResult};
use crate::error::{Error, Result};
use crate::ingest::{CountryVariableTable, SpecializationMatrix};
use crate::ordination::SolveOptions;

pub trait CaSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, sm: &SpecializationMatrix, opts: &SolveOptions) -> Result<CaResult>;
}

pub trait CcaSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, sm: &SpecializationMatrix, env: &CountryVariableTable, opts: &SolveOptions) -> Result<CcaResult>;
}

pub struct EigenCa;

impl CaSolver for EigenCa {
    fn name(&self) -> &'static str {
        "eigen"
    }
    fn solve(&self, sm: &SpecializationMatrix, opts: &SolveOptions) -> Result<CaResult> {
        ca_eigen(sm, opts)
    }
}

/// Reciprocal averaging, deflated for axes beyond the first.
pub struct ReciprocalAveragingCa;

impl CaSolver for ReciprocalAveragingCa {
    fn name(&self) -> &'static str {
        "iterative"
    }
    fn solve(&self, sm: &SpecializationMatrix, opts: &SolveOptions) -> Result<CaResult> {
        ca_iterative(sm, opts)
    }
}

pub struct EigenCca;

impl CcaSolver for EigenCca {
    fn name(&self) -> &'static str {
        "eigen"
    }
    fn solve(&self, sm: &SpecializationMatrix, env: &CountryVariableTable, opts: &SolveOptions) -> Result<CcaResult> {
        cca_eigen(sm, env, opts)
    }
}

pub struct IterativeCca;

impl CcaSolver for IterativeCca {
    fn name(&self) -> &'static str {
        "iterative"
    }
    fn solve(&self, sm: &SpecializationMatrix, env: &CountryVariableTable, opts: &SolveOptions) -> Result<CcaResult> {
        cca_iterative(sm, env, opts)
    }
}

#[derive(Default)]
pub struct SolverRegistry {
    ca: BTreeMap<&'static str, Box<dyn CaSolver>>,
    cca: BTreeMap<&'static str, Box<dyn CcaSolver>>,
}

impl SolverRegistry {
    pub fn builtin() -> Self {
        let mut r = SolverRegistry::default();
        r.register_ca(Box::new(EigenCa));
        r.register_ca(Box::new(ReciprocalAveragingCa));
        r.register_cca(Box::new(EigenCca));
        r.register_cca(Box::new(IterativeCca));
        r
    }

    /// Registering an existing name replaces the previous solver.
    pub fn register_ca(&mut self, solver: Box<dyn CaSolver>) {
        self.ca.insert(solver.name(), solver);
    }

    pub fn register_cca(&mut self, solver: Box<dyn CcaSolver>) {
        self.cca.insert(solver.name(), solver);
    }

    pub fn ca(&self, name: &str) -> Result<&dyn CaSolver> {
        self.ca.get(name).map(|b| b.as_ref()).ok_or_else(|| {
            Error::Argument(format!("unknown CA method `{name}` (available: {})", self.ca_names().join(", ")))
        })
    }

    pub fn cca(&self, name: &str) -> Result<&dyn CcaSolver> {
        self.cca.get(name).map(|b| b.as_ref()).ok_or_else(|| {
            Error::Argument(format!("unknown CCA method `{name}` (available: {})", self.cca_names().join(", ")))
        })
    }

    pub fn ca_names(&self) -> Vec<&'static str> {
        self.ca.keys().copied().collect()
    }

    pub fn cca_names(&self) -> Vec<&'static str> {
        self.cca.keys().copied().collect()
    }
}
