use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::config::{Method, RunConfig};
use super::io_error;
use crate::ca::CaResult;
use crate::cca::{regression_operator, CcaResult, EnvironmentOperator};
use crate::error::{Error, Result};
use crate::ingest::{
    binarize, compute_rca, parse_trade_csv, parse_variables_csv, standardize_environment, CountryVariableTable,
    PruneReport, SpecializationMatrix,
};
use crate::ordination::{compare_ordinations, EquivalenceReport, Ordination, SolveOptions};
use crate::solver::SolverRegistry;

pub struct Inputs {
    pub sm: SpecializationMatrix,
    pub env: Option<CountryVariableTable>,
    /// sha256 of each input file, keyed by role.
    pub digests: BTreeMap<String, String>,
}

pub(crate) fn read_input(path: &Path, role: &str, digests: &mut BTreeMap<String, String>) -> Result<Vec<u8>> {
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    digests.insert(role.to_string(), hex::encode(Sha256::digest(&bytes)));
    Ok(bytes)
}

/// Trade (and variables, when given) to an analyzable specialization matrix.
///
/// Countries without a complete set of variables are dropped before RCA, so
/// RCA, pruning and the weights all see the same country set.
pub fn load(cfg: &RunConfig, require_vars: bool) -> Result<Inputs> {
    let trade_path = cfg.trade.as_deref().ok_or_else(|| Error::Argument("--trade is required".into()))?;
    if require_vars && cfg.vars.is_none() {
        return Err(Error::Argument("--vars is required".into()));
    }
    let mut digests = BTreeMap::new();
    let mut trade = parse_trade_csv(&read_input(trade_path, "trade", &mut digests)?[..])?;

    let mut dropped = PruneReport::default();
    let raw_vars = match &cfg.vars {
        Some(path) => {
            let raw = parse_variables_csv(&read_input(path, "vars", &mut digests)?[..])?;
            let complete = raw.complete_countries();
            let present = trade.countries();
            for c in present.difference(&complete) {
                dropped.drop_country(c, "missing country variables");
            }
            let keep: BTreeSet<String> = present.intersection(&complete).cloned().collect();
            if keep.is_empty() {
                return Err(Error::Degenerate("no country has both trade records and variables".into()));
            }
            trade = trade.retain_countries(&keep)?;
            Some(raw)
        }
        None => None,
    };

    let rca = compute_rca(&trade)?;
    let mut sm = binarize(&rca, cfg.threshold)?;
    sm.add_pruned(&dropped);
    if cfg.largest_component {
        sm = sm.largest_component()?;
    }
    let env = raw_vars.as_ref().map(|raw| standardize_environment(raw, &sm)).transpose()?;
    Ok(Inputs { sm, env, digests })
}

pub fn solve_options(cfg: &RunConfig, num_axes: usize) -> SolveOptions {
    SolveOptions { num_axes, tol: cfg.tol, max_iter: cfg.max_iter, sign: cfg.sign, init_seed: cfg.seed }
}

/// The first requested solver's result, plus the comparison when both ran.
pub struct Solved<T> {
    pub result: T,
    pub others: Vec<T>,
    pub equivalence: Option<EquivalenceReport>,
}

impl<T: Ordination> Solved<T> {
    pub fn all(&self) -> impl Iterator<Item = &T> {
        std::iter::once(&self.result).chain(self.others.iter())
    }
}

fn solve_with<T: Ordination>(
    method: Method,
    sm: &SpecializationMatrix,
    mut run: impl FnMut(&str) -> Result<T>,
) -> Result<Solved<T>> {
    let mut results = method.solver_names().iter().map(|name| run(name)).collect::<Result<Vec<T>>>()?;
    let result = results.remove(0);
    let equivalence = results.first().map(|other| compare_ordinations(&result, other, sm.weights()));
    Ok(Solved { result, others: results, equivalence })
}

pub fn run_ca(cfg: &RunConfig, sm: &SpecializationMatrix, num_axes: usize) -> Result<Solved<CaResult>> {
    let registry = SolverRegistry::builtin();
    let opts = solve_options(cfg, num_axes);
    solve_with(cfg.method, sm, |name| registry.ca(name)?.solve(sm, &opts))
}

pub fn run_cca(
    cfg: &RunConfig,
    sm: &SpecializationMatrix,
    env: &CountryVariableTable,
    num_axes: usize,
) -> Result<(Solved<CcaResult>, EnvironmentOperator)> {
    let registry = SolverRegistry::builtin();
    let opts = solve_options(cfg, num_axes);
    let solved = solve_with(cfg.method, sm, |name| registry.cca(name)?.solve(sm, env, &opts))?;
    Ok((solved, regression_operator(env, sm)?))
}

/// Default axis count: two where available.
pub fn default_axes(cfg: &RunConfig, available: usize) -> usize {
    cfg.axes.unwrap_or_else(|| available.clamp(1, 2))
}
