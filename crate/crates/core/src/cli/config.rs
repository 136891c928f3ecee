use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordination::SignConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Eigen,
    Iterative,
    /// Run both solvers and report how well they agree.
    Both,
}

impl Method {
    pub fn solver_names(self) -> &'static [&'static str] {
        match self {
            Method::Eigen => &["eigen"],
            Method::Iterative => &["iterative"],
            Method::Both => &["eigen", "iterative"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OrdinationChoice {
    Ca,
    Cca,
}

pub(crate) fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected A,B, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not an axis number"));
    Ok((parse(a)?, parse(b)?))
}

pub(crate) fn parse_cap(s: &str) -> std::result::Result<(usize, f64), String> {
    let (axis, limit) = s.split_once('=').ok_or_else(|| format!("expected AXIS=LIMIT, got `{s}`"))?;
    let axis = axis.trim().parse::<usize>().map_err(|_| format!("`{axis}` is not an axis number"))?;
    let limit = limit.trim().parse::<f64>().map_err(|_| format!("`{limit}` is not a number"))?;
    if !limit.is_finite() {
        return Err(format!("cap `{limit}` is not finite"));
    }
    Ok((axis, limit))
}

/// Command-line options shared by every command. Unset options fall back to
/// the `--config` file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Trade CSV with header `year,country,product,value`.
    #[arg(long, value_name = "PATH")]
    pub trade: Option<PathBuf>,
    /// Country variables CSV with header `country,<name1>,...`.
    #[arg(long, value_name = "PATH")]
    pub vars: Option<PathBuf>,
    /// Product category CSV with header `product,category`.
    #[arg(long, value_name = "PATH")]
    pub lall: Option<PathBuf>,
    /// Number of non-trivial axes to extract.
    #[arg(long, value_name = "K")]
    pub axes: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Convergence tolerance for iterative solvers [default: 1e-10].
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Iteration cap per axis [default: 10000].
    #[arg(long, value_name = "N")]
    pub max_iter: Option<usize>,
    /// Biplot axes, 1-based [default: 1,2].
    #[arg(long, value_name = "A,B", value_parser = parse_pair)]
    pub axis_pair: Option<(usize, usize)>,
    /// Upper display limit for a biplot axis; repeatable.
    #[arg(long, value_name = "AXIS=LIMIT", value_parser = parse_cap)]
    pub cap_axis: Vec<(usize, f64)>,
    /// Output directory [default: .].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Random seed: synthetic data, or seeded starts for iterative solvers.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// JSON file with defaults for any of these options.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Axis orientation: auto, diversity, first-variable, largest.
    #[arg(long)]
    pub sign: Option<SignConvention>,
    /// RCA threshold; specialization is RCA strictly above it [default: 1].
    #[arg(long, value_name = "X")]
    pub threshold: Option<f64>,
    /// Keep only the largest connected component instead of failing.
    #[arg(long)]
    pub largest_component: bool,
    /// Also write K steps of the method of reflections (ca only).
    #[arg(long, value_name = "K")]
    pub reflections: Option<usize>,
    /// Ordination behind a biplot or validation [default: cca with --vars, else ca].
    #[arg(long, value_enum)]
    pub ordination: Option<OrdinationChoice>,
    /// Draw rays backwards through the origin as dashed lines.
    #[arg(long)]
    pub back_extension: bool,
    /// Synthetic products [default: 200].
    #[arg(long, value_name = "N")]
    pub products: Option<usize>,
    /// Synthetic countries [default: 50].
    #[arg(long, value_name = "N")]
    pub countries: Option<usize>,
    /// Synthetic flip noise in [0, 1] [default: 0].
    #[arg(long, value_name = "X")]
    pub epsilon: Option<f64>,
    /// Synthetic country variables, the first being ability itself [default: 1].
    #[arg(long, value_name = "N")]
    pub variables: Option<usize>,
    /// Noise standard deviation of synthetic variables after the first [default: 0.5].
    #[arg(long, value_name = "X")]
    pub noise: Option<f64>,
}

/// The `--config` file. Keys mirror the long flags with `_` for `-`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    trade: Option<PathBuf>,
    vars: Option<PathBuf>,
    lall: Option<PathBuf>,
    axes: Option<usize>,
    method: Option<Method>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    axis_pair: Option<String>,
    cap_axis: Option<Vec<String>>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    sign: Option<String>,
    threshold: Option<f64>,
    largest_component: Option<bool>,
    reflections: Option<usize>,
    ordination: Option<OrdinationChoice>,
    back_extension: Option<bool>,
    products: Option<usize>,
    countries: Option<usize>,
    epsilon: Option<f64>,
    variables: Option<usize>,
    noise: Option<f64>,
}

fn read_config(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path).map_err(|e| super::io_error(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse { line: e.line() as u64, message: format!("{}: {e}", path.display()) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trade: Option<PathBuf>,
    pub vars: Option<PathBuf>,
    pub lall: Option<PathBuf>,
    pub axes: Option<usize>,
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
    pub axis_pair: (usize, usize),
    pub caps: BTreeMap<usize, f64>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub sign: SignConvention,
    pub threshold: f64,
    pub largest_component: bool,
    pub reflections: Option<usize>,
    pub ordination: Option<OrdinationChoice>,
    pub back_extension: bool,
    pub products: usize,
    pub countries: usize,
    pub epsilon: f64,
    pub variables: usize,
    pub noise: f64,
}

/// The settings that shape results, echoed into run reports. Paths are left
/// out so reports do not depend on where files live.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub axes: usize,
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
    pub sign: SignConvention,
    pub threshold: f64,
    pub largest_component: bool,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn resolve(flags: Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let axis_pair = match (flags.axis_pair, file.axis_pair) {
            (Some(p), _) => p,
            (None, Some(s)) => parse_pair(&s).map_err(Error::Argument)?,
            (None, None) => (1, 2),
        };
        let mut caps = BTreeMap::new();
        for s in file.cap_axis.unwrap_or_default() {
            let (axis, limit) = parse_cap(&s).map_err(Error::Argument)?;
            caps.insert(axis, limit);
        }
        // flags win axis by axis
        caps.extend(flags.cap_axis.iter().copied());
        let sign = match (flags.sign, file.sign) {
            (Some(s), _) => s,
            (None, Some(s)) => s.parse()?,
            (None, None) => SignConvention::Auto,
        };
        let cfg = RunConfig {
            trade: flags.trade.or(file.trade),
            vars: flags.vars.or(file.vars),
            lall: flags.lall.or(file.lall),
            axes: flags.axes.or(file.axes),
            method: flags.method.or(file.method).unwrap_or_default(),
            tol: flags.tol.or(file.tol).unwrap_or(1e-10),
            max_iter: flags.max_iter.or(file.max_iter).unwrap_or(10_000),
            axis_pair,
            caps,
            out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            seed: flags.seed.or(file.seed),
            sign,
            threshold: flags.threshold.or(file.threshold).unwrap_or(1.0),
            largest_component: flags.largest_component || file.largest_component.unwrap_or(false),
            reflections: flags.reflections.or(file.reflections),
            ordination: flags.ordination.or(file.ordination),
            back_extension: flags.back_extension || file.back_extension.unwrap_or(false),
            products: flags.products.or(file.products).unwrap_or(200),
            countries: flags.countries.or(file.countries).unwrap_or(50),
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(0.0),
            variables: flags.variables.or(file.variables).unwrap_or(1),
            noise: flags.noise.or(file.noise).unwrap_or(0.5),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Argument(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.axes == Some(0) {
            return Err(Error::Argument("--axes must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Argument("--max-iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn echo(&self, axes: usize) -> ConfigEcho {
        ConfigEcho {
            axes,
            method: self.method,
            tol: self.tol,
            max_iter: self.max_iter,
            sign: self.sign,
            threshold: self.threshold,
            largest_component: self.largest_component,
            seed: self.seed,
        }
    }
}
