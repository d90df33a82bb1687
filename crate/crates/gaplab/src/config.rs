//! Run configuration: TOML sections plus `section.key=value` overrides.

use std::path::{Path, PathBuf};

use gaplab_core::bounds::DEFAULT_DELTAS;
use gaplab_core::eigen::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use gaplab_core::grid::{build_grid, Domain, Grid};
use gaplab_core::ground_state::{DictionarySizes, DEFAULT_FLOOR, DEFAULT_G_FLOOR};
use gaplab_core::potential::expr::eval_constant;
use gaplab_core::potential::{parse_potential, PotentialSpec};
use gaplab_core::ratio::DEFAULT_GAMMA;
use serde::{Deserialize, Serialize};

use crate::error::{GaplabError, Result};
use crate::tabulated::read_tabulated;

/// Prefix of potential specs naming a tabulated file.
pub const FILE_PREFIX: &str = "file:";

/// Largest accepted node count.
pub const MAX_NODES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub dictionary: DictionaryConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// `lo:hi` or `lo:hi,lo:hi`; bounds may be constant expressions.
    pub domain: String,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    /// Built-in, expression, or `file:<path>`.
    pub spec: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Full,
    EigenOnly,
    DistancesOnly,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::EigenOnly => "eigen-only",
            Self::DistancesOnly => "distances-only",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// `"bracket"` or a fixed non-negative number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CTildeConfig {
    Fixed(f64),
    Recipe(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Empty selects the default grid for the potential.
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub gamma: f64,
    pub floor: f64,
    pub kappa: f64,
    pub g_floor: f64,
    pub t_list: Vec<f64>,
    /// Source stride per axis for `L(Ω)`; 0 selects one automatically.
    pub stride: usize,
    pub c_tilde: CTildeConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            alphas: Vec::new(),
            deltas: DEFAULT_DELTAS.to_vec(),
            gamma: DEFAULT_GAMMA,
            floor: DEFAULT_FLOOR,
            kappa: 1.0,
            g_floor: DEFAULT_G_FLOOR,
            t_list: vec![0.0, 0.25, 0.5],
            stride: 0,
            c_tilde: CTildeConfig::Recipe("bracket".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DictionaryConfig {
    pub constants: usize,
    pub bump_centers: usize,
    pub bump_widths: usize,
    pub bump_amplitudes: usize,
    pub quadratic_b: usize,
    pub quadratic_q: usize,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        let d = DictionarySizes::default();
        Self {
            constants: d.constants,
            bump_centers: d.bump_centers,
            bump_widths: d.bump_widths,
            bump_amplitudes: d.bump_amplitudes,
            quadratic_b: d.quadratic_b,
            quadratic_q: d.quadratic_q,
        }
    }
}

impl DictionaryConfig {
    pub fn sizes(&self) -> DictionarySizes {
        DictionarySizes {
            constants: self.constants,
            bump_centers: self.bump_centers,
            bump_widths: self.bump_widths,
            bump_amplitudes: self.bump_amplitudes,
            quadratic_b: self.quadratic_b,
            quadratic_q: self.quadratic_q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Report path used when the CLI gets no `--out`.
    pub report: String,
}

/// Splits `a.b=value` and parses `value` as a TOML value, falling back to a
/// bare string.
fn parse_override(text: &str) -> Result<(Vec<String>, toml::Value)> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| GaplabError::config(format!("override `{text}` is not key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(|s| s.trim().to_string()).collect();
    if path.len() != 2 || path.iter().any(String::is_empty) {
        return Err(GaplabError::config(format!(
            "override key `{}` must be section.key",
            key.trim()
        )));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((path, value))
}

fn apply_override(table: &mut toml::Table, text: &str) -> Result<()> {
    let (path, value) = parse_override(text)?;
    let section = table
        .entry(path[0].clone())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match section {
        toml::Value::Table(s) => {
            s.insert(path[1].clone(), value);
            Ok(())
        }
        _ => Err(GaplabError::config(format!("`{}` is not a section", path[0]))),
    }
}

impl RunConfig {
    /// Parses TOML text, applies overrides, resolves `file:` paths against
    /// `base` and validates.
    pub fn from_toml_str(text: &str, base: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| GaplabError::config(e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let mut config: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| GaplabError::config(e.message().to_string()))?;
        if let (Some(base), Some(rel)) = (base, config.potential.spec.strip_prefix(FILE_PREFIX)) {
            let p = PathBuf::from(rel.trim());
            if p.is_relative() {
                config.potential.spec = format!("{FILE_PREFIX}{}", base.join(p).display());
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GaplabError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, Some(base), overrides)
            .map_err(|e| match e {
                GaplabError::Config(m) => GaplabError::Config(format!("{}: {m}", path.display())),
                other => other,
            })
    }

    /// Rebuilds a configuration from the echo stored in a report.
    pub fn from_echo(value: &serde_json::Value) -> Result<Self> {
        let config: RunConfig = serde_json::from_value(value.clone())
            .map_err(|e| GaplabError::Report(format!("config echo: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(GaplabError::config(m));
        let domain = parse_domain(&self.grid.domain)?;
        if self.grid.nodes.len() != domain.dim() {
            return err("grid.nodes needs one count per domain axis");
        }
        if self.grid.nodes.iter().any(|&n| n < 3) {
            return err("grid.nodes must be at least 3 per axis");
        }
        if self.grid.nodes.iter().try_fold(1usize, |a, &n| a.checked_mul(n)).is_none_or(|p| p > MAX_NODES) {
            return err("grid.nodes exceeds the node limit");
        }
        let a = &self.analysis;
        if !(self.solver.tol > 0.0 && self.solver.tol <= 1e-2) {
            return err("solver.tol must lie in (0, 1e-2]");
        }
        if self.solver.max_iter == 0 {
            return err("solver.max_iter must be at least 1");
        }
        if a.alphas.iter().any(|x| !x.is_finite()) {
            return err("analysis.alphas must be finite");
        }
        if a.deltas.is_empty() || a.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return err("analysis.deltas must be non-empty and lie in (0, 1)");
        }
        if !(a.gamma > 0.0 && a.gamma.is_finite()) {
            return err("analysis.gamma must be positive");
        }
        if !(a.floor > 0.0 && a.floor < 1.0) {
            return err("analysis.floor must lie in (0, 1)");
        }
        if !(a.kappa > 0.0 && a.kappa.is_finite()) {
            return err("analysis.kappa must be positive");
        }
        if !(a.g_floor.is_finite() && a.g_floor <= 0.0) {
            return err("analysis.g_floor must be finite and non-positive");
        }
        if a.t_list.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return err("analysis.t_list entries must be non-negative");
        }
        match &a.c_tilde {
            CTildeConfig::Fixed(c) if !(*c >= 0.0 && c.is_finite()) => {
                return err("analysis.c_tilde must be \"bracket\" or a non-negative number")
            }
            CTildeConfig::Recipe(r) if r != "bracket" => {
                return err("analysis.c_tilde must be \"bracket\" or a non-negative number")
            }
            _ => {}
        }
        if self.dictionary.bump_centers > 8 {
            return err("dictionary.bump_centers must be at most 8");
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        let domain = parse_domain(&self.grid.domain)?;
        build_grid(domain, &self.grid.nodes).map_err(|e| GaplabError::config(format!("grid: {e}")))
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec> {
        potential_spec(&self.potential.spec)
    }
}

pub fn potential_spec(text: &str) -> Result<PotentialSpec> {
    match text.strip_prefix(FILE_PREFIX) {
        Some(path) => read_tabulated(Path::new(path.trim())),
        None => parse_potential(text).map_err(|e| GaplabError::config(format!("potential: {e}"))),
    }
}

/// Parses `lo:hi` or `lo:hi,lo:hi`.
pub fn parse_domain(text: &str) -> Result<Domain> {
    let axes = text
        .split(',')
        .map(|axis| {
            let (lo, hi) = axis
                .split_once(':')
                .ok_or_else(|| GaplabError::config(format!("domain axis `{}` is not lo:hi", axis.trim())))?;
            let bound = |s: &str| {
                eval_constant(s.trim())
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| GaplabError::config(format!("domain bound `{}` is not a constant", s.trim())))
            };
            Ok((bound(lo)?, bound(hi)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let domain = match axes.as_slice() {
        [x] => Domain::interval(x.0, x.1),
        [x, y] => Domain::rectangle(*x, *y),
        _ => return Err(GaplabError::config("domain must have one or two axes")),
    };
    domain.map_err(|e| GaplabError::config(format!("domain: {e}")))
}

/// Parses `N` or `N,M`.
pub fn parse_nodes(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| GaplabError::config(format!("node count `{}` is not an integer", s.trim())))
        })
        .collect()
}
