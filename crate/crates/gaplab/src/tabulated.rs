//! Node-valued potentials: a `gap-potential v1 <dim> <n1> [<n2>]` header,
//! then one value per line in row-major order (x fastest).

use std::fmt::Write as _;
use std::path::Path;

use gaplab_core::potential::PotentialSpec;

use crate::error::{GaplabError, Result};

const MAGIC: &str = "gap-potential";
const VERSION: &str = "v1";

pub fn parse_tabulated(text: &str) -> Result<PotentialSpec> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| GaplabError::config("tabulated potential: empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 2 || tokens[0] != MAGIC || tokens[1] != VERSION {
        return Err(GaplabError::config(format!(
            "tabulated potential: header must start with `{MAGIC} {VERSION}`"
        )));
    }
    let numbers = tokens[2..]
        .iter()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| GaplabError::config("tabulated potential: header counts must be integers"))?;
    let (dim, shape) = numbers
        .split_first()
        .ok_or_else(|| GaplabError::config("tabulated potential: missing dimension"))?;
    if !(*dim == 1 || *dim == 2) || shape.len() != *dim {
        return Err(GaplabError::config(
            "tabulated potential: header must be `dim n1` (dim 1) or `dim n1 n2` (dim 2)",
        ));
    }
    let values = lines
        .map(|(k, l)| {
            l.trim().parse::<f64>().map_err(|_| {
                GaplabError::config(format!("tabulated potential: line {} is not a number", k + 1))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let expected: usize = shape.iter().product();
    if values.len() != expected {
        return Err(GaplabError::config(format!(
            "tabulated potential: header announces {expected} values, file has {}",
            values.len()
        )));
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(GaplabError::config(format!("tabulated potential: value {k} is not finite")));
    }
    Ok(PotentialSpec::Tabulated {
        shape: shape.to_vec(),
        values,
    })
}

pub fn read_tabulated(path: &Path) -> Result<PotentialSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| GaplabError::io(path, e))?;
    parse_tabulated(&text)
}

pub fn format_tabulated(shape: &[usize], values: &[f64]) -> String {
    let mut out = format!("{MAGIC} {VERSION} {}", shape.len());
    for n in shape {
        let _ = write!(out, " {n}");
    }
    out.push('\n');
    for v in values {
        let _ = writeln!(out, "{v:e}");
    }
    out
}
