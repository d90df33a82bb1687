//! JSON assembly. Every numeric entry is finite or `null` next to a
//! `<key>_reason` string.

use std::collections::BTreeSet;

use gaplab_core::grid::Grid;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;
pub const TOOL_NAME: &str = "gaplab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Suffix of the string explaining a `null`.
pub const REASON_SUFFIX: &str = "_reason";

fn nonfinite_reason(x: f64) -> &'static str {
    if x.is_nan() {
        "undefined value"
    } else if x > 0.0 {
        "infinite value"
    } else {
        "negative infinite value"
    }
}

#[derive(Debug, Default, Clone)]
pub struct Obj(Map<String, Value>);

impl Obj {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn null(mut self, key: &str, reason: &str) -> Self {
        self.0.insert(key.to_string(), Value::Null);
        self.0.insert(format!("{key}{REASON_SUFFIX}"), Value::String(reason.to_string()));
        self
    }

    /// A finite number, otherwise `null` with a generic reason.
    pub fn num(self, key: &str, x: f64) -> Self {
        self.num_or(key, x, nonfinite_reason(x))
    }

    pub fn num_or(mut self, key: &str, x: f64, reason: &str) -> Self {
        match serde_json::Number::from_f64(x) {
            Some(n) => {
                self.0.insert(key.to_string(), Value::Number(n));
                self
            }
            None => self.null(key, reason),
        }
    }

    pub fn opt_num(self, key: &str, x: Option<f64>, reason: &str) -> Self {
        match x {
            Some(x) => self.num_or(key, x, reason),
            None => self.null(key, reason),
        }
    }

    pub fn int(mut self, key: &str, x: usize) -> Self {
        self.0.insert(key.to_string(), Value::from(x as u64));
        self
    }

    pub fn flag(mut self, key: &str, b: bool) -> Self {
        self.0.insert(key.to_string(), Value::Bool(b));
        self
    }

    pub fn opt_flag(self, key: &str, b: Option<bool>, reason: &str) -> Self {
        match b {
            Some(b) => self.flag(key, b),
            None => self.null(key, reason),
        }
    }

    pub fn text(mut self, key: &str, s: &str) -> Self {
        self.0.insert(key.to_string(), Value::String(s.to_string()));
        self
    }

    pub fn value(mut self, key: &str, v: Value) -> Self {
        self.0.insert(key.to_string(), v);
        self
    }

    pub fn obj(self, key: &str, o: Obj) -> Self {
        self.value(key, o.build())
    }

    pub fn list(self, key: &str, items: Vec<Obj>) -> Self {
        self.value(key, Value::Array(items.into_iter().map(Obj::build).collect()))
    }

    /// A sub-block, or `null` with the failure as reason.
    pub fn block(self, key: &str, b: Result<Obj, String>) -> Self {
        match b {
            Ok(o) => self.obj(key, o),
            Err(reason) => self.null(key, &reason),
        }
    }

    pub fn build(self) -> Value {
        Value::Object(self.0)
    }
}

/// Finite numbers as a JSON array; callers pass finite values only.
pub fn num_array(xs: &[f64]) -> Value {
    Value::Array(
        xs.iter()
            .map(|&x| serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number))
            .collect(),
    )
}

/// Node coordinates, one entry per axis.
pub fn coords(grid: &Grid, node: usize) -> Value {
    let p = grid.coord(node);
    num_array(&p[..grid.dim()])
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report values serialize");
    s.push('\n');
    s
}

/// Dotted key paths of `v`; array elements contribute `[]`.
pub fn key_paths(v: &Value) -> BTreeSet<String> {
    fn walk(v: &Value, prefix: &str, out: &mut BTreeSet<String>) {
        match v {
            Value::Object(m) => {
                for (k, child) in m {
                    let path = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    out.insert(path.clone());
                    walk(child, &path, out);
                }
            }
            Value::Array(items) => {
                let path = format!("{prefix}[]");
                for child in items {
                    walk(child, &path, out);
                }
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(v, "", &mut out);
    out
}

/// Paths of numbers or nulls that break the finite-or-reasoned rule.
pub fn unexplained_nulls(v: &Value) -> Vec<String> {
    fn walk(v: &Value, prefix: &str, out: &mut Vec<String>) {
        match v {
            Value::Object(m) => {
                for (k, child) in m {
                    let path = format!("{prefix}.{k}");
                    if child.is_null() && !matches!(m.get(&format!("{k}{REASON_SUFFIX}")), Some(Value::String(_))) {
                        out.push(path.clone());
                    }
                    walk(child, &path, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    let path = format!("{prefix}[{i}]");
                    if child.is_null() {
                        out.push(path.clone());
                    }
                    walk(child, &path, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(v, "", &mut out);
    out
}
