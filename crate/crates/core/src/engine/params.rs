//! Parameter schemas and resolved parameter values.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};

/// Declared type and range of one block parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ParamKind {
    Int {
        min: i64,
        max: i64,
        #[serde(skip_serializing_if = "std::ops::Not::not")]
        odd: bool,
    },
    /// `min` is exclusive when `min_exclusive` is set.
    Real {
        min: f64,
        max: f64,
        #[serde(skip_serializing_if = "std::ops::Not::not")]
        min_exclusive: bool,
    },
    String { max_len: usize },
    Enum { choices: Vec<&'static str> },
    /// `[x, y]`, each within `min..=max`.
    Coords { min: i64, max: i64 },
    /// `[v]` or `[r, g, b]`, each in `0..=255`.
    Color,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    #[serde(flatten)]
    pub kind: ParamKind,
    /// `None` marks an optional parameter with no default.
    pub default: Option<Value>,
    pub description: &'static str,
}

impl ParamSpec {
    /// Checks one supplied value against the schema.
    pub fn check(&self, value: &Value) -> Result<(), String> {
        let name = self.name;
        if value.is_null() && self.default.is_none() {
            return Ok(());
        }
        match &self.kind {
            ParamKind::Int { min, max, odd } => {
                let v = value
                    .as_i64()
                    .ok_or_else(|| format!("'{name}' must be an integer, got {value}"))?;
                if v < *min || v > *max {
                    return Err(format!("'{name}' must be in [{min}, {max}], got {v}"));
                }
                if *odd && v % 2 == 0 {
                    return Err(format!("'{name}' must be odd, got {v}"));
                }
            }
            ParamKind::Real {
                min,
                max,
                min_exclusive,
            } => {
                let v = value
                    .as_f64()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("'{name}' must be a number, got {value}"))?;
                let low_ok = if *min_exclusive { v > *min } else { v >= *min };
                if !low_ok || v > *max {
                    let open = if *min_exclusive { '(' } else { '[' };
                    return Err(format!("'{name}' must be in {open}{min}, {max}], got {v}"));
                }
            }
            ParamKind::String { max_len } => {
                let s = value
                    .as_str()
                    .ok_or_else(|| format!("'{name}' must be a string"))?;
                if s.len() > *max_len {
                    return Err(format!("'{name}' is longer than {max_len} bytes"));
                }
            }
            ParamKind::Enum { choices } => {
                let s = value
                    .as_str()
                    .ok_or_else(|| format!("'{name}' must be one of {choices:?}"))?;
                if !choices.contains(&s) {
                    return Err(format!("'{name}' must be one of {choices:?}, got \"{s}\""));
                }
            }
            ParamKind::Coords { min, max } => {
                let ok = value.as_array().is_some_and(|a| {
                    a.len() == 2
                        && a.iter()
                            .all(|c| c.as_i64().is_some_and(|c| c >= *min && c <= *max))
                });
                if !ok {
                    return Err(format!(
                        "'{name}' must be [x, y] with integers in [{min}, {max}]"
                    ));
                }
            }
            ParamKind::Color => {
                let ok = value.as_array().is_some_and(|a| {
                    (a.len() == 1 || a.len() == 3)
                        && a.iter().all(|c| c.as_u64().is_some_and(|c| c <= 255))
                });
                if !ok {
                    return Err(format!("'{name}' must be [v] or [r, g, b] with values in [0, 255]"));
                }
            }
        }
        Ok(())
    }
}

/// Checks a parameter map against a schema; unknown names are rejected.
pub fn check_params(schema: &[ParamSpec], params: &Map<String, Value>) -> Vec<String> {
    let mut problems = Vec::new();
    for (name, value) in params {
        match schema.iter().find(|s| s.name == name) {
            Some(spec) => {
                if let Err(e) = spec.check(value) {
                    problems.push(e);
                }
            }
            None => problems.push(format!("unknown parameter '{name}'")),
        }
    }
    problems
}

/// Parameter values with defaults filled in. Only produced from maps that
/// passed [`check_params`], so the typed getters do not fail.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamValues {
    values: BTreeMap<&'static str, Value>,
}

impl ParamValues {
    pub fn resolve(schema: &[ParamSpec], params: &Map<String, Value>) -> Self {
        let values = schema
            .iter()
            .filter_map(|spec| {
                let v = params
                    .get(spec.name)
                    .filter(|v| !v.is_null())
                    .cloned()
                    .or_else(|| spec.default.clone())?;
                Some((spec.name, v))
            })
            .collect();
        Self { values }
    }

    fn get(&self, name: &str) -> &Value {
        self.values
            .get(name)
            .unwrap_or_else(|| panic!("parameter '{name}' missing from schema"))
    }

    pub fn int(&self, name: &str) -> i64 {
        self.get(name).as_i64().expect("validated integer")
    }

    pub fn real(&self, name: &str) -> f64 {
        self.get(name).as_f64().expect("validated number")
    }

    pub fn opt_real(&self, name: &str) -> Option<f64> {
        self.values.get(name).and_then(Value::as_f64)
    }

    pub fn str(&self, name: &str) -> &str {
        self.get(name).as_str().expect("validated string")
    }

    pub fn coords(&self, name: &str) -> (i64, i64) {
        let a = self.get(name).as_array().expect("validated coords");
        (a[0].as_i64().unwrap(), a[1].as_i64().unwrap())
    }

    pub fn color(&self, name: &str) -> Vec<u8> {
        self.get(name)
            .as_array()
            .expect("validated color")
            .iter()
            .map(|v| v.as_u64().unwrap() as u8)
            .collect()
    }
}
