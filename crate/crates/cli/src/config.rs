//! Run configuration: one JSON document with a `model` block and a
//! per-subcommand `task` block. Flags override fields of the document
//! before it is typed, so both routes go through the same validation.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(rename = "D")]
    pub dim: Option<usize>,
    pub k: Option<usize>,
    #[serde(rename = "L")]
    pub size: Option<usize>,
    pub a: Option<usize>,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "one")]
    pub mu: f64,
}

fn one() -> f64 {
    1.0
}

fn need(v: Option<usize>, field: &str) -> Result<usize, CliError> {
    v.ok_or_else(|| {
        CliError::schema(
            format!("/model/{field}"),
            format!("`{field}` is required by this subcommand"),
        )
    })
}

impl ModelBlock {
    pub fn dim(&self) -> Result<usize, CliError> {
        need(self.dim, "D")
    }

    pub fn k(&self) -> Result<usize, CliError> {
        let k = need(self.k, "k")?;
        let d = self.dim()?;
        if k == 0 || k >= d {
            return Err(CliError::schema(
                "/model/k",
                format!("need 1 <= k <= D-1, got k={k} with D={d}"),
            ));
        }
        Ok(k)
    }

    pub fn size(&self) -> Result<usize, CliError> {
        need(self.size, "L")
    }

    pub fn a(&self) -> Result<usize, CliError> {
        need(self.a, "a")
    }
}

/// Which partition geometry to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Nested boxes with a separating collar, `a <= L-3`.
    #[default]
    Nested,
    /// Nested boxes with only `a <= L`.
    Relaxed,
    /// Two crossing one-vertex slabs; ignores `a`.
    Slabs,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Te0Task {
    pub scheme: SchemeKind,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BettiTask {
    /// Also tabulate the reduced Betti numbers of every partition region.
    pub partitions: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionsTask {
    pub scheme: SchemeKind,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalTask {
    pub beta: Vec<f64>,
    pub scheme: SchemeKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McTask {
    pub beta_mu: Vec<f64>,
    pub sweeps: usize,
    /// Defaults to a tenth of `sweeps`.
    pub thermalization: Option<usize>,
    pub stride: usize,
    pub chains: usize,
    pub seed: u64,
    pub wilson_sizes: Vec<usize>,
    /// Partition index whose `D_i` hosts the defect-fraction probe; needs `a`.
    pub fraction_entry: Option<usize>,
}

impl Default for McTask {
    fn default() -> Self {
        McTask {
            beta_mu: Vec::new(),
            sweeps: 10_000,
            thermalization: None,
            stride: 1,
            chains: 1,
            seed: 1,
            wilson_sizes: Vec::new(),
            fraction_entry: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorChoice {
    A,
    B,
    #[default]
    Both,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemoryTask {
    pub sector: SectorChoice,
    /// Temperature in units of the sector's coupling, for both sectors
    /// unless overridden below.
    pub temperature: Option<f64>,
    pub temperature_a: Option<f64>,
    pub temperature_b: Option<f64>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub max_sweeps: f64,
    pub seed: u64,
}

impl Default for MemoryTask {
    fn default() -> Self {
        MemoryTask {
            sector: SectorChoice::Both,
            temperature: None,
            temperature_a: None,
            temperature_b: None,
            sizes: Vec::new(),
            trials: 20,
            max_sweeps: 1e4,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualityTask {
    pub beta: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config<T> {
    pub model: ModelBlock,
    #[serde(default)]
    pub task: T,
}

/// Reads the config document, or an empty one when no path is given.
pub fn read_document(path: Option<&Path>) -> Result<Value, CliError> {
    let Some(path) = path else {
        return Ok(json!({ "model": {} }));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::schema("", format!("not valid JSON: {e}")))?;
    if !doc.is_object() {
        return Err(CliError::schema("", "config must be a JSON object"));
    }
    Ok(doc)
}

/// Sets `doc[block][field] = value`, creating the block if needed.
pub fn set_field(doc: &mut Value, block: &str, field: &str, value: Value) {
    let root = doc.as_object_mut().expect("config root is an object");
    let entry = root.entry(block).or_insert_with(|| Value::Object(Map::new()));
    if !entry.is_object() {
        *entry = Value::Object(Map::new());
    }
    entry.as_object_mut().unwrap().insert(field.to_string(), value);
}

fn pointer_of(path: &serde_path_to_error::Path, message: &str) -> String {
    let mut p: String = path
        .iter()
        .filter_map(|seg| match seg {
            serde_path_to_error::Segment::Map { key } => Some(format!("/{key}")),
            serde_path_to_error::Segment::Seq { index } => Some(format!("/{index}")),
            _ => None,
        })
        .collect();
    // A missing field is reported at its parent; point at the field itself.
    if let Some(rest) = message.strip_prefix("missing field `") {
        if let Some(name) = rest.split('`').next() {
            p.push('/');
            p.push_str(name);
        }
    }
    // Unknown fields are reported at the offending key.
    if message.starts_with("unknown field `") {
        if let Some(name) = message.split('`').nth(1) {
            if !p.ends_with(&format!("/{name}")) {
                p.push('/');
                p.push_str(name);
            }
        }
    }
    p
}

/// Types the merged document.
pub fn parse<T: DeserializeOwned + Default>(doc: Value) -> Result<Config<T>, CliError> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let message = e.inner().to_string();
        CliError::schema(pointer_of(e.path(), &message), message)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_document() {
        let mut doc = json!({ "model": { "D": 2, "k": 1, "L": 4 } });
        set_field(&mut doc, "model", "L", json!(6));
        set_field(&mut doc, "task", "beta", json!([0.1]));
        let c: Config<ThermalTask> = parse(doc).unwrap();
        assert_eq!(c.model.size, Some(6));
        assert_eq!(c.task.beta, vec![0.1]);
        assert_eq!(c.model.mu, 1.0);
    }

    #[test]
    fn unknown_and_mistyped_fields_point_at_the_field() {
        let doc = json!({ "model": { "D": 2, "q": 1 } });
        match parse::<Te0Task>(doc).unwrap_err() {
            CliError::Schema { pointer, .. } => assert_eq!(pointer, "/model/q"),
            e => panic!("{e:?}"),
        }
        let doc = json!({ "model": { "D": 2 }, "task": { "beta": ["x"] } });
        match parse::<ThermalTask>(doc).unwrap_err() {
            CliError::Schema { pointer, .. } => assert_eq!(pointer, "/task/beta/0"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn k_must_be_below_dimension() {
        let c: Config<Te0Task> = parse(json!({ "model": { "D": 3, "k": 3 } })).unwrap();
        match c.model.k().unwrap_err() {
            CliError::Schema { pointer, .. } => assert_eq!(pointer, "/model/k"),
            e => panic!("{e:?}"),
        }
    }
}
