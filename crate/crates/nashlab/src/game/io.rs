//! Game spec files.
//!
//! Specs are stored as JSON objects with `format_version: 1` and a `kind` of
//! `"episodic"`, `"discounted"` or `"linear"`. All floating-point numbers are
//! written as decimal scientific notation with 17 significant digits, which
//! round-trips every f64 bit-exactly.

use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use super::{DiscountedGameSpec, EpisodicGameSpec, InitialState, LinearGameSpec};
use crate::error::SpecIoError;

pub const FORMAT_VERSION: i64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum GameSpec {
    Episodic(EpisodicGameSpec),
    Discounted(DiscountedGameSpec),
    Linear(LinearGameSpec),
}

impl GameSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GameSpec::Episodic(_) => "episodic",
            GameSpec::Discounted(_) => "discounted",
            GameSpec::Linear(_) => "linear",
        }
    }

    pub fn validate(&self) -> super::ValidationReport {
        match self {
            GameSpec::Episodic(s) => s.validate(),
            GameSpec::Discounted(s) => s.validate(),
            GameSpec::Linear(s) => s.validate(),
        }
    }
}

/// A float rendered with 17 significant digits, wrapped as a raw JSON number
/// so the serializer emits the digits verbatim.
pub fn num17(x: f64) -> Value {
    Value::Number(serde_json::Number::from_string_unchecked(format!("{x:.16e}")))
}

fn arr1(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num17(x)).collect())
}

fn arr2(v: &[Vec<f64>]) -> Value {
    Value::Array(v.iter().map(|r| arr1(r)).collect())
}

fn arr3(v: &[Vec<Vec<f64>>]) -> Value {
    Value::Array(v.iter().map(|r| arr2(r)).collect())
}

fn arr4(v: &[Vec<Vec<Vec<f64>>>]) -> Value {
    Value::Array(v.iter().map(|r| arr3(r)).collect())
}

fn initial_state_value(initial: &InitialState) -> Value {
    match initial {
        InitialState::Fixed(s) => Value::from(*s as u64),
        InitialState::Distribution(row) => arr1(row),
    }
}

pub fn spec_to_json(spec: &GameSpec) -> Value {
    let mut obj = Map::new();
    obj.insert("format_version".into(), Value::from(FORMAT_VERSION));
    obj.insert("kind".into(), Value::from(spec.kind()));
    match spec {
        GameSpec::Episodic(s) => {
            obj.insert("H".into(), Value::from(s.half_horizon as u64));
            obj.insert("S".into(), Value::from(s.num_states as u64));
            obj.insert("A1".into(), Value::from(s.actions_max as u64));
            obj.insert("A2".into(), Value::from(s.actions_min as u64));
            obj.insert("transitions".into(), arr4(&s.transitions));
            obj.insert("rewards".into(), arr3(&s.rewards));
            obj.insert("initial_state".into(), initial_state_value(&s.initial_state));
        }
        GameSpec::Discounted(s) => {
            obj.insert("gamma".into(), num17(s.discount));
            obj.insert("S".into(), Value::from(s.num_states as u64));
            obj.insert("A1".into(), Value::from(s.actions_max as u64));
            obj.insert("A2".into(), Value::from(s.actions_min as u64));
            obj.insert("transitions".into(), arr3(&s.transitions));
            obj.insert("rewards".into(), arr2(&s.rewards));
            obj.insert("initial_state".into(), Value::from(s.initial_state as u64));
        }
        GameSpec::Linear(s) => {
            obj.insert("H".into(), Value::from(s.half_horizon as u64));
            obj.insert("S".into(), Value::from(s.num_states as u64));
            obj.insert("A1".into(), Value::from(s.actions_max as u64));
            obj.insert("A2".into(), Value::from(s.actions_min as u64));
            obj.insert("d".into(), Value::from(s.dim as u64));
            obj.insert("phi".into(), arr4(&s.features));
            obj.insert("theta".into(), arr3(&s.measures));
            obj.insert("mu".into(), arr2(&s.reward_weights));
            obj.insert("initial_state".into(), initial_state_value(&s.initial_state));
        }
    }
    Value::Object(obj)
}

pub fn write_spec(spec: &GameSpec, path: &Path) -> Result<(), SpecIoError> {
    let text = serde_json::to_string_pretty(&spec_to_json(spec)).expect("spec serialization");
    fs::write(path, text + "\n").map_err(|source| SpecIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_spec(path: &Path) -> Result<GameSpec, SpecIoError> {
    let text = fs::read_to_string(path).map_err(|source| SpecIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text, &path.display().to_string())
}

pub fn parse_spec(text: &str, path: &str) -> Result<GameSpec, SpecIoError> {
    let value: Value = serde_json::from_str(text).map_err(|e| SpecIoError::Parse {
        path: path.into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let walker = Walker { path };
    let root = walker.object(&value, "top level")?;
    let version = walker.integer(root, "format_version", "top level")?;
    if version != FORMAT_VERSION {
        return Err(SpecIoError::VersionMismatch {
            path: path.into(),
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let kind = walker.string(root, "kind", "top level")?;
    match kind.as_str() {
        "episodic" => Ok(GameSpec::Episodic(EpisodicGameSpec {
            half_horizon: walker.size(root, "H")?,
            num_states: walker.size(root, "S")?,
            actions_max: walker.size(root, "A1")?,
            actions_min: walker.size(root, "A2")?,
            transitions: walker.f4(root, "transitions")?,
            rewards: walker.f3(root, "rewards")?,
            initial_state: walker.initial_state(root)?,
        })),
        "discounted" => Ok(GameSpec::Discounted(DiscountedGameSpec {
            num_states: walker.size(root, "S")?,
            actions_max: walker.size(root, "A1")?,
            actions_min: walker.size(root, "A2")?,
            transitions: walker.f3(root, "transitions")?,
            rewards: walker.f2(root, "rewards")?,
            discount: walker.float(root, "gamma", "top level")?,
            initial_state: walker.size(root, "initial_state")?,
        })),
        "linear" => Ok(GameSpec::Linear(LinearGameSpec {
            half_horizon: walker.size(root, "H")?,
            num_states: walker.size(root, "S")?,
            actions_max: walker.size(root, "A1")?,
            actions_min: walker.size(root, "A2")?,
            dim: walker.size(root, "d")?,
            features: walker.f4(root, "phi")?,
            measures: walker.f3(root, "theta")?,
            reward_weights: walker.f2(root, "mu")?,
            initial_state: walker.initial_state(root)?,
        })),
        other => Err(SpecIoError::UnknownKind {
            path: path.into(),
            kind: other.into(),
        }),
    }
}

/// Walks a parsed JSON value, producing errors that name the offending field.
struct Walker<'a> {
    path: &'a str,
}

impl Walker<'_> {
    fn missing(&self, field: &str, location: &str) -> SpecIoError {
        SpecIoError::MissingField {
            path: self.path.into(),
            field: field.into(),
            location: location.into(),
        }
    }

    fn invalid(&self, field: &str, message: String) -> SpecIoError {
        SpecIoError::InvalidField {
            path: self.path.into(),
            field: field.into(),
            message,
        }
    }

    fn object<'v>(&self, v: &'v Value, location: &str) -> Result<&'v Map<String, Value>, SpecIoError> {
        v.as_object()
            .ok_or_else(|| self.invalid(location, "expected a JSON object".into()))
    }

    fn get<'v>(&self, obj: &'v Map<String, Value>, field: &str) -> Result<&'v Value, SpecIoError> {
        obj.get(field).ok_or_else(|| self.missing(field, "top level"))
    }

    fn integer(&self, obj: &Map<String, Value>, field: &str, location: &str) -> Result<i64, SpecIoError> {
        let v = obj.get(field).ok_or_else(|| self.missing(field, location))?;
        v.as_i64()
            .ok_or_else(|| self.invalid(field, format!("expected an integer, got {v}")))
    }

    fn size(&self, obj: &Map<String, Value>, field: &str) -> Result<usize, SpecIoError> {
        let n = self.integer(obj, field, "top level")?;
        usize::try_from(n).map_err(|_| self.invalid(field, format!("expected a nonnegative integer, got {n}")))
    }

    fn float(&self, obj: &Map<String, Value>, field: &str, location: &str) -> Result<f64, SpecIoError> {
        let v = obj.get(field).ok_or_else(|| self.missing(field, location))?;
        self.float_value(v, field)
    }

    fn float_value(&self, v: &Value, field: &str) -> Result<f64, SpecIoError> {
        v.as_f64()
            .ok_or_else(|| self.invalid(field, format!("expected a number, got {v}")))
    }

    fn string(&self, obj: &Map<String, Value>, field: &str, location: &str) -> Result<String, SpecIoError> {
        let v = obj.get(field).ok_or_else(|| self.missing(field, location))?;
        v.as_str()
            .map(str::to_owned)
            .ok_or_else(|| self.invalid(field, format!("expected a string, got {v}")))
    }

    fn f1(&self, v: &Value, field: &str) -> Result<Vec<f64>, SpecIoError> {
        let arr = v
            .as_array()
            .ok_or_else(|| self.invalid(field, format!("expected an array, got {v}")))?;
        arr.iter().map(|x| self.float_value(x, field)).collect()
    }

    fn f2(&self, obj: &Map<String, Value>, field: &str) -> Result<Vec<Vec<f64>>, SpecIoError> {
        self.nested(self.get(obj, field)?, field, |w, v, f| w.f1(v, f))
    }

    fn f3(&self, obj: &Map<String, Value>, field: &str) -> Result<Vec<Vec<Vec<f64>>>, SpecIoError> {
        self.nested(self.get(obj, field)?, field, |w, v, f| {
            w.nested(v, f, |w, v, f| w.f1(v, f))
        })
    }

    fn f4(&self, obj: &Map<String, Value>, field: &str) -> Result<Vec<Vec<Vec<Vec<f64>>>>, SpecIoError> {
        self.nested(self.get(obj, field)?, field, |w, v, f| {
            w.nested(v, f, |w, v, f| w.nested(v, f, |w, v, f| w.f1(v, f)))
        })
    }

    fn nested<T>(
        &self,
        v: &Value,
        field: &str,
        inner: impl Fn(&Self, &Value, &str) -> Result<T, SpecIoError>,
    ) -> Result<Vec<T>, SpecIoError> {
        let arr = v
            .as_array()
            .ok_or_else(|| self.invalid(field, format!("expected an array, got {v}")))?;
        arr.iter().map(|x| inner(self, x, field)).collect()
    }

    fn initial_state(&self, obj: &Map<String, Value>) -> Result<InitialState, SpecIoError> {
        let v = self.get(obj, "initial_state")?;
        if let Some(n) = v.as_u64() {
            Ok(InitialState::Fixed(n as usize))
        } else if v.is_array() {
            Ok(InitialState::Distribution(self.f1(v, "initial_state")?))
        } else {
            Err(self.invalid(
                "initial_state",
                format!("expected a state index or a probability row, got {v}"),
            ))
        }
    }
}
