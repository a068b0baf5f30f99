use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bundle::{validate_bundle, BinaryForm, ConicBundle};
use crate::census::NumberFieldInputs;
use crate::curve::CurveDescriptor;
use crate::error::{Error, Result};
use crate::gf::{make_field, FieldDesc, FieldElem};

pub const DEFAULT_PRECISION: u32 = 50;
pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const DEFAULT_TRUNCATION: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classify,
    Predict,
    Enumerate,
    Compare,
    Zeta,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Predict => "predict",
            Task::Enumerate => "enumerate",
            Task::Compare => "compare",
            Task::Zeta => "zeta",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: u32,
    #[serde(default = "one")]
    pub n: u32,
}

fn one() -> u32 {
    1
}

/// A coefficient: an integer of the prime field or base-p digits, low to high.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Digits(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleConfig {
    pub l: usize,
    pub a: Vec<Coeff>,
    pub b: Vec<Coeff>,
    pub c: Vec<Coeff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(i64),
    Many(Vec<i64>),
}

impl OneOrMany {
    pub fn to_vec(&self) -> Vec<i64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_list: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub number_field: Option<NumberFieldInputs>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub bundle: BundleConfig,
    #[serde(default = "CurveDescriptor::p1")]
    pub curve: CurveDescriptor,
    pub task: Task,
    #[serde(default)]
    pub params: Params,
}

/// The validated objects a config describes.
#[derive(Clone, Debug)]
pub struct Context {
    pub field: Arc<FieldDesc>,
    pub bundle: ConicBundle,
    pub curve: CurveDescriptor,
}

fn config_error(path: impl Into<String>, reason: impl ToString) -> Error {
    Error::ConfigError {
        path: path.into(),
        reason: reason.to_string(),
    }
}

impl RunConfig {
    /// Schema check only.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { String::new() } else { path };
            config_error(path, e.into_inner())
        })
    }

    pub fn precision(&self) -> u32 {
        self.params.precision.unwrap_or(DEFAULT_PRECISION)
    }

    pub fn budget(&self) -> u64 {
        self.params.budget.unwrap_or(DEFAULT_BUDGET)
    }

    pub fn format(&self) -> Format {
        self.params.format.unwrap_or_default()
    }

    /// Heights to tabulate: `e_list` if present, else `e`.
    pub fn heights(&self) -> Vec<i64> {
        match (&self.params.e_list, self.params.e) {
            (Some(v), _) => v.clone(),
            (None, Some(e)) => vec![e],
            (None, None) => Vec::new(),
        }
    }

    /// Fill defaults so the embedded config is fully resolved.
    pub fn resolved(&self) -> RunConfig {
        let mut c = self.clone();
        c.params.precision = Some(self.precision());
        c.params.budget = Some(self.budget());
        c.params.format = Some(self.format());
        if self.task == Task::Zeta {
            c.params.s.get_or_insert(OneOrMany::Many(vec![2, 3, 5]));
            c.params.truncation.get_or_insert(DEFAULT_TRUNCATION);
        }
        c
    }

    fn form(&self, field: &FieldDesc, name: &str, coeffs: &[Coeff]) -> Result<BinaryForm> {
        if coeffs.len() != self.bundle.l + 1 {
            return Err(config_error(
                format!("bundle.{name}"),
                format!("expected {} coefficients, found {}", self.bundle.l + 1, coeffs.len()),
            ));
        }
        let elems = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match c {
                Coeff::Int(v) => Ok(field.from_int(*v)),
                Coeff::Digits(d) => field
                    .from_digits(d)
                    .map_err(|_| config_error(format!("bundle.{name}[{i}]"), "too many digits")),
            })
            .collect::<Result<Vec<FieldElem>>>()?;
        Ok(BinaryForm::new(elems))
    }

    /// Build field, bundle and curve, and check task parameters.
    pub fn validate(&self) -> Result<Context> {
        let field = make_field(self.field.p, self.field.n).map_err(|e| match e {
            Error::CharTwoUnsupported | Error::NotPrime(_) => config_error("field.p", e),
            _ => config_error("field.n", e),
        })?;
        let a = self.form(&field, "a", &self.bundle.a)?;
        let b = self.form(&field, "b", &self.bundle.b)?;
        let c = self.form(&field, "c", &self.bundle.c)?;
        let bundle = validate_bundle(field.clone(), self.bundle.l, a, b, c)?;
        self.curve.validate().map_err(|e| config_error("curve", e))?;
        let p = &self.params;
        if p.precision == Some(0) {
            return Err(config_error("params.precision", "must be positive"));
        }
        let needs_d = matches!(self.task, Task::Predict | Task::Enumerate | Task::Compare);
        if needs_d {
            let d = p.d.ok_or_else(|| config_error("params.d", "required for this task"))?;
            if d <= 0 || d % 2 != 0 {
                return Err(Error::OddDegreeUnsupported(d));
            }
        }
        if matches!(self.task, Task::Enumerate | Task::Compare) {
            if self.curve.genus != 0 {
                return Err(config_error("curve.genus", "enumeration runs over P^1 only"));
            }
            let hs = self.heights();
            if hs.is_empty() {
                return Err(config_error("params.e", "required for this task"));
            }
            if self.task == Task::Enumerate && hs.len() != 1 {
                return Err(config_error("params.e_list", "enumerate takes a single e"));
            }
            if hs.iter().any(|&e| e < 0) {
                return Err(config_error("params.e", "heights must be non-negative"));
            }
        }
        if self.format() == Format::Csv && self.task != Task::Compare {
            return Err(config_error("params.format", "csv output is available for compare only"));
        }
        if let Some(s) = &p.s {
            if s.to_vec().iter().any(|&s| s <= 1) {
                return Err(config_error("params.s", "s must exceed 1"));
            }
        }
        if let Some(t) = p.truncation {
            if t == 0 || t > 16 {
                return Err(config_error("params.truncation", "must lie in 1..=16"));
            }
        }
        Ok(Context {
            field,
            bundle,
            curve: self.curve.clone(),
        })
    }
}

/// Schema check plus validation.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let c = RunConfig::from_json(text)?;
    c.validate()?;
    Ok(c)
}
