//! Weight specifications and number formatting shared by front ends.
//!
//! A weight spec is one of
//!
//! * an inline list: `[1, 2, 3]` or `1,2,3`;
//! * a JSON object: `{"weights": [..]}`, `{"family": "sukhatme", "n": 5,
//!   "orientation": "descending"}`, `{"family": "uniform", "n": 4}`, or any
//!   registry family with its parameters;
//! * a registry name with parameters: `zipf:n=10,s=1.5`, `log:beta=2`;
//! * a path to a file holding any of the above.
//!
//! Registry: `uniform`, `sukhatme-asc`, `sukhatme-desc`, `linear`,
//! `constant`, `log`, `log-loglog`, `zipf`.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::bottomk::{Family, WeightSequence};
use crate::error::{Error, Result};
use crate::weights::{Orientation, WeightVector};

pub const FAMILIES: [&str; 8] =
    ["uniform", "sukhatme-asc", "sukhatme-desc", "linear", "constant", "log", "log-loglog", "zipf"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyParams {
    pub n: Option<usize>,
    pub orientation: Option<Orientation>,
    pub beta: Option<f64>,
    pub s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    Inline(Vec<f64>),
    Named { family: String, params: FamilyParams },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    pub source: WeightSource,
    pub normalize: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectSpec {
    weights: Option<Vec<Value>>,
    family: Option<String>,
    #[serde(default)]
    normalize: bool,
    n: Option<usize>,
    orientation: Option<Orientation>,
    beta: Option<f64>,
    s: Option<f64>,
}

impl WeightSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty weight spec".into()));
        }
        if t.starts_with('[') || t.starts_with('{') {
            return Self::from_json(t);
        }
        if let Some(list) = parse_number_list(t) {
            return list.map(|w| Self { source: WeightSource::Inline(w), normalize: false });
        }
        let (name, rest) = t.split_once(':').unwrap_or((t, ""));
        if FAMILIES.contains(&name) || name == "sukhatme" {
            return Self::named(name, parse_params(rest)?);
        }
        let path = Path::new(t);
        if path.is_file() {
            let body = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
            return Self::parse(&body).map_err(|e| Error::Parse(format!("{t}: {e}")));
        }
        Err(Error::Parse(format!(
            "weights: {t:?} is not a list, JSON object, registry family ({}) or readable file",
            FAMILIES.join(", ")
        )))
    }

    fn from_json(t: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(t).map_err(|e| Error::Parse(format!("weights: {e}")))?;
        if let Value::Array(items) = value {
            return Ok(Self { source: WeightSource::Inline(json_numbers(&items)?), normalize: false });
        }
        let obj: ObjectSpec = serde_json::from_value(value).map_err(|e| Error::Parse(format!("weights: {e}")))?;
        let mut spec = match (obj.weights, obj.family) {
            (Some(w), None) => Self { source: WeightSource::Inline(json_numbers(&w)?), normalize: false },
            (None, Some(f)) => {
                Self::named(&f, FamilyParams { n: obj.n, orientation: obj.orientation, beta: obj.beta, s: obj.s })?
            }
            (Some(_), Some(_)) => return Err(Error::Parse("weights: give either `weights` or `family`, not both".into())),
            (None, None) => return Err(Error::Parse("weights: missing field `weights` or `family`".into())),
        };
        spec.normalize = obj.normalize;
        Ok(spec)
    }

    fn named(name: &str, mut params: FamilyParams) -> Result<Self> {
        let family = match name {
            "sukhatme" => match params.orientation {
                Some(Orientation::Ascending) => "sukhatme-asc",
                Some(Orientation::Descending) => "sukhatme-desc",
                None => return Err(Error::Parse("family sukhatme: missing field `orientation`".into())),
            },
            other if FAMILIES.contains(&other) => {
                if params.orientation.is_some() {
                    return Err(Error::Parse(format!("family {other}: unexpected field `orientation`")));
                }
                other
            }
            other => {
                return Err(Error::Parse(format!("family: unknown name {other:?}, expected one of {}", FAMILIES.join(", "))))
            }
        };
        params.orientation = None;
        let allowed: &[&str] = match family {
            "log" => &["n", "beta"],
            "zipf" => &["n", "s"],
            _ => &["n"],
        };
        for (field, present) in [("beta", params.beta.is_some()), ("s", params.s.is_some())] {
            if present && !allowed.contains(&field) {
                return Err(Error::Parse(format!("family {family}: unexpected field `{field}`")));
            }
        }
        Ok(Self { source: WeightSource::Named { family: family.to_string(), params }, normalize: false })
    }

    pub fn normalized(mut self, yes: bool) -> Self {
        self.normalize |= yes;
        self
    }

    /// Resolves to finite weights; families need `n`.
    pub fn to_vector(&self) -> Result<WeightVector> {
        let w = match &self.source {
            WeightSource::Inline(w) => WeightVector::new(w.clone()).map_err(|e| match e {
                Error::InvalidWeight { index, value } => {
                    Error::Parse(format!("weights[{}]: {value} is not a finite positive number", index - 1))
                }
                other => other,
            })?,
            WeightSource::Named { family, params } => {
                let n = params.n.ok_or_else(|| Error::Parse(format!("family {family}: missing field `n`")))?;
                if n == 0 {
                    return Err(Error::Parse(format!("family {family}: field `n` must be >= 1")));
                }
                match family.as_str() {
                    "uniform" => WeightVector::uniform(n)?,
                    "sukhatme-asc" => WeightVector::sukhatme(n, Orientation::Ascending)?,
                    "sukhatme-desc" => WeightVector::sukhatme(n, Orientation::Descending)?,
                    "zipf" => WeightVector::zipf(n, params.s.unwrap_or(1.0))?,
                    _ => self.to_sequence()?.truncate(n)?,
                }
            }
        };
        Ok(if self.normalize { w.normalize() } else { w })
    }

    /// Resolves to an infinite sequence; only `linear`, `constant`, `log` and
    /// `log-loglog` qualify.
    pub fn to_sequence(&self) -> Result<WeightSequence> {
        let WeightSource::Named { family, params } = &self.source else {
            return Err(Error::Parse("weights: an inline list is finite; name a sequence family".into()));
        };
        WeightSequence::from_family(family_tag(family, params.beta)?)
    }
}

/// Maps a registry name to an infinite-sequence family.
pub fn family_tag(name: &str, beta: Option<f64>) -> Result<Family> {
    match name {
        "linear" => Ok(Family::Linear),
        "constant" => Ok(Family::Constant),
        "log" => Ok(Family::Log { beta: beta.unwrap_or(1.0) }),
        "log-loglog" => Ok(Family::LogLoglog),
        other => Err(Error::Parse(format!(
            "family: {other:?} is not an infinite sequence family (linear, constant, log, log-loglog)"
        ))),
    }
}

fn json_numbers(items: &[Value]) -> Result<Vec<f64>> {
    items
        .iter()
        .enumerate()
        .map(|(i, v)| v.as_f64().ok_or_else(|| Error::Parse(format!("weights[{i}]: {v} is not a number"))))
        .collect()
}

fn parse_number_list(t: &str) -> Option<Result<Vec<f64>>> {
    let tokens: Vec<&str> = t.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
    let first = tokens.first()?;
    first.parse::<f64>().ok()?;
    Some(
        tokens
            .iter()
            .enumerate()
            .map(|(i, s)| s.parse::<f64>().map_err(|_| Error::Parse(format!("weights[{i}]: {s:?} is not a number"))))
            .collect(),
    )
}

fn parse_params(rest: &str) -> Result<FamilyParams> {
    let mut p = FamilyParams::default();
    for kv in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("family parameter {kv:?}: expected key=value")))?;
        let bad = |e: &dyn std::fmt::Display| Error::Parse(format!("family parameter `{k}`: {e}"));
        match k.trim() {
            "n" => p.n = Some(v.trim().parse().map_err(|e| bad(&e))?),
            "beta" => p.beta = Some(v.trim().parse().map_err(|e| bad(&e))?),
            "s" => p.s = Some(v.trim().parse().map_err(|e| bad(&e))?),
            "orientation" => {
                p.orientation = Some(match v.trim() {
                    "asc" | "ascending" => Orientation::Ascending,
                    "desc" | "descending" => Orientation::Descending,
                    other => return Err(bad(&format!("{other:?} is not ascending or descending"))),
                })
            }
            other => return Err(Error::Parse(format!("family parameter `{other}` is not recognised"))),
        }
    }
    Ok(p)
}

/// Rounds to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// `x` to 9 significant digits in the shortest form that reads back exactly.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{}", round_sig(x))
    }
}

/// Applies [`round_sig`] to every float in a JSON value.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}
