use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use super::figures::FigureId;
use super::HarnessError;
use crate::lattice::{LayerParity, LeakEdge, WalkConfig};

/// Largest accepted step horizon.
pub const MAX_HORIZON: usize = 10_000;

const DEFAULT_HALF_WIDTH: usize = 4;
const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

/// A validated experiment: a base walk plus sweep axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Conventions shared by every point; `r_sq`, `input_mode` and `steps`
    /// hold the first value of each axis.
    pub base: WalkConfig,
    pub r_sq: Vec<f64>,
    pub inputs: Vec<usize>,
    pub horizons: Vec<usize>,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub figure: Option<FigureId>,
}

const KEYS: &[&str] = &[
    "M",
    "steps",
    "input",
    "r_sq",
    "leak_edge",
    "first_layer",
    "renormalize",
    "sweep",
    "out_dir",
    "formats",
    "figure",
];
const SWEEP_KEYS: &[&str] = &["r_sq", "input", "steps"];

pub fn parse_spec(path: &Path) -> Result<ExperimentSpec, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_spec_str(&text)
}

pub fn parse_spec_str(text: &str) -> Result<ExperimentSpec, HarnessError> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Object(obj) = value else {
        return Err(HarnessError::spec("<root>", "expected a JSON object"));
    };
    reject_unknown(&obj, KEYS, "")?;

    let half_width = match obj.get("M") {
        Some(v) => as_usize(v, "M")?,
        None => DEFAULT_HALF_WIDTH,
    };
    if half_width < 2 {
        return Err(HarnessError::spec(
            "M",
            format!("must be at least 2, got {half_width}"),
        ));
    }

    let sweep = match obj.get("sweep") {
        None => Map::new(),
        Some(Value::Object(s)) => s.clone(),
        Some(_) => return Err(HarnessError::spec("sweep", "expected an object")),
    };
    reject_unknown(&sweep, SWEEP_KEYS, "sweep.")?;

    let r_sq = axis(&obj, &sweep, "r_sq", |v, k| {
        let r = as_f64(v, k)?;
        if !(0.0..=1.0).contains(&r) {
            return Err(HarnessError::spec(k, format!("{r} outside [0, 1]")));
        }
        Ok(r)
    })?;
    let modes = 2 * half_width;
    let inputs = axis(&obj, &sweep, "input", |v, k| {
        let m = as_usize(v, k)?;
        if m < 1 || m > modes {
            return Err(HarnessError::spec(k, format!("{m} outside 1..={modes}")));
        }
        Ok(m)
    })?;
    let horizons = axis(&obj, &sweep, "steps", |v, k| {
        let n = as_usize(v, k)?;
        if n > MAX_HORIZON {
            return Err(HarnessError::spec(k, format!("{n} exceeds {MAX_HORIZON}")));
        }
        Ok(n)
    })?;

    let leak_edge = match obj.get("leak_edge") {
        None => LeakEdge::Top,
        Some(v) => match as_str(v, "leak_edge")? {
            "top" => LeakEdge::Top,
            "bottom" => LeakEdge::Bottom,
            other => {
                return Err(HarnessError::spec(
                    "leak_edge",
                    format!("expected \"top\" or \"bottom\", got {other:?}"),
                ))
            }
        },
    };
    let first_layer = match obj.get("first_layer") {
        None => LayerParity::Full,
        Some(v) => parse_parity(as_str(v, "first_layer")?)
            .ok_or_else(|| HarnessError::spec("first_layer", "expected \"full\" or \"offset\""))?,
    };
    let renormalize = match obj.get("renormalize") {
        None => true,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(HarnessError::spec("renormalize", "expected a boolean")),
    };
    let out_dir = match obj.get("out_dir") {
        None => PathBuf::from(DEFAULT_OUT_DIR),
        Some(v) => PathBuf::from(as_str(v, "out_dir")?),
    };
    let formats = match obj.get("formats") {
        None => vec![OutputFormat::Csv],
        Some(Value::Array(items)) => {
            if items.is_empty() {
                return Err(HarnessError::spec("formats", "must not be empty"));
            }
            items
                .iter()
                .map(|v| {
                    let s = as_str(v, "formats")?;
                    OutputFormat::parse(s).ok_or_else(|| {
                        HarnessError::spec("formats", format!("unknown format {s:?}"))
                    })
                })
                .collect::<Result<_, _>>()?
        }
        Some(_) => return Err(HarnessError::spec("formats", "expected an array")),
    };
    let figure = match obj.get("figure") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let s = as_str(v, "figure")?;
            Some(
                FigureId::parse(s)
                    .ok_or_else(|| HarnessError::spec("figure", format!("unknown figure {s:?}")))?,
            )
        }
    };

    let base = WalkConfig {
        half_width,
        steps: horizons[0],
        input_mode: inputs[0],
        r_sq: r_sq[0],
        leak_edge,
        first_layer,
        renormalize,
    };
    Ok(ExperimentSpec {
        base,
        r_sq,
        inputs,
        horizons,
        out_dir,
        formats,
        figure,
    })
}

pub(crate) fn parse_parity(s: &str) -> Option<LayerParity> {
    match s {
        "full" | "full_pairing" => Some(LayerParity::Full),
        "offset" | "offset_pairing" => Some(LayerParity::Offset),
        _ => None,
    }
}

fn reject_unknown(
    obj: &Map<String, Value>,
    known: &[&str],
    prefix: &str,
) -> Result<(), HarnessError> {
    match obj.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(HarnessError::spec(&format!("{prefix}{k}"), "unknown key")),
        None => Ok(()),
    }
}

/// Values of one sweep axis: `sweep.<key>` if present, else the scalar
/// top-level `<key>`.
fn axis<T>(
    obj: &Map<String, Value>,
    sweep: &Map<String, Value>,
    key: &str,
    item: impl Fn(&Value, &str) -> Result<T, HarnessError>,
) -> Result<Vec<T>, HarnessError> {
    if let Some(v) = obj.get(key) {
        item(v, key)?;
    }
    match (sweep.get(key), obj.get(key)) {
        (Some(Value::Array(items)), _) => {
            let name = format!("sweep.{key}");
            if items.is_empty() {
                return Err(HarnessError::spec(&name, "sweep axis must not be empty"));
            }
            items.iter().map(|v| item(v, &name)).collect()
        }
        (Some(_), _) => Err(HarnessError::spec(
            &format!("sweep.{key}"),
            "expected an array",
        )),
        (None, Some(v)) => Ok(vec![item(v, key)?]),
        (None, None) => Err(HarnessError::spec(
            key,
            "missing (give it at top level or under sweep)",
        )),
    }
}

fn as_f64(v: &Value, key: &str) -> Result<f64, HarnessError> {
    v.as_f64()
        .ok_or_else(|| HarnessError::spec(key, format!("expected a number, got {v}")))
}

fn as_usize(v: &Value, key: &str) -> Result<usize, HarnessError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| HarnessError::spec(key, format!("expected a non-negative integer, got {v}")))
}

fn as_str<'a>(v: &'a Value, key: &str) -> Result<&'a str, HarnessError> {
    v.as_str()
        .ok_or_else(|| HarnessError::spec(key, format!("expected a string, got {v}")))
}
