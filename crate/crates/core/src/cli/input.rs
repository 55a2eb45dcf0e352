//! System definitions: `{"maps": [...]}` or `{"digits": {"A": 4, "d": [...]}}`.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::digit::DigitSystem;
use crate::error::{Error, Result};
use crate::ifs::{Ifs, Similarity};
use crate::numerics::rational::{format_rational, parse_rational};
use crate::numerics::Rational;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    maps: Option<Vec<MapDoc>>,
    digits: Option<DigitsDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    ratio: Value,
    #[serde(default = "positive")]
    sign: i32,
    translation: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DigitsDoc {
    #[serde(rename = "A")]
    base: Value,
    d: Vec<Value>,
}

fn positive() -> i32 {
    1
}

/// Rationals come as `"p/q"` strings or JSON integers; floats are refused.
fn rational_field(v: &Value, field: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|_| Error::invalid(field, format!("not a rational: {s:?}"))),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap_or_default().into())),
        other => Err(Error::invalid(field, format!("expected \"p/q\" string or integer, got {other}"))),
    }
}

fn relabel(e: Error, prefix: &str) -> Error {
    match e {
        Error::Invalid { field, reason } => Error::invalid(format!("{prefix}.{field}"), reason),
        other => other,
    }
}

pub fn parse_system(text: &str) -> Result<Ifs> {
    let doc: SystemDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match (doc.maps, doc.digits) {
        (Some(maps), None) => {
            let sims = maps
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let path = format!("maps[{k}]");
                    let ratio = rational_field(&m.ratio, &format!("{path}.ratio"))?;
                    let translation = rational_field(&m.translation, &format!("{path}.translation"))?;
                    Similarity::with_sign(m.sign, ratio, translation).map_err(|e| relabel(e, &path))
                })
                .collect::<Result<Vec<_>>>()?;
            Ifs::new(sims)
        }
        (None, Some(d)) => {
            let base = rational_field(&d.base, "digits.A")?;
            let digits = d
                .d
                .iter()
                .enumerate()
                .map(|(k, v)| rational_field(v, &format!("digits.d[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            DigitSystem::new(base, digits)
                .and_then(|ds| ds.to_ifs())
                .map_err(|e| relabel(e, "digits"))
        }
        _ => Err(Error::invalid("system", "exactly one of \"maps\" or \"digits\" is required")),
    }
}

/// Canonical `maps` form; parses back to an identical system.
pub fn system_json(ifs: &Ifs) -> Value {
    let maps: Vec<Value> = ifs
        .maps()
        .iter()
        .map(|m| {
            json!({
                "ratio": format_rational(&m.ratio),
                "sign": m.sign(),
                "translation": format_rational(&m.translation),
            })
        })
        .collect();
    json!({ "maps": maps })
}
