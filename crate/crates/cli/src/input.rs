//! Arguments that are either a path to a JSON file or inline JSON.

use anyhow::{bail, Context, Result};
use serde_json::Value;

use rhaly_core::constructions::PolygonalProfile;
use rhaly_core::rhaly::{generating_function, SequenceSpec};
use rhaly_core::{CoeffSeq, Complex64};

use crate::Source;

fn load(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing JSON from {arg}"))
}

pub fn spec(arg: &str) -> Result<SequenceSpec> {
    serde_json::from_value(load(arg)?).context("invalid sequence spec")
}

fn complex(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().context("number")?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(
            a[0].as_f64().context("real part")?,
            a[1].as_f64().context("imaginary part")?,
        )),
        _ => bail!("coefficient {v} is neither a number nor a [re, im] pair"),
    }
}

/// `{"coeffs": [...]}` or a bare list; entries are numbers or `[re, im]` pairs.
pub fn coeffs(arg: &str) -> Result<CoeffSeq> {
    let v = load(arg)?;
    let list = match &v {
        Value::Object(o) => o.get("coeffs").context("missing \"coeffs\"")?,
        other => other,
    };
    let Value::Array(items) = list else {
        bail!("coefficients must be a JSON array");
    };
    let c: Result<Vec<Complex64>> = items.iter().map(complex).collect();
    Ok(CoeffSeq::new(c?)?)
}

pub fn series(src: &Source) -> Result<CoeffSeq> {
    match (&src.spec, &src.coeffs) {
        (Some(s), None) => Ok(generating_function(&spec(s)?)),
        (None, Some(c)) => coeffs(c),
        _ => bail!("give exactly one of --spec and --coeffs"),
    }
}

/// `{"knots": [[x, y], ...]}` or a bare list of knots.
pub fn profile(arg: &str) -> Result<PolygonalProfile> {
    let v = load(arg)?;
    let list = match v {
        Value::Object(mut o) => o.remove("knots").context("missing \"knots\"")?,
        other => other,
    };
    let knots: Vec<(f64, f64)> = serde_json::from_value(list).context("knots must be [x, y] pairs")?;
    Ok(PolygonalProfile::new(knots)?)
}
