use std::io::Read;
use std::path::Path;

use anyhow::Context;
use laminations::circle::{Angle, AngleSet};
use laminations::dynamics::SchemaPolynomial;
use laminations::io::{from_json, LaminationInput, PolynomialDoc};
use laminations::lamination::PuzzleTower;
use laminations::schema::{reduce_from_tower, MappingSchema};
use num_complex::Complex64;
use serde_json::Value;

use crate::outcome::Exit;

/// File contents, or standard input for `-`.
pub fn read_text(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = read_text(path)?;
    from_json::<Value>(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_tower(path: &Path) -> anyhow::Result<PuzzleTower> {
    let text = read_text(path)?;
    let doc: LaminationInput = from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    doc.to_tower().with_context(|| format!("building the tower in {}", path.display()))
}

pub fn read_polynomial(path: &Path) -> anyhow::Result<SchemaPolynomial> {
    let text = read_text(path)?;
    let doc: PolynomialDoc = from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    doc.to_polynomial().with_context(|| format!("building the polynomial in {}", path.display()))
}

/// A schema document, the schema of a polynomial document, or the reduced
/// schema of a lamination or tower document.
pub fn read_schema(path: &Path) -> anyhow::Result<MappingSchema> {
    let value = read_json(path)?;
    if value.get("coefficients").is_some() {
        return Ok(read_polynomial(path)?.schema().clone());
    }
    if value.get("vertices").is_some() {
        let schema: MappingSchema =
            serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))?;
        schema.validate()?;
        return Ok(schema);
    }
    let tower = read_tower(path)?;
    Ok(reduce_from_tower(&tower)?)
}

/// Angles from a lamination or tower document (the deepest support), or a
/// list of `p/q` separated by commas or whitespace.
pub fn read_angles(path: &Path) -> anyhow::Result<AngleSet> {
    let text = read_text(path)?;
    if let Ok(doc) = from_json::<LaminationInput>(&text) {
        return Ok(doc.to_tower()?.deepest().support().clone());
    }
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Angle>().map_err(|e| anyhow::Error::new(Exit::usage(format!("angle {s:?}: {e}")))))
        .collect()
}

pub fn parse_angle(s: &str) -> anyhow::Result<Angle> {
    s.parse::<Angle>().map_err(|e| Exit::usage(format!("angle {s:?}: {e}")).into())
}

/// `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num =
        |t: &str| t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("not a finite number: {t:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im: {s:?}")),
    }
}
