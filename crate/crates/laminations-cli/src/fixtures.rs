use std::path::Path;

use clap::ValueEnum;
use laminations::fixtures::{f_mu, fixture, FIXTURES};
use laminations::io::{to_json, LaminationDoc, PolynomialDoc, TowerDoc};
use laminations::schema::reduce_from_tower;
use num_complex::Complex64;
use serde_json::json;

use crate::outcome::{pretty, write_file, Exit, SUCCESS};

/// Name of the multiplier family, which takes `--mu` instead of a table entry.
const F_MU: &str = "f-mu";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Tower,
    /// The tower's deepest level on its own.
    Lamination,
    /// The reduced mapping schema of the tower.
    Schema,
    Polynomial,
}

pub fn list(json: bool) -> anyhow::Result<u8> {
    if json {
        let mut rows: Vec<_> = FIXTURES
            .iter()
            .map(|f| {
                json!({
                    "name": f.name,
                    "degree": f.degree,
                    "depth": f.depth,
                    "polynomial": f.polynomial().is_some(),
                    "summary": f.summary,
                })
            })
            .collect();
        rows.push(json!({ "name": F_MU, "degree": 3, "polynomial": true, "summary": f_mu_summary() }));
        sayln!("{}", pretty(&json!(rows)));
    } else {
        for f in FIXTURES {
            sayln!("{:<22} d={} depth={:<2} {}", f.name, f.degree, f.depth, f.summary);
        }
        sayln!("{:<22} d=3          {}", F_MU, f_mu_summary());
    }
    Ok(SUCCESS)
}

fn f_mu_summary() -> &'static str {
    "cubic with fixed points 0, a, conj(a) of multipliers mu, conj(mu); polynomial only, set with --mu re,im"
}

pub fn emit(
    name: &str,
    kind: Kind,
    depth: Option<usize>,
    mu: Option<Complex64>,
    out: Option<&Path>,
) -> anyhow::Result<u8> {
    let text = if name == F_MU {
        if kind != Kind::Polynomial {
            return Err(Exit::usage(format!("{F_MU} only has a polynomial; pass --kind polynomial")).into());
        }
        let (f, _) = f_mu(mu.unwrap_or(Complex64::new(0.0, 0.0)))?;
        to_json(&PolynomialDoc::from_polynomial(&f))
    } else {
        let fx =
            fixture(name).ok_or_else(|| Exit::usage(format!("no fixture named {name:?}; see `lam fixtures list`")))?;
        if mu.is_some() {
            return Err(Exit::usage(format!("--mu only applies to {F_MU}")).into());
        }
        let tower = || fx.tower_to(depth.unwrap_or(fx.depth));
        match kind {
            Kind::Tower => to_json(&TowerDoc::from_tower(&tower()?)),
            Kind::Lamination => to_json(&LaminationDoc::from_lamination(tower()?.deepest())),
            Kind::Schema => to_json(&reduce_from_tower(&tower()?)?),
            Kind::Polynomial => {
                let f = fx.polynomial().ok_or_else(|| Exit::usage(format!("fixture {name:?} has no polynomial")))?;
                to_json(&PolynomialDoc::from_polynomial(&f))
            }
        }
    };
    match out {
        Some(p) => write_file(p, format!("{text}\n").as_bytes())?,
        None => sayln!("{text}"),
    }
    Ok(SUCCESS)
}
