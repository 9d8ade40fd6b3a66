use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use anyhow::Context;
use laminations::angle_system::{self, AngleSystem, CodingDoc, SchemaLamination, SchemaLaminationDoc};
use laminations::io::{from_json, LaminationDoc, LaminationInput};
use laminations::lamination::{self as lam, FiniteLamination, PuzzleTower};
use laminations::render::{DiskDiagram, SvgStyle};
use laminations::schema::{classify_cubic, enumerate_markings, MappingSchema};
use serde_json::{json, Value};

use crate::input::{read_schema, read_text, read_tower};
use crate::outcome::{write_file, Sink, SUCCESS, VALIDATION};

fn classes_text(out: &mut String, lam: &FiniteLamination) {
    for c in lam.nontrivial_classes() {
        let _ = writeln!(out, "  {c}");
    }
}

/// Towers get the full tower check; a lone lamination is checked for
/// unlinked classes and forward invariance.
pub fn verify(path: &Path, sink: &Sink) -> anyhow::Result<u8> {
    let input: LaminationInput = from_json(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let tower = input.to_tower()?;
    let report = match input {
        LaminationInput::Tower(_) => lam::verify_tower(&tower),
        LaminationInput::Lamination(_) => tower.deepest().verify_invariant(),
    };
    let mut human = String::new();
    if report.is_valid() {
        let _ = writeln!(
            human,
            "valid: degree {}, depth {}, {} non-trivial classes at the deepest level",
            tower.degree(),
            tower.depth(),
            tower.deepest().nontrivial_classes().count()
        );
    } else {
        let _ = writeln!(human, "invalid: {} violation(s)", report.violations.len());
        for v in &report.violations {
            let _ = writeln!(human, "  {v}");
        }
    }
    let doc = json!({
        "valid": report.is_valid(),
        "degree": tower.degree(),
        "depth": tower.depth(),
        "violations": report.violations,
    });
    sink.emit(&human, &doc)?;
    Ok(if report.is_valid() { SUCCESS } else { VALIDATION })
}

pub fn pieces(path: &Path, depth: usize, sink: &Sink) -> anyhow::Result<u8> {
    let tower = read_tower(path)?;
    let level = lam::pieces(&tower, depth)?;
    let check = lam::total_degree_check(&tower, depth)?;
    let mut human = format!("depth {depth}: {} pieces\n", level.pieces().len());
    for (i, p) in level.pieces().iter().enumerate() {
        let arcs: Vec<String> = p.arcs.iter().map(ToString::to_string).collect();
        let arcs = if arcs.is_empty() { "whole circle".to_string() } else { arcs.join(" ") };
        let _ = writeln!(human, "  {i}: degree {}, measure {}, arcs {arcs}", p.degree, p.measure());
    }
    let _ = writeln!(
        human,
        "degree identity {}: pieces {} + classes {} vs {}",
        if check.holds { "holds" } else { "fails" },
        check.piece_excess,
        check.class_excess,
        tower.degree() - 1
    );
    let doc = json!({ "depth": depth, "pieces": level.pieces(), "degree_check": check });
    sink.emit(&human, &doc)?;
    Ok(if check.holds { SUCCESS } else { VALIDATION })
}

fn schema_text(schema: &MappingSchema) -> String {
    let mut out = String::new();
    for v in &schema.vertices {
        let ret = schema
            .return_times
            .as_ref()
            .and_then(|r| r.get(v))
            .map(|n| format!(", return time {n}"))
            .unwrap_or_default();
        let _ = writeln!(out, "  {v} -> {}, degree {}{ret}", schema.sigma_of(v), schema.delta_of(v));
    }
    out
}

pub fn schema(path: &Path, sink: &Sink) -> anyhow::Result<u8> {
    let schema = read_schema(path)?;
    let cubic = (schema.model_dimension() == 2 && schema.is_reduced()).then(|| classify_cubic(&schema)).transpose()?;
    let mut human = format!("{} vertices, model dimension {}\n", schema.vertices.len(), schema.model_dimension());
    human.push_str(&schema_text(&schema));
    if let Some(t) = cubic {
        let _ = writeln!(human, "cubic type: {t}");
    }
    let report = json!({ "schema": schema, "cubic_type": cubic });
    sink.emit_with(&human, &report, &serde_json::to_value(&schema)?)?;
    Ok(SUCCESS)
}

pub fn markings(path: &Path, sink: &Sink) -> anyhow::Result<u8> {
    let schema = read_schema(path)?;
    let markings = enumerate_markings(&schema)?;
    let mut human = format!("{} markings\n", markings.len());
    for m in &markings {
        let parts: Vec<String> = schema.canonical_order().iter().map(|v| format!("{v}={}", m.angles[v])).collect();
        let _ = writeln!(human, "  {}", parts.join(" "));
    }
    let doc = json!({ "count": markings.len(), "markings": markings });
    sink.emit(&human, &doc)?;
    Ok(SUCCESS)
}

fn system(tower: &PuzzleTower, budget: usize, codings: Option<&Path>) -> anyhow::Result<AngleSystem> {
    let roots = match codings {
        Some(p) => {
            let docs: Vec<CodingDoc> = from_json(&read_text(p)?).with_context(|| format!("parsing {}", p.display()))?;
            docs.into_iter().map(|d| (d.gap, d.root)).collect()
        }
        None => BTreeMap::new(),
    };
    Ok(AngleSystem::with_budget(tower, &roots, budget)?)
}

fn codings_text(sys: &AngleSystem) -> String {
    let mut out = String::new();
    for c in sys.codings() {
        let _ = writeln!(out, "  gap {}: degree {}, return {} steps, root {}", c.vertex, c.degree, c.steps, c.root);
    }
    out
}

pub fn tune(base: &Path, target: &Path, budget: usize, codings: Option<&Path>, sink: &Sink) -> anyhow::Result<u8> {
    let tower = read_tower(base)?;
    let sys = system(&tower, budget, codings)?;
    let doc: SchemaLaminationDoc =
        from_json(&read_text(target)?).with_context(|| format!("parsing {}", target.display()))?;
    let target = SchemaLamination::from_doc(&doc)?;
    let out = angle_system::tune(&sys, &target, budget)?;
    let report = out.lamination.verify_invariant();
    let mut human = format!(
        "tuned lamination: degree {}, {} non-trivial classes, base depth {}\n",
        out.lamination.degree(),
        out.lamination.nontrivial_classes().count(),
        out.depth
    );
    human.push_str(&codings_text(&sys));
    classes_text(&mut human, &out.lamination);
    for v in &report.violations {
        let _ = writeln!(human, "violation: {v}");
    }
    let lamination = serde_json::to_value(LaminationDoc::from_lamination(&out.lamination))?;
    let doc = json!({
        "lamination": lamination,
        "depth": out.depth,
        "codings": sys.docs(),
        "violations": report.violations,
    });
    sink.emit_with(&human, &doc, &lamination)?;
    Ok(if report.is_valid() { SUCCESS } else { VALIDATION })
}

pub fn straighten(
    base: &Path,
    lamination: &Path,
    budget: usize,
    codings: Option<&Path>,
    sink: &Sink,
) -> anyhow::Result<u8> {
    let tower = read_tower(base)?;
    let sys = system(&tower, budget, codings)?;
    let lam = read_tower(lamination)?.deepest().clone();
    let out = angle_system::straighten_combinatorial(&sys, &lam)?;
    let mut human = String::from("straightened laminations\n");
    human.push_str(&codings_text(&sys));
    for (v, l) in &out.laminations {
        let _ = writeln!(human, "{v}: degree {}, {} non-trivial classes", l.degree(), l.nontrivial_classes().count());
        classes_text(&mut human, l);
    }
    let doc: Value = serde_json::to_value(out.to_doc())?;
    sink.emit(&human, &doc)?;
    Ok(SUCCESS)
}

pub fn render_lam(path: &Path, depth: Option<usize>, style: &SvgStyle, out: Option<&Path>) -> anyhow::Result<u8> {
    let tower = read_tower(path)?;
    let (diagram, support) = match depth {
        Some(k) => (DiskDiagram::from_lamination(tower.level(k)?), tower.level(k)?.support()),
        None if tower.depth() == 0 => (DiskDiagram::from_lamination(tower.deepest()), tower.deepest().support()),
        None => (DiskDiagram::from_tower(&tower), tower.deepest().support()),
    };
    let svg = diagram.with_labels(support).to_svg(style);
    match out {
        Some(p) => write_file(p, svg.as_bytes())?,
        None => say!("{svg}"),
    }
    Ok(SUCCESS)
}
