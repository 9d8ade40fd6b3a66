use std::fmt::Write;
use std::path::Path;

use laminations::dynamics::{sample_lamination, trace_ray, RayParams, RayStatus, SchemaPolynomial};
use laminations::io::LaminationDoc;
use laminations::render::{julia_raster, write_png, Coloring, Overlay, RasterSpec};
use num_complex::Complex64;
use serde_json::json;

use crate::input::{parse_angle, read_angles, read_polynomial, read_text};
use crate::outcome::{write_file, Exit, Sink, NUMERICAL, SUCCESS, VALIDATION};
use crate::{ColoringArg, JuliaArgs, RayArgs};

fn params(args: &RayArgs) -> RayParams {
    RayParams { steps_per_level: args.steps, levels: args.levels, newton_tol: args.tolerance, ..RayParams::default() }
}

fn vertex_or_first(f: &SchemaPolynomial, vertex: Option<&str>) -> anyhow::Result<String> {
    match vertex {
        Some(v) if f.schema().vertices.iter().any(|w| w == v) => Ok(v.to_string()),
        Some(v) => Err(Exit::usage(format!("no vertex {v:?} in the polynomial's schema")).into()),
        None => Ok(f.schema().vertices[0].clone()),
    }
}

fn complex_text(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.10} {sign} {:.10}i", z.re, z.im.abs())
}

pub fn trace(polynomial: &Path, angle: &str, args: &RayArgs, out: Option<&Path>, json: bool) -> anyhow::Result<u8> {
    let f = read_polynomial(polynomial)?;
    let vertex = vertex_or_first(&f, args.vertex.as_deref())?;
    let theta = parse_angle(angle)?;
    let ray = trace_ray(&f, &vertex, &theta, &params(args))?;
    if let Some(p) = out {
        write_file(p, ray.to_csv().as_bytes())?;
    }
    let last = ray.points.last().copied();
    if json {
        let doc = json!({
            "vertex": vertex,
            "angle": theta,
            "status": ray.status,
            "landing": ray.landing.map(|z| [z.re, z.im]),
            "last_point": last.map(|z| [z.re, z.im]),
            "samples": ray.points.len(),
        });
        sayln!("{}", crate::outcome::pretty(&doc));
    } else {
        match ray.landing {
            Some(z) => sayln!(
                "ray {theta} from {vertex}: {} at {} ({} samples)",
                ray.status,
                complex_text(z),
                ray.points.len()
            ),
            None => sayln!(
                "ray {theta} from {vertex}: {} after {} samples, last point {}",
                ray.status,
                ray.points.len(),
                last.map(complex_text).unwrap_or_else(|| "none".into())
            ),
        }
    }
    Ok(if ray.status == RayStatus::Landed { SUCCESS } else { NUMERICAL })
}

pub fn sample(polynomial: &Path, angles: &Path, eps: f64, args: &RayArgs, sink: &Sink) -> anyhow::Result<u8> {
    let f = read_polynomial(polynomial)?;
    let vertex = vertex_or_first(&f, args.vertex.as_deref())?;
    let angles = read_angles(angles)?;
    let s = sample_lamination(&f, &vertex, &angles, eps, &params(args))?;
    let mut human = format!(
        "{} of {} rays landed, {} non-trivial classes\n",
        s.landings.len(),
        angles.len(),
        s.lamination.nontrivial_classes().count()
    );
    for c in s.lamination.nontrivial_classes() {
        let _ = writeln!(human, "  {c}");
    }
    for (a, status) in &s.unresolved {
        let _ = writeln!(human, "unresolved: {a} ({status})");
    }
    for v in &s.report.violations {
        let _ = writeln!(human, "violation: {v}");
    }
    let lamination = serde_json::to_value(LaminationDoc::from_lamination(&s.lamination))?;
    let unresolved: Vec<_> = s.unresolved.iter().map(|(a, st)| json!({ "angle": a, "status": st })).collect();
    let report = json!({
        "lamination": lamination,
        "unresolved": unresolved,
        "violations": s.report.violations,
    });
    sink.emit_with(&human, &report, &lamination)?;
    Ok(if !s.unresolved.is_empty() {
        NUMERICAL
    } else if !s.report.is_valid() {
        VALIDATION
    } else {
        SUCCESS
    })
}

pub fn render_julia(args: &JuliaArgs, threads: Option<usize>) -> anyhow::Result<u8> {
    let f = read_polynomial(&args.polynomial)?;
    let vertex = vertex_or_first(&f, args.vertex.as_deref())?;
    let mut spec = RasterSpec::new(args.center, args.width, args.pixels);
    spec.max_iter = args.max_iter;
    spec.coloring = match args.coloring {
        ColoringArg::Smooth => Coloring::Smooth,
        ColoringArg::Binary => Coloring::Binary,
    };
    spec.threads = threads;
    for a in &args.ray {
        let ray = trace_ray(&f, &vertex, &parse_angle(a)?, &RayParams::default())?;
        spec.overlays.push(Overlay::ray(&ray));
    }
    for p in &args.overlay {
        spec.overlays.push(
            Overlay::from_csv(&vertex, &read_text(p)?).map_err(|e| Exit::usage(format!("{}: {e}", p.display())))?,
        );
    }
    let img = julia_raster(&f, &spec)?;
    write_png(&img, &args.out)?;
    sayln!("wrote {} ({}x{})", args.out.display(), img.width(), img.height());
    Ok(SUCCESS)
}
