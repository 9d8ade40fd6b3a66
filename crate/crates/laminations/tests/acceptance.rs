//! One line per acceptance criterion. Runs without the test harness so the
//! report is always printed; exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use laminations::angle_system::{straighten_combinatorial, tune, AngleSystem, SchemaLamination};
use laminations::circle::{parse_angle_list, Angle, AngleSet};
use laminations::dynamics::{sample_lamination, trace_ray, FiberPoint, RayParams, RayStatus, SchemaPolynomial};
use laminations::fixtures::{fixture, FIXTURES};
use laminations::lamination::{
    generated_classes, primitivity_check, renormalizability_obstruction, verify_tower, ObstructionReport, Piece,
    PrimitivityReport, PuzzleTower, PuzzleView,
};
use laminations::render::{geodesic, julia_raster, tower_svg, Coloring, Geodesic, Overlay, RasterSpec, SvgStyle};
use laminations::schema::{enumerate_markings, reduce_from_tower, MappingSchema};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    }};
}

fn set(s: &str) -> AngleSet {
    parse_angle_list(s).unwrap()
}

fn tower(name: &str) -> PuzzleTower {
    fixture(name).unwrap().tower().unwrap()
}

fn degree_identity() -> Outcome {
    let start = Instant::now();
    let mut towers: Vec<PuzzleTower> = ["basilica", "rabbit", "airplane"].iter().map(|n| tower(n)).collect();
    towers.extend(common::random_towers(2024, 54));
    let mut checks = 0;
    for t in &towers {
        ensure!(verify_tower(t).is_valid(), "invalid tower of degree {}", t.degree());
        ensure!(t.depth() <= 6, "depth {}", t.depth());
        let view = PuzzleView::new(t).map_err(|e| e.to_string())?;
        for k in 0..=t.depth() {
            let check = view.degree_check(k);
            ensure!(check.holds, "degree {} depth {k}: {check:?}", t.degree());
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("{} towers, {checks} depths, {elapsed:.2?}", towers.len()))
}

fn critical_orbit_identity() -> Outcome {
    let mut n = 0;
    for f in FIXTURES.iter().filter(|f| f.is_valid()) {
        let t = f.tower().unwrap();
        let view = PuzzleView::new(&t).map_err(|e| e.to_string())?;
        for k in 0..=t.depth() {
            let inv = view.inventory(k);
            ensure!(inv.implied_degree() == f.degree, "{} depth {k}: {}", f.name, inv.implied_degree());
        }
        n += 1;
    }
    Ok(format!("{n} fixtures at every depth"))
}

fn marking_enumeration() -> Outcome {
    let count = |s: &MappingSchema| enumerate_markings(s).map(|m| m.len()).map_err(|e| e.to_string());
    let quartic = reduce_from_tower(&tower("quartic")).map_err(|e| e.to_string())?;
    ensure!(count(&quartic)? == 3, "z^4 - 1: {}", count(&quartic)?);
    for (triples, expected) in
        [(&[("v", "v", 3)][..], 2), (&[("a", "b", 2), ("b", "a", 2)][..], 3), (&[("a", "a", 2), ("b", "b", 2)][..], 1)]
    {
        let s = MappingSchema::from_triples(triples).unwrap();
        ensure!(count(&s)? == expected, "{s}: {}", count(&s)?);
    }
    let all = common::schemata::all_schemata(64);
    for raw in &all {
        let labels = raw.labels();
        let schema = raw.schema(&labels);
        let found: BTreeSet<_> = enumerate_markings(&schema)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|m| common::schemata::as_pairs(&m.angles, &labels))
            .collect();
        ensure!(found == raw.scan(), "oracle disagrees on {schema}");
    }
    Ok(format!("named counts and {} schemata against the scan", all.len()))
}

const BUDGET: usize = 12;

/// Each quadratic base against the trivial target and the basilica and rabbit at depths 0 to 2.
fn tuning_pairs() -> Vec<(&'static str, AngleSystem, SchemaLamination)> {
    let mut out = Vec::new();
    for base in ["basilica", "rabbit", "airplane"] {
        let sys = AngleSystem::with_budget(&tower(base), &BTreeMap::new(), BUDGET).unwrap();
        out.push((base, sys.clone(), SchemaLamination::trivial(sys.schema())));
        for name in ["basilica", "rabbit"] {
            for depth in 0..=2 {
                let lam = fixture(name).unwrap().tower_to(depth).unwrap().level(depth).unwrap().clone();
                let x = SchemaLamination::new(sys.schema().clone(), BTreeMap::from([("v0".to_string(), lam)])).unwrap();
                out.push((base, sys.clone(), x));
            }
        }
    }
    out
}

fn tuning_round_trip() -> Outcome {
    let pairs = tuning_pairs();
    for (base, sys, x) in &pairs {
        let out = tune(sys, x, BUDGET).map_err(|e| format!("{base}: {e}"))?;
        let back = straighten_combinatorial(sys, &out.lamination).map_err(|e| format!("{base}: {e}"))?;
        ensure!(back.restrict_to(x) == *x, "{base}: straightening does not recover the target");
    }
    ensure!(pairs.len() >= 20, "{} pairs", pairs.len());
    Ok(format!("{} pairs", pairs.len()))
}

fn tuning_invariance() -> Outcome {
    let pairs = tuning_pairs();
    for (base, sys, x) in &pairs {
        let out = tune(sys, x, BUDGET).map_err(|e| format!("{base}: {e}"))?;
        let report = out.lamination.verify_invariant();
        ensure!(report.is_valid(), "{base}: {:?}", report.violations.first());
        ensure!(sys.tower().deepest().refines_into(&out.lamination), "{base}: base classes split");
    }
    Ok(format!("{} outputs invariant and refining the base", pairs.len()))
}

fn primitivity() -> Outcome {
    let airplane = fixture("airplane").unwrap().tower_to(4).unwrap();
    let r = primitivity_check(&airplane, 4).map_err(|e| e.to_string())?;
    ensure!(r == PrimitivityReport::PrimitiveToDepth { depth: 4 }, "airplane: {r:?}");
    for (name, class) in [("basilica", "1/3,2/3"), ("fixed-critical-cubic", "0,1/2")] {
        let t = tower(name);
        match primitivity_check(&t, t.depth()).map_err(|e| e.to_string())? {
            PrimitivityReport::Witness { class: c, .. } => ensure!(c == set(class), "{name}: witness {c}"),
            other => return Err(format!("{name}: {other:?}")),
        }
    }
    Ok("airplane primitive to depth 4, basilica {1/3,2/3}, z^3+3z/2 {0,1/2}".into())
}

fn in_closure(piece: &Piece, theta: &Angle) -> bool {
    piece.contains(theta) || piece.arcs.iter().any(|a| &a.start == theta || &a.end == theta)
}

/// The witness for the second capture map meets the closures of the gap at 0
/// and of the other gap with the same image, both taken in the first map's puzzle.
fn obstruction() -> Outcome {
    let clear = renormalizability_obstruction(&tower("capture-a0")).map_err(|e| e.to_string())?;
    ensure!(matches!(clear, ObstructionReport::Clear { .. }), "a = -1/4: {clear:?}");
    let ObstructionReport::Witness { class, degree, .. } =
        renormalizability_obstruction(&tower("capture-a1")).map_err(|e| e.to_string())?
    else {
        return Err("a1: no witness".into());
    };
    ensure!(degree == 2, "witness degree {degree}");

    let t0 = tower("capture-a0");
    let view = PuzzleView::new(&t0).map_err(|e| e.to_string())?;
    let level = view.level(view.depth());
    let gaps = view.critical_gaps(&view.gap_orbits());
    let l = gaps.iter().find(|g| g.periodic).ok_or("no periodic critical gap")?.piece;
    let l1 = gaps.iter().find(|g| !g.periodic).ok_or("no preperiodic critical gap")?.piece;
    let siblings: Vec<usize> =
        (0..level.pieces().len()).filter(|&j| j != l && j != l1 && level.images()[j] == level.images()[l]).collect();
    ensure!(siblings.len() == 1, "{} gaps share the image of the gap at 0", siblings.len());
    let l2 = siblings[0];
    let meets = |i: usize| class.iter().any(|a| in_closure(level.piece(i), a));
    ensure!(meets(l) && meets(l2), "witness {class} misses L or L''");
    let shared: Vec<&AngleSet> = level
        .lamination()
        .classes()
        .iter()
        .filter(|c| level.piece(l).is_bounded_by(c) && level.piece(l1).is_bounded_by(c))
        .collect();
    ensure!(shared.len() == 1 && shared[0].iter().all(|a| class.contains(a)), "L and L' share {shared:?}");
    Ok(format!("a1 witness {class} meets both gaps and contains {}", shared[0]))
}

fn land(f: &SchemaPolynomial, theta: &str) -> Result<(Complex64, Duration), String> {
    let start = Instant::now();
    let t = trace_ray(f, "v0", &theta.parse().unwrap(), &RayParams::default()).map_err(|e| e.to_string())?;
    ensure!(t.status == RayStatus::Landed, "ray {theta}: {}", t.status);
    Ok((t.landing.unwrap(), start.elapsed()))
}

fn numerical_landing() -> Outcome {
    let cheb = SchemaPolynomial::quadratic(Complex64::new(-2.0, 0.0));
    let basilica = SchemaPolynomial::quadratic(Complex64::new(-1.0, 0.0));
    let alpha = Complex64::new((1.0 - 5f64.sqrt()) / 2.0, 0.0);
    let mut slowest = Duration::ZERO;
    for (f, theta, target, tol) in [
        (&cheb, "0", Complex64::new(2.0, 0.0), 1e-9),
        (&cheb, "1/2", Complex64::new(-2.0, 0.0), 1e-9),
        (&basilica, "1/3", alpha, 1e-6),
        (&basilica, "2/3", alpha, 1e-6),
    ] {
        let (z, dt) = land(f, theta)?;
        ensure!((z - target).norm() < tol, "ray {theta} at {z}, expected {target}");
        ensure!(dt < Duration::from_secs(1), "ray {theta} took {dt:?}");
        slowest = slowest.max(dt);
    }
    Ok(format!("four rays, slowest {slowest:.2?}"))
}

fn sampled_vs_exact() -> Outcome {
    let start = Instant::now();
    let t = fixture("basilica").unwrap().tower_to(2).unwrap();
    let support = t.deepest().support();
    let f = SchemaPolynomial::quadratic(Complex64::new(-1.0, 0.0));
    let s = sample_lamination(&f, "v0", support, 1e-4, &RayParams::default()).map_err(|e| e.to_string())?;
    ensure!(s.unresolved.is_empty(), "unresolved {:?}", s.unresolved);
    let exact = generated_classes(&t, support).lamination;
    ensure!(s.lamination == exact, "sampled {:?} vs exact {:?}", s.lamination.classes(), exact.classes());
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("{} angles, {} classes, {elapsed:.2?}", support.len(), exact.classes().len()))
}

fn functional_equation() -> Outcome {
    let mut worst = 0f64;
    let mut n = 0;
    for fx in FIXTURES.iter().filter(|f| f.polynomial().is_some()) {
        let f = fx.polynomial().unwrap();
        let r = f.escape_radius();
        let delta = f64::from(f.schema().delta_of("v0"));
        for i in 0..64 {
            for j in 0..64 {
                let z = Complex64::new(-r + 2.0 * r * (i as f64 + 0.5) / 64.0, -r + 2.0 * r * (j as f64 + 0.5) / 64.0);
                let p = FiberPoint::new("v0", z);
                let g = f.green(&p).map_err(|e| e.to_string())?;
                if g <= 0.0 {
                    continue;
                }
                let g1 = f.green(&f.evaluate(&p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                let err = (g1 - delta * g).abs();
                ensure!(err < 1e-8, "{}: {z}: error {err:e}", fx.name);
                worst = worst.max(err);
                n += 1;
            }
        }
    }
    Ok(format!("{n} escaping points, worst {worst:.1e}"))
}

fn sha(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn render_determinism() -> Outcome {
    for (name, hash) in [("basilica", common::BASILICA_SVG_SHA256), ("rabbit", common::RABBIT_SVG_SHA256)] {
        let svg = tower_svg(&fixture(name).unwrap().tower_to(4).unwrap(), &SvgStyle::default());
        ensure!(sha(svg.as_bytes()) == hash, "{name} SVG hash {}", sha(svg.as_bytes()));
    }
    let f = fixture("quartic").unwrap().polynomial().unwrap();
    let ray = trace_ray(&f, "v0", &Angle::zero(), &RayParams::default()).map_err(|e| e.to_string())?;
    let mut hashes = Vec::new();
    for threads in [1, 2, 8] {
        let mut spec = RasterSpec::new(Complex64::new(0.0, 0.0), 3.0, 128);
        spec.overlays.push(Overlay::ray(&ray));
        spec.threads = Some(threads);
        hashes.push(sha(julia_raster(&f, &spec).map_err(|e| e.to_string())?.as_raw()));
    }
    ensure!(hashes.iter().all(|h| h == &hashes[0]), "PNG pixels differ across workers");
    let sq = SchemaPolynomial::quadratic(Complex64::new(0.0, 0.0));
    let mut spec = RasterSpec::new(Complex64::new(0.0, 0.0), 2.0, 400);
    spec.coloring = Coloring::Binary;
    spec.max_iter = 1000;
    let img = julia_raster(&sq, &spec).map_err(|e| e.to_string())?;
    let ratio = img.pixels().filter(|p| p.0 == [0, 0, 0]).count() as f64 / (400.0 * 400.0);
    let rel = (ratio - std::f64::consts::FRAC_PI_4).abs() / std::f64::consts::FRAC_PI_4;
    ensure!(rel < 0.01, "disk fills {ratio:.4} of the view");
    Ok(format!("SVG hashes match, raster stable over 1/2/8 workers, disk off by {:.3}%", 100.0 * rel))
}

fn orthogonality_error(a: f64, b: f64) -> f64 {
    match geodesic(a, b) {
        Geodesic::Diameter { from, to } => (from.0 + to.0).abs().max((from.1 + to.1).abs()),
        Geodesic::Arc { center, radius, .. } => {
            let c2 = center.0 * center.0 + center.1 * center.1;
            (c2 - 1.0 - radius * radius).abs() / c2
        }
    }
}

fn geodesic_orthogonality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0f64;
    let mut diameters = 0;
    for i in 0..1000 {
        let a: f64 = rng.gen();
        // Every hundredth pair is antipodal.
        let b = if i % 100 == 0 { (a + 0.5) % 1.0 } else { rng.gen() };
        if (a - b).abs() < 1e-9 {
            continue;
        }
        if matches!(geodesic(a, b), Geodesic::Diameter { .. }) {
            diameters += 1;
        }
        worst = worst.max(orthogonality_error(a, b));
    }
    ensure!(worst < 1e-12, "worst {worst:e}");
    ensure!(diameters >= 10, "{diameters} antipodal pairs drawn as diameters");
    Ok(format!("1000 pairs, {diameters} diameters, worst {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("degree identity", degree_identity),
        ("critical-orbit identity", critical_orbit_identity),
        ("marking enumeration", marking_enumeration),
        ("tuning round trip", tuning_round_trip),
        ("tuning invariance", tuning_invariance),
        ("primitivity", primitivity),
        ("renormalizability obstruction", obstruction),
        ("numerical landing", numerical_landing),
        ("sampled vs exact lamination", sampled_vs_exact),
        ("potential functional equation", functional_equation),
        ("render determinism", render_determinism),
        ("geodesic orthogonality", geodesic_orthogonality),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
