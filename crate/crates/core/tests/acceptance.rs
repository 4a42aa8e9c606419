//! Acceptance battery. Prints one PASS/FAIL line per criterion, then fails if any criterion failed.

use std::time::{Duration, Instant};

use contact_triad::catalog::{self, Example};
use contact_triad::connection::{tensor_b1, AffineConnection};
use contact_triad::engine::DiffEngine;
use contact_triad::field::Point;
use contact_triad::frame::{self, MovingFrame};
use contact_triad::linalg::{self, Mat};
use contact_triad::suite::sample_points;
use contact_triad::verify::{self, CheckResult, PointContext, Sampling};

const C_VALUES: [f64; 3] = [-1.0, 0.0, 1.0];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

/// Largest residual over `results`, named.
fn worst<'a>(results: impl IntoIterator<Item = &'a CheckResult>) -> (f64, String) {
    let mut out = (0.0f64, String::from("none"));
    for r in results {
        if r.residual.is_nan() || r.residual > out.0 || r.error.is_some() {
            out = (if r.error.is_some() { f64::NAN } else { r.residual }, r.name.clone());
        }
    }
    out
}

fn within(value: f64, tol: f64) -> bool {
    value <= tol
}

fn points(ex: &Example, count: usize) -> Vec<Point> {
    sample_points(ex, count, 42)
}

fn ctx(ex: &Example, p: &Point) -> PointContext {
    PointContext::new(&ex.triad, p, Sampling::default()).unwrap()
}

fn existence() -> Outcome {
    let start = Instant::now();
    let mut max = 0.0f64;
    let mut count = 0;
    for ex in catalog::catalog() {
        for p in points(&ex, 20) {
            let results = verify::check_axioms(&ex.triad, 0.0, &p).unwrap();
            count += results.len();
            max = max.max(worst(&results).0);
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: within(max, 1e-8) && elapsed < Duration::from_secs(10),
        detail: format!("{count} axiom residuals, max {max:.2e} (tol 1e-8), {:.2}s (limit 10s)", elapsed.as_secs_f64()),
    }
}

fn generalized_family() -> Outcome {
    let mut max = 0.0f64;
    for ex in catalog::catalog() {
        for p in points(&ex, 10) {
            for c in C_VALUES {
                max = max.max(worst(&verify::check_axioms(&ex.triad, c, &p).unwrap()).0);
            }
        }
    }
    Outcome { pass: within(max, 1e-8), detail: format!("c ∈ {{−1,0,1}}, max {max:.2e} (tol 1e-8)") }
}

fn uniqueness_oracle() -> Outcome {
    let mut max = 0.0f64;
    for ex in catalog::catalog() {
        for p in points(&ex, 10) {
            let frame = MovingFrame::build_default(&ex.triad, &p).unwrap();
            for c in C_VALUES {
                max = max.max(frame::cross_check_gamma(&ex.triad, c, &frame, &p).unwrap());
            }
        }
    }
    Outcome { pass: within(max, 1e-7), detail: format!("Γ discrepancy max {max:.2e} (tol 1e-7)") }
}

fn explicit_formula() -> Outcome {
    let (mut formula, mut torsion) = (0.0f64, 0.0f64);
    for ex in catalog::catalog() {
        for p in points(&ex, 10) {
            let tmp = AffineConnection::triad_connection(&ex.triad, -1.0).local(&p).unwrap();
            let lc = AffineConnection::levi_civita(&ex.triad).on(std::sync::Arc::new(tmp.geometry().clone()));
            let geo = tmp.geometry();
            let zero = vec![Default::default(); ex.dim()];
            for k in 0..ex.dim() {
                for j in 0..ex.dim() {
                    let (x, y) = (linalg::basis(ex.dim(), k), linalg::basis(ex.dim(), j));
                    let expected = linalg::add(&lc.apply(&x, &y, &zero), &tensor_b1(geo, &x, &y));
                    let diff = linalg::values(&linalg::sub(&tmp.apply(&x, &y, &zero), &expected));
                    formula = formula.max(linalg::max_abs(&diff));
                }
            }
            let lemmas = ctx(&ex, &p).tmp1_lemmas();
            torsion = torsion.max(lemmas.iter().find(|r| r.name == "tmp1-torsion").unwrap().residual);
        }
    }
    Outcome {
        pass: within(formula, 1e-12) && within(torsion, 1e-7),
        detail: format!("∇^{{λ;−1}} − (∇^LC + B1) max {formula:.2e} (tol 1e-12); πT − ¼πN max {torsion:.2e} (tol 1e-7)"),
    }
}

fn family_residual(names: &[&str]) -> Vec<f64> {
    let mut out = vec![0.0f64; names.len()];
    for ex in catalog::catalog() {
        for p in points(&ex, 10) {
            let ctx = ctx(&ex, &p);
            for c in C_VALUES {
                for r in ctx.family_lemmas(c) {
                    if let Some(i) = names.iter().position(|n| *n == r.name) {
                        out[i] = out[i].max(r.residual);
                    }
                }
            }
        }
    }
    out
}

fn torsion_values() -> Outcome {
    let r = family_residual(&["torsion-lambda-part", "torsion-xi-part"]);
    Outcome {
        pass: within(r[0], 1e-8) && within(r[1], 1e-7),
        detail: format!("λ-part max {:.2e} (tol 1e-8), ξ-part max {:.2e} (tol 1e-7)", r[0], r[1]),
    }
}

fn reeb_derivative() -> Outcome {
    let r = family_residual(&["reeb-derivative-formula"])[0];
    Outcome { pass: within(r, 1e-7), detail: format!("max {r:.2e} (tol 1e-7)") }
}

fn cr_holomorphicity() -> Outcome {
    let (mut reeb, mut holomorphic) = (0.0f64, 0.0f64);
    for ex in catalog::catalog() {
        for p in points(&ex, 10) {
            let (a, b) = verify::check_cr_form(&ex.triad, 0.0, &p).unwrap();
            reeb = reeb.max(a.residual);
            holomorphic = holomorphic.max(b.residual);
        }
    }
    let ex = catalog::example("r3-perturbed-j").unwrap();
    let defect = points(&ex, 10)
        .iter()
        .map(|p| verify::check_cr_form(&ex.triad, 1.0, p).unwrap().1.residual)
        .fold(0.0, f64::max);
    Outcome {
        pass: within(reeb, 1e-8) && within(holomorphic, 1e-8) && defect > verify::CONTROL_THRESHOLD,
        detail: format!(
            "c=0: ∇_{{X_λ}}λ max {reeb:.2e}, ∇_Yλ + J∇_{{JY}}λ max {holomorphic:.2e} (tol 1e-8); c=1 defect {defect:.2e} (must be > 0)"
        ),
    }
}

fn scaling_law() -> Outcome {
    let mut max = 0.0f64;
    for id in ["r3-standard", "r3-perturbed-j"] {
        let ex = catalog::example(id).unwrap();
        for p in points(&ex, 10) {
            max = max.max(verify::check_scaling(&ex.triad, 2.0, &p).unwrap().residual);
        }
    }
    Outcome { pass: within(max, 1e-7), detail: format!("‖∇^{{2λ;1}} − ∇^{{λ;2}}‖ max {max:.2e} (tol 1e-7)") }
}

fn naturality() -> Outcome {
    let mut max = 0.0f64;
    let mut count = 0;
    for ex in catalog::catalog() {
        for p in points(&ex, 5) {
            for map in &ex.maps {
                for c in C_VALUES {
                    let r = verify::check_naturality(&ex.triad, map, c, &p).unwrap();
                    count += 1;
                    max = max.max(if r.error.is_some() { f64::INFINITY } else { r.residual });
                }
            }
        }
    }
    Outcome { pass: within(max, 1e-7), detail: format!("{count} pullbacks, max {max:.2e} (tol 1e-7)") }
}

fn lemma_suite() -> Outcome {
    let start = Instant::now();
    let mut failing = Vec::new();
    let mut max = (0.0f64, String::new());
    let mut names = std::collections::BTreeSet::new();
    for ex in catalog::catalog() {
        let count = if ex.id == "r3-standard" { 20 } else { 10 };
        for p in points(&ex, count) {
            let results = verify::check_lemma_suite(&ex.triad, &p).unwrap();
            for r in &results {
                names.insert(r.name.clone());
                if !r.pass {
                    failing.push(format!("{} {}", ex.id, r.name));
                }
            }
            let w = worst(&results);
            if w.0 > max.0 {
                max = w;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: failing.is_empty() && within(max.0, 1e-7) && elapsed < Duration::from_secs(60),
        detail: format!(
            "{} identities, max {:.2e} ({}) (tol 1e-7), {:.2}s (limit 60s){}",
            names.len(),
            max.0,
            max.1,
            elapsed.as_secs_f64(),
            if failing.is_empty() { String::new() } else { format!(", failing: {failing:?}") }
        ),
    }
}

fn discrimination() -> Outcome {
    let ex = catalog::example("r5-perturbed-j").unwrap();
    let (mut flip, mut flip_torsion, mut wrong_c, mut lc) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in points(&ex, 10) {
        let ctx = ctx(&ex, &p);
        let b1 = ctx.control_b1_sign_flip();
        flip = flip.max(b1.residual);
        let torsion = b1.note.as_deref().and_then(|n| n.split("tmp1-torsion ").nth(1)).and_then(|s| s.parse().ok());
        flip_torsion = flip_torsion.max(torsion.unwrap_or(0.0));
        wrong_c = wrong_c.max(ctx.control_wrong_c().residual);
        lc = lc.max(ctx.control_levi_civita().residual);
    }
    let t = 1e-3;
    Outcome {
        pass: flip >= t && wrong_c >= t && lc >= t,
        detail: format!(
            "r5-perturbed-j: B1 sign flip {flip:.2e} (torsion part {flip_torsion:.2e}), wrong c {wrong_c:.2e}, Levi-Civita {lc:.2e} (each must be ≥ 1e-3)"
        ),
    }
}

fn engine_cross_validation() -> Outcome {
    let mut max = 0.0f64;
    let fd = DiffEngine::central_difference(1e-4).unwrap();
    for ex in catalog::catalog() {
        let fd_triad = ex.triad.clone().with_engine(fd);
        for p in points(&ex, 10) {
            let mut connections = vec![
                (AffineConnection::levi_civita(&ex.triad), AffineConnection::levi_civita(&fd_triad)),
                (AffineConnection::tmp1(&ex.triad), AffineConnection::tmp1(&fd_triad)),
            ];
            for c in C_VALUES {
                connections.push((
                    AffineConnection::triad_connection(&ex.triad, c),
                    AffineConnection::triad_connection(&fd_triad, c),
                ));
            }
            for (ad, fd) in connections {
                let (a, b) = (ad.local(&p).unwrap(), fd.local(&p).unwrap());
                for k in 0..ex.dim() {
                    let x = linalg::basis(ex.dim(), k);
                    let diff: Mat<f64> = a.coefficient_matrix(&x).values().sub(&b.coefficient_matrix(&x).values());
                    max = max.max(diff.max_abs());
                }
            }
        }
    }
    Outcome { pass: within(max, 1e-6), detail: format!("AD vs FD (h = 1e-4) max {max:.2e} (tol 1e-6)") }
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        ("existence of the contact triad connection", existence),
        ("generalized family (5;c)", generalized_family),
        ("uniqueness oracle", uniqueness_oracle),
        ("explicit formula consistency", explicit_formula),
        ("torsion values", torsion_values),
        ("Reeb covariant derivative", reeb_derivative),
        ("CR-holomorphicity", cr_holomorphicity),
        ("scaling law", scaling_law),
        ("naturality", naturality),
        ("Levi-Civita and tmp1 identity suite", lemma_suite),
        ("suite discrimination", discrimination),
        ("engine cross-validation", engine_cross_validation),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {:>2} {name}: {}", i + 1, outcome.detail);
        if !outcome.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
