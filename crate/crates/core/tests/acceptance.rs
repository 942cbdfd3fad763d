//! Acceptance suite: one pass/fail line per criterion at the pinned tolerances.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{curvature_error, derivative_error, nijenhuis_error, EXPRESSIONS};
use norden::catalog::{self, RANDOM_DEGREE};
use norden::checkers::anti_kahler_residuals_at;
use norden::conjugation::verify_klein_group;
use norden::curvature::verify_theorem2;
use norden::expr::default_coordinate_names;
use norden::operators::{nijenhuis_bracket, verify_cubic_duality, verify_gc4};
use norden::report::{to_json, worst};
use norden::sampling::derive_seed;
use norden::suite::{verify_one, verify_paper};
use norden::{parse_expr, ConnectionField, Result, Structure, Tolerance, Verdict};

const POINTS: usize = 50;
const SEED: u64 = 42;
const ALL: [&str; 5] = ["flat2", "flat4", "holomorphic", "noncr", "nonintegrableJ"];
const THEOREM_STRUCTURES: [&str; 3] = ["flat2", "flat4", "holomorphic"];

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

/// Runs `check` on `count` seeded random connections per structure; returns
/// (all passed, worst residual, runs).
fn random_sweep(
    names: &[&str],
    count: u64,
    check: impl Fn(&Structure, &ConnectionField, &norden::SampleSet) -> Result<norden::CheckReport>,
) -> Result<(bool, f64, usize)> {
    let (mut ok, mut w, mut runs) = (true, 0.0f64, 0);
    for (si, name) in names.iter().enumerate() {
        let s = catalog::by_name(name)?;
        for n in 0..count {
            let seed = derive_seed(derive_seed(SEED, si as u64), n);
            let c = catalog::random_connection(s.dim(), seed, RANDOM_DEGREE)?;
            let samples = s.sample(POINTS, derive_seed(seed, 1))?;
            let r = check(&s, &c, &samples)?;
            ok &= r.verdict == Verdict::Pass;
            w = worst(w, r.max_residual);
            runs += 1;
        }
    }
    Ok((ok, w, runs))
}

fn klein_group() -> Result<Outcome> {
    let (ok, w, runs) = random_sweep(&THEOREM_STRUCTURES, 100, |s, c, p| verify_klein_group(s, c, p, 1e-8))?;
    outcome(ok, format!("{runs} connections, worst identity residual {w:.2e} (tol 1e-8)"))
}

fn curvature_relation() -> Result<Outcome> {
    let (ok, w, runs) = random_sweep(&THEOREM_STRUCTURES, 100, |s, c, p| verify_theorem2(s, c, p, 1e-7))?;
    outcome(ok, format!("{runs} connections, worst residual {w:.2e} (tol 1e-7)"))
}

fn anti_kahler() -> Result<Outcome> {
    let holo = catalog::by_name("holomorphic")?;
    let (mut nj, mut phi) = (0.0f64, 0.0f64);
    for p in holo.sample(POINTS, SEED)?.iter() {
        let (a, b) = anti_kahler_residuals_at(&holo.context_at(p)?);
        nj = worst(nj, a);
        phi = worst(phi, b);
    }
    let noncr = catalog::by_name("noncr")?;
    let (na, nb) = anti_kahler_residuals_at(&noncr.context_at(&[1.0, 0.5])?);
    let mut agree = true;
    for name in ALL {
        let s = catalog::by_name(name)?;
        for p in s.sample(POINTS, SEED)?.iter() {
            let (a, b) = anti_kahler_residuals_at(&s.context_at(p)?);
            agree &= (a <= 1e-9) == (b <= 1e-9);
        }
    }
    let pass = nj <= 1e-9 && phi <= 1e-9 && na >= 0.05 && nb >= 0.05 && agree;
    outcome(
        pass,
        format!(
            "holomorphic |nabla J| {nj:.2e}, |Phi_J g| {phi:.2e}; noncr at (1, 0.5) {na:.3}, {nb:.3}; criteria agree on all structures: {agree}"
        ),
    )
}

fn cubic_duality() -> Result<Outcome> {
    let (ok, w, runs) = random_sweep(&ALL, 20, |s, c, p| verify_cubic_duality(s, c, p, 1e-9))?;
    outcome(ok, format!("{runs} connections, worst residual {w:.2e} (tol 1e-9)"))
}

fn propositions() -> Result<Outcome> {
    let ids = [
        "prop31",
        "prop32",
        "corollary_torsions",
        "prop_dagger_J",
        "prop_pr3",
        "antikahler_iff",
        "prop_pr4_pr5",
        "statistical",
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for id in ids {
        let r = verify_one(id, SEED, POINTS, Tolerance::default())?;
        pass &= r.passed();
        parts.push(format!("{id} {}", r.verdict.as_str()));
    }
    outcome(pass, parts.join(", "))
}

fn gc4() -> Result<Outcome> {
    let mut ok = true;
    let mut w = 0.0f64;
    for name in ALL {
        let s = catalog::by_name(name)?;
        let r = verify_gc4(&s, &s.sample(POINTS, SEED)?, 1e-8)?;
        ok &= r.passed();
        w = worst(w, r.max_residual);
    }
    let s = catalog::nonintegrable_j_example()?;
    let mut n = 0.0f64;
    for p in s.sample(POINTS, SEED)?.iter() {
        n = n.max(nijenhuis_bracket(s.j(), p)?.max_abs());
    }
    outcome(ok && n > 0.05, format!("worst residual {w:.2e} (tol 1e-8); max |N_J| on nonintegrableJ {n:.3}"))
}

fn oracles() -> Result<Outcome> {
    let names = default_coordinate_names(3);
    let mut d = 0.0f64;
    for text in EXPRESSIONS {
        let e = parse_expr(text, &names)?;
        for p in [[0.3, -0.7, 0.2], [-0.9, 0.1, 0.8], [0.5, 0.5, -0.5]] {
            d = worst(d, derivative_error(&e, &p));
        }
    }
    let mut c = 0.0f64;
    let mut n = 0.0f64;
    for name in ALL {
        let s = catalog::by_name(name)?;
        let conns = [
            ConnectionField::levi_civita(s.g()),
            catalog::random_connection(s.dim(), SEED, RANDOM_DEGREE)?,
        ];
        for p in s.sample(5, SEED)?.iter() {
            for conn in &conns {
                c = worst(c, curvature_error(conn, p));
            }
            n = worst(n, nijenhuis_error(&s, p).0);
        }
    }
    outcome(
        d <= 1e-4 && c <= 1e-4 && n <= 1e-3,
        format!("derivatives rel {d:.2e} (1e-4), curvature rel {c:.2e} (1e-4), Nijenhuis abs {n:.2e} (1e-3)"),
    )
}

fn determinism() -> Result<Outcome> {
    let a = to_json(&verify_paper(SEED, POINTS, Tolerance::default())?);
    let b = to_json(&verify_paper(SEED, POINTS, Tolerance::default())?);
    outcome(a == b, format!("two verify-paper runs, {} bytes each, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("klein group", klein_group),
        ("curvature relation", curvature_relation),
        ("anti-Kahler equivalence", anti_kahler),
        ("cubic-form duality", cubic_duality),
        ("proposition suite", propositions),
        ("Tachibana of the twin metric", gc4),
        ("oracle cross-checks", oracles),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} ({name}): {} [{:.1}s] {detail}",
            n + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
