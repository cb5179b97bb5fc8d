//! Acceptance runner: one line per criterion, nonzero exit if any fails.
//! Built without the libtest harness; `cargo test` runs `main`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{bimatrix_disagreements, compose_random, kuhn_error};
use gamebush::fixtures;
use gamebush::model::GameBundle;
use gamebush::solver::{
    commitment_optimum, lambda, lambda_exact, solve_bundle_perfect, solve_myopic, sweep,
    SolverConfig,
};
use gamebush::spanning::generate::{
    graph, random_gapped, random_glue_instance, random_spanning, random_spanning_into,
};
use gamebush::spanning::{
    compose_correspondences, glue, has_spanning, product, restrict_correspondence,
    scale_correspondence, sum_correspondences, verify_witness, SimplicialCorrespondence,
    TriangulatedPair,
};
use gamebush::strategies::MixedProfile;
use gamebush::subgame::{
    enumerate_subgame_sets, is_s_perfect, is_subgame_set, relevant_subgame_sets, DEFAULT_FAMILY_CAP,
};
use gamebush::testing::{random_bush, BushShape};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn committed_payoff(s: f64, p: f64) -> f64 {
    (1.0 + s) * (1.0 - p) * p * p + (1.0 - p) * (1.0 - p) * p
}

fn closed_form_point(s: f64) -> f64 {
    (s - 1.0 + (1.0 + s + s * s).sqrt()) / (3.0 * s)
}

fn ex1_closed_forms() -> Check {
    let mut worst: f64 = 0.0;
    for s in [0.01, 0.1, 0.5] {
        let opt =
            commitment_optimum(&fixtures::ex1_factor(s), &[1.0]).map_err(|e| e.to_string())?;
        let p = closed_form_point(s);
        let dp = (opt.sigma[0] - p).abs();
        let dv = (opt.value - committed_payoff(s, p)).abs();
        ensure(dp <= 1e-6 && dv <= 1e-6, || {
            format!("s = {s}: p* off by {dp:e}, f(p*) off by {dv:e}")
        })?;
        worst = worst.max(dp).max(dv);
    }
    Ok(format!("worst deviation {worst:.1e}"))
}

fn ex1_equilibria() -> Check {
    let config = SolverConfig::default();
    let full = solve_myopic(&fixtures::ex1(0.1), &[1.0], &config).map_err(|e| e.to_string())?;
    ensure(!full.equilibria.is_empty(), || {
        "no equilibria of the full bundle".into()
    })?;
    for e in &full.equilibria {
        let x = e.sigma.weights[0][0];
        let three_l = e.sigma.weights[2][0];
        let family =
            (x - 1.0).abs() < 1e-6 && three_l < 1e-6 || x < 1e-6 && (three_l - 1.0).abs() < 1e-6;
        ensure(
            e.certificate.valid && e.payoffs[0].abs() <= 1e-6 && family,
            || {
                format!(
                    "unexpected equilibrium {:?} with payoffs {:?}",
                    e.sigma, e.payoffs
                )
            },
        )?;
    }
    let (sub, _) = fixtures::ex1_subgame(0.1);
    let table = sweep(&sub, &SolverConfig { mesh: 16, ..config }).map_err(|e| e.to_string())?;
    let mut interior = 0;
    for point in &table.points {
        let p = point.q[0];
        if p <= 0.0 || p >= 1.0 {
            continue;
        }
        interior += 1;
        let target = 1.0 - p;
        let hit = point.equilibria.iter().any(|e| {
            e.residual <= 1e-9
                && (e.sigma.weights[1][0] - target).abs() <= 1e-9
                && (e.sigma.weights[2][0] - target).abs() <= 1e-9
        });
        ensure(hit, || format!("no certified β = α = 1 − p at p = {p}"))?;
    }
    Ok(format!(
        "{} full-bundle equilibria, {interior} interior grid points",
        full.equilibria.len()
    ))
}

fn myopic_vs_commitment() -> Check {
    let s = 0.1;
    let report = solve_myopic(&fixtures::ex1_factor(s), &[1.0], &SolverConfig::default())
        .map_err(|e| e.to_string())?;
    let mut ps: Vec<f64> = report
        .equilibria
        .iter()
        .map(|e| e.sigma.weights[0][0])
        .collect();
    ps.sort_by(f64::total_cmp);
    ensure(
        ps.len() == 2 && ps[0].abs() <= 1e-9 && (ps[1] - 1.0).abs() <= 1e-9,
        || format!("m-equilibria at p = {ps:?}"),
    )?;
    let best = committed_payoff(s, closed_form_point(s));
    for e in &report.equilibria {
        ensure(e.payoffs[0].abs() <= 1e-9 && e.payoffs[0] < best, || {
            format!("payoff {} against commitment {best}", e.payoffs[0])
        })?;
    }
    Ok(format!("p ∈ {{0, 1}} with payoff 0 < f(p*) = {best:.6}"))
}

fn pure_label(b: &GameBundle, sigma: &MixedProfile) -> Option<String> {
    let bush = b.bush();
    let form = bush.form().unwrap();
    let mut parts = Vec::new();
    for (n, w) in sigma.weights.iter().enumerate() {
        let i = w.iter().position(|&x| x > 1.0 - 1e-9)?;
        parts.push(form.spaces[n].label(bush, i));
    }
    Some(parts.join(" "))
}

fn ex2_filter() -> Check {
    let b = fixtures::ex2();
    let config = SolverConfig::default();
    let raw = solve_myopic(&b, &[1.0], &config).map_err(|e| e.to_string())?;
    let raw: Vec<String> = raw
        .equilibria
        .iter()
        .filter_map(|e| pure_label(&b, &e.sigma))
        .collect();
    for want in ["W1:A W2:p", "W1:P W2:a"] {
        ensure(raw.iter().any(|l| l == want), || {
            format!("raw equilibria {raw:?} miss {want}")
        })?;
    }
    let report = solve_bundle_perfect(&b, &config).map_err(|e| e.to_string())?;
    let kept: Vec<String> = report.points[0]
        .equilibria
        .iter()
        .map(|e| pure_label(&b, &e.equilibrium.sigma).unwrap_or_else(|| "mixed".into()))
        .collect();
    ensure(kept == ["W1:A W2:p"], || format!("filter kept {kept:?}"))?;
    Ok("raw (A,p) and (P,a); filter keeps (A,p)".into())
}

fn ex3_perfect() -> Check {
    let b = fixtures::ex3();
    let config = SolverConfig::default();
    let raw = solve_myopic(&b, &[1.0], &config).map_err(|e| e.to_string())?;
    let sets = relevant_subgame_sets(b.bush(), DEFAULT_FAMILY_CAP).map_err(|e| e.to_string())?;
    ensure(sets.len() == 1 && sets[0].roots.len() == 2, || {
        format!("expected the {{X,Y}} bundle alone, got {} sets", sets.len())
    })?;
    let pure: Vec<String> = raw
        .equilibria
        .iter()
        .filter_map(|e| pure_label(&b, &e.sigma))
        .collect();
    ensure(pure.len() >= 2, || format!("pure equilibria {pure:?}"))?;
    for e in &raw.equilibria {
        let report = is_s_perfect(&b, &sets[0], &e.plan, config.tol, config.mesh)
            .map_err(|e| e.to_string())?;
        ensure(e.certificate.valid && report.verdict.is_true(), || {
            format!("{:?} not certified perfect: {:?}", e.sigma, report.verdict)
        })?;
    }
    Ok(format!(
        "{} equilibria ({}) all perfect",
        raw.equilibria.len(),
        pure.join(", ")
    ))
}

fn lambda_formula() -> Check {
    for eps in [1e-3, 0.05, 0.25] {
        ensure(
            lambda(2.0 * eps, eps) == 1.0 && lambda(eps, eps) == 0.0,
            || format!("breakpoint values at ε = {eps}"),
        )?;
        ensure((lambda(1.5 * eps, eps) - 0.5).abs() <= 1e-12, || {
            format!("midpoint at ε = {eps}")
        })?;
        for bp in [eps, 2.0 * eps] {
            let h = 1e-13 * eps;
            let jump = (lambda(bp - h, eps) - lambda(bp + h, eps)).abs();
            ensure(jump <= 1e-12, || {
                format!("jump {jump:e} at {bp} for ε = {eps}")
            })?;
        }
    }
    let e = Ratio::new(1, 10);
    ensure(
        lambda_exact(Ratio::new(2, 10), e) == Ratio::from_integer(1)
            && lambda_exact(e, e) == Ratio::from_integer(0)
            && lambda_exact(Ratio::new(15, 100), e) == Ratio::new(1, 2),
        || "exact rational values".into(),
    )?;
    Ok("1, 0, 1/2 exactly; continuous to 1e-12".into())
}

fn spans(f: &SimplicialCorrespondence, pair: &TriangulatedPair) -> bool {
    let v = has_spanning(f, pair).expect("well-formed instance");
    if let Some(w) = &v.witness {
        assert!(verify_witness(f, pair, w), "witness fails its own check");
    }
    v.spans
}

fn spanning_ground_truths() -> Check {
    let pair = TriangulatedPair::interval(1);
    let identity = graph(&pair, |v| pair.coords()[v].clone());
    ensure(spans(&identity, &pair), || {
        "identity graph does not span".into()
    })?;
    let pair = TriangulatedPair::interval(3);
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let gapped = random_gapped(&mut r, &pair, 1, 1, 2);
    ensure(
        !gapped.fiber(pair.interior_vertices()[0]).is_empty(),
        || "gap placement".into(),
    )?;
    ensure(!spans(&gapped, &pair), || {
        "gapped correspondence spans".into()
    })?;
    Ok("identity spans; gap over (1/3, 2/3) does not".into())
}

const SUITE: u64 = 25;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counterexamples per preservation suite, each over `SUITE` instances.
fn preservation_suites() -> Check {
    let mut failures: Vec<(&str, u64)> = Vec::new();

    // spanning implies non-empty fibers over the interior
    let mut r = rng(100);
    let (mut bad, mut seen) = (0, 0);
    while seen < SUITE {
        let pair = TriangulatedPair::interval(r.gen_range(2..10));
        let f = random_spanning(&mut r, &pair, 1, 3);
        if spans(&f, &pair) {
            seen += 1;
            let covered = f.uncovered(&pair).is_empty()
                && pair
                    .interior_vertices()
                    .iter()
                    .all(|&w| !f.fiber(w).is_empty());
            bad += u64::from(!covered);
        }
    }
    failures.push(("non-empty fibers", bad));

    let mut r = rng(200);
    let mut bad = 0;
    for _ in 0..SUITE {
        let n = r.gen_range(2..12);
        let pair = TriangulatedPair::interval(n);
        let f = random_spanning(&mut r, &pair, 2, 4);
        let a = r.gen_range(0..n);
        let b = r.gen_range(a + 1..=n);
        let region: Vec<Vec<usize>> = (a..b).map(|i| vec![i, i + 1]).collect();
        let (sub, g) = restrict_correspondence(&f, &pair, &region).map_err(|e| e.to_string())?;
        bad += u64::from(spans(&f, &pair) && !spans(&g, &sub));
    }
    failures.push(("restriction", bad));

    let mut r = rng(300);
    let mut bad = 0;
    for _ in 0..SUITE {
        let n = r.gen_range(2..12);
        let i = r.gen_range(0..n);
        let j = r.gen_range(i.max(1)..=n);
        let (w, f, w2, f2) = random_glue_instance(&mut r, n, i, j, 2);
        let (union, glued) = glue(&w, &f, &w2, &f2).map_err(|e| e.to_string())?;
        bad += u64::from(spans(&f, &w) && !spans(&glued, &union));
    }
    failures.push(("gluing", bad));

    let mut r = rng(400);
    let mut bad = 0;
    for _ in 0..SUITE {
        let pair = TriangulatedPair::interval(r.gen_range(1..8));
        let fs: Vec<_> = (0..r.gen_range(2..4))
            .map(|_| random_spanning(&mut r, &pair, 2, 2))
            .collect();
        let s = sum_correspondences(&pair, &fs).map_err(|e| e.to_string())?;
        bad += u64::from(!spans(&s, &pair));
    }
    failures.push(("sums", bad));

    let mut r = rng(500);
    let mut bad = 0;
    for _ in 0..SUITE {
        let pair = TriangulatedPair::interval(r.gen_range(1..8));
        let a = random_spanning(&mut r, &pair, 1, 2);
        let b = random_spanning(&mut r, &pair, 2, 2);
        let p = product(&pair, &a, &b).map_err(|e| e.to_string())?;
        bad += u64::from(!spans(&p, &pair));
    }
    failures.push(("products", bad));

    let mut r = rng(600);
    let mut bad = 0;
    for _ in 0..SUITE {
        let w = TriangulatedPair::interval(r.gen_range(1..7));
        let x = TriangulatedPair::interval(r.gen_range(1..6));
        let phi = random_spanning_into(&mut r, &w, &x);
        let psi = random_spanning(&mut r, &x, 1, 2);
        let c = compose_correspondences(&w, &phi, &x, &psi).map_err(|e| e.to_string())?;
        bad += u64::from(spans(&phi, &w) && spans(&psi, &x) && !spans(&c, &w));
    }
    failures.push(("compositions", bad));

    let mut r = rng(700);
    let mut bad = 0;
    for _ in 0..SUITE {
        let w = TriangulatedPair::interval(r.gen_range(1..7));
        let x = TriangulatedPair::interval(r.gen_range(1..6));
        let phi = random_spanning_into(&mut r, &w, &x);
        let psi = random_spanning(&mut r, &x, 1, 2);
        let c = compose_correspondences(&w, &phi, &x, &psi).map_err(|e| e.to_string())?;
        let lambda: Vec<f64> = (0..w.coords().len())
            .map(|_| r.gen_range(-2.0..2.0))
            .collect();
        let scaled = scale_correspondence(&w, &lambda, &c).map_err(|e| e.to_string())?;
        bad += u64::from(!spans(&scaled, &w));
    }
    failures.push(("scaled compositions", bad));

    let summary: Vec<String> = failures.iter().map(|(n, b)| format!("{n} {b}")).collect();
    let total: u64 = failures.iter().map(|(_, b)| b).sum();
    ensure(total == 0, || {
        format!("counterexamples: {}", summary.join(", "))
    })?;
    Ok(format!(
        "{} suites × {SUITE} instances, no counterexamples",
        failures.len()
    ))
}

fn oracle_equivalence() -> Check {
    let bad = bimatrix_disagreements(50, 2024);
    ensure(bad == 0, || format!("{bad} of 50 games disagree"))?;
    Ok("50 games agree within 1e-6".into())
}

fn lattice_and_composition() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let loose = BushShape {
        perfect_recall: false,
        ..BushShape::default()
    };
    let mut bushes: Vec<GameBundle> = vec![fixtures::ex1(0.1), fixtures::ex2(), fixtures::ex3()];
    for i in 0..40 {
        let shape = if i % 2 == 0 {
            BushShape::default()
        } else {
            loose.clone()
        };
        bushes.push(random_bush(&mut r, &shape));
    }
    for (i, b) in bushes.iter().enumerate() {
        let bush = b.bush();
        ensure(i < 3 || bush.num_vertices() <= 14, || {
            format!("bush {i} too large")
        })?;
        let mut brute = common::brute_subgame_family(bush);
        brute.sort_unstable();
        let lattice =
            enumerate_subgame_sets(bush, DEFAULT_FAMILY_CAP).map_err(|e| e.to_string())?;
        let mut listed: Vec<u64> = lattice
            .sets
            .iter()
            .map(|s| common::mask_of(&s.vertices))
            .collect();
        listed.sort_unstable();
        ensure(listed == brute, || {
            format!("bush {i}: lattice differs from brute force")
        })?;
        for &a in &brute {
            for &c in &brute {
                ensure(
                    brute.binary_search(&(a | c)).is_ok() && brute.binary_search(&(a & c)).is_ok(),
                    || format!("bush {i}: family not closed"),
                )?;
            }
        }
        for s in &lattice.sets {
            ensure(is_subgame_set(bush, &s.vertices).ok, || {
                format!("bush {i}: listed set fails")
            })?;
        }
    }
    let config = SolverConfig::default();
    let mut fixture_sets = 0;
    for b in [fixtures::ex1(0.1), fixtures::ex2(), fixtures::ex3()] {
        for s in relevant_subgame_sets(b.bush(), DEFAULT_FAMILY_CAP).map_err(|e| e.to_string())? {
            fixture_sets += 1;
            match common::compose_at_fixed_point(&b, &s, &[1.0], &config, 8, true) {
                common::ComposeOutcome::Composed(res) => {
                    let worst = res.into_iter().fold(0.0, f64::max);
                    ensure(worst <= 2.0 * config.tol, || {
                        format!("fixture residual {worst:e}")
                    })?;
                }
                common::ComposeOutcome::NoFixedPoint => {
                    return Err("fixture did not compose".into())
                }
            }
        }
    }
    let (done, tried, worst) = compose_random(50, 17);
    ensure(done == 50 && worst <= 2.0 * config.tol, || {
        format!("{done} of {tried} random bushes composed, worst residual {worst:e}")
    })?;
    Ok(format!(
        "{} bushes match brute force; {fixture_sets} fixture sets and 50 random bushes compose, worst {worst:.1e}",
        bushes.len()
    ))
}

fn kuhn_round_trip() -> Check {
    let fixtures = [
        ("ex1", fixtures::ex1(0.1)),
        ("ex1-factor", fixtures::ex1_factor(0.1)),
        ("ex1-subgame", fixtures::ex1_subgame(0.1).0),
        ("ex2", fixtures::ex2()),
        ("ex3", fixtures::ex3()),
    ];
    let mut worst: f64 = 0.0;
    for (name, b) in &fixtures {
        let err = kuhn_error(b, 100, 7);
        ensure(err <= 1e-10, || format!("{name}: {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("worst round-trip error {worst:.1e}"))
}

fn main() -> ExitCode {
    let second = Some(Duration::from_secs(1));
    let criteria = [
        Criterion {
            id: 1,
            name: "commitment closed forms",
            limit: second,
            run: ex1_closed_forms,
        },
        Criterion {
            id: 2,
            name: "three-player equilibria and indifference sweep",
            limit: Some(Duration::from_secs(10)),
            run: ex1_equilibria,
        },
        Criterion {
            id: 3,
            name: "myopic versus commitment",
            limit: None,
            run: myopic_vs_commitment,
        },
        Criterion {
            id: 4,
            name: "credible-threat filter",
            limit: second,
            run: ex2_filter,
        },
        Criterion {
            id: 5,
            name: "shared-information perfectness",
            limit: second,
            run: ex3_perfect,
        },
        Criterion {
            id: 6,
            name: "regularization weight",
            limit: None,
            run: lambda_formula,
        },
        Criterion {
            id: 7,
            name: "spanning ground truths",
            limit: second,
            run: spanning_ground_truths,
        },
        Criterion {
            id: 8,
            name: "spanning preservation suites",
            limit: Some(Duration::from_secs(60)),
            run: preservation_suites,
        },
        Criterion {
            id: 9,
            name: "bimatrix oracle equivalence",
            limit: None,
            run: oracle_equivalence,
        },
        Criterion {
            id: 10,
            name: "subgame lattice and composition",
            limit: None,
            run: lattice_and_composition,
        },
        Criterion {
            id: 11,
            name: "behaviour round trip",
            limit: None,
            run: kuhn_round_trip,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = started.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {} ({elapsed:.2?}): {detail}", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {} ({elapsed:.2?}): {detail}", c.id, c.name);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
