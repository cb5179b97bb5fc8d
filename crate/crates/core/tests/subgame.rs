mod common;

use common::{
    brute_subgame_family, compose_at_fixed_point, compose_random, is_subgame_by_definition,
    mask_of, ComposeOutcome,
};
use gamebush::fixtures;
use gamebush::model::GameBundle;
use gamebush::solver::{solve_bundle_perfect, solve_myopic, Route, SolverConfig};
use gamebush::strategies::{make_plan, MixedProfile, Selector};
use gamebush::subgame::{
    closure, enumerate_subgame_sets, is_s_perfect, is_solvable, is_subgame_set,
    relevant_subgame_sets, SubgameSet, DEFAULT_FAMILY_CAP,
};
use gamebush::testing::{random_bush, BushShape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_bundles(count: usize, seed: u64, shape: &BushShape) -> Vec<GameBundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_bush(&mut rng, shape)).collect()
}

/// The lattice agrees with the brute-force family, and that family is
/// closed under union and intersection.
fn lattice_matches_brute_force(bundle: &GameBundle) {
    let bush = bundle.bush();
    let brute = brute_subgame_family(bush);
    let lattice = enumerate_subgame_sets(bush, DEFAULT_FAMILY_CAP).unwrap();
    let mut listed: Vec<u64> = lattice.sets.iter().map(|s| mask_of(&s.vertices)).collect();
    listed.sort_unstable();
    assert_eq!(listed, brute);
    for &a in &brute {
        for &b in &brute {
            assert!(brute.binary_search(&(a | b)).is_ok());
            assert!(brute.binary_search(&(a & b)).is_ok());
        }
    }
    for s in &lattice.sets {
        assert!(is_subgame_set(bush, &s.vertices).ok);
    }
}

#[test]
fn subgame_family_is_a_lattice_on_fixtures() {
    for b in [
        fixtures::ex1(0.1),
        fixtures::ex2(),
        fixtures::ex3(),
        fixtures::ex1_factor(0.1),
    ] {
        lattice_matches_brute_force(&b);
    }
}

#[test]
fn subgame_family_is_a_lattice_on_random_bushes() {
    let recall = BushShape::default();
    let loose = BushShape {
        perfect_recall: false,
        ..BushShape::default()
    };
    for b in random_bundles(30, 1, &recall)
        .iter()
        .chain(&random_bundles(30, 2, &loose))
    {
        assert!(b.bush().num_vertices() <= 14);
        lattice_matches_brute_force(b);
    }
}

#[test]
fn closure_is_the_smallest_superset() {
    for (i, b) in random_bundles(20, 3, &BushShape::default())
        .iter()
        .enumerate()
    {
        let bush = b.bush();
        let brute = brute_subgame_family(bush);
        for v in bush.vertices() {
            let c = mask_of(&closure(bush, &[v]));
            let smallest = brute
                .iter()
                .copied()
                .filter(|m| m >> v.0 & 1 == 1)
                .min_by_key(|m| m.count_ones())
                .unwrap();
            assert_eq!(c, smallest, "bush {i}, vertex {}", bush.name(v));
            assert!(brute
                .iter()
                .filter(|m| *m >> v.0 & 1 == 1)
                .all(|m| m & c == c));
        }
    }
}

#[test]
fn checker_reports_each_violation() {
    let b = fixtures::ex3();
    let bush = b.bush();
    // X alone splits Two's information set and cuts the arrows below it
    let check = is_subgame_set(bush, &[bush.v("X")]);
    assert!(!check.ok);
    assert!(check.violations.iter().any(|v| v.contains("arrow")));
    assert!(check
        .violations
        .iter()
        .any(|v| v.contains("information set")));
    // the post-move region is one
    let post: Vec<_> = bush.vertices().filter(|&v| bush.name(v) != "r").collect();
    assert!(is_subgame_set(bush, &post).ok);
    assert!(is_subgame_by_definition(bush, mask_of(&post)));
}

#[test]
fn ex2_subgame_after_a() {
    let b = fixtures::ex2();
    let bush = b.bush();
    let relevant = relevant_subgame_sets(bush, DEFAULT_FAMILY_CAP).unwrap();
    let names: Vec<Vec<String>> = relevant.iter().map(|s| s.names(bush)).collect();
    assert!(
        names.contains(&vec!["Y".to_string(), "Ya".into(), "Yp".into()]),
        "{names:?}"
    );
}

#[test]
fn ex3_post_move_region_is_the_only_relevant_set() {
    let b = fixtures::ex3();
    let bush = b.bush();
    let relevant = relevant_subgame_sets(bush, DEFAULT_FAMILY_CAP).unwrap();
    assert_eq!(relevant.len(), 1);
    assert_eq!(relevant[0].roots.len(), 2);
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

#[test]
fn ex2_filter_keeps_the_credible_equilibrium() {
    let b = fixtures::ex2();
    let raw = solve_myopic(&b, &[1.0], &SolverConfig::default()).unwrap();
    let mut raw_labels: Vec<String> = raw
        .equilibria
        .iter()
        .filter_map(|e| pure_label(&b, &e.sigma))
        .collect();
    raw_labels.sort();
    assert!(raw_labels.contains(&"W1:A W2:p".to_string()));
    assert!(raw_labels.contains(&"W1:P W2:a".to_string()));
    let report = solve_bundle_perfect(&b, &SolverConfig::default()).unwrap();
    let point = &report.points[0];
    let kept: Vec<String> = point
        .equilibria
        .iter()
        .map(|e| pure_label(&b, &e.equilibrium.sigma).unwrap_or_default())
        .collect();
    assert_eq!(kept, vec!["W1:A W2:p".to_string()]);
    assert!(point
        .rejected
        .iter()
        .any(|e| pure_label(&b, &e.equilibrium.sigma).as_deref() == Some("W1:P W2:a")));
}

#[test]
fn ex3_equilibria_are_all_perfect() {
    let b = fixtures::ex3();
    let config = SolverConfig::default();
    let raw = solve_myopic(&b, &[1.0], &config).unwrap();
    assert!(!raw.equilibria.is_empty());
    let s = relevant_subgame_sets(b.bush(), DEFAULT_FAMILY_CAP)
        .unwrap()
        .remove(0);
    for e in &raw.equilibria {
        let verdict = is_s_perfect(&b, &s, &e.plan, config.tol, config.mesh).unwrap();
        assert!(verdict.verdict.is_true(), "{:?}", e.sigma);
    }
    let report = solve_bundle_perfect(&b, &config).unwrap();
    let point = &report.points[0];
    assert!(point.rejected.is_empty());
    let kept = point.equilibria.len();
    assert!(kept >= raw.equilibria.len());
    assert!(point
        .equilibria
        .iter()
        .any(|e| matches!(e.route, Route::Filtered | Route::Both)));
}

#[test]
fn ex2_commitment_to_p_fails_perfectness() {
    let b = fixtures::ex2();
    let form = b.bush().form().unwrap();
    let sigma = MixedProfile::pure(form, &[1, 0]);
    let plan = make_plan(&b, &[1.0], &sigma, &Selector::First).unwrap();
    let s = SubgameSet::new(
        b.bush(),
        &[b.bush().v("Y"), b.bush().v("Ya"), b.bush().v("Yp")],
    )
    .unwrap();
    let report = is_s_perfect(&b, &s, &plan, 1e-9, 16).unwrap();
    assert!(!report.verdict.is_true());
}

#[test]
fn solvable_chains_exist_for_the_fixtures() {
    for b in [fixtures::ex1(0.1), fixtures::ex2(), fixtures::ex3()] {
        let chain = is_solvable(b.bush()).unwrap();
        assert!(chain.is_some());
    }
}

fn compose_fixtures() -> Vec<(&'static str, GameBundle)> {
    vec![
        ("ex1", fixtures::ex1(0.1)),
        ("ex2", fixtures::ex2()),
        ("ex3", fixtures::ex3()),
    ]
}

#[test]
fn composition_reverifies_on_fixtures() {
    let config = SolverConfig::default();
    for (name, b) in compose_fixtures() {
        let sets = relevant_subgame_sets(b.bush(), DEFAULT_FAMILY_CAP).unwrap();
        assert!(!sets.is_empty(), "{name}");
        for s in &sets {
            match compose_at_fixed_point(&b, s, &[1.0], &config, 8, true) {
                ComposeOutcome::Composed(res) => {
                    for r in res {
                        assert!(r <= 2.0 * config.tol, "{name}: residual {r:e}");
                    }
                }
                ComposeOutcome::NoFixedPoint => panic!("{name}: no consistent parts"),
            }
        }
    }
}

#[test]
fn composition_reverifies_on_random_recall_bushes() {
    let (done, tried, worst) = compose_random(50, 17);
    assert_eq!(done, 50, "only {done} of {tried} bushes composed");
    assert!(worst <= 2e-9, "worst residual {worst:e}");
}
