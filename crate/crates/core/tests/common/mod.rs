//! Independent oracles shared by the integration suites and the acceptance
//! runner.
#![allow(dead_code)]

use gamebush::model::{GameBundle, GameBush, Owner, PayoffKind, VertexId};
use gamebush::solver::{barycentric_grid, solve_myopic, verify_myopic, SolverConfig};
use gamebush::strategies::{
    behaviour_to_mixed, make_plan, mixed_to_behaviour, terminal_reach, BehaviourProfile, Selector,
};
use gamebush::subgame::{
    compose, factor, factor_classes, has_perfect_recall, is_s_perfect, relevant_subgame_sets,
    restrict, root_values, SubgameSet, DEFAULT_FAMILY_CAP,
};
use gamebush::testing::{bimatrix, random_bimatrix, random_bush, random_profile, BushShape};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Terminal probabilities from walking each root-to-terminal path and
/// multiplying chance and behaviour probabilities along the way.
pub fn walk_reach(bush: &GameBush, q: &[f64], b: &BehaviourProfile) -> Vec<f64> {
    bush.terminals()
        .iter()
        .map(|&t| {
            let path = bush.path_to(t);
            let root = bush.root_position(path[0]).expect("path starts at a root");
            let mut p = q[root];
            for pair in path.windows(2) {
                let (u, w) = (pair[0], pair[1]);
                p *= match bush.owner(u).expect("vertex") {
                    Owner::Nature(k) => bush.nature_nodes()[k]
                        .outcomes
                        .iter()
                        .find(|(v, _)| *v == w)
                        .map(|(_, pr)| pr.value())
                        .expect("outcome"),
                    Owner::Player { info_set, .. } => {
                        let set = &bush.info_sets()[info_set];
                        let a = (0..set.actions.len())
                            .find(|&a| set.child(u, a) == Some(w))
                            .expect("action");
                        b.probs[info_set][a]
                    }
                    Owner::Terminal => unreachable!("terminal on a path interior"),
                };
            }
            p
        })
        .collect()
}

/// Every Nash equilibrium of a nondegenerate bimatrix game, by solving the
/// indifference equations on each pair of equal-size supports.
pub fn nash_by_supports(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let m = a.len();
    let n = a[0].len();
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        (1u32..1 << k)
            .map(|mask| (0..k).filter(|&i| mask & (1 << i) != 0).collect())
            .collect()
    };
    // weights on `cols` making the rows in `rows` indifferent under `pay`
    let indifferent = |pay: &dyn Fn(usize, usize) -> f64, rows: &[usize], cols: &[usize]| {
        let k = rows.len();
        let mut mat = DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (r, &i) in rows.iter().enumerate() {
            for (c, &j) in cols.iter().enumerate() {
                mat[(r, c)] = pay(i, j);
            }
            mat[(r, k)] = -1.0;
        }
        for c in 0..k {
            mat[(k, c)] = 1.0;
        }
        rhs[k] = 1.0;
        mat.lu().solve(&rhs)
    };
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for rows in subsets(m) {
        for cols in subsets(n).into_iter().filter(|c| c.len() == rows.len()) {
            let Some(y) = indifferent(&|i, j| a[i][j], &rows, &cols) else {
                continue;
            };
            let Some(x) = indifferent(&|j, i| b[i][j], &cols, &rows) else {
                continue;
            };
            let k = rows.len();
            if (0..k).any(|c| y[c] < -1e-12 || x[c] < -1e-12) {
                continue;
            }
            let mut xs = vec![0.0; m];
            let mut ys = vec![0.0; n];
            for (c, &i) in rows.iter().enumerate() {
                xs[i] = x[c].max(0.0);
            }
            for (c, &j) in cols.iter().enumerate() {
                ys[j] = y[c].max(0.0);
            }
            let row_vals: Vec<f64> = (0..m)
                .map(|i| (0..n).map(|j| a[i][j] * ys[j]).sum())
                .collect();
            let col_vals: Vec<f64> = (0..n)
                .map(|j| (0..m).map(|i| b[i][j] * xs[i]).sum())
                .collect();
            if row_vals.iter().any(|&v| v > y[k] + 1e-9)
                || col_vals.iter().any(|&v| v > x[k] + 1e-9)
            {
                continue;
            }
            if !out
                .iter()
                .any(|(px, py)| linf(px, &xs).max(linf(py, &ys)) < 1e-9)
            {
                out.push((xs, ys));
            }
        }
    }
    out
}

/// Membership by the definition: closed under arrows and a union of whole
/// information sets and whole terminal partition blocks.
pub fn is_subgame_by_definition(bush: &GameBush, mask: u64) -> bool {
    let has = |v: VertexId| mask >> v.0 & 1 == 1;
    let whole = |block: &mut dyn Iterator<Item = VertexId>| {
        let inside: Vec<bool> = block.map(has).collect();
        inside.iter().all(|&b| b) || inside.iter().all(|&b| !b)
    };
    bush.arrows().iter().all(|&(a, b)| !has(a) || has(b))
        && bush.info_sets().iter().all(|w| whole(&mut w.nodes()))
        && (0..bush.num_players()).all(|p| {
            bush.terminal_partition(p)
                .iter()
                .all(|blk| whole(&mut blk.iter().copied()))
        })
}

/// All subgame sets as bit masks, by testing every subset of V.
pub fn brute_subgame_family(bush: &GameBush) -> Vec<u64> {
    let n = bush.num_vertices();
    assert!(n <= 20, "brute force over 2^{n} subsets");
    (0u64..1 << n)
        .filter(|&m| is_subgame_by_definition(bush, m))
        .collect()
}

pub fn mask_of(vertices: &[VertexId]) -> u64 {
    vertices.iter().fold(0, |m, v| m | 1 << v.0)
}

/// Outcome of assembling an equilibrium of the full bundle from the parts
/// on either side of S.
#[derive(Debug)]
pub enum ComposeOutcome {
    /// residuals of every composed profile under the full bundle
    Composed(Vec<f64>),
    /// the per-class root distributions and the factor's induced
    /// conditionals did not settle
    NoFixedPoint,
}

/// Caps the per-class equilibrium combinations tried in one round.
const COMBINATION_CAP: usize = 64;
/// Sub equilibria kept per class and round.
const SUB_CAP: usize = 8;

/// Lemma-style assembly. Γ|_S is solved once per class C of the factor's
/// root partition, at a distribution c_C on C, keeping either all its
/// certified m-equilibria or only the subgame-bundle-perfect ones; the root values become
/// constant continuations of Γ/S, which is solved at `q`. When every class
/// the factor plan reaches has induced conditional c_C, the class
/// solutions are merged into one profile of Γ|_S at the induced
/// conditional on R' (at the mixture of the c_C when S is not reached) and
/// composed. Otherwise the c_C move to the induced conditionals and the
/// loop repeats.
pub fn compose_at_fixed_point(
    bundle: &GameBundle,
    s: &SubgameSet,
    q: &[f64],
    config: &SolverConfig,
    rounds: usize,
    perfect_sub: bool,
) -> ComposeOutcome {
    let tau = config.tol;
    let bush = bundle.bush();
    let sub = restrict(bundle, s).expect("restriction");
    let sbush = sub.bush();
    let sform = sbush.form().expect("strategy form");
    let k = sbush.roots().len();
    let root_of = |v: &VertexId| {
        sbush
            .root_position(sbush.v(bush.name(*v)))
            .expect("root of Γ|S")
    };
    let classes: Vec<Vec<usize>> = factor_classes(bundle, s)
        .iter()
        .map(|c| c.iter().map(root_of).collect())
        .collect();
    let class_of_root: Vec<usize> = (0..k)
        .map(|r| {
            classes
                .iter()
                .position(|c| c.contains(&r))
                .expect("classes cover R'")
        })
        .collect();
    // class of each information set of Γ|_S, through the root above it
    let set_class: Vec<usize> = sbush
        .info_sets()
        .iter()
        .map(|w| {
            let node = w.nodes().next().expect("nonempty information set");
            class_of_root[sbush.root_position(sbush.path_to(node)[0]).expect("root")]
        })
        .collect();
    let embed = |class: usize, dist: &[f64]| {
        let mut full = vec![0.0; k];
        for (&r, p) in classes[class].iter().zip(dist) {
            full[r] = *p;
        }
        full
    };
    let inner = if perfect_sub {
        relevant_subgame_sets(sbush, DEFAULT_FAMILY_CAP).expect("relevant sets of Γ|S")
    } else {
        Vec::new()
    };
    let mut cs: Vec<Vec<f64>> = classes
        .iter()
        .map(|c| vec![1.0 / c.len() as f64; c.len()])
        .collect();
    let mut visited: Vec<Vec<Vec<f64>>> = Vec::new();
    for _ in 0..rounds {
        visited.push(cs.clone());
        let mut per_class = Vec::new();
        for (ci, c) in cs.iter().enumerate() {
            let eqs: Vec<_> = solve_myopic(&sub, &embed(ci, c), config)
                .expect("subgame solve")
                .equilibria
                .into_iter()
                .filter(|e| e.certificate.valid)
                .filter(|e| {
                    !perfect_sub
                        || inner.iter().all(|t| {
                            is_s_perfect(&sub, t, &e.plan, tau, config.mesh)
                                .expect("perfectness check")
                                .verdict
                                .is_true()
                        })
                })
                .take(SUB_CAP)
                .collect();
            if eqs.is_empty() {
                return ComposeOutcome::NoFixedPoint;
            }
            per_class.push(eqs);
        }
        let mut residuals = Vec::new();
        let mut next: Option<Vec<Vec<f64>>> = None;
        let mut pick = vec![0usize; classes.len()];

        for _ in 0..COMBINATION_CAP {
            let chosen: Vec<_> = pick
                .iter()
                .enumerate()
                .map(|(ci, &i)| &per_class[ci][i])
                .collect();
            let values: Vec<Vec<Vec<f64>>> = chosen
                .iter()
                .map(|e| root_values(&sub, &e.plan).expect("root values"))
                .collect();
            let f = factor(bundle, s, |class| {
                Some(PayoffKind::Constant(
                    class
                        .iter()
                        .map(|v| {
                            let r = root_of(v);
                            values[class_of_root[r]][r].clone()
                        })
                        .collect(),
                ))
            })
            .expect("factor");
            let fbush = f.bush();
            let f_report = solve_myopic(&f, q, config).expect("factor solve");
            for fe in f_report.equilibria.iter().filter(|e| e.certificate.valid) {
                let at_roots: Vec<f64> = sbush
                    .roots()
                    .iter()
                    .map(|&u| {
                        let t = fbush.v(sbush.name(u));
                        fe.plan.reach.terminal[fbush.terminal_position(t).expect("R' is terminal")]
                    })
                    .collect();
                let mut induced = cs.clone();
                for (ci, c) in classes.iter().enumerate() {
                    let mass: f64 = c.iter().map(|&r| at_roots[r]).sum();
                    if mass > tau {
                        induced[ci] = c.iter().map(|&r| at_roots[r] / mass).collect();
                    }
                }
                let settled = induced.iter().zip(&cs).all(|(a, b)| linf(a, b) <= tau);
                if !settled {
                    let fresh = !visited
                        .iter()
                        .any(|v| v.iter().zip(&induced).all(|(a, b)| linf(a, b) <= tau));
                    if fresh {
                        next.get_or_insert(induced);
                    }
                    continue;
                }
                let total: f64 = at_roots.iter().sum();
                let q_sub: Vec<f64> = if total > tau {
                    at_roots.iter().map(|p| p / total).collect()
                } else {
                    let mut mix = vec![0.0; k];
                    for (ci, c) in cs.iter().enumerate() {
                        for (x, y) in mix.iter_mut().zip(embed(ci, c)) {
                            *x += y / classes.len() as f64;
                        }
                    }
                    mix
                };
                let mut probs = BehaviourProfile::uniform(sbush).probs;
                for (ci, e) in chosen.iter().enumerate() {
                    let b = mixed_to_behaviour(sbush, sform, &e.sigma).behaviour;
                    for (w, p) in probs.iter_mut().enumerate() {
                        if set_class[w] == ci {
                            *p = b.probs[w].clone();
                        }
                    }
                }
                let sigma = behaviour_to_mixed(sform, &BehaviourProfile { probs });
                let sub_plan = make_plan(&sub, &q_sub, &sigma, &Selector::First).expect("sub plan");
                let sub_cert = verify_myopic(&sub, &sub_plan, 2.0 * tau).expect("verify");
                assert!(
                    sub_cert.valid,
                    "merged class solutions: residual {:e}",
                    sub_cert.residual
                );
                let comp = compose(bundle, s, &f, &fe.plan, &sub, &sub_plan, tau, Some(1e-9))
                    .expect("consistent parts compose");
                let cert = verify_myopic(bundle, &comp.plan, 2.0 * tau).expect("verify");
                residuals.push(cert.residual);
            }
            // next combination of per-class equilibria
            let mut p = 0;
            while p < pick.len() {
                pick[p] += 1;
                if pick[p] < per_class[p].len() {
                    break;
                }
                pick[p] = 0;
                p += 1;
            }
            if p == pick.len() {
                break;
            }
        }
        if !residuals.is_empty() {
            return ComposeOutcome::Composed(residuals);
        }
        match next {
            Some(n) => cs = n,
            None => return ComposeOutcome::NoFixedPoint,
        }
    }
    ComposeOutcome::NoFixedPoint
}

/// Composes on random perfect-recall bushes until `target` bushes have
/// produced at least one composition. Returns (bushes composed, bushes
/// tried, worst residual).
pub fn compose_random(target: usize, seed: u64) -> (usize, usize, f64) {
    let config = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = BushShape::default();
    let (mut done, mut tried, mut worst) = (0, 0, 0.0f64);
    while done < target && tried < 20 * target {
        let b = random_bush(&mut rng, &shape);
        let bush = b.bush();
        assert!(has_perfect_recall(bush).ok);
        let sets = relevant_subgame_sets(bush, DEFAULT_FAMILY_CAP).unwrap();
        if sets.is_empty() {
            continue;
        }
        tried += 1;
        let started = std::time::Instant::now();
        let k = bush.roots().len();
        let q = vec![1.0 / k as f64; k];
        let mut composed = false;
        let mut local = 0.0f64;
        for s in [&sets[0], &sets[sets.len() - 1]] {
            if let ComposeOutcome::Composed(res) =
                compose_at_fixed_point(&b, s, &q, &config, 8, true)
            {
                composed = true;
                local = res.into_iter().fold(local, f64::max);
            }
        }
        worst = worst.max(local);
        done += usize::from(composed);
        if std::env::var_os("COMPOSE_TRACE").is_some() {
            eprintln!(
                "bush {tried}: {} vertices, {} sets, composed {composed}, residual {local:e}, {:?}",
                bush.num_vertices(),
                sets.len(),
                started.elapsed()
            );
        }
    }
    (done, tried, worst)
}

/// Worst reach round-trip error over a grid on Δ(R) and `samples` random
/// profiles: σ against its behaviour translation (walked path by path) and
/// against the product-form profile rebuilt from that translation.
pub fn kuhn_error(bundle: &GameBundle, samples: usize, seed: u64) -> f64 {
    let bush = bundle.bush();
    let form = bush.form().unwrap();
    let grid = barycentric_grid(bush.roots().len(), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let sigma = random_profile(&mut rng, form);
        let k = mixed_to_behaviour(bush, form, &sigma);
        assert!(k.perfect_recall && k.warning.is_none());
        k.behaviour.check(bush).unwrap();
        let back = behaviour_to_mixed(form, &k.behaviour);
        back.check(form).unwrap();
        for q in &grid {
            let mixed = terminal_reach(form, q, &sigma);
            worst = worst
                .max(linf(&mixed, &walk_reach(bush, q, &k.behaviour)))
                .max(linf(&mixed, &terminal_reach(form, q, &back)));
        }
    }
    worst
}

/// Seeded random bimatrix games up to 4×4: the certified equilibria and the
/// support-enumeration oracle agree as sets. Returns the number of games
/// that disagreed.
pub fn bimatrix_disagreements(games: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for g in 0..games {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(2..=4);
        let (a, b) = random_bimatrix(&mut rng, m, n);
        let oracle = nash_by_supports(&a, &b);
        let report = solve_myopic(&bimatrix(&a, &b), &[1.0], &SolverConfig::default()).unwrap();
        let found: Vec<(Vec<f64>, Vec<f64>)> = report
            .equilibria
            .iter()
            .filter(|e| e.certificate.valid)
            .map(|e| (e.sigma.weights[0].clone(), e.sigma.weights[1].clone()))
            .collect();
        let covers = |xs: &[(Vec<f64>, Vec<f64>)], ys: &[(Vec<f64>, Vec<f64>)]| {
            xs.iter()
                .all(|(x, y)| ys.iter().any(|(u, v)| linf(x, u).max(linf(y, v)) <= 1e-6))
        };
        if !covers(&oracle, &found) || !covers(&found, &oracle) {
            eprintln!("game {g} ({m}x{n}): oracle {oracle:?} vs solver {found:?}");
            bad += 1;
        }
    }
    bad
}
