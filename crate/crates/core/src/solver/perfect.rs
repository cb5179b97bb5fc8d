use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::myopic::{solve_myopic, Equilibrium, Source};
use super::sweep::barycentric_grid;
use super::{verify_myopic, SolverConfig, SolverError};
use crate::model::{
    table_distance, GameBundle, Interpolation, PayoffKind, SamplePoint, SampledGraph, VertexId,
};
use crate::strategies::{Plan, Selector};
use crate::subgame::{
    compose, factor, factor_classes, has_perfect_recall, is_s_perfect, relevant_subgame_sets,
    restrict, root_values, PerfectnessReport, SubgameSet, DEFAULT_FAMILY_CAP,
};

/// How a subgame-bundle-perfect equilibrium was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// innermost-first: solve the subgame, package its values as the
    /// factor's continuation, solve the factor and compose
    Composed,
    /// solve the whole bundle and keep equilibria that pass every
    /// S-perfectness check
    Filtered,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectEquilibrium {
    pub equilibrium: Equilibrium,
    pub route: Route,
    pub checks: Vec<PerfectnessReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectPoint {
    pub q: Vec<f64>,
    pub equilibria: Vec<PerfectEquilibrium>,
    /// certified m-equilibria that failed some S-perfectness check
    pub rejected: Vec<PerfectEquilibrium>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectReport {
    pub points: Vec<PerfectPoint>,
}

/// Subgame-bundle-perfect m-equilibria at every point of the grid on Δ(R).
/// Requires perfect recall.
pub fn solve_bundle_perfect(
    bundle: &GameBundle,
    config: &SolverConfig,
) -> Result<PerfectReport, SolverError> {
    config.check()?;
    let bush = bundle.bush();
    let recall = has_perfect_recall(bush);
    if !recall.ok {
        return Err(SolverError::Recall(recall.describe(bush)));
    }
    let relevant = relevant_subgame_sets(bush, DEFAULT_FAMILY_CAP)?;
    let grid = barycentric_grid(bush.roots().len(), config.mesh);
    if grid.len() > config.grid_cap {
        return Err(SolverError::GridTooLarge {
            points: grid.len(),
            cap: config.grid_cap,
        });
    }
    let points: Result<Vec<PerfectPoint>, SolverError> = grid
        .into_par_iter()
        .map(|q| perfect_point(bundle, &relevant, q, config))
        .collect();
    Ok(PerfectReport { points: points? })
}

/// Subgame-bundle-perfect m-equilibria at a single root distribution `q`.
/// Requires perfect recall.
pub fn solve_perfect_at(
    bundle: &GameBundle,
    q: &[f64],
    config: &SolverConfig,
) -> Result<PerfectPoint, SolverError> {
    config.check()?;
    let bush = bundle.bush();
    let recall = has_perfect_recall(bush);
    if !recall.ok {
        return Err(SolverError::Recall(recall.describe(bush)));
    }
    if q.len() != bush.roots().len() {
        return Err(SolverError::Config(format!(
            "q has {} entries for {} roots",
            q.len(),
            bush.roots().len()
        )));
    }
    let relevant = relevant_subgame_sets(bush, DEFAULT_FAMILY_CAP)?;
    perfect_point(bundle, &relevant, q.to_vec(), config)
}

fn perfect_point(
    bundle: &GameBundle,
    relevant: &[SubgameSet],
    q: Vec<f64>,
    config: &SolverConfig,
) -> Result<PerfectPoint, SolverError> {
    let mut warnings = Vec::new();
    let filtered = solve_myopic(bundle, &q, config)?;
    for e in &filtered.diagnostics.errors {
        warnings.push(format!("full solve: {e}"));
    }
    let mut composed = Vec::new();
    match composed_route(bundle, &q, config, &mut warnings) {
        Ok(found) => composed = found,
        Err(e) => warnings.push(format!("composed route failed: {e}")),
    }

    let mut merged: Vec<(Equilibrium, Route)> = Vec::new();
    for e in filtered.equilibria {
        merged.push((e, Route::Filtered));
    }
    for e in composed {
        if let Some(slot) = merged
            .iter_mut()
            .find(|(f, _)| same(f, &e, config.dedupe_tol))
        {
            slot.1 = Route::Both;
        } else {
            merged.push((e, Route::Composed));
        }
    }

    let mut equilibria = Vec::new();
    let mut rejected = Vec::new();
    for (equilibrium, route) in merged {
        let mut checks = Vec::new();
        for s in relevant {
            checks.push(is_s_perfect(
                bundle,
                s,
                &equilibrium.plan,
                config.tol,
                config.mesh,
            )?);
        }
        let item = PerfectEquilibrium {
            equilibrium,
            route,
            checks,
        };
        if item.checks.iter().all(|c| c.verdict.is_true()) {
            equilibria.push(item);
        } else {
            rejected.push(item);
        }
    }
    Ok(PerfectPoint {
        q,
        equilibria,
        rejected,
        warnings,
    })
}

fn same(a: &Equilibrium, b: &Equilibrium, tol: f64) -> bool {
    a.sigma.linf_distance(&b.sigma) <= tol && table_distance(&a.plan.y, &b.plan.y) <= tol
}

/// Innermost-first solve at one root distribution. Bundles without a
/// relevant subgame set are solved directly.
fn composed_route(
    bundle: &GameBundle,
    q: &[f64],
    config: &SolverConfig,
    warnings: &mut Vec<String>,
) -> Result<Vec<Equilibrium>, SolverError> {
    let relevant = relevant_subgame_sets(bundle.bush(), DEFAULT_FAMILY_CAP)?;
    let Some(s) = relevant.iter().min_by_key(|s| s.len()) else {
        return Ok(solve_myopic(bundle, q, config)?.equilibria);
    };
    let sub = restrict(bundle, s)?;
    let classes = factor_classes(bundle, s);
    let mut graphs: Vec<(Vec<VertexId>, SampledGraph)> = Vec::new();
    for class in &classes {
        graphs.push((
            class.clone(),
            sample_class(bundle, &sub, s, class, config, warnings)?,
        ));
    }
    let fac = factor(bundle, s, |c| {
        graphs
            .iter()
            .find(|(k, _)| k.as_slice() == c)
            .map(|(_, g)| PayoffKind::Samples(g.clone()))
    })?;
    let factor_solutions = composed_route(&fac, q, config, warnings)?;

    let mut out: Vec<Equilibrium> = Vec::new();
    for fe in factor_solutions {
        let q_sub = sub_distribution(&fac, &sub, &fe.plan, config.tol);
        let sub_solutions = composed_route(&sub, &q_sub, config, warnings)?;
        for se in sub_solutions {
            let comp = match compose(bundle, s, &fac, &fe.plan, &sub, &se.plan, config.tol, None) {
                Ok(c) => c,
                Err(e) => {
                    warnings.push(format!("composition skipped: {e}"));
                    continue;
                }
            };
            let cert = verify_myopic(bundle, &comp.plan, 2.0 * config.tol)?;
            if !cert.valid {
                warnings.push(format!(
                    "composed profile at q = {q:?} has residual {:.3e}; dropped",
                    cert.residual
                ));
                continue;
            }
            let eq = Equilibrium {
                payoffs: comp.plan.expected_payoffs(),
                sigma: comp.sigma,
                plan: comp.plan,
                certificate: cert,
                selector: Selector::First,
                source: Source::Composed,
                free_directions: Vec::new(),
            };
            if !out.iter().any(|o| same(o, &eq, config.dedupe_tol)) {
                out.push(eq);
            }
        }
    }
    Ok(out)
}

/// Root distribution for Γ|_S: the conditional on R' induced by the factor
/// plan, or, when R' is unreached, the factor's witnesses spread evenly
/// over the classes.
fn sub_distribution(fac: &GameBundle, sub: &GameBundle, plan: &Plan, tau: f64) -> Vec<f64> {
    let fbush = fac.bush();
    let sbush = sub.bush();
    let ids: Vec<VertexId> = sbush
        .roots()
        .iter()
        .map(|&u| fbush.v(sbush.name(u)))
        .collect();
    let at: Vec<f64> = ids
        .iter()
        .map(|&t| plan.reach.terminal[fbush.terminal_position(t).expect("terminal")])
        .collect();
    let total: f64 = at.iter().sum();
    if total > tau {
        return at.iter().map(|p| p / total).collect();
    }
    let mut q = vec![0.0; ids.len()];
    let mut classes = 0.0;
    for (b, block) in fac.meet().blocks().iter().enumerate() {
        if !block.iter().all(|t| ids.contains(t)) {
            continue;
        }
        classes += 1.0;
        let w = plan.reach.conditional[b]
            .clone()
            .or_else(|| plan.witness[b].clone())
            .unwrap_or_else(|| vec![1.0 / block.len() as f64; block.len()]);
        for (t, x) in block.iter().zip(w) {
            let i = ids.iter().position(|u| u == t).expect("member");
            q[i] += x;
        }
    }
    if classes > 0.0 {
        for x in &mut q {
            *x /= classes;
        }
    }
    q
}

/// The values of Γ|_S at its roots in `class`, sampled over the grid on
/// Δ(class) with the rest of R' unreached.
fn sample_class(
    bundle: &GameBundle,
    sub: &GameBundle,
    s: &SubgameSet,
    class: &[VertexId],
    config: &SolverConfig,
    warnings: &mut Vec<String>,
) -> Result<SampledGraph, SolverError> {
    let sbush = sub.bush();
    let positions: Vec<usize> = class
        .iter()
        .map(|&v| {
            let sv = sbush.v(bundle.bush().name(v));
            sbush
                .root_position(sv)
                .expect("class member is a root of Γ|_S")
        })
        .collect();
    let grid = barycentric_grid(class.len(), config.mesh);
    if grid.len() > config.grid_cap {
        return Err(SolverError::GridTooLarge {
            points: grid.len(),
            cap: config.grid_cap,
        });
    }
    let mut local = Vec::new();
    let mut points: Vec<SamplePoint> = Vec::with_capacity(grid.len());
    for w in grid {
        let mut q = vec![0.0; s.roots.len()];
        for (&p, &x) in positions.iter().zip(&w) {
            q[p] = x;
        }
        let solutions = composed_route(sub, &q, config, &mut local)?;
        let mut values: Vec<crate::model::Table> = Vec::new();
        for e in &solutions {
            let rows = root_values(sub, &e.plan)?;
            let table: crate::model::Table = positions.iter().map(|&p| rows[p].clone()).collect();
            if !values
                .iter()
                .any(|v| table_distance(v, &table) <= config.dedupe_tol)
            {
                values.push(table);
            }
        }
        if values.is_empty() {
            warnings.push(format!(
                "no subgame equilibrium at conditional {w:?} on {:?}",
                bundle.class_names(class)
            ));
        }
        points.push(SamplePoint { w, values });
    }
    warnings.extend(local);
    let interpolation = if class.len() <= 2 {
        Interpolation::Linear
    } else {
        Interpolation::Nearest
    };
    Ok(SampledGraph {
        interpolation,
        points,
    })
}
