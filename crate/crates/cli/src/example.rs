//! Canned reproductions of the built-in example bundles.

use std::collections::BTreeMap;

use gamebush::fixtures;
use gamebush::model::GameBundle;
use gamebush::solver::{
    commitment_optimum, solve_bundle_perfect, solve_myopic, sweep, Equilibrium, SolverConfig,
};
use gamebush::strategies::{make_plan, MixedProfile, Selector};
use gamebush::subgame::{is_s_perfect, relevant_subgame_sets, DEFAULT_FAMILY_CAP};
use serde_json::{json, Value};

use crate::Failure;

fn failure(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        kind: "solver",
        message: e.to_string(),
    }
}

/// Pure strategy labels when σ is pure, else the weights.
fn describe(bundle: &GameBundle, sigma: &MixedProfile) -> Value {
    let bush = bundle.bush();
    let Ok(form) = bush.form() else {
        return json!(sigma.weights);
    };
    let picks: Option<Vec<String>> = sigma
        .weights
        .iter()
        .enumerate()
        .map(|(n, w)| {
            let i = w.iter().position(|&x| x > 1.0 - 1e-9)?;
            Some(form.spaces[n].label(bush, i))
        })
        .collect();
    picks.map_or_else(|| json!(sigma.weights), |p| json!(p.join(" ")))
}

fn summarize(bundle: &GameBundle, e: &Equilibrium) -> Value {
    json!({
        "profile": describe(bundle, &e.sigma),
        "payoffs": e.payoffs,
        "residual": e.certificate.residual,
    })
}

fn ex1(params: &BTreeMap<String, f64>, config: &SolverConfig) -> Result<Value, Failure> {
    let s = params.get("s").copied().unwrap_or(0.1);
    if !(s > 0.0) {
        return Err(Failure::input("ex1 needs s > 0"));
    }
    let factor = fixtures::ex1_factor(s);
    let opt = commitment_optimum(&factor, &[1.0]).map_err(failure)?;
    let closed = fixtures::ex1_commitment_point(s);
    let factor_eq = solve_myopic(&factor, &[1.0], config).map_err(failure)?;
    let full = fixtures::ex1(s);
    let full_eq = solve_myopic(&full, &[1.0], config).map_err(failure)?;

    let (sub, _) = fixtures::ex1_subgame(s);
    let table = sweep(&sub, config).map_err(failure)?;
    let mut rows = Vec::new();
    let (mut worst_residual, mut worst_gap) = (0.0f64, 0.0f64);
    for point in &table.points {
        let p = point.q[0];
        for e in &point.equilibria {
            let (beta, alpha) = (e.sigma.weights[1][0], e.sigma.weights[2][0]);
            let interior = p > 0.0 && p < 1.0;
            if interior {
                worst_residual = worst_residual.max(e.residual);
                worst_gap = worst_gap
                    .max((beta - (1.0 - p)).abs())
                    .max((alpha - (1.0 - p)).abs());
            }
            rows.push(json!({
                "p": p,
                "beta": beta,
                "alpha": alpha,
                "value": e.payoffs,
                "residual": e.residual,
            }));
        }
    }
    Ok(json!({
        "example": "ex1",
        "s": s,
        "commitment": {
            "p": opt.sigma[0],
            "value": opt.value,
            "closed_form_p": closed,
            "closed_form_value": fixtures::ex1_commitment_value(s, closed),
        },
        "factor_equilibria": factor_eq.equilibria.iter().map(|e| json!({
            "p": e.sigma.weights[0][0],
            "payoff": e.payoffs[0],
        })).collect::<Vec<_>>(),
        "full_equilibria": full_eq.equilibria.iter().map(|e| summarize(&full, e)).collect::<Vec<_>>(),
        "indifference": {
            "mesh": table.mesh,
            "max_residual": worst_residual,
            "max_distance_to_one_minus_p": worst_gap,
            "points": rows,
        },
    }))
}

fn ex2(config: &SolverConfig) -> Result<Value, Failure> {
    let b = fixtures::ex2();
    let raw = solve_myopic(&b, &[1.0], config).map_err(failure)?;
    let perfect = solve_bundle_perfect(&b, config).map_err(failure)?;
    let point = &perfect.points[0];
    Ok(json!({
        "example": "ex2",
        "equilibria": raw.equilibria.iter().map(|e| summarize(&b, e)).collect::<Vec<_>>(),
        "bundle_perfect": point.equilibria.iter().map(|e| summarize(&b, &e.equilibrium)).collect::<Vec<_>>(),
        "rejected": point.rejected.iter().map(|e| summarize(&b, &e.equilibrium)).collect::<Vec<_>>(),
    }))
}

/// Payoff matrix keyed by action names, so bundles that differ only in
/// vertex and information set names compare equal.
fn normal_form(b: &GameBundle) -> Result<BTreeMap<Vec<String>, Vec<f64>>, Failure> {
    let bush = b.bush();
    let form = bush.form().map_err(failure)?;
    let counts: Vec<usize> = form.spaces.iter().map(|s| s.count).collect();
    let mut out = BTreeMap::new();
    let mut picks = vec![0usize; counts.len()];
    loop {
        let sigma = MixedProfile::pure(form, &picks);
        let plan = make_plan(b, &[1.0], &sigma, &Selector::First).map_err(failure)?;
        let key: Vec<String> = picks
            .iter()
            .enumerate()
            .map(|(n, &i)| {
                let label = form.spaces[n].label(bush, i);
                label
                    .split(' ')
                    .map(|a| a.split(':').last().unwrap_or(a))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out.insert(key, plan.expected_payoffs());
        let mut n = 0;
        while n < picks.len() {
            picks[n] += 1;
            if picks[n] < counts[n] {
                break;
            }
            picks[n] = 0;
            n += 1;
        }
        if n == picks.len() {
            return Ok(out);
        }
    }
}

fn ex3(config: &SolverConfig) -> Result<Value, Failure> {
    let b = fixtures::ex3();
    let raw = solve_myopic(&b, &[1.0], config).map_err(failure)?;
    let sets = relevant_subgame_sets(b.bush(), DEFAULT_FAMILY_CAP).map_err(failure)?;
    let mut rows = Vec::new();
    for e in &raw.equilibria {
        let mut checks = Vec::new();
        for s in &sets {
            checks.push(is_s_perfect(&b, s, &e.plan, config.tol, config.mesh).map_err(failure)?);
        }
        rows.push(json!({
            "equilibrium": summarize(&b, e),
            "bundle_perfect": checks.iter().all(|c| c.verdict.is_true()),
            "checks": checks,
        }));
    }
    let same = normal_form(&fixtures::ex2())? == normal_form(&b)?;
    let note = if same {
        "the normal form coincides with ex2's, yet here neither equilibrium is eliminated"
    } else {
        "the normal form differs from ex2's"
    };
    Ok(json!({
        "example": "ex3",
        "subgame_sets": sets.iter().map(|s| s.names(b.bush())).collect::<Vec<_>>(),
        "equilibria": rows,
        "same_normal_form_as_ex2": same,
        "note": note,
    }))
}

pub fn report(
    name: &str,
    params: &BTreeMap<String, f64>,
    config: &SolverConfig,
) -> Result<Value, Failure> {
    match name {
        "ex1" => ex1(params, config),
        "ex2" => ex2(config),
        "ex3" => ex3(config),
        _ => Err(Failure::input(format!("unknown example `{name}`"))),
    }
}
