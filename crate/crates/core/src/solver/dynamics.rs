use rayon::prelude::*;

use super::evaluate::Evaluator;
use super::simplex::{nash_residual, retract};
use super::support::polish;
use super::SolverConfig;
use crate::strategies::MixedProfile;

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// The i-th Halton point pushed onto the product of simplices through
/// −ln normalization. Dimensions beyond the prime table reuse bases with
/// a shifted index.
pub(crate) fn halton_profile(sizes: &[usize], i: u64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut d = 0usize;
    for &k in sizes {
        let raw: Vec<f64> = (0..k)
            .map(|_| {
                let base = PRIMES[d % PRIMES.len()];
                let shift = (d / PRIMES.len()) as u64 * 7919;
                d += 1;
                let u = radical_inverse(i + 1 + shift, base).clamp(1e-9, 1.0 - 1e-9);
                -u.ln()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        out.extend(raw.iter().map(|r| r / total));
    }
    out
}

/// Outcome of one damped run.
pub(crate) struct Run {
    pub sigma: Option<MixedProfile>,
    pub converged: bool,
    pub iterations: usize,
}

/// σ ← r(σ + η v(σ)/B) with η halved whenever the Nash residual fails to
/// halve within the stall window.
fn run_from(ev: &Evaluator, config: &SolverConfig, start: Vec<f64>, max_iters: usize) -> Run {
    let scale = ev.bundle.payoff_bound().max(1.0);
    let mut x = start;
    let mut eta = config.eta;
    let mut halvings = 0;
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        let sigma = MixedProfile::new(split(&ev.sizes, &x));
        let Ok(v) = ev.values(&sigma) else {
            return Run {
                sigma: None,
                converged: false,
                iterations,
            };
        };
        let flat_v: Vec<f64> = v.iter().flatten().map(|a| a / scale).collect();
        let shifted: Vec<f64> = x.iter().zip(&flat_v).map(|(s, d)| s + eta * d).collect();
        let next = retract(&shifted, &ev.sizes);
        let step = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if step < config.step_tol {
            converged = true;
            break;
        }
        let res = nash_residual(&x, &flat_v, &ev.sizes);
        if res < 0.5 * best {
            best = res;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.stall_window {
                if halvings >= config.max_halvings {
                    break;
                }
                eta *= 0.5;
                halvings += 1;
                since_best = 0;
                best = res;
            }
        }
    }
    Run {
        sigma: Some(MixedProfile::new(split(&ev.sizes, &x))),
        converged,
        iterations,
    }
}

fn split(sizes: &[usize], x: &[f64]) -> Vec<Vec<f64>> {
    let mut at = 0;
    sizes
        .iter()
        .map(|&k| {
            let w = x[at..at + k].to_vec();
            at += k;
            w
        })
        .collect()
}

/// Runs every start in parallel and polishes each end point on its
/// support. Returns the uncertified candidates, the number of runs that
/// met the step tolerance and the total iteration count.
pub(crate) fn multistart(
    ev: &Evaluator,
    config: &SolverConfig,
    max_iters: usize,
) -> (Vec<MixedProfile>, usize, usize) {
    let runs: Vec<Run> = (0..config.starts as u64)
        .into_par_iter()
        .map(|i| {
            let start = halton_profile(&ev.sizes, i.wrapping_add(config.seed));
            run_from(ev, config, start, max_iters)
        })
        .collect();
    let converged = runs.iter().filter(|r| r.converged).count();
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let mut out = Vec::new();
    for run in runs {
        if let Some(sigma) = run.sigma {
            if let Some(p) = polish(ev, &sigma, 1e-7) {
                out.push(p);
            }
            out.push(sigma);
        }
    }
    (out, converged, iterations)
}
