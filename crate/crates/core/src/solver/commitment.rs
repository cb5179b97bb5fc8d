use serde::{Deserialize, Serialize};

use super::simplex::simplex_project;
use super::SolverError;
use crate::model::GameBundle;
use crate::strategies::{make_plan, MixedProfile, Selector};

const SCAN: usize = 64;
const GOLDEN_TOL: f64 = 1e-12;

/// The best mixed strategy of the only player with a choice, who commits
/// to it; payoffs follow the continuation at the induced conditional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommitmentOptimum {
    pub player: usize,
    pub sigma: Vec<f64>,
    pub value: f64,
}

struct Mover<'a> {
    bundle: &'a GameBundle,
    q: &'a [f64],
    player: usize,
    counts: Vec<usize>,
}

impl Mover<'_> {
    fn payoff(&self, x: &[f64]) -> Result<f64, SolverError> {
        let weights = self
            .counts
            .iter()
            .enumerate()
            .map(|(n, &c)| {
                if n == self.player {
                    x.to_vec()
                } else {
                    vec![1.0; c]
                }
            })
            .collect();
        let plan = make_plan(
            self.bundle,
            self.q,
            &MixedProfile::new(weights),
            &Selector::First,
        )?;
        Ok(plan.expected_payoffs()[self.player])
    }
}

/// Maximizes the committed payoff in a bundle where a single player has
/// more than one pure strategy. Two strategies: a grid scan followed by
/// golden-section search in the best bracket. More: projected gradient
/// ascent from the best scanned vertex or barycenter.
pub fn commitment_optimum(
    bundle: &GameBundle,
    q: &[f64],
) -> Result<CommitmentOptimum, SolverError> {
    let counts = bundle.bush().form()?.counts();
    let movers: Vec<usize> = (0..counts.len()).filter(|&n| counts[n] > 1).collect();
    let player = match movers.as_slice() {
        [] => 0,
        [n] => *n,
        _ => {
            return Err(SolverError::Config(
                "commitment optimum needs a bundle with a single player who moves".into(),
            ))
        }
    };
    let m = Mover {
        bundle,
        q,
        player,
        counts,
    };
    let k = m.counts[player];
    if k == 1 {
        return Ok(CommitmentOptimum {
            player,
            sigma: vec![1.0],
            value: m.payoff(&[1.0])?,
        });
    }
    if k == 2 {
        return golden(&m);
    }
    gradient(&m, k)
}

fn golden(m: &Mover) -> Result<CommitmentOptimum, SolverError> {
    let f = |p: f64| m.payoff(&[p, 1.0 - p]);
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..=SCAN {
        let v = f(i as f64 / SCAN as f64)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let mut a = best.0.saturating_sub(1) as f64 / SCAN as f64;
    let mut b = (best.0 + 1).min(SCAN) as f64 / SCAN as f64;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let p = 0.5 * (a + b);
    let mut out = CommitmentOptimum {
        player: m.player,
        sigma: vec![p, 1.0 - p],
        value: f(p)?,
    };
    let scanned = best.0 as f64 / SCAN as f64;
    if best.1 > out.value {
        out = CommitmentOptimum {
            player: m.player,
            sigma: vec![scanned, 1.0 - scanned],
            value: best.1,
        };
    }
    Ok(out)
}

fn gradient(m: &Mover, k: usize) -> Result<CommitmentOptimum, SolverError> {
    let mut x = vec![1.0 / k as f64; k];
    let mut fx = m.payoff(&x)?;
    for i in 0..k {
        let mut e = vec![0.0; k];
        e[i] = 1.0;
        let v = m.payoff(&e)?;
        if v > fx {
            x = e;
            fx = v;
        }
    }
    let h = 1e-7;
    let mut step = 0.1;
    for _ in 0..5_000 {
        let mut grad = vec![0.0; k];
        for i in 0..k {
            // directional derivative towards vertex i; it differs from the
            // gradient by a constant, which projection ignores
            let xp: Vec<f64> = (0..k)
                .map(|j| x[j] + h * (f64::from(u8::from(i == j)) - x[j]))
                .collect();
            grad[i] = (m.payoff(&xp)? - fx) / h;
        }
        let trial = simplex_project(
            &x.iter()
                .zip(&grad)
                .map(|(a, g)| a + step * g)
                .collect::<Vec<_>>(),
        );
        let ft = m.payoff(&trial)?;
        if ft > fx {
            let moved = trial
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            x = trial;
            fx = ft;
            if moved < 1e-13 {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
    }
    Ok(CommitmentOptimum {
        player: m.player,
        sigma: x,
        value: fx,
    })
}
