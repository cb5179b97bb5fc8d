use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::evaluate::Evaluator;
use crate::strategies::{GameForm, MixedProfile};

const NEWTON_ITERS: usize = 60;
const NEWTON_TOL: f64 = 1e-14;
const FD_STEP: f64 = 1e-7;
/// Weights below this after a solve count as infeasible, not as rounding.
const NEGATIVE_SLACK: f64 = 1e-9;

/// Number of ways to pick a nonempty support for every player.
pub(crate) fn combination_count(sizes: &[usize]) -> u128 {
    sizes
        .iter()
        .map(|&k| {
            if k >= 127 {
                u128::MAX
            } else {
                (1u128 << k) - 1
            }
        })
        .fold(1u128, |a, b| a.saturating_mul(b))
}

/// One pure strategy per class of strategies that are consistent with the
/// same terminals, per player. Members of a class differ only at their own
/// unreachable information sets and earn the same payoffs against
/// everything, so supports range over the representatives.
pub(crate) fn representatives(form: &GameForm) -> Vec<Vec<usize>> {
    form.spaces
        .iter()
        .enumerate()
        .map(|(n, space)| {
            let mut reach: Vec<Vec<usize>> = vec![Vec::new(); space.count];
            for (t, list) in form.consistent[n].iter().enumerate() {
                for &st in list {
                    reach[st as usize].push(t);
                }
            }
            let mut seen: Vec<&Vec<usize>> = Vec::new();
            let mut reps = Vec::new();
            for (st, r) in reach.iter().enumerate() {
                if !seen.contains(&r) {
                    seen.push(r);
                    reps.push(st);
                }
            }
            reps
        })
        .collect()
}

/// Every nonempty subset mask of `0..k`, smaller supports first.
fn masks(k: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (1..(1u64 << k)).collect();
    out.sort_by_key(|m| (m.count_ones(), *m));
    out
}

fn mask_members(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m >> i & 1 == 1).collect()
}

/// Maps the unknowns (weights on the supports) to a full profile.
fn embed(sizes: &[usize], support: &[Vec<usize>], x: &[f64]) -> MixedProfile {
    let mut at = 0;
    let weights = sizes
        .iter()
        .zip(support)
        .map(|(&k, sup)| {
            let mut w = vec![0.0; k];
            for &i in sup {
                w[i] = x[at];
                at += 1;
            }
            w
        })
        .collect();
    MixedProfile::new(weights)
}

/// Indifference inside each support and normalization of each factor.
fn system(ev: &Evaluator, support: &[Vec<usize>], x: &[f64]) -> Option<Vec<f64>> {
    let sigma = embed(&ev.sizes, support, x);
    let v = ev.values(&sigma).ok()?;
    let mut out = Vec::with_capacity(x.len());
    let mut at = 0;
    for (n, sup) in support.iter().enumerate() {
        let base = v[n][sup[0]];
        for &i in &sup[1..] {
            out.push(v[n][i] - base);
        }
        out.push(x[at..at + sup.len()].iter().sum::<f64>() - 1.0);
        at += sup.len();
    }
    out.iter().all(|f| f.is_finite()).then_some(out)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gauss-Newton with a central-difference Jacobian; the SVD gives the
/// minimum-norm step, so singular systems (continua of solutions) still
/// converge to some member.
pub(crate) fn newton(ev: &Evaluator, support: &[Vec<usize>], start: &[f64]) -> Option<Vec<f64>> {
    let m = start.len();
    let mut x = start.to_vec();
    let mut f = system(ev, support, &x)?;
    let mut fnorm = norm(&f);
    for _ in 0..NEWTON_ITERS {
        if fnorm <= NEWTON_TOL {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += FD_STEP;
            xm[j] -= FD_STEP;
            let fp = system(ev, support, &xp)?;
            let fm = system(ev, support, &xm)?;
            for i in 0..m {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * FD_STEP);
            }
        }
        let rhs = DVector::from_vec(f.iter().map(|v| -v).collect());
        let svd = jac.svd(true, true);
        let cutoff = svd.singular_values.max() * 1e-10;
        let step = svd.solve(&rhs, cutoff).ok()?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            if let Some(ft) = system(ev, support, &trial) {
                let n = norm(&ft);
                if n < fnorm {
                    x = trial;
                    f = ft;
                    fnorm = n;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (fnorm <= 1e-10).then_some(x)
}

/// Clips tiny negative weights and renormalizes; `None` when a weight is
/// clearly negative.
pub(crate) fn to_profile(
    sizes: &[usize],
    support: &[Vec<usize>],
    x: &[f64],
) -> Option<MixedProfile> {
    if x.iter().any(|&v| v < -NEGATIVE_SLACK) {
        return None;
    }
    let mut sigma = embed(sizes, support, x);
    for w in &mut sigma.weights {
        for v in w.iter_mut() {
            *v = v.max(0.0);
        }
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            return None;
        }
        for v in w.iter_mut() {
            *v /= total;
        }
    }
    Some(sigma)
}

/// Candidate equilibria from every support combination over the
/// [`representatives`]: the pure profile
/// for singleton supports, otherwise Newton solves of the indifference
/// system from the barycenter and two seeded random starts. The flag marks
/// the pure profile and the barycenter solve.
pub(crate) fn enumerate_supports(ev: &Evaluator, seed: u64) -> Vec<(MixedProfile, bool)> {
    let per_player: Vec<Vec<Vec<usize>>> = representatives(&ev.form)
        .iter()
        .map(|reps| {
            masks(reps.len())
                .into_iter()
                .map(|m| mask_members(m).into_iter().map(|i| reps[i]).collect())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_player.len()];
    let mut combo: u64 = 0;
    loop {
        let support: Vec<Vec<usize>> = idx
            .iter()
            .zip(&per_player)
            .map(|(&i, opts)| opts[i].clone())
            .collect();
        solve_support(
            ev,
            &support,
            seed ^ combo.wrapping_mul(0x9e37_79b9_7f4a_7c15),
            &mut out,
        );
        combo += 1;
        let mut p = 0;
        loop {
            if p == idx.len() {
                return out;
            }
            idx[p] += 1;
            if idx[p] < per_player[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

fn solve_support(
    ev: &Evaluator,
    support: &[Vec<usize>],
    seed: u64,
    out: &mut Vec<(MixedProfile, bool)>,
) {
    if support.iter().all(|s| s.len() == 1) {
        out.push((embed(&ev.sizes, support, &vec![1.0; support.len()]), true));
        return;
    }
    let bary: Vec<f64> = support
        .iter()
        .flat_map(|s| std::iter::repeat(1.0 / s.len() as f64).take(s.len()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![bary];
    for _ in 0..2 {
        let mut x = Vec::new();
        for s in support {
            let raw: Vec<f64> = (0..s.len())
                .map(|_| -rng.gen::<f64>().max(1e-12).ln())
                .collect();
            let total: f64 = raw.iter().sum();
            x.extend(raw.iter().map(|r| r / total));
        }
        starts.push(x);
    }
    for (i, start) in starts.into_iter().enumerate() {
        if let Some(x) = newton(ev, support, &start) {
            if let Some(sigma) = to_profile(&ev.sizes, support, &x) {
                out.push((sigma, i == 0));
            }
        }
    }
}

/// Re-solves the indifference system on the support of `sigma`, starting
/// from `sigma` itself.
pub(crate) fn polish(ev: &Evaluator, sigma: &MixedProfile, tol: f64) -> Option<MixedProfile> {
    let support: Vec<Vec<usize>> = (0..sigma.weights.len())
        .map(|n| sigma.support(n, tol))
        .collect();
    if support.iter().any(Vec::is_empty) {
        return None;
    }
    let x: Vec<f64> = support
        .iter()
        .enumerate()
        .flat_map(|(n, s)| s.iter().map(move |&i| sigma.weights[n][i]))
        .collect();
    let x = newton(ev, &support, &x)?;
    to_profile(&ev.sizes, &support, &x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_masks() {
        assert_eq!(combination_count(&[2, 3]), 21);
        let m = masks(3);
        assert_eq!(m.len(), 7);
        assert_eq!(m[0].count_ones(), 1);
        assert_eq!(m[6], 0b111);
    }
}
