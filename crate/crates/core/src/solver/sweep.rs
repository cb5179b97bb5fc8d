use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{verify_myopic, MyopicCertificate};
use super::myopic::{solve_myopic, Diagnostics, Equilibrium};
use super::{SolverConfig, SolverError};
use crate::model::GameBundle;
use crate::strategies::{MixedProfile, Plan, Selector};

/// Number of points of the mesh-1/k grid on a simplex with `dim` vertices:
/// C(k + dim − 1, dim − 1), saturating.
fn grid_size(dim: usize, k: usize) -> usize {
    let mut out: u128 = 1;
    for i in 1..dim {
        out = out * (k + i) as u128 / i as u128;
        if out > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    out as usize
}

/// All points of Δ with coordinates in {0, 1/k, …, 1}, in lexicographic
/// order of their integer numerators (first coordinate slowest, largest
/// first).
pub fn barycentric_grid(dim: usize, k: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.iter().map(|&c| c as f64 / k as f64).collect());
            prefix.pop();
            return;
        }
        for c in (0..=left).rev() {
            prefix.push(c);
            rec(dim, left - c, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, k, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEquilibrium {
    pub sigma: MixedProfile,
    pub plan: Plan,
    /// r^n = max_s f^n_φ(s)
    pub payoffs: Vec<f64>,
    pub residual: f64,
    pub selector: Selector,
}

impl From<Equilibrium> for SweepEquilibrium {
    fn from(e: Equilibrium) -> Self {
        Self {
            payoffs: e.certificate.best_values(),
            residual: e.certificate.residual,
            sigma: e.sigma,
            plan: e.plan,
            selector: e.selector,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub q: Vec<f64>,
    pub equilibria: Vec<SweepEquilibrium>,
    pub diagnostics: Diagnostics,
}

/// Sampled graph of the equilibrium correspondence over Δ(R).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub mesh: usize,
    pub tol: f64,
    pub players: Vec<String>,
    pub points: Vec<SweepPoint>,
}

/// [`solve_myopic`] at every point of the mesh-1/k grid on Δ(R), in
/// parallel; rows keep grid order.
pub fn sweep(bundle: &GameBundle, config: &SolverConfig) -> Result<SweepTable, SolverError> {
    config.check()?;
    let dim = bundle.bush().roots().len();
    let points = grid_size(dim, config.mesh);
    if points > config.grid_cap {
        return Err(SolverError::GridTooLarge {
            points,
            cap: config.grid_cap,
        });
    }
    let grid = barycentric_grid(dim, config.mesh);
    let rows: Result<Vec<SweepPoint>, SolverError> = grid
        .into_par_iter()
        .map(|q| {
            let report = solve_myopic(bundle, &q, config)?;
            let equilibria = report
                .equilibria
                .into_iter()
                .map(SweepEquilibrium::from)
                .collect();
            Ok(SweepPoint {
                q,
                equilibria,
                diagnostics: report.diagnostics,
            })
        })
        .collect();
    Ok(SweepTable {
        mesh: config.mesh,
        tol: config.tol,
        players: bundle.bush().players().to_vec(),
        points: rows?,
    })
}

impl SweepTable {
    /// Columns q_0 … q_{k−1}, player, equilibrium, payoff, residual.
    pub fn to_csv(&self) -> String {
        let k = self.points.first().map_or(0, |p| p.q.len());
        let mut out = String::new();
        for i in 0..k {
            let _ = write!(out, "q_{i},");
        }
        out.push_str("player,equilibrium,payoff,residual\n");
        for point in &self.points {
            for (e, eq) in point.equilibria.iter().enumerate() {
                for (n, r) in eq.payoffs.iter().enumerate() {
                    for x in &point.q {
                        let _ = write!(out, "{x:.16e},");
                    }
                    let _ = writeln!(
                        out,
                        "{},{e},{r:.16e},{:.16e}",
                        self.players.get(n).map_or("?", String::as_str),
                        eq.residual
                    );
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep tables serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, SolverError> {
        serde_json::from_str(text).map_err(|e| SolverError::Config(format!("bad sweep table: {e}")))
    }

    /// Re-runs [`verify_myopic`] on every stored row. Only meaningful for
    /// tables of unregularized solves.
    pub fn reverify(&self, bundle: &GameBundle) -> Result<Vec<MyopicCertificate>, SolverError> {
        let mut out = Vec::new();
        for point in &self.points {
            for eq in &point.equilibria {
                let cert = verify_myopic(bundle, &eq.plan, self.tol)?;
                if !cert.valid {
                    return Err(SolverError::InvalidPlan(format!(
                        "row at q = {:?} has residual {:.3e}",
                        point.q, cert.residual
                    )));
                }
                out.push(cert);
            }
        }
        Ok(out)
    }
}
