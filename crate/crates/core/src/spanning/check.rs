use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::correspondence::SimplicialCorrespondence;
use super::gf2::{Method, System};
use super::pair::TriangulatedPair;
use super::SpanError;

/// Outcome of the spanning test. The decision is exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningVerdict {
    pub spans: bool,
    /// indices of d-simplices of F forming a relative cycle that projects
    /// to [W]
    pub witness: Option<Vec<usize>>,
    pub method: Method,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
}

impl SpanningVerdict {
    /// The witness as vertex lists of F.
    pub fn witness_simplices(&self, f: &SimplicialCorrespondence, d: usize) -> Vec<Vec<usize>> {
        self.witness
            .iter()
            .flatten()
            .map(|&i| f.complex().simplex(d, i).to_vec())
            .collect()
    }
}

/// Decides whether [W] lies in the image of H_d(F, F|∂W) → H_d(W, ∂W).
///
/// W has no simplices above dimension d and ∂W none in dimension d, so the
/// question is whether some d-chain z of F satisfies ∂z ⊂ F|∂W and
/// π_#z = [W] as chains. Simplices of F|∂W can be left out of z: they
/// project to zero and their faces lie in F|∂W. Simplices collapsed by π
/// contribute zero to π_#.
pub fn has_spanning(
    f: &SimplicialCorrespondence,
    pair: &TriangulatedPair,
) -> Result<SpanningVerdict, SpanError> {
    let system = spanning_system(f, pair)?;
    let sol = system.system.solve();
    Ok(verdict(&system, sol.method, sol.rank, sol.x))
}

/// [`has_spanning`] with an explicit elimination method.
pub fn has_spanning_with(
    f: &SimplicialCorrespondence,
    pair: &TriangulatedPair,
    method: Method,
) -> Result<SpanningVerdict, SpanError> {
    let system = spanning_system(f, pair)?;
    let sol = match method {
        Method::Dense => system.system.solve_dense(),
        Method::Sparse => system.system.solve_sparse(),
    };
    Ok(verdict(&system, sol.method, sol.rank, sol.x))
}

struct SpanningSystem {
    system: System,
    /// simplex index in F for each unknown
    columns: Vec<usize>,
}

fn verdict(
    s: &SpanningSystem,
    method: Method,
    rank: usize,
    x: Option<Vec<bool>>,
) -> SpanningVerdict {
    let witness = x.map(|x| {
        (0..x.len())
            .filter(|&j| x[j])
            .map(|j| s.columns[j])
            .collect::<Vec<usize>>()
    });
    SpanningVerdict {
        spans: witness.is_some(),
        witness,
        method,
        unknowns: s.system.unknowns,
        equations: s.system.rows.len(),
        rank,
    }
}

fn spanning_system(
    f: &SimplicialCorrespondence,
    pair: &TriangulatedPair,
) -> Result<SpanningSystem, SpanError> {
    f.check_against(pair)?;
    let d = pair.dimension();
    let fc = f.complex();
    let columns: Vec<usize> = (0..fc.count(d))
        .filter(|&i| !f.over_boundary(pair, fc.simplex(d, i)))
        .collect();
    let mut cycle_rows: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut image_rows: HashMap<usize, Vec<usize>> = HashMap::new();
    for (j, &i) in columns.iter().enumerate() {
        for face in fc.facets(d, i) {
            if !f.over_boundary(pair, fc.simplex(d - 1, face)) {
                cycle_rows.entry(face).or_default().push(j);
            }
        }
        let image = f.image(fc.simplex(d, i));
        if image.len() == d + 1 {
            let rho = pair.complex().find(&image).expect("checked simplicial");
            image_rows.entry(rho).or_default().push(j);
        }
    }
    let mut system = System::new(columns.len());
    let mut faces: Vec<_> = cycle_rows.into_iter().collect();
    faces.sort_unstable();
    for (_, terms) in faces {
        system.push(terms, false);
    }
    for rho in 0..pair.complex().count(d) {
        system.push(image_rows.remove(&rho).unwrap_or_default(), true);
    }
    Ok(SpanningSystem { system, columns })
}

/// Checks a claimed witness directly: its boundary must avoid every face
/// off F|∂W and its projection must hit each d-simplex of W an odd number
/// of times.
pub fn verify_witness(
    f: &SimplicialCorrespondence,
    pair: &TriangulatedPair,
    chain: &[usize],
) -> bool {
    let d = pair.dimension();
    let fc = f.complex();
    if chain.iter().any(|&i| i >= fc.count(d)) {
        return false;
    }
    let sys = fc.chain_system();
    let boundary_ok = sys
        .boundary(d, chain)
        .iter()
        .all(|&face| f.over_boundary(pair, fc.simplex(d - 1, face)));
    let mut hits = vec![false; pair.complex().count(d)];
    for &i in chain {
        let image = f.image(fc.simplex(d, i));
        if image.len() == d + 1 {
            hits[pair.complex().find(&image).expect("simplicial")] ^= true;
        }
    }
    boundary_ok && hits.iter().all(|&h| h)
}
