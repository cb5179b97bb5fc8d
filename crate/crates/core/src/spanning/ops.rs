//! Operations on correspondences over one-dimensional regions.
//!
//! Products and compositions are fiber products of 1-skeleta. Over a pair
//! of segments lying over the same edge the result contains the diagonal
//! segment joining their matching endpoints; over a shared vertex it
//! contains the edges of the product cell structure. Higher cells are
//! omitted: every relative 1-cycle of the full product is homologous to
//! one in this skeleton, so the spanning verdict is unchanged.

use std::collections::HashMap;

use super::correspondence::SimplicialCorrespondence;
use super::pair::TriangulatedPair;
use super::SpanError;

/// Matching tolerance between Φ's values and the vertices of X.
const VERTEX_TOL: f64 = 1e-12;

fn require_d1(pair: &TriangulatedPair) -> Result<(), SpanError> {
    if pair.dimension() != 1 {
        return Err(SpanError::Dimension {
            operation: "this operation",
            dimension: pair.dimension(),
        });
    }
    Ok(())
}

/// Vertex pairs (u, v) with `ka[u] == kb[v]` and the edges between them.
fn fiber_product(
    a: &SimplicialCorrespondence,
    ka: &[usize],
    b: &SimplicialCorrespondence,
    kb: &[usize],
) -> (Vec<(usize, usize)>, Vec<[usize; 2]>) {
    let mut b_by_key: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..kb.len() {
        b_by_key.entry(kb[v]).or_default().push(v);
    }
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertices = Vec::new();
    for u in 0..ka.len() {
        for &v in b_by_key.get(&ka[u]).into_iter().flatten() {
            ids.insert((u, v), vertices.len());
            vertices.push((u, v));
        }
    }
    // oriented b-edges by the keys of their endpoints
    let mut b_edges: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for e in b.complex().simplices(1) {
        let (v, w) = (e[0], e[1]);
        b_edges.entry((kb[v], kb[w])).or_default().push((v, w));
        b_edges.entry((kb[w], kb[v])).or_default().push((w, v));
    }
    let mut edges = Vec::new();
    for e in a.complex().simplices(1) {
        let (u, w) = (e[0], e[1]);
        for &(v, x) in b_edges.get(&(ka[u], ka[w])).into_iter().flatten() {
            edges.push([ids[&(u, v)], ids[&(w, x)]]);
        }
        if ka[u] == ka[w] {
            for &v in b_by_key.get(&ka[u]).into_iter().flatten() {
                edges.push([ids[&(u, v)], ids[&(w, v)]]);
            }
        }
    }
    for e in b.complex().simplices(1) {
        let (v, x) = (e[0], e[1]);
        if kb[v] != kb[x] {
            continue;
        }
        for u in (0..ka.len()).filter(|&u| ka[u] == kb[v]) {
            edges.push([ids[&(u, v)], ids[&(u, x)]]);
        }
    }
    (vertices, edges)
}

/// x ↦ F₁(x) × F₂(x), values concatenated.
pub fn product(
    pair: &TriangulatedPair,
    f1: &SimplicialCorrespondence,
    f2: &SimplicialCorrespondence,
) -> Result<SimplicialCorrespondence, SpanError> {
    require_d1(pair)?;
    let (vertices, edges) = fiber_product(f1, f1.labels(), f2, f2.labels());
    let keyed = vertices.iter().map(|&(u, v)| {
        let mut y = f1.values()[u].clone();
        y.extend_from_slice(&f2.values()[v]);
        (f1.labels()[u], y)
    });
    SimplicialCorrespondence::from_keyed(pair, keyed, edges.iter().map(|e| e.to_vec()))
}

/// x ↦ {y₁ + ⋯ + y_l : yᵢ ∈ Fᵢ(x)}: the product followed by the
/// coordinate-sum map.
pub fn sum_correspondences(
    pair: &TriangulatedPair,
    fs: &[SimplicialCorrespondence],
) -> Result<SimplicialCorrespondence, SpanError> {
    require_d1(pair)?;
    let (first, rest) = fs
        .split_first()
        .ok_or_else(|| SpanError::Invalid("nothing to sum".into()))?;
    let mut acc = first.clone();
    for f in rest {
        let m = acc.value_dim();
        if f.value_dim() != m {
            return Err(SpanError::Invalid(format!(
                "summands have value dimensions {m} and {}",
                f.value_dim()
            )));
        }
        let prod = product(pair, &acc, f)?;
        acc = prod.map_values(pair, |_, y| (0..m).map(|i| y[i] + y[m + i]).collect())?;
    }
    Ok(acc)
}

/// x ↦ λ(x)·F(x) with λ given at the vertices of W and applied per vertex
/// of F.
pub fn scale_correspondence(
    pair: &TriangulatedPair,
    lambda: &[f64],
    f: &SimplicialCorrespondence,
) -> Result<SimplicialCorrespondence, SpanError> {
    require_d1(pair)?;
    if lambda.len() != pair.coords().len() {
        return Err(SpanError::Invalid(format!(
            "{} scale values for {} vertices",
            lambda.len(),
            pair.coords().len()
        )));
    }
    f.map_values(pair, |w, y| y.iter().map(|v| lambda[w] * v).collect())
}

/// Ψ∘Φ: w ↦ {y : y ∈ Ψ(x) for some x ∈ Φ(w)}. Φ's values must be vertices
/// of X and each segment of Φ must run along a simplex of X.
pub fn compose_correspondences(
    w_pair: &TriangulatedPair,
    phi: &SimplicialCorrespondence,
    x_pair: &TriangulatedPair,
    psi: &SimplicialCorrespondence,
) -> Result<SimplicialCorrespondence, SpanError> {
    require_d1(w_pair)?;
    require_d1(x_pair)?;
    let xs: Vec<usize> = x_pair.complex().vertices().collect();
    let key: Vec<usize> = phi
        .values()
        .iter()
        .map(|y| {
            xs.iter()
                .copied()
                .find(|&x| {
                    let c = &x_pair.coords()[x];
                    c.len() == y.len() && c.iter().zip(y).all(|(a, b)| (a - b).abs() <= VERTEX_TOL)
                })
                .ok_or_else(|| {
                    SpanError::Invalid(format!("value {y:?} is not a vertex of X; refine first"))
                })
        })
        .collect::<Result<_, _>>()?;
    for e in phi.complex().simplices(1) {
        let mut image = vec![key[e[0]], key[e[1]]];
        image.sort_unstable();
        image.dedup();
        if !x_pair.complex().contains(&image) {
            return Err(SpanError::Invalid(format!(
                "segment {e:?} crosses X between vertices {image:?}; refine first"
            )));
        }
    }
    let (vertices, edges) = fiber_product(phi, &key, psi, psi.labels());
    let keyed = vertices
        .iter()
        .map(|&(u, v)| (phi.labels()[u], psi.values()[v].clone()));
    SimplicialCorrespondence::from_keyed(w_pair, keyed, edges.iter().map(|e| e.to_vec()))
}
