//! Random piecewise-linear correspondences over subdivided intervals.

use rand::Rng;

use super::correspondence::SimplicialCorrespondence;
use super::pair::TriangulatedPair;

/// Builds F from a list of (label, value) points and index edges.
fn assemble(
    pair: &TriangulatedPair,
    points: Vec<(usize, Vec<f64>)>,
    edges: Vec<Vec<usize>>,
) -> SimplicialCorrespondence {
    SimplicialCorrespondence::from_keyed(pair, points, edges).expect("generated correspondence")
}

fn draw<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A walk over the vertex labels `lo..=hi`, starting at `lo` and stopping
/// on first arrival at `hi`. Steps go forward, back (a fold) or stay on the
/// same label (a vertical segment); every step lands on a fresh random
/// value. Returns the points and the consecutive edges.
fn walk<R: Rng>(
    rng: &mut R,
    lo: usize,
    hi: usize,
    m: usize,
    start: Vec<f64>,
    end: Option<Vec<f64>>,
) -> (Vec<(usize, Vec<f64>)>, Vec<Vec<usize>>) {
    let mut points = vec![(lo, start)];
    let mut edges = Vec::new();
    let mut at = lo;
    while at < hi {
        let r: f64 = rng.gen();
        let next = if r < 0.6 {
            at + 1
        } else if r < 0.8 && at > lo {
            at - 1
        } else {
            at
        };
        let y = match &end {
            Some(y) if next == hi => y.clone(),
            _ => draw(rng, m),
        };
        edges.push(vec![points.len() - 1, points.len()]);
        points.push((next, y));
        at = next;
    }
    (points, edges)
}

/// Appends segments that need not connect to anything: a fold-back piece,
/// a vertical piece or an isolated point.
fn distractors<R: Rng>(
    rng: &mut R,
    lo: usize,
    hi: usize,
    m: usize,
    count: usize,
    points: &mut Vec<(usize, Vec<f64>)>,
    edges: &mut Vec<Vec<usize>>,
) {
    for _ in 0..count {
        let a = rng.gen_range(lo..=hi);
        let b = match rng.gen_range(0..3) {
            0 if a < hi => a + 1,
            1 => a,
            _ => {
                points.push((a, draw(rng, m)));
                continue;
            }
        };
        points.push((a, draw(rng, m)));
        points.push((b, draw(rng, m)));
        edges.push(vec![points.len() - 2, points.len() - 1]);
    }
}

/// A spanning correspondence over `interval(n)`: a folded random walk from
/// 0 to n plus `noise` unconnected pieces. Values lie in [−1, 1]ᵐ.
pub fn random_spanning<R: Rng>(
    rng: &mut R,
    pair: &TriangulatedPair,
    m: usize,
    noise: usize,
) -> SimplicialCorrespondence {
    let n = pair.coords().len() - 1;
    let start = draw(rng, m);
    let (mut points, mut edges) = walk(rng, 0, n, m, start, None);
    distractors(rng, 0, n, m, noise, &mut points, &mut edges);
    assemble(pair, points, edges)
}

/// Like [`random_spanning`], but with values on the vertices of the
/// subdivided interval `x_pair`: consecutive points of the walk sit on equal
/// or adjacent vertices of X, so the result is a valid inner map for
/// composition.
pub fn random_spanning_into<R: Rng>(
    rng: &mut R,
    pair: &TriangulatedPair,
    x_pair: &TriangulatedPair,
) -> SimplicialCorrespondence {
    let n = pair.coords().len() - 1;
    let k = x_pair.coords().len() - 1;
    let mut x = rng.gen_range(0..=k);
    let mut points = vec![(0, x_pair.coords()[x].clone())];
    let mut edges = Vec::new();
    let mut at = 0usize;
    while at < n {
        let r: f64 = rng.gen();
        let next = if r < 0.6 {
            at + 1
        } else if r < 0.8 && at > 0 {
            at - 1
        } else {
            at
        };
        x = match rng.gen_range(0..3) {
            0 if x > 0 => x - 1,
            1 if x < k => x + 1,
            _ => x,
        };
        if next == at && points.last().map(|p| &p.1) == Some(&x_pair.coords()[x]) {
            // a vertical step must move in X to add anything
            continue;
        }
        edges.push(vec![points.len() - 1, points.len()]);
        points.push((next, x_pair.coords()[x].clone()));
        at = next;
    }
    assemble(pair, points, edges)
}

/// A correspondence with empty fibers over the open segments between
/// `gap_lo` and `gap_hi`: spanning pieces over [0, gap_lo] and
/// [gap_hi, n].
pub fn random_gapped<R: Rng>(
    rng: &mut R,
    pair: &TriangulatedPair,
    m: usize,
    gap_lo: usize,
    gap_hi: usize,
) -> SimplicialCorrespondence {
    let n = pair.coords().len() - 1;
    assert!(gap_lo < gap_hi && gap_hi <= n);
    let start = draw(rng, m);
    let (mut points, mut edges) = walk(rng, 0, gap_lo, m, start, None);
    let start = draw(rng, m);
    let (p2, e2) = walk(rng, gap_hi, n, m, start, None);
    let offset = points.len();
    points.extend(p2);
    edges.extend(
        e2.into_iter()
            .map(|e| e.iter().map(|v| v + offset).collect()),
    );
    assemble(pair, points, edges)
}

/// Two walks, over [0, j] and [j, n], whose ends over j do not meet: every
/// fiber is non-empty but [W] is not spanned.
pub fn random_broken<R: Rng>(
    rng: &mut R,
    pair: &TriangulatedPair,
    m: usize,
    j: usize,
) -> SimplicialCorrespondence {
    let n = pair.coords().len() - 1;
    assert!(0 < j && j < n);
    let start = draw(rng, m);
    let (mut points, mut edges) = walk(rng, 0, j, m, start, None);
    let mut start = draw(rng, m);
    while Some(&start) == points.last().map(|p| &p.1) {
        start = draw(rng, m);
    }
    let (p2, e2) = walk(rng, j, n, m, start, None);
    let offset = points.len();
    points.extend(p2);
    edges.extend(
        e2.into_iter()
            .map(|e| e.iter().map(|v| v + offset).collect()),
    );
    assemble(pair, points, edges)
}

/// The graph of a function given at the vertices of W.
pub fn graph(
    pair: &TriangulatedPair,
    values: impl Fn(usize) -> Vec<f64>,
) -> SimplicialCorrespondence {
    let verts: Vec<usize> = pair.complex().vertices().collect();
    let points = verts.iter().map(|&v| (v, values(v))).collect();
    let pos = |v: usize| verts.iter().position(|&u| u == v).expect("vertex");
    let simplices = pair
        .top_simplices()
        .iter()
        .map(|s| s.iter().map(|&v| pos(v)).collect())
        .collect();
    assemble(pair, points, simplices)
}

/// An instance for gluing on `interval(n)` with overlap [i, j]: F spans
/// W = [0, j] and agrees over [i, j] with the graph F′ of a random function
/// on W′ = [i, n]. Returns (W, F, W′, F′).
pub fn random_glue_instance<R: Rng>(
    rng: &mut R,
    n: usize,
    i: usize,
    j: usize,
    m: usize,
) -> (
    TriangulatedPair,
    SimplicialCorrespondence,
    TriangulatedPair,
    SimplicialCorrespondence,
) {
    assert!(i <= j && j <= n && j >= 1 && i < n);
    let full = TriangulatedPair::interval(n);
    let g: Vec<Vec<f64>> = (0..=n).map(|_| draw(rng, m)).collect();
    let w = full
        .subpair(&(0..j).collect::<Vec<_>>())
        .expect("left part");
    let w2 = full
        .subpair(&(i..n).collect::<Vec<_>>())
        .expect("right part");
    let start = if i == 0 { g[0].clone() } else { draw(rng, m) };
    let (mut points, mut edges) = walk(rng, 0, i, m, start, Some(g[i].clone()));
    for v in i + 1..=j {
        edges.push(vec![points.len() - 1, points.len()]);
        points.push((v, g[v].clone()));
    }
    let f = assemble(&w, points, edges);
    let f2 = graph(&w2, |v| g[v].clone());
    (w, f, w2, f2)
}
