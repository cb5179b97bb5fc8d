use std::collections::BTreeSet;

use gamebush::spanning::generate::{
    graph, random_broken, random_gapped, random_glue_instance, random_spanning,
    random_spanning_into,
};
use gamebush::spanning::gf2::Method;
use gamebush::spanning::{
    compose_correspondences, glue, has_spanning, has_spanning_with, product,
    restrict_correspondence, scale_correspondence, span_instance_from_str, span_instance_to_string,
    sum_correspondences, verify_witness, SimplicialCorrespondence, TriangulatedPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exhaustive search over all d-chains of F: some chain must have its
/// boundary inside π⁻¹(∂W) and hit every top simplex of W an odd number of
/// times under π.
fn spans_by_enumeration(f: &SimplicialCorrespondence, pair: &TriangulatedPair) -> bool {
    let d = pair.dimension();
    let tops: Vec<Vec<usize>> = f.complex().simplices(d).to_vec();
    assert!(tops.len() <= 16, "oracle limited to small instances");
    let w_tops: BTreeSet<Vec<usize>> = pair.top_simplices().iter().cloned().collect();
    let on_boundary = |s: &[usize]| {
        let image: BTreeSet<usize> = s.iter().map(|&v| f.labels()[v]).collect();
        let image: Vec<usize> = image.into_iter().collect();
        pair.boundary().contains(&image)
    };
    (0u32..1 << tops.len()).any(|mask| {
        let chosen: Vec<&Vec<usize>> = (0..tops.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &tops[i])
            .collect();
        // boundary with mod-2 multiplicities
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in &chosen {
            for drop in 0..s.len() {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop)
                    .map(|(_, &v)| v)
                    .collect();
                if !faces.remove(&face) {
                    faces.insert(face);
                }
            }
        }
        if faces.iter().any(|face| !on_boundary(face)) {
            return false;
        }
        let mut hits: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in &chosen {
            let image: BTreeSet<usize> = s.iter().map(|&v| f.labels()[v]).collect();
            if image.len() == d + 1 {
                let image: Vec<usize> = image.into_iter().collect();
                if !hits.remove(&image) {
                    hits.insert(image);
                }
            }
        }
        hits == w_tops
    })
}

fn check(f: &SimplicialCorrespondence, pair: &TriangulatedPair) -> bool {
    let v = has_spanning(f, pair).unwrap();
    if let Some(w) = &v.witness {
        assert!(verify_witness(f, pair, w), "witness fails its own check");
    }
    v.spans
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn identity_graph_spans() {
    let pair = TriangulatedPair::interval(1);
    let f = graph(&pair, |v| pair.coords()[v].clone());
    let v = has_spanning(&f, &pair).unwrap();
    assert!(v.spans);
    assert_eq!(v.witness_simplices(&f, 1), vec![vec![0, 1]]);
}

#[test]
fn graph_over_half_does_not_span() {
    let pair = TriangulatedPair::interval(2);
    let left = pair.subpair(&[0]).unwrap();
    let f = graph(&left, |v| vec![v as f64]);
    assert!(!check(&f, &pair));
}

#[test]
fn union_of_two_constants_spans() {
    let pair = TriangulatedPair::interval(1);
    let f = SimplicialCorrespondence::new(
        &pair,
        vec![0, 1, 0, 1],
        vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]],
        &[vec![0, 1], vec![2, 3]],
    )
    .unwrap();
    let v = has_spanning(&f, &pair).unwrap();
    assert!(v.spans);
    // either constant alone is a witness
    assert!(verify_witness(&f, &pair, &[0]));
    assert!(verify_witness(&f, &pair, &[1]));
    assert!(!verify_witness(&f, &pair, &[0, 1]));
}

#[test]
fn circle_spans_only_when_closed_up() {
    let pair = TriangulatedPair::circle(4);
    let f = graph(&pair, |v| vec![v as f64]);
    assert!(check(&f, &pair));
    // a lift that does not close: the values over vertex 0 differ at the
    // two ends of the path
    let lift = SimplicialCorrespondence::new(
        &pair,
        vec![0, 1, 2, 3, 0],
        (0..5).map(|i| vec![i as f64]).collect(),
        &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]],
    )
    .unwrap();
    assert!(!check(&lift, &pair));
}

#[test]
fn agrees_with_exhaustive_oracle() {
    let mut r = rng(11);
    let mut seen = [0usize; 2];
    for case in 0..300 {
        let n = r.gen_range(1..=4);
        let pair = TriangulatedPair::interval(n);
        let f = match case % 4 {
            0 => {
                let noise = r.gen_range(0..3);
                random_spanning(&mut r, &pair, 1, noise)
            }
            1 if n >= 2 => {
                let j = r.gen_range(1..n);
                random_broken(&mut r, &pair, 1, j)
            }
            2 if n >= 2 => {
                let lo = r.gen_range(0..n - 1);
                let hi = r.gen_range(lo + 1..=n);
                random_gapped(&mut r, &pair, 1, lo, hi)
            }
            _ => random_soup(&mut r, &pair),
        };
        if f.complex().count(1) > 16 {
            continue;
        }
        let expected = spans_by_enumeration(&f, &pair);
        assert_eq!(check(&f, &pair), expected, "case {case}");
        seen[expected as usize] += 1;
    }
    assert!(seen[0] > 20 && seen[1] > 20, "{seen:?}");
}

/// Random segments and points with coarse values, so that pieces meet.
fn random_soup(r: &mut ChaCha8Rng, pair: &TriangulatedPair) -> SimplicialCorrespondence {
    let n = pair.coords().len() - 1;
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for w in 0..=n {
        for y in 0..r.gen_range(0..3) {
            labels.push(w);
            values.push(vec![y as f64]);
        }
    }
    let mut edges = Vec::new();
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            if labels[b] <= labels[a] + 1 && r.gen_bool(0.35) {
                edges.push(vec![a, b]);
            }
        }
    }
    SimplicialCorrespondence::new(pair, labels, values, &edges).unwrap()
}

#[test]
fn dense_and_sparse_decide_alike() {
    let mut r = rng(5);
    for _ in 0..40 {
        let pair = TriangulatedPair::interval(r.gen_range(2..30));
        let f = if r.gen_bool(0.5) {
            random_spanning(&mut r, &pair, 2, 5)
        } else {
            random_broken(&mut r, &pair, 2, 1)
        };
        let a = has_spanning_with(&f, &pair, Method::Dense).unwrap();
        let b = has_spanning_with(&f, &pair, Method::Sparse).unwrap();
        assert_eq!(a.spans, b.spans);
        assert_eq!(a.rank, b.rank);
        for w in [a.witness, b.witness].iter().flatten() {
            assert!(verify_witness(&f, &pair, w));
        }
    }
}

#[test]
fn large_instance_uses_sparse_elimination() {
    let mut r = rng(9);
    let pair = TriangulatedPair::interval(2_000);
    let f = random_spanning(&mut r, &pair, 1, 200);
    let v = has_spanning(&f, &pair).unwrap();
    assert!(v.unknowns > 5_000);
    assert_eq!(v.method, Method::Sparse);
    assert!(v.spans);
    assert!(verify_witness(&f, &pair, v.witness.as_ref().unwrap()));
}

#[test]
fn boundary_squared_vanishes_on_generated_complexes() {
    let mut r = rng(3);
    for _ in 0..20 {
        let pair = TriangulatedPair::interval(6);
        let a = random_spanning(&mut r, &pair, 1, 3);
        let b = random_spanning(&mut r, &pair, 1, 3);
        let p = product(&pair, &a, &b).unwrap();
        assert!(p.complex().chain_system().boundary_squared_vanishes());
    }
    for pair in [TriangulatedPair::square(3), TriangulatedPair::torus(4)] {
        assert!(pair.complex().chain_system().boundary_squared_vanishes());
    }
}

#[test]
fn square_fundamental_class_is_a_relative_cycle() {
    let pair = TriangulatedPair::square(2);
    let fc = pair.fundamental_class().unwrap();
    assert_eq!(fc.chain.len(), 8);
    // Independent oracle: count the triangles on each edge directly.
    let mut count = std::collections::BTreeMap::<Vec<usize>, usize>::new();
    for t in pair.top_simplices() {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            *count.entry(vec![t[a], t[b]]).or_default() += 1;
        }
    }
    for (edge, c) in count {
        let (p, q) = (&pair.coords()[edge[0]], &pair.coords()[edge[1]]);
        let on_rim = (0..2).any(|k| p[k] == q[k] && (p[k] == 0.0 || p[k] == 1.0));
        assert_eq!(c % 2 == 1, on_rim, "edge {edge:?}");
        assert_eq!(pair.boundary().contains(&edge), on_rim);
    }
}

#[test]
fn io_round_trip_keeps_the_verdict() {
    let mut r = rng(21);
    for _ in 0..10 {
        let pair = TriangulatedPair::interval(5);
        let f = random_spanning(&mut r, &pair, 2, 4);
        let (p2, f2) = span_instance_from_str(&span_instance_to_string(&pair, &f)).unwrap();
        assert_eq!(f2, f);
        assert_eq!(check(&f2, &p2), check(&f, &pair));
    }
}

#[test]
fn restriction_examples() {
    let pair = TriangulatedPair::interval(2);
    let id = graph(&pair, |v| pair.coords()[v].clone());
    let (left, f) = restrict_correspondence(&id, &pair, &[vec![0, 1]]).unwrap();
    assert!(check(&f, &left));
    let mut r = rng(4);
    let pair = TriangulatedPair::interval(6);
    let gapped = random_gapped(&mut r, &pair, 1, 2, 4);
    assert!(!check(&gapped, &pair));
    let (side, f) = restrict_correspondence(&gapped, &pair, &[vec![0, 1], vec![1, 2]]).unwrap();
    assert!(check(&f, &side));
}

#[test]
fn composition_of_graphs_is_pointwise() {
    // f(w) = vertex (w + 1) mod 3 of X, g(x) = x²
    let w = TriangulatedPair::interval(2);
    let x = TriangulatedPair::interval(2);
    let phi = graph(&w, |v| x.coords()[(v + 1) % 3].clone());
    // the segment from vertex 2 back to vertex 0 would cross X
    assert!(compose_correspondences(&w, &phi, &x, &graph(&x, |v| vec![v as f64])).is_err());
    let phi = graph(&w, |v| x.coords()[2 - v].clone());
    let psi = graph(&x, |v| vec![x.coords()[v][0].powi(2)]);
    let c = compose_correspondences(&w, &phi, &x, &psi).unwrap();
    let expected = graph(&w, |v| vec![(x.coords()[2 - v][0]).powi(2)]);
    assert_eq!(c, expected);
}

// Preservation properties on seeded random instances. Each suite runs at
// least 20 instances; any counterexample fails the build.

const SUITE: u64 = 25;

#[test]
fn spanning_implies_full_domain() {
    let mut r = rng(100);
    let mut spanning = 0;
    for _ in 0..4 * SUITE {
        let pair = TriangulatedPair::interval(r.gen_range(2..10));
        let f = if r.gen_bool(0.5) {
            random_spanning(&mut r, &pair, 1, 3)
        } else {
            random_soup(&mut r, &pair)
        };
        if check(&f, &pair) {
            spanning += 1;
            assert!(f.uncovered(&pair).is_empty());
            for w in pair.interior_vertices() {
                assert!(!f.fiber(w).is_empty());
            }
        }
    }
    assert!(spanning as u64 >= SUITE);
}

#[test]
fn restriction_preserves_spanning() {
    let mut r = rng(200);
    for _ in 0..SUITE {
        let n = r.gen_range(2..12);
        let pair = TriangulatedPair::interval(n);
        let f = random_spanning(&mut r, &pair, 2, 4);
        assert!(check(&f, &pair));
        let a = r.gen_range(0..n);
        let b = r.gen_range(a + 1..=n);
        let region: Vec<Vec<usize>> = (a..b).map(|i| vec![i, i + 1]).collect();
        let (sub, g) = restrict_correspondence(&f, &pair, &region).unwrap();
        assert!(check(&g, &sub), "restriction to [{a}, {b}] of {n}");
    }
}

#[test]
fn gluing_a_singleton_valued_piece_preserves_spanning() {
    let mut r = rng(300);
    for _ in 0..SUITE {
        let n = r.gen_range(2..12);
        let i = r.gen_range(0..n);
        let j = r.gen_range(i.max(1)..=n);
        let (w, f, w2, f2) = random_glue_instance(&mut r, n, i, j, 2);
        assert!(check(&f, &w));
        let (union, glued) = glue(&w, &f, &w2, &f2).unwrap();
        assert_eq!(union.top_simplices().len(), n);
        assert!(check(&glued, &union), "n = {n}, overlap [{i}, {j}]");
    }
}

#[test]
fn sums_preserve_spanning() {
    let mut r = rng(400);
    for _ in 0..SUITE {
        let pair = TriangulatedPair::interval(r.gen_range(1..8));
        let fs: Vec<_> = (0..r.gen_range(2..4))
            .map(|_| random_spanning(&mut r, &pair, 2, 2))
            .collect();
        let s = sum_correspondences(&pair, &fs).unwrap();
        assert!(check(&s, &pair));
    }
}

#[test]
fn products_preserve_spanning() {
    let mut r = rng(500);
    for _ in 0..SUITE {
        let pair = TriangulatedPair::interval(r.gen_range(1..8));
        let a = random_spanning(&mut r, &pair, 1, 2);
        let b = random_spanning(&mut r, &pair, 2, 2);
        let p = product(&pair, &a, &b).unwrap();
        assert_eq!(p.value_dim(), 3);
        assert!(check(&p, &pair));
    }
}

#[test]
fn compositions_preserve_spanning() {
    let mut r = rng(600);
    for _ in 0..SUITE {
        let w = TriangulatedPair::interval(r.gen_range(1..7));
        let x = TriangulatedPair::interval(r.gen_range(1..6));
        let phi = random_spanning_into(&mut r, &w, &x);
        let psi = random_spanning(&mut r, &x, 1, 2);
        assert!(check(&phi, &w) && check(&psi, &x));
        let c = compose_correspondences(&w, &phi, &x, &psi).unwrap();
        assert!(check(&c, &w));
    }
}

#[test]
fn scaled_compositions_preserve_spanning() {
    let mut r = rng(700);
    for _ in 0..SUITE {
        let w = TriangulatedPair::interval(r.gen_range(1..7));
        let x = TriangulatedPair::interval(r.gen_range(1..6));
        let phi = random_spanning_into(&mut r, &w, &x);
        let psi = random_spanning(&mut r, &x, 1, 2);
        let c = compose_correspondences(&w, &phi, &x, &psi).unwrap();
        let lambda: Vec<f64> = (0..w.coords().len())
            .map(|_| r.gen_range(-2.0..2.0))
            .collect();
        let scaled = scale_correspondence(&w, &lambda, &c).unwrap();
        assert!(check(&scaled, &w));
    }
}

#[test]
fn operations_reject_two_dimensional_regions() {
    let pair = TriangulatedPair::square(1);
    let f = graph(&pair, |v| vec![v as f64]);
    assert!(product(&pair, &f, &f).is_err());
    assert!(sum_correspondences(&pair, &[f.clone(), f]).is_err());
}
