use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::complex::Complex;
use super::gf2::rank_of_columns;
use super::SpanError;

/// The manifold a triangulated region lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ambient {
    Interval,
    Circle,
    Square,
    Torus,
}

impl Ambient {
    pub fn dimension(self) -> usize {
        match self {
            Ambient::Interval | Ambient::Circle => 1,
            Ambient::Square | Ambient::Torus => 2,
        }
    }
}

/// A triangulated compact region W of dimension d ∈ {1, 2} together with
/// its boundary ∂W: the subcomplex spanned by the (d−1)-simplices that are
/// faces of exactly one d-simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangulatedPair {
    ambient: Ambient,
    coords: Vec<Vec<f64>>,
    complex: Complex,
    boundary: Complex,
}

/// The all-ones relative d-cycle and the rank data that certify it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalClass {
    /// indices of every d-simplex of W
    pub chain: Vec<usize>,
    /// dim H_d(W, ∂W; Z₂)
    pub relative_rank: usize,
    /// classes of d-simplices joined through interior (d−1)-faces
    pub pieces: usize,
}

impl TriangulatedPair {
    /// Builds a pair from the top-dimensional simplices, indexing into
    /// `coords`.
    pub fn new(
        ambient: Ambient,
        coords: Vec<Vec<f64>>,
        top: &[Vec<usize>],
    ) -> Result<Self, SpanError> {
        let d = ambient.dimension();
        for s in top {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != d + 1 {
                return Err(SpanError::Invalid(format!(
                    "simplex {s:?} is not a {d}-simplex"
                )));
            }
            if let Some(&v) = sorted.iter().find(|&&v| v >= coords.len()) {
                return Err(SpanError::Invalid(format!("vertex {v} has no coordinates")));
            }
        }
        if top.is_empty() {
            return Err(SpanError::Invalid(
                "a pair needs at least one top simplex".into(),
            ));
        }
        let complex = Complex::from_simplices(top);
        let mut cofaces = vec![0usize; complex.count(d - 1)];
        for i in 0..complex.count(d) {
            for f in complex.facets(d, i) {
                cofaces[f] += 1;
            }
        }
        if let Some(f) = cofaces.iter().position(|&c| c > 2) {
            return Err(SpanError::Invalid(format!(
                "face {:?} lies on {} top simplices",
                complex.simplex(d - 1, f),
                cofaces[f]
            )));
        }
        let boundary = Complex::from_simplices(
            (0..cofaces.len())
                .filter(|&f| cofaces[f] == 1)
                .map(|f| complex.simplex(d - 1, f).to_vec()),
        );
        Ok(Self {
            ambient,
            coords,
            complex,
            boundary,
        })
    }

    /// [0, 1] cut into `n` equal segments.
    pub fn interval(n: usize) -> Self {
        assert!(n >= 1);
        let coords = (0..=n).map(|i| vec![i as f64 / n as f64]).collect();
        let top: Vec<Vec<usize>> = (0..n).map(|i| vec![i, i + 1]).collect();
        Self::new(Ambient::Interval, coords, &top).expect("interval")
    }

    /// The unit circle as an `n`-gon, `n ≥ 3`.
    pub fn circle(n: usize) -> Self {
        assert!(n >= 3);
        let coords = (0..n)
            .map(|i| {
                let a = TAU * i as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let top: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        Self::new(Ambient::Circle, coords, &top).expect("circle")
    }

    /// The unit square on a k×k grid, each cell split along its diagonal
    /// into two triangles.
    pub fn square(k: usize) -> Self {
        assert!(k >= 1);
        let at = |i: usize, j: usize| i * (k + 1) + j;
        let coords = (0..=k)
            .flat_map(|i| (0..=k).map(move |j| vec![i as f64 / k as f64, j as f64 / k as f64]))
            .collect();
        let mut top = Vec::new();
        for i in 0..k {
            for j in 0..k {
                top.push(vec![at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                top.push(vec![at(i, j), at(i, j + 1), at(i + 1, j + 1)]);
            }
        }
        Self::new(Ambient::Square, coords, &top).expect("square")
    }

    /// The flat torus on a k×k grid with wrap-around, `k ≥ 3`.
    pub fn torus(k: usize) -> Self {
        assert!(k >= 3);
        let at = |i: usize, j: usize| (i % k) * k + j % k;
        let coords = (0..k)
            .flat_map(|i| (0..k).map(move |j| vec![i as f64 / k as f64, j as f64 / k as f64]))
            .collect();
        let mut top = Vec::new();
        for i in 0..k {
            for j in 0..k {
                top.push(vec![at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                top.push(vec![at(i, j), at(i, j + 1), at(i + 1, j + 1)]);
            }
        }
        Self::new(Ambient::Torus, coords, &top).expect("torus")
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn dimension(&self) -> usize {
        self.ambient.dimension()
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn boundary(&self) -> &Complex {
        &self.boundary
    }

    pub fn top_simplices(&self) -> &[Vec<usize>] {
        self.complex.simplices(self.dimension())
    }

    /// Vertices of W off ∂W.
    pub fn interior_vertices(&self) -> Vec<usize> {
        self.complex
            .vertices()
            .filter(|&v| !self.boundary.contains(&[v]))
            .collect()
    }

    /// The region covered by a subset of the top simplices, in the same
    /// ambient manifold and vertex numbering.
    pub fn subpair(&self, top: &[usize]) -> Result<Self, SpanError> {
        let d = self.dimension();
        let simplices: Vec<Vec<usize>> = top
            .iter()
            .map(|&i| {
                self.complex
                    .simplices(d)
                    .get(i)
                    .cloned()
                    .ok_or_else(|| SpanError::Invalid(format!("no top simplex {i}")))
            })
            .collect::<Result<_, _>>()?;
        Self::new(self.ambient, self.coords.clone(), &simplices)
    }

    /// W ∪ W′ for two regions sharing the vertex numbering.
    pub fn union(&self, other: &Self) -> Result<Self, SpanError> {
        if self.ambient != other.ambient || self.coords != other.coords {
            return Err(SpanError::Invalid(
                "regions live in different triangulations".into(),
            ));
        }
        let mut top = self.top_simplices().to_vec();
        top.extend(other.top_simplices().iter().cloned());
        Self::new(self.ambient, self.coords.clone(), &top)
    }

    /// The fundamental class [W]: the sum of all d-simplices. Fails unless
    /// its boundary lies in ∂W and each piece of W carries exactly one
    /// nonzero relative class.
    pub fn fundamental_class(&self) -> Result<FundamentalClass, SpanError> {
        let d = self.dimension();
        let sys = self.complex.chain_system();
        let chain: Vec<usize> = (0..self.complex.count(d)).collect();
        for f in sys.boundary(d, &chain) {
            if !self.boundary.contains(self.complex.simplex(d - 1, f)) {
                return Err(SpanError::Invalid(format!(
                    "boundary of [W] meets the interior face {:?}",
                    self.complex.simplex(d - 1, f)
                )));
            }
        }
        // Relative boundary matrix: rows are the interior (d−1)-faces.
        let interior: HashMap<usize, usize> = (0..self.complex.count(d - 1))
            .filter(|&f| !self.boundary.contains(self.complex.simplex(d - 1, f)))
            .enumerate()
            .map(|(row, f)| (f, row))
            .collect();
        let columns: Vec<Vec<usize>> = sys.boundaries[d - 1]
            .iter()
            .map(|faces| {
                faces
                    .iter()
                    .filter_map(|f| interior.get(f).copied())
                    .collect()
            })
            .collect();
        let relative_rank = chain.len() - rank_of_columns(interior.len(), &columns);
        let pieces = self.pieces(&interior);
        if relative_rank != pieces {
            return Err(SpanError::Invalid(format!(
                "H_{d}(W, ∂W) has rank {relative_rank} for {pieces} pieces"
            )));
        }
        Ok(FundamentalClass {
            chain,
            relative_rank,
            pieces,
        })
    }

    fn pieces(&self, interior: &HashMap<usize, usize>) -> usize {
        let d = self.dimension();
        let n = self.complex.count(d);
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut first: HashMap<usize, usize> = HashMap::new();
        for i in 0..n {
            for f in self.complex.facets(d, i) {
                if !interior.contains_key(&f) {
                    continue;
                }
                match first.get(&f) {
                    Some(&j) => {
                        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                        parent[a] = b;
                    }
                    None => {
                        first.insert(f, i);
                    }
                }
            }
        }
        (0..n).filter(|&i| root(&mut parent, i) == i).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let i = TriangulatedPair::interval(2);
        assert_eq!(i.boundary().simplices(0), &[vec![0], vec![2]]);
        assert_eq!(i.interior_vertices(), vec![1]);
        let c = TriangulatedPair::circle(3);
        assert_eq!(c.boundary().dim(), None);
        let s = TriangulatedPair::square(2);
        assert_eq!(s.top_simplices().len(), 8);
        assert_eq!(s.boundary().count(1), 8);
        let t = TriangulatedPair::torus(3);
        assert_eq!(t.top_simplices().len(), 18);
        assert_eq!(t.boundary().dim(), None);
    }

    #[test]
    fn fundamental_classes() {
        for pair in [
            TriangulatedPair::interval(2),
            TriangulatedPair::circle(3),
            TriangulatedPair::square(2),
            TriangulatedPair::torus(3),
        ] {
            let fc = pair.fundamental_class().unwrap();
            assert_eq!(fc.relative_rank, 1);
            assert_eq!(fc.chain.len(), pair.top_simplices().len());
        }
    }

    #[test]
    fn disconnected_region_has_one_class_per_piece() {
        let pair = TriangulatedPair::interval(4).subpair(&[0, 3]).unwrap();
        let fc = pair.fundamental_class().unwrap();
        assert_eq!((fc.relative_rank, fc.pieces), (2, 2));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TriangulatedPair::new(Ambient::Interval, vec![vec![0.0]], &[vec![0, 1]]).is_err());
        assert!(TriangulatedPair::new(Ambient::Interval, vec![vec![0.0]; 2], &[vec![0]]).is_err());
        // three segments on one vertex
        let coords = vec![vec![0.0]; 4];
        let top = vec![vec![0, 1], vec![0, 2], vec![0, 3]];
        assert!(TriangulatedPair::new(Ambient::Interval, coords, &top).is_err());
    }
}
