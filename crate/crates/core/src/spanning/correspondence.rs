use std::collections::{BTreeSet, HashMap};

use super::complex::Complex;
use super::pair::TriangulatedPair;
use super::SpanError;

/// A piecewise-linear correspondence W → Y ⊂ Rᵐ given as a finite complex
/// F whose vertices carry a vertex of W's triangulation (the label) and a
/// point of Y (the value). The projection π sends each simplex of F onto
/// the W-simplex spanned by its labels, possibly of lower dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialCorrespondence {
    labels: Vec<usize>,
    values: Vec<Vec<f64>>,
    complex: Complex,
}

/// Bit pattern of a value, with −0 identified with +0.
pub(crate) type ValueKey = Vec<u64>;

pub(crate) fn value_key(y: &[f64]) -> ValueKey {
    y.iter()
        .map(|&v| if v == 0.0 { 0u64 } else { v.to_bits() })
        .collect()
}

impl SimplicialCorrespondence {
    /// Every listed vertex belongs to F, whether or not a simplex uses it.
    pub fn new(
        pair: &TriangulatedPair,
        labels: Vec<usize>,
        values: Vec<Vec<f64>>,
        simplices: &[Vec<usize>],
    ) -> Result<Self, SpanError> {
        if labels.len() != values.len() {
            return Err(SpanError::Invalid(format!(
                "{} labels for {} values",
                labels.len(),
                values.len()
            )));
        }
        if let Some(first) = values.first() {
            if let Some(y) = values.iter().find(|y| y.len() != first.len()) {
                return Err(SpanError::Invalid(format!(
                    "value {y:?} has a different length than {first:?}"
                )));
            }
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(SpanError::Invalid("non-finite value".into()));
        }
        for s in simplices {
            if let Some(&v) = s.iter().find(|&&v| v >= labels.len()) {
                return Err(SpanError::Invalid(format!(
                    "simplex {s:?} uses unknown vertex {v}"
                )));
            }
        }
        let all = simplices
            .iter()
            .cloned()
            .chain((0..labels.len()).map(|v| vec![v]));
        let f = Self {
            labels,
            values,
            complex: Complex::from_simplices(all),
        };
        f.check_against(pair)?;
        Ok(f)
    }

    /// Builds F from keyed vertices, merging vertices with equal label and
    /// value. Simplices whose vertices merge drop to lower dimension.
    pub(crate) fn from_keyed(
        pair: &TriangulatedPair,
        vertices: impl IntoIterator<Item = (usize, Vec<f64>)>,
        simplices: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, SpanError> {
        let mut ids: HashMap<(usize, ValueKey), usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut values = Vec::new();
        let mut remap = Vec::new();
        for (label, y) in vertices {
            let key = (label, value_key(&y));
            let id = *ids.entry(key).or_insert_with(|| {
                labels.push(label);
                values.push(y);
                labels.len() - 1
            });
            remap.push(id);
        }
        let simplices: Vec<Vec<usize>> = simplices
            .into_iter()
            .map(|s| s.iter().map(|&v| remap[v]).collect())
            .collect();
        Self::new(pair, labels, values, &simplices)
    }

    /// Labels must be vertices of W and every simplex must map onto a
    /// simplex of W.
    pub fn check_against(&self, pair: &TriangulatedPair) -> Result<(), SpanError> {
        let w = pair.complex();
        if let Some(&l) = self.labels.iter().find(|&&l| !w.contains(&[l])) {
            return Err(SpanError::Invalid(format!(
                "label {l} is not a vertex of W"
            )));
        }
        for s in self.complex.all() {
            let image = self.image(s);
            if !w.contains(&image) {
                return Err(SpanError::Invalid(format!(
                    "simplex {s:?} maps to {image:?}, which is not a simplex of W"
                )));
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    /// Dimension m of the value space, 0 when F is empty.
    pub fn value_dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// π of a simplex: its sorted, deduplicated labels.
    pub fn image(&self, simplex: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = simplex.iter().map(|&v| self.labels[v]).collect();
        set.into_iter().collect()
    }

    /// Whether a simplex lies in F|∂W = π⁻¹(∂W).
    pub fn over_boundary(&self, pair: &TriangulatedPair, simplex: &[usize]) -> bool {
        pair.boundary().contains(&self.image(simplex))
    }

    /// F vertices over the W vertex `w`.
    pub fn fiber(&self, w: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&v| self.labels[v] == w)
            .collect()
    }

    /// Simplices of W with no simplex of F mapped onto them: exactly the
    /// open cells of W over which F has empty fibers.
    pub fn uncovered(&self, pair: &TriangulatedPair) -> Vec<Vec<usize>> {
        let covered: BTreeSet<Vec<usize>> = self.complex.all().map(|s| self.image(s)).collect();
        pair.complex()
            .all()
            .filter(|s| !covered.contains(*s))
            .cloned()
            .collect()
    }

    /// Whether F(x) is a single point for every x in W.
    pub fn is_singleton_valued(&self, pair: &TriangulatedPair) -> bool {
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for s in self.complex.all() {
            let image = self.image(s);
            if image.len() != s.len() {
                return false;
            }
            *seen.entry(image).or_default() += 1;
        }
        seen.values().all(|&c| c == 1) && seen.len() == pair.complex().all().count()
    }

    /// The simplices of F mapping into a subcomplex of W, keyed by
    /// (label, value) so that different vertex numberings compare equal.
    pub(crate) fn keyed_preimage(&self, region: &Complex) -> BTreeSet<Vec<(usize, ValueKey)>> {
        self.complex
            .all()
            .filter(|s| region.contains(&self.image(s)))
            .map(|s| {
                let mut k: Vec<(usize, ValueKey)> = s
                    .iter()
                    .map(|&v| (self.labels[v], value_key(&self.values[v])))
                    .collect();
                k.sort();
                k
            })
            .collect()
    }

    /// π⁻¹ of a subcomplex of W, renumbered, as a correspondence over
    /// `onto`.
    pub(crate) fn preimage(
        &self,
        region: &Complex,
        onto: &TriangulatedPair,
    ) -> Result<Self, SpanError> {
        let keep: Vec<&Vec<usize>> = self
            .complex
            .all()
            .filter(|s| region.contains(&self.image(s)))
            .collect();
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut values = Vec::new();
        for s in keep.iter().filter(|s| s.len() == 1) {
            renumber.insert(s[0], labels.len());
            labels.push(self.labels[s[0]]);
            values.push(self.values[s[0]].clone());
        }
        let simplices: Vec<Vec<usize>> = keep
            .iter()
            .map(|s| s.iter().map(|v| renumber[v]).collect())
            .collect();
        Self::new(onto, labels, values, &simplices)
    }

    /// Applies `f` to every value, merging vertices that collide.
    pub fn map_values(
        &self,
        pair: &TriangulatedPair,
        f: impl Fn(usize, &[f64]) -> Vec<f64>,
    ) -> Result<Self, SpanError> {
        let vertices =
            (0..self.labels.len()).map(|v| (self.labels[v], f(self.labels[v], &self.values[v])));
        Self::from_keyed(pair, vertices, self.complex.all().cloned())
    }
}

/// F|W′: the part of F over the region covered by the given top simplices
/// of W. A region without top simplices is degenerate and rejected.
pub fn restrict_correspondence(
    f: &SimplicialCorrespondence,
    pair: &TriangulatedPair,
    region: &[Vec<usize>],
) -> Result<(TriangulatedPair, SimplicialCorrespondence), SpanError> {
    let d = pair.dimension();
    let mut top = Vec::new();
    for s in region {
        let mut sorted = s.clone();
        sorted.sort_unstable();
        if sorted.len() != d + 1 {
            return Err(SpanError::Degenerate(format!(
                "{sorted:?} is a {}-simplex; restriction needs {d}-simplices",
                sorted.len().saturating_sub(1)
            )));
        }
        let i = pair
            .complex()
            .find(&sorted)
            .ok_or_else(|| SpanError::Invalid(format!("{sorted:?} is not a simplex of W")))?;
        top.push(i);
    }
    if top.is_empty() {
        return Err(SpanError::Degenerate("empty region".into()));
    }
    let sub = pair.subpair(&top)?;
    let restricted = f.preimage(sub.complex(), &sub)?;
    Ok((sub, restricted))
}

/// F ∪ F′ over W ∪ W′, where F′ is singleton-valued and both agree over
/// W ∩ W′. Vertices with equal label and value are identified.
pub fn glue(
    pair: &TriangulatedPair,
    f: &SimplicialCorrespondence,
    pair2: &TriangulatedPair,
    g: &SimplicialCorrespondence,
) -> Result<(TriangulatedPair, SimplicialCorrespondence), SpanError> {
    if !g.is_singleton_valued(pair2) {
        return Err(SpanError::Invalid(
            "the second correspondence is not singleton-valued".into(),
        ));
    }
    let overlap =
        Complex::from_simplices(pair.complex().all().filter(|s| pair2.complex().contains(s)));
    if f.keyed_preimage(&overlap) != g.keyed_preimage(&overlap) {
        return Err(SpanError::Invalid(
            "the correspondences differ over W ∩ W′".into(),
        ));
    }
    let union = pair.union(pair2)?;
    let offset = f.labels.len();
    let vertices = (0..f.labels.len())
        .map(|v| (f.labels[v], f.values[v].clone()))
        .chain((0..g.labels.len()).map(|v| (g.labels[v], g.values[v].clone())));
    let simplices = f.complex.all().cloned().chain(
        g.complex
            .all()
            .map(|s| s.iter().map(|v| v + offset).collect()),
    );
    let glued = SimplicialCorrespondence::from_keyed(&union, vertices, simplices)?;
    Ok((union, glued))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize) -> (TriangulatedPair, SimplicialCorrespondence) {
        let pair = TriangulatedPair::interval(n);
        let labels: Vec<usize> = (0..=n).collect();
        let values = pair.coords().to_vec();
        let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, i + 1]).collect();
        let f = SimplicialCorrespondence::new(&pair, labels, values, &edges).unwrap();
        (pair, f)
    }

    #[test]
    fn projection_must_be_simplicial() {
        let pair = TriangulatedPair::interval(2);
        let bad = SimplicialCorrespondence::new(
            &pair,
            vec![0, 2],
            vec![vec![0.0], vec![1.0]],
            &[vec![0, 1]],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn identity_graph_basics() {
        let (pair, f) = identity(2);
        assert!(f.uncovered(&pair).is_empty());
        assert!(f.is_singleton_valued(&pair));
        assert!(f.over_boundary(&pair, &[0]));
        assert!(!f.over_boundary(&pair, &[1]));
        let (sub, g) = restrict_correspondence(&f, &pair, &[vec![0, 1]]).unwrap();
        assert_eq!(g.complex().count(1), 1);
        assert!(g.uncovered(&sub).is_empty());
    }

    #[test]
    fn restriction_to_a_vertex_is_rejected() {
        let (pair, f) = identity(2);
        assert!(matches!(
            restrict_correspondence(&f, &pair, &[vec![0]]),
            Err(SpanError::Degenerate(_))
        ));
    }

    #[test]
    fn glue_checks_agreement() {
        let (pair, f) = identity(4);
        let left = pair.subpair(&[0, 1]).unwrap();
        let right = pair.subpair(&[1, 2, 3]).unwrap();
        let fl = f.preimage(left.complex(), &left).unwrap();
        let fr = f.preimage(right.complex(), &right).unwrap();
        let (union, glued) = glue(&left, &fl, &right, &fr).unwrap();
        assert_eq!(union.top_simplices().len(), 4);
        assert_eq!(glued.complex().count(1), 4);
        assert_eq!(glued.complex().count(0), 5);
        let shifted = fr.map_values(&right, |_, y| vec![y[0] + 1.0]).unwrap();
        assert!(glue(&left, &fl, &right, &shifted).is_err());
    }
}
