//! Abstract simplicial complexes and their mod-2 boundary matrices.

use std::collections::{BTreeSet, HashMap};

/// A finite abstract simplicial complex, closed under faces. Simplices are
/// sorted vertex lists, stored per dimension in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Complex {
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl Complex {
    /// The closure under faces of the given simplices. Repeated vertices
    /// within one simplex are collapsed.
    pub fn from_simplices<I, S>(simplices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for s in simplices {
            let mut verts = s.as_ref().to_vec();
            verts.sort_unstable();
            verts.dedup();
            if verts.is_empty() {
                continue;
            }
            add_with_faces(&mut by_dim, verts);
        }
        let simplices: Vec<Vec<Vec<usize>>> = by_dim
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let index = simplices
            .iter()
            .map(|list| {
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();
        Self { simplices, index }
    }

    /// Highest dimension present, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices[k][i]
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.simplices(0).iter().map(|s| s[0])
    }

    /// Index of a sorted simplex.
    pub fn find(&self, simplex: &[usize]) -> Option<usize> {
        let k = simplex.len().checked_sub(1)?;
        self.index.get(k)?.get(simplex).copied()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.find(simplex).is_some()
    }

    /// All simplices of every dimension.
    pub fn all(&self) -> impl Iterator<Item = &Vec<usize>> + '_ {
        self.simplices.iter().flatten()
    }

    /// Indices of the codimension-one faces of simplex `i` of dimension
    /// `k ≥ 1`.
    pub fn facets(&self, k: usize, i: usize) -> Vec<usize> {
        let s = &self.simplices[k][i];
        (0..s.len())
            .map(|drop| {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop)
                    .map(|(_, &v)| v)
                    .collect();
                self.index[k - 1][&face]
            })
            .collect()
    }

    /// Whether every simplex is a face of some simplex of dimension `d`.
    pub fn is_pure(&self, d: usize) -> bool {
        if self.dim() != Some(d) {
            return false;
        }
        let mut covered: BTreeSet<&Vec<usize>> = BTreeSet::new();
        let top = Complex::from_simplices(self.simplices(d));
        for s in top.all() {
            covered.insert(s);
        }
        self.all().all(|s| covered.contains(s))
    }

    /// Number of connected components of the 1-skeleton.
    pub fn components(&self) -> usize {
        let verts: Vec<usize> = self.vertices().collect();
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.simplices(1) {
            let a = root(&mut parent, pos[&e[0]]);
            let b = root(&mut parent, pos[&e[1]]);
            parent[a] = b;
        }
        (0..verts.len())
            .filter(|&i| root(&mut parent, i) == i)
            .count()
    }

    /// The mod-2 boundary matrices of the complex.
    pub fn chain_system(&self) -> ChainSystem {
        let top = self.dim().unwrap_or(0);
        let boundaries = (1..=top)
            .map(|k| (0..self.count(k)).map(|i| self.facets(k, i)).collect())
            .collect();
        ChainSystem {
            sizes: (0..=top).map(|k| self.count(k)).collect(),
            boundaries,
        }
    }
}

fn add_with_faces(by_dim: &mut Vec<BTreeSet<Vec<usize>>>, s: Vec<usize>) {
    let k = s.len() - 1;
    if by_dim.len() <= k {
        by_dim.resize_with(k + 1, BTreeSet::new);
    }
    if by_dim[k].contains(&s) {
        return;
    }
    if k > 0 {
        for drop in 0..s.len() {
            let face: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != drop)
                .map(|(_, &v)| v)
                .collect();
            add_with_faces(by_dim, face);
        }
    }
    by_dim[k].insert(s);
}

/// Boundary matrices over Z₂ in sparse column form:
/// `boundaries[k − 1][j]` lists the (k−1)-faces of the k-simplex `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSystem {
    pub sizes: Vec<usize>,
    pub boundaries: Vec<Vec<Vec<usize>>>,
}

impl ChainSystem {
    /// Boundary of a k-chain given as a set of k-simplex indices.
    pub fn boundary(&self, k: usize, chain: &[usize]) -> Vec<usize> {
        if k == 0 || chain.is_empty() {
            return Vec::new();
        }
        let mut parity = vec![false; self.sizes[k - 1]];
        for &j in chain {
            for &f in &self.boundaries[k - 1][j] {
                parity[f] ^= true;
            }
        }
        (0..parity.len()).filter(|&i| parity[i]).collect()
    }

    /// Whether ∂∘∂ vanishes on every simplex.
    pub fn boundary_squared_vanishes(&self) -> bool {
        (2..self.sizes.len()).all(|k| {
            (0..self.sizes[k]).all(|j| {
                let once = self.boundary(k, &[j]);
                self.boundary(k - 1, &once).is_empty()
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_a_triangle() {
        let c = Complex::from_simplices([[2, 0, 1]]);
        assert_eq!(c.dim(), Some(2));
        assert_eq!((c.count(0), c.count(1), c.count(2)), (3, 3, 1));
        assert_eq!(c.simplices(1), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(c.find(&[0, 2]), Some(1));
        assert!(c.chain_system().boundary_squared_vanishes());
        assert_eq!(c.chain_system().boundary(2, &[0]), vec![0, 1, 2]);
    }

    #[test]
    fn purity_and_components() {
        let c = Complex::from_simplices(vec![vec![0, 1], vec![1, 2], vec![5]]);
        assert!(!c.is_pure(1));
        assert_eq!(c.components(), 2);
        let c = Complex::from_simplices(vec![vec![0, 1], vec![1, 2]]);
        assert!(c.is_pure(1));
    }

    #[test]
    fn tetrahedron_boundary_squared() {
        let c = Complex::from_simplices([[0, 1, 2, 3]]);
        let sys = c.chain_system();
        assert!(sys.boundary_squared_vanishes());
        // the boundary of the boundary of the whole 3-simplex is empty
        let faces = sys.boundary(3, &[0]);
        assert_eq!(faces.len(), 4);
        assert!(sys.boundary(2, &faces).is_empty());
    }
}
