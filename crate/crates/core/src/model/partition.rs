use serde::Serialize;

use super::bush::{GameBush, VertexId};

/// The meet of the players' terminal partitions: the finest partition of the
/// terminals in which every block of every player is contained in one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeetPartition {
    blocks: Vec<Vec<VertexId>>,
    /// terminal position -> block
    index: Vec<usize>,
    terminals: Vec<VertexId>,
}

impl MeetPartition {
    /// Blocks are the connected components of the overlap graph of all the
    /// given blocks, listed by their smallest member.
    pub fn from_partitions<'a>(
        universe: &[VertexId],
        partitions: impl IntoIterator<Item = &'a [Vec<VertexId>]>,
    ) -> Self {
        let pos = |v: VertexId| universe.binary_search(&v).ok();
        let mut uf = UnionFind::new(universe.len());
        for part in partitions {
            for block in part {
                let mut it = block.iter().filter_map(|&v| pos(v));
                if let Some(first) = it.next() {
                    for other in it {
                        uf.union(first, other);
                    }
                }
            }
        }
        let mut blocks: Vec<Vec<VertexId>> = Vec::new();
        let mut rep_to_block = vec![usize::MAX; universe.len()];
        let mut index = vec![0; universe.len()];
        for (i, &v) in universe.iter().enumerate() {
            let rep = uf.find(i);
            if rep_to_block[rep] == usize::MAX {
                rep_to_block[rep] = blocks.len();
                blocks.push(Vec::new());
            }
            let b = rep_to_block[rep];
            blocks[b].push(v);
            index[i] = b;
        }
        Self {
            blocks,
            index,
            terminals: universe.to_vec(),
        }
    }

    pub fn of_bush(bush: &GameBush) -> Self {
        Self::from_partitions(
            bush.terminals(),
            (0..bush.num_players()).map(|p| bush.terminal_partition(p)),
        )
    }

    pub fn blocks(&self) -> &[Vec<VertexId>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block containing terminal `t`.
    pub fn block_of(&self, t: VertexId) -> Option<usize> {
        self.terminals.binary_search(&t).ok().map(|i| self.index[i])
    }

    /// Block index for the terminal at position `i` in the terminal list.
    pub fn block_at(&self, i: usize) -> usize {
        self.index[i]
    }

    /// Finds the block equal (as a set) to `class`.
    pub fn find(&self, class: &[VertexId]) -> Option<usize> {
        let mut c = class.to_vec();
        c.sort();
        c.dedup();
        let b = self.block_of(*c.first()?)?;
        (self.blocks[b] == c).then_some(b)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    #[test]
    fn overlap_chain_collapses() {
        let t = ids(&[1, 2, 3]);
        let q1 = vec![ids(&[1, 2]), ids(&[3])];
        let q2 = vec![ids(&[1]), ids(&[2, 3])];
        let m = MeetPartition::from_partitions(&t, [q1.as_slice(), q2.as_slice()]);
        assert_eq!(m.blocks(), &[ids(&[1, 2, 3])]);
    }

    #[test]
    fn discrete_stays_discrete() {
        let t = ids(&[0, 4, 7]);
        let d: Vec<Vec<VertexId>> = t.iter().map(|&v| vec![v]).collect();
        let m = MeetPartition::from_partitions(&t, [d.as_slice(), d.as_slice()]);
        assert_eq!(m.len(), 3);
        assert_eq!(m.block_of(VertexId(7)), Some(2));
        assert_eq!(m.find(&ids(&[4])), Some(1));
        assert_eq!(m.find(&ids(&[4, 7])), None);
    }
}
