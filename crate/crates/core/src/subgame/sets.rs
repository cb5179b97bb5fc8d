use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::SubgameError;
use crate::model::{GameBush, Owner, VertexId};

/// Default cap on the number of subgame sets enumerated.
pub const DEFAULT_FAMILY_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgameCheck {
    pub ok: bool,
    pub violations: Vec<String>,
}

fn to_bits(bush: &GameBush, s: &[VertexId]) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(bush.num_vertices());
    for v in s {
        bits.insert(v.0);
    }
    bits
}

fn from_bits(bits: &FixedBitSet) -> Vec<VertexId> {
    bits.ones().map(VertexId).collect()
}

/// Closure under arrows and saturation with respect to every information
/// set and every terminal partition block.
pub fn is_subgame_set(bush: &GameBush, s: &[VertexId]) -> SubgameCheck {
    let bits = to_bits(bush, s);
    let mut violations = Vec::new();
    for &(a, b) in bush.arrows() {
        if bits.contains(a.0) && !bits.contains(b.0) {
            violations.push(format!(
                "arrow {} -> {} leaves the set",
                bush.name(a),
                bush.name(b)
            ));
        }
    }
    let mut check_block = |what: String, block: &mut dyn Iterator<Item = VertexId>| {
        let members: Vec<VertexId> = block.collect();
        let inside = members.iter().filter(|v| bits.contains(v.0)).count();
        if inside != 0 && inside != members.len() {
            violations.push(format!("{what} is split by the set"));
        }
    };
    for w in bush.info_sets() {
        check_block(
            format!("information set `{}` of {}", w.id, bush.players()[w.player]),
            &mut w.nodes(),
        );
    }
    for p in 0..bush.num_players() {
        for block in bush.terminal_partition(p) {
            let names: Vec<&str> = block.iter().map(|&v| bush.name(v)).collect();
            check_block(
                format!("terminal block {:?} of {}", names, bush.players()[p]),
                &mut block.iter().copied(),
            );
        }
    }
    SubgameCheck {
        ok: violations.is_empty(),
        violations,
    }
}

struct Saturation {
    /// vertex -> groups it belongs to
    groups_of: Vec<Vec<usize>>,
    groups: Vec<Vec<VertexId>>,
}

impl Saturation {
    fn new(bush: &GameBush) -> Self {
        let mut groups: Vec<Vec<VertexId>> = bush
            .info_sets()
            .iter()
            .map(|w| w.nodes().collect())
            .collect();
        for p in 0..bush.num_players() {
            groups.extend(bush.terminal_partition(p).iter().cloned());
        }
        let mut groups_of = vec![Vec::new(); bush.num_vertices()];
        for (g, members) in groups.iter().enumerate() {
            for v in members {
                groups_of[v.0].push(g);
            }
        }
        Self { groups_of, groups }
    }

    fn close(&self, bush: &GameBush, seed: &FixedBitSet) -> FixedBitSet {
        let mut bits = seed.clone();
        let mut stack: Vec<usize> = bits.ones().collect();
        while let Some(v) = stack.pop() {
            for c in bush.children(VertexId(v)) {
                if !bits.put(c.0) {
                    stack.push(c.0);
                }
            }
            for &g in &self.groups_of[v] {
                for u in &self.groups[g] {
                    if !bits.put(u.0) {
                        stack.push(u.0);
                    }
                }
            }
        }
        bits
    }
}

/// The smallest subgame set containing `seed`.
pub fn closure(bush: &GameBush, seed: &[VertexId]) -> Vec<VertexId> {
    let sat = Saturation::new(bush);
    from_bits(&sat.close(bush, &to_bits(bush, seed)))
}

/// A subgame set with its induced roots and partitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgameSet {
    pub vertices: Vec<VertexId>,
    /// R': members that are roots or whose predecessor lies outside
    pub roots: Vec<VertexId>,
    pub terminals: Vec<VertexId>,
    /// R'_n per player
    pub root_partitions: Vec<Vec<Vec<VertexId>>>,
    /// Q'_n per player
    pub terminal_partitions: Vec<Vec<Vec<VertexId>>>,
    /// the set contains terminals only
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum RootKey {
    InfoSet(usize),
    RootBlock(usize),
}

impl SubgameSet {
    pub fn new(bush: &GameBush, vertices: &[VertexId]) -> Result<Self, SubgameError> {
        let check = is_subgame_set(bush, vertices);
        if !check.ok {
            return Err(SubgameError::NotSubgameSet(check.violations));
        }
        Ok(Self::build_unchecked(bush, vertices))
    }

    pub(crate) fn build_unchecked(bush: &GameBush, vertices: &[VertexId]) -> Self {
        let mut vertices = vertices.to_vec();
        vertices.sort();
        vertices.dedup();
        let bits = to_bits(bush, &vertices);
        let roots: Vec<VertexId> = vertices
            .iter()
            .copied()
            .filter(|&v| bush.parent(v).map_or(true, |p| !bits.contains(p.0)))
            .collect();
        let terminals: Vec<VertexId> = vertices
            .iter()
            .copied()
            .filter(|&v| bush.is_terminal(v))
            .collect();
        let n = bush.num_players();
        let mut root_partitions = Vec::with_capacity(n);
        for p in 0..n {
            let mut order: Vec<RootKey> = Vec::new();
            let mut groups: HashMap<RootKey, Vec<VertexId>> = HashMap::new();
            for &u in &roots {
                let path = bush.path_to(u);
                let last = path[..path.len() - 1]
                    .iter()
                    .rev()
                    .find_map(|&x| match bush.owner(x) {
                        Some(Owner::Player { player, info_set }) if player == p => Some(info_set),
                        _ => None,
                    });
                let key = match last {
                    Some(k) => RootKey::InfoSet(k),
                    None => {
                        let r = path[0];
                        let b = bush
                            .root_partition(p)
                            .iter()
                            .position(|blk| blk.contains(&r))
                            .unwrap_or(usize::MAX);
                        RootKey::RootBlock(b)
                    }
                };
                groups
                    .entry(key)
                    .or_insert_with(|| {
                        order.push(key);
                        Vec::new()
                    })
                    .push(u);
            }
            root_partitions.push(order.iter().map(|k| groups[k].clone()).collect());
        }
        let terminal_partitions = (0..n)
            .map(|p| {
                bush.terminal_partition(p)
                    .iter()
                    .filter(|blk| blk.iter().all(|v| bits.contains(v.0)))
                    .cloned()
                    .collect()
            })
            .collect();
        let degenerate = vertices.iter().all(|&v| bush.is_terminal(v));
        Self {
            vertices,
            roots,
            terminals,
            root_partitions,
            terminal_partitions,
            degenerate,
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn names(&self, bush: &GameBush) -> Vec<String> {
        self.vertices
            .iter()
            .map(|&v| bush.name(v).to_string())
            .collect()
    }

    pub fn is_subset_of(&self, other: &SubgameSet) -> bool {
        self.vertices.iter().all(|&v| other.contains(v))
    }
}

/// The family of subgame sets as unions of atom closures, with its Hasse
/// diagram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgameLattice {
    /// ordered by size, then by vertex list
    pub sets: Vec<SubgameSet>,
    /// (smaller, larger) covering pairs
    pub edges: Vec<(usize, usize)>,
    /// indices of the distinct atom closures closure({v})
    pub atoms: Vec<usize>,
}

/// Serializable summary of one subgame set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgameReport {
    pub vertices: Vec<String>,
    pub roots: Vec<String>,
    pub degenerate: bool,
}

impl SubgameLattice {
    pub fn reports(&self, bush: &GameBush) -> Vec<SubgameReport> {
        self.sets
            .iter()
            .map(|s| SubgameReport {
                vertices: s.names(bush),
                roots: s.roots.iter().map(|&v| bush.name(v).to_string()).collect(),
                degenerate: s.degenerate,
            })
            .collect()
    }

    pub fn find(&self, vertices: &[VertexId]) -> Option<usize> {
        let mut v = vertices.to_vec();
        v.sort();
        v.dedup();
        self.sets.iter().position(|s| s.vertices == v)
    }
}

fn union_family(
    bush: &GameBush,
    atoms: &[FixedBitSet],
    cap: usize,
) -> Result<Vec<FixedBitSet>, SubgameError> {
    let empty = FixedBitSet::with_capacity(bush.num_vertices());
    let mut seen: HashSet<FixedBitSet> = HashSet::from([empty.clone()]);
    let mut family = vec![empty];
    let mut frontier = 0;
    while frontier < family.len() {
        let base = family[frontier].clone();
        frontier += 1;
        for a in atoms {
            if a.is_subset(&base) {
                continue;
            }
            let mut u = base.clone();
            u.union_with(a);
            if seen.insert(u.clone()) {
                if family.len() >= cap {
                    return Err(SubgameError::TooMany { cap });
                }
                family.push(u);
            }
        }
    }
    Ok(family)
}

fn atom_bits(bush: &GameBush, decision_only: bool) -> Vec<FixedBitSet> {
    let sat = Saturation::new(bush);
    let mut out: Vec<FixedBitSet> = Vec::new();
    for v in bush.vertices() {
        if decision_only && bush.is_terminal(v) {
            continue;
        }
        let mut seed = FixedBitSet::with_capacity(bush.num_vertices());
        seed.insert(v.0);
        let c = sat.close(bush, &seed);
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn sort_family(family: &mut [FixedBitSet]) {
    family.sort_by(|a, b| {
        a.count_ones(..)
            .cmp(&b.count_ones(..))
            .then_with(|| a.ones().cmp(b.ones()))
    });
}

/// Every distinct union of atom closures, including ∅ and V, with
/// degenerate members (terminals only) flagged.
pub fn enumerate_subgame_sets(bush: &GameBush, cap: usize) -> Result<SubgameLattice, SubgameError> {
    let atoms = atom_bits(bush, false);
    let mut family = union_family(bush, &atoms, cap)?;
    sort_family(&mut family);
    let index: HashMap<&FixedBitSet, usize> =
        family.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut edges = Vec::new();
    for (i, base) in family.iter().enumerate() {
        let mut cands: Vec<usize> = Vec::new();
        for a in &atoms {
            if a.is_subset(base) {
                continue;
            }
            let mut u = base.clone();
            u.union_with(a);
            let j = index[&u];
            if !cands.contains(&j) {
                cands.push(j);
            }
        }
        for &j in &cands {
            let minimal = cands
                .iter()
                .all(|&k| k == j || !(family[k].is_subset(&family[j])));
            if minimal {
                edges.push((i, j));
            }
        }
    }
    edges.sort();
    let atom_idx: Vec<usize> = {
        let mut v: Vec<usize> = atoms.iter().map(|a| index[a]).collect();
        v.sort();
        v.dedup();
        v
    };
    let sets = family
        .iter()
        .map(|b| SubgameSet::build_unchecked(bush, &from_bits(b)))
        .collect();
    Ok(SubgameLattice {
        sets,
        edges,
        atoms: atom_idx,
    })
}

/// Non-empty unions of closures of decision nodes, excluding the union of
/// all of them. These are the sets an S-perfectness check has to visit:
/// degenerate sets impose nothing, and adding unreachable-by-choice
/// terminals to a set does not change its constraint.
pub fn relevant_subgame_sets(bush: &GameBush, cap: usize) -> Result<Vec<SubgameSet>, SubgameError> {
    let atoms = atom_bits(bush, true);
    let mut family = union_family(bush, &atoms, cap)?;
    sort_family(&mut family);
    let mut top = FixedBitSet::with_capacity(bush.num_vertices());
    for a in &atoms {
        top.union_with(a);
    }
    Ok(family
        .iter()
        .filter(|b| b.count_ones(..) > 0 && **b != top)
        .map(|b| SubgameSet::build_unchecked(bush, &from_bits(b)))
        .collect())
}
