use std::collections::HashSet;

use super::sets::{enumerate_subgame_sets, SubgameSet, DEFAULT_FAMILY_CAP};
use super::SubgameError;
use crate::model::{GameBush, Owner, VertexId};

fn owner_player(bush: &GameBush, v: VertexId) -> Option<usize> {
    match bush.owner(v) {
        Some(Owner::Player { player, .. }) => Some(player),
        _ => None,
    }
}

/// Whether the factor G|_cur / prev never asks a player to move twice: no
/// path through cur ∖ prev meets two nodes of the same player.
pub fn factor_moves_once(bush: &GameBush, prev: &[VertexId], cur: &[VertexId]) -> bool {
    let in_prev = |v: VertexId| prev.binary_search(&v).is_ok();
    let in_region = |v: VertexId| cur.binary_search(&v).is_ok() && !in_prev(v);
    for &v in cur {
        if in_prev(v) {
            continue;
        }
        let Some(p) = owner_player(bush, v) else {
            continue;
        };
        let mut stack: Vec<VertexId> = bush.children(v).to_vec();
        while let Some(u) = stack.pop() {
            if !in_region(u) {
                continue;
            }
            if owner_player(bush, u) == Some(p) {
                return false;
            }
            stack.extend_from_slice(bush.children(u));
        }
    }
    true
}

/// A chain ∅ = S_0 ⊂ … ⊂ S_k = V of subgame sets whose successive factors
/// never call a player twice, found innermost first with backtracking over
/// the lattice. `Ok(None)` when no chain exists.
pub fn is_solvable(bush: &GameBush) -> Result<Option<Vec<SubgameSet>>, SubgameError> {
    let lattice = enumerate_subgame_sets(bush, DEFAULT_FAMILY_CAP)?;
    let sets = &lattice.sets;
    let top = sets.len() - 1;
    let empty = 0;
    let mut failed: HashSet<usize> = HashSet::new();
    let mut chain = vec![empty];
    if search(bush, sets, top, &mut chain, &mut failed) {
        Ok(Some(chain.into_iter().map(|i| sets[i].clone()).collect()))
    } else {
        Ok(None)
    }
}

fn search(
    bush: &GameBush,
    sets: &[SubgameSet],
    top: usize,
    chain: &mut Vec<usize>,
    failed: &mut HashSet<usize>,
) -> bool {
    let cur = *chain.last().expect("chain starts with the empty set");
    if cur == top {
        return true;
    }
    for (j, cand) in sets.iter().enumerate() {
        if j == cur || failed.contains(&j) || cand.len() <= sets[cur].len() {
            continue;
        }
        if !sets[cur].is_subset_of(cand) {
            continue;
        }
        let adds_decision = cand
            .vertices
            .iter()
            .any(|&v| !sets[cur].contains(v) && !bush.is_terminal(v));
        if !adds_decision && j != top {
            continue;
        }
        if !factor_moves_once(bush, &sets[cur].vertices, &cand.vertices) {
            continue;
        }
        chain.push(j);
        if search(bush, sets, top, chain, failed) {
            return true;
        }
        chain.pop();
        failed.insert(j);
    }
    false
}

/// Drops intermediate members of a chain while the merged factor still
/// never calls a player twice.
pub fn coarsen_chain(bush: &GameBush, chain: &[SubgameSet]) -> Vec<SubgameSet> {
    let mut out: Vec<SubgameSet> = chain.to_vec();
    let mut i = 1;
    while i + 1 < out.len() {
        if factor_moves_once(bush, &out[i - 1].vertices, &out[i + 1].vertices) {
            out.remove(i);
        } else {
            i += 1;
        }
    }
    out
}
