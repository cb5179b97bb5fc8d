use serde::Serialize;

use super::StrategyError;
use crate::model::{GameBush, Owner, VertexId};

/// A pure strategy of one player: an action index for each of the player's
/// information sets, in the order of [`StrategySpace::info_sets`].
pub type PureStrategy = Vec<usize>;

/// The pure strategies S_n of one player, indexed in mixed radix with the
/// first information set most significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrategySpace {
    pub player: usize,
    /// global indices into `GameBush::info_sets`
    pub info_sets: Vec<usize>,
    pub radices: Vec<usize>,
    pub count: usize,
}

impl StrategySpace {
    pub fn decode(&self, mut index: usize) -> PureStrategy {
        let mut out = vec![0; self.radices.len()];
        for k in (0..self.radices.len()).rev() {
            out[k] = index % self.radices[k];
            index /= self.radices[k];
        }
        out
    }

    pub fn encode(&self, choice: &[usize]) -> usize {
        choice
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&a, &r)| acc * r + a)
    }

    /// Local position of a global information set index.
    pub fn local(&self, info_set: usize) -> Option<usize> {
        self.info_sets.iter().position(|&k| k == info_set)
    }

    /// Human-readable `W:action` list, or `-` for the empty strategy.
    pub fn label(&self, bush: &GameBush, index: usize) -> String {
        let choice = self.decode(index);
        if choice.is_empty() {
            return "-".into();
        }
        choice
            .iter()
            .zip(&self.info_sets)
            .map(|(&a, &k)| {
                let w = &bush.info_sets()[k];
                format!("{}:{}", w.id, w.actions[a])
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// What a terminal's path requires: its root, the product of chance
/// probabilities along it, and each player's choices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TerminalPath {
    pub terminal: VertexId,
    pub root: usize,
    pub nature: f64,
    /// per player: (local information set, action)
    pub choices: Vec<Vec<(usize, usize)>>,
}

/// Strategy spaces of all players and, for every terminal, the set of each
/// player's pure strategies consistent with its path.
#[derive(Clone, Debug, PartialEq)]
pub struct GameForm {
    pub spaces: Vec<StrategySpace>,
    pub paths: Vec<TerminalPath>,
    /// [player][terminal position] -> consistent strategy indices
    pub consistent: Vec<Vec<Vec<u32>>>,
    pub num_roots: usize,
}

pub fn enumerate_pure(
    bush: &GameBush,
    player: usize,
    cap: usize,
) -> Result<Vec<PureStrategy>, StrategyError> {
    let space = space_for(bush, player, cap)?;
    Ok((0..space.count).map(|i| space.decode(i)).collect())
}

fn space_for(bush: &GameBush, player: usize, cap: usize) -> Result<StrategySpace, StrategyError> {
    let info_sets = bush.player_info_sets(player);
    let radices: Vec<usize> = info_sets
        .iter()
        .map(|&k| bush.info_sets()[k].actions.len().max(1))
        .collect();
    let mut count: u128 = 1;
    for &r in &radices {
        count = count.saturating_mul(r as u128);
        if count > cap as u128 {
            let full = radices
                .iter()
                .fold(1u128, |a, &r| a.saturating_mul(r as u128));
            return Err(StrategyError::TooManyStrategies {
                player: bush.players()[player].clone(),
                count: full,
                cap,
            });
        }
    }
    Ok(StrategySpace {
        player,
        info_sets,
        radices,
        count: count as usize,
    })
}

/// Choices of `player` on the path strictly before `v`.
pub(crate) fn own_choices(
    bush: &GameBush,
    space: &StrategySpace,
    v: VertexId,
) -> Vec<(usize, usize)> {
    let path = bush.path_to(v);
    let mut out = Vec::new();
    for w in path.windows(2) {
        if let Some(Owner::Player { player, info_set }) = bush.owner(w[0]) {
            if player == space.player {
                let set = &bush.info_sets()[info_set];
                if let Some(a) = (0..set.actions.len()).find(|&a| set.child(w[0], a) == Some(w[1]))
                {
                    if let Some(local) = space.local(info_set) {
                        out.push((local, a));
                    }
                }
            }
        }
    }
    out
}

pub(crate) fn consistent_with(choice: &[usize], needs: &[(usize, usize)]) -> bool {
    needs.iter().all(|&(k, a)| choice[k] == a)
}

impl GameForm {
    pub fn build(bush: &GameBush, cap: usize) -> Result<Self, StrategyError> {
        let n = bush.num_players();
        let spaces = (0..n)
            .map(|p| space_for(bush, p, cap))
            .collect::<Result<Vec<_>, _>>()?;
        let mut paths = Vec::with_capacity(bush.terminals().len());
        for &t in bush.terminals() {
            let path = bush.path_to(t);
            let root = bush.root_position(path[0]).unwrap_or(0);
            let mut nature = 1.0;
            let mut choices = vec![Vec::new(); n];
            for w in path.windows(2) {
                match bush.owner(w[0]) {
                    Some(Owner::Nature(k)) => {
                        let nat = &bush.nature_nodes()[k];
                        nature *= nat
                            .outcomes
                            .iter()
                            .find(|(c, _)| *c == w[1])
                            .map_or(0.0, |(_, p)| p.value());
                    }
                    Some(Owner::Player { player, info_set }) => {
                        let set = &bush.info_sets()[info_set];
                        let a = (0..set.actions.len())
                            .find(|&a| set.child(w[0], a) == Some(w[1]))
                            .unwrap_or(0);
                        let local = spaces[player].local(info_set).unwrap_or(0);
                        choices[player].push((local, a));
                    }
                    _ => {}
                }
            }
            paths.push(TerminalPath {
                terminal: t,
                root,
                nature,
                choices,
            });
        }
        let mut consistent = vec![vec![Vec::new(); paths.len()]; n];
        for (p, space) in spaces.iter().enumerate() {
            for s in 0..space.count {
                let choice = space.decode(s);
                for (ti, path) in paths.iter().enumerate() {
                    if consistent_with(&choice, &path.choices[p]) {
                        consistent[p][ti].push(s as u32);
                    }
                }
            }
        }
        Ok(Self {
            spaces,
            paths,
            consistent,
            num_roots: bush.roots().len(),
        })
    }

    pub fn num_players(&self) -> usize {
        self.spaces.len()
    }

    /// |S_n| for every player.
    pub fn counts(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.count).collect()
    }

    /// ∏_n |S_n|, saturating.
    pub fn profile_count(&self) -> usize {
        self.spaces
            .iter()
            .fold(1usize, |a, s| a.saturating_mul(s.count))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_radix_roundtrip() {
        let s = StrategySpace {
            player: 0,
            info_sets: vec![0, 1, 2],
            radices: vec![2, 3, 2],
            count: 12,
        };
        for i in 0..12 {
            assert_eq!(s.encode(&s.decode(i)), i);
        }
        assert_eq!(s.decode(0), vec![0, 0, 0]);
        assert_eq!(s.decode(11), vec![1, 2, 1]);
    }
}
