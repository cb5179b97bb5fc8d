use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::scalar::Probability;
use super::ModelError;
use crate::strategies::{GameForm, StrategyError, DEFAULT_STRATEGY_CAP};

/// Index of a vertex inside a [`GameBush`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A chance node with its outcome distribution, listed in arrow order.
#[derive(Clone, Debug, PartialEq)]
pub struct NatureNode {
    pub vertex: VertexId,
    pub outcomes: Vec<(VertexId, Probability)>,
}

/// An information set W of one player with its action labels A^n_W.
/// Every member node maps each action (by position) to a child.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoSet {
    pub id: String,
    pub player: usize,
    pub actions: Vec<String>,
    pub moves: Vec<(VertexId, Vec<VertexId>)>,
}

impl InfoSet {
    pub fn nodes(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.moves.iter().map(|(v, _)| *v)
    }

    pub fn child(&self, node: VertexId, action: usize) -> Option<VertexId> {
        self.moves
            .iter()
            .find(|(v, _)| *v == node)
            .and_then(|(_, c)| c.get(action).copied())
    }
}

/// Who acts at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Owner {
    Terminal,
    Nature(usize),
    Player { player: usize, info_set: usize },
}

/// The directed acyclic multi-root game form.
///
/// Construction only resolves identifiers; structural rules are checked by
/// [`GameBush::validate`], which reports violations as data.
#[derive(Clone, Debug)]
pub struct GameBush {
    players: Vec<String>,
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    arrows: Vec<(VertexId, VertexId)>,
    nature: Vec<NatureNode>,
    info_sets: Vec<InfoSet>,
    root_partitions: Vec<Vec<Vec<VertexId>>>,
    terminal_partitions: Vec<Vec<Vec<VertexId>>>,

    children: Vec<Vec<VertexId>>,
    parents: Vec<Vec<VertexId>>,
    roots: Vec<VertexId>,
    terminals: Vec<VertexId>,
    owner: Vec<Option<Owner>>,
    form: OnceLock<Result<Arc<GameForm>, StrategyError>>,
}

impl PartialEq for GameBush {
    fn eq(&self, other: &Self) -> bool {
        self.players == other.players
            && self.names == other.names
            && self.arrows == other.arrows
            && self.nature == other.nature
            && self.info_sets == other.info_sets
            && self.root_partitions == other.root_partitions
            && self.terminal_partitions == other.terminal_partitions
    }
}

/// String-keyed description of a bush. Partitions are given per player in
/// the order of `players`.
#[derive(Clone, Debug, Default)]
pub struct BushBuilder {
    pub players: Vec<String>,
    pub vertices: Vec<String>,
    pub arrows: Vec<(String, String)>,
    /// vertex -> [(child, probability)]
    pub nature: Vec<(String, Vec<(String, Probability)>)>,
    pub info_sets: Vec<InfoSetSpec>,
    pub root_partitions: Vec<Vec<Vec<String>>>,
    pub terminal_partitions: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug)]
pub struct InfoSetSpec {
    pub id: String,
    pub player: String,
    pub actions: Vec<String>,
    /// node -> children listed in action order
    pub moves: Vec<(String, Vec<String>)>,
}

impl BushBuilder {
    pub fn new<S: Into<String>>(players: impl IntoIterator<Item = S>) -> Self {
        Self {
            players: players.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn vertex(&mut self, id: &str) -> &mut Self {
        self.vertices.push(id.to_string());
        self
    }

    pub fn arrow(&mut self, from: &str, to: &str) -> &mut Self {
        self.arrows.push((from.to_string(), to.to_string()));
        self
    }

    /// Adds `from -> child` arrows for every listed child together with the
    /// vertices themselves if they are new.
    pub fn nature_node(&mut self, node: &str, outcomes: &[(&str, Probability)]) -> &mut Self {
        self.ensure(node);
        for (child, _) in outcomes {
            self.ensure(child);
            self.arrow(node, child);
        }
        self.nature.push((
            node.to_string(),
            outcomes.iter().map(|(c, p)| (c.to_string(), *p)).collect(),
        ));
        self
    }

    /// Declares an information set; arrows and vertices are added for every move.
    pub fn info_set(
        &mut self,
        id: &str,
        player: &str,
        actions: &[&str],
        moves: &[(&str, &[&str])],
    ) -> &mut Self {
        for (node, kids) in moves {
            self.ensure(node);
            for k in kids.iter() {
                self.ensure(k);
                self.arrow(node, k);
            }
        }
        self.info_sets.push(InfoSetSpec {
            id: id.to_string(),
            player: player.to_string(),
            actions: actions.iter().map(|a| a.to_string()).collect(),
            moves: moves
                .iter()
                .map(|(n, k)| (n.to_string(), k.iter().map(|s| s.to_string()).collect()))
                .collect(),
        });
        self
    }

    pub fn ensure(&mut self, id: &str) -> &mut Self {
        if !self.vertices.iter().any(|v| v == id) {
            self.vertices.push(id.to_string());
        }
        self
    }

    pub fn root_partition(&mut self, player: usize, blocks: &[&[&str]]) -> &mut Self {
        set_partition(
            &mut self.root_partitions,
            self.players.len(),
            player,
            blocks,
        );
        self
    }

    pub fn terminal_partition(&mut self, player: usize, blocks: &[&[&str]]) -> &mut Self {
        set_partition(
            &mut self.terminal_partitions,
            self.players.len(),
            player,
            blocks,
        );
        self
    }

    /// Fills every missing root partition with the discrete partition of the
    /// structural roots and every missing terminal partition likewise.
    pub fn discrete_defaults(&mut self) -> &mut Self {
        let n = self.players.len();
        let has_in: std::collections::HashSet<&str> =
            self.arrows.iter().map(|(_, b)| b.as_str()).collect();
        let has_out: std::collections::HashSet<&str> =
            self.arrows.iter().map(|(a, _)| a.as_str()).collect();
        let roots: Vec<Vec<String>> = self
            .vertices
            .iter()
            .filter(|v| !has_in.contains(v.as_str()))
            .map(|v| vec![v.clone()])
            .collect();
        let terms: Vec<Vec<String>> = self
            .vertices
            .iter()
            .filter(|v| !has_out.contains(v.as_str()))
            .map(|v| vec![v.clone()])
            .collect();
        self.root_partitions.resize(n, Vec::new());
        self.terminal_partitions.resize(n, Vec::new());
        for p in self.root_partitions.iter_mut() {
            if p.is_empty() {
                *p = roots.clone();
            }
        }
        for p in self.terminal_partitions.iter_mut() {
            if p.is_empty() {
                *p = terms.clone();
            }
        }
        self
    }

    pub fn build(&self) -> Result<GameBush, ModelError> {
        GameBush::from_builder(self)
    }
}

fn set_partition(target: &mut Vec<Vec<Vec<String>>>, n: usize, player: usize, blocks: &[&[&str]]) {
    if target.len() < n {
        target.resize(n, Vec::new());
    }
    target[player] = blocks
        .iter()
        .map(|b| b.iter().map(|s| s.to_string()).collect())
        .collect();
}

impl GameBush {
    fn from_builder(b: &BushBuilder) -> Result<Self, ModelError> {
        let mut index = HashMap::new();
        for (i, v) in b.vertices.iter().enumerate() {
            if index.insert(v.clone(), VertexId(i)).is_some() {
                return Err(ModelError::Parse(format!("duplicate vertex id `{v}`")));
            }
        }
        let look = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| ModelError::Parse(format!("unknown vertex id `{id}`")))
        };
        let player_of = |name: &str| {
            b.players
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| ModelError::Parse(format!("unknown player `{name}`")))
        };

        let mut arrows = Vec::with_capacity(b.arrows.len());
        for (from, to) in &b.arrows {
            let arrow = (look(from)?, look(to)?);
            if !arrows.contains(&arrow) {
                arrows.push(arrow);
            }
        }
        let mut nature = Vec::new();
        for (v, outs) in &b.nature {
            let mut outcomes = Vec::new();
            for (c, p) in outs {
                outcomes.push((look(c)?, *p));
            }
            nature.push(NatureNode {
                vertex: look(v)?,
                outcomes,
            });
        }
        let mut info_sets = Vec::new();
        for spec in &b.info_sets {
            let mut moves = Vec::new();
            for (node, kids) in &spec.moves {
                let kids = kids
                    .iter()
                    .map(|k| look(k))
                    .collect::<Result<Vec<_>, _>>()?;
                moves.push((look(node)?, kids));
            }
            info_sets.push(InfoSet {
                id: spec.id.clone(),
                player: player_of(&spec.player)?,
                actions: spec.actions.clone(),
                moves,
            });
        }
        let resolve = |parts: &Vec<Vec<Vec<String>>>, what: &str| {
            if parts.len() != b.players.len() {
                return Err(ModelError::Parse(format!(
                    "expected one {what} partition per player ({}), got {}",
                    b.players.len(),
                    parts.len()
                )));
            }
            parts
                .iter()
                .map(|blocks| {
                    blocks
                        .iter()
                        .map(|blk| blk.iter().map(|v| look(v)).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let root_partitions = resolve(&b.root_partitions, "root")?;
        let terminal_partitions = resolve(&b.terminal_partitions, "terminal")?;

        Ok(Self::assemble(
            b.players.clone(),
            b.vertices.clone(),
            arrows,
            nature,
            info_sets,
            root_partitions,
            terminal_partitions,
        ))
    }

    /// Builds a bush from already-resolved parts.
    pub(crate) fn assemble(
        players: Vec<String>,
        names: Vec<String>,
        arrows: Vec<(VertexId, VertexId)>,
        nature: Vec<NatureNode>,
        info_sets: Vec<InfoSet>,
        root_partitions: Vec<Vec<Vec<VertexId>>>,
        terminal_partitions: Vec<Vec<Vec<VertexId>>>,
    ) -> Self {
        let n = names.len();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), VertexId(i)))
            .collect();
        let mut children = vec![Vec::new(); n];
        let mut parents = vec![Vec::new(); n];
        for &(a, b) in &arrows {
            children[a.0].push(b);
            parents[b.0].push(a);
        }
        let roots = (0..n)
            .filter(|&v| parents[v].is_empty())
            .map(VertexId)
            .collect();
        let terminals = (0..n)
            .filter(|&v| children[v].is_empty())
            .map(VertexId)
            .collect();
        let mut owner = vec![None; n];
        for v in 0..n {
            if children[v].is_empty() {
                owner[v] = Some(Owner::Terminal);
            }
        }
        for (k, nat) in nature.iter().enumerate() {
            owner[nat.vertex.0].get_or_insert(Owner::Nature(k));
        }
        for (k, w) in info_sets.iter().enumerate() {
            for v in w.nodes() {
                owner[v.0].get_or_insert(Owner::Player {
                    player: w.player,
                    info_set: k,
                });
            }
        }
        Self {
            players,
            names,
            index,
            arrows,
            nature,
            info_sets,
            root_partitions,
            terminal_partitions,
            children,
            parents,
            roots,
            terminals,
            owner,
            form: OnceLock::new(),
        }
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.names.len()).map(VertexId)
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    /// Looks up a vertex by name, panicking on a typo. Meant for fixtures and tests.
    pub fn v(&self, name: &str) -> VertexId {
        self.id(name)
            .unwrap_or_else(|| panic!("no vertex named `{name}`"))
    }

    pub fn arrows(&self) -> &[(VertexId, VertexId)] {
        &self.arrows
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.0]
    }

    pub fn parents(&self, v: VertexId) -> &[VertexId] {
        &self.parents[v.0]
    }

    /// The unique predecessor of a non-root vertex of a valid bush.
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parents[v.0].first().copied()
    }

    pub fn roots(&self) -> &[VertexId] {
        &self.roots
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn is_root(&self, v: VertexId) -> bool {
        self.parents[v.0].is_empty()
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.children[v.0].is_empty()
    }

    pub fn root_position(&self, v: VertexId) -> Option<usize> {
        self.roots.binary_search(&v).ok()
    }

    pub fn terminal_position(&self, v: VertexId) -> Option<usize> {
        self.terminals.binary_search(&v).ok()
    }

    pub fn nature_nodes(&self) -> &[NatureNode] {
        &self.nature
    }

    pub fn info_sets(&self) -> &[InfoSet] {
        &self.info_sets
    }

    /// Indices (into [`GameBush::info_sets`]) of the information sets of `player`.
    pub fn player_info_sets(&self, player: usize) -> Vec<usize> {
        (0..self.info_sets.len())
            .filter(|&k| self.info_sets[k].player == player)
            .collect()
    }

    pub fn owner(&self, v: VertexId) -> Option<Owner> {
        self.owner[v.0]
    }

    pub fn root_partition(&self, player: usize) -> &[Vec<VertexId>] {
        &self.root_partitions[player]
    }

    pub fn terminal_partition(&self, player: usize) -> &[Vec<VertexId>] {
        &self.terminal_partitions[player]
    }

    /// Vertices on the arrow path from a root down to `v`, root first and
    /// `v` last.
    pub fn path_to(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            if path.len() > self.names.len() {
                break;
            }
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Cached strategy space and path table, enumerated with the default cap.
    pub fn form(&self) -> Result<&Arc<GameForm>, StrategyError> {
        self.form
            .get_or_init(|| GameForm::build(self, DEFAULT_STRATEGY_CAP).map(Arc::new))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn validate(&self) -> Vec<super::Violation> {
        super::validate::validate_bush(self)
    }

    pub(crate) fn parts(
        &self,
    ) -> (
        &[NatureNode],
        &[InfoSet],
        &[Vec<Vec<VertexId>>],
        &[Vec<Vec<VertexId>>],
    ) {
        (
            &self.nature,
            &self.info_sets,
            &self.root_partitions,
            &self.terminal_partitions,
        )
    }
}
