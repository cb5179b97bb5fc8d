use std::collections::HashMap;

use super::sets::SubgameSet;
use super::SubgameError;
use crate::model::{
    GameBundle, GameBush, InfoSet, MeetPartition, ModelError, NatureNode, PayoffKind, PayoffModel,
    Table, VertexId,
};
use crate::strategies::{terminal_reach, MixedProfile, Plan};

/// Order-preserving renumbering of the kept vertices.
struct Renumber {
    map: HashMap<VertexId, VertexId>,
    names: Vec<String>,
}

impl Renumber {
    fn new(bush: &GameBush, keep: impl Fn(VertexId) -> bool) -> Self {
        let mut map = HashMap::new();
        let mut names = Vec::new();
        for v in bush.vertices() {
            if keep(v) {
                map.insert(v, VertexId(names.len()));
                names.push(bush.name(v).to_string());
            }
        }
        Self { map, names }
    }

    fn get(&self, v: VertexId) -> VertexId {
        self.map[&v]
    }

    fn has(&self, v: VertexId) -> bool {
        self.map.contains_key(&v)
    }

    fn blocks(&self, part: &[Vec<VertexId>]) -> Vec<Vec<VertexId>> {
        part.iter()
            .map(|b| b.iter().map(|&v| self.get(v)).collect())
            .collect()
    }

    fn model(&self, m: &PayoffModel, players: usize) -> Result<PayoffModel, ModelError> {
        let class = m.class().iter().map(|&v| self.get(v)).collect();
        PayoffModel::new(class, players, m.kind().clone())
    }
}

fn kept_parts(
    bush: &GameBush,
    re: &Renumber,
    keep_node: impl Fn(VertexId) -> bool,
) -> (Vec<(VertexId, VertexId)>, Vec<NatureNode>, Vec<InfoSet>) {
    let arrows = bush
        .arrows()
        .iter()
        .filter(|(a, b)| keep_node(*a) && re.has(*a) && re.has(*b))
        .map(|&(a, b)| (re.get(a), re.get(b)))
        .collect();
    let nature = bush
        .nature_nodes()
        .iter()
        .filter(|n| keep_node(n.vertex) && re.has(n.vertex))
        .map(|n| NatureNode {
            vertex: re.get(n.vertex),
            outcomes: n.outcomes.iter().map(|&(c, p)| (re.get(c), p)).collect(),
        })
        .collect();
    let info_sets = bush
        .info_sets()
        .iter()
        .filter(|w| w.nodes().all(|v| keep_node(v) && re.has(v)))
        .map(|w| InfoSet {
            id: w.id.clone(),
            player: w.player,
            actions: w.actions.clone(),
            moves: w
                .moves
                .iter()
                .map(|(v, kids)| (re.get(*v), kids.iter().map(|&c| re.get(c)).collect()))
                .collect(),
        })
        .collect();
    (arrows, nature, info_sets)
}

/// Γ|_S: the bush on S with roots R', root partitions R'_n, terminal
/// partitions Q'_n and the original continuations of the classes in S.
pub fn restrict(bundle: &GameBundle, s: &SubgameSet) -> Result<GameBundle, SubgameError> {
    let bush = bundle.bush();
    let re = Renumber::new(bush, |v| s.contains(v));
    let (arrows, nature, info_sets) = kept_parts(bush, &re, |_| true);
    let n = bush.num_players();
    let sub = GameBush::assemble(
        bush.players().to_vec(),
        re.names.clone(),
        arrows,
        nature,
        info_sets,
        s.root_partitions.iter().map(|p| re.blocks(p)).collect(),
        s.terminal_partitions.iter().map(|p| re.blocks(p)).collect(),
    );
    let mut models = Vec::new();
    for (b, block) in bundle.meet().blocks().iter().enumerate() {
        if block.iter().all(|&t| s.contains(t)) {
            models.push(re.model(bundle.continuation(b), n)?);
        }
    }
    Ok(GameBundle::with_parameters(
        sub,
        models,
        bundle.parameters().clone(),
    )?)
}

/// The blocks of the factor game's meet partition that lie in R', in
/// original vertex ids.
pub fn factor_classes(_bundle: &GameBundle, s: &SubgameSet) -> Vec<Vec<VertexId>> {
    let meet =
        MeetPartition::from_partitions(&s.roots, s.root_partitions.iter().map(|p| p.as_slice()));
    meet.blocks().to_vec()
}

/// Γ/S: cut at R'. Vertices (V∖S) ∪ R', terminals (T∖S) ∪ R', terminal
/// partitions {A ∈ Q_n : A ∩ S = ∅} ∪ R'_n. `continuation` supplies the
/// payoff model of every class inside R' (original vertex ids, sorted).
pub fn factor(
    bundle: &GameBundle,
    s: &SubgameSet,
    continuation: impl Fn(&[VertexId]) -> Option<PayoffKind>,
) -> Result<GameBundle, SubgameError> {
    let bush = bundle.bush();
    let is_root = |v: VertexId| s.roots.binary_search(&v).is_ok();
    let re = Renumber::new(bush, |v| !s.contains(v) || is_root(v));
    let (arrows, nature, info_sets) = kept_parts(bush, &re, |v| !s.contains(v));
    let n = bush.num_players();
    let terminal_partitions = (0..n)
        .map(|p| {
            let mut blocks: Vec<Vec<VertexId>> = bush
                .terminal_partition(p)
                .iter()
                .filter(|b| b.iter().all(|&v| !s.contains(v)))
                .map(|b| b.iter().map(|&v| re.get(v)).collect())
                .collect();
            blocks.extend(re.blocks(&s.root_partitions[p]));
            blocks
        })
        .collect();
    let root_partitions = (0..n).map(|p| re.blocks(bush.root_partition(p))).collect();
    let fbush = GameBush::assemble(
        bush.players().to_vec(),
        re.names.clone(),
        arrows,
        nature,
        info_sets,
        root_partitions,
        terminal_partitions,
    );
    let mut models = Vec::new();
    for (b, block) in bundle.meet().blocks().iter().enumerate() {
        if block.iter().all(|&t| !s.contains(t)) {
            models.push(re.model(bundle.continuation(b), n)?);
        }
    }
    for class in factor_classes(bundle, s) {
        let kind = continuation(&class).ok_or_else(|| {
            ModelError::MissingContinuation(
                class.iter().map(|&v| bush.name(v).to_string()).collect(),
            )
        })?;
        let ids = class.iter().map(|&v| re.get(v)).collect();
        models.push(PayoffModel::new(ids, n, kind)?);
    }
    Ok(GameBundle::with_parameters(
        fbush,
        models,
        bundle.parameters().clone(),
    )?)
}

/// Per-root conditional payoffs of a plan of Γ|_S: for every root u of the
/// restricted bundle, Σ_t P_{δ_u,σ}(t) y_t. Rows follow the roots of
/// `sub`.
pub fn root_values(sub: &GameBundle, plan: &Plan) -> Result<Table, SubgameError> {
    let bush = sub.bush();
    let form = bush.form()?;
    let k = bush.roots().len();
    let mut out = Vec::with_capacity(k);
    for r in 0..k {
        let mut q = vec![0.0; k];
        q[r] = 1.0;
        let probs = terminal_reach(form, &q, &plan.sigma);
        let mut row = vec![0.0; bush.num_players()];
        for (p, y) in probs.iter().zip(&plan.y) {
            for (o, v) in row.iter_mut().zip(y) {
                *o += p * v;
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// Maps a profile of `from` onto the same-named information sets of `to`
/// via behaviour strategies. Sets missing in `from` get uniform behaviour.
pub(crate) fn transfer_behaviour(
    from: &GameBush,
    from_sigma: &MixedProfile,
    to: &GameBush,
    target: &mut [Vec<f64>],
) -> Result<(), SubgameError> {
    let form = from.form()?;
    let b = crate::strategies::mixed_to_behaviour(from, form, from_sigma).behaviour;
    for (k, w) in to.info_sets().iter().enumerate() {
        if let Some(j) = from
            .info_sets()
            .iter()
            .position(|x| x.player == w.player && x.id == w.id)
        {
            target[k] = b.probs[j].clone();
        }
    }
    Ok(())
}
