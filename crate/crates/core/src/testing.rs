//! Random instances for property tests and benchmarks.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{BushBuilder, GameBundle, GameBush, PayoffModel, Probability};
use crate::strategies::{GameForm, MixedProfile};

/// A two-player game in which Row moves first and Col moves without seeing
/// Row's choice. Payoffs `a` (Row) and `b` (Col) are indexed `[row][col]`.
pub fn bimatrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> GameBundle {
    let m = a.len();
    let n = a[0].len();
    let mut builder = BushBuilder::new(["Row", "Col"]);
    let rows: Vec<String> = (0..m).map(|i| format!("R{i}")).collect();
    let row_actions: Vec<String> = (0..m).map(|i| format!("r{i}")).collect();
    let col_actions: Vec<String> = (0..n).map(|j| format!("c{j}")).collect();
    let row_kids: Vec<&str> = rows.iter().map(String::as_str).collect();
    let ra: Vec<&str> = row_actions.iter().map(String::as_str).collect();
    builder.info_set("row", "Row", &ra, &[("root", &row_kids)]);
    let cells: Vec<Vec<String>> = (0..m)
        .map(|i| (0..n).map(|j| format!("T{i}_{j}")).collect())
        .collect();
    let cell_refs: Vec<Vec<&str>> = cells
        .iter()
        .map(|r| r.iter().map(String::as_str).collect())
        .collect();
    let moves: Vec<(&str, &[&str])> = rows
        .iter()
        .zip(&cell_refs)
        .map(|(r, c)| (r.as_str(), c.as_slice()))
        .collect();
    let ca: Vec<&str> = col_actions.iter().map(String::as_str).collect();
    builder.info_set("col", "Col", &ca, &moves);
    builder.discrete_defaults();
    let bush = builder.build().expect("bimatrix bush");
    let models = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let t = bush.v(&cells[i][j]);
            PayoffModel::constant(vec![t], vec![vec![a[i][j], b[i][j]]]).expect("payoff")
        })
        .collect();
    GameBundle::new(bush, models).expect("bimatrix bundle")
}

/// Payoffs drawn uniformly from [−1, 1], so ties have probability zero.
pub fn random_bimatrix<R: Rng>(rng: &mut R, m: usize, n: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut draw = || {
        (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect::<Vec<Vec<f64>>>()
    };
    let a = draw();
    let b = draw();
    (a, b)
}

/// A point of ∏ Δ(S_n) with exponential weights, every coordinate positive.
pub fn random_profile<R: Rng>(rng: &mut R, form: &GameForm) -> MixedProfile {
    let weights = form
        .spaces
        .iter()
        .map(|s| {
            let raw: Vec<f64> = (0..s.count)
                .map(|_| -rng.gen::<f64>().max(1e-12).ln())
                .collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|r| r / total).collect()
        })
        .collect();
    MixedProfile::new(weights)
}

/// Knobs for [`random_bush`].
#[derive(Clone, Debug)]
pub struct BushShape {
    pub players: usize,
    pub max_vertices: usize,
    /// at most this many roots
    pub max_roots: usize,
    pub nature: bool,
    /// probability of merging a node into an existing information set
    pub merge: f64,
    /// keep perfect recall when merging
    pub perfect_recall: bool,
}

impl Default for BushShape {
    fn default() -> Self {
        Self {
            players: 2,
            max_vertices: 14,
            max_roots: 2,
            nature: true,
            merge: 0.5,
            perfect_recall: true,
        }
    }
}

#[derive(Clone)]
struct Node {
    parent: Option<usize>,
    /// action index taken at the parent
    via: usize,
    root: usize,
    kind: Kind,
}

#[derive(Clone, PartialEq)]
enum Kind {
    Leaf,
    Nature,
    Player { player: usize, set: usize },
}

/// A random forest bush with constant payoffs on a random meet partition.
/// Every decision node has two moves. With `perfect_recall`, nodes only
/// share an information set when their owner's experience agrees.
pub fn random_bush<R: Rng>(rng: &mut R, shape: &BushShape) -> GameBundle {
    let roots = rng.gen_range(1..=shape.max_roots.max(1));
    let mut nodes: Vec<Node> = (0..roots)
        .map(|r| Node {
            parent: None,
            via: 0,
            root: r,
            kind: Kind::Leaf,
        })
        .collect();
    // Root partitions: either discrete or a single block per player.
    let coarse_roots: Vec<bool> = (0..shape.players).map(|_| rng.gen_bool(0.5)).collect();
    let root_block = |p: usize, r: usize| if coarse_roots[p] { 0 } else { r };

    let mut sets: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut frontier: Vec<usize> = (0..roots).collect();
    while nodes.len() + 2 <= shape.max_vertices && !frontier.is_empty() {
        let pick = rng.gen_range(0..frontier.len());
        let v = frontier.remove(pick);
        let kind = if shape.nature && rng.gen_bool(0.15) {
            Kind::Nature
        } else {
            let player = rng.gen_range(0..shape.players);
            Kind::Player {
                player,
                set: usize::MAX,
            }
        };
        nodes[v].kind = kind;
        for a in 0..2 {
            frontier.push(nodes.len());
            let root = nodes[v].root;
            nodes.push(Node {
                parent: Some(v),
                via: a,
                root,
                kind: Kind::Leaf,
            });
        }
    }
    if nodes.iter().all(|n| n.kind == Kind::Leaf) {
        nodes[0].kind = Kind::Player {
            player: 0,
            set: usize::MAX,
        };
        for a in 0..2 {
            nodes.push(Node {
                parent: Some(0),
                via: a,
                root: 0,
                kind: Kind::Leaf,
            });
        }
    }

    // Information sets in creation order, so ancestors are assigned first.
    let ancestors = |nodes: &[Node], v: usize| {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some(p) = nodes[cur].parent {
            out.push((p, nodes[cur].via));
            cur = p;
        }
        out.reverse();
        out
    };
    let experience = |nodes: &[Node], player: usize, v: usize| {
        let mut out = vec![(usize::MAX, root_block(player, nodes[v].root))];
        for (a, via) in ancestors(nodes, v) {
            if let Kind::Player { player: p, set } = nodes[a].kind {
                if p == player {
                    out.push((set, via));
                }
            }
        }
        out
    };
    for v in 0..nodes.len() {
        let Kind::Player { player, .. } = nodes[v].kind else {
            continue;
        };
        let exp = experience(&nodes, player, v);
        let on_path: Vec<usize> = ancestors(&nodes, v).iter().map(|&(a, _)| a).collect();
        let mut options: Vec<usize> = (0..sets.len())
            .filter(|&k| sets[k].0 == player)
            .filter(|&k| sets[k].1.iter().all(|u| !on_path.contains(u)))
            .filter(|&k| {
                // members of k must not lie below v either; they are older, so
                // only the path check and, for recall, equal experience matter
                !shape.perfect_recall || experience(&nodes, player, sets[k].1[0]) == exp
            })
            .collect();
        options.shuffle(rng);
        let set = match options.first() {
            Some(&k) if rng.gen_bool(shape.merge) => {
                sets[k].1.push(v);
                k
            }
            _ => {
                sets.push((player, vec![v]));
                sets.len() - 1
            }
        };
        nodes[v].kind = Kind::Player { player, set };
    }

    let name = |v: usize| format!("v{v}");
    let players: Vec<String> = (0..shape.players).map(|p| format!("P{p}")).collect();
    let mut b = BushBuilder::new(players.clone());
    for v in 0..nodes.len() {
        b.ensure(&name(v));
    }
    let children = |v: usize| -> Vec<String> {
        (0..nodes.len())
            .filter(|&c| nodes[c].parent == Some(v))
            .map(name)
            .collect()
    };
    for v in 0..nodes.len() {
        if nodes[v].kind == Kind::Nature {
            let kids = children(v);
            let p = if rng.gen_bool(0.5) {
                Ratio::new(1, 2)
            } else {
                Ratio::new(1, 3)
            };
            let outcomes = [
                (kids[0].as_str(), Probability::Exact(p)),
                (
                    kids[1].as_str(),
                    Probability::Exact(Ratio::from_integer(1) - p),
                ),
            ];
            b.nature_node(&name(v), &outcomes);
        }
    }
    for (k, (player, members)) in sets.iter().enumerate() {
        let kids: Vec<(String, Vec<String>)> =
            members.iter().map(|&v| (name(v), children(v))).collect();
        let moves: Vec<(&str, Vec<&str>)> = kids
            .iter()
            .map(|(n, c)| (n.as_str(), c.iter().map(String::as_str).collect()))
            .collect();
        let moves: Vec<(&str, &[&str])> = moves.iter().map(|(n, c)| (*n, c.as_slice())).collect();
        b.info_set(&format!("W{k}"), &players[*player], &["a", "b"], &moves);
    }
    let root_names: Vec<String> = (0..roots).map(name).collect();
    for p in 0..shape.players {
        if coarse_roots[p] {
            let blk: Vec<&str> = root_names.iter().map(String::as_str).collect();
            b.root_partition(p, &[&blk]);
        }
    }
    // Terminal partitions: discrete except that one player may lump pairs.
    let leaves: Vec<String> = (0..nodes.len())
        .filter(|&v| nodes[v].kind == Kind::Leaf)
        .map(name)
        .collect();
    if rng.gen_bool(0.4) && leaves.len() >= 2 {
        let p = rng.gen_range(0..shape.players);
        let blocks: Vec<Vec<&str>> = leaves
            .chunks(2)
            .map(|c| c.iter().map(String::as_str).collect())
            .collect();
        let refs: Vec<&[&str]> = blocks.iter().map(Vec::as_slice).collect();
        b.terminal_partition(p, &refs);
    }
    b.discrete_defaults();
    let bush = b.build().expect("random bush");
    constant_payoffs(rng, bush)
}

/// Random constant payoffs in [−1, 1] on every meet block.
pub fn constant_payoffs<R: Rng>(rng: &mut R, bush: GameBush) -> GameBundle {
    let meet = crate::model::MeetPartition::of_bush(&bush);
    let n = bush.num_players();
    let models = meet
        .blocks()
        .iter()
        .map(|block| {
            let table = block
                .iter()
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            PayoffModel::constant(block.clone(), table).expect("payoff")
        })
        .collect();
    GameBundle::new(bush, models).expect("random bundle")
}
