//! JSON bundle files.
//!
//! ```json
//! {
//!   "parameters": {"s": 0.1},
//!   "players": ["One", "Two"],
//!   "vertices": ["r", "X", "Y"],
//!   "arrows": [["r", "X"], ["r", "Y"]],
//!   "nature": {},
//!   "info_partitions": {"One": [{"id": "W", "actions": ["x", "y"],
//!                                "moves": {"r": {"x": "X", "y": "Y"}}}]},
//!   "root_partitions": {"One": [["r"]], "Two": [["r"]]},
//!   "terminal_partitions": {"One": [["X"], ["Y"]], "Two": [["X"], ["Y"]]},
//!   "continuations": [
//!     {"class": ["X"], "kind": "constant", "payoffs": {"X": [1, "1+s"]}},
//!     {"class": ["Y"], "kind": "constant", "payoffs": {"Y": [0, 0]}}
//!   ]
//! }
//! ```
//!
//! Missing root or terminal partitions default to the discrete partition.
//! Numbers may be written as strings holding rationals (`"1/3"`) or affine
//! forms over the parameters (`"1+s"`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bundle::GameBundle;
use super::bush::{BushBuilder, InfoSetSpec, VertexId};
use super::payoff::{
    Builtin, Interpolation, PayoffKind, PayoffModel, SamplePoint, SampledGraph, Table,
};
use super::scalar::{Probability, Scalar};
use super::ModelError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    pub players: Vec<String>,
    pub vertices: Vec<String>,
    pub arrows: Vec<(String, String)>,
    #[serde(default)]
    pub nature: BTreeMap<String, BTreeMap<String, Scalar>>,
    #[serde(default)]
    pub info_partitions: BTreeMap<String, Vec<InfoSetFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_partitions: Option<BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_partitions: Option<BTreeMap<String, Vec<Vec<String>>>>,
    pub continuations: Vec<ContinuationFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoSetFile {
    pub id: String,
    pub actions: Vec<String>,
    /// node -> action -> child
    pub moves: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ContinuationFile {
    Constant {
        class: Vec<String>,
        /// terminal -> per-player payoff
        payoffs: BTreeMap<String, Vec<Scalar>>,
    },
    Function {
        class: Vec<String>,
        name: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, Scalar>,
        /// For `linear`: class vertex u -> terminal -> per-player payoff.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertex_tables: Option<BTreeMap<String, BTreeMap<String, Vec<Scalar>>>>,
    },
    Samples {
        class: Vec<String>,
        interpolation: Interpolation,
        points: Vec<SamplePointFile>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePointFile {
    /// Distribution over the class, in the order the class is listed.
    pub w: Vec<f64>,
    /// Each value maps terminal -> per-player payoff.
    pub values: Vec<BTreeMap<String, Vec<f64>>>,
}

impl ContinuationFile {
    fn class(&self) -> &[String] {
        match self {
            ContinuationFile::Constant { class, .. }
            | ContinuationFile::Function { class, .. }
            | ContinuationFile::Samples { class, .. } => class,
        }
    }
}

pub fn load_bundle(
    path: impl AsRef<Path>,
    overrides: &BTreeMap<String, f64>,
) -> Result<GameBundle, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    bundle_from_str(&text, overrides)
}

pub fn bundle_from_str(
    text: &str,
    overrides: &BTreeMap<String, f64>,
) -> Result<GameBundle, ModelError> {
    let file: BundleFile =
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    bundle_from_json(&file, overrides)
}

fn parse_err(msg: impl Into<String>) -> ModelError {
    ModelError::Parse(msg.into())
}

fn partitions(
    players: &[String],
    given: &Option<BTreeMap<String, Vec<Vec<String>>>>,
    what: &str,
) -> Result<Vec<Vec<Vec<String>>>, ModelError> {
    let Some(map) = given else {
        return Ok(vec![Vec::new(); players.len()]);
    };
    for key in map.keys() {
        if !players.contains(key) {
            return Err(parse_err(format!(
                "{what} partition for unknown player `{key}`"
            )));
        }
    }
    Ok(players
        .iter()
        .map(|p| map.get(p).cloned().unwrap_or_default())
        .collect())
}

pub fn bundle_from_json(
    file: &BundleFile,
    overrides: &BTreeMap<String, f64>,
) -> Result<GameBundle, ModelError> {
    let mut params = file.parameters.clone();
    for (k, v) in overrides {
        params.insert(k.clone(), *v);
    }

    let mut b = BushBuilder::new(file.players.iter().cloned());
    b.vertices = file.vertices.clone();
    b.arrows = file.arrows.clone();
    for (node, outs) in &file.nature {
        let mut outcomes = Vec::new();
        for (child, p) in outs {
            outcomes.push((child.clone(), p.probability(&params)?));
        }
        b.nature.push((node.clone(), outcomes));
    }
    for (player, sets) in &file.info_partitions {
        if !file.players.contains(player) {
            return Err(parse_err(format!(
                "information sets for unknown player `{player}`"
            )));
        }
        for w in sets {
            let mut moves = Vec::new();
            for (node, by_action) in &w.moves {
                for a in by_action.keys() {
                    if !w.actions.contains(a) {
                        return Err(parse_err(format!(
                            "node `{node}` lists action `{a}` not declared by `{}`",
                            w.id
                        )));
                    }
                }
                let mut kids = Vec::new();
                for a in &w.actions {
                    match by_action.get(a) {
                        Some(c) => kids.push(c.clone()),
                        None => {
                            return Err(parse_err(format!(
                                "node `{node}` of `{}` has no child for action `{a}`",
                                w.id
                            )))
                        }
                    }
                }
                moves.push((node.clone(), kids));
            }
            b.info_sets.push(InfoSetSpec {
                id: w.id.clone(),
                player: player.clone(),
                actions: w.actions.clone(),
                moves,
            });
        }
    }
    b.root_partitions = partitions(&file.players, &file.root_partitions, "root")?;
    b.terminal_partitions = partitions(&file.players, &file.terminal_partitions, "terminal")?;
    b.discrete_defaults();
    let bush = b.build()?;
    let violations = bush.validate();
    if !violations.is_empty() {
        return Err(ModelError::Validation(violations));
    }

    let n = file.players.len();
    let mut models = Vec::new();
    for c in &file.continuations {
        let class_names = c.class();
        let class: Vec<VertexId> = class_names
            .iter()
            .map(|id| {
                bush.id(id)
                    .ok_or_else(|| parse_err(format!("unknown vertex id `{id}`")))
            })
            .collect::<Result<_, _>>()?;
        let row =
            |payoffs: &BTreeMap<String, Vec<Scalar>>, t: &str| -> Result<Vec<f64>, ModelError> {
                let r = payoffs
                    .get(t)
                    .ok_or_else(|| parse_err(format!("no payoff for terminal `{t}`")))?;
                r.iter().map(|x| x.eval(&params)).collect()
            };
        let table = |payoffs: &BTreeMap<String, Vec<Scalar>>| -> Result<Table, ModelError> {
            for k in payoffs.keys() {
                if !class_names.contains(k) {
                    return Err(parse_err(format!("payoff for `{k}` outside its class")));
                }
            }
            class_names.iter().map(|t| row(payoffs, t)).collect()
        };
        let kind = match c {
            ContinuationFile::Constant { payoffs, .. } => PayoffKind::Constant(table(payoffs)?),
            ContinuationFile::Function {
                name,
                params: fparams,
                vertex_tables,
                ..
            } => match name.as_str() {
                "ex1-subgame-value" => {
                    let s = fparams
                        .get("s")
                        .map(|x| x.eval(&params))
                        .transpose()?
                        .or_else(|| params.get("s").copied())
                        .ok_or_else(|| parse_err("ex1-subgame-value needs parameter `s`"))?;
                    PayoffKind::Function(Builtin::Ex1Subgame { s })
                }
                "linear" => {
                    let vt = vertex_tables
                        .as_ref()
                        .ok_or_else(|| parse_err("linear continuation needs `vertex_tables`"))?;
                    let mut tables = Vec::new();
                    for u in class_names {
                        let t = vt
                            .get(u)
                            .ok_or_else(|| parse_err(format!("no vertex table for `{u}`")))?;
                        tables.push(table(t)?);
                    }
                    PayoffKind::Function(Builtin::Linear { tables })
                }
                other => return Err(parse_err(format!("unknown builtin evaluator `{other}`"))),
            },
            ContinuationFile::Samples {
                interpolation,
                points,
                ..
            } => {
                let mut pts = Vec::new();
                for p in points {
                    if p.w.len() != class_names.len() {
                        return Err(parse_err("sample point distribution has the wrong length"));
                    }
                    let mut values = Vec::new();
                    for v in &p.values {
                        let t: Table = class_names
                            .iter()
                            .map(|t| {
                                v.get(t).cloned().ok_or_else(|| {
                                    parse_err(format!("sample lacks terminal `{t}`"))
                                })
                            })
                            .collect::<Result<_, _>>()?;
                        values.push(t);
                    }
                    pts.push(SamplePoint {
                        w: p.w.clone(),
                        values,
                    });
                }
                PayoffKind::Samples(SampledGraph {
                    points: pts,
                    interpolation: *interpolation,
                })
            }
        };
        models.push(PayoffModel::new(class, n, kind)?);
    }
    GameBundle::with_parameters(bush, models, params)
}

fn scalar_row(r: &[f64]) -> Vec<Scalar> {
    r.iter().copied().map(Scalar::Number).collect()
}

/// Serializes a bundle with every number written out in full.
pub fn bundle_to_json(bundle: &GameBundle) -> BundleFile {
    let bush = bundle.bush();
    let name = |v: VertexId| bush.name(v).to_string();
    let mut nature = BTreeMap::new();
    for nat in bush.nature_nodes() {
        let outs = nat
            .outcomes
            .iter()
            .map(|(c, p)| {
                let s = match p {
                    Probability::Exact(r) => Scalar::Text(format!("{}/{}", r.numer(), r.denom())),
                    Probability::Float(x) => Scalar::Number(*x),
                };
                (name(*c), s)
            })
            .collect();
        nature.insert(name(nat.vertex), outs);
    }
    let mut info_partitions: BTreeMap<String, Vec<InfoSetFile>> = BTreeMap::new();
    for w in bush.info_sets() {
        let moves = w
            .moves
            .iter()
            .map(|(v, kids)| {
                let m = w
                    .actions
                    .iter()
                    .zip(kids)
                    .map(|(a, c)| (a.clone(), name(*c)))
                    .collect();
                (name(*v), m)
            })
            .collect();
        info_partitions
            .entry(bush.players()[w.player].clone())
            .or_default()
            .push(InfoSetFile {
                id: w.id.clone(),
                actions: w.actions.clone(),
                moves,
            });
    }
    let blocks = |part: &[Vec<VertexId>]| -> Vec<Vec<String>> {
        part.iter()
            .map(|b| b.iter().map(|&v| name(v)).collect())
            .collect()
    };
    let root_partitions = (0..bush.num_players())
        .map(|p| (bush.players()[p].clone(), blocks(bush.root_partition(p))))
        .collect();
    let terminal_partitions = (0..bush.num_players())
        .map(|p| {
            (
                bush.players()[p].clone(),
                blocks(bush.terminal_partition(p)),
            )
        })
        .collect();
    let continuations = bundle
        .continuations()
        .iter()
        .map(|m| {
            let class: Vec<String> = m.class().iter().map(|&v| name(v)).collect();
            let keyed = |t: &Table| -> BTreeMap<String, Vec<Scalar>> {
                class
                    .iter()
                    .cloned()
                    .zip(t.iter().map(|r| scalar_row(r)))
                    .collect()
            };
            match m.kind() {
                PayoffKind::Constant(t) => ContinuationFile::Constant {
                    class: class.clone(),
                    payoffs: keyed(t),
                },
                PayoffKind::Function(Builtin::Ex1Subgame { s }) => ContinuationFile::Function {
                    class: class.clone(),
                    name: "ex1-subgame-value".into(),
                    params: BTreeMap::from([("s".to_string(), Scalar::Number(*s))]),
                    vertex_tables: None,
                },
                PayoffKind::Function(Builtin::Linear { tables }) => ContinuationFile::Function {
                    class: class.clone(),
                    name: "linear".into(),
                    params: BTreeMap::new(),
                    vertex_tables: Some(
                        class
                            .iter()
                            .cloned()
                            .zip(tables.iter().map(keyed))
                            .collect(),
                    ),
                },
                PayoffKind::Samples(g) => ContinuationFile::Samples {
                    class: class.clone(),
                    interpolation: g.interpolation,
                    points: g
                        .points
                        .iter()
                        .map(|p| SamplePointFile {
                            w: p.w.clone(),
                            values: p
                                .values
                                .iter()
                                .map(|t| class.iter().cloned().zip(t.iter().cloned()).collect())
                                .collect(),
                        })
                        .collect(),
                },
            }
        })
        .collect();
    BundleFile {
        parameters: bundle.parameters().clone(),
        players: bush.players().to_vec(),
        vertices: bush.names().to_vec(),
        arrows: bush
            .arrows()
            .iter()
            .map(|&(a, b)| (name(a), name(b)))
            .collect(),
        nature,
        info_partitions,
        root_partitions: Some(root_partitions),
        terminal_partitions: Some(terminal_partitions),
        continuations,
        profile: None,
    }
}
