use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_rational::Ratio;
use num_traits::CheckedAdd;
use serde::{Deserialize, Serialize};

use super::bush::{GameBush, VertexId};
use super::scalar::Probability;

/// Which structural rule a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// A vertex has more than one incoming arrow.
    UniquePath,
    /// A vertex cannot be reached from any root (it lies on a cycle).
    RootedPaths,
    /// A non-terminal vertex has fewer than two outgoing arrows.
    Branching,
    /// Non-terminal vertices must be owned by exactly one of nature or a player.
    DecisionCover,
    /// A terminal vertex is listed as a chance node or in an information set.
    TerminalDecision,
    NaturePositivity,
    NatureNormalization,
    /// Chance outcomes or action children do not match the outgoing arrows.
    ActionBijection,
    InfoPartition,
    RootPartition,
    TerminalPartition,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok();
        write!(
            f,
            "{}",
            s.and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub vertices: Vec<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}]: {}",
            self.rule,
            self.vertices.join(", "),
            self.detail
        )
    }
}

struct Report<'a> {
    bush: &'a GameBush,
    out: Vec<Violation>,
}

impl Report<'_> {
    fn push(&mut self, rule: Rule, vs: &[VertexId], detail: impl Into<String>) {
        self.out.push(Violation {
            rule,
            vertices: vs.iter().map(|&v| self.bush.name(v).to_string()).collect(),
            detail: detail.into(),
        });
    }
}

pub(crate) fn validate_bush(bush: &GameBush) -> Vec<Violation> {
    let mut r = Report {
        bush,
        out: Vec::new(),
    };
    check_arrows(&mut r);
    check_ownership(&mut r);
    check_nature(&mut r);
    check_info_sets(&mut r);
    check_partitions(&mut r);
    r.out
}

fn check_arrows(r: &mut Report) {
    let bush = r.bush;
    for v in bush.vertices() {
        if bush.parents(v).len() > 1 {
            r.push(
                Rule::UniquePath,
                &[v],
                format!("{} incoming arrows", bush.parents(v).len()),
            );
        }
    }
    let mut seen = vec![false; bush.num_vertices()];
    let mut queue: VecDeque<VertexId> = bush.roots().iter().copied().collect();
    for &v in bush.roots() {
        seen[v.0] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &c in bush.children(v) {
            if !seen[c.0] {
                seen[c.0] = true;
                queue.push_back(c);
            }
        }
    }
    let unreachable: Vec<VertexId> = bush.vertices().filter(|v| !seen[v.0]).collect();
    if !unreachable.is_empty() {
        r.push(
            Rule::RootedPaths,
            &unreachable,
            "not reachable from a root; the arrows contain a cycle",
        );
    }
    for v in bush.vertices() {
        let k = bush.children(v).len();
        if k == 1 {
            r.push(Rule::Branching, &[v], "exactly one outgoing arrow");
        }
    }
}

fn check_ownership(r: &mut Report) {
    let bush = r.bush;
    let (nature, info_sets, _, _) = bush.parts();
    let mut owners = vec![0usize; bush.num_vertices()];
    for nat in nature {
        owners[nat.vertex.0] += 1;
    }
    for w in info_sets {
        for v in w.nodes() {
            owners[v.0] += 1;
        }
    }
    for v in bush.vertices() {
        let terminal = bush.is_terminal(v);
        match (terminal, owners[v.0]) {
            (true, 0) | (false, 1) => {}
            (true, _) => r.push(
                Rule::TerminalDecision,
                &[v],
                "terminal vertex listed as a chance node or in an information set",
            ),
            (false, 0) => r.push(
                Rule::DecisionCover,
                &[v],
                "non-terminal vertex belongs to no player and is not a chance node",
            ),
            (false, k) => r.push(
                Rule::DecisionCover,
                &[v],
                format!("vertex assigned {k} times across players and nature"),
            ),
        }
    }
}

fn same_children(bush: &GameBush, v: VertexId, listed: &[VertexId]) -> bool {
    let a: BTreeSet<VertexId> = listed.iter().copied().collect();
    let b: BTreeSet<VertexId> = bush.children(v).iter().copied().collect();
    a.len() == listed.len() && a == b
}

fn check_nature(r: &mut Report) {
    let bush = r.bush;
    let (nature, _, _, _) = bush.parts();
    for nat in nature {
        let v = nat.vertex;
        let kids: Vec<VertexId> = nat.outcomes.iter().map(|(c, _)| *c).collect();
        if !same_children(bush, v, &kids) {
            r.push(
                Rule::ActionBijection,
                &[v],
                "chance outcomes do not match the outgoing arrows",
            );
        }
        let bad: Vec<String> = nat
            .outcomes
            .iter()
            .filter(|(_, p)| !p.is_positive())
            .map(|(c, p)| format!("{} -> {} has probability {p}", bush.name(v), bush.name(*c)))
            .collect();
        if !bad.is_empty() {
            r.push(Rule::NaturePositivity, &[v], bad.join("; "));
        }
        let exact: Option<Ratio<i64>> =
            nat.outcomes
                .iter()
                .try_fold(Ratio::from(0), |acc, (_, p)| match p {
                    Probability::Exact(q) => acc.checked_add(q),
                    Probability::Float(_) => None,
                });
        let ok = match exact {
            Some(total) => total == Ratio::from(1),
            None => {
                let total: f64 = nat.outcomes.iter().map(|(_, p)| p.value()).sum();
                (total - 1.0).abs() <= 1e-12
            }
        };
        if !ok {
            r.push(
                Rule::NatureNormalization,
                &[v],
                "probabilities do not sum to one",
            );
        }
    }
}

fn check_info_sets(r: &mut Report) {
    let bush = r.bush;
    let (_, info_sets, _, _) = bush.parts();
    let mut ids = HashSet::new();
    for w in info_sets {
        let nodes: Vec<VertexId> = w.nodes().collect();
        if !ids.insert((w.player, w.id.clone())) {
            r.push(
                Rule::InfoPartition,
                &nodes,
                format!("duplicate information set id `{}`", w.id),
            );
        }
        if nodes.is_empty() {
            r.push(
                Rule::InfoPartition,
                &[],
                format!("information set `{}` is empty", w.id),
            );
        }
        let distinct: HashSet<&String> = w.actions.iter().collect();
        if distinct.len() != w.actions.len() {
            r.push(
                Rule::InfoPartition,
                &nodes,
                format!("repeated action label in `{}`", w.id),
            );
        }
        for (v, kids) in &w.moves {
            if kids.len() != w.actions.len() || !same_children(bush, *v, kids) {
                r.push(
                    Rule::ActionBijection,
                    &[*v],
                    format!(
                        "actions of `{}` ({}) are not in bijection with the {} outgoing arrows",
                        w.id,
                        w.actions.len(),
                        bush.children(*v).len()
                    ),
                );
            }
        }
    }
}

fn check_partition(
    r: &mut Report,
    rule: Rule,
    what: &str,
    player: usize,
    blocks: &[Vec<VertexId>],
    universe: &[VertexId],
) {
    let name = r.bush.players()[player].clone();
    let mut seen = HashSet::new();
    for b in blocks {
        if b.is_empty() {
            r.push(
                rule,
                &[],
                format!("{what} partition of {name} has an empty block"),
            );
        }
        for &v in b {
            if !seen.insert(v) {
                r.push(
                    rule,
                    &[v],
                    format!("{what} partition of {name} lists the vertex twice"),
                );
            }
            if !universe.contains(&v) {
                r.push(
                    rule,
                    &[v],
                    format!("{what} partition of {name} contains a non-{what}"),
                );
            }
        }
    }
    let missing: Vec<VertexId> = universe
        .iter()
        .copied()
        .filter(|v| !seen.contains(v))
        .collect();
    if !missing.is_empty() {
        r.push(
            rule,
            &missing,
            format!("not covered by the {what} partition of {name}"),
        );
    }
}

fn check_partitions(r: &mut Report) {
    let bush = r.bush;
    let (_, _, roots, terms) = bush.parts();
    for p in 0..bush.num_players() {
        check_partition(r, Rule::RootPartition, "root", p, &roots[p], bush.roots());
        check_partition(
            r,
            Rule::TerminalPartition,
            "terminal",
            p,
            &terms[p],
            bush.terminals(),
        );
    }
}
