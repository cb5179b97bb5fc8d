use serde::Serialize;

use crate::model::{GameBush, Owner, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
enum Step {
    RootBlock(usize),
    Move { info_set: usize, action: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecallReport {
    pub ok: bool,
    /// first violating (player, global information set index)
    pub violation: Option<(usize, usize)>,
    pub reason: Option<String>,
}

impl RecallReport {
    pub fn describe(&self, bush: &GameBush) -> String {
        match self.violation {
            None => "perfect recall".into(),
            Some((p, k)) => format!(
                "{} at `{}`: {}",
                bush.players()[p],
                bush.info_sets()[k].id,
                self.reason.as_deref().unwrap_or("")
            ),
        }
    }
}

/// The player's experience before `v`: their root block followed by the
/// (information set, action) pairs they chose on the path.
fn experience(bush: &GameBush, player: usize, v: VertexId) -> Vec<Step> {
    let path = bush.path_to(v);
    let root = path[0];
    let block = bush
        .root_partition(player)
        .iter()
        .position(|b| b.contains(&root))
        .unwrap_or(usize::MAX);
    let mut out = vec![Step::RootBlock(block)];
    for w in path.windows(2) {
        if let Some(Owner::Player {
            player: p,
            info_set,
        }) = bush.owner(w[0])
        {
            if p == player {
                let set = &bush.info_sets()[info_set];
                let action = (0..set.actions.len())
                    .find(|&a| set.child(w[0], a) == Some(w[1]))
                    .unwrap_or(usize::MAX);
                out.push(Step::Move { info_set, action });
            }
        }
    }
    out
}

/// Every node of an information set must carry the same experience, and
/// no information set may occur twice in it (including the set itself).
pub fn has_perfect_recall(bush: &GameBush) -> RecallReport {
    for (k, w) in bush.info_sets().iter().enumerate() {
        let mut first: Option<Vec<Step>> = None;
        for v in w.nodes() {
            let exp = experience(bush, w.player, v);
            let mut seen = vec![k];
            for step in &exp {
                if let Step::Move { info_set, .. } = step {
                    if seen.contains(info_set) {
                        return RecallReport {
                            ok: false,
                            violation: Some((w.player, k)),
                            reason: Some(format!(
                                "information set `{}` repeats on the path to `{}`",
                                bush.info_sets()[*info_set].id,
                                bush.name(v)
                            )),
                        };
                    }
                    seen.push(*info_set);
                }
            }
            match &first {
                None => first = Some(exp),
                Some(f) if *f != exp => {
                    return RecallReport {
                        ok: false,
                        violation: Some((w.player, k)),
                        reason: Some(format!(
                            "nodes `{}` and `{}` have different histories",
                            bush.name(w.moves[0].0),
                            bush.name(v)
                        )),
                    }
                }
                _ => {}
            }
        }
    }
    RecallReport {
        ok: true,
        violation: None,
        reason: None,
    }
}
