//! Continuation payoff models F_C ⊆ Δ(C) × R^{C×N}.
//!
//! Arbitrary compact correspondences have no finite description, so three
//! finite kinds are supported: a table that does not depend on the
//! distribution over C, a builtin single-valued evaluator, and a sampled
//! graph with an interpolation rule. Sampled graphs may be empty at some
//! sample points; evaluation then returns no value.

use serde::{Deserialize, Serialize};

use super::bush::VertexId;
use super::ModelError;

/// Payoffs indexed `[terminal in class order][player]`.
pub type Table = Vec<Vec<f64>>;

#[derive(Clone, Debug, PartialEq)]
pub struct PayoffModel {
    class: Vec<VertexId>,
    players: usize,
    kind: PayoffKind,
    bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PayoffKind {
    Constant(Table),
    Function(Builtin),
    Samples(SampledGraph),
}

/// Registered single-valued evaluators w ∈ Δ(C) -> R^{C×N}.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    /// Continuation of the two-state zero-sum game between the second and
    /// third player when the first player's choice is not observed: on the
    /// class `[X, Y]` with `w = (p, 1-p)` both opponents mix `1-p` on their
    /// first action; the first player collects `1+s` on (second action,
    /// first action) in X and `1` on (first action, second action) in Y.
    Ex1Subgame { s: f64 },
    /// `y(w) = Σ_u w_u · tables[u]`.
    Linear { tables: Vec<Table> },
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Ex1Subgame { .. } => "ex1-subgame-value",
            Builtin::Linear { .. } => "linear",
        }
    }

    fn eval(&self, w: &[f64]) -> Table {
        match self {
            Builtin::Ex1Subgame { s } => {
                let p = w[0];
                let alpha = 1.0 - p;
                let beta = 1.0 - p;
                ex1_subgame_table(*s, alpha, beta)
            }
            Builtin::Linear { tables } => {
                let rows = tables[0].len();
                let cols = tables[0][0].len();
                let mut out = vec![vec![0.0; cols]; rows];
                for (wu, tab) in w.iter().zip(tables) {
                    for (o, t) in out.iter_mut().zip(tab) {
                        for (x, y) in o.iter_mut().zip(t) {
                            *x += wu * y;
                        }
                    }
                }
                out
            }
        }
    }
}

/// Per-state conditional payoffs of the two-state subgame when the second
/// player puts `alpha` on the first action and the third player `beta`.
pub fn ex1_subgame_table(s: f64, alpha: f64, beta: f64) -> Table {
    // state X: (L,l)=9, otherwise 1; state Y: (R,r)=9, otherwise 1
    let two_x = 1.0 + 8.0 * alpha * beta;
    let two_y = 1.0 + 8.0 * (1.0 - alpha) * (1.0 - beta);
    let one_x = (1.0 + s) * beta * (1.0 - alpha);
    let one_y = alpha * (1.0 - beta);
    vec![vec![one_x, two_x, -two_x], vec![one_y, two_y, -two_y]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    /// Values of the nearest sample point.
    Nearest,
    /// Piecewise-linear for classes of at most two terminals: between two
    /// consecutive sample abscissae every pair of values is joined by a
    /// segment.
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplePoint {
    pub w: Vec<f64>,
    pub values: Vec<Table>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledGraph {
    pub points: Vec<SamplePoint>,
    pub interpolation: Interpolation,
}

const ABSCISSA_TOL: f64 = 1e-12;

impl SampledGraph {
    fn nearest(&self, w: &[f64]) -> Vec<Table> {
        let mut best: Option<(f64, &SamplePoint)> = None;
        for pt in &self.points {
            let d = l2(&pt.w, w);
            if best.map_or(true, |(bd, _)| d < bd - 1e-15) {
                best = Some((d, pt));
            }
        }
        best.map(|(_, p)| p.values.clone()).unwrap_or_default()
    }

    fn linear(&self, w: &[f64]) -> Vec<Table> {
        if w.len() == 1 {
            return self.nearest(w);
        }
        let t = w[0];
        let mut pts: Vec<&SamplePoint> = self.points.iter().collect();
        pts.sort_by(|a, b| a.w[0].total_cmp(&b.w[0]));
        if let Some(p) = pts.iter().find(|p| (p.w[0] - t).abs() <= ABSCISSA_TOL) {
            return p.values.clone();
        }
        let Some(hi) = pts.iter().position(|p| p.w[0] > t) else {
            return Vec::new();
        };
        if hi == 0 {
            return Vec::new();
        }
        let (a, b) = (pts[hi - 1], pts[hi]);
        let lam = (t - a.w[0]) / (b.w[0] - a.w[0]);
        let mut out = Vec::new();
        for ya in &a.values {
            for yb in &b.values {
                out.push(blend(ya, yb, lam));
            }
        }
        out
    }
}

fn blend(a: &Table, b: &Table, lam: f64) -> Table {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| (1.0 - lam) * x + lam * y)
                .collect()
        })
        .collect()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// L2 distance between two payoff tables of equal shape.
pub fn table_distance(a: &Table, b: &Table) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).powi(2)))
        .sum::<f64>()
        .sqrt()
}

fn table_bound(t: &Table) -> f64 {
    t.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl PayoffModel {
    pub fn new(class: Vec<VertexId>, players: usize, kind: PayoffKind) -> Result<Self, ModelError> {
        let k = class.len();
        if k == 0 {
            return Err(ModelError::Parse("continuation class is empty".into()));
        }
        let shape_ok = |t: &Table| t.len() == k && t.iter().all(|r| r.len() == players);
        let bound = match &kind {
            PayoffKind::Constant(t) => {
                if !shape_ok(t) {
                    return Err(ModelError::Parse(
                        "constant table has the wrong shape".into(),
                    ));
                }
                table_bound(t)
            }
            PayoffKind::Function(Builtin::Ex1Subgame { s }) => {
                if k != 2 || players != 3 {
                    return Err(ModelError::Parse(
                        "ex1-subgame-value needs a two-terminal class and three players".into(),
                    ));
                }
                9.0f64.max(1.0 + s.abs())
            }
            PayoffKind::Function(Builtin::Linear { tables }) => {
                if tables.len() != k || !tables.iter().all(shape_ok) {
                    return Err(ModelError::Parse(
                        "linear tables have the wrong shape".into(),
                    ));
                }
                tables.iter().map(table_bound).fold(0.0, f64::max)
            }
            PayoffKind::Samples(g) => {
                if g.interpolation == Interpolation::Linear && k > 2 {
                    return Err(ModelError::Parse(
                        "linear interpolation supports classes of at most two terminals".into(),
                    ));
                }
                let mut b = 0.0f64;
                for p in &g.points {
                    if p.w.len() != k || !p.values.iter().all(shape_ok) {
                        return Err(ModelError::Parse("sample point has the wrong shape".into()));
                    }
                    for v in &p.values {
                        b = b.max(table_bound(v));
                    }
                }
                b
            }
        };
        let mut class = class;
        let mut kind = kind;
        // keep class sorted; permute tables accordingly
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| class[i]);
        if order.iter().enumerate().any(|(i, &j)| i != j) {
            let perm_t = |t: &Table| order.iter().map(|&i| t[i].clone()).collect::<Table>();
            let perm_w = |w: &Vec<f64>| order.iter().map(|&i| w[i]).collect::<Vec<f64>>();
            kind = match kind {
                PayoffKind::Constant(t) => PayoffKind::Constant(perm_t(&t)),
                PayoffKind::Function(Builtin::Linear { tables }) => {
                    let tables: Vec<Table> = order.iter().map(|&i| perm_t(&tables[i])).collect();
                    PayoffKind::Function(Builtin::Linear { tables })
                }
                PayoffKind::Function(Builtin::Ex1Subgame { .. }) => {
                    return Err(ModelError::Parse(
                        "ex1-subgame-value expects its class listed as [X, Y] in vertex order"
                            .into(),
                    ))
                }
                PayoffKind::Samples(g) => PayoffKind::Samples(SampledGraph {
                    interpolation: g.interpolation,
                    points: g
                        .points
                        .iter()
                        .map(|p| SamplePoint {
                            w: perm_w(&p.w),
                            values: p.values.iter().map(perm_t).collect(),
                        })
                        .collect(),
                }),
            };
            class = order.iter().map(|&i| class[i]).collect();
        }
        Ok(Self {
            class,
            players,
            kind,
            bound: bound + 1.0,
        })
    }

    pub fn constant(class: Vec<VertexId>, table: Table) -> Result<Self, ModelError> {
        let players = table.first().map_or(0, |r| r.len());
        Self::new(class, players, PayoffKind::Constant(table))
    }

    /// Terminals of the class, in vertex order.
    pub fn class(&self) -> &[VertexId] {
        &self.class
    }

    pub fn kind(&self) -> &PayoffKind {
        &self.kind
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// Strict upper bound on every payoff magnitude the model can produce.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// The value set F_C(w), in a stable order. Empty means no value.
    pub fn evaluate(&self, w: &[f64]) -> Vec<Table> {
        match &self.kind {
            PayoffKind::Constant(t) => vec![t.clone()],
            PayoffKind::Function(f) => vec![f.eval(w)],
            PayoffKind::Samples(g) => match g.interpolation {
                Interpolation::Nearest => g.nearest(w),
                Interpolation::Linear => g.linear(w),
            },
        }
    }

    /// Like [`PayoffModel::evaluate`] but sampled graphs always use the
    /// values of the nearest sample.
    pub fn evaluate_nearest(&self, w: &[f64]) -> Vec<Table> {
        match &self.kind {
            PayoffKind::Samples(g) => g.nearest(w),
            _ => self.evaluate(w),
        }
    }

    /// Distance from `y` to the value set at `w`; infinite when empty.
    pub fn distance(&self, w: &[f64], y: &Table) -> f64 {
        self.evaluate(w)
            .iter()
            .map(|v| table_distance(v, y))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, w: &[f64], y: &Table, tol: f64) -> bool {
        self.distance(w, y) <= tol
    }

    /// Largest number of values at any sample point (1 for single-valued kinds).
    pub fn max_branches(&self) -> usize {
        match &self.kind {
            PayoffKind::Samples(g) => {
                let m = g.points.iter().map(|p| p.values.len()).max().unwrap_or(0);
                match g.interpolation {
                    Interpolation::Nearest => m,
                    Interpolation::Linear => m * m,
                }
            }
            _ => 1,
        }
    }

    pub fn is_multilinear_constant(&self) -> bool {
        matches!(self.kind, PayoffKind::Constant(_))
    }
}
