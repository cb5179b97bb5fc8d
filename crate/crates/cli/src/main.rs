mod example;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gamebush::model::{load_bundle, GameBundle, ModelError};
use gamebush::solver::{
    solve_bundle_perfect, solve_myopic, solve_perfect_at, sweep, PerfectPoint,
    RegularizationConfig, SolverConfig, SolverError, SweepEquilibrium, SweepPoint, SweepTable,
};
use gamebush::spanning::{has_spanning, span_instance_from_str};
use gamebush::strategies::Selector;
use gamebush::subgame::{
    enumerate_subgame_sets, has_perfect_recall, is_solvable, relevant_subgame_sets, SubgameError,
    DEFAULT_FAMILY_CAP,
};
use serde::Serialize;
use serde_json::json;

/// Game bushes and game bundles: validation, subgame sets, myopic
/// equilibria, bundle-perfect filtering and spanning checks.
#[derive(Parser, Debug)]
#[command(name = "gamebush", version)]
#[clap(allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// game bundle (JSON) or, for `span`, a spanning instance
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// root distribution as a comma list
    #[arg(long, global = true, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// grid mesh: the denominator k of h = 1/k, written `k` or `1/k`
    #[arg(long, global = true, value_parser = parse_mesh)]
    mesh: Option<usize>,
    /// certificate tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// regularization ε; turns on the blended continuation
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// regularization constant B (defaults to one above the payoff bound)
    #[arg(long = "bound-B", global = true)]
    bound_b: Option<f64>,
    /// largest strategy-profile count solved by support enumeration
    #[arg(long, global = true)]
    support_cap: Option<usize>,
    /// `first`, `nearest` or `branch:i,j,...`
    #[arg(long, global = true, value_parser = parse_selector)]
    selector: Option<Selector>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// write reports here instead of standard output
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// parameter override `name=value`, repeatable
    #[arg(long = "param", global = true, value_parser = parse_param)]
    params: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the structural rules of a bundle
    Validate,
    /// List the subgame sets, the relevant ones and a solvability chain
    Subgames,
    /// Myopic equilibria at one root distribution
    Solve,
    /// Myopic equilibria over the grid on the root simplex
    Sweep,
    /// Subgame-bundle-perfect equilibria, at --q or over the grid
    Perfect,
    /// Decide the spanning property of a simplicial correspondence
    Span,
    /// Reproduce one of the built-in examples
    Example {
        #[arg(value_parser = ["ex1", "ex2", "ex3"])]
        name: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// A failed run: exit code, error kind and message for the JSON error
/// object on standard error.
#[derive(Debug)]
pub struct Failure {
    pub(crate) code: u8,
    pub(crate) kind: &'static str,
    pub(crate) message: String,
}

impl Failure {
    pub(crate) fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            kind: "input",
            message: message.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let kind = match e {
            ModelError::Validation(_) => "validation",
            ModelError::Io { .. } => "io",
            _ => "input",
        };
        Self {
            code: 1,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Model(m) => m.into(),
            e => Self {
                code: 1,
                kind: "solver",
                message: e.to_string(),
            },
        }
    }
}

impl From<SubgameError> for Failure {
    fn from(e: SubgameError) -> Self {
        Self {
            code: 1,
            kind: "subgame",
            message: e.to_string(),
        }
    }
}

/// What a verb produced. A `failure` is reported after the files are
/// written: failed validation, or solver runs where some point has no
/// certified equilibrium.
pub struct Output {
    files: Vec<(String, String)>,
    failure: Option<Failure>,
}

impl Output {
    fn json(name: &str, value: &impl Serialize) -> Self {
        Self {
            files: vec![(format!("{name}.json"), to_json(value))],
            failure: None,
        }
    }

    fn incomplete(mut self, note: Option<String>) -> Self {
        self.failure = note.map(|message| Failure {
            code: 2,
            kind: "non-convergence",
            message,
        });
        self
    }
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn parse_mesh(s: &str) -> Result<usize, String> {
    let k = s.strip_prefix("1/").unwrap_or(s);
    let k: usize = k
        .parse()
        .map_err(|_| format!("mesh `{s}` is not `k` or `1/k`"))?;
    if k < 2 {
        return Err("mesh denominator must be at least 2".into());
    }
    Ok(k)
}

fn parse_selector(s: &str) -> Result<Selector, String> {
    match s {
        "first" => Ok(Selector::First),
        "nearest" => Ok(Selector::Nearest),
        _ => {
            let list = s
                .strip_prefix("branch:")
                .ok_or_else(|| format!("unknown selector `{s}`"))?;
            list.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|e| format!("branch index `{x}`: {e}"))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Selector::Branch)
        }
    }
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not name=value"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|e| format!("value of `{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

impl Cli {
    fn overrides(&self) -> BTreeMap<String, f64> {
        self.params.iter().cloned().collect()
    }

    fn input(&self) -> Result<&Path, Failure> {
        self.input
            .as_deref()
            .ok_or_else(|| Failure::input("this command needs --input"))
    }

    fn bundle(&self) -> Result<GameBundle, Failure> {
        Ok(load_bundle(self.input()?, &self.overrides())?)
    }

    fn config(&self, bundle: Option<&GameBundle>) -> Result<SolverConfig, Failure> {
        let mut config = SolverConfig::default();
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(Failure::input("--tol must be positive"));
            }
            config.tol = tol;
        }
        if let Some(k) = self.mesh {
            config.mesh = k;
        }
        if let Some(cap) = self.support_cap {
            config.support_cap = cap;
        }
        if let Some(selector) = &self.selector {
            config.selector = selector.clone();
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if self.epsilon.is_some() || self.bound_b.is_some() {
            let epsilon = self
                .epsilon
                .ok_or_else(|| Failure::input("--bound-B needs --epsilon"))?;
            let bound = match (self.bound_b, bundle) {
                (Some(b), _) => b,
                (None, Some(bundle)) => bundle.payoff_bound(),
                (None, None) => return Err(Failure::input("--epsilon needs --bound-B here")),
            };
            if !(bound > 0.0) {
                return Err(Failure::input("--bound-B must be positive"));
            }
            let reg = RegularizationConfig { epsilon, bound };
            match bundle {
                Some(b) => reg.check_for(b)?,
                None => reg.check()?,
            }
            config.regularization = Some(reg);
        }
        config.check()?;
        Ok(config)
    }

    fn q(&self, bundle: &GameBundle) -> Vec<f64> {
        self.q.clone().unwrap_or_else(|| {
            let k = bundle.bush().roots().len();
            vec![1.0 / k as f64; k]
        })
    }
}

fn validate(cli: &Cli) -> Result<Output, Failure> {
    let bundle = match load_bundle(cli.input()?, &cli.overrides()) {
        Ok(b) => b,
        Err(ModelError::Validation(violations)) => {
            let mut out = Output::json(
                "validate",
                &json!({ "valid": false, "violations": violations }),
            );
            out.failure = Some(Failure {
                code: 1,
                kind: "validation",
                message: format!("{} violation(s)", violations.len()),
            });
            return Ok(out);
        }
        Err(e) => return Err(e.into()),
    };
    let bush = bundle.bush();
    let meet: Vec<Vec<String>> = bundle
        .meet()
        .blocks()
        .iter()
        .map(|b| b.iter().map(|&t| bush.name(t).to_string()).collect())
        .collect();
    let recall = has_perfect_recall(bush);
    Ok(Output::json(
        "validate",
        &json!({
            "valid": true,
            "violations": [],
            "players": bush.players(),
            "vertices": bush.num_vertices(),
            "roots": bush.roots().iter().map(|&v| bush.name(v)).collect::<Vec<_>>(),
            "terminals": bush.terminals().len(),
            "meet_partition": meet,
            "perfect_recall": recall.ok,
            "recall_note": (!recall.ok).then(|| recall.describe(bush)),
            "multilinear": bundle.is_multilinear(),
        }),
    ))
}

fn subgames(cli: &Cli) -> Result<Output, Failure> {
    let bundle = cli.bundle()?;
    let bush = bundle.bush();
    let lattice = enumerate_subgame_sets(bush, DEFAULT_FAMILY_CAP)?;
    let relevant = relevant_subgame_sets(bush, DEFAULT_FAMILY_CAP)?;
    let recall = has_perfect_recall(bush);
    let chain = if recall.ok {
        is_solvable(bush)?.map(|c| c.iter().map(|s| s.names(bush)).collect::<Vec<_>>())
    } else {
        None
    };
    Ok(Output::json(
        "subgames",
        &json!({
            "sets": lattice.reports(bush),
            "covers": lattice.edges,
            "atoms": lattice.atoms,
            "relevant": relevant.iter().map(|s| s.names(bush)).collect::<Vec<_>>(),
            "perfect_recall": recall.ok,
            "solvable_chain": chain,
        }),
    ))
}

fn strategy_labels(bundle: &GameBundle) -> Result<Vec<Vec<String>>, Failure> {
    let bush = bundle.bush();
    let form = bush.form().map_err(|e| Failure::input(e.to_string()))?;
    Ok(form
        .spaces
        .iter()
        .map(|s| (0..s.count).map(|i| s.label(bush, i)).collect())
        .collect())
}

fn solve(cli: &Cli) -> Result<Output, Failure> {
    let bundle = cli.bundle()?;
    let config = cli.config(Some(&bundle))?;
    let q = cli.q(&bundle);
    let report = solve_myopic(&bundle, &q, &config)?;
    let incomplete = report
        .equilibria
        .is_empty()
        .then(|| format!("no certified equilibrium at q = {q:?}"));
    let out = match cli.format {
        Format::Json => Output::json(
            "solve",
            &json!({
                "q": q,
                "players": bundle.bush().players(),
                "strategies": strategy_labels(&bundle)?,
                "tol": config.tol,
                "equilibria": report.equilibria,
                "diagnostics": report.diagnostics,
            }),
        ),
        Format::Csv => {
            let table = SweepTable {
                mesh: config.mesh,
                tol: config.tol,
                players: bundle.bush().players().to_vec(),
                points: vec![SweepPoint {
                    q,
                    equilibria: report
                        .equilibria
                        .into_iter()
                        .map(SweepEquilibrium::from)
                        .collect(),
                    diagnostics: report.diagnostics,
                }],
            };
            Output {
                files: vec![("solve.csv".into(), table.to_csv())],
                failure: None,
            }
        }
    };
    Ok(out.incomplete(incomplete))
}

fn sweep_verb(cli: &Cli) -> Result<Output, Failure> {
    let bundle = cli.bundle()?;
    let config = cli.config(Some(&bundle))?;
    let table = sweep(&bundle, &config)?;
    let empty: Vec<&Vec<f64>> = table
        .points
        .iter()
        .filter(|p| p.equilibria.is_empty())
        .map(|p| &p.q)
        .collect();
    let incomplete = (!empty.is_empty()).then(|| {
        format!(
            "{} of {} grid points have no certified equilibrium",
            empty.len(),
            table.points.len()
        )
    });
    let files = if cli.out_dir.is_some() {
        vec![
            ("sweep.csv".into(), table.to_csv()),
            ("sweep.json".into(), table.to_json() + "\n"),
        ]
    } else {
        match cli.format {
            Format::Json => vec![("sweep.json".into(), table.to_json() + "\n")],
            Format::Csv => vec![("sweep.csv".into(), table.to_csv())],
        }
    };
    Ok(Output {
        files,
        failure: None,
    }
    .incomplete(incomplete))
}

fn perfect(cli: &Cli) -> Result<Output, Failure> {
    let bundle = cli.bundle()?;
    let config = cli.config(Some(&bundle))?;
    if cli.format == Format::Csv {
        return Err(Failure::input(
            "csv output is available for solve and sweep",
        ));
    }
    let points: Vec<PerfectPoint> = match &cli.q {
        Some(q) => vec![solve_perfect_at(&bundle, q, &config)?],
        None => solve_bundle_perfect(&bundle, &config)?.points,
    };
    let missing = points.iter().filter(|p| p.equilibria.is_empty()).count();
    let out = Output::json(
        "perfect",
        &json!({
            "players": bundle.bush().players(),
            "strategies": strategy_labels(&bundle)?,
            "points": points,
        }),
    );
    let note = (missing > 0).then(|| {
        format!(
            "{missing} of {} points have no certified perfect equilibrium",
            points.len()
        )
    });
    Ok(out.incomplete(note))
}

fn span(cli: &Cli) -> Result<Output, Failure> {
    let path = cli.input()?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let (pair, f) = span_instance_from_str(&text).map_err(|e| Failure::input(e.to_string()))?;
    let verdict = has_spanning(&f, &pair).map_err(|e| Failure::input(e.to_string()))?;
    let witness = verdict.witness_simplices(&f, pair.dimension());
    Ok(Output::json(
        "span",
        &json!({
            "spans": verdict.spans,
            "witness": verdict.witness,
            "witness_simplices": witness,
            "method": verdict.method,
            "unknowns": verdict.unknowns,
            "equations": verdict.equations,
            "rank": verdict.rank,
        }),
    ))
}

fn emit(cli: &Cli, out: Output) -> Result<(), Failure> {
    match &cli.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure {
                code: 1,
                kind: "io",
                message: format!("{}: {e}", dir.display()),
            })?;
            for (name, text) in &out.files {
                let path = dir.join(name);
                std::fs::write(&path, text).map_err(|e| Failure {
                    code: 1,
                    kind: "io",
                    message: format!("{}: {e}", path.display()),
                })?;
            }
        }
        None => {
            for (_, text) in &out.files {
                print!("{text}");
            }
        }
    }
    match out.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = match &cli.command {
        Command::Validate => validate(cli)?,
        Command::Subgames => subgames(cli)?,
        Command::Solve => solve(cli)?,
        Command::Sweep => sweep_verb(cli)?,
        Command::Perfect => perfect(cli)?,
        Command::Span => span(cli)?,
        Command::Example { name } => {
            if cli.format == Format::Csv {
                return Err(Failure::input(
                    "csv output is available for solve and sweep",
                ));
            }
            let config = cli.config(None)?;
            Output::json(name, &example::report(name, &cli.overrides(), &config)?)
        }
    };
    emit(cli, out)
}

fn report_error(code: u8, kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn threads() -> Result<(), Failure> {
    let Ok(n) = std::env::var("GB_THREADS") else {
        return Ok(());
    };
    let n: usize = n
        .parse()
        .map_err(|_| Failure::input(format!("GB_THREADS = `{n}` is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error(1, "usage", e.to_string().trim()),
    };
    if let Err(f) = threads() {
        return report_error(f.code, f.kind, &f.message);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_error(f.code, f.kind, &f.message),
    }
}
