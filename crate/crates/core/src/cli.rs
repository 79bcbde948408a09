//! Batch command line: every command prints one JSON report to stdout (or
//! `--output`) and a short summary to stderr.
//!
//! Exit codes: 0 verified, 1 falsified or golden drift, 2 usage or internal
//! error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use crate::algebra::{build_mn, build_tn, Algebra, AlgebraSpec, Element, BASIS_ORDERING};
use crate::error::{Error, Result};
use crate::linmap::PACKING_LAYOUT;
use crate::oracle::{self, CheckBranch, CheckReport, Outcome};
use crate::scalar::ScalarDomain;
use crate::solver::{self, compare, Mode, Relation, SolutionSpace};

pub const TOOL_NAME: &str = "jordan-gh";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "jordan-gh", version, about = "Exact {g,h}-derivation solution spaces on T_n and M_n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one constraint system and print its null-space basis.
    Solve {
        #[arg(long)]
        algebra: AlgebraSpec,
        #[arg(long)]
        field: ScalarDomain,
        #[arg(long)]
        mode: Mode,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Jordan {g,h}-derivations on T_n with the corner assumption are {g,h}-derivations.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1 {
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        field: ScalarDomain,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Jordan {g,h}-derivations on M_n are {g,h}-derivations.
    #[command(name = "verify-theorem2")]
    VerifyTheorem2 {
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        field: ScalarDomain,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the (0, g, -g) counterexample on T_2.
    Counterexample {
        #[arg(long)]
        field: ScalarDomain,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cross-check solver, dense oracle and element-level checkers.
    #[command(name = "oracle-check")]
    OracleCheck {
        #[arg(long)]
        algebra: AlgebraSpec,
        #[arg(long)]
        field: ScalarDomain,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Compare computed dimensions with this golden file; drift exits 1.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Add wall-clock timings to the report (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Solve { common, .. }
            | Command::VerifyTheorem1 { common, .. }
            | Command::VerifyTheorem2 { common, .. }
            | Command::Counterexample { common, .. }
            | Command::OracleCheck { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::VerifyTheorem1 { .. } => "verify-theorem1",
            Command::VerifyTheorem2 { .. } => "verify-theorem2",
            Command::Counterexample { .. } => "counterexample",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }
}

/// Key of a golden-file entry: `"<algebra>|<field>|<mode>"`, e.g. `"tn:3|Q|gh"`.
pub fn golden_key(spec: AlgebraSpec, field: ScalarDomain, mode: Mode) -> String {
    format!("{spec}|{field}|{mode}")
}

/// Golden file: a JSON object mapping [`golden_key`]s to dimensions.
pub type Golden = BTreeMap<String, usize>;

pub fn read_golden(path: &std::path::Path) -> Result<Golden> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Json(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}

/// Entries of `computed` that disagree with `golden`. Keys the golden file
/// does not record are not drift.
fn golden_section(golden: &Golden, computed: &[(String, usize)]) -> (Value, bool) {
    let mut drift = Vec::new();
    let mut checked = 0;
    for (key, dim) in computed {
        if let Some(expected) = golden.get(key) {
            checked += 1;
            if expected != dim {
                let mut d = Map::new();
                d.insert("key".into(), Value::String(key.clone()));
                d.insert("expected".into(), Value::from(*expected));
                d.insert("actual".into(), Value::from(*dim));
                drift.push(Value::Object(d));
            }
        }
    }
    let ok = drift.is_empty();
    let mut map = Map::new();
    map.insert("checked".into(), Value::from(checked));
    map.insert("unrecorded".into(), Value::from(computed.len() - checked));
    map.insert("drift".into(), Value::Array(drift));
    (Value::Object(map), ok)
}

/// Dimensions of the three spaces on one algebra plus the theorem verdict.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub algebra: AlgebraSpec,
    pub field: ScalarDomain,
    /// Space that the theorem claims equals the `{g,h}` space.
    pub hypothesis_mode: Mode,
    pub equal: bool,
    pub relation: Relation,
    pub dim_gh: usize,
    pub dim_jordan: usize,
    pub dim_jordan_corner: usize,
    /// Relation of the plain Jordan space to the `{g,h}` space.
    pub jordan_vs_gh: Relation,
    /// A triple in the hypothesis space but outside the `{g,h}` space.
    pub witness: Option<Value>,
    pub elapsed: Duration,
}

impl TheoremReport {
    pub fn dims(&self) -> [(Mode, usize); 3] {
        [
            (Mode::Gh, self.dim_gh),
            (Mode::Jordan, self.dim_jordan),
            (Mode::JordanWithCorner, self.dim_jordan_corner),
        ]
    }

    pub fn to_json(&self, timing: bool) -> Value {
        let mut map = Map::new();
        map.insert("algebra".into(), Value::String(self.algebra.to_string()));
        map.insert("hypothesis_mode".into(), Value::String(self.hypothesis_mode.to_string()));
        map.insert("equal".into(), Value::Bool(self.equal));
        map.insert("relation".into(), Value::String(self.relation.to_string()));
        map.insert("dim_gh".into(), Value::from(self.dim_gh));
        map.insert("dim_jordan".into(), Value::from(self.dim_jordan));
        map.insert("dim_jordan_corner".into(), Value::from(self.dim_jordan_corner));
        map.insert("jordan_vs_gh".into(), Value::String(self.jordan_vs_gh.to_string()));
        if let Some(w) = &self.witness {
            map.insert("witness".into(), w.clone());
        }
        if timing {
            map.insert("elapsed_ms".into(), Value::from(self.elapsed.as_millis() as u64));
        }
        Value::Object(map)
    }
}

/// Solves the `{g,h}`, Jordan and Jordan-with-corner spaces concurrently.
pub fn solve_all_modes(algebra: &Arc<Algebra>) -> [SolutionSpace; 3] {
    std::thread::scope(|s| {
        let handles = Mode::ALL.map(|m| s.spawn(move || solver::solve(algebra, m)));
        handles.map(|h| h.join().expect("solver thread panicked"))
    })
}

fn theorem_report(algebra: &Arc<Algebra>, hypothesis: Mode) -> Result<TheoremReport> {
    let start = Instant::now();
    let [gh, jordan, corner] = solve_all_modes(algebra);
    let hyp = if hypothesis == Mode::JordanWithCorner { &corner } else { &jordan };
    let cmp = compare(hyp, &gh)?;
    let unassisted = compare(&jordan, &gh)?;
    let equal = cmp.relation == Relation::Equal;
    Ok(TheoremReport {
        algebra: algebra.spec(),
        field: algebra.domain(),
        hypothesis_mode: hypothesis,
        equal,
        relation: cmp.relation,
        dim_gh: gh.dim(),
        dim_jordan: jordan.dim(),
        dim_jordan_corner: corner.dim(),
        jordan_vs_gh: unassisted.relation,
        witness: if equal { None } else { cmp.witness_triple().map(|t| t.to_json()) },
        elapsed: start.elapsed(),
    })
}

fn require_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::PreconditionViolated(format!("theorem verification needs n >= 2, got {n}")))
    } else {
        Ok(())
    }
}

/// Jordan-with-corner space versus `{g,h}` space on `T_n`.
pub fn verify_theorem1(n: usize, field: ScalarDomain) -> Result<TheoremReport> {
    require_n(n)?;
    theorem_report(&build_tn(n, field)?, Mode::JordanWithCorner)
}

/// Plain Jordan space versus `{g,h}` space on `M_n`.
pub fn verify_theorem2(n: usize, field: ScalarDomain) -> Result<TheoremReport> {
    require_n(n)?;
    theorem_report(&build_mn(n, field)?, Mode::Jordan)
}

#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    pub field: ScalarDomain,
    pub jordan: CheckReport,
    pub gh: CheckReport,
    /// Jordan passed, `{g,h}` failed at `(e11, e11)` with defect `-e12`.
    pub reproduced: bool,
}

impl CounterexampleReport {
    pub fn to_json(&self) -> Value {
        let t2 = build_tn(2, self.field).expect("T_2 builds");
        let e12 = Element::unit_matrix(&t2, 1, 2).expect("e12 in T_2");
        let mut map = Map::new();
        map.insert("algebra".into(), Value::String("tn:2".into()));
        map.insert("triple".into(), Value::String("(0, a∘x, -(a∘x)), a = e11 + e12 + e22".into()));
        map.insert("expected_defect".into(), (-&e12).to_json());
        map.insert("reproduced".into(), Value::Bool(self.reproduced));
        map.insert("jordan".into(), self.jordan.to_json());
        map.insert("gh".into(), self.gh.to_json());
        Value::Object(map)
    }
}

pub fn run_counterexample(field: ScalarDomain, trials: u64, seed: u64) -> CounterexampleReport {
    let t = oracle::counterexample_t2(field);
    let alg = t.algebra();
    let jordan = oracle::is_jordan_gh_derivation(&t, trials.max(1), seed);
    let gh = oracle::is_gh_derivation(&t, trials.max(1), seed);
    let e11 = Element::unit_matrix(alg, 1, 1).expect("e11 in T_2");
    let e12 = Element::unit_matrix(alg, 1, 2).expect("e12 in T_2");
    let reproduced = jordan.passed()
        && gh.outcome == Outcome::Failed
        && gh.witness.as_ref().is_some_and(|w| {
            w.x == e11 && w.y == e11 && w.branch == CheckBranch::GFirst && w.defect == -&e12
        });
    CounterexampleReport { field, jordan, gh, reproduced }
}

/// Per-mode agreement of the solver with the dense oracles and checkers.
#[derive(Clone, Debug)]
pub struct ModeCheck {
    pub mode: Mode,
    pub solver_dim: usize,
    /// Dense elimination of the assembled rows (`None` past the column budget).
    pub oracle_dim: Option<usize>,
    /// Dense elimination of the from-definitions matrix.
    pub definitions_dim: Option<usize>,
    /// Basis triples rejected by the element-level checker.
    pub unsound_basis_vectors: usize,
}

impl ModeCheck {
    pub fn ok(&self) -> bool {
        self.unsound_basis_vectors == 0
            && self.oracle_dim.map_or(true, |d| d == self.solver_dim)
            && self.definitions_dim.map_or(true, |d| d == self.solver_dim)
    }
}

#[derive(Clone, Debug)]
pub struct OracleCheckReport {
    pub algebra: AlgebraSpec,
    pub modes: Vec<ModeCheck>,
    pub monotone: bool,
    /// One swap-lemma report per Jordan-space basis triple.
    pub lemma_reports: Vec<CheckReport>,
}

impl OracleCheckReport {
    pub fn ok(&self) -> bool {
        self.monotone
            && self.modes.iter().all(ModeCheck::ok)
            && self.lemma_reports.iter().all(CheckReport::passed)
    }

    pub fn dim(&self, mode: Mode) -> usize {
        self.modes.iter().find(|m| m.mode == mode).map(|m| m.solver_dim).unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let mut map = Map::new();
                map.insert("mode".into(), Value::String(m.mode.to_string()));
                map.insert("solver_dim".into(), Value::from(m.solver_dim));
                map.insert("oracle_dim".into(), m.oracle_dim.map_or(Value::Null, Value::from));
                map.insert(
                    "definitions_dim".into(),
                    m.definitions_dim.map_or(Value::Null, Value::from),
                );
                map.insert("unsound_basis_vectors".into(), Value::from(m.unsound_basis_vectors));
                map.insert("ok".into(), Value::Bool(m.ok()));
                Value::Object(map)
            })
            .collect();
        let count = |o: Outcome| self.lemma_reports.iter().filter(|r| r.outcome == o).count();
        let mut lemmas = Map::new();
        lemmas.insert("runs".into(), Value::from(self.lemma_reports.len()));
        lemmas.insert("passed".into(), Value::from(count(Outcome::Passed)));
        lemmas.insert("failed".into(), Value::from(count(Outcome::Failed)));
        lemmas.insert("inconclusive".into(), Value::from(count(Outcome::Inconclusive)));
        lemmas.insert(
            "qualifying".into(),
            Value::from(self.lemma_reports.iter().map(|r| r.qualifying).sum::<u64>()),
        );
        lemmas.insert(
            "skipped".into(),
            Value::from(self.lemma_reports.iter().map(|r| r.skipped).sum::<u64>()),
        );
        if let Some(bad) = self.lemma_reports.iter().find(|r| !r.passed()) {
            lemmas.insert("first_unpassed".into(), bad.to_json());
        }
        let mut map = Map::new();
        map.insert("algebra".into(), Value::String(self.algebra.to_string()));
        map.insert("modes".into(), Value::Array(modes));
        map.insert("monotone".into(), Value::Bool(self.monotone));
        map.insert("swap_lemmas".into(), Value::Object(lemmas));
        map.insert("ok".into(), Value::Bool(self.ok()));
        Value::Object(map)
    }
}

pub fn run_oracle_check(algebra: &Arc<Algebra>, trials: u64, seed: u64) -> OracleCheckReport {
    let spaces = solve_all_modes(algebra);
    let mut modes = Vec::new();
    for space in &spaces {
        let mode = space.mode();
        let system = solver::assemble(algebra, mode);
        let oracle_dim = oracle::brute_force_null_space_dim(&system).ok();
        let definitions_dim = oracle::brute_force_nullity_from_definitions(algebra, mode).ok();
        let unsound = space
            .basis_triples()
            .iter()
            .filter(|t| {
                let pass = match mode {
                    Mode::Gh => oracle::is_gh_derivation(t, trials, seed).passed(),
                    Mode::Jordan => oracle::is_jordan_gh_derivation(t, trials, seed).passed(),
                    Mode::JordanWithCorner => {
                        oracle::is_jordan_gh_derivation(t, trials, seed).passed()
                            && oracle::satisfies_corner(t)
                    }
                };
                !pass
            })
            .count();
        modes.push(ModeCheck {
            mode,
            solver_dim: space.dim(),
            oracle_dim,
            definitions_dim,
            unsound_basis_vectors: unsound,
        });
    }
    let [gh, jordan, corner] = &spaces;
    let monotone = gh.dim() <= corner.dim() && corner.dim() <= jordan.dim();
    let lemma_reports = jordan
        .basis_triples()
        .iter()
        .map(|t| {
            oracle::check_swap_lemmas(t, trials, seed)
                .expect("Jordan basis triples satisfy the Jordan identity")
        })
        .collect();
    OracleCheckReport { algebra: algebra.spec(), modes, monotone, lemma_reports }
}

/// A finished command: the JSON report, the exit code, and a one-line summary.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: Value,
    pub exit_code: u8,
    pub summary: String,
}

fn envelope(command: &Command, field: ScalarDomain) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("tool".into(), Value::String(TOOL_NAME.into()));
    map.insert("version".into(), Value::String(TOOL_VERSION.into()));
    map.insert("command".into(), Value::String(command.name().into()));
    map.insert("basis_ordering".into(), Value::String(BASIS_ORDERING.into()));
    map.insert("packing_layout".into(), Value::String(PACKING_LAYOUT.into()));
    map.insert("field".into(), Value::String(field.to_string()));
    map.insert("seed".into(), Value::from(command.common().seed));
    map
}

fn extend(map: &mut Map<String, Value>, body: Value) {
    if let Value::Object(b) = body {
        for (k, v) in b {
            map.insert(k, v);
        }
    }
}

/// Runs one command. `Err` means a usage or internal error (exit 2).
pub fn run(command: &Command) -> Result<RunOutcome> {
    let common = command.common();
    let golden = common.golden.as_deref().map(read_golden).transpose()?;
    let (field, body, mut ok, summary, dims): (ScalarDomain, Value, bool, String, Vec<(String, usize)>) =
        match command {
            Command::Solve { algebra, field, mode, .. } => {
                let alg = algebra.build(*field)?;
                let start = Instant::now();
                let space = solver::solve(&alg, *mode);
                let mut body = space.to_json();
                if common.timing {
                    let obj = body.as_object_mut().expect("space json is an object");
                    obj.insert("elapsed_ms".into(), Value::from(start.elapsed().as_millis() as u64));
                }
                let summary = format!("{algebra} over {field}, mode {mode}: dim {}", space.dim());
                let dims = vec![(golden_key(*algebra, *field, *mode), space.dim())];
                (*field, body, true, summary, dims)
            }
            Command::VerifyTheorem1 { n, field, .. } | Command::VerifyTheorem2 { n, field, .. } => {
                let report = match command {
                    Command::VerifyTheorem1 { .. } => verify_theorem1(*n, *field)?,
                    _ => verify_theorem2(*n, *field)?,
                };
                let summary = format!(
                    "{} over {field}: gh {}, jordan {}, jordan-corner {} -> {}",
                    report.algebra,
                    report.dim_gh,
                    report.dim_jordan,
                    report.dim_jordan_corner,
                    if report.equal { "verified" } else { "FALSIFIED" }
                );
                let dims = report
                    .dims()
                    .iter()
                    .map(|(m, d)| (golden_key(report.algebra, *field, *m), *d))
                    .collect();
                (*field, report.to_json(common.timing), report.equal, summary, dims)
            }
            Command::Counterexample { field, .. } => {
                let report = run_counterexample(*field, common.trials, common.seed);
                let summary = format!(
                    "T_2 counterexample over {field}: jordan {}, gh {} -> {}",
                    if report.jordan.passed() { "passed" } else { "failed" },
                    if report.gh.passed() { "passed" } else { "failed" },
                    if report.reproduced { "reproduced" } else { "NOT reproduced" }
                );
                (*field, report.to_json(), report.reproduced, summary, Vec::new())
            }
            Command::OracleCheck { algebra, field, .. } => {
                let alg = algebra.build(*field)?;
                let report = run_oracle_check(&alg, common.trials.max(1), common.seed);
                let summary = format!(
                    "{algebra} over {field}: oracle check {}",
                    if report.ok() { "ok" } else { "FAILED" }
                );
                let dims = Mode::ALL
                    .iter()
                    .map(|m| (golden_key(*algebra, *field, *m), report.dim(*m)))
                    .collect();
                (*field, report.to_json(), report.ok(), summary, dims)
            }
        };
    let mut map = envelope(command, field);
    extend(&mut map, body);
    if let Some(g) = &golden {
        let (section, golden_ok) = golden_section(g, &dims);
        map.insert("golden".into(), section);
        ok &= golden_ok;
    }
    Ok(RunOutcome { report: Value::Object(map), exit_code: if ok { 0 } else { 1 }, summary })
}
