//! The `oc-reason` command line.
//!
//! Exit codes: 0 success (satisfiable, yes, closed), 1 error, 2 empty
//! correspondence derived or no solution, 3 negative verdict.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::assumptions::{build_assumption_bcs, discover_risk_labelings, AssumptionSelection};
use crate::bcs::{enumerate_satisfying, path_consistency, Bcs};
use crate::closedness::{
    is_join_closed, is_max_closed, orders_for_assumptions, search_max_orders, ClosednessReport,
};
use crate::error::{input, Error, Result};
use crate::io::{
    constraint_to_json, instance_to_json, load_game, load_instance, read_json, write_json,
    ConstraintJson, Instance, OrdersJson, PreferenceJson, SemilatticesJson,
};
use crate::random::random_bcs_sized;
use crate::reductions::{
    augment_always_satisfiable, csp_to_si_games, implication_instance,
    join_incompleteness_instance, montanari_instance,
};
use crate::si::{decide_si_with, find_any_si, find_si_on, Certificate, Mode, Preference};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_NO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "oc-reason",
    version,
    about = "Outcome-correspondence reasoning about safe improvements"
)]
pub struct Cli {
    /// Write a machine-readable report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run path consistency and report the narrowed correspondences.
    Propagate {
        input: PathBuf,
        /// Write the full fixed point as a constraint file.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
    /// Enumerate satisfying assignments.
    Solve {
        input: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Decide whether `y` is a safe improvement on `x`.
    CheckSi {
        input: PathBuf,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[command(flatten)]
        decide: DecideArgs,
    },
    /// List safe improvements, on `x` or between any two games.
    FindSi {
        input: PathBuf,
        #[arg(long)]
        x: Option<String>,
        #[command(flatten)]
        decide: DecideArgs,
    },
    /// Check max- or join-closedness.
    Closedness {
        input: PathBuf,
        #[command(flatten)]
        how: ClosednessArgs,
        /// Write the orders found by --search or --assumptions.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Build the assumption correspondences for a set of game files.
    Assume {
        #[arg(required = true)]
        games: Vec<PathBuf>,
        /// Assumption selection file; overrides the flags below.
        #[arg(long, value_name = "PATH")]
        selection: Option<PathBuf>,
        #[arg(long)]
        dominance: bool,
        #[arg(long)]
        isomorphism: bool,
        #[arg(long)]
        nash: bool,
        /// Report every game pair and labeling that qualifies for decreasing risk.
        #[arg(long)]
        list_dr: bool,
        #[arg(short, long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Write a generated instance.
    Gen {
        #[command(subcommand)]
        generator: Generator,
    },
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    /// `pareto`, `player:N` (from 1), or a preference file.
    #[arg(long, default_value = "pareto")]
    pub pref: String,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value = "exact")]
    pub mode: Mode,
    /// Total orders certifying max-closedness.
    #[arg(long, value_name = "PATH", conflicts_with = "joins")]
    pub orders: Option<PathBuf>,
    /// Semilattices certifying join-closedness.
    #[arg(long, value_name = "PATH")]
    pub joins: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ClosednessArgs {
    #[arg(long, value_name = "PATH")]
    pub orders: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub joins: Option<PathBuf>,
    /// Search all order combinations (small domains only).
    #[arg(long)]
    pub search: bool,
    /// Use the orders derived from the instance's games.
    #[arg(long)]
    pub assumptions: bool,
}

#[derive(Debug, Subcommand)]
pub enum Generator {
    /// Three-colouring of K4.
    Montanari {
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Join-closed instance with an undetected inference; also writes `<stem>.joins.json`.
    JoinIncompleteness {
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Games whose safe-improvement question encodes the source's unsatisfiability.
    CspToSi {
        #[arg(long)]
        source: PathBuf,
        /// Make fallback outcomes of all games pairwise incomparable.
        #[arg(long)]
        epsilon: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Always-satisfiable extension of the source.
    Augment {
        #[arg(long)]
        source: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Implication question equivalent to a value being unattainable.
    Implication {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        var: String,
        #[arg(long)]
        value: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Random constraint structure.
    RandomCsp {
        #[arg(long, default_value_t = 4)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        domain: usize,
        #[arg(long, default_value_t = 0.5)]
        constraint_prob: f64,
        #[arg(long, default_value_t = 0.6)]
        pair_prob: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Everything a run found. Text output is rendered from this value, so the
/// JSON form carries every printed fact.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub exit_code: i32,
    pub verdicts: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub correspondences: Vec<ConstraintJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<(String, String)>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing: Timing,
}

impl RunReport {
    fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.verdicts.insert(key.to_string(), value.into());
    }

    fn wrote(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Human-readable rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.verdicts {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {v}\n"));
        }
        for c in &self.correspondences {
            let pairs: Vec<String> = c
                .pairs
                .iter()
                .map(|(a, b)| format!("({a}) -> ({b})"))
                .collect();
            out.push_str(&format!("{} -> {}: {{{}}}\n", c.x, c.y, pairs.join(", ")));
        }
        if let Some(ce) = &self.counterexample {
            let parts: Vec<String> = ce.iter().map(|(v, l)| format!("{v}={l}")).collect();
            out.push_str(&format!("counterexample: {}\n", parts.join(" ")));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        for o in &self.outputs {
            out.push_str(&format!("wrote: {o}\n"));
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("error: {e}\n"));
        }
        out
    }
}

/// Parses `args` (program name first), runs the command, prints the text
/// report to `stdout` and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut report = RunReport {
        command: args
            .iter()
            .skip(1)
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
        ..Default::default()
    };
    let start = Instant::now();
    report.exit_code = match execute(&cli, &mut report) {
        Ok(code) => code,
        Err(e) => {
            report.error = Some(e.to_string());
            EXIT_ERROR
        }
    };
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    let _ = stdout.write_all(report.render_text().as_bytes());
    if let Some(path) = &cli.json {
        if let Err(e) = write_json(path, &report) {
            let _ = writeln!(stdout, "error: {e}");
            return EXIT_ERROR;
        }
    }
    report.exit_code
}

fn execute(cli: &Cli, report: &mut RunReport) -> Result<i32> {
    match &cli.command {
        Command::Propagate { input, dump } => propagate(input, dump.as_deref(), report),
        Command::Solve { input, limit } => solve(input, *limit, report),
        Command::CheckSi {
            input,
            x,
            y,
            decide,
        } => check_si(input, x.as_deref(), y.as_deref(), decide, report),
        Command::FindSi { input, x, decide } => find_si(input, x.as_deref(), decide, report),
        Command::Closedness { input, how, out } => closedness(input, how, out.as_deref(), report),
        Command::Assume {
            games,
            selection,
            dominance,
            isomorphism,
            nash,
            list_dr,
            out,
        } => {
            let sel = match selection {
                Some(p) => read_json(p)?,
                None if !dominance && !isomorphism && !nash => {
                    AssumptionSelection::all_structural()
                }
                None => AssumptionSelection {
                    dominance: *dominance,
                    isomorphism: *isomorphism,
                    nash: *nash,
                    ..Default::default()
                },
            };
            assume(games, &sel, *list_dr, out.as_deref(), report)
        }
        Command::Gen { generator } => generate(generator, cli.seed, report),
    }
}

fn propagate(path: &Path, dump: Option<&Path>, report: &mut RunReport) -> Result<i32> {
    let inst = load_instance(path)?;
    let bcs = &inst.bcs;
    let p = path_consistency(bcs);
    let narrowed: Vec<(usize, usize)> = p
        .narrowed_pairs(bcs)
        .into_iter()
        .filter(|(i, j)| i <= j)
        .collect();
    report.set("variables", bcs.len());
    report.set("narrowed_pairs", narrowed.len());
    report.set(
        "narrowing",
        if narrowed.is_empty() {
            "no narrowing"
        } else {
            "narrowed"
        },
    );
    report.set("empty_correspondence", p.is_unsat());
    for &(i, j) in &narrowed {
        let c = p.psi_oc(&p.ids()[i], &p.ids()[j])?;
        report.correspondences.push(constraint_to_json(bcs, &c)?);
    }
    if let Some(dump) = dump {
        let fixed = Instance {
            games: inst.games.clone(),
            bcs: Bcs::new(bcs.variables().to_vec(), p.as_constraints())?,
            designated: inst.designated.clone(),
        };
        write_json(dump, &instance_to_json(&fixed)?)?;
        report.wrote(dump);
    }
    Ok(if p.is_unsat() { EXIT_EMPTY } else { EXIT_OK })
}

fn solve(path: &Path, limit: Option<usize>, report: &mut RunReport) -> Result<i32> {
    let inst = load_instance(path)?;
    let found = enumerate_satisfying(&inst.bcs, limit);
    report.set("satisfiable", !found.is_empty());
    report.set("assignments", found.len());
    if let Some(l) = limit {
        report.set("limit", l);
    }
    let solutions: Vec<Value> = found
        .iter()
        .map(|a| {
            let labels: Map<String, Value> = inst
                .bcs
                .assignment_labels(a)
                .into_iter()
                .map(|(v, l)| (v, Value::String(l)))
                .collect();
            Value::Object(labels)
        })
        .collect();
    report.set("solutions", solutions);
    Ok(if found.is_empty() {
        EXIT_EMPTY
    } else {
        EXIT_OK
    })
}

fn preference(arg: &str, inst: &Instance) -> Result<Preference> {
    let json = if arg == "pareto" {
        PreferenceJson::Pareto
    } else if let Some(n) = arg.strip_prefix("player:") {
        match n.parse() {
            Ok(player) => PreferenceJson::Player { player },
            Err(_) => return input(format!("bad player number in {arg:?}")),
        }
    } else {
        read_json(Path::new(arg))?
    };
    json.build(inst)
}

fn certificate(decide: &DecideArgs, bcs: &Bcs) -> Result<Option<Certificate>> {
    Ok(match (&decide.orders, &decide.joins) {
        (Some(p), _) => Some(Certificate::Orders(
            read_json::<OrdersJson>(p)?.to_orders(bcs)?,
        )),
        (None, Some(p)) => Some(Certificate::Joins(
            read_json::<SemilatticesJson>(p)?.to_joins(bcs)?,
        )),
        (None, None) => None,
    })
}

fn check_si(
    path: &Path,
    x: Option<&str>,
    y: Option<&str>,
    decide: &DecideArgs,
    report: &mut RunReport,
) -> Result<i32> {
    let inst = load_instance(path)?;
    let designated = inst.designated.clone();
    let (x, y) = match (x, y, &designated) {
        (Some(x), Some(y), _) => (x.to_string(), y.to_string()),
        (None, None, Some((b, c))) => (b.clone(), c.clone()),
        _ => return input("give both --x and --y, or designate a pair in the instance"),
    };
    let pref = preference(&decide.pref, &inst)?;
    let cert = certificate(decide, &inst.bcs)?;
    let v = decide_si_with(
        &inst.bcs,
        &x,
        &y,
        &pref,
        decide.strict,
        decide.mode,
        cert.as_ref(),
    )?;
    report.set("x", x.as_str());
    report.set("y", y.as_str());
    report.set("strict", decide.strict);
    report.set("mode", decide.mode.to_string());
    report.set("certified", v.certified);
    report.set("safe_improvement", v.answer);
    report.counterexample = v
        .counterexample
        .as_ref()
        .map(|a| inst.bcs.assignment_labels(a));
    report.warnings.extend(v.warnings);
    Ok(if v.answer { EXIT_OK } else { EXIT_NO })
}

fn find_si(
    path: &Path,
    x: Option<&str>,
    decide: &DecideArgs,
    report: &mut RunReport,
) -> Result<i32> {
    let inst = load_instance(path)?;
    let pref = preference(&decide.pref, &inst)?;
    let cert = certificate(decide, &inst.bcs)?;
    let certified = crate::si::certify(&inst.bcs, decide.mode, cert.as_ref())?;
    let pairs: Vec<(String, String)> = match x {
        Some(x) => find_si_on(&inst.bcs, x, &pref, decide.strict, decide.mode)?
            .into_iter()
            .map(|y| (x.to_string(), y))
            .collect(),
        None => find_any_si(&inst.bcs, &pref, decide.strict, decide.mode)?,
    };
    report.set("strict", decide.strict);
    report.set("mode", decide.mode.to_string());
    report.set("certified", certified);
    report.set(
        "improvements",
        pairs.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
    );
    if !certified {
        report.warnings.push(format!(
            "completeness not certified: pairs missing from a {} search may still be improvements",
            decide.mode
        ));
    }
    Ok(if pairs.is_empty() { EXIT_NO } else { EXIT_OK })
}

fn closedness_verdict(bcs: &Bcs, r: &ClosednessReport, report: &mut RunReport) -> i32 {
    report.set("closed", r.is_closed());
    match &r.violation {
        None => EXIT_OK,
        Some(v) => {
            let (i, j) = (
                bcs.var_index(&v.source).unwrap(),
                bcs.var_index(&v.target).unwrap(),
            );
            let pair = |(a, b): (usize, usize)| json!([bcs.domain(i)[a], bcs.domain(j)[b]]);
            report.set(
                "violation",
                json!({
                    "constraint": v.constraint,
                    "x": v.source,
                    "y": v.target,
                    "first": pair(v.first),
                    "second": pair(v.second),
                    "missing": pair(v.missing),
                }),
            );
            EXIT_NO
        }
    }
}

fn closedness(
    path: &Path,
    how: &ClosednessArgs,
    out: Option<&Path>,
    report: &mut RunReport,
) -> Result<i32> {
    let inst = load_instance(path)?;
    let bcs = &inst.bcs;
    if let Some(p) = &how.orders {
        let orders = read_json::<OrdersJson>(p)?.to_orders(bcs)?;
        report.set("check", "max-closed");
        return Ok(closedness_verdict(
            bcs,
            &is_max_closed(bcs, &orders)?,
            report,
        ));
    }
    if let Some(p) = &how.joins {
        let joins = read_json::<SemilatticesJson>(p)?.to_joins(bcs)?;
        report.set("check", "join-closed");
        return Ok(closedness_verdict(
            bcs,
            &is_join_closed(bcs, &joins)?,
            report,
        ));
    }
    let found = if how.search {
        report.set("check", "order search");
        search_max_orders(bcs)?
    } else {
        report.set("check", "assumption orders");
        Some(orders_for_assumptions(&inst.games, bcs)?)
    };
    match found {
        None => {
            report.set("closed", false);
            Ok(EXIT_NO)
        }
        Some(orders) => {
            let json = OrdersJson::from_orders(bcs, &orders)?;
            report.set("closed", true);
            report.set(
                "orders",
                serde_json::to_value(&json.orders).expect("orders serialize"),
            );
            if let Some(out) = out {
                write_json(out, &json)?;
                report.wrote(out);
            }
            Ok(EXIT_OK)
        }
    }
}

fn assume(
    paths: &[PathBuf],
    sel: &AssumptionSelection,
    list_dr: bool,
    out: Option<&Path>,
    report: &mut RunReport,
) -> Result<i32> {
    let games = paths
        .iter()
        .map(|p| load_game(p))
        .collect::<Result<Vec<_>>>()?;
    let bcs = build_assumption_bcs(&games, sel)?;
    report.set("games", games.len());
    report.set("correspondences", bcs.constraints().len());
    for c in bcs.constraints() {
        report.correspondences.push(constraint_to_json(&bcs, c)?);
    }
    if list_dr {
        let mut found = Vec::new();
        for g1 in &games {
            for g2 in &games {
                if g1.name() == g2.name() {
                    continue;
                }
                for (l1, l2) in discover_risk_labelings(g1, g2) {
                    let labels = |g: &crate::games::NormalFormGame, which: [usize; 2]| {
                        json!([g.actions(0)[which[0]], g.actions(1)[which[1]]])
                    };
                    found.push(json!({
                        "g1": g1.name(),
                        "g2": g2.name(),
                        "a1": labels(g1, l1.first),
                        "a2": labels(g1, l1.second),
                        "b1": labels(g2, l2.first),
                        "b2": labels(g2, l2.second),
                    }));
                }
            }
        }
        report.set("decreasing_risk", found);
    }
    if let Some(out) = out {
        write_json(
            out,
            &instance_to_json(&Instance {
                games,
                bcs,
                designated: None,
            })?,
        )?;
        report.wrote(out);
    }
    Ok(EXIT_OK)
}

fn save(out: &Path, inst: &Instance, report: &mut RunReport) -> Result<()> {
    write_json(out, &instance_to_json(inst)?)?;
    report.wrote(out);
    Ok(())
}

/// `<dir>/<stem>.joins.json` next to `out`.
pub fn joins_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance");
    out.with_file_name(format!("{stem}.joins.json"))
}

fn generate(generator: &Generator, seed: u64, report: &mut RunReport) -> Result<i32> {
    match generator {
        Generator::Montanari { out } => {
            report.set("generator", "montanari");
            save(out, &Instance::plain(montanari_instance()), report)?;
        }
        Generator::JoinIncompleteness { out } => {
            report.set("generator", "join-incompleteness");
            let (bcs, joins) = join_incompleteness_instance();
            let lattices = SemilatticesJson::from_joins(&bcs, &joins)?;
            save(out, &Instance::plain(bcs), report)?;
            let jp = joins_path(out);
            write_json(&jp, &lattices)?;
            report.wrote(&jp);
        }
        Generator::CspToSi {
            source,
            epsilon,
            out,
        } => {
            report.set("generator", "csp-to-si");
            let src = load_instance(source)?.bcs;
            let si = csp_to_si_games(&src, *epsilon)?;
            report.set("base", si.base.as_str());
            report.set("candidate", si.candidate.as_str());
            report.set("games", si.games.len());
            let map: Map<String, Value> = si
                .variable_games
                .iter()
                .map(|(v, g)| (v.clone(), Value::String(g.clone())))
                .collect();
            report.set("variable_games", map);
            let inst = Instance {
                games: si.games,
                bcs: si.bcs,
                designated: Some((si.base, si.candidate)),
            };
            save(out, &inst, report)?;
        }
        Generator::Augment { source, out } => {
            report.set("generator", "augment");
            let aug = augment_always_satisfiable(&load_instance(source)?.bcs)?;
            report.set("anchor", json!([aug.anchor.0, aug.anchor.1]));
            save(out, &Instance::plain(aug.bcs), report)?;
        }
        Generator::Implication {
            source,
            var,
            value,
            out,
        } => {
            report.set("generator", "implication");
            let (bcs, q) = implication_instance(&load_instance(source)?.bcs, (var, value))?;
            report.set("query", json!([q.x, q.x_value, q.y, q.y_value]));
            save(out, &Instance::plain(bcs), report)?;
        }
        Generator::RandomCsp {
            vars,
            domain,
            constraint_prob,
            pair_prob,
            out,
        } => {
            if *vars == 0
                || *domain == 0
                || !(0.0..=1.0).contains(constraint_prob)
                || !(0.0..=1.0).contains(pair_prob)
            {
                return Err(Error::Input(
                    "random-csp needs positive sizes and probabilities in [0, 1]".into(),
                ));
            }
            report.set("generator", "random-csp");
            report.set("seed", seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bcs = random_bcs_sized(&mut rng, *vars, *domain, *constraint_prob, *pair_prob);
            save(out, &Instance::plain(bcs), report)?;
        }
    }
    Ok(EXIT_OK)
}
