//! Command-line front end: allocate, verify, search, repro, sweep and export
//! over the JSON instance format.
//!
//! Exit codes: 0 success / satisfied / exists, 1 usage error, 2 input or
//! validation error, 3 a negative answer (criterion violated, no allocation
//! exists), 4 enumeration budget exceeded, 5 theorem-violation diagnostic.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};
use wefx_core::algorithms::{
    approx_wefx, chore_round_robin, envy_cycle_weighted, icyc_integer_wefx, AlgorithmError, Mode, TheoremViolation,
};
use wefx_core::corpus::{get_case, CaseId};
use wefx_core::fairness::{verify, Criterion};
use wefx_core::io::{allocation_to_json, instance_to_json, oracle_result_to_json, parse_allocation, parse_instance, report_to_json, DECIMAL_DIGITS};
use wefx_core::oracle::{best_factor_with, exists_exact_with, weight_sweep, OracleError, OracleOptions, DEFAULT_BUDGET};
use wefx_core::{Allocation, Instance, Kind, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_THEOREM: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "wefx", version, about = "Weighted fair division of indivisible goods and chores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an allocation procedure on an instance file.
    Allocate {
        #[arg(long, value_enum)]
        alg: Algorithm,
        #[arg(long = "in")]
        input: PathBuf,
        /// Also write the allocation (item id -> agent id) here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Preference model for envy-cycle; `auto` picks cardinal when all rows agree.
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
    },
    /// Check an allocation against a fairness criterion.
    Verify {
        #[arg(long)]
        criterion: Criterion,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        alloc: PathBuf,
    },
    /// Exhaustive search over all n^m allocations.
    Search {
        #[arg(value_enum)]
        objective: SearchObjective,
        /// Defaults to wefx for goods and xwef for chores.
        #[arg(long)]
        criterion: Option<Criterion>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Best factor and existence on one of the built-in impossibility cases.
    Repro {
        #[arg(long)]
        case: String,
        /// First agent's weight for the two-agent cases (default 11/25).
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Best factor of a two-agent case across first-agent weights.
    Sweep {
        #[arg(long)]
        case: String,
        /// Comma-separated weights, e.g. "2/5,11/25,12/25".
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print a built-in case in the instance file format.
    Export {
        #[arg(long)]
        case: String,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    EnvyCycle,
    Icyc,
    ApproxWefx,
    ChoreRr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Auto,
    Cardinal,
    Ordinal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SearchObjective {
    Exists,
    BestFactor,
}

struct Failure {
    code: i32,
    message: String,
    diagnostic: Option<Json>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), diagnostic: None }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure::new(EXIT_INPUT, message)
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = if matches!(e, OracleError::BudgetExceeded { .. }) { EXIT_BUDGET } else { EXIT_INPUT };
        Failure::new(code, e.to_string())
    }
}

impl From<AlgorithmError> for Failure {
    fn from(e: AlgorithmError) -> Self {
        match e {
            AlgorithmError::TheoremViolation(v) => {
                let diagnostic = violation_json(&v);
                Failure { code: EXIT_THEOREM, message: format!("theorem violation: {}: {}", v.claim, v.detail), diagnostic: Some(diagnostic) }
            }
            AlgorithmError::NonTermination => Failure::new(EXIT_THEOREM, e.to_string()),
            other => Failure::input(other.to_string()),
        }
    }
}

fn violation_json(v: &TheoremViolation) -> Json {
    let instance = serde_json::from_str(&v.instance).unwrap_or_else(|_| Json::String(v.instance.clone()));
    json!({
        "claim": v.claim,
        "detail": v.detail,
        "instance": instance,
        "bundles": v.bundles,
        "trace": v.trace,
    })
}

/// What a successful command prints and how it exits.
struct Outcome {
    json: Json,
    code: i32,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.json).expect("JSON values serialize");
            let _ = writeln!(out, "{text}");
            outcome.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            if let Some(d) = f.diagnostic {
                let _ = writeln!(err, "{}", serde_json::to_string_pretty(&d).expect("JSON values serialize"));
            }
            f.code
        }
    }
}

fn execute(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Allocate { alg, input, out, mode } => allocate(alg, &input, out.as_deref(), mode),
        Command::Verify { criterion, input, alloc } => verify_cmd(criterion, &input, &alloc),
        Command::Search { objective, criterion, input, budget, jobs } => {
            let inst = load_instance(&input)?;
            search(objective, criterion, &inst, &options(budget, jobs)?)
        }
        Command::Repro { case, alpha, budget, jobs } => repro(&case, alpha.as_deref(), &options(budget, jobs)?),
        Command::Sweep { case, grid, jobs } => sweep(&case, &grid, &options(DEFAULT_BUDGET, jobs)?),
        Command::Export { case, alpha, out } => {
            let inst = load_case(&case, alpha.as_deref())?;
            let json = instance_to_json(&inst);
            if let Some(path) = out {
                write_json(&path, &json)?;
            }
            Ok(Outcome { json, code: EXIT_OK })
        }
    }
}

fn options(budget: u64, jobs: usize) -> Result<OracleOptions, Failure> {
    if jobs == 0 {
        return Err(Failure::new(EXIT_USAGE, "--jobs must be at least 1"));
    }
    Ok(OracleOptions { budget, jobs })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, json: &Json) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(json).expect("JSON values serialize") + "\n";
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_value(flag: &str, text: &str) -> Result<Value, Failure> {
    text.trim().parse().map_err(|e| Failure::input(format!("{flag} {text:?}: {e}")))
}

fn parse_case(name: &str) -> Result<CaseId, Failure> {
    name.parse().map_err(|e: wefx_core::corpus::CorpusError| Failure::input(e.to_string()))
}

fn load_case(name: &str, alpha: Option<&str>) -> Result<Instance, Failure> {
    let id = parse_case(name)?;
    let alpha = alpha.map(|a| parse_value("--alpha", a)).transpose()?;
    get_case(id, alpha).map_err(|e| Failure::input(e.to_string()))
}

fn check_criterion(criterion: Criterion, kind: Kind) -> Result<(), Failure> {
    if criterion.supports(kind) {
        Ok(())
    } else {
        Err(Failure::input(format!("criterion {criterion} does not apply to {kind}")))
    }
}

fn negative_unless(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn allocate(alg: Algorithm, input: &Path, out: Option<&Path>, mode: ModeArg) -> Result<Outcome, Failure> {
    let inst = load_instance(input)?;
    let mut trace = Map::new();
    let (allocation, criterion) = match alg {
        Algorithm::EnvyCycle => {
            let mode = match mode {
                ModeArg::Cardinal => Mode::IdenticalCardinal,
                ModeArg::Ordinal => Mode::IdenticalOrdinal,
                ModeArg::Auto if (1..inst.n()).all(|i| inst.row(i) == inst.row(0)) => Mode::IdenticalCardinal,
                ModeArg::Auto => Mode::IdenticalOrdinal,
            };
            let run = envy_cycle_weighted(&inst, mode)?;
            trace.insert("mode".into(), json!(if mode == Mode::IdenticalCardinal { "cardinal" } else { "ordinal" }));
            trace.insert("rotations".into(), json!(run.rotations.len()));
            (run.allocation, Criterion::Wefx)
        }
        Algorithm::Icyc => {
            let run = icyc_integer_wefx(&inst)?;
            trace.insert("chosen_bundle".into(), json!(run.chosen));
            (run.allocation, Criterion::Wefx)
        }
        Algorithm::ApproxWefx => {
            let (allocation, t) = approx_wefx(&inst)?;
            trace.insert("case".into(), json!(t.chosen_case.to_string()));
            trace.insert("k".into(), json!(t.k));
            trace.insert("first_agent".into(), json!(inst.agents()[t.first_agent].id));
            trace.insert("alpha_cubed_exact".into(), json!(t.alpha_cubed.render_exact()));
            trace.insert("alpha_cubed_decimal".into(), json!(t.alpha_cubed.render_decimal(DECIMAL_DIGITS)));
            (allocation, Criterion::Wefx)
        }
        Algorithm::ChoreRr => {
            let (allocation, t) = chore_round_robin(&inst)?;
            trace.insert("picks".into(), json!(t.picks.len()));
            trace.insert("final_picks".into(), json!(t.final_picks.len()));
            (allocation, Criterion::OneWef)
        }
    };
    let report = verify(&inst, &allocation, criterion).map_err(|e| Failure::input(e.to_string()))?;
    let alloc_json = allocation_to_json(&inst, &allocation);
    if let Some(path) = out {
        write_json(path, &alloc_json)?;
    }
    let json = json!({
        "algorithm": alg.to_possible_value().expect("no skipped variants").get_name(),
        "allocation": alloc_json,
        "trace": trace,
        "report": report_to_json(&inst, &report),
    });
    Ok(Outcome { json, code: EXIT_OK })
}

fn verify_cmd(criterion: Criterion, input: &Path, alloc: &Path) -> Result<Outcome, Failure> {
    let inst = load_instance(input)?;
    check_criterion(criterion, inst.kind())?;
    let allocation: Allocation =
        parse_allocation(&inst, &read(alloc)?).map_err(|e| Failure::input(format!("{}: {e}", alloc.display())))?;
    let report = verify(&inst, &allocation, criterion).map_err(|e| Failure::input(e.to_string()))?;
    Ok(Outcome { code: negative_unless(report.satisfied), json: report_to_json(&inst, &report) })
}

fn search(objective: SearchObjective, criterion: Option<Criterion>, inst: &Instance, opts: &OracleOptions) -> Result<Outcome, Failure> {
    let any = Criterion::any_item(inst.kind());
    let criterion = criterion.unwrap_or(any);
    check_criterion(criterion, inst.kind())?;
    let result = match objective {
        SearchObjective::Exists => exists_exact_with(inst, criterion, opts)?,
        SearchObjective::BestFactor => {
            if criterion != any {
                return Err(Failure::input(format!("best-factor is defined for {any} on {}", inst.kind())));
            }
            best_factor_with(inst, opts)?
        }
    };
    Ok(Outcome { code: negative_unless(result.exists), json: oracle_result_to_json(inst, &result) })
}

fn repro(case: &str, alpha: Option<&str>, opts: &OracleOptions) -> Result<Outcome, Failure> {
    let id = parse_case(case)?;
    let inst = load_case(case, alpha)?;
    let result = best_factor_with(&inst, opts)?;
    let mut map = Map::new();
    map.insert("case".into(), json!(id.name()));
    map.insert("weights".into(), json!(inst.weights().iter().map(|w| w.render_exact()).collect::<Vec<_>>()));
    if let Json::Object(rest) = oracle_result_to_json(&inst, &result) {
        map.extend(rest);
    }
    Ok(Outcome { code: negative_unless(result.exists), json: Json::Object(map) })
}

fn sweep(case: &str, grid: &str, opts: &OracleOptions) -> Result<Outcome, Failure> {
    let id = parse_case(case)?;
    let points: Vec<Value> = grid.split(',').map(|p| parse_value("--grid", p)).collect::<Result<_, _>>()?;
    let results = weight_sweep(id, &points, opts)?;
    let rows: Vec<Json> = results
        .iter()
        .map(|p| {
            let inst = get_case(id, Some(p.alpha.clone())).expect("sweep validated the point");
            let mut map = Map::new();
            map.insert("alpha_exact".into(), json!(p.alpha.render_exact()));
            map.insert("alpha_decimal".into(), json!(p.alpha.render_decimal(DECIMAL_DIGITS)));
            if let Json::Object(rest) = oracle_result_to_json(&inst, &p.result) {
                map.extend(rest);
            }
            Json::Object(map)
        })
        .collect();
    Ok(Outcome { json: json!({ "case": id.name(), "points": rows }), code: EXIT_OK })
}
