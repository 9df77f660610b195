//! `boolcomp`: exact complexity measures, composition limits and separating
//! constructions for boolean functions. Reports are JSON on stdout;
//! diagnostics go to stderr.

mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use boolcomp::complimit::{charval, limit_convergence};
use boolcomp::measures::{global, global_with, hypergraph_measure, local, InputPlan, MeasureId};
use boolcomp::tree::{compose_boolfn, Ensemble, IndexedTree};
use boolcomp::verify::{run_suite, Suite};
use boolcomp::zoo::{
    build_grouped, build_grouped_with, build_or_compose, build_random_code, build_star,
    verify_construction,
};
use boolcomp::{Assignment, BoolFn, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use input::{load_fn, Loaded};
use report::Report;

/// Exit code for malformed input or parameters.
const EXIT_PARSE: u8 = 2;
/// Exit code for exceeded budgets.
const EXIT_BUDGET: u8 = 3;
/// Exit code for failed assertions.
const EXIT_ASSERT: u8 = 4;

#[derive(Parser)]
#[command(name = "boolcomp", version, about)]
struct Cli {
    /// Largest arity of any truth table built or loaded.
    #[arg(long, global = true, env = "BOOLCOMP_MAX_ARITY", default_value_t = 20)]
    max_arity: usize,

    /// Largest number of edges in a composed block hypergraph.
    #[arg(long, global = true, env = "BOOLCOMP_MAX_EDGES", default_value_t = 1 << 20)]
    max_edges: usize,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "BOOLCOMP_THREADS")]
    threads: Option<usize>,

    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FnArg {
    /// A `.btt` file, or `named:<NAME>` (OR, AND, NAND, NOR, PARITY, MAJ,
    /// CONST0, CONST1, BUBLITZ).
    function: String,

    /// Arity for named functions.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Clone)]
struct TreeArgs {
    /// Compose along the tree in an `.itree` file.
    #[arg(long, conflicts_with = "uniform")]
    tree: Option<PathBuf>,

    /// Compose `k` levels of the same gate.
    #[arg(long)]
    uniform: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Local or global value of a measure.
    Measure {
        #[command(flatten)]
        f: FnArg,
        #[arg(long, short)]
        measure: MeasureId,
        /// Input as a bit string, index 0 first.
        #[arg(long, conflicts_with = "global", required_unless_present = "global")]
        input: Option<String>,
        /// Maximum over all inputs.
        #[arg(long)]
        global: bool,
        /// Sample this many inputs instead of all.
        #[arg(long, requires = "global")]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tree: TreeArgs,
    },
    /// Compose gates and write the `.btt` table.
    Compose {
        /// Gate functions: one reused at every node, or one per internal node
        /// in breadth-first order.
        #[arg(required = true)]
        functions: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        tree: TreeArgs,
        /// Write the table here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Characteristic value of `s`, `C` or `C*`.
    Charval {
        #[command(flatten)]
        f: FnArg,
        #[arg(long, short)]
        measure: MeasureId,
        /// Bisection tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Convergence table of `m(f^(k))^(1/k)`.
    Limit {
        #[command(flatten)]
        f: FnArg,
        #[arg(long, short)]
        measure: MeasureId,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
    },
    /// Build and verify a separating construction.
    Zoo {
        kind: ZooKind,
        #[arg(long)]
        n: Option<usize>,
        /// Number of codewords.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Required codeword distance.
        #[arg(long, default_value_t = 3)]
        distance: u32,
        /// Inner function of an OR composition, e.g. `named:AND`.
        #[arg(long)]
        inner: Option<String>,
        /// Arity of the inner function.
        #[arg(long)]
        inner_n: Option<usize>,
        /// Also write the realized function as `.btt`.
        #[arg(long)]
        btt: Option<PathBuf>,
    },
    /// Run verification suites.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ZooKind {
    OrCompose,
    RandomCode,
    Grouped,
    Star,
}

/// A command failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget(_) | Error::ArityTooLarge { .. } => EXIT_BUDGET,
            Error::Parse(_)
            | Error::UnknownName(_)
            | Error::InvalidParameter(_)
            | Error::ArityMismatch { .. }
            | Error::InvalidTree(_)
            | Error::ConstantFunction(_)
            | Error::IncompatibleSelector
            | Error::Precondition { .. }
            | Error::EmptyEdge => EXIT_PARSE,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_PARSE,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("boolcomp: {e}");
        }
    }
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&cli) {
        Ok((mut report, verdict)) => {
            report.command = argv;
            report.elapsed_ms = start.elapsed().as_millis();
            println!("{}", report.to_json(cli.pretty));
            match verdict {
                Ok(()) => ExitCode::SUCCESS,
                Err(first) => {
                    eprintln!("boolcomp: assertion failed: {first}");
                    ExitCode::from(EXIT_ASSERT)
                }
            }
        }
        Err(f) => {
            eprintln!("boolcomp: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// The report plus `Err(first failure)` when an assertion failed.
type Outcome = (Report, Result<(), String>);

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Measure {
            f,
            measure,
            input,
            global: _,
            sample,
            seed,
            tree,
        } => cmd_measure(cli, f, *measure, input.as_deref(), *sample, *seed, tree),
        Command::Compose {
            functions,
            n,
            tree,
            output,
        } => cmd_compose(cli, functions, *n, tree, output.as_ref()),
        Command::Charval { f, measure, tol } => cmd_charval(cli, f, *measure, *tol),
        Command::Limit { f, measure, kmax } => cmd_limit(cli, f, *measure, *kmax),
        Command::Zoo {
            kind,
            n,
            count,
            k,
            d,
            s,
            seed,
            distance,
            inner,
            inner_n,
            btt,
        } => {
            let c = match kind {
                ZooKind::OrCompose => {
                    let name = inner
                        .as_deref()
                        .ok_or_else(|| parse_failure("or-compose needs --inner"))?;
                    let g = load_fn(name, *inner_n, cli.max_arity)?;
                    build_or_compose(&g.function, n.unwrap_or(2))?
                }
                ZooKind::RandomCode => {
                    build_random_code(n.unwrap_or(16), count.unwrap_or(8), *seed, *distance)?
                }
                ZooKind::Grouped => match (k, d) {
                    (None, None) => build_grouped(n.unwrap_or(16))?,
                    (Some(k), Some(d)) => build_grouped_with(n.unwrap_or(16), *k, *d)?,
                    _ => return Err(parse_failure("give both --k and --d, or neither")),
                },
                ZooKind::Star => build_star(s.unwrap_or(5))?,
            };
            if c.function.arity() > cli.max_arity {
                return Err(Error::ArityTooLarge {
                    arity: c.function.arity(),
                    cap: cli.max_arity,
                }
                .into());
            }
            if let Some(path) = btt {
                std::fs::write(path, c.function.to_btt())
                    .map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
            }
            for w in &c.warnings {
                eprintln!("boolcomp: warning: {w}");
            }
            let r = verify_construction(&c);
            let verdict = r
                .results
                .iter()
                .find(|x| x.status == boolcomp::zoo::ClaimStatus::Failed)
                .map_or(Ok(()), |x| Err(format!("{}: {}", x.description, x.detail)));
            let mut report = Report::new(json!({ "construction": c, "verification": r }));
            report.add_input("construction", &c.function);
            Ok((report, verdict))
        }
        Command::Verify { suite } => cmd_verify(suite),
    }
}

/// The gate ensemble described by the tree flags, if any.
fn ensemble(gates: Vec<BoolFn>, tree: &TreeArgs) -> Result<Option<Ensemble<BoolFn>>, Failure> {
    let t = match (&tree.tree, tree.uniform) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
            IndexedTree::parse(&text)?
        }
        (None, Some(k)) => {
            if gates.len() != 1 {
                return Err(parse_failure("--uniform takes exactly one gate"));
            }
            IndexedTree::uniform(&vec![gates[0].arity(); k])?
        }
        (None, None) => return Ok(None),
    };
    let count = t.internal_nodes().len();
    let payload = match gates.len() {
        1 => vec![gates[0].clone(); count],
        c if c == count => gates,
        c => {
            return Err(parse_failure(format!(
                "{c} gates for {count} internal nodes"
            )))
        }
    };
    Ok(Some(Ensemble::new(t, payload)?))
}

fn check_arity(n: usize, cap: usize) -> Result<(), Failure> {
    if n > cap {
        return Err(Error::ArityTooLarge { arity: n, cap }.into());
    }
    Ok(())
}

fn cmd_measure(
    cli: &Cli,
    f: &FnArg,
    m: MeasureId,
    input: Option<&str>,
    sample: Option<u64>,
    seed: u64,
    tree: &TreeArgs,
) -> Result<Outcome, Failure> {
    let loaded = load_fn(&f.function, f.n, cli.max_arity)?;
    let ens = ensemble(vec![loaded.function.clone()], tree)?;
    let mut report = Report::default();
    report.add_loaded(&loaded);
    let result = match (ens, input) {
        (Some(ens), Some(bits)) => {
            // blocks of the composition, assembled per gate
            let x = Assignment::parse(bits)?;
            check_arity(ens.tree.leaf_count(), 64)?;
            if m == MeasureId::S {
                return Err(parse_failure("use a truth table for s on compositions"));
            }
            let blocks = boolcomp::assemblage::minblocks_composed(&ens, &x, cli.max_edges)?;
            let (value, cert) = hypergraph_measure(&blocks.blocks, m)?;
            json!({
                "measure": m,
                "input": x,
                "value": value.to_string(),
                "blocks": blocks.blocks.edges().len(),
                "certificate": cert,
            })
        }
        (Some(ens), None) => {
            check_arity(ens.tree.leaf_count(), cli.max_arity)?;
            let composed = compose_boolfn(&ens)?;
            global_report(&composed, m, sample, seed)?
        }
        (None, Some(bits)) => {
            let x = Assignment::parse(bits)?;
            let v = local(&loaded.function, &x, m)?;
            v.validate(&loaded.function)?;
            serde_json::to_value(v).expect("serializable")
        }
        (None, None) => global_report(&loaded.function, m, sample, seed)?,
    };
    report.result = result;
    Ok((report, Ok(())))
}

fn global_report(
    f: &BoolFn,
    m: MeasureId,
    sample: Option<u64>,
    seed: u64,
) -> Result<Value, Failure> {
    let r = match sample {
        Some(count) => global_with(f, m, InputPlan::Sampled { seed, count })?,
        None => global(f, m)?,
    };
    Ok(serde_json::to_value(r).expect("serializable"))
}

fn cmd_compose(
    cli: &Cli,
    names: &[String],
    n: Option<usize>,
    tree: &TreeArgs,
    output: Option<&PathBuf>,
) -> Result<Outcome, Failure> {
    let loaded: Vec<Loaded> = names
        .iter()
        .map(|s| load_fn(s, n, cli.max_arity))
        .collect::<Result<_, _>>()?;
    let gates = loaded.iter().map(|l| l.function.clone()).collect();
    let ens =
        ensemble(gates, tree)?.ok_or_else(|| parse_failure("compose needs --tree or --uniform"))?;
    check_arity(ens.tree.leaf_count(), cli.max_arity)?;
    let composed = compose_boolfn(&ens)?;
    let text = composed.to_btt();
    let mut report = Report::default();
    for l in &loaded {
        report.add_loaded(l);
    }
    let mut result = json!({ "arity": composed.arity(), "ones": composed.count_ones() });
    match output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
            result["output"] = json!(path.display().to_string());
        }
        None => result["btt"] = json!(text),
    }
    report.add_input("composed", &composed);
    report.result = result;
    Ok((report, Ok(())))
}

fn tolerance(tol: f64) -> Result<boolcomp::Q, Failure> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(parse_failure("--tol must lie in (0, 1)"));
    }
    Ok(boolcomp::rational::q_from_f64(tol))
}

fn cmd_charval(cli: &Cli, f: &FnArg, m: MeasureId, tol: f64) -> Result<Outcome, Failure> {
    let loaded = load_fn(&f.function, f.n, cli.max_arity)?;
    let cv = charval(&loaded.function, m, &tolerance(tol)?)?;
    let dec = |x: &boolcomp::Q| boolcomp::rational::fmt_decimal(x, 12);
    let mut report = Report::default();
    report.add_loaded(&loaded);
    report.result = json!({
        "interval": [dec(&cv.lo), dec(&cv.hi)],
        "charval": cv,
    });
    Ok((report, Ok(())))
}

fn cmd_limit(cli: &Cli, f: &FnArg, m: MeasureId, kmax: usize) -> Result<Outcome, Failure> {
    let loaded = load_fn(&f.function, f.n, cli.max_arity)?;
    let table = limit_convergence(&loaded.function, m, kmax)?;
    let verdict = if table.holds() {
        Ok(())
    } else {
        Err("a row leaves the sandwich envelope".to_string())
    };
    let mut report = Report::default();
    report.add_loaded(&loaded);
    report.result = serde_json::to_value(table).expect("serializable");
    Ok((report, verdict))
}

fn cmd_verify(suite: &str) -> Result<Outcome, Failure> {
    let suites: Vec<Suite> = if suite.eq_ignore_ascii_case("all") {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let mut reports = vec![];
    let mut first = None;
    for s in suites {
        eprintln!("boolcomp: running suite {s}");
        let r = run_suite(s)?;
        if first.is_none() {
            first = r
                .first_failure()
                .map(|f| format!("{s}: {}: {}", f.name, f.detail));
        }
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    let report = Report::new(json!({ "passed": passed, "suites": reports }));
    Ok((report, first.map_or(Ok(()), Err)))
}
