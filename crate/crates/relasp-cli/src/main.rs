//! Command line front end: encode problems, query the planning oracle,
//! check candidate models, and run the verification suite.
//!
//! Exit codes: 0 success (including a completed model check, whatever
//! its verdict), 1 data error or failed verification, 2 I/O error,
//! 3 exhaustive-search bound exceeded. Diagnostics go to stderr; the
//! primary output stream carries only the requested artifact.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::io::Write as _;
use std::{env, fs, thread};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use relasp::emit::{parse_atom_name, render_program, write_smodels, write_text, NamedProgram};
use relasp::encode::{
    default_ordering, dependency_skeleton, encode_acyc, encode_p, encode_pc, encode_pd,
};
use relasp::generate::{random_relaxed, InstanceShape};
use relasp::oracle::{execution_order, h_plus};
use relasp::program::{Interpretation, LogicProgram, ProgAtom};
use relasp::strips::{parse_problem, relax, RelaxedProblem};
use relasp::velim::{eliminate, EliminationOrdering};
use relasp::verify::{verify_instance, VerifyOptions, VerifyReport};

#[derive(Parser)]
#[command(name = "relasp", version, about = "Delete-relaxation planning as ground logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a problem into a ground program and write it out.
    Encode(EncodeArgs),
    /// Compute the optimal relaxed plan cost by exhaustive search.
    Hplus(HplusArgs),
    /// Check a model file against an encoding under a semantics.
    CheckModel(CheckModelArgs),
    /// Run the verification suite on one instance or a seeded campaign.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodingKind {
    /// Choice-rule encoding for stable model semantics.
    P,
    /// Causal encoding without acyclicity rules; models need an
    /// external acyclicity check.
    Acyc,
    /// Causal encoding with vertex-elimination acyclicity rules.
    Pc,
    /// Diagnostic encoding with vertex-elimination acyclicity rules.
    Pd,
}

impl EncodingKind {
    fn label(self) -> &'static str {
        match self {
            EncodingKind::P => "p",
            EncodingKind::Acyc => "acyc",
            EncodingKind::Pc => "pc",
            EncodingKind::Pd => "pd",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatKind {
    Text,
    Smodels,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingKind {
    /// Greedy minimum-degree elimination ordering.
    MinDegree,
    /// Atoms in declaration order.
    InputOrder,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsKind {
    Stable,
    Supported,
    AcyclicSupported,
}

#[derive(clap::Args)]
struct EncodeArgs {
    /// Problem file.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = EncodingKind::P)]
    encoding: EncodingKind,
    #[arg(long, value_enum, default_value_t = FormatKind::Text)]
    format: FormatKind,
    /// Elimination ordering used by the pc and pd encodings.
    #[arg(long, value_enum, default_value_t = OrderingKind::MinDegree)]
    ordering: OrderingKind,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the symbol table (`number name` lines) to this file.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Solver command (may include arguments) to run on the emitted
    /// program; its reported model is then checked like `check-model`.
    /// Defaults to the RELASP_SOLVER environment variable.
    #[arg(long)]
    solver: Option<String>,
}

#[derive(clap::Args)]
struct HplusArgs {
    /// Problem file.
    input: PathBuf,
    /// Also print one optimal plan as an executable action sequence.
    #[arg(long)]
    plan: bool,
}

#[derive(clap::Args)]
struct CheckModelArgs {
    /// Problem file.
    input: PathBuf,
    /// File listing the model's true atoms, whitespace separated.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = EncodingKind::P)]
    encoding: EncodingKind,
    #[arg(long, value_enum, default_value_t = SemanticsKind::Stable)]
    semantics: SemanticsKind,
    #[arg(long, value_enum, default_value_t = OrderingKind::MinDegree)]
    ordering: OrderingKind,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Problem file; omit to run a seeded random campaign instead.
    #[arg(required_unless_present = "seed", conflicts_with = "seed")]
    input: Option<PathBuf>,
    /// Seed for the random campaign.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of campaign instances.
    #[arg(long, default_value_t = 25)]
    count: usize,
    #[arg(long, default_value_t = 6)]
    max_atoms: usize,
    #[arg(long, default_value_t = 6)]
    max_actions: usize,
    #[arg(long, default_value_t = 3)]
    max_cost: u32,
    #[arg(long, default_value_t = 2)]
    max_pre: usize,
    #[arg(long, default_value_t = 2)]
    max_add: usize,
    #[arg(long, default_value_t = 2)]
    max_goals: usize,
    /// Print one machine-readable JSON summary instead of text lines.
    #[arg(long)]
    json: bool,
}

/// A failure paired with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn data(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }

    fn bound(message: impl Into<String>) -> Failure {
        Failure { code: 3, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Encode(args) => cmd_encode(&args),
        Cmd::Hplus(args) => cmd_hplus(&args),
        Cmd::CheckModel(args) => cmd_check_model(&args),
        Cmd::Verify(args) => cmd_verify(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_problem(path: &Path) -> Result<RelaxedProblem, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let strips = parse_problem(&text)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    Ok(relax(&strips))
}

fn make_ordering(kind: OrderingKind, problem: &RelaxedProblem) -> EliminationOrdering {
    match kind {
        OrderingKind::MinDegree => default_ordering(problem),
        OrderingKind::InputOrder => EliminationOrdering::input_order(problem.atoms.len()),
    }
}

fn build_encoding(
    kind: EncodingKind,
    problem: &RelaxedProblem,
    ordering: &EliminationOrdering,
) -> LogicProgram {
    match kind {
        EncodingKind::P => encode_p(problem),
        EncodingKind::Acyc => encode_acyc(problem),
        EncodingKind::Pc => encode_pc(problem, ordering),
        EncodingKind::Pd => encode_pd(problem, ordering),
    }
}

fn cmd_encode(args: &EncodeArgs) -> Result<u8, Failure> {
    let problem = load_problem(&args.input)?;
    let ordering = make_ordering(args.ordering, &problem);
    let program = build_encoding(args.encoding, &problem, &ordering);
    let named = render_program(&program, &problem);
    let payload = match args.format {
        FormatKind::Text => write_text(&named),
        FormatKind::Smodels => write_smodels(&named),
    };
    match &args.out {
        Some(path) => fs::write(path, &payload)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        None => print!("{payload}"),
    }
    if let Some(path) = &args.map {
        fs::write(path, named.symbols.lines())
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    }

    let elim = eliminate(&dependency_skeleton(&problem).graph, &ordering);
    eprintln!(
        "{}: {} rules, {} atoms, fill-in {}, two-cycles {}",
        args.encoding.label(),
        named.rules.len(),
        named.symbols.names().len(),
        elim.fill_in.len(),
        elim.two_cycle_pairs.len()
    );

    let solver = args
        .solver
        .clone()
        .or_else(|| env::var("RELASP_SOLVER").ok().filter(|s| !s.is_empty()));
    if let Some(command) = solver {
        let semantics = match args.encoding {
            EncodingKind::P => SemanticsKind::Stable,
            EncodingKind::Acyc => SemanticsKind::AcyclicSupported,
            EncodingKind::Pc | EncodingKind::Pd => SemanticsKind::Supported,
        };
        match run_solver(&command, &payload)? {
            None => println!("solver reports no model"),
            Some(atoms) => {
                let interp = named_interpretation(&atoms, &program, &named, &problem, args.encoding)?;
                print_verdict(&program, &problem, &interp, semantics, args.encoding);
            }
        }
    }
    Ok(0)
}

/// Runs the solver with the emitted program on stdin and extracts the
/// last reported answer set, `None` when it proves unsatisfiability.
fn run_solver(command: &str, payload: &str) -> Result<Option<Vec<String>>, Failure> {
    let mut words = command.split_whitespace();
    let binary = words
        .next()
        .ok_or_else(|| Failure::data("solver command is empty"))?;
    let mut child = Command::new(binary)
        .args(words)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Failure::io(format!("cannot run solver `{binary}`: {e}")))?;
    // A solver may exit before draining stdin (broken pipe); anything
    // that matters surfaces when its output is read.
    let _ = child.stdin.take().expect("stdin was piped").write_all(payload.as_bytes());
    let output = child
        .wait_with_output()
        .map_err(|e| Failure::io(format!("solver failed: {e}")))?;
    let stdout = String::from_utf8_lossy(&output.stdout);

    let lines: Vec<&str> = stdout.lines().collect();
    let mut model = None;
    for (i, line) in lines.iter().enumerate() {
        if line.trim_start().starts_with("Answer") {
            let atom_line = lines.get(i + 1).copied().unwrap_or("");
            model = Some(atom_line.split_whitespace().map(str::to_string).collect());
        }
    }
    if model.is_none() && stdout.contains("UNSATISFIABLE") {
        return Ok(None);
    }
    model
        .map(Some)
        .ok_or_else(|| Failure::data("solver output contains no answer set and no UNSATISFIABLE verdict"))
}

/// Resolves atom names against the encoding's signature; unknown names
/// are data errors per the model-file contract.
fn named_interpretation(
    names: &[String],
    program: &LogicProgram,
    named: &NamedProgram,
    problem: &RelaxedProblem,
    encoding: EncodingKind,
) -> Result<Interpretation, Failure> {
    let known: BTreeSet<&String> = named.symbols.names().iter().collect();
    let mut atoms = Vec::new();
    for name in names {
        if !known.contains(name) {
            return Err(Failure::data(format!(
                "`{name}` is not an atom of the {} encoding",
                encoding.label()
            )));
        }
        let atom = parse_atom_name(name, problem)
            .expect("symbol-table names parse back to their atoms");
        debug_assert!(program.atoms().contains(&atom));
        atoms.push(atom);
    }
    Ok(Interpretation::new(atoms))
}

fn cmd_hplus(args: &HplusArgs) -> Result<u8, Failure> {
    let problem = load_problem(&args.input)?;
    let plans = h_plus(&problem).map_err(|e| Failure::bound(e.to_string()))?;
    match plans.h_plus {
        Some(value) => println!("{value}"),
        None => println!("inf"),
    }
    if args.plan {
        if let Some((_, order)) = plans.optimal.first() {
            let mut line = String::from("plan:");
            for &action in order {
                line.push(' ');
                line.push_str(problem.action_name(action));
            }
            println!("{line}");
        }
    }
    Ok(0)
}

fn cmd_check_model(args: &CheckModelArgs) -> Result<u8, Failure> {
    let problem = load_problem(&args.input)?;
    let ordering = make_ordering(args.ordering, &problem);
    let program = build_encoding(args.encoding, &problem, &ordering);
    let named = render_program(&program, &problem);
    let text = fs::read_to_string(&args.model)
        .map_err(|e| Failure::io(format!("{}: {e}", args.model.display())))?;
    let names: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    let interp = named_interpretation(&names, &program, &named, &problem, args.encoding)?;
    print_verdict(&program, &problem, &interp, args.semantics, args.encoding);
    Ok(0)
}

/// Prints the verdict, the selected action subset, its executability,
/// and (for the stable encoding) whether the model is exactly the image
/// of that subset.
fn print_verdict(
    program: &LogicProgram,
    problem: &RelaxedProblem,
    interp: &Interpretation,
    semantics: SemanticsKind,
    encoding: EncodingKind,
) {
    let classical = program.is_model(interp);
    let supported = classical && program.is_supported(interp);
    let (label, valid, reason) = match semantics {
        SemanticsKind::Stable => {
            let stable = program.is_stable(interp);
            let reason = if classical {
                "the least model of the reduct differs from the model"
            } else {
                "not a classical model"
            };
            ("stable", stable, reason)
        }
        SemanticsKind::Supported => {
            let reason = if classical {
                "the true atoms are not exactly the heads of the supporting rules"
            } else {
                "not a classical model"
            };
            ("supported", supported, reason)
        }
        SemanticsKind::AcyclicSupported => {
            let acyclic = supported && interp.is_acyclic();
            let reason = if supported {
                "the dependency atoms form a cycle"
            } else if classical {
                "the true atoms are not exactly the heads of the supporting rules"
            } else {
                "not a classical model"
            };
            ("acyclic-supported", acyclic, reason)
        }
    };
    if valid {
        println!("model is a valid {label} model");
    } else {
        println!("model is not a valid {label} model: {reason}");
    }

    let subset: BTreeSet<usize> =
        interp.action_projection().iter().map(|&a| a as usize).collect();
    let subset_names: Vec<&str> = subset.iter().map(|&a| problem.action_name(a)).collect();
    println!("A' = {{{}}}", subset_names.join(", "));
    match execution_order(problem, &subset) {
        Some(order) => {
            let mut line = String::from("execution order:");
            for &action in &order {
                line.push(' ');
                line.push_str(problem.action_name(action));
            }
            println!("{line}");
        }
        None => println!("A' cannot be ordered into an executable sequence"),
    }

    if encoding == EncodingKind::P {
        let mut image: BTreeSet<ProgAtom> =
            subset.iter().map(|&a| ProgAtom::Action(a as u32)).collect();
        for &a in &subset {
            image.extend(problem.actions[a].add.iter().map(|&p| ProgAtom::Fluent(p as u32)));
        }
        if Interpretation::new(image) == *interp {
            println!("f(A') matches the model");
        } else {
            println!("f(A') differs from the model");
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let options = VerifyOptions::default();
    let outcomes: Vec<(String, VerifyReport)> = match (&args.input, args.seed) {
        (Some(path), None) => {
            let problem = load_problem(path)?;
            let report = verify_instance(&problem, &options)
                .map_err(|e| Failure::bound(e.to_string()))?;
            vec![(path.display().to_string(), report)]
        }
        (None, Some(seed)) => {
            let shape = InstanceShape {
                max_atoms: args.max_atoms,
                max_actions: args.max_actions,
                max_cost: args.max_cost,
                max_pre: args.max_pre,
                max_add: args.max_add,
                max_goals: args.max_goals,
                ..InstanceShape::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let problems: Vec<RelaxedProblem> =
                (0..args.count).map(|_| random_relaxed(&mut rng, &shape)).collect();
            let reports = parallel_verify(&problems, &options)?;
            reports
                .into_iter()
                .enumerate()
                .map(|(i, report)| (format!("instance {i}"), report))
                .collect()
        }
        _ => unreachable!("clap enforces exactly one of input and --seed"),
    };

    let all_passed = outcomes.iter().all(|(_, r)| r.passed());
    if args.json {
        print_json_summary(&outcomes, all_passed);
    } else {
        print_text_summary(&outcomes, args.seed.is_some());
    }
    Ok(if all_passed { 0 } else { 1 })
}

/// Verifies instances on a small worker pool; per-instance work stays
/// sequential.
fn parallel_verify(
    problems: &[RelaxedProblem],
    options: &VerifyOptions,
) -> Result<Vec<VerifyReport>, Failure> {
    let workers = thread::available_parallelism()
        .map(usize::from)
        .unwrap_or(1)
        .min(problems.len().max(1));
    let next = AtomicUsize::new(0);
    let slots = Mutex::new((0..problems.len()).map(|_| None).collect::<Vec<_>>());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= problems.len() {
                    break;
                }
                let result = verify_instance(&problems[index], options);
                slots.lock().expect("no panics while holding the lock")[index] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("all workers finished")
        .into_iter()
        .map(|slot| {
            slot.expect("every index was processed").map_err(|e| Failure::bound(e.to_string()))
        })
        .collect()
}

fn print_text_summary(outcomes: &[(String, VerifyReport)], campaign: bool) {
    if !campaign {
        let (label, report) = &outcomes[0];
        println!("{label}:");
        for check in &report.checks {
            if check.passed {
                println!("  {}: pass", check.name);
            } else {
                println!("  {}: FAIL ({})", check.name, check.details);
            }
        }
        return;
    }
    for (label, report) in outcomes {
        if report.passed() {
            println!("{label}: pass");
        } else {
            let failed: BTreeSet<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name)
                .collect();
            println!("{label}: FAIL ({})", failed.into_iter().collect::<Vec<_>>().join(", "));
        }
    }
    let passed = outcomes.iter().filter(|(_, r)| r.passed()).count();
    println!("{passed}/{} instances passed", outcomes.len());
}

fn print_json_summary(outcomes: &[(String, VerifyReport)], all_passed: bool) {
    let instances: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|(label, report)| {
            json!({
                "label": label,
                "passed": report.passed(),
                "checks": report
                    .checks
                    .iter()
                    .map(|c| json!({
                        "name": c.name,
                        "passed": c.passed,
                        "details": c.details,
                    }))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    println!("{}", json!({ "instances": instances, "all_passed": all_passed }));
}
