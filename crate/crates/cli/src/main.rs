use asm_check_core::checker::{explore_parallel, CheckOptions, Limits};
use asm_check_core::{compile, emit_bir_text, read_bir_text, validate, PipelineError, System, TranslateOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

/// Model checker for AsmetaL abstract state machines.
#[derive(Parser)]
#[command(name = "asm-check", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate and model check a model (deadlock and LTL properties).
    Check(CheckArgs),
    /// Print the translated guarded-command system.
    Emit(EmitArgs),
    /// Report whether a model can be translated.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    /// AsmetaL model (`.asm`) or guarded-command system (`.bir`).
    file: PathBuf,
    /// Check only this property.
    #[arg(long)]
    property: Option<String>,
    /// Skip the deadlock check.
    #[arg(long)]
    no_deadlock: bool,
    #[arg(long, env = "ASM_CHECK_MAX_STATES")]
    max_states: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Report inconsistent updates inside a par block as errors.
    #[arg(long)]
    strict: bool,
    /// Directory for counterexample trace files.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Multi-threaded reachability; checks deadlock and runtime errors only.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct EmitArgs {
    file: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ValidateArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_IO: u8 = 3;

enum Failure {
    Input(String),
    Io(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path, strict: bool) -> Result<System, Failure> {
    let src = read(path)?;
    if path.extension().is_some_and(|e| e == "bir") {
        return read_bir_text(&src).map_err(|e| PipelineError::from(e).into());
    }
    let compiled = compile(&src, TranslateOptions { strict, ..Default::default() })?;
    for w in compiled.validation.warnings() {
        eprintln!("{w}");
    }
    Ok(compiled.translation.system)
}

fn run_check(a: &CheckArgs) -> Result<u8, Failure> {
    let sys = load(&a.file, a.strict)?;
    let limits = Limits {
        max_states: a.max_states,
        max_depth: a.max_depth,
        max_time: a.max_seconds.map(Duration::from_secs_f64),
    };
    if a.parallel {
        let r = explore_parallel(&sys, &limits);
        match a.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&r).expect("serializable")),
            Format::Text => {
                println!("Transitions: {}, States: {}, Deadlocked States: {}, Errors found: {}", r.transitions, r.states, r.deadlocks, r.errors);
                if r.exhausted {
                    println!("** bound exhausted");
                }
            }
        }
        let bad = r.deadlocks > 0 && !a.no_deadlock || r.errors > 0 || r.exhausted;
        return Ok(if bad { EXIT_FAIL } else { 0 });
    }
    let opts = CheckOptions { limits, deadlock: !a.no_deadlock, property: a.property.clone() };
    let report = asm_check_core::check(&sys, &opts).map_err(Failure::Input)?;
    match a.format {
        Format::Text => print!("{}", report.render()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json(&sys)).expect("serializable")),
    }
    if let Some(dir) = &a.trace {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
        for (k, (name, t)) in report.traces().into_iter().enumerate() {
            write(&dir.join(format!("trace_{k}_{name}.txt")), &t.render(&sys))?;
            let json = serde_json::to_string_pretty(&t.to_json(&sys)).expect("serializable");
            write(&dir.join(format!("trace_{k}_{name}.json")), &json)?;
        }
    }
    Ok(if report.all_good() { 0 } else { EXIT_FAIL })
}

fn run_emit(a: &EmitArgs) -> Result<u8, Failure> {
    let text = emit_bir_text(&load(&a.file, a.strict)?);
    match &a.output {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run_validate(a: &ValidateArgs) -> Result<u8, Failure> {
    let src = read(&a.file)?;
    let model = asm_check_core::parse_source(&src).map_err(|e| Failure::from(PipelineError::from(e)))?;
    let report = validate(&model);
    match a.format {
        Format::Text => {
            print!("{}", report.to_text());
            println!("{}", if report.ok { "ok" } else { "not translatable" });
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("serializable")),
    }
    Ok(if report.ok { 0 } else { EXIT_INPUT })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => run_check(a),
        Command::Emit(a) => run_emit(a),
        Command::Validate(a) => run_validate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(m)) => {
            eprintln!("asm-check: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Io(m)) => {
            eprintln!("asm-check: {m}");
            ExitCode::from(EXIT_IO)
        }
    }
}
