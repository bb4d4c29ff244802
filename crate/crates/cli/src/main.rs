use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmray::{Config, Error};
use serde_json::{json, Value};

mod commands;
mod render;

#[derive(Parser, Debug)]
#[command(name = "cmray", version, about = "Ray class groups, Shimura class groups and CM period matrices of quartic CM fields")]
struct Cli {
    /// Seed for prime splitting and relation searches.
    #[arg(long, global = true, default_value_t = Config::default().seed)]
    seed: u64,
    /// Print a summary and timings to stderr, and add timings to the report.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ray class group Cl(m) of a quartic CM or real quadratic field.
    Classgroup(ClassgroupArgs),
    /// Shimura class group C_K(m).
    Shimura(ShimuraArgs),
    /// Containment test of the Hilbert class field of the reflex.
    Star(StarArgs),
    /// Period matrix, theta constants, Rosenhain and Igusa invariants.
    Analytic(AnalyticArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TypeArg {
    Positive,
    Mixed,
}

#[derive(Args, Debug)]
pub struct FieldArg {
    /// `A,B` for the field defined by x^4 + A x^2 + B.
    #[arg(long, value_name = "A,B")]
    pub field: Option<String>,
    /// CM type class.
    #[arg(long = "type", value_enum, default_value_t = TypeArg::Positive)]
    pub cm_type: TypeArg,
}

#[derive(Args, Debug)]
pub struct ClassgroupArgs {
    #[command(flatten)]
    pub field: FieldArg,
    /// `D` for the real quadratic field defined by x^2 - D.
    #[arg(long, value_name = "D", conflicts_with = "field")]
    pub quadratic: Option<String>,
    #[arg(long, default_value = "1")]
    pub m: String,
    /// Include the infinite places in the modulus.
    #[arg(long)]
    pub narrow: bool,
}

#[derive(Args, Debug)]
pub struct ShimuraArgs {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long, default_value = "1")]
    pub m: String,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["m", "find_ms", "minimal", "mixed"]))]
pub struct StarArgs {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long)]
    pub m: Option<String>,
    /// Select S and report m_S.
    #[arg(long)]
    pub find_ms: bool,
    /// Smallest m up to --bound for which the containment holds.
    #[arg(long, requires = "bound")]
    pub minimal: bool,
    #[arg(long)]
    pub bound: Option<u64>,
    /// `m1,m2` for the mixed containment with H(m1) and CM(m2).
    #[arg(long, value_name = "M1,M2")]
    pub mixed: Option<String>,
}

#[derive(Args, Debug)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub field: FieldArg,
    /// Two-element ideal `N,poly`, e.g. `49,alpha+5`.
    #[arg(long, value_name = "N,POLY")]
    pub ideal: Option<String>,
    /// Working precision in bits.
    #[arg(long, env = "CMRAY_PRECISION", default_value_t = cmray::analytic::DEFAULT_PRECISION)]
    pub precision: u32,
    /// Include all sixteen theta constants.
    #[arg(long)]
    pub theta_table: bool,
    /// Use this period matrix instead of computing one:
    /// `re11,im11,re12,im12,re22,im22` as decimals.
    #[arg(long, value_name = "RE11,IM11,RE12,IM12,RE22,IM22", allow_hyphen_values = true)]
    pub omega: Option<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::NotCm(_) | Error::Reducible => 2,
        Error::Resource(_) => 3,
        _ => 1,
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::Reducible => "reducible",
        Error::NotCm(_) => "not_cm",
        Error::Resource(_) => "resource",
        Error::Precision(_) => "precision",
        Error::Inconsistent(_) => "inconsistent",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = Config { seed: cli.seed, ..Config::default() };
    let start = Instant::now();
    let (name, res) = match &cli.cmd {
        Command::Classgroup(a) => ("classgroup", commands::classgroup(a, &cfg)),
        Command::Shimura(a) => ("shimura", commands::shimura(a, &cfg)),
        Command::Star(a) => ("star", commands::star(a, &cfg)),
        Command::Analytic(a) => ("analytic", commands::analytic(a, &cfg)),
    };
    let elapsed = start.elapsed().as_secs_f64();
    match res {
        Ok((inputs, result, summary)) => {
            let mut report = json!({
                "command": name,
                "seed": cli.seed.to_string(),
                "inputs": inputs,
                "result": result,
            });
            if cli.verbose {
                report["timings"] = json!({ "total_seconds": elapsed });
                eprintln!("{summary}");
                eprintln!("{name}: {elapsed:.3} s");
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let err: Value = json!({ "error": { "command": name, "kind": kind(&e), "message": e.to_string() } });
            eprintln!("{err}");
            ExitCode::from(exit_code(&e))
        }
    }
}
