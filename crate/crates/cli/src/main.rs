//! `verify <scenario>`: runs a verification suite and writes its reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use puiseux_lift::counterexample::ParamsOverrides;
use puiseux_lift::monalg::FieldSpec;
use puiseux_lift::scenario::{emit_report, run, Scenario, ScenarioName};

#[derive(Parser, Debug)]
#[command(name = "verify", version, about = "Run a named verification scenario")]
struct Args {
    /// grams, antimatter, strongly-atomic, main-theorem or furstenberg.
    scenario: ScenarioName,
    #[arg(long, default_value_t = 10)]
    depth: usize,
    /// `q` or `fp:P`.
    #[arg(long, default_value = "q")]
    field: FieldSpec,
    /// JSON overrides for epsilon, q_offset, b1 and c1.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; the VERIFY_OUT environment variable takes precedence.
    #[arg(long, default_value = "verify-out")]
    out: PathBuf,
    /// Seed for random sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn execute(args: Args) -> Result<bool, puiseux_lift::Error> {
    let mut scenario = Scenario::new(args.scenario, args.depth)?
        .with_field(args.field)
        .with_seed(args.seed);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| puiseux_lift::Error::Config(format!("{}: {e}", path.display())))?;
        scenario = scenario.with_overrides(ParamsOverrides::from_json(&text)?);
    }
    let out = std::env::var_os("VERIFY_OUT").map(PathBuf::from).unwrap_or(args.out);
    let result = run(&scenario)?;
    emit_report(&result, &out)?;
    for c in &result.checks {
        println!("{:<32} {:<13} {}", c.id, c.report.status.as_str(), c.anchor);
    }
    println!("{} -> {}", result.status().as_str(), out.display());
    Ok(result.passed())
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("verify: {e}");
            ExitCode::from(2)
        }
    }
}
