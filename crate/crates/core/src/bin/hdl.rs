use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hdl_core::oracle::{self, screen};
use hdl_core::parse::parse_formula_in;
use hdl_core::script::{self, CheckResult, ScriptError, Status};
use hdl_core::EvalBudget;

const OK: u8 = 0;
const REJECTED: u8 = 1;
const COUNTEREXAMPLE: u8 = 2;
const UNSCREENED: u8 = 3;
const USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "hdl", version, about = "Proof checker and falsifier for dynamic theories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a proof script and screen its assumptions.
    Check {
        script: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Exit 0 even if an assumption could not be screened.
        #[arg(long)]
        allow_unscreened: bool,
    },
    /// Search for a state falsifying a formula.
    Falsify {
        /// Theory declaration in script syntax.
        #[arg(long, default_value = "full(semiring(int))")]
        theory: String,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Audit axiom schemas and theory laws on random instances.
    Audit {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Defaults to HDL_SEED, else 7.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a shipped case study end to end.
    Demo {
        #[arg(value_parser = demo_names())]
        name: String,
        #[arg(long)]
        allow_unscreened: bool,
    },
    /// Print the proof-script command table as Markdown.
    Commands,
}

#[derive(Args)]
struct BudgetArgs {
    /// Default value window, `lo..hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    /// Window for one variable or a world prefix, `name=lo..hi`.
    #[arg(long = "var-window", value_parser = parse_var_window, allow_hyphen_values = true)]
    var_window: Vec<(String, (i64, i64))>,
    #[arg(long)]
    star_depth: Option<usize>,
    #[arg(long)]
    quant_cap: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn demo_names() -> Vec<&'static str> {
    script::DEMOS.iter().map(|d| d.name).collect()
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got {s}"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_var_window(s: &str) -> Result<(String, (i64, i64)), String> {
    let (name, range) = s.split_once('=').ok_or_else(|| format!("expected name=lo..hi, got {s}"))?;
    Ok((name.to_string(), parse_range(range)?))
}

impl BudgetArgs {
    fn budget(&self) -> EvalBudget {
        let mut b = EvalBudget::default();
        if let Some(w) = self.window {
            b.window = w;
        }
        for (name, (lo, hi)) in &self.var_window {
            b = b.var_window(name, *lo, *hi);
        }
        if let Some(d) = self.star_depth {
            b.star_depth = d;
        }
        if let Some(q) = self.quant_cap {
            b.quant_cap = q;
        }
        if let Some(n) = self.samples {
            b.samples = n;
        }
        if let Some(s) = self.seed {
            b.seed = s;
        }
        b
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    ExitCode::from(match cli.command {
        Command::Check { script, budget, allow_unscreened } => {
            let budget = budget.budget();
            report(script::run_script(&script, &budget), allow_unscreened)
        }
        Command::Falsify { theory, formula, budget } => falsify(&theory, &formula, &budget.budget()),
        Command::Audit { trials, seed } => {
            let seed = match seed.map(Ok).or_else(|| std::env::var("HDL_SEED").ok().map(|s| s.parse())) {
                None => 7,
                Some(Ok(s)) => s,
                Some(Err(e)) => {
                    eprintln!("HDL_SEED: {e}");
                    return ExitCode::from(USAGE);
                }
            };
            let r = oracle::audit(trials, seed);
            print!("{}", r.render());
            if r.passed() {
                OK
            } else {
                COUNTEREXAMPLE
            }
        }
        Command::Commands => {
            print!("{}", script::command_table());
            OK
        }
        Command::Demo { name, allow_unscreened } => {
            let demo = script::demo(&name).expect("clap restricts demo names");
            println!("# {} ({})", demo.name, demo.file);
            let result = demo.run();
            let code = report(result.clone(), allow_unscreened);
            let Ok(r) = result else { return ExitCode::from(code) };
            if code != OK {
                return ExitCode::from(code);
            }
            let th = &r.steps.last().expect("qed step").handle;
            falsify_with(th.as_ref(), &r.goal, &demo.budget())
        }
    })
}

fn report(result: Result<CheckResult, ScriptError>, allow_unscreened: bool) -> u8 {
    match result {
        Ok(r) => {
            print!("{}", r.render());
            match r.status() {
                Status::Checked => OK,
                Status::Refuted => COUNTEREXAMPLE,
                Status::Unscreened if allow_unscreened => OK,
                Status::Unscreened => UNSCREENED,
            }
        }
        Err(e @ ScriptError::Kernel { .. }) => {
            eprintln!("rejected: {e}");
            REJECTED
        }
        Err(e) => {
            eprintln!("error: {e}");
            USAGE
        }
    }
}

fn falsify(decl: &str, text: &str, budget: &EvalBudget) -> u8 {
    if let Err(e) = budget.validate() {
        eprintln!("error: {e}");
        return USAGE;
    }
    let th = match script::parse_theory(decl) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: theory: {e}");
            return USAGE;
        }
    };
    let f = match parse_formula_in(text, th.as_ref()) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    falsify_with(th.as_ref(), &f, budget)
}

fn falsify_with(th: &dyn hdl_core::DynamicTheory, f: &hdl_core::Formula, budget: &EvalBudget) -> u8 {
    match screen(th, f, budget) {
        Ok(s) => match s.counterexample {
            Some(ce) => {
                println!("{ce}");
                COUNTEREXAMPLE
            }
            None => {
                println!("screened ({} states{})", s.states, if s.exhaustive { ", whole window" } else { "" });
                OK
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            USAGE
        }
    }
}
