use clap::{Parser, Subcommand, ValueEnum};
use jsr::bounds::Budget;
use jsr::report::{
    bound_report, parse_set, plan_report, MethodSelection, EXIT_INVALID_INPUT, EXIT_NUMERICAL,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Certified bounds on the joint spectral radius of a set of matrices.
#[derive(Parser)]
#[command(name = "jsr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute certified bounds for a matrix set read from a JSON file.
    Bound {
        /// Input file: {"name"?: string, "matrices": [[[row], ...], ...]}
        file: PathBuf,
        /// Bound family to run; `all` combines every applicable method.
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        /// Kronecker power for --method kron (and word length for bruteforce).
        #[arg(long)]
        k: Option<u32>,
        /// Kronecker exponent of the lifted matrices for --method lift.
        #[arg(long)]
        l: Option<u32>,
        /// Number of successive lifts for --method recursive.
        #[arg(long)]
        depth: Option<u32>,
        /// Assert that the matrices share an invariant proper cone.
        #[arg(long)]
        assert_cone: bool,
        /// Capacity cap on operator dimensions and dense sides.
        #[arg(long)]
        budget_dim: Option<usize>,
        /// Refinement tolerance for the ellipsoid approximation.
        #[arg(long)]
        tol: Option<f64>,
        /// Print only "lower upper" instead of the JSON report.
        #[arg(long)]
        quiet: bool,
    },
    /// Pick the cheapest method reaching a requested accuracy.
    Plan {
        /// Number of matrices in the set.
        #[arg(long)]
        m: usize,
        /// Matrix side.
        #[arg(long)]
        n: usize,
        /// Requested accuracy is 1 - epsilon.
        #[arg(long)]
        epsilon: f64,
        /// Make Kronecker sums eligible (they need an invariant cone).
        #[arg(long)]
        assert_cone: bool,
        /// Capacity cap used for the feasibility flag.
        #[arg(long)]
        budget_dim: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Sum,
    Kron,
    Lift,
    Recursive,
    Bruteforce,
    Ellipsoid,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Bound {
            file,
            method,
            k,
            l,
            depth,
            assert_cone,
            budget_dim,
            tol,
            quiet,
        } => run_bound(file, method, k, l, depth, assert_cone, budget_dim, tol, quiet),
        Command::Plan {
            m,
            n,
            epsilon,
            assert_cone,
            budget_dim,
        } => run_plan(m, n, epsilon, assert_cone, budget_dim),
    };
    ExitCode::from(code as u8)
}

#[allow(clippy::too_many_arguments)]
fn run_bound(
    file: PathBuf,
    method: MethodArg,
    k: Option<u32>,
    l: Option<u32>,
    depth: Option<u32>,
    assert_cone: bool,
    budget_dim: Option<usize>,
    tol: Option<f64>,
    quiet: bool,
) -> i32 {
    let text = match std::fs::read_to_string(&file) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("jsr: cannot read {}: {e}", file.display());
            return EXIT_INVALID_INPUT;
        }
    };
    let (name, set) = match parse_set(&text) {
        Ok(parsed) => parsed,
        Err(e) => {
            eprintln!("jsr: invalid input: {e}");
            return EXIT_INVALID_INPUT;
        }
    };
    let set = set.with_cone_asserted(assert_cone);

    let mut budget = Budget::default();
    if let Some(dim) = budget_dim {
        budget = budget.with_dim_cap(dim);
    }
    if let Some(tol) = tol {
        budget.ellipsoid_tol = tol;
    }

    let selection = match method {
        MethodArg::All => MethodSelection::All,
        MethodArg::Sum => MethodSelection::Sum,
        MethodArg::Kron => MethodSelection::Kron { k: k.unwrap_or(4) },
        MethodArg::Lift => MethodSelection::Lift { l: l.unwrap_or(1) },
        MethodArg::Recursive => MethodSelection::Recursive {
            depth: depth.unwrap_or(2),
        },
        MethodArg::Bruteforce => MethodSelection::BruteForce { k: k.unwrap_or(8) },
        MethodArg::Ellipsoid => MethodSelection::Ellipsoid,
    };

    let (report, exit) = bound_report(name, &set, selection, &budget);
    if quiet {
        match &report.combined {
            Some(combined) => println!("{} {}", combined.lower, combined.upper),
            None => eprintln!("jsr: no bounds produced"),
        }
    } else {
        println!("{}", serde_json::to_string_pretty(&report).expect("report is serializable"));
    }
    if exit == EXIT_NUMERICAL {
        eprintln!("jsr: method did not produce a bound; see the report");
    }
    exit
}

fn run_plan(m: usize, n: usize, epsilon: f64, assert_cone: bool, budget_dim: Option<usize>) -> i32 {
    let mut budget = Budget::default();
    if let Some(dim) = budget_dim {
        budget = budget.with_dim_cap(dim);
    }
    match plan_report(m, n, epsilon, assert_cone, &budget) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report is serializable"));
            0
        }
        Err(e) => {
            eprintln!("jsr: invalid plan request: {e}");
            EXIT_INVALID_INPUT
        }
    }
}
