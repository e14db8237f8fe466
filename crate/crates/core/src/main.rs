use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wolstenholme::expr::parse_spec;
use wolstenholme::oracle::residue_matrix;
use wolstenholme::polyring::{
    render_table, symbolic_coeff_table, symbolic_sum_table, table_to_json, BiPolyZp, CoeffDisplay,
};
use wolstenholme::strategy::{agreed_value, evaluate, evaluate_all, Strategy};
use wolstenholme::verify::{self, VerifyConfig, DEFAULT_BUDGET, DEFAULT_SEED};
use wolstenholme::{make_prime, Error};

const EXPR_HELP: &str = "\
Expressions are products of factors (c+k)^e, (k+c)^e or k^e with integers
c >= 0 and e >= 1, optionally followed by `/` and a denominator product.
A lone `1` stands for the empty product. Whitespace and `*` are optional.
The sum runs over k = 0..p-1, skipping every k at which a denominator
factor vanishes.

Examples:
  wolstenholme eval -p 17 \"(7+k)^9 / ((3+k)^13 (8+k)^8)\"
  wolstenholme eval -p 17 \"(14+k)^3 (10+k)^8 (4+k)^9\" --strategy esp";

#[derive(Parser)]
#[command(
    name = "wolstenholme",
    version,
    about = "Wolstenholme-type residue sums modulo a prime"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sum expression modulo p.
    #[command(after_help = EXPR_HELP)]
    Eval {
        #[arg(short)]
        p: i64,
        expr: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::All)]
        strategy: StrategyArg,
    },
    /// Check congruences over their parameter grids; one JSON report per line.
    Verify {
        /// Comma-separated ids, or `all`.
        #[arg(long, default_value = "all", value_delimiter = ',')]
        theorems: Vec<String>,
        /// List such as `5,7,11` or range such as `5..97`.
        #[arg(long, default_value = "5,7,11")]
        primes: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long = "mod", value_enum, default_value_t = Modulus::P)]
        modulus: Modulus,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print the known ids and exit.
        #[arg(long)]
        list: bool,
    },
    /// Emit a residue grid or a symbolic coefficient table.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        #[arg(short)]
        p: i64,
        #[arg(short, default_value_t = 1)]
        a: i64,
        #[arg(short, default_value_t = 1)]
        m: i64,
        #[arg(short, default_value_t = 1)]
        n: i64,
        #[arg(short, long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Show coefficients in (-p/2, p/2] instead of [0, p).
        #[arg(long)]
        signed: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Brute,
    Closed,
    Coeff,
    Esp,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Modulus {
    P,
    P2,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    ResidueMatrix,
    SumTable,
    CoeffTable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval { p, expr, strategy } => cmd_eval(p, &expr, strategy),
        Command::Verify {
            theorems,
            primes,
            budget,
            seed,
            modulus,
            output,
            list,
        } => {
            if list {
                cmd_list()
            } else {
                let cfg = VerifyConfig {
                    budget,
                    seed,
                    mod_p2: matches!(modulus, Modulus::P2),
                };
                cmd_verify(&theorems, &primes, &cfg, output)
            }
        }
        Command::Table {
            kind,
            p,
            a,
            m,
            n,
            format,
            signed,
            output,
        } => {
            let mode = if signed {
                CoeffDisplay::Signed
            } else {
                CoeffDisplay::Canonical
            };
            cmd_table(kind, p, a, m, n, format, mode, output)
        }
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e @ Error::Disagreement(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn io_err(e: io::Error) -> Error {
    Error::BadParams(e.to_string())
}

fn emit(text: &str, output: Option<PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, text).map_err(io_err),
        None => io::stdout().write_all(text.as_bytes()).map_err(io_err),
    }
}

fn cmd_eval(p: i64, expr: &str, strategy: StrategyArg) -> Result<Outcome, Error> {
    let pr = make_prime(p)?;
    let spec = parse_spec(&pr, expr)?;
    let single = match strategy {
        StrategyArg::Brute => Strategy::Brute,
        StrategyArg::Closed => Strategy::Closed,
        StrategyArg::Coeff => Strategy::Coeff,
        StrategyArg::Esp => Strategy::Esp,
        StrategyArg::All => {
            let outcomes = evaluate_all(&spec);
            for (st, outcome) in &outcomes {
                match outcome {
                    Ok(v) => println!("{st}: {v}"),
                    Err(e) => eprintln!("{st}: skipped ({e})"),
                }
            }
            println!("{}", agreed_value(&outcomes)?);
            return Ok(Outcome::Pass);
        }
    };
    println!("{}", evaluate(&spec, single)?);
    Ok(Outcome::Pass)
}

fn cmd_list() -> Result<Outcome, Error> {
    for id in verify::theorem_ids() {
        let th = verify::find(id)?;
        println!("{id}\t{}", th.title);
    }
    Ok(Outcome::Pass)
}

fn cmd_verify(
    ids: &[String],
    primes: &str,
    cfg: &VerifyConfig,
    output: Option<PathBuf>,
) -> Result<Outcome, Error> {
    let theorems = verify::resolve(ids)?;
    let primes = verify::parse_primes(primes)?;
    verify::init_thread_pool();
    eprintln!("seed: {}, budget: {}", cfg.seed, cfg.budget);
    let reports = verify::verify_all(&theorems, &primes, cfg);
    let mut lines = String::new();
    let mut failed = 0;
    for r in &reports {
        lines.push_str(&r.to_json_line());
        lines.push('\n');
        let status = if r.passed() { "pass" } else { "FAIL" };
        eprintln!(
            "{status} {} p={} grid={}{} failures={} ({:.1} ms)",
            r.theorem,
            r.prime,
            r.grid_size,
            if r.exhaustive { "" } else { " sampled" },
            r.failures.len(),
            r.elapsed_ms
        );
        if !r.passed() {
            failed += 1;
        }
    }
    emit(&lines, output)?;
    eprintln!(
        "{} of {} reports passed",
        reports.len() - failed,
        reports.len()
    );
    Ok(if failed == 0 {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_table(
    kind: TableKind,
    p: i64,
    a: i64,
    m: i64,
    n: i64,
    format: Format,
    mode: CoeffDisplay,
    output: Option<PathBuf>,
) -> Result<Outcome, Error> {
    let pr = make_prime(p)?;
    let text = match kind {
        TableKind::ResidueMatrix => {
            let a = u64::try_from(a)
                .map_err(|_| Error::BadParams(format!("a = {a} must be positive")))?;
            let grid = residue_matrix(&pr, a)?;
            match format {
                Format::Csv => grid.to_csv()?,
                Format::Json => grid.to_json() + "\n",
                Format::Text => grid
                    .entries
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|v| format!("{v:>3}"))
                            .collect::<Vec<_>>()
                            .join("")
                            + "\n"
                    })
                    .collect(),
            }
        }
        TableKind::SumTable | TableKind::CoeffTable => {
            let (rows, first) = match kind {
                TableKind::SumTable => (symbolic_sum_table(&pr, m, n)?, 1),
                _ => (symbolic_coeff_table(&pr, m, n)?, 0),
            };
            let indexed: Vec<(usize, &BiPolyZp)> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| (i + first, r))
                .collect();
            match format {
                Format::Text => render_table(&indexed, mode),
                Format::Json => table_to_json(pr.p(), &indexed) + "\n",
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(vec![]);
                    w.write_record(["index", "a_degree", "b_degree", "coeff"])
                        .map_err(|e| Error::BadParams(e.to_string()))?;
                    for (index, row) in &indexed {
                        for mono in row.monomials() {
                            w.serialize((index, mono.ca, mono.cb, mono.coeff))
                                .map_err(|e| Error::BadParams(e.to_string()))?;
                        }
                    }
                    let bytes = w
                        .into_inner()
                        .map_err(|e| Error::BadParams(e.to_string()))?;
                    String::from_utf8(bytes).expect("csv output is ascii")
                }
            }
        }
    };
    emit(&text, output)?;
    Ok(Outcome::Pass)
}
