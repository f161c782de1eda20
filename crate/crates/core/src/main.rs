use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use drsp_core::canonical::{has_ordered_pattern, FeasibilityBasis};
use drsp_core::drsp::MAX_QUBITS;
use drsp_core::io::{division_to_json, parse_any, parse_system, to_json, to_text};
use drsp_core::oracle::{DEFAULT_GF2_LIMIT, DEFAULT_SIGN_LIMIT};
use drsp_core::{
    brute_force_gf2, brute_force_signs, feasibility, find_solution, generate_ordered_type,
    simplify_to_ordered, simulate_drsp, validate_semi_orthogonal, validate_special_orthogonal,
    Error, Mode, ParameterVector, SymbolicMatrix,
};

#[derive(Parser)]
#[command(name = "drsp", version, about = "Sign-permutation orthogonal matrices for deterministic remote state preparation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the ordered type (index r XOR c) of order 2^n.
    Ordered {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
        n: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Solve the sign system of a semi-orthogonal matrix.
    Solve {
        /// Matrix file (JSON or text), `-` for stdin.
        input: String,
        /// Where to write the signed witness.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the augmented system, one `bits|constant` row per line.
        #[arg(long)]
        dump_system: Option<PathBuf>,
        /// Write the variable listing, one `variable operator lo hi` per line.
        #[arg(long)]
        dump_variables: Option<PathBuf>,
    },
    /// Check a matrix for semi or special orthogonality.
    Verify {
        input: String,
        /// Check as this mode instead of the file's own.
        #[arg(long = "as", value_enum)]
        as_mode: Option<ModeArg>,
    },
    /// Find row and column permutations carrying a matrix to the ordered type.
    Simplify {
        input: String,
        #[command(flatten)]
        out: Output,
    },
    /// Decide whether a special orthogonal matrix of order 2^n exists.
    Feasibility {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=63))]
        n: u32,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exhaustive search over couple signs or XOR-system assignments.
    Oracle {
        input: String,
        /// Treat the input as an XOR system in `bits|constant` rows.
        #[arg(long)]
        gf2: bool,
        /// Largest variable count to enumerate.
        #[arg(long)]
        limit: Option<usize>,
        /// Write each sign witness as a list of valued divisions, one per line.
        #[arg(long)]
        dump_witnesses: Option<PathBuf>,
    },
    /// Run the state-preparation protocol on every measurement outcome.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_QUBITS as i64))]
        n: u32,
        /// Comma-separated real target amplitudes; random when omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        psi: Option<Vec<f64>>,
        /// Seed for the random target.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Special matrix to measure with; the feasibility witness by default.
        #[arg(long)]
        matrix: Option<String>,
    },
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Semi,
    Special,
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Run = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Lib(e)) => {
            eprintln!("error reason={} message={:?}", e.kind(), e.to_string());
            match e {
                Error::TooLarge { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error reason=Io message={msg:?}");
            ExitCode::from(2)
        }
    }
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read_input(input: &str) -> Result<String, Failure> {
    if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(input)?)
    }
}

fn read_matrix(input: &str) -> Result<SymbolicMatrix, Failure> {
    Ok(parse_any(&read_input(input)?)?)
}

fn render(m: &SymbolicMatrix, format: Format) -> String {
    match format {
        Format::Json => to_json(m),
        Format::Text => to_text(m),
    }
}

fn emit(m: &SymbolicMatrix, out: &Output) -> Result<(), Failure> {
    let text = render(m, out.format);
    match &out.output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Write a special matrix and re-read it to confirm it still verifies.
fn write_witness(m: &SymbolicMatrix, path: &Path, format: Format) -> Result<(), Failure> {
    fs::write(path, render(m, format))?;
    let back = parse_any(&fs::read_to_string(path)?)?;
    if back != *m || !validate_special_orthogonal(&back)? {
        return Err(Error::InvalidMatrix(format!("witness {} did not verify", path.display())).into());
    }
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn run(cmd: Command) -> Run {
    match cmd {
        Command::Ordered { n, out } => {
            emit(&generate_ordered_type(n), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            input,
            witness,
            format,
            dump_system,
            dump_variables,
        } => {
            let m = read_matrix(&input)?;
            let out = find_solution(&m)?;
            if let Some(path) = dump_system {
                fs::write(path, out.system.dump())?;
            }
            if let Some(path) = dump_variables {
                fs::write(path, out.table.variable_listing())?;
            }
            println!(
                "verdict={} n={} rows={} cols={} rank_full={} rank_coeff={}",
                if out.found { "feasible" } else { "infeasible" },
                m.qubits(),
                out.system.rows(),
                out.system.cols(),
                out.rank_full(),
                out.rank_coeff()
            );
            if let (Some(path), Some(w)) = (witness, &out.matrix) {
                write_witness(w, &path, format)?;
                println!("witness={}", path.display());
            }
            Ok(verdict(out.found))
        }
        Command::Verify { input, as_mode } => {
            let m = read_matrix(&input)?;
            let mode = match as_mode {
                Some(ModeArg::Semi) => Mode::Semi,
                Some(ModeArg::Special) => Mode::Special,
                None => m.mode(),
            };
            let ok = match mode {
                Mode::Semi => validate_semi_orthogonal(&m)?,
                Mode::Special => validate_special_orthogonal(&m)?,
            };
            println!("verified={ok} mode={} n={}", mode.as_str(), m.qubits());
            Ok(verdict(ok))
        }
        Command::Simplify { input, out } => {
            let m = read_matrix(&input)?;
            let s = simplify_to_ordered(&m)?;
            let simplified = s.apply(&m)?;
            eprintln!(
                "row_perm={} col_perm={} generators={} ordered={}",
                join(&s.row_perm),
                join(&s.col_perm),
                join(&s.generators),
                has_ordered_pattern(&simplified)
            );
            emit(&simplified, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Feasibility { n, witness, format } => {
            let f = feasibility(n);
            let basis = match f.basis {
                FeasibilityBasis::Solved {
                    rank_full,
                    rank_coeff,
                } => format!("basis=solved rank_full={rank_full} rank_coeff={rank_coeff}"),
                FeasibilityBasis::NestedBlock { anchor } => {
                    format!("basis=nested anchor={anchor}")
                }
            };
            println!(
                "verdict={} n={n} {basis}",
                if f.feasible { "feasible" } else { "infeasible" }
            );
            if let (Some(path), Some(w)) = (witness, &f.witness) {
                write_witness(w, &path, format)?;
                println!("witness={}", path.display());
            }
            Ok(verdict(f.feasible))
        }
        Command::Oracle {
            input,
            gf2,
            limit,
            dump_witnesses,
        } => {
            let text = read_input(&input)?;
            if gf2 {
                let sys = parse_system(&text)?;
                let out = brute_force_gf2(&sys, limit.unwrap_or(DEFAULT_GF2_LIMIT))?;
                println!(
                    "consistent={} variables={} solutions={}",
                    out.consistent,
                    sys.variables(),
                    out.all_solutions.len()
                );
                return Ok(verdict(out.consistent));
            }
            let m = parse_any(&text)?;
            let out = brute_force_signs(&m, limit.unwrap_or(DEFAULT_SIGN_LIMIT))?;
            println!("count={} variables={}", out.count, out.variables);
            if let Some(path) = dump_witnesses {
                let mut lines = String::new();
                for w in &out.witnesses {
                    let valued = out.table.with_solution(&w.bits)?;
                    let parts: Vec<String> =
                        valued.divisions().iter().map(division_to_json).collect();
                    lines.push_str(&format!("[{}]\n", parts.join(",")));
                }
                fs::write(path, lines)?;
            }
            Ok(verdict(out.count > 0))
        }
        Command::Simulate {
            n,
            psi,
            seed,
            matrix,
        } => {
            let order = 1usize << n;
            let params = match psi {
                Some(v) => ParameterVector::new(v)?,
                None => ParameterVector::random(order, &mut ChaCha8Rng::seed_from_u64(seed)),
            };
            let s = match matrix {
                Some(path) => read_matrix(&path)?,
                None => feasibility(n)
                    .witness
                    .ok_or_else(|| Error::InvalidMatrix("no witness for this n".into()))?,
            };
            let report = simulate_drsp(n, params.values(), &s)?;
            for o in &report.outcomes {
                println!(
                    "outcome={} probability={:.15} fidelity={:.15}",
                    o.index, o.probability, o.fidelity
                );
            }
            let ok = report.is_deterministic(1e-12);
            println!(
                "deterministic={ok} total_probability={:.15}",
                report.total_probability()
            );
            Ok(verdict(ok))
        }
    }
}
