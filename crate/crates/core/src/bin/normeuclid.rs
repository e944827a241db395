use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use normeuclid::cli::{self, Basis, Bits, Command, Request, Response};
use normeuclid::numberfield::{FieldId, CACHE_DIR_ENV};
use normeuclid::Error;

/// Exact Euclidean division and GCD in four degree-8 rings of integers.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Indent the JSON response.
    #[arg(long, global = true)]
    pretty: bool,
    /// Output format; csv applies to bench only.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Field-data cache directory (overrides the environment variable).
    #[arg(long, global = true)]
    cache_dir: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    B,
    P,
}

#[derive(Args)]
struct TwoOperands {
    #[arg(long)]
    field: FieldId,
    /// Comma-separated coordinates, integers or p/q.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long, value_enum, default_value = "b")]
    basis: BasisArg,
}

#[derive(Subcommand)]
enum Sub {
    /// Read one JSON request from standard input (or a file).
    Run {
        #[arg(long)]
        input: Option<std::path::PathBuf>,
    },
    /// Print the certified field data.
    FieldInfo {
        #[arg(long)]
        field: FieldId,
    },
    /// Euclidean division a = b·q + r.
    Divide {
        #[command(flatten)]
        ops: TwoOperands,
        /// Recompute b·q + r independently.
        #[arg(long)]
        check: bool,
    },
    /// Extended gcd with Bézout coefficients.
    Gcd {
        #[command(flatten)]
        ops: TwoOperands,
    },
    /// Re-check the field certificates and the sup-norm table.
    Verify {
        #[arg(long)]
        field: Option<FieldId>,
    },
    /// Sampled lower bound for the maximal remainder ratio.
    EstimateAf {
        #[arg(long)]
        field: FieldId,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Division timings by coordinate bit length.
    Bench {
        #[arg(long)]
        field: FieldId,
        #[arg(long, value_delimiter = ',', default_values_t = [1000u32, 10_000, 100_000])]
        bits: Vec<u32>,
        #[arg(long, default_value_t = 3)]
        reps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reduced oracle and invariant checks.
    Selftest {
        #[arg(long, default_value_t = 200)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn two_operands(mut req: Request, ops: TwoOperands) -> Result<Request, Error> {
    req.field = Some(ops.field);
    req.basis = match ops.basis {
        BasisArg::B => Basis::B,
        BasisArg::P => Basis::P,
    };
    req.operands = vec![cli::parse_coord_list(&ops.a)?, cli::parse_coord_list(&ops.b)?];
    Ok(req)
}

fn request(sub: Sub) -> Result<Request, Error> {
    Ok(match sub {
        Sub::Run { input } => {
            let text = match input {
                Some(path) => std::fs::read_to_string(path)?,
                None => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s)?;
                    s
                }
            };
            cli::parse_request(&text)?
        }
        Sub::FieldInfo { field } => Request { field: Some(field), ..Request::new(Command::FieldInfo) },
        Sub::Divide { ops, check } => Request { check, ..two_operands(Request::new(Command::Divide), ops)? },
        Sub::Gcd { ops } => two_operands(Request::new(Command::Gcd), ops)?,
        Sub::Verify { field } => Request { field, ..Request::new(Command::Verify) },
        Sub::EstimateAf { field, count, seed } => Request {
            field: Some(field),
            count: Some(count),
            seed: Some(seed),
            ..Request::new(Command::EstimateAf)
        },
        Sub::Bench { field, bits, reps, seed } => Request {
            field: Some(field),
            bits: Some(Bits::Many(bits)),
            reps: Some(reps),
            seed: Some(seed),
            ..Request::new(Command::Bench)
        },
        Sub::Selftest { count, seed } => Request { count: Some(count), seed: Some(seed), ..Request::new(Command::Selftest) },
    })
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error_kind: {}\n{e}", e.kind());
    ExitCode::from(if matches!(e, Error::Io(_)) { 1 } else { 2 })
}

fn main() -> ExitCode {
    let args = Cli::parse();
    if let Some(dir) = &args.cache_dir {
        std::env::set_var(CACHE_DIR_ENV, dir);
    }
    let req = match request(args.command) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let resp: Response = cli::run(&req);
    if let Some(kind) = &resp.error_kind {
        eprintln!("error_kind: {kind}\n{}", resp.message.as_deref().unwrap_or(""));
    }
    let csv = args.format == Format::Csv && req.command == Command::Bench && resp.error_kind.is_none();
    if csv {
        let report: normeuclid::analysis::BenchReport =
            serde_json::from_value(resp.payload.clone().expect("ok responses carry a payload"))
                .expect("bench payload is a report");
        print!("{}", report.to_csv());
    } else {
        print!("{}", resp.to_json(args.pretty));
    }
    ExitCode::from(resp.exit_code() as u8)
}
