mod commands;
mod input;

use clap::{Parser, Subcommand, ValueEnum};
use commands::{Output, Single};
use freemon::graph::{Biarity, Variant};
use freemon::Error;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_TRUNCATION: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "freemon", version, about = "Free properads, operads, dioperads and half-props on S-bimodules")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Overrides the variant given in the presentation.
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,

    /// Run only one of the two constructions.
    #[arg(long, global = true, value_enum)]
    single: Option<SingleArg>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for the randomized suites of `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension table of the free monoid, as CSV.
    Dims { presentation: PathBuf },
    /// Run the verification suites and print one verdict per suite.
    Verify {
        presentation: PathBuf,
        monoid: Option<PathBuf>,
    },
    /// List basis classes at one biarity and weight.
    Basis {
        presentation: PathBuf,
        m: usize,
        n: usize,
        weight: u32,
    },
    /// Images of the free-monoid basis under the extension of a map.
    Extend {
        presentation: PathBuf,
        monoid: PathBuf,
        map: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Properad,
    Operad,
    Dioperad,
    HalfProp,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Properad => Variant::Properad,
            VariantArg::Operad => Variant::Operad,
            VariantArg::Dioperad => Variant::Dioperad,
            VariantArg::HalfProp => Variant::HalfProp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SingleArg {
    Colimit,
    Direct,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::NotEquivariant(_) => EXIT_PARSE,
        Error::TruncationExceeded(_) => EXIT_TRUNCATION,
        Error::NotAMonoid(_) => EXIT_MISMATCH,
        _ => EXIT_FAILURE,
    }
}

fn run(cli: &Cli) -> freemon::Result<Output> {
    let variant = cli.variant.map(Variant::from);
    let single = cli.single.map(|s| match s {
        SingleArg::Colimit => Single::Colimit,
        SingleArg::Direct => Single::Direct,
    });
    let jobs = cli.jobs.max(1);
    let load = |path: &PathBuf| input::parse_presentation(&input::read(path)?, variant);
    match &cli.command {
        Command::Dims { presentation } => commands::dims(&load(presentation)?, single, jobs),
        Command::Verify { presentation, monoid } => {
            let p = load(presentation)?;
            let m = monoid.as_ref().map(|m| input::parse_monoid(&input::read(m)?)).transpose()?;
            commands::verify(&p, m.as_ref(), cli.seed)
        }
        Command::Basis { presentation, m, n, weight } => {
            commands::basis(&load(presentation)?, Biarity::new(*m, *n), *weight, single, jobs)
        }
        Command::Extend { presentation, monoid, map } => {
            let p = load(presentation)?;
            let m = input::parse_monoid(&input::read(monoid)?)?;
            commands::extend(&p, &m, &input::read(map)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_FAILURE);
            }
        }
        None => print!("{}", out.text),
    }
    if out.failed {
        ExitCode::from(EXIT_MISMATCH)
    } else {
        ExitCode::SUCCESS
    }
}
