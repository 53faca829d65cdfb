mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sigma_lab::{Budget, Permutation};

#[derive(Parser)]
#[command(name = "sigma-lab", version, about = "Sort, count and classify with pattern-avoiding stacks in series")]
struct Cli {
    /// Output format; csv and bfile apply to sequences and tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for exhaustive scans.
    #[arg(long, global = true, env = "SIGMA_LAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Bfile,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Render {
    Ascii,
    Svg,
}

#[derive(Args, Clone, Copy)]
pub struct Limits {
    /// Largest length n to compute.
    #[arg(long)]
    max_n: Option<usize>,

    /// Allow exhaustive scans of length 11.
    #[arg(long)]
    extended: bool,
}

impl Limits {
    pub fn budget(self) -> Budget {
        if self.extended {
            Budget::EXTENDED
        } else {
            Budget::DEFAULT
        }
    }

    pub fn max_n(self, default: usize) -> usize {
        self.max_n.unwrap_or(default)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BijectionMode {
    /// Dyck path to 213-avoiding permutation.
    Dyck,
    /// 123-sortable permutation to UHD-avoiding Schröder path.
    Schroder,
    /// Insert a new maximum into a 123-sortable permutation starting with a descent.
    Phi,
    /// Delete the maximum (inverse of phi).
    Psi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableName {
    #[value(name = "paper:sec3")]
    Sec3,
    #[value(name = "paper:fig3")]
    Fig3,
    #[value(name = "paper:sec4")]
    Sec4,
    #[value(name = "paper:sec6")]
    Sec6,
}

#[derive(Subcommand)]
enum Command {
    /// Run the σ-machine on a permutation.
    Sort {
        #[arg(long)]
        sigma: Permutation,
        permutation: Permutation,
        /// Also print every move.
        #[arg(long)]
        trace: bool,
    },
    /// Print the moves the σ-machine makes.
    Trace {
        #[arg(long)]
        sigma: Permutation,
        permutation: Permutation,
    },
    /// Output of one pass through the σ-avoiding stack alone.
    Firstpass {
        #[arg(long)]
        sigma: Permutation,
        permutation: Permutation,
    },
    /// Decide whether the σ-sortable permutations form a class.
    Classify { sigma: Permutation },
    /// A σ-sortable permutation containing a non-sortable pattern.
    Witness { sigma: Permutation },
    /// Count σ-sortable permutations of each length by exhaustive scan.
    Enumerate {
        #[arg(long)]
        sigma: Permutation,
        #[command(flatten)]
        limits: Limits,
        /// List the sortable permutations of length max-n instead of counting.
        #[arg(long)]
        list: bool,
    },
    /// A named sequence with cross-checks: catalan, a, sort123, nonclass, height:K, av:P,Q.
    Sequence {
        name: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Recompute a printed table and compare.
    Table {
        #[arg(value_enum)]
        name: TableName,
        #[command(flatten)]
        limits: Limits,
    },
    /// Apply one of the bijections.
    Bijection {
        #[arg(value_enum)]
        mode: BijectionMode,
        input: String,
        /// Run the map backwards.
        #[arg(long)]
        inverse: bool,
        /// Draw the path involved.
        #[arg(long, value_enum)]
        render: Option<Render>,
    },
    /// Draw a Dyck or Schröder path.
    Render {
        path: String,
        #[arg(long, value_enum, default_value_t = Render::Ascii)]
        render: Render,
    },
    /// Recompute every table and cross-check up to max-n.
    Verify {
        #[command(flatten)]
        limits: Limits,
    },
}

/// Why a command did not succeed, mapped onto the exit status.
pub enum Failure {
    Usage(String),
    Mismatch,
    Library(sigma_lab::Error),
}

impl From<sigma_lab::Error> for Failure {
    fn from(e: sigma_lab::Error) -> Self {
        Failure::Library(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let f = cli.format;
    let outcome = match cli.command {
        Command::Sort { sigma, permutation, trace } => commands::sort(f, &sigma, &permutation, trace),
        Command::Trace { sigma, permutation } => commands::trace(f, &sigma, &permutation),
        Command::Firstpass { sigma, permutation } => commands::firstpass(f, &sigma, &permutation),
        Command::Classify { sigma } => commands::classify(f, &sigma),
        Command::Witness { sigma } => commands::witness(f, &sigma),
        Command::Enumerate { sigma, limits, list } => commands::enumerate(f, &sigma, limits, list),
        Command::Sequence { name, limits } => commands::sequence(f, &name, limits),
        Command::Table { name, limits } => commands::table(f, name, limits),
        Command::Bijection { mode, input, inverse, render } => commands::bijection(f, mode, &input, inverse, render),
        Command::Render { path, render } => commands::render(&path, render),
        Command::Verify { limits } => commands::verify(f, limits),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch) => ExitCode::from(2),
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            match e {
                sigma_lab::Error::BudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
