//! `enda`: exact checks on endomorphism semigroups from the command line.
//!
//! Exit status: 0 when the computation succeeds and every check holds,
//! 1 when a check fails (the output carries the counterexample), 2 on bad input.

mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "enda", version, about = "Exact algebra for endomorphism semigroups of free and nilpotent algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized batches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank-1 matrix factorization.
    #[command(subcommand)]
    Rank1(Rank1Command),
    /// Conjugate a matrix-unit family to the elementary matrices.
    ConjugateUnits {
        #[arg(long, default_value = "Z")]
        ring: String,
        /// JSON `n x n` array of matrices, `family[i][j] = P_ij`.
        #[arg(long)]
        matrix: String,
    },
    /// The Z[sqrt(-5)] example.
    #[command(subcommand)]
    Dedekind(DedekindCommand),
    /// Solve the linear system for twisting polynomials `g` of degree `m-1`.
    Gsolve {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        m: usize,
    },
    /// Check a candidate twisting polynomial.
    Gverify {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        poly: String,
    },
    /// Twisted-sum bijections.
    #[command(subcommand)]
    Tau(TauCommand),
    /// Endomorphism families.
    #[command(subcommand)]
    Endo(EndoCommand),
    /// Adjoint-bijection recipes.
    #[command(subcommand)]
    Recipe(RecipeCommand),
    /// Polynomials.
    #[command(subcommand)]
    Poly(PolyCommand),
    /// Run every built-in verification suite.
    Selftest {
        /// Run only these suites (1-10).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        /// Include wall-clock times (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct MatrixInput {
    #[arg(long, default_value = "Z")]
    pub ring: String,
    /// JSON array of rows of element literals.
    #[arg(long, conflicts_with_all = ["paper_m", "paper_c"])]
    pub matrix: Option<String>,
    /// The built-in matrix m = [[1+w,-2],[-2,1-w]] over Z[sqrt(-5)].
    #[arg(long)]
    pub paper_m: bool,
    /// The built-in matrix c = [[1+w,2],[3,1-w]] over Z[sqrt(-5)].
    #[arg(long, conflicts_with = "paper_m")]
    pub paper_c: bool,
}

#[derive(Subcommand, Debug)]
pub enum Rank1Command {
    /// Write a rank-1 matrix as column times row, or certify that no such form exists.
    Factor(MatrixInput),
    /// Rank over the fraction field.
    Rank(MatrixInput),
}

#[derive(Subcommand, Debug)]
pub enum DedekindCommand {
    /// Check every claim about the example matrices exactly.
    Report,
}

#[derive(Args, Debug, Clone)]
pub struct AlgebraInput {
    #[arg(long)]
    pub ring: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Nilpotency class; omit for the free algebra.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct TwistInput {
    #[command(flatten)]
    pub algebra: AlgebraInput,
    /// The twisting polynomial in x1, x2.
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, default_value = "1")]
    pub gamma: String,
    /// Reverse words before twisting.
    #[arg(long)]
    pub mirror: bool,
    /// The built-in twist over F2: n = 2, class 3, g = x1*x2 + x2*x1.
    #[arg(long)]
    pub paper_f2: bool,
    /// Read the recipe from a JSON file instead.
    #[arg(long, conflicts_with_all = ["poly", "paper_f2"])]
    pub recipe: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum TauCommand {
    /// Validate a twisting polynomial and print the recipe.
    Build(TwistInput),
    /// Check the power laws, order and derivative identities of a twist.
    Verify {
        #[command(flatten)]
        input: TwistInput,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum EndoCommand {
    /// Recover a base on which a matrix-unit family acts by the standard maps.
    StandardBase {
        /// Recipe whose conjugation action supplies the family.
        #[arg(long, conflicts_with = "family")]
        recipe: Option<String>,
        /// Family JSON file with keys `e_i_j`.
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        algebra: AlgebraInput,
    },
}

#[derive(Subcommand, Debug)]
pub enum RecipeCommand {
    /// Classify a recipe and check its derivative operations.
    Classify {
        #[arg(long)]
        recipe: String,
        #[command(flatten)]
        algebra: AlgebraInput,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum PolyCommand {
    /// Print a polynomial in canonical form, optionally after applying a recipe.
    Eval {
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        algebra: AlgebraInput,
        #[arg(long)]
        recipe: Option<String>,
        /// Apply the inverse of the recipe.
        #[arg(long, requires = "recipe")]
        inverse: bool,
    },
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
    let color = std::env::var("ENDA_COLOR").is_ok_and(|v| v == "1");
    match commands::run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report.json).unwrap(),
                Format::Text => commands::paint(&report.text, color),
            };
            let _ = writeln!(out, "{}", text.trim_end());
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("enda: {e}");
            ExitCode::from(e.code())
        }
    }
}
