//! Command-line front end: definition files, command dispatch and reports.

pub mod commands;
pub mod defs;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::run;
pub use report::{Report, Status};

#[derive(Parser, Debug)]
#[command(name = "pcoupling", version, about = "Coupling Poisson tensors: verification and truncated cohomology")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Definition file; names then refer to its sections instead of built-in examples.
    #[arg(long, global = true)]
    pub file: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 2)]
    pub degree_bound: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Substitute a rational for a constant, e.g. `c=1/2`.
    #[arg(long = "set", global = true, value_name = "NAME=RATIONAL")]
    pub set: Vec<String>,
    /// Components of ϱ for `so3-leaf` and `cylinder`, comma separated; one value applies to both.
    #[arg(long, global = true, value_name = "EXPR-LIST")]
    pub rho: Option<String>,
    /// Vertical structure for `product-r2`.
    #[arg(long, global = true, value_enum, default_value_t = FiberArg::La2)]
    pub fiber: FiberArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FiberArg {
    La2,
    So3,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Jacobi identity and coupling conditions.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Geometric data (γ, σ, P) of a coupling tensor.
    #[command(subcommand)]
    Data(DataCmd),
    /// Bigraded components relative to a connection.
    Bigrade {
        tensor: String,
        #[arg(long)]
        connection: Option<String>,
    },
    /// Curvature of a connection and the Bianchi identity.
    Curvature { connection: String },
    #[command(subcommand)]
    Cohomology(CohomologyCmd),
    /// Infinitesimal automorphisms.
    #[command(subcommand)]
    Automorphism(AutomorphismCmd),
    /// Hypotheses of the vanishing theorem at the truncation bound.
    Vanishing {
        tensor: String,
        /// Flat connection name, or `trivial`.
        #[arg(long, default_value = "trivial")]
        flat: String,
    },
    #[command(subcommand)]
    Example(ExampleCmd),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    Jacobi { tensor: String },
    Coupling { tensor: String },
}

#[derive(Subcommand, Debug)]
pub enum DataCmd {
    Extract {
        tensor: String,
    },
    Verify {
        tensor: String,
    },
    /// Assemble Π from data; without data flags, rebuild the tensor from its own data.
    Build {
        tensor: Option<String>,
        #[arg(long)]
        connection: Option<String>,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long)]
        vertical: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CohomologyCmd {
    H0 {
        tensor: String,
    },
    H1 {
        tensor: String,
    },
    Hbar {
        tensor: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
    },
    Spectral {
        tensor: String,
    },
    /// Both sides of the splitting of H¹.
    Split {
        tensor: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum AutomorphismCmd {
    /// Split a Poisson vector field into horizontal and vertical parts.
    Split {
        tensor: String,
        /// Components such as `(u) = 1; (x2) = x3`.
        #[arg(long)]
        field: String,
    },
    /// Extend a vertical Poisson field to a Poisson field of Π.
    Extend {
        tensor: String,
        #[arg(long)]
        vertical: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExampleCmd {
    Run { name: String },
    List,
}
