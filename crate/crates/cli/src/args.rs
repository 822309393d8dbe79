use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "mcfin",
    version,
    about = "Restricted set-partition sequences, modular witnesses and counterexample certificates",
    after_help = "Examples:\n  mcfin gen --family bell --n 10\n  mcfin cex phi --k 3\n  mcfin report --family bell --moduli 2,3,4,5 --n-max 2000 --format json"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Stamp output with the wall-clock time. Off by default so that output
    /// is byte-identical across runs.
    #[arg(long, global = true)]
    pub timestamps: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// bell, stirling, lah, fubini, bell-signed, bell-bicolored,
    /// bell-residue-class, catalan, central-binomial-half, a086714
    #[arg(long)]
    pub family: String,

    /// Number of special elements kept in distinct blocks.
    #[arg(long, default_value_t = 0)]
    pub r: u64,

    /// Fix the number of ordinary blocks.
    #[arg(long, conflicts_with = "sum_k")]
    pub k: Option<u64>,

    /// Sum over the number of blocks (the default).
    #[arg(long)]
    pub sum_k: bool,

    /// Allowed block sizes, e.g. "even" or "mod 3 in {0} from 3 except {1}".
    #[arg(long)]
    pub sizes: Option<String>,

    /// Residue class C,M of the block count, for bell-residue-class.
    #[arg(long, value_name = "C,M")]
    pub residue_class: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact values of a sequence.
    #[command(after_help = "Examples:\n  mcfin gen --family bell --n 10\n  mcfin gen --family stirling --r 2 --k 2 --n-max 8 --format csv")]
    Gen {
        #[command(flatten)]
        spec: SpecArgs,
        /// A single index.
        #[arg(long, conflicts_with = "n_max", required_unless_present = "n_max")]
        n: Option<u64>,
        /// All indices 0..=N.
        #[arg(long)]
        n_max: Option<u64>,
    },

    /// Values modulo m.
    #[command(after_help = "Examples:\n  mcfin residues --family bell --modulus 3 --n-max 20")]
    Residues {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 100)]
        n_max: u64,
    },

    /// Eventual period modulo m, backed by a linear recurrence when one is found.
    #[command(after_help = "Examples:\n  mcfin period --family bell --modulus 2\n  mcfin period --family fubini --modulus 10 --n-max 400 --format json")]
    Period {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        search: ModSearchArgs,
    },

    /// Shortest linear recurrence modulo m.
    #[command(after_help = "Examples:\n  mcfin recur --family bell --modulus 4\n  mcfin recur --family catalan --modulus 2 --n-max 300")]
    Recur {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        search: ModSearchArgs,
    },

    /// Integer linear recurrence and growth diagnostics on exact values.
    #[command(after_help = "Examples:\n  mcfin cfinite --family stirling --k 3\n  mcfin cfinite --family bell --n-max 60 --max-order 8")]
    Cfinite {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
        #[arg(long, default_value_t = 16)]
        max_order: usize,
    },

    /// Brute-force counts on small ground sets.
    #[command(subcommand)]
    Oracle(OracleCommand),

    /// Compare generated values with OEIS b-files.
    #[command(after_help = "Examples:\n  mcfin crosscheck --a A000110\n  mcfin crosscheck --all\n  mcfin crosscheck --a A005493 --generator \"--family bell --r 2\" --count 20")]
    Crosscheck {
        /// A-number to check.
        #[arg(long, required_unless_present = "all")]
        a: Option<String>,
        /// Check every vendored fixture against its documented generator.
        #[arg(long, conflicts_with = "a")]
        all: bool,
        /// Directory holding bNNNNNN.txt and bNNNNNN.json.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Allow downloading b-files that are neither vendored nor cached.
        #[arg(long)]
        online: bool,
        /// Download cache; defaults to $MCFIN_OEIS_CACHE.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Override the fixture's generator, e.g. "--family bell --r 2".
        #[arg(long, allow_hyphen_values = true, conflicts_with = "all")]
        generator: Option<String>,
        /// b-file index of the first term (with --generator).
        #[arg(long, default_value_t = 0)]
        offset: i64,
        /// Number of terms to compare (with --generator).
        #[arg(long, default_value_t = 30)]
        count: u64,
    },

    /// Parity stream of a(n+1) = binom(a(n), 2) and its certificates.
    #[command(subcommand)]
    Cex(CexCommand),

    /// Polynomial recursive systems.
    #[command(subcommand)]
    Prs(PrsCommand),

    /// Witness report over several moduli.
    #[command(after_help = "Examples:\n  mcfin report --family bell --moduli 2,3,4,5 --n-max 2000 --format json\n  mcfin report --family catalan --moduli 2 --n-max 400")]
    Report {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        moduli: Vec<u64>,
        #[arg(long, default_value_t = 2000)]
        n_max: u64,
        #[arg(long, default_value_t = 24)]
        max_order: usize,
        #[arg(long, default_value_t = 16)]
        min_margin: usize,
        #[arg(long, default_value_t = 16)]
        cfinite_order: usize,
        /// Exact values used for the C-finite search and growth check.
        #[arg(long, default_value_t = 200)]
        exact_n_max: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ModSearchArgs {
    #[arg(long)]
    pub modulus: u64,
    #[arg(long, default_value_t = 500)]
    pub n_max: u64,
    #[arg(long, default_value_t = 24)]
    pub max_order: usize,
    /// Equations required beyond the number of unknowns.
    #[arg(long, default_value_t = 16)]
    pub min_margin: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    Free,
    Head,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Set partitions of [n] under constraints.
    #[command(after_help = "Examples:\n  mcfin oracle partitions --n 5 --non-crossing\n  mcfin oracle partitions --n 5 --r 2 --internal-order head --by-blocks")]
    Partitions {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        r: u64,
        #[arg(long)]
        sizes: Option<String>,
        /// Exact total number of blocks.
        #[arg(long)]
        blocks: Option<u64>,
        /// Order the elements inside each block.
        #[arg(long, value_enum)]
        internal_order: Option<Placement>,
        /// Order the blocks among themselves.
        #[arg(long)]
        external_order: bool,
        #[arg(long)]
        non_crossing: bool,
        #[arg(long)]
        non_overlapping: bool,
        /// Print the count for every number of blocks.
        #[arg(long, conflicts_with = "blocks")]
        by_blocks: bool,
    },

    /// Binary relations on [n] of a given kind.
    #[command(after_help = "Examples:\n  mcfin oracle relations --n 3 --kind transitive\n  mcfin oracle relations --n 4")]
    Relations {
        #[arg(long)]
        n: u64,
        /// equivalence, linear-quasi, partial, quasi, transitive; all when omitted.
        #[arg(long)]
        kind: Option<String>,
        /// Permit n = 5 (2^25 relations).
        #[arg(long)]
        allow_slow: bool,
    },

    /// Equivalence relations with r disjoint marked classes.
    #[command(after_help = "Examples:\n  mcfin oracle er --n 4 --r 2")]
    Er {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum CexCommand {
    /// Parities of the orbit started at a value.
    #[command(after_help = "Examples:\n  mcfin cex beta --count 32\n  mcfin cex beta --start 3 --count 3")]
    Beta {
        #[arg(long, default_value_t = 4)]
        start: u64,
        #[arg(long)]
        count: u64,
    },

    /// The table of phi_k, or a bijection check.
    #[command(after_help = "Examples:\n  mcfin cex phi --k 3\n  mcfin cex phi --k 16 --verify")]
    Phi {
        #[arg(long)]
        k: u32,
        /// Check bijectivity instead of printing the table.
        #[arg(long)]
        verify: bool,
    },

    /// Refute eventual periodicity of the parity stream.
    #[command(after_help = "Examples:\n  mcfin cex certify --start 5 --period 7\n  mcfin cex certify --max-total 48")]
    Certify {
        #[arg(long, requires = "period", required_unless_present = "max_total")]
        start: Option<u64>,
        #[arg(long)]
        period: Option<u64>,
        /// Every (start, period) with period >= 1 and start + period <= T.
        #[arg(long, conflicts_with_all = ["start", "period"])]
        max_total: Option<u64>,
    },

    /// Pattern frequencies of the parity stream.
    #[command(after_help = "Examples:\n  mcfin cex stats --count 4096 --chunk 3 --format json")]
    Stats {
        #[arg(long, default_value_t = 4)]
        start: u64,
        #[arg(long, default_value_t = 65536)]
        count: u64,
        #[arg(long, default_value_t = 4)]
        chunk: u32,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// System file: lines `x1' = ...`, `init: a1, ...`, optional `output: i`.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub file: Option<PathBuf>,
    /// a086714, fibonacci or squaring.
    #[arg(long)]
    pub preset: Option<String>,
    /// Initial value for the squaring preset.
    #[arg(long, default_value_t = 2)]
    pub a0: i64,
}

#[derive(Subcommand, Debug)]
pub enum PrsCommand {
    /// Output coordinate modulo m.
    #[command(after_help = "Examples:\n  mcfin prs trace --preset fibonacci --modulus 10 --n-max 20")]
    Trace {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 50)]
        n_max: u64,
    },

    /// Preperiod and period of the state modulo m, re-verified over 3 more periods.
    #[command(after_help = "Examples:\n  mcfin prs cycle --preset fibonacci --modulus 10\n  mcfin prs cycle --preset a086714 --modulus 9")]
    Cycle {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        modulus: u64,
    },
}
