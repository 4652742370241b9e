//! Command implementations behind the `mrlab` binary.
//!
//! Every command writes its report to the supplied writer and returns an
//! [`Outcome`], which maps to the process exit code. Certificates are checked
//! again with an independent library call before they are printed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mrlab_core::constructions::{
    build_bipartite, build_tripartite, is_degenerate_triple, verify_bipartite, verify_tripartite,
    TripartiteViolation,
};
use mrlab_core::hmds::{
    check_family, is_cycle_mds_ell_with, is_mds_ell_with, is_weak_mds_ell, GenericOptions,
};
use mrlab_core::io::{format_grid, parse_grid};
use mrlab_core::linalg::{intersection_dim, DEFAULT_GENERIC_TRIALS};
use mrlab_core::regularity::{
    fast_check_certificate, is_hall_blocker, is_regular_naive, rectangle_bound_holds, ExcessCheck,
};
use mrlab_core::tensor::{
    build_tensor, is_generically_correctable, search_mr_random_with, verify_mr_with, Decoded,
};
use mrlab_core::{
    ErasurePattern, Error, FieldSpec, LinearCode, Matrix, MdsCheck, SetFamily, TensorCode,
    TensorParams,
};

/// Exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The property holds, or the command succeeded.
    Ok = 0,
    /// The property fails; a certificate was printed.
    Negative = 1,
    InputError = 2,
    NotFound = 3,
    /// Known cells of a decode grid extend to no codeword.
    Inconsistent = 4,
}

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Ok
        } else {
            Outcome::Negative
        }
    }
}

/// Failure of a command before it could produce an answer.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    /// A certificate failed its independent re-check. Never expected.
    #[error("internal error: certificate failed re-verification: {0}")]
    Certificate(String),
}

impl CliError {
    pub fn outcome(&self) -> Outcome {
        match self {
            CliError::Core(Error::Inconsistent) => Outcome::Inconsistent,
            CliError::Core(Error::NoConstruction(_)) => Outcome::NotFound,
            _ => Outcome::InputError,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "mrlab", version, about = "Higher-order MDS and MR tensor code tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether an erasure pattern is regular or correctable.
    CheckPattern(CheckPatternArgs),
    /// Check MDS(l) of a code, or maximal recoverability of a tensor code.
    Verify(VerifyArgs),
    /// Fill the "?" cells of a received tensor-code grid.
    Decode(DecodeArgs),
    /// Randomized search for an MR tensor code.
    Search(SearchArgs),
    /// Build one of the explicit vector families in F_{p^2}^3.
    Construct(ConstructArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Enumerate rectangles (regularity).
    Naive,
    /// Max-flow excess compatibility (regularity).
    Flow,
    /// Rank of the parity-check columns of a concrete code.
    Rank,
    /// Rank over random instantiations in a large prime field.
    Generic,
}

#[derive(Debug, Args)]
pub struct CheckPatternArgs {
    /// Pattern file: "m n", then one 1-based "i j" line per erased cell.
    pub pattern: PathBuf,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub a: usize,
    #[arg(long)]
    pub b: usize,
    /// Defaults to flow when a = 1 and generic otherwise.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Row code file, for --method rank.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Column code file, for --method rank.
    #[arg(long)]
    pub col_code: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_GENERIC_TRIALS)]
    pub trials: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// All set families.
    #[default]
    All,
    /// Cycle families only.
    Cycle,
    /// Pairwise disjoint families only.
    Weak,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Code file (the row code when --mr is given).
    pub code: PathBuf,
    #[arg(long, conflicts_with = "mr", required_unless_present = "mr")]
    pub mds_ell: Option<usize>,
    #[arg(long, value_enum, default_value_t = Family::All, requires = "mds_ell")]
    pub family: Family,
    /// Check the tensor product of --col-code and CODE for maximal recoverability.
    #[arg(long, requires = "col_code")]
    pub mr: bool,
    #[arg(long)]
    pub col_code: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_GENERIC_TRIALS)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Grid file: m lines of n entries, "?" marking erasures.
    pub grid: PathBuf,
    /// Row code file.
    #[arg(long)]
    pub code: PathBuf,
    /// Column code file.
    #[arg(long)]
    pub col_code: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub a: usize,
    #[arg(long)]
    pub b: usize,
    /// Field: a prime, a prime square, or a literal such as "p=7;x2=3".
    #[arg(long)]
    pub q: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub max_attempts: usize,
    /// Directory for row.code and col.code.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Bipartite,
    Tripartite,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: Construction,
    #[arg(long)]
    pub p: u64,
    /// Write the matrix here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<Outcome> {
    match &cli.command {
        Command::CheckPattern(args) => cmd_check_pattern(args, out),
        Command::Verify(args) => cmd_verify(args, out),
        Command::Decode(args) => cmd_decode(args, out),
        Command::Search(args) => cmd_search(args, out),
        Command::Construct(args) => cmd_construct(args, out),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_code(path: &Path) -> CliResult<LinearCode> {
    Ok(read(path)?.parse()?)
}

fn read_tensor(col: &Path, row: &Path) -> CliResult<TensorCode> {
    Ok(build_tensor(&read_code(col)?, &read_code(row)?)?)
}

fn certificate(ok: bool, what: impl Into<String>) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Certificate(what.into()))
    }
}

/// Parses `--q`: a prime, the square of a prime, or a field literal.
pub fn parse_field(q: &str) -> CliResult<FieldSpec> {
    let Ok(q_num) = q.trim().parse::<u64>() else {
        return Ok(q.parse()?);
    };
    if mrlab_core::field::is_prime(q_num) {
        return Ok(FieldSpec::prime(q_num)?);
    }
    let root = (q_num as f64).sqrt().round() as u64;
    if let Some(p) = (root.saturating_sub(1)..=root + 1).find(|&p| p * p == q_num) {
        if mrlab_core::field::is_prime(p) {
            return Ok(FieldSpec::quadratic_smallest(p)?);
        }
    }
    Err(CliError::Usage(format!("q={q_num} is neither a prime nor a prime square")))
}

pub fn cmd_check_pattern(args: &CheckPatternArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let e: ErasurePattern = read(&args.pattern)?.parse()?;
    for (flag, given, actual) in [("--m", args.m, e.m()), ("--n", args.n, e.n())] {
        if given.is_some_and(|g| g != actual) {
            return Err(CliError::Usage(format!(
                "{flag}={} does not match the pattern file ({actual})",
                given.unwrap_or_default()
            )));
        }
    }
    let params = TensorParams::new(e.m(), e.n(), args.a, args.b)?;
    let (a, b) = (args.a, args.b);
    let method = args
        .method
        .unwrap_or(if a == 1 { Method::Flow } else { Method::Generic });
    writeln!(out, "pattern {}x{} with {} erasures, a={a} b={b}", e.m(), e.n(), e.len())?;
    match method {
        Method::Naive => match is_regular_naive(&e, a, b)? {
            None => {
                writeln!(out, "regular")?;
                Ok(Outcome::Ok)
            }
            Some(v) => {
                certificate(!rectangle_bound_holds(&e, &v.rows, &v.cols, a, b), "rectangle")?;
                writeln!(out, "not regular")?;
                write!(out, "{v}")?;
                Ok(Outcome::Negative)
            }
        },
        Method::Flow => {
            if a > 1 && b > 1 {
                writeln!(out, "note: flow decides regularity; for a,b > 1 regular patterns need not be correctable")?;
            }
            match fast_check_certificate(&e, a, b)? {
                ExcessCheck::Compatible => {
                    writeln!(out, "regular")?;
                    Ok(Outcome::Ok)
                }
                ExcessCheck::Blocked(h) => {
                    let ok = if h.transposed {
                        is_hall_blocker(&e.transpose(), b, a, &h.columns, &h.rows)
                    } else {
                        is_hall_blocker(&e, a, b, &h.columns, &h.rows)
                    };
                    certificate(ok, "hall blocker")?;
                    writeln!(out, "not regular")?;
                    write!(out, "{h}")?;
                    Ok(Outcome::Negative)
                }
            }
        }
        Method::Rank => {
            let (Some(row), Some(col)) = (&args.code, &args.col_code) else {
                return Err(CliError::Usage("--method rank needs --code and --col-code".into()));
            };
            let code = read_tensor(col, row)?;
            if code.params() != params {
                return Err(CliError::Usage(format!(
                    "codes give {:?}, arguments give {params:?}",
                    code.params()
                )));
            }
            rank_report(&code, &e, out)
        }
        Method::Generic => {
            if a > 1 {
                writeln!(
                    out,
                    "note: no combinatorial criterion is known for a > 1; answer is a randomized rank test (seed {}, {} trials)",
                    args.seed, args.trials
                )?;
            }
            let ok = is_generically_correctable(&e, params, args.trials, args.seed)?;
            if ok {
                writeln!(out, "correctable")?;
            } else {
                writeln!(out, "not correctable")?;
                writeln!(out, "rank deficient in all {} generic instantiations", args.trials.max(1))?;
            }
            Ok(Outcome::from_bool(ok))
        }
    }
}

fn rank_report(code: &TensorCode, e: &ErasurePattern, out: &mut dyn Write) -> CliResult<Outcome> {
    let h_e = code.parity_check().select_columns(&e.flat_indices())?;
    let rank = h_e.rank();
    if rank == e.len() {
        writeln!(out, "correctable")?;
        return Ok(Outcome::Ok);
    }
    let kernel = h_e.kernel();
    let dep = kernel.column(0);
    let applied = h_e.apply(&dep)?;
    certificate(
        dep.iter().any(|x| !x.is_zero()) && applied.iter().all(|x| x.is_zero()),
        "column dependency",
    )?;
    let f = code.field();
    writeln!(out, "not correctable")?;
    writeln!(out, "rank {rank} < {} erasures; dependency among erased cells:", e.len())?;
    for ((i, j), x) in e.cells().into_iter().zip(dep) {
        if !x.is_zero() {
            writeln!(out, "{} {} {}", i + 1, j + 1, f.format_element(x))?;
        }
    }
    Ok(Outcome::Negative)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let opts = GenericOptions {
        trials: args.trials,
        seed: args.seed,
    };
    let code = read_code(&args.code)?;
    if args.mr {
        let col_path = args
            .col_code
            .as_ref()
            .ok_or_else(|| CliError::Usage("--mr needs --col-code".into()))?;
        let tensor = build_tensor(&read_code(col_path)?, &code)?;
        let p = tensor.params();
        writeln!(out, "tensor code m={} n={} a={} b={} over {}", p.m, p.n, p.a, p.b, tensor.field())?;
        return match verify_mr_with(&tensor, &opts)? {
            None => {
                writeln!(out, "maximally recoverable")?;
                Ok(Outcome::Ok)
            }
            Some(e) => {
                let generic = is_generically_correctable(&e, p, opts.trials, opts.seed)?;
                certificate(generic && !tensor.is_correctable(&e)?, "failing pattern")?;
                writeln!(out, "not maximally recoverable; generically correctable pattern it misses:")?;
                write!(out, "{e}")?;
                Ok(Outcome::Negative)
            }
        };
    }
    let ell = args.mds_ell.expect("clap requires --mds-ell without --mr");
    if ell < 2 {
        return Err(CliError::Usage(format!("--mds-ell must be at least 2, got {ell}")));
    }
    let kind = match args.family {
        Family::All => "MDS",
        Family::Cycle => "cycle-MDS",
        Family::Weak => "weak-MDS",
    };
    writeln!(out, "code n={} k={} over {}", code.n(), code.k(), code.field())?;
    let check = match args.family {
        Family::All => is_mds_ell_with(&code, ell, &opts)?,
        Family::Cycle => is_cycle_mds_ell_with(&code, ell, &opts)?,
        Family::Weak => is_weak_mds_ell(&code, ell)?,
    };
    match check {
        MdsCheck::Holds => {
            writeln!(out, "{kind}({ell}) holds")?;
            Ok(Outcome::Ok)
        }
        MdsCheck::Fails(w) => {
            let again = check_family(&code, &w.family, &opts)?;
            certificate(again.as_ref() == Some(&w) || recheck_disjoint(&code, &w.family, w.actual_dim), "witness family")?;
            writeln!(out, "{kind}({ell}) fails")?;
            write!(out, "{w}")?;
            Ok(Outcome::Negative)
        }
    }
}

/// For disjoint families the generic dimension is zero, so a nonzero actual
/// dimension is a complete certificate.
fn recheck_disjoint(code: &LinearCode, family: &SetFamily, actual: usize) -> bool {
    let disjoint = family.total_size() == family.union().len();
    disjoint && actual > 0 && intersection_dim(code.generator(), family).ok() == Some(actual)
}

pub fn cmd_decode(args: &DecodeArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let code = read_tensor(&args.col_code, &args.code)?;
    let f = code.field();
    let grid = parse_grid(f, &read(&args.grid)?)?;
    match code.decode_erasures(&grid)? {
        Decoded::Codeword(rows) => {
            let m = rows.len();
            let n = rows.first().map_or(0, Vec::len);
            let flat: Vec<_> = rows.iter().flatten().copied().collect();
            let filled = Matrix::new(f, m, n, flat)?;
            let agrees = grid
                .iter()
                .flatten()
                .zip(filled.entries())
                .all(|(r, x)| r.is_none_or(|r| r == *x));
            certificate(agrees && code.is_codeword(&filled)?, "decoded grid")?;
            let full: Vec<Vec<_>> = rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect();
            write!(out, "{}", format_grid(f, &full))?;
            Ok(Outcome::Ok)
        }
        Decoded::Uncorrectable => {
            writeln!(out, "uncorrectable pattern")?;
            Ok(Outcome::Negative)
        }
    }
}

pub fn cmd_search(args: &SearchArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let params = TensorParams::new(args.m, args.n, args.a, args.b)?;
    let field = parse_field(&args.q)?;
    let opts = GenericOptions::default();
    let found = search_mr_random_with(params, field, args.max_attempts, args.seed, &opts)?;
    let Some(code) = found.code else {
        writeln!(out, "not found after {} attempts over {field}", found.attempts)?;
        return Ok(Outcome::NotFound);
    };
    certificate(verify_mr_with(&code, &opts)?.is_none(), "search result")?;
    fs::create_dir_all(&args.out_dir)?;
    let row_path = args.out_dir.join("row.code");
    let col_path = args.out_dir.join("col.code");
    fs::write(&row_path, code.row_code().to_string())?;
    fs::write(&col_path, code.col_code().to_string())?;
    writeln!(out, "found MR code over {field} after {} attempts", found.attempts)?;
    writeln!(out, "row code: {}", row_path.display())?;
    writeln!(out, "column code: {}", col_path.display())?;
    Ok(Outcome::Ok)
}

pub fn cmd_construct(args: &ConstructArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let (matrix, report, ok) = match args.kind {
        Construction::Bipartite => {
            let fam = build_bipartite(args.p)?;
            let mut report = vec![format!("bipartite family over {}: {} + {} vectors", fam.field(), fam.u().len(), fam.v().len())];
            let ok = match verify_bipartite(&fam) {
                None => {
                    report.push("every nondegenerate triple of planes meets trivially".into());
                    true
                }
                Some(t) => {
                    certificate(fam.triple_intersects(&t) && !is_degenerate_triple(&t), "triple")?;
                    let pairs: Vec<String> = t.iter().map(|(a, b)| format!("({a},{b})")).collect();
                    report.push(format!("planes {} share a nonzero vector", pairs.join(" ")));
                    false
                }
            };
            (fam.to_matrix(), report, ok)
        }
        Construction::Tripartite => {
            let fam = build_tripartite(args.p)?;
            let mut report = vec![
                format!("tripartite family over {}", fam.field()),
                format!("cube root of unity {}, subgroup {:?}", fam.zeta(), fam.subgroup()),
                format!("|U|={} |V|={} |W|={}", fam.u().len(), fam.v().len(), fam.w().len()),
            ];
            let ok = match verify_tripartite(&fam) {
                None => {
                    report.push("union is MDS; all U/V/W plane triples meet trivially".into());
                    true
                }
                Some(v) => {
                    let m = fam.to_matrix();
                    let recheck = match &v {
                        TripartiteViolation::UnionNotMds => !mrlab_core::codes::is_mds_matrix(&m),
                        TripartiteViolation::Intersecting { u, v: vv, w } => {
                            let (su, sv) = (fam.u().len(), fam.v().len());
                            let family = SetFamily::new(
                                m.cols(),
                                vec![
                                    vec![u.0, u.1],
                                    vec![su + vv.0, su + vv.1],
                                    vec![su + sv + w.0, su + sv + w.1],
                                ],
                            )?;
                            intersection_dim(&m, &family)? > 0
                        }
                    };
                    certificate(recheck, "tripartite violation")?;
                    report.push(v.to_string());
                    false
                }
            };
            (fam.to_matrix(), report, ok)
        }
    };
    let report: String = report.iter().map(|l| format!("# {l}\n")).collect();
    match &args.out {
        Some(path) => {
            fs::write(path, matrix.to_string())?;
            write!(out, "{report}")?;
            writeln!(out, "# matrix written to {}", path.display())?;
        }
        None => write!(out, "{matrix}{report}")?,
    }
    Ok(Outcome::from_bool(ok))
}

/// Caps the global thread pool from `MRLAB_THREADS`, if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("MRLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("MRLAB_THREADS={v:?} is not a number")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}
