use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spblas::conformance::{run_conformance, ConformanceConfig, Family};
use spblas::formats::{scaled, transposed, validate, DenseView, Format, IndexBase, SparseMatrix};
use spblas::io::{mm_read, mm_write, mm_write_to, read_vector, write_vector_to, IoError, MmHeader};
use spblas::runtime::{default_thread_count, OperationKind, OperationState};
use spblas::single::{matrix_frob_norm, matrix_inf_norm, multiply_add, scaled_output, triangular_solve};
use spblas::staged::{
    convert_compute, convert_fill, filter_compute, filter_fill, no_addend, sparse_multiply_compute,
    sparse_multiply_fill, sparse_multiply_numeric_compute, sparse_multiply_numeric_fill,
    sparse_multiply_symbolic_compute, sparse_multiply_symbolic_fill, transpose_compute, transpose_fill,
};
use spblas::{set_cnr_property, CnrProperty, ExecutionPolicy, Real, Scalar};

#[derive(Parser)]
#[command(name = "spblas", version, about = "Sparse BLAS kernels on Matrix Market files")]
struct Cli {
    /// Execution policy.
    #[arg(long, value_enum, global = true, default_value = "seq")]
    policy: PolicyArg,
    /// Worker threads for parallel policies [default: SPBLAS_NUM_THREADS or all cores].
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reproducibility property.
    #[arg(long, value_enum, global = true, default_value = "default")]
    cnr: CnrArg,
    /// Seed for generated data (bench vectors, conformance corpus).
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Arithmetic precision.
    #[arg(long, value_enum, global = true, default_value = "f64")]
    precision: Precision,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Seq,
    Detpar,
    Par,
}

#[derive(Clone, Copy, ValueEnum)]
enum CnrArg {
    Default,
    Cnr,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csr,
    Csc,
    Coo,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Inf,
    Frob,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchOp {
    Spmv,
    Spgemm,
    Transpose,
    Convert,
    InfNorm,
    FrobNorm,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions, entry count and header of a matrix file.
    Info { file: PathBuf },
    /// Parses a matrix file and checks the resulting structure.
    Validate { file: PathBuf },
    /// Rewrites a matrix in the storage order of another format.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
    },
    /// y = alpha * op(A) * x + beta * y, printed as a vector.
    Spmv {
        a: PathBuf,
        x: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta: f64,
        /// Initial y (zeros when absent).
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        transpose: bool,
    },
    /// C = A * B, printed as a Matrix Market file.
    Spgemm {
        a: PathBuf,
        b: PathBuf,
        /// Use the symbolic/numeric split instead of the fused path.
        #[arg(long)]
        symbolic_numeric: bool,
    },
    /// Solves T x = b for triangular T.
    Trisolve { t: PathBuf, b: PathBuf },
    /// Matrix norm.
    Norm {
        a: PathBuf,
        #[arg(long, value_enum)]
        kind: NormKind,
    },
    /// Keeps the entries with |v| >= min-abs.
    Filter {
        a: PathBuf,
        #[arg(long)]
        min_abs: f64,
    },
    /// Times a kernel over repeated runs.
    Bench {
        #[arg(value_enum)]
        op: BenchOp,
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        repeat: usize,
    },
    /// Runs the conformance harness; fails when any check fails.
    Conformance {
        /// Families to run (default: all).
        #[arg(long, value_delimiter = ',')]
        families: Vec<Family>,
        /// Cases per family and precision.
        #[arg(long, default_value_t = 200)]
        cases: usize,
        /// Skip the complex value suites.
        #[arg(long)]
        real_only: bool,
        /// Writes every record as JSON lines.
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
}

enum CliError {
    Lib(spblas::Error),
    Io(IoError),
    Other(&'static str, String),
}

impl From<spblas::Error> for CliError {
    fn from(e: spblas::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.into())
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    set_cnr_property(match cli.cnr {
        CnrArg::Default => CnrProperty::Default,
        CnrArg::Cnr => CnrProperty::Cnr,
        CnrArg::Strict => CnrProperty::StrictCnr,
    });
    let result = match cli.precision {
        Precision::F32 => run::<f32>(&cli),
        Precision::F64 => run::<f64>(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (category, msg) = match e {
                CliError::Lib(e) => (e.category(), e.to_string()),
                CliError::Io(e) => (e.category(), e.to_string()),
                CliError::Other(c, m) => (c, m),
            };
            eprintln!("error: {category}: {}", msg.replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn policy(cli: &Cli) -> ExecutionPolicy {
    let threads = cli.threads.unwrap_or_else(default_thread_count);
    match cli.policy {
        PolicyArg::Seq => ExecutionPolicy::sequential(),
        PolicyArg::Detpar => ExecutionPolicy::deterministic_parallel(threads),
        PolicyArg::Par => ExecutionPolicy::parallel(threads),
    }
}

fn load<T: Scalar>(path: &PathBuf) -> Result<(SparseMatrix<T>, MmHeader), IoError> {
    mm_read(path, IndexBase::Zero)
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csr => Format::Csr,
        FormatArg::Csc => Format::Csc,
        FormatArg::Coo => Format::Coo,
    }
}

fn convert_to<T: Scalar>(p: &ExecutionPolicy, a: &SparseMatrix<T>, format: Format) -> spblas::Result<SparseMatrix<T>> {
    let v = a.view();
    let mut st = OperationState::new(OperationKind::Convert);
    SparseMatrix::staged(
        &mut st,
        format,
        a.nrows(),
        a.ncols(),
        IndexBase::Zero,
        |st, c| convert_compute(p, st, &v, c),
        |st, c| convert_fill(p, st, &v, c),
    )
}

fn spgemm<T: Scalar>(
    p: &ExecutionPolicy,
    a: &SparseMatrix<T>,
    b: &SparseMatrix<T>,
    split: bool,
) -> spblas::Result<SparseMatrix<T>> {
    let (av, bv) = (a.view(), b.view());
    let d = no_addend();
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    SparseMatrix::staged(
        &mut st,
        Format::Csr,
        a.nrows(),
        b.ncols(),
        IndexBase::Zero,
        |st, c| {
            if split {
                sparse_multiply_symbolic_compute(p, st, &av, &bv, c, d)
            } else {
                sparse_multiply_compute(p, st, &av, &bv, c, d)
            }
        },
        |st, c| {
            if split {
                sparse_multiply_symbolic_fill(p, st, &av, &bv, &mut *c, d)?;
                sparse_multiply_numeric_compute(p, st, &av, &bv, &*c, d)?;
                sparse_multiply_numeric_fill(p, st, &av, &bv, c, d)
            } else {
                sparse_multiply_fill(p, st, &av, &bv, c, d)
            }
        },
    )
}

fn run<T: Scalar>(cli: &Cli) -> CliResult {
    let p = policy(cli);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Info { file } => {
            let (a, h) = load::<T>(file)?;
            writeln!(out, "rows {}", a.nrows())?;
            writeln!(out, "cols {}", a.ncols())?;
            writeln!(out, "nnz {}", a.nnz())?;
            writeln!(out, "layout {:?}", h.layout)?;
            writeln!(out, "field {:?}", h.field)?;
            writeln!(out, "symmetry {:?}", h.symmetry)?;
            writeln!(out, "file_entries {}", h.entries)?;
        }
        Command::Validate { file } => {
            let (a, _) = load::<T>(file)?;
            validate(a.view().as_ref()).into_result()?;
            let csr = convert_to(&p, &a, Format::Csr)?;
            validate(csr.view().as_ref()).into_result()?;
            writeln!(out, "valid {}x{} nnz {}", a.nrows(), a.ncols(), a.nnz())?;
        }
        Command::Convert { input, output, format } => {
            let (a, _) = load::<T>(input)?;
            let b = convert_to(&p, &a, format_of(*format))?;
            mm_write(output, &b.view())?;
        }
        Command::Spmv { a, x, alpha, beta, y, transpose } => {
            let (a, _) = load::<T>(a)?;
            let x: Vec<T> = read_vector(x)?;
            let m = if *transpose { a.ncols() } else { a.nrows() };
            let mut y: Vec<T> = match y {
                Some(path) => read_vector(path)?,
                None => vec![T::zero(); m],
            };
            let av = a.view();
            let alpha = T::from_f64(*alpha);
            let beta = scaled_output(T::from_f64(*beta));
            let mut st = OperationState::new(OperationKind::Multiply);
            let xv = DenseView::vector(&x);
            let mut yv = DenseView::vector_mut(&mut y);
            if *transpose {
                multiply_add(&p, &mut st, scaled(alpha, transposed(&av, false)), &xv, beta, &mut yv)?;
            } else {
                multiply_add(&p, &mut st, scaled(alpha, &av), &xv, beta, &mut yv)?;
            }
            write_vector_to(&mut out, &y)?;
        }
        Command::Spgemm { a, b, symbolic_numeric } => {
            let (a, _) = load::<T>(a)?;
            let (b, _) = load::<T>(b)?;
            let c = spgemm(&p, &a, &b, *symbolic_numeric)?;
            mm_write_to(&mut out, &c.view())?;
        }
        Command::Trisolve { t, b } => {
            let (t, _) = load::<T>(t)?;
            let b: Vec<T> = read_vector(b)?;
            let mut x = vec![T::zero(); b.len()];
            let mut st = OperationState::new(OperationKind::TriangularSolve);
            triangular_solve(&p, &mut st, t.view(), &DenseView::vector(&b), &mut DenseView::vector_mut(&mut x))?;
            write_vector_to(&mut out, &x)?;
        }
        Command::Norm { a, kind } => {
            let (a, _) = load::<T>(a)?;
            let v = match kind {
                NormKind::Inf => matrix_inf_norm(&p, &mut OperationState::new(OperationKind::InfNorm), a.view())?,
                NormKind::Frob => matrix_frob_norm(&p, &mut OperationState::new(OperationKind::FrobNorm), a.view())?,
            };
            write_vector_to(&mut out, &[v])?;
        }
        Command::Filter { a, min_abs } => {
            let (a, _) = load::<T>(a)?;
            let av = a.view();
            let t = *min_abs;
            let keep = move |_: usize, _: usize, v: T| v.modulus().to_f64() >= t;
            let mut st = OperationState::new(OperationKind::Filter);
            let c = SparseMatrix::staged(
                &mut st,
                Format::Csr,
                a.nrows(),
                a.ncols(),
                IndexBase::Zero,
                |st, c| filter_compute(&p, st, &av, c, keep),
                |st, c| filter_fill(&p, st, &av, c, keep),
            )?;
            mm_write_to(&mut out, &c.view())?;
        }
        Command::Bench { op, file, repeat } => {
            let (a, _) = load::<T>(file)?;
            bench(&mut out, &p, *op, &a, (*repeat).max(1), cli.seed)?;
        }
        Command::Conformance { families, cases, real_only, jsonl } => {
            let config = ConformanceConfig {
                seed: cli.seed,
                families: if families.is_empty() { Family::ALL.to_vec() } else { families.clone() },
                cases: *cases,
                complex: !real_only,
                ..ConformanceConfig::default()
            };
            let report = run_conformance(&config);
            write!(out, "{}", report.summary())?;
            if let Some(path) = jsonl {
                report.write_jsonl(io::BufWriter::new(std::fs::File::create(path)?))?;
            }
            let failed = report.failure_count();
            writeln!(out, "records {} failures {failed}", report.records.len())?;
            if failed > 0 {
                return Err(CliError::Other("conformance_failed", format!("{failed} failing records")));
            }
        }
    }
    Ok(())
}

fn bench<T: Scalar>(
    out: &mut impl Write,
    p: &ExecutionPolicy,
    op: BenchOp,
    a: &SparseMatrix<T>,
    repeat: usize,
    seed: u64,
) -> CliResult {
    let a = convert_to(p, a, Format::Csr)?;
    let av = a.view();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<T> = (0..a.ncols()).map(|_| T::from_f64(rng.gen_range(-1.0..1.0))).collect();
    let mut y = vec![T::zero(); a.nrows()];
    // A * A when square, A * A^T otherwise.
    let square = a.nrows() == a.ncols();
    let at = convert_to(p, &a, Format::Csc)?;
    let mut times = Vec::with_capacity(repeat);
    for _ in 0..repeat {
        let start = Instant::now();
        match op {
            BenchOp::Spmv => {
                let mut st = OperationState::new(OperationKind::Multiply);
                multiply_add(p, &mut st, &av, &DenseView::vector(&x), (), &mut DenseView::vector_mut(&mut y))?;
            }
            BenchOp::Spgemm => {
                let b = if square { &a } else { &at };
                let b = if square {
                    spgemm(p, &a, b, false)?
                } else {
                    let bt = b.view();
                    let mut st = OperationState::new(OperationKind::SparseMultiply);
                    let d = no_addend();
                    SparseMatrix::staged(
                        &mut st,
                        Format::Csr,
                        a.nrows(),
                        a.nrows(),
                        IndexBase::Zero,
                        |st, c| sparse_multiply_compute(p, st, &av, transposed(&bt, false), c, d),
                        |st, c| sparse_multiply_fill(p, st, &av, transposed(&bt, false), c, d),
                    )?
                };
                std::hint::black_box(b.nnz());
            }
            BenchOp::Transpose => {
                let mut st = OperationState::new(OperationKind::Transpose);
                let t = SparseMatrix::staged(
                    &mut st,
                    Format::Csr,
                    a.ncols(),
                    a.nrows(),
                    IndexBase::Zero,
                    |st, c| transpose_compute(p, st, &av, c, false),
                    |st, c| transpose_fill(p, st, &av, c, false),
                )?;
                std::hint::black_box(t.nnz());
            }
            BenchOp::Convert => {
                std::hint::black_box(convert_to(p, &a, Format::Csc)?.nnz());
            }
            BenchOp::InfNorm => {
                std::hint::black_box(matrix_inf_norm(p, &mut OperationState::new(OperationKind::InfNorm), &av)?);
            }
            BenchOp::FrobNorm => {
                std::hint::black_box(matrix_frob_norm(p, &mut OperationState::new(OperationKind::FrobNorm), &av)?);
            }
        }
        times.push(start.elapsed());
    }
    let total: Duration = times.iter().sum();
    times.sort();
    let min = times[0];
    let median = times[times.len() / 2];
    let rate = a.nnz() as f64 / min.as_secs_f64().max(1e-12);
    writeln!(out, "op {}", op.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default())?;
    writeln!(out, "rows {} cols {} nnz {}", a.nrows(), a.ncols(), a.nnz())?;
    writeln!(out, "policy {:?} threads {}", p.mode(), p.threads())?;
    writeln!(out, "repeats {repeat}")?;
    writeln!(out, "wall_s {:.6}", total.as_secs_f64())?;
    writeln!(out, "min_s {:.6}", min.as_secs_f64())?;
    writeln!(out, "median_s {:.6}", median.as_secs_f64())?;
    writeln!(out, "nnz_per_s {rate:.3e}")?;
    Ok(())
}
