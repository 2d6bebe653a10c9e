//! Running one case through the library and through the references.

use std::sync::Arc;

use super::corpus::{AddendMode, Case, Dense, SparseInput};
use super::Family;
use crate::error::Result;
use crate::formats::{
    scaled, transposed, DenseView, Format, IndexBase, Operand, SparseMatrix, SparseOperand,
    SparseView,
};
use crate::oracle::{
    oracle_add, oracle_convert_dense, oracle_frob_norm, oracle_gemm, oracle_hadamard,
    oracle_inf_norm, oracle_pattern, oracle_sddmm, oracle_spmv, oracle_trisolve,
    oracle_trisolve_rows, pattern_of, DenseMirror, PatternKind,
};
use crate::runtime::{
    make_handle, CountingResource, ExecutionPolicy, MatrixHandle, MemoryResource, OperationKind,
    OperationState,
};
use crate::scalar::{Real, Scalar};
use crate::single::{
    matrix_frob_norm, matrix_inf_norm, multiply_add, multiply_inspect, norm_inspect,
    sampled_multiply, sampled_multiply_inspect, scale, scaled_output, triangular_solve,
    triangular_solve_inspect, SparseTarget,
};
use crate::staged::{
    add_compute, add_fill, add_inspect, convert_compute, convert_fill, convert_inspect,
    filter_compute, filter_fill, multiply_elementwise_compute, multiply_elementwise_fill,
    multiply_elementwise_inspect, sparse_multiply_compute, sparse_multiply_fill,
    sparse_multiply_inspect, sparse_multiply_numeric_compute, sparse_multiply_numeric_fill,
    sparse_multiply_symbolic_compute, sparse_multiply_symbolic_fill, transpose_compute,
    transpose_fill, ConvertSource, OutputShell,
};

/// Result of a kernel, normalized for comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum Output<T: Scalar> {
    /// Row-major dense values.
    Dense { rows: usize, cols: usize, data: Vec<T> },
    /// Stored entries in row-major order.
    Sparse {
        nrows: usize,
        ncols: usize,
        triples: Vec<(usize, usize, T)>,
    },
    Norm(T::Real),
}

impl<T: Scalar> Output<T> {
    /// Canonical bytes: extents, indices and the bits of every value.
    pub fn bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let word = |v: usize, out: &mut Vec<u8>| out.extend_from_slice(&(v as u64).to_le_bytes());
        match self {
            Output::Dense { rows, cols, data } => {
                word(*rows, &mut out);
                word(*cols, &mut out);
                for v in data {
                    v.write_bytes(&mut out);
                }
            }
            Output::Sparse { nrows, ncols, triples } => {
                word(*nrows, &mut out);
                word(*ncols, &mut out);
                for &(i, j, v) in triples {
                    word(i, &mut out);
                    word(j, &mut out);
                    v.write_bytes(&mut out);
                }
            }
            Output::Norm(v) => v.write_bytes(&mut out),
        }
        out
    }

    /// Row-major stored pattern of a sparse output.
    pub fn pattern(&self) -> Option<Vec<bool>> {
        match self {
            Output::Sparse { nrows, ncols, triples } => {
                let mut p = vec![false; nrows * ncols];
                for &(i, j, _) in triples {
                    p[i * ncols + j] = true;
                }
                Some(p)
            }
            _ => None,
        }
    }
}

/// A kernel run plus its bookkeeping checks.
#[derive(Debug, Clone)]
pub struct Execution<T: Scalar> {
    pub output: Output<T>,
    /// Staged families: whether every array slot past the result length kept
    /// its sentinel.
    pub canary_intact: Option<bool>,
    /// Buffers still held by the case's memory resource after everything
    /// created for the case was dropped.
    pub outstanding: usize,
    pub allocations: usize,
}

/// A sparse input as a plain view or a matrix handle.
enum Prepared<'m, T: Scalar> {
    View(SparseView<'m, T>),
    Handle(MatrixHandle<'m, T>),
}

impl<'m, T: Scalar> Prepared<'m, T> {
    fn new(input: &'m SparseInput<T>, res: &Arc<dyn MemoryResource>) -> Result<Self> {
        Ok(if input.handle {
            Prepared::Handle(make_handle(input.matrix.view(), Some(res.clone()))?)
        } else {
            Prepared::View(input.matrix.view())
        })
    }

    fn op(&self, input: &SparseInput<T>) -> Operand<'_, T, usize, usize> {
        let op = match self {
            Prepared::View(v) => v.operand(),
            Prepared::Handle(h) => h.operand(),
        };
        input.apply(op)
    }
}

const CANARY: usize = 8;
const SENTINEL_INDEX: usize = usize::MAX - 3;

fn sentinel<T: Scalar>() -> T {
    T::from_parts(-7.25e3, 1.5)
}

fn same_bits<T: Scalar>(a: T, b: T) -> bool {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.write_bytes(&mut x);
    b.write_bytes(&mut y);
    x == y
}

fn sorted_triples<T: Scalar>(view: &SparseView<'_, T>) -> Vec<(usize, usize, T)> {
    let mut t: Vec<_> = view.as_ref().triples().collect();
    t.sort_by_key(|e| (e.0, e.1));
    t
}

/// Compute, allocate exactly `result_nnz` entries (plus guarded slack),
/// fill, read back.
fn staged<T: Scalar>(
    state: &mut OperationState<T>,
    shape: (usize, usize),
    format: Format,
    base: IndexBase,
    compute: impl FnOnce(&mut OperationState<T>, &OutputShell<'_, T>) -> Result<()>,
    fill: impl FnOnce(&mut OperationState<T>, &mut OutputShell<'_, T>) -> Result<()>,
) -> Result<(Output<T>, bool)> {
    let probe = OutputShell::<T>::new(format, shape.0, shape.1).with_base(base);
    compute(state, &probe)?;
    let nnz = state.result_nnz()?;
    let major_len = if format == Format::Coo { nnz } else { probe.offsets_len() };
    let mut major = vec![SENTINEL_INDEX; major_len + CANARY];
    let mut minor = vec![SENTINEL_INDEX; nnz + CANARY];
    let mut values = vec![sentinel::<T>(); nnz + CANARY];
    let triples = {
        let mut shell = OutputShell::new(format, shape.0, shape.1).with_base(base);
        if format == Format::Coo {
            shell.bind_row_indices(&mut major[..major_len]);
        } else {
            shell.bind_offsets(&mut major[..major_len]);
        }
        shell
            .bind_indices(&mut minor[..nnz])
            .bind_values(&mut values[..nnz]);
        fill(state, &mut shell)?;
        let view = shell.view()?;
        sorted_triples(&view)
    };
    let intact = major[major_len..].iter().all(|&v| v == SENTINEL_INDEX)
        && minor[nnz..].iter().all(|&v| v == SENTINEL_INDEX)
        && values[nnz..].iter().all(|&v| same_bits(v, sentinel()));
    let output = Output::Sparse {
        nrows: shape.0,
        ncols: shape.1,
        triples,
    };
    Ok((output, intact))
}

fn dense_output<T: Scalar>(d: &Dense<T>) -> Output<T> {
    let mut data = Vec::with_capacity(d.rows * d.cols);
    for i in 0..d.rows {
        for j in 0..d.cols {
            data.push(d.get(i, j));
        }
    }
    Output::Dense {
        rows: d.rows,
        cols: d.cols,
        data,
    }
}

fn kind_of(family: Family) -> OperationKind {
    match family {
        Family::Scale => OperationKind::Scale,
        Family::InfNorm => OperationKind::InfNorm,
        Family::FrobNorm => OperationKind::FrobNorm,
        Family::Spmv => OperationKind::Multiply,
        Family::Trisolve => OperationKind::TriangularSolve,
        Family::Sddmm => OperationKind::SampledMultiply,
        Family::Spgemm => OperationKind::SparseMultiply,
        Family::Add => OperationKind::Add,
        Family::Hadamard => OperationKind::MultiplyElementwise,
        Family::Convert => OperationKind::Convert,
        Family::Filter => OperationKind::Filter,
        Family::Transpose => OperationKind::Transpose,
    }
}

fn flipped<'a, T: Scalar>(mut op: Operand<'a, T, usize, usize>, conjugate: bool) -> Operand<'a, T, usize, usize> {
    op.transpose = !op.transpose;
    if conjugate {
        op.conjugate = !op.conjugate;
        op.alpha = op.alpha.conj();
    }
    op
}

fn filter_pred<T: Scalar>(threshold: f64) -> impl Fn(usize, usize, T) -> bool + Sync + Copy {
    move |_, _, v: T| v.modulus().to_f64() >= threshold
}

fn run_convert<T: Scalar>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    case: &Case<T>,
    src: impl ConvertSource<T>,
) -> Result<(Output<T>, bool)> {
    let shape = case.out_shape();
    staged(
        state,
        shape,
        case.out_format,
        case.out_base,
        |st, c| {
            if case.inspect {
                convert_inspect(policy, st, &src, c)?;
            }
            convert_compute(policy, st, &src, c)
        },
        |st, c| convert_fill(policy, st, &src, c),
    )
}

/// Runs `case` under `policy` with a fresh counting resource.
pub fn execute<T: Scalar>(case: &Case<T>, policy: &ExecutionPolicy) -> Result<Execution<T>> {
    let counting = CountingResource::new();
    let res: Arc<dyn MemoryResource> = counting.clone();
    let (output, canary_intact) = run(case, policy, &res)?;
    Ok(Execution {
        output,
        canary_intact,
        outstanding: counting.outstanding(),
        allocations: counting.allocations(),
    })
}

fn run<T: Scalar>(
    case: &Case<T>,
    policy: &ExecutionPolicy,
    res: &Arc<dyn MemoryResource>,
) -> Result<(Output<T>, Option<bool>)> {
    let p = policy;
    let mut st = OperationState::<T>::with_resource(kind_of(case.family), res.clone());
    let pa = Prepared::new(&case.a, res)?;
    let a = pa.op(&case.a);
    let pb = case.b.as_ref().map(|b| Prepared::new(b, res)).transpose()?;
    let b = pb.as_ref().zip(case.b.as_ref()).map(|(p, i)| p.op(i));
    let pd = case.d.as_ref().map(|d| Prepared::new(d, res)).transpose()?;
    let d = pd.as_ref().zip(case.d.as_ref()).map(|(p, i)| p.op(i));
    let single = |o: Output<T>| Ok((o, None));
    let staged_out = |r: (Output<T>, bool)| Ok((r.0, Some(r.1)));

    match case.family {
        Family::Scale => {
            let mut m = case.a.matrix.clone();
            write_target(&mut m, case.a.handle, res, |t| scale(p, &mut st, case.a.alpha, &mut &mut *t))?;
            single(Output::Sparse {
                nrows: m.nrows(),
                ncols: m.ncols(),
                triples: sorted_triples(&m.view()),
            })
        }
        Family::InfNorm | Family::FrobNorm => {
            if case.inspect {
                norm_inspect(p, &mut st, a)?;
            }
            let v = if case.family == Family::InfNorm {
                matrix_inf_norm(p, &mut st, a)?
            } else {
                matrix_frob_norm(p, &mut st, a)?
            };
            single(Output::Norm(v))
        }
        Family::Spmv => {
            let x = case.x.as_ref().expect("spmv x");
            let mut y = case.y.clone().expect("spmv y");
            let xv = x.view();
            if case.inspect {
                multiply_inspect(p, &mut st, a, &xv, &y.view())?;
            }
            {
                let mut yv = y.view_mut();
                match case.addend {
                    AddendMode::None => multiply_add(p, &mut st, a, &xv, (), &mut yv)?,
                    AddendMode::Output => multiply_add(p, &mut st, a, &xv, scaled_output(case.beta), &mut yv)?,
                    AddendMode::Other => {
                        let z = case.z.as_ref().expect("spmv z").view();
                        multiply_add(p, &mut st, a, &xv, scaled(case.beta, &z), &mut yv)?
                    }
                }
            }
            single(dense_output(&y))
        }
        Family::Trisolve => {
            let rhs = case.x.as_ref().expect("rhs");
            let bv = DenseView::vector(&rhs.data);
            let mut x = vec![T::from_f64(f64::NAN); rhs.data.len()];
            if case.inspect {
                triangular_solve_inspect(p, &mut st, a, &bv, &DenseView::vector(&x))?;
            }
            triangular_solve(p, &mut st, a, &bv, &mut DenseView::vector_mut(&mut x))?;
            single(Output::Dense {
                rows: x.len(),
                cols: 1,
                data: x,
            })
        }
        Family::Sddmm => {
            let (x, y) = (case.x.as_ref().expect("x"), case.y.as_ref().expect("y"));
            let (xv, yv) = (x.view(), y.view());
            let mut m = case.a.matrix.clone();
            let inspect = case.inspect;
            write_target(&mut m, case.a.handle, res, |t| {
                if inspect {
                    let (structure, _, _) = t.target();
                    sampled_multiply_inspect(p, &mut st, &xv, &yv, &structure)?;
                }
                sampled_multiply(p, &mut st, &xv, &yv, &mut &mut *t)
            })?;
            single(Output::Sparse {
                nrows: m.nrows(),
                ncols: m.ncols(),
                triples: sorted_triples(&m.view()),
            })
        }
        Family::Spgemm => {
            let b = b.expect("spgemm b");
            let split = case.split;
            let r = staged(
                &mut st,
                case.out_shape(),
                case.out_format,
                case.out_base,
                |st, c| {
                    if case.inspect {
                        sparse_multiply_inspect(p, st, a, b, c, d)?;
                    }
                    if split {
                        sparse_multiply_symbolic_compute(p, st, a, b, c, d)
                    } else {
                        sparse_multiply_compute(p, st, a, b, c, d)
                    }
                },
                |st, c| {
                    if split {
                        sparse_multiply_symbolic_fill(p, st, a, b, &mut *c, d)?;
                        sparse_multiply_numeric_compute(p, st, a, b, &*c, d)?;
                        sparse_multiply_numeric_fill(p, st, a, b, c, d)
                    } else {
                        sparse_multiply_fill(p, st, a, b, c, d)
                    }
                },
            )?;
            staged_out(r)
        }
        Family::Add | Family::Hadamard => {
            let b = b.expect("second operand");
            let add = case.family == Family::Add;
            let r = staged(
                &mut st,
                case.out_shape(),
                case.out_format,
                case.out_base,
                |st, c| match (add, case.inspect) {
                    (true, i) => {
                        if i {
                            add_inspect(p, st, a, b, c)?;
                        }
                        add_compute(p, st, a, b, c)
                    }
                    (false, i) => {
                        if i {
                            multiply_elementwise_inspect(p, st, a, b, c)?;
                        }
                        multiply_elementwise_compute(p, st, a, b, c)
                    }
                },
                |st, c| {
                    if add {
                        add_fill(p, st, a, b, c)
                    } else {
                        multiply_elementwise_fill(p, st, a, b, c)
                    }
                },
            )?;
            staged_out(r)
        }
        Family::Convert => {
            let r = if case.dense_source {
                let x = case.x.as_ref().expect("dense source").view();
                if case.a.transpose {
                    run_convert(p, &mut st, case, scaled(case.a.alpha, transposed(&x, case.a.conjugate)))?
                } else if case.a.conjugate {
                    // conjugation without transposition: transpose twice
                    let src = transposed(transposed(&x, true), false);
                    run_convert(p, &mut st, case, scaled(case.a.alpha, src))?
                } else {
                    run_convert(p, &mut st, case, scaled(case.a.alpha, &x))?
                }
            } else {
                run_convert(p, &mut st, case, a)?
            };
            staged_out(r)
        }
        Family::Filter => {
            let pred = filter_pred::<T>(case.threshold);
            let r = staged(
                &mut st,
                case.out_shape(),
                case.out_format,
                case.out_base,
                |st, c| filter_compute(p, st, a, c, pred),
                |st, c| filter_fill(p, st, a, c, pred),
            )?;
            staged_out(r)
        }
        Family::Transpose => {
            let conj = T::IS_COMPLEX;
            let r = staged(
                &mut st,
                case.out_shape(),
                case.out_format,
                case.out_base,
                |st, c| transpose_compute(p, st, a, c, conj),
                |st, c| transpose_fill(p, st, a, c, conj),
            )?;
            staged_out(r)
        }
    }
}

/// Calls `f` with a writable target over `m`: a view, or a handle drawing
/// from `res`.
fn write_target<T: Scalar>(
    m: &mut SparseMatrix<T>,
    handle: bool,
    res: &Arc<dyn MemoryResource>,
    f: impl FnOnce(&mut dyn SparseTarget<T>) -> Result<()>,
) -> Result<()> {
    if handle {
        let mut h = make_handle(m.view_mut(), Some(res.clone()))?;
        f(&mut h)
    } else {
        let mut v = m.view_mut();
        f(&mut v)
    }
}

/// Reference result for `case`. For triangular solves with `exact` unset,
/// the reference is row-wise around the computed solution in `output`.
pub fn expected<T: Scalar>(case: &Case<T>, output: &Output<T>, exact: bool) -> DenseMirror {
    let av = case.a.matrix.view();
    let a = case.a.operand(&av);
    let bv = case.b.as_ref().map(|b| b.matrix.view());
    let b = bv.as_ref().zip(case.b.as_ref()).map(|(v, i)| i.operand(v));
    let dv = case.d.as_ref().map(|d| d.matrix.view());
    let d = dv.as_ref().zip(case.d.as_ref()).map(|(v, i)| i.operand(v));
    match case.family {
        Family::Scale => DenseMirror::from_sparse(a),
        Family::InfNorm => oracle_inf_norm(a),
        Family::FrobNorm => oracle_frob_norm(a),
        Family::Spmv => {
            let x = case.x.as_ref().expect("x").view();
            let addend = match case.addend {
                AddendMode::Other => case.z.as_ref(),
                _ => case.y.as_ref(),
            }
            .expect("addend")
            .view();
            oracle_spmv(a, &x, case.beta, &addend)
        }
        Family::Trisolve => {
            let rhs = case.x.as_ref().expect("rhs");
            let bv = DenseView::vector(&rhs.data);
            match (exact, output) {
                (false, Output::Dense { data, .. }) => oracle_trisolve_rows(a, &bv, data),
                _ => oracle_trisolve(a, &bv),
            }
        }
        Family::Sddmm => {
            let (x, y) = (case.x.as_ref().expect("x").view(), case.y.as_ref().expect("y").view());
            oracle_sddmm(&x, &y, &av)
        }
        Family::Spgemm => oracle_gemm(a, b.expect("b"), d),
        Family::Add => oracle_add(a, b.expect("b")),
        Family::Hadamard => oracle_hadamard(a, b.expect("b")),
        Family::Convert => {
            if case.dense_source {
                let x = case.x.as_ref().expect("dense source").view();
                oracle_convert_dense(&x, case.a.alpha, case.a.transpose, case.a.conjugate)
            } else {
                DenseMirror::from_sparse(a)
            }
        }
        Family::Filter => {
            let pred = filter_pred::<T>(case.threshold);
            let keep = oracle_pattern(PatternKind::Filter(&pred), a, None);
            let mut m = DenseMirror::from_sparse(a);
            for (k, keep) in keep.into_iter().enumerate() {
                if !keep {
                    m.pattern[k] = false;
                    m.data[k] = crate::oracle::CExt::ZERO;
                }
            }
            m
        }
        Family::Transpose => DenseMirror::from_sparse(flipped(a, T::IS_COMPLEX)),
    }
}

/// Boolean reference pattern for structural families.
pub fn expected_pattern<T: Scalar>(case: &Case<T>) -> Option<Vec<bool>> {
    let av = case.a.matrix.view();
    let a = case.a.operand(&av);
    let bv = case.b.as_ref().map(|b| b.matrix.view());
    let b = bv.as_ref().zip(case.b.as_ref()).map(|(v, i)| i.operand(v));
    let b_dyn = b.as_ref().map(|b| b as &dyn SparseOperand<T>);
    Some(match case.family {
        Family::Spgemm => {
            let mut p = oracle_pattern(PatternKind::Product, a, b_dyn);
            if let Some(d) = &case.d {
                let dv = d.matrix.view();
                for (k, s) in pattern_of(d.operand(&dv)).into_iter().enumerate() {
                    p[k] |= s;
                }
            }
            p
        }
        Family::Add => oracle_pattern(PatternKind::Sum, a, b_dyn),
        Family::Hadamard => oracle_pattern(PatternKind::ElementwiseProduct, a, b_dyn),
        Family::Transpose => oracle_pattern(PatternKind::Transpose, a, None),
        Family::Filter => {
            let pred = filter_pred::<T>(case.threshold);
            oracle_pattern(PatternKind::Filter(&pred), a, None)
        }
        Family::Convert if case.dense_source => {
            let x = case.x.as_ref().expect("dense source").view();
            let m = oracle_convert_dense(&x, T::one(), case.a.transpose, false);
            m.pattern
        }
        Family::Convert => oracle_pattern(PatternKind::Convert, a, None),
        _ => return None,
    })
}
