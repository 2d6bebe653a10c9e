use super::engine::{self, fingerprint_of, Family};
use super::OutputShell;
use crate::access::{ensure_valid, rows_of, Compressed};
use crate::error::{Error, Result};
use crate::formats::{CsrView, Operand, SparseOperand};
use crate::runtime::{ExecutionPolicy, Fingerprint, OperationKind, OperationState};
use crate::scalar::{Scalar, SpIndex};

const KIND: OperationKind = OperationKind::SparseMultiply;

/// Gustavson row-wise product `alpha * op(A) * op(B) + beta * D`.
///
/// Row `i` of the product sums `A(i, k) * B(k, j)` over the stored `k` of
/// row `i` of `op(A)` in ascending order, then applies `alpha`; the `D`
/// term is added last. The pattern is the structural union of the product
/// and `D`, so cancellations stay stored.
struct Spgemm<'a, T, I, O> {
    a: Compressed<'a, T, I, O>,
    b: Compressed<'a, T, I, O>,
    d: Option<Compressed<'a, T, I, O>>,
    alpha: T,
    beta: T,
    shape: (usize, usize),
    fp: Fingerprint,
}

struct Accumulator<T> {
    seen: Vec<usize>,
    in_d: Vec<usize>,
    acc: Vec<T>,
    dval: Vec<T>,
    list: Vec<usize>,
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> Spgemm<'a, T, I, O> {
    fn new(
        a: &Operand<'a, T, I, O>,
        b: &Operand<'a, T, I, O>,
        d: Option<&Operand<'a, T, I, O>>,
    ) -> Result<Self> {
        ensure_valid(a)?;
        ensure_valid(b)?;
        if a.ncols() != b.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "op(A) is {}x{}, op(B) is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        let shape = (a.nrows(), b.ncols());
        if let Some(d) = d {
            ensure_valid(d)?;
            if (d.nrows(), d.ncols()) != shape {
                return Err(Error::ShapeMismatch(format!(
                    "D is {}x{}, product is {}x{}",
                    d.nrows(),
                    d.ncols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        let mut ops = vec![a, b];
        ops.extend(d);
        Ok(Spgemm {
            a: rows_of(a),
            b: rows_of(b),
            d: d.map(rows_of),
            alpha: a.alpha * b.alpha,
            beta: d.map_or(T::zero(), |d| d.alpha),
            shape,
            fp: fingerprint_of(KIND, shape, &ops, d.is_some() as u64),
        })
    }

    /// Marks the columns of row `i` and lists them once each.
    fn gather(&self, i: usize, s: &mut Accumulator<T>, values: bool) {
        s.list.clear();
        let use_a = values && !self.alpha.is_zero();
        for k in self.a.range(i) {
            let av = if use_a { self.a.value(k) } else { T::zero() };
            for q in self.b.range(self.a.minor(k)) {
                let j = self.b.minor(q);
                let term = if use_a { av * self.b.value(q) } else { T::zero() };
                if s.seen[j] != i {
                    s.seen[j] = i;
                    s.list.push(j);
                    s.acc[j] = term;
                } else {
                    s.acc[j] = s.acc[j] + term;
                }
            }
        }
        if let Some(d) = &self.d {
            let use_d = values && !self.beta.is_zero();
            for q in d.range(i) {
                let j = d.minor(q);
                s.in_d[j] = i;
                if use_d {
                    s.dval[j] = d.value(q);
                }
                if s.seen[j] != i {
                    s.list.push(j);
                }
            }
        }
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> Family<T> for Spgemm<'a, T, I, O> {
    type Scratch = Accumulator<T>;

    fn kind(&self) -> OperationKind {
        KIND
    }

    fn shape(&self) -> (usize, usize) {
        self.shape
    }

    fn fingerprint(&self) -> Fingerprint {
        self.fp
    }

    fn work(&self, i: usize) -> usize {
        self.a.start(i) + i
    }

    fn scratch(&self) -> Accumulator<T> {
        let n = self.shape.1;
        Accumulator {
            seen: vec![usize::MAX; n],
            in_d: vec![usize::MAX; n],
            acc: vec![T::zero(); n],
            dval: vec![T::zero(); n],
            list: Vec::new(),
        }
    }

    fn count_row(&self, i: usize, s: &mut Accumulator<T>, _mask: &mut [u8]) -> usize {
        self.gather(i, s, false);
        s.list.len()
    }

    fn fill_row(
        &self,
        i: usize,
        s: &mut Accumulator<T>,
        _mask: &[u8],
        cols: &mut Vec<usize>,
        vals: Option<&mut Vec<T>>,
    ) {
        self.gather(i, s, vals.is_some());
        s.list.sort_unstable();
        cols.extend_from_slice(&s.list);
        let Some(vals) = vals else { return };
        let (alpha, beta) = (self.alpha, self.beta);
        for &j in &s.list {
            let prod = (s.seen[j] == i && !alpha.is_zero()).then(|| {
                if alpha == T::one() {
                    s.acc[j]
                } else {
                    alpha * s.acc[j]
                }
            });
            let dterm = (s.in_d[j] == i && !beta.is_zero()).then(|| {
                if beta == T::one() {
                    s.dval[j]
                } else {
                    beta * s.dval[j]
                }
            });
            vals.push(match (prod, dterm) {
                (Some(p), Some(q)) => p + q,
                (Some(p), None) => p,
                (None, Some(q)) => q,
                (None, None) => T::zero(),
            });
        }
    }
}

/// Placeholder for an absent `D` operand.
pub fn no_addend<'a, T, I, O>() -> Option<&'a CsrView<'a, T, I, O>> {
    None
}

macro_rules! spgemm_entry {
    ($(#[$doc:meta])* $name:ident, $shell:ty, |$p:ident, $st:ident, $c:ident, $make:ident| $body:expr) => {
        $(#[$doc])*
        pub fn $name<T, I, O, CI, CO>(
            policy: &ExecutionPolicy,
            state: &mut OperationState<T>,
            a: impl SparseOperand<T, I, O>,
            b: impl SparseOperand<T, I, O>,
            c: $shell,
            d: Option<impl SparseOperand<T, I, O>>,
        ) -> Result<()>
        where
            T: Scalar,
            I: SpIndex,
            O: SpIndex,
            CI: SpIndex,
            CO: SpIndex,
        {
            let (opa, opb) = (a.operand(), b.operand());
            let opd = d.as_ref().map(|d| d.operand());
            let $make = || Spgemm::new(&opa, &opb, opd.as_ref());
            let ($p, $st, $c) = (policy, state, c);
            $body
        }
    };
}

spgemm_entry!(
    /// Optional inspect: validates the operands; nothing is cached.
    sparse_multiply_inspect, &OutputShell<'_, T, CI, CO>,
    |_p, st, c, make| engine::inspect(st, KIND, || {
        let f = make()?;
        if (c.nrows(), c.ncols()) != f.shape {
            return Err(Error::ShapeMismatch(format!(
                "result is {}x{}, output is {}x{}",
                f.shape.0, f.shape.1, c.nrows(), c.ncols()
            )));
        }
        Ok(())
    })
);

spgemm_entry!(
    /// Structural analysis; afterwards `state.result_nnz()` is the exact
    /// size of `C`. A repeated compute on structurally identical operands
    /// reuses the previous analysis.
    sparse_multiply_compute, &OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::compute(p, st, KIND, false, c, make)
);

spgemm_entry!(
    /// Writes structure and values of `C` into the bound arrays.
    sparse_multiply_fill, &mut OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::fill(p, st, KIND, c, make)
);

spgemm_entry!(
    /// Structural analysis for the symbolic/numeric split.
    sparse_multiply_symbolic_compute, &OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::compute(p, st, KIND, true, c, make)
);

spgemm_entry!(
    /// Writes the structure arrays of `C`; no values are read or written.
    sparse_multiply_symbolic_fill, &mut OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::symbolic_fill(p, st, KIND, c, make)
);

spgemm_entry!(
    /// Computes values for the structure fixed by the symbolic phase. Fails
    /// with a stale-structure error if any operand's structure changed.
    sparse_multiply_numeric_compute, &OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::numeric_compute(p, st, KIND, c, make)
);

spgemm_entry!(
    /// Writes the values computed by the last numeric compute.
    sparse_multiply_numeric_fill, &mut OutputShell<'_, T, CI, CO>,
    |_p, st, c, make| engine::numeric_fill(st, KIND, c, make)
);
