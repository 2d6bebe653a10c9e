use std::cmp::Ordering;

use super::engine::{self, fingerprint_of, Family};
use super::OutputShell;
use crate::access::{ensure_valid, rows_of, Compressed};
use crate::error::{Error, Result};
use crate::formats::{Operand, SparseOperand};
use crate::runtime::{ExecutionPolicy, Fingerprint, OperationKind, OperationState};
use crate::scalar::{Scalar, SpIndex};

/// Row-wise merge of two operands of equal extents: union for addition,
/// intersection for the element-wise product.
struct Merge<'a, T, I, O> {
    kind: OperationKind,
    a: Compressed<'a, T, I, O>,
    b: Compressed<'a, T, I, O>,
    alpha_a: T,
    alpha_b: T,
    shape: (usize, usize),
    fp: Fingerprint,
}

#[inline]
fn scale<T: Scalar>(alpha: T, v: impl FnOnce() -> T) -> T {
    if alpha == T::one() {
        v()
    } else if alpha.is_zero() {
        T::zero()
    } else {
        alpha * v()
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> Merge<'a, T, I, O> {
    fn new(kind: OperationKind, a: &Operand<'a, T, I, O>, b: &Operand<'a, T, I, O>) -> Result<Self> {
        ensure_valid(a)?;
        ensure_valid(b)?;
        let shape = (a.nrows(), a.ncols());
        if (b.nrows(), b.ncols()) != shape {
            return Err(Error::ShapeMismatch(format!(
                "op(A) is {}x{}, op(B) is {}x{}",
                shape.0,
                shape.1,
                b.nrows(),
                b.ncols()
            )));
        }
        Ok(Merge {
            kind,
            a: rows_of(a),
            b: rows_of(b),
            alpha_a: a.alpha,
            alpha_b: b.alpha,
            shape,
            fp: fingerprint_of(kind, shape, &[a, b], 0),
        })
    }

    fn union(&self) -> bool {
        self.kind == OperationKind::Add
    }

    /// Walks row `i` of both operands in column order, calling `f` with the
    /// column and the positions present in A and B.
    fn walk(&self, i: usize, mut f: impl FnMut(usize, Option<usize>, Option<usize>)) {
        let (ra, rb) = (self.a.range(i), self.b.range(i));
        let (mut p, mut q) = (ra.start, rb.start);
        while p < ra.end || q < rb.end {
            let ja = (p < ra.end).then(|| self.a.minor(p));
            let jb = (q < rb.end).then(|| self.b.minor(q));
            let ord = match (ja, jb) {
                (Some(x), Some(y)) => x.cmp(&y),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Equal => {
                    f(ja.unwrap(), Some(p), Some(q));
                    p += 1;
                    q += 1;
                }
                Ordering::Less => {
                    f(ja.unwrap(), Some(p), None);
                    p += 1;
                }
                Ordering::Greater => {
                    f(jb.unwrap(), None, Some(q));
                    q += 1;
                }
            }
        }
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> Family<T> for Merge<'a, T, I, O> {
    type Scratch = ();

    fn kind(&self) -> OperationKind {
        self.kind
    }

    fn shape(&self) -> (usize, usize) {
        self.shape
    }

    fn fingerprint(&self) -> Fingerprint {
        self.fp
    }

    fn work(&self, i: usize) -> usize {
        self.a.start(i) + self.b.start(i) + i
    }

    fn scratch(&self) {}

    fn count_row(&self, i: usize, _s: &mut (), _mask: &mut [u8]) -> usize {
        let union = self.union();
        let mut n = 0;
        self.walk(i, |_, pa, pb| {
            if union || (pa.is_some() && pb.is_some()) {
                n += 1;
            }
        });
        n
    }

    fn fill_row(
        &self,
        i: usize,
        _s: &mut (),
        _mask: &[u8],
        cols: &mut Vec<usize>,
        mut vals: Option<&mut Vec<T>>,
    ) {
        let union = self.union();
        let (aa, ab) = (self.alpha_a, self.alpha_b);
        let alpha = aa * ab;
        self.walk(i, |j, pa, pb| {
            let v = match (pa, pb) {
                (Some(p), Some(q)) if union => {
                    Some(scale(aa, || self.a.value(p)) + scale(ab, || self.b.value(q)))
                }
                (Some(p), Some(q)) => Some(scale(alpha, || self.a.value(p) * self.b.value(q))),
                (Some(p), None) if union => Some(scale(aa, || self.a.value(p))),
                (None, Some(q)) if union => Some(scale(ab, || self.b.value(q))),
                _ => None,
            };
            if let Some(v) = v {
                cols.push(j);
                if let Some(vals) = vals.as_deref_mut() {
                    vals.push(v);
                }
            }
        });
    }
}

macro_rules! merge_entry {
    ($(#[$doc:meta])* $name:ident, $kind:expr, $shell:ty, |$p:ident, $st:ident, $c:ident, $make:ident| $body:expr) => {
        $(#[$doc])*
        pub fn $name<T, I, O, CI, CO>(
            policy: &ExecutionPolicy,
            state: &mut OperationState<T>,
            a: impl SparseOperand<T, I, O>,
            b: impl SparseOperand<T, I, O>,
            c: $shell,
        ) -> Result<()>
        where
            T: Scalar,
            I: SpIndex,
            O: SpIndex,
            CI: SpIndex,
            CO: SpIndex,
        {
            let (opa, opb) = (a.operand(), b.operand());
            let $make = || Merge::new($kind, &opa, &opb);
            let ($p, $st, $c) = (policy, state, c);
            $body
        }
    };
}

merge_entry!(
    /// Optional inspect for `C = A + B`; validates the operands.
    add_inspect, OperationKind::Add, &OutputShell<'_, T, CI, CO>,
    |_p, st, _c, make| engine::inspect(st, OperationKind::Add, || make().map(drop))
);

merge_entry!(
    /// `C = A + B` structure: the union of both patterns.
    add_compute, OperationKind::Add, &OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::compute(p, st, OperationKind::Add, false, c, make)
);

merge_entry!(
    /// Writes `C = A + B`: sums where both are stored, copies elsewhere.
    add_fill, OperationKind::Add, &mut OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::fill(p, st, OperationKind::Add, c, make)
);

merge_entry!(
    /// Optional inspect for `C = A .* B`; validates the operands.
    multiply_elementwise_inspect, OperationKind::MultiplyElementwise, &OutputShell<'_, T, CI, CO>,
    |_p, st, _c, make| engine::inspect(st, OperationKind::MultiplyElementwise, || make().map(drop))
);

merge_entry!(
    /// `C = A .* B` structure: the intersection of both patterns.
    multiply_elementwise_compute, OperationKind::MultiplyElementwise, &OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::compute(p, st, OperationKind::MultiplyElementwise, false, c, make)
);

merge_entry!(
    /// Writes `C = A .* B` on the common pattern.
    multiply_elementwise_fill, OperationKind::MultiplyElementwise, &mut OutputShell<'_, T, CI, CO>,
    |p, st, c, make| engine::fill(p, st, OperationKind::MultiplyElementwise, c, make)
);
