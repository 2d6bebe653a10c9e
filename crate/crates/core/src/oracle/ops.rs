use super::ext::{sum, CExt, Ext};
use super::mirror::{magnitude_sum, DenseMirror};
use crate::formats::{DenseView, SparseOperand};
use crate::scalar::{Scalar, SpIndex};

fn is_one<T: Scalar>(v: T) -> bool {
    v == T::one()
}

/// `alpha * op(A) * X + beta * Y`.
///
/// Only stored entries of `A` take part. A zero `alpha` drops `A` and `X`
/// entirely and a zero `beta` drops `Y`, so neither is read.
pub fn oracle_spmv<T, I, O>(
    a: impl SparseOperand<T, I, O>,
    x: &DenseView<'_, T>,
    beta: T,
    y: &DenseView<'_, T>,
) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let alpha = a.operand().alpha();
    let am = DenseMirror::unscaled(a);
    let mut out = DenseMirror::zeros(am.nrows, x.ncols());
    let (al, be) = (CExt::of(alpha), CExt::of(beta));
    for i in 0..am.nrows {
        for c in 0..x.ncols() {
            // alpha scales the finished row sum, as a kernel would
            let mut parts = Vec::new();
            let mut magnitude = 0.0;
            let mut stored = 0;
            if !alpha.is_zero() {
                let terms: Vec<CExt> = am.row(i).map(|(k, v)| v * CExt::of(x.get(k, c))).collect();
                stored = terms.len();
                if stored > 0 {
                    parts.push(al * sum(&terms));
                    magnitude += al.abs().to_f64() * magnitude_sum(terms);
                }
            }
            if !beta.is_zero() {
                let t = be * CExt::of(y.get(i, c));
                magnitude += t.abs().to_f64();
                parts.push(t);
            }
            let m = stored
                + (stored > 0 && !is_one(alpha)) as usize
                + !beta.is_zero() as usize;
            out.set(i, c, sum(&parts), magnitude, m);
        }
    }
    out
}

/// `alpha_A * alpha_B * op(A) * op(B) + alpha_D * op(D)`, pattern included:
/// `(i, j)` is stored when some `k` has both `A(i, k)` and `B(k, j)` stored,
/// or when `D(i, j)` is stored. Cancellation never removes an entry.
pub fn oracle_gemm<T, I, O>(
    a: impl SparseOperand<T, I, O>,
    b: impl SparseOperand<T, I, O>,
    d: Option<impl SparseOperand<T, I, O>>,
) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let (alpha_a, alpha_b) = (a.operand().alpha(), b.operand().alpha());
    let beta = d.as_ref().map_or(T::zero(), |d| d.operand().alpha());
    let am = DenseMirror::unscaled(a);
    let bm = DenseMirror::unscaled(b);
    let dm = d.map(DenseMirror::unscaled);
    let alpha = CExt::of(alpha_a) * CExt::of(alpha_b);
    let use_prod = !alpha_a.is_zero() && !alpha_b.is_zero();
    let alpha_stages = !is_one(alpha_a) as usize + !is_one(alpha_b) as usize;
    let mut out = DenseMirror::zeros(am.nrows, bm.ncols);
    for i in 0..am.nrows {
        for j in 0..bm.ncols {
            let mut present = false;
            let mut terms = Vec::new();
            for (k, av) in am.row(i) {
                if bm.is_stored(k, j) {
                    present = true;
                    if use_prod {
                        terms.push(av * bm.at(k, j));
                    }
                }
            }
            let stored = terms.len();
            let mut m = stored + if stored > 0 { alpha_stages.min(2) } else { 0 };
            let mut parts = Vec::new();
            let mut magnitude = 0.0;
            if stored > 0 {
                parts.push(alpha * sum(&terms));
                magnitude += alpha.abs().to_f64() * magnitude_sum(terms);
            }
            if let Some(dm) = &dm {
                if dm.is_stored(i, j) {
                    present = true;
                    if !beta.is_zero() {
                        let t = CExt::of(beta) * dm.at(i, j);
                        magnitude += t.abs().to_f64();
                        parts.push(t);
                        m += 1;
                    }
                }
            }
            if present {
                out.set(i, j, sum(&parts), magnitude, m.max(1));
            }
        }
    }
    out
}

fn merge<T, I, O>(
    a: impl SparseOperand<T, I, O>,
    b: impl SparseOperand<T, I, O>,
    union: bool,
) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let (alpha_a, alpha_b) = (a.operand().alpha(), b.operand().alpha());
    let am = DenseMirror::unscaled(a);
    let bm = DenseMirror::unscaled(b);
    let scale = |alpha: T, v: CExt| if alpha.is_zero() { CExt::ZERO } else { CExt::of(alpha) * v };
    let mut out = DenseMirror::zeros(am.nrows, am.ncols);
    for i in 0..am.nrows {
        for j in 0..am.ncols {
            let (sa, sb) = (am.is_stored(i, j), bm.is_stored(i, j));
            if union && (sa || sb) {
                let mut terms = Vec::new();
                if sa {
                    terms.push(scale(alpha_a, am.at(i, j)));
                }
                if sb {
                    terms.push(scale(alpha_b, bm.at(i, j)));
                }
                let v = sum(&terms);
                out.set(i, j, v, magnitude_sum(terms), sa as usize + sb as usize);
            } else if !union && sa && sb {
                let alpha = CExt::of(alpha_a) * CExt::of(alpha_b);
                let zero = alpha_a.is_zero() || alpha_b.is_zero();
                let v = if zero { CExt::ZERO } else { alpha * am.at(i, j) * bm.at(i, j) };
                let m = 1
                    + !is_one(alpha_a * alpha_b) as usize
                    + (!is_one(alpha_a) && !is_one(alpha_b)) as usize;
                out.set(i, j, v, v.abs().to_f64(), m);
            }
        }
    }
    out
}

/// `alpha_A * op(A) + alpha_B * op(B)` over the union of the patterns.
pub fn oracle_add<T, I, O>(a: impl SparseOperand<T, I, O>, b: impl SparseOperand<T, I, O>) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    merge(a, b, true)
}

/// Element-wise product over the intersection of the patterns.
pub fn oracle_hadamard<T, I, O>(
    a: impl SparseOperand<T, I, O>,
    b: impl SparseOperand<T, I, O>,
) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    merge(a, b, false)
}

/// `(X * Y)(i, j)` at the stored positions of `mask`'s view.
pub fn oracle_sddmm<T, I, O>(
    x: &DenseView<'_, T>,
    y: &DenseView<'_, T>,
    mask: impl SparseOperand<T, I, O>,
) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let view = mask.operand().view();
    let mut out = DenseMirror::zeros(view.nrows(), view.ncols());
    for (i, j, _) in view.triples() {
        let terms: Vec<CExt> = (0..x.ncols())
            .map(|t| CExt::of(x.get(i, t)) * CExt::of(y.get(t, j)))
            .collect();
        let v = sum(&terms);
        out.set(i, j, v, magnitude_sum(terms.iter().copied()), terms.len().max(1));
    }
    out
}

/// Whether the stored pattern of the square `m` is lower triangular.
fn is_lower(m: &DenseMirror) -> bool {
    (0..m.nrows).all(|i| m.row(i).all(|(j, _)| j <= i))
}

/// Solution of `alpha * op(T) * x = b` by substitution in extended
/// precision. `T` must be triangular with every diagonal entry stored.
pub fn oracle_trisolve<T, I, O>(t: impl SparseOperand<T, I, O>, b: &DenseView<'_, T>) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let alpha = CExt::of(t.operand().alpha());
    let tm = DenseMirror::unscaled(t);
    let n = tm.nrows;
    let lower = is_lower(&tm);
    let mut x = vec![CExt::ZERO; n];
    let order: Vec<usize> = if lower { (0..n).collect() } else { (0..n).rev().collect() };
    for i in order {
        let mut s = CExt::of(b.get(i, 0));
        for (j, v) in tm.row(i) {
            if j != i {
                s = s - alpha * v * x[j];
            }
        }
        x[i] = s / (alpha * tm.at(i, i));
    }
    let mut out = DenseMirror::zeros(n, 1);
    for (i, v) in x.into_iter().enumerate() {
        out.set(i, 0, v, v.abs().to_f64(), 1);
    }
    out
}

/// Row-by-row expectations for a computed solution `x`: entry `i` is
/// `(b(i) - sum_j alpha T(i, j) x(j)) / (alpha T(i, i))` evaluated exactly
/// with the computed `x(j)`, so the error bound applies to every row on its
/// own whatever the conditioning of `T`.
pub fn oracle_trisolve_rows<T, I, O>(
    t: impl SparseOperand<T, I, O>,
    b: &DenseView<'_, T>,
    x: &[T],
) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let alpha_t = t.operand().alpha();
    let alpha = CExt::of(alpha_t);
    let tm = DenseMirror::unscaled(t);
    let n = tm.nrows;
    let mut out = DenseMirror::zeros(n, 1);
    for i in 0..n {
        let mut terms = vec![CExt::of(b.get(i, 0))];
        for (j, v) in tm.row(i) {
            if j != i {
                terms.push(-(alpha * v * CExt::of(x[j])));
            }
        }
        let d = alpha * tm.at(i, i);
        let s = sum(&terms);
        let dm = d.abs();
        let magnitude = (Ext::from_f64(magnitude_sum(terms.iter().copied())) / dm).to_f64();
        let m = terms.len() + 1 + 2 * (!is_one(alpha_t)) as usize;
        out.set(i, 0, s / d, magnitude, m);
    }
    out
}

/// `max_i sum_j |alpha * op(A)(i, j)|` as a 1x1 mirror; a zero `alpha`
/// gives zero.
pub fn oracle_inf_norm<T, I, O>(a: impl SparseOperand<T, I, O>) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let alpha = a.operand().alpha();
    let am = DenseMirror::unscaled(a);
    let mut out = DenseMirror::zeros(1, 1);
    if alpha.is_zero() {
        out.set(0, 0, CExt::ZERO, 0.0, 1);
        return out;
    }
    let al = CExt::of(alpha).abs();
    let mut best = Ext::ZERO;
    let (mut mag, mut m) = (0.0f64, 1usize);
    for i in 0..am.nrows {
        let row: Vec<Ext> = am.row(i).map(|(_, v)| v.abs() * al).collect();
        let s = row.iter().fold(Ext::ZERO, |acc, &v| acc + v);
        if s.is_nan() || best.is_nan() {
            best = Ext::from_f64(f64::NAN);
        } else if (s - best).to_f64() > 0.0 {
            best = s;
        }
        mag = mag.max(s.to_f64());
        // complex moduli are rounded once more before the sum
        let stages = !is_one(alpha.modulus()) as usize + T::IS_COMPLEX as usize;
        m = m.max(row.len() + stages);
    }
    out.set(0, 0, CExt::real(best), mag, m);
    out
}

/// `|alpha| * sqrt(sum |A(i, j)|^2)` as a 1x1 mirror.
pub fn oracle_frob_norm<T, I, O>(a: impl SparseOperand<T, I, O>) -> DenseMirror
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let alpha = a.operand().alpha();
    let am = DenseMirror::unscaled(a);
    let mut out = DenseMirror::zeros(1, 1);
    if alpha.is_zero() {
        out.set(0, 0, CExt::ZERO, 0.0, 1);
        return out;
    }
    let mut sum = Ext::ZERO;
    for k in 0..am.data.len() {
        if am.pattern[k] {
            let v = am.data[k];
            sum = sum + v.re * v.re + v.im * v.im;
        }
    }
    let v = sum.sqrt() * CExt::of(alpha).abs();
    let m = am.nnz() + 1 + !is_one(alpha.modulus()) as usize;
    out.set(0, 0, CExt::real(v), v.abs().to_f64(), m);
    out
}

/// `alpha * op(D)` of a dense `D` with its `+0`/`-0` entries dropped. NaN
/// counts as nonzero and stays.
pub fn oracle_convert_dense<T: Scalar>(
    d: &DenseView<'_, T>,
    alpha: T,
    transpose: bool,
    conjugate: bool,
) -> DenseMirror {
    let (m, n) = if transpose { (d.ncols(), d.nrows()) } else { (d.nrows(), d.ncols()) };
    let mut out = DenseMirror::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let raw = if transpose { d.get(j, i) } else { d.get(i, j) };
            if raw.is_zero() {
                continue;
            }
            let v = if conjugate { CExt::of(raw).conj() } else { CExt::of(raw) };
            let v = if alpha.is_zero() { CExt::ZERO } else { CExt::of(alpha) * v };
            out.set(i, j, v, v.abs().to_f64(), !is_one(alpha) as usize);
        }
    }
    out
}

/// Output pattern families.
pub enum PatternKind<'p, T> {
    /// `op(A) * op(B)`.
    Product,
    /// `op(A) + op(B)`.
    Sum,
    /// `op(A) .* op(B)`.
    ElementwiseProduct,
    /// `op(A)^T`.
    Transpose,
    /// `op(A)` in any format.
    Convert,
    /// Entries of `op(A)` accepted by `pred(i, j, alpha * v)`.
    Filter(&'p dyn Fn(usize, usize, T) -> bool),
}

/// Stored pattern of `op(A)`, row-major.
pub fn pattern_of<T, I, O>(a: impl SparseOperand<T, I, O>) -> Vec<bool>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let op = a.operand();
    let mut p = vec![false; op.nrows() * op.ncols()];
    for (i, j, _) in op.view().triples() {
        let (i, j) = if op.is_transposed() { (j, i) } else { (i, j) };
        p[i * op.ncols() + j] = true;
    }
    p
}

/// Entries of a dense matrix that are not `+0` or `-0`, row-major.
pub fn oracle_dense_pattern<T: Scalar>(d: &DenseView<'_, T>) -> Vec<bool> {
    (0..d.nrows())
        .flat_map(|i| (0..d.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| !d.get(i, j).is_zero())
        .collect()
}

/// Boolean pattern of a structural result, row-major. `b` is required for
/// the two-operand kinds.
pub fn oracle_pattern<T, I, O>(
    kind: PatternKind<'_, T>,
    a: impl SparseOperand<T, I, O>,
    b: Option<&dyn SparseOperand<T, I, O>>,
) -> Vec<bool>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let op = a.operand();
    let (m, n) = (op.nrows(), op.ncols());
    let pa = pattern_of(&a);
    let other = || {
        let b = b.expect("two-operand pattern needs B");
        let ob = b.operand();
        (pattern_of(b), ob.nrows(), ob.ncols())
    };
    match kind {
        PatternKind::Convert => pa,
        PatternKind::Transpose => {
            let mut p = vec![false; m * n];
            for i in 0..m {
                for j in 0..n {
                    p[j * m + i] = pa[i * n + j];
                }
            }
            p
        }
        PatternKind::Sum => {
            let (pb, _, _) = other();
            pa.iter().zip(&pb).map(|(x, y)| *x || *y).collect()
        }
        PatternKind::ElementwiseProduct => {
            let (pb, _, _) = other();
            pa.iter().zip(&pb).map(|(x, y)| *x && *y).collect()
        }
        PatternKind::Product => {
            let (pb, _, q) = other();
            let mut p = vec![false; m * q];
            for i in 0..m {
                for k in (0..n).filter(|&k| pa[i * n + k]) {
                    for j in 0..q {
                        p[i * q + j] |= pb[k * q + j];
                    }
                }
            }
            p
        }
        PatternKind::Filter(pred) => {
            let alpha = op.alpha();
            let mut p = vec![false; m * n];
            for (i, j, v) in op.view().triples() {
                let v = if op.is_conjugated() { v.conj() } else { v };
                let (i, j) = if op.is_transposed() { (j, i) } else { (i, j) };
                let v = if alpha == T::one() {
                    v
                } else if alpha.is_zero() {
                    T::zero()
                } else {
                    alpha * v
                };
                p[i * n + j] = pred(i, j, v);
            }
            p
        }
    }
}
