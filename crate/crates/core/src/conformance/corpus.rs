//! Seeded test cases: matrices, dense operands and scalars for every family.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Family;
use crate::formats::{DenseLayout, DenseView, Format, IndexBase, Operand, SparseMatrix, SparseOperand, SparseView};
use crate::scalar::Scalar;

/// How element values are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueKind {
    /// Uniform in `[-1, 1)` per part, with a few explicit zeros.
    Uniform,
    /// Integers in `[-limit, limit]`, zero included.
    Integer(i64),
}

/// Shape of the leading sparse operand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Structure {
    Random(f64),
    Identity,
    Diagonal,
    DenseRow,
    DenseColumn,
    Empty,
    RowVector(f64),
    ColumnVector(f64),
}

impl Structure {
    fn density(self) -> f64 {
        match self {
            Structure::Random(d) | Structure::RowVector(d) | Structure::ColumnVector(d) => d,
            _ => 0.1,
        }
    }
}

/// What a corpus contains.
#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub seed: u64,
    /// Cases per family and precision.
    pub cases: usize,
    pub max_dim: usize,
    /// Densities of the random cases, used in turn.
    pub densities: Vec<f64>,
    /// Mix in identity, diagonal, single dense row/column, empty and vector shapes.
    pub structured: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0x5eed,
            cases: 200,
            max_dim: 64,
            densities: vec![0.01, 0.1, 0.3],
            structured: false,
        }
    }
}

impl CorpusConfig {
    /// Every density and structured shape.
    pub fn full(seed: u64, cases: usize) -> Self {
        CorpusConfig {
            seed,
            cases,
            max_dim: 64,
            densities: vec![0.0, 0.01, 0.1, 0.3, 1.0],
            structured: true,
        }
    }

    fn structure(&self, index: usize, rng: &mut ChaCha8Rng) -> Structure {
        const SHAPES: usize = 7;
        if self.structured && index % 4 == 3 {
            let d = self.densities[(index / 4) % self.densities.len()];
            return match (index / 4) % SHAPES {
                0 => Structure::Identity,
                1 => Structure::Diagonal,
                2 => Structure::DenseRow,
                3 => Structure::DenseColumn,
                4 => Structure::Empty,
                5 => Structure::RowVector(d),
                _ => Structure::ColumnVector(d),
            };
        }
        let d = if self.densities.is_empty() {
            rng.gen_range(0.0..1.0)
        } else {
            self.densities[index % self.densities.len()]
        };
        Structure::Random(d)
    }
}

/// Owned dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub rows: usize,
    pub cols: usize,
    pub layout: DenseLayout,
    pub data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn filled(rows: usize, cols: usize, layout: DenseLayout, value: T) -> Self {
        Dense {
            rows,
            cols,
            layout,
            data: vec![value; rows * cols],
        }
    }

    pub fn view(&self) -> DenseView<'_, T> {
        DenseView::matrix(self.rows, self.cols, self.layout, &self.data).expect("consistent extents")
    }

    pub fn view_mut(&mut self) -> DenseView<'_, T> {
        DenseView::matrix_mut(self.rows, self.cols, self.layout, &mut self.data).expect("consistent extents")
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match self.layout {
            DenseLayout::RowMajor => self.data[i * self.cols + j],
            DenseLayout::ColMajor => self.data[j * self.rows + i],
        }
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        match self.layout {
            DenseLayout::RowMajor => self.data[i * self.cols + j] = v,
            DenseLayout::ColMajor => self.data[j * self.rows + i] = v,
        }
    }
}

/// A sparse operand: stored matrix plus the scalar and flags applied to it.
#[derive(Debug, Clone)]
pub struct SparseInput<T> {
    pub matrix: SparseMatrix<T>,
    pub alpha: T,
    pub transpose: bool,
    pub conjugate: bool,
    /// Pass it to the kernel through a matrix handle.
    pub handle: bool,
}

impl<T: Scalar> SparseInput<T> {
    pub fn plain(matrix: SparseMatrix<T>) -> Self {
        SparseInput {
            matrix,
            alpha: T::one(),
            transpose: false,
            conjugate: false,
            handle: false,
        }
    }

    /// Applies the scalar and flags to the operand of a view or handle.
    pub fn apply<'o>(&self, mut op: Operand<'o, T, usize, usize>) -> Operand<'o, T, usize, usize> {
        op.alpha = self.alpha;
        op.transpose = self.transpose;
        op.conjugate = self.conjugate;
        op
    }

    /// Operand over a plain view of the matrix.
    pub fn operand<'v>(&self, view: &'v SparseView<'_, T>) -> Operand<'v, T, usize, usize> {
        self.apply(view.operand())
    }

    /// Extents of `op(A)`.
    pub fn op_shape(&self) -> (usize, usize) {
        let (r, c) = (self.matrix.nrows(), self.matrix.ncols());
        if self.transpose {
            (c, r)
        } else {
            (r, c)
        }
    }
}

/// How SpMV's `beta * D` term is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddendMode {
    None,
    /// `D` is the old content of `Y`.
    Output,
    /// `D` is a separate dense matrix.
    Other,
}

/// One generated test case. Fields a family does not use stay `None`.
#[derive(Debug, Clone)]
pub struct Case<T> {
    pub family: Family,
    pub id: String,
    pub structure: Structure,
    pub a: SparseInput<T>,
    pub b: Option<SparseInput<T>>,
    /// SpGEMM addend; its `alpha` is `beta`.
    pub d: Option<SparseInput<T>>,
    /// SpMV `X`, SDDMM left factor, triangular right-hand side, dense
    /// conversion source.
    pub x: Option<Dense<T>>,
    /// SpMV initial output, SDDMM right factor.
    pub y: Option<Dense<T>>,
    /// SpMV separate addend.
    pub z: Option<Dense<T>>,
    pub beta: T,
    pub addend: AddendMode,
    /// Output format and base of staged families.
    pub out_format: Format,
    pub out_base: IndexBase,
    /// Convert from `x` instead of `a`.
    pub dense_source: bool,
    /// Filter keeps entries with modulus at least this.
    pub threshold: f64,
    /// Drive SpGEMM through the symbolic/numeric split.
    pub split: bool,
    /// Call the optional inspect entry point first.
    pub inspect: bool,
}

impl<T: Scalar> Case<T> {
    fn new(family: Family, id: String, structure: Structure, a: SparseInput<T>) -> Self {
        Case {
            family,
            id,
            structure,
            a,
            b: None,
            d: None,
            x: None,
            y: None,
            z: None,
            beta: T::zero(),
            addend: AddendMode::None,
            out_format: Format::Csr,
            out_base: IndexBase::Zero,
            dense_source: false,
            threshold: 0.0,
            split: false,
            inspect: false,
        }
    }

    /// Extents of the result.
    pub fn out_shape(&self) -> (usize, usize) {
        let (m, k) = self.a.op_shape();
        match self.family {
            Family::Spgemm => (m, self.b.as_ref().map_or(0, |b| b.op_shape().1)),
            Family::Transpose => (k, m),
            Family::Convert if self.dense_source => {
                let x = self.x.as_ref().expect("dense source");
                if self.a.transpose {
                    (x.cols, x.rows)
                } else {
                    (x.rows, x.cols)
                }
            }
            _ => (m, k),
        }
    }
}

/// Draws one value.
pub fn value<T: Scalar>(rng: &mut ChaCha8Rng, kind: ValueKind) -> T {
    match kind {
        ValueKind::Uniform => {
            if rng.gen_bool(0.03) {
                return T::zero();
            }
            let re = rng.gen_range(-1.0..1.0);
            let im = if T::IS_COMPLEX { rng.gen_range(-1.0..1.0) } else { 0.0 };
            T::from_parts(re, im)
        }
        ValueKind::Integer(limit) => {
            let re = rng.gen_range(-limit..=limit) as f64;
            let im = if T::IS_COMPLEX {
                rng.gen_range(-limit..=limit) as f64
            } else {
                0.0
            };
            T::from_parts(re, im)
        }
    }
}

/// A scalar factor: mostly one, sometimes signs, powers of two, arbitrary
/// values or zero.
fn factor<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    match rng.gen_range(0..20) {
        0..=6 => T::one(),
        7 | 8 => -T::one(),
        9 => T::from_f64(0.5),
        10 => T::from_f64(2.0),
        11 => T::zero(),
        _ => {
            let re = rng.gen_range(-2.0..2.0);
            let im = if T::IS_COMPLEX { rng.gen_range(-2.0..2.0) } else { 0.0 };
            T::from_parts(re, im)
        }
    }
}

/// A scalar factor that keeps integer data integral and small.
fn integer_factor<T: Scalar>(rng: &mut ChaCha8Rng, zero: bool) -> T {
    let choices: &[f64] = if zero { &[0.0, 1.0, -1.0, 2.0] } else { &[1.0, -1.0, 2.0] };
    T::from_f64(*choices.choose(rng).expect("nonempty"))
}

fn random_triples<T: Scalar>(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    density: f64,
    kind: ValueKind,
) -> Vec<(usize, usize, T)> {
    let mut t = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                t.push((i, j, value(rng, kind)));
            }
        }
    }
    t
}

fn random_format(rng: &mut ChaCha8Rng) -> (Format, IndexBase) {
    let f = *[Format::Csr, Format::Csc, Format::Coo].choose(rng).expect("nonempty");
    let b = if rng.gen_bool(0.5) { IndexBase::Zero } else { IndexBase::One };
    (f, b)
}

/// Random canonical matrix in a random format and base.
pub fn random_matrix<T: Scalar>(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    density: f64,
    kind: ValueKind,
) -> SparseMatrix<T> {
    let t = random_triples(rng, rows, cols, density, kind);
    let (f, b) = random_format(rng);
    SparseMatrix::from_triples(rows, cols, t, f, b).expect("generated triples are canonical")
}

/// Matrix of the requested structure. Square shapes use `rows` for both
/// extents; vector shapes collapse one extent to 1.
pub fn structured_matrix<T: Scalar>(
    rng: &mut ChaCha8Rng,
    structure: Structure,
    rows: usize,
    cols: usize,
    kind: ValueKind,
) -> SparseMatrix<T> {
    let (rows, cols, t) = match structure {
        Structure::Random(d) => (rows, cols, random_triples(rng, rows, cols, d, kind)),
        Structure::Identity => (rows, rows, (0..rows).map(|i| (i, i, T::one())).collect()),
        Structure::Diagonal => (rows, rows, (0..rows).map(|i| (i, i, value(rng, kind))).collect()),
        Structure::DenseRow => {
            let r = rng.gen_range(0..rows);
            (rows, cols, (0..cols).map(|j| (r, j, value(rng, kind))).collect())
        }
        Structure::DenseColumn => {
            let c = rng.gen_range(0..cols);
            (rows, cols, (0..rows).map(|i| (i, c, value(rng, kind))).collect())
        }
        Structure::Empty => (rows, cols, Vec::new()),
        Structure::RowVector(d) => (1, cols, random_triples(rng, 1, cols, d, kind)),
        Structure::ColumnVector(d) => (rows, 1, random_triples(rng, rows, 1, d, kind)),
    };
    let (f, b) = random_format(rng);
    SparseMatrix::from_triples(rows, cols, t, f, b).expect("generated triples are canonical")
}

fn dense<T: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize, kind: ValueKind) -> Dense<T> {
    let layout = if rng.gen_bool(0.5) { DenseLayout::RowMajor } else { DenseLayout::ColMajor };
    let mut d = Dense::filled(rows, cols, layout, T::zero());
    for i in 0..rows {
        for j in 0..cols {
            d.set(i, j, value(rng, kind));
        }
    }
    d
}

/// Triangular matrix with every diagonal entry stored.
///
/// With `unit`, the diagonal is `+-1`; otherwise it dominates its row so
/// the solution stays well scaled.
fn triangular<T: Scalar>(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    lower: bool,
    kind: ValueKind,
    diagonal_only: bool,
    unit: bool,
) -> SparseMatrix<T> {
    let mut t = Vec::new();
    for i in 0..n {
        let mut row = Vec::new();
        if !diagonal_only {
            let span: Vec<usize> = if lower { (0..i).collect() } else { (i + 1..n).collect() };
            for j in span {
                if rng.gen_bool(density) {
                    row.push((i, j, value::<T>(rng, kind)));
                }
            }
        }
        let d = if unit {
            if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
        } else {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            sign * rng.gen_range(1.0..2.0) * (1 + row.len()) as f64
        };
        t.extend(row);
        t.push((i, i, T::from_f64(d)));
    }
    let (f, b) = random_format(rng);
    SparseMatrix::from_triples(n, n, t, f, b).expect("generated triples are canonical")
}

/// Generator state for one family and precision.
pub struct Generator<'c> {
    pub config: &'c CorpusConfig,
    pub kind: ValueKind,
    /// Integer channel: narrower second factors and integral scalars.
    pub exact: bool,
    /// Limit of the second factor in products (integer channel only).
    pub second_limit: i64,
}

impl<'c> Generator<'c> {
    pub fn new(config: &'c CorpusConfig, kind: ValueKind) -> Self {
        Generator {
            config,
            kind,
            exact: false,
            second_limit: 0,
        }
    }

    /// Integer channel: first factors within `limit`, second factors within
    /// `second_limit`, scalar factors in `{-1, 1, 2}` (and 0 for `beta`).
    pub fn exact(config: &'c CorpusConfig, limit: i64, second_limit: i64) -> Self {
        Generator {
            config,
            kind: ValueKind::Integer(limit),
            exact: true,
            second_limit,
        }
    }

    fn second(&self) -> ValueKind {
        if self.exact {
            ValueKind::Integer(self.second_limit)
        } else {
            self.kind
        }
    }

    fn alpha<T: Scalar>(&self, rng: &mut ChaCha8Rng) -> T {
        if self.exact {
            integer_factor(rng, false)
        } else {
            factor(rng)
        }
    }

    fn beta<T: Scalar>(&self, rng: &mut ChaCha8Rng) -> T {
        if self.exact {
            integer_factor(rng, true)
        } else {
            factor(rng)
        }
    }

    fn dim(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(1..=self.config.max_dim.max(1))
    }

    fn input<T: Scalar>(&self, rng: &mut ChaCha8Rng, matrix: SparseMatrix<T>, transpose: bool) -> SparseInput<T> {
        SparseInput {
            matrix,
            alpha: self.alpha(rng),
            transpose,
            conjugate: T::IS_COMPLEX && rng.gen_bool(0.5),
            handle: rng.gen_bool(0.3),
        }
    }

    /// Case `index` of `family`; the same arguments always give the same case.
    pub fn case<T: Scalar>(&self, family: Family, index: usize, rng: &mut ChaCha8Rng) -> Case<T> {
        let structure = self.config.structure(index, rng);
        let id = format!("{}-{}-{:04}", family.name(), T::NAME, index);
        let (r, c) = (self.dim(rng), self.dim(rng));
        let kind = self.kind;
        let transpose = rng.gen_bool(0.3);
        let a = match family {
            Family::Trisolve => {
                let diagonal_only = matches!(structure, Structure::Identity | Structure::Diagonal);
                let lower = rng.gen_bool(0.5);
                triangular(rng, r, structure.density(), lower, kind, diagonal_only, self.exact)
            }
            _ => structured_matrix(rng, structure, r, c, kind),
        };
        let mut a = self.input(rng, a, transpose);
        let (m, k) = a.op_shape();
        let mut case = Case::new(family, id, structure, a.clone());
        let (out_format, out_base) = random_format(rng);
        case.out_format = out_format;
        case.out_base = out_base;
        case.inspect = rng.gen_bool(0.3);
        let density = structure.density();
        match family {
            Family::Scale => {
                a.transpose = false;
                a.conjugate = false;
                case.a = a;
            }
            Family::InfNorm | Family::FrobNorm | Family::Transpose => {}
            Family::Spmv => {
                let nc = rng.gen_range(1..=3);
                case.x = Some(dense(rng, k, nc, self.second()));
                case.beta = self.beta(rng);
                case.addend = *[AddendMode::None, AddendMode::Output, AddendMode::Other]
                    .choose(rng)
                    .expect("nonempty");
                if case.addend == AddendMode::None {
                    case.beta = T::zero();
                }
                let reads_y = case.addend == AddendMode::Output && !case.beta.is_zero();
                case.y = Some(if reads_y {
                    dense(rng, m, nc, kind)
                } else {
                    // never read; NaN shows up if it is
                    Dense::filled(m, nc, DenseLayout::RowMajor, T::from_f64(f64::NAN))
                });
                if case.addend == AddendMode::Other {
                    case.z = Some(dense(rng, m, nc, kind));
                }
            }
            Family::Trisolve => {
                if case.a.alpha.is_zero() {
                    case.a.alpha = T::one();
                }
                let mut rhs = dense(rng, m, 1, self.second());
                if self.exact {
                    rhs.data = integer_rhs(&case.a, &rhs.data);
                }
                case.x = Some(rhs);
            }
            Family::Sddmm => {
                // the mask is the plain stored matrix
                a.alpha = T::one();
                a.transpose = false;
                a.conjugate = false;
                let (m, n) = a.op_shape();
                case.a = a;
                let inner = self.dim(rng);
                case.x = Some(dense(rng, m, inner, kind));
                case.y = Some(dense(rng, inner, n, self.second()));
            }
            Family::Spgemm => {
                let n = self.dim(rng);
                let tb = rng.gen_bool(0.3);
                let (br, bc) = if tb { (n, k) } else { (k, n) };
                let bm = random_matrix(rng, br, bc, density, self.second());
                case.b = Some(self.input(rng, bm, tb));
                if rng.gen_bool(0.5) {
                    let dm = random_matrix(rng, m, n, density, kind);
                    let mut d = self.input(rng, dm, false);
                    d.alpha = self.beta(rng);
                    d.conjugate = false;
                    case.d = Some(d);
                }
                case.split = rng.gen_bool(0.4);
            }
            Family::Add | Family::Hadamard => {
                let tb = rng.gen_bool(0.3);
                let (br, bc) = if tb { (k, m) } else { (m, k) };
                let bm = random_matrix(rng, br, bc, density.max(0.05), self.second());
                case.b = Some(self.input(rng, bm, tb));
            }
            Family::Convert => {
                if rng.gen_bool(0.25) {
                    case.dense_source = true;
                    let (dr, dc) = (self.dim(rng), self.dim(rng));
                    let mut x = dense(rng, dr, dc, kind);
                    for v in x.data.iter_mut() {
                        if rng.gen_bool(0.5) {
                            *v = T::zero();
                        }
                    }
                    case.x = Some(x);
                }
            }
            Family::Filter => {
                case.threshold = match kind {
                    ValueKind::Uniform => 0.5,
                    ValueKind::Integer(l) => (l as f64 / 2.0).max(1.0),
                };
            }
        }
        case
    }
}

/// Integer-valued right-hand side `b = alpha * op(T) * x` for a known
/// integral solution `x`, computed exactly in `i128`.
pub fn integer_rhs<T: Scalar>(t: &SparseInput<T>, x: &[T]) -> Vec<T> {
    let n = x.len();
    let (mut re, mut im) = (vec![0i128; n], vec![0i128; n]);
    let int = |v: T| {
        let (a, b) = v.to_parts();
        (a as i128, b as i128)
    };
    let (ar, ai) = int(t.alpha);
    for (i, j, v) in t.matrix.triples() {
        let (i, j) = if t.transpose { (j, i) } else { (i, j) };
        let (vr, vi) = int(v);
        let vi = if t.conjugate { -vi } else { vi };
        let (xr, xi) = int(x[j]);
        // alpha * v * x
        let (pr, pi) = (vr * xr - vi * xi, vr * xi + vi * xr);
        re[i] += ar * pr - ai * pi;
        im[i] += ar * pi + ai * pr;
    }
    re.into_iter()
        .zip(im)
        .map(|(r, i)| T::from_parts(r as f64, i as f64))
        .collect()
}
