use crate::error::{Error, Result};
use crate::formats::{CooView, CscView, CsrView, Format, IndexBase, SparseView};
use crate::scalar::{Scalar, SpIndex};

/// Output of a staged operation: extents and format fixed up front, arrays
/// bound by the caller once the result size is known.
///
/// ```
/// use spblas::staged::OutputShell;
/// let mut c = OutputShell::<f64>::csr(2, 3);
/// let (mut ro, mut ci, mut v) = (vec![0; 3], vec![0; 4], vec![0.0; 4]);
/// c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
/// assert_eq!(c.offsets_len(), 3);
/// ```
#[derive(Debug)]
pub struct OutputShell<'a, T, I = usize, O = usize> {
    format: Format,
    nrows: usize,
    ncols: usize,
    base: IndexBase,
    offsets: Option<&'a mut [O]>,
    row_indices: Option<&'a mut [I]>,
    indices: Option<&'a mut [I]>,
    values: Option<&'a mut [T]>,
    structure_nnz: Option<usize>,
    values_written: bool,
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> OutputShell<'a, T, I, O> {
    pub fn new(format: Format, nrows: usize, ncols: usize) -> Self {
        OutputShell {
            format,
            nrows,
            ncols,
            base: IndexBase::Zero,
            offsets: None,
            row_indices: None,
            indices: None,
            values: None,
            structure_nnz: None,
            values_written: false,
        }
    }

    pub fn csr(nrows: usize, ncols: usize) -> Self {
        Self::new(Format::Csr, nrows, ncols)
    }

    pub fn csc(nrows: usize, ncols: usize) -> Self {
        Self::new(Format::Csc, nrows, ncols)
    }

    pub fn coo(nrows: usize, ncols: usize) -> Self {
        Self::new(Format::Coo, nrows, ncols)
    }

    /// Index base the fill emits.
    pub fn with_base(mut self, base: IndexBase) -> Self {
        self.base = base;
        self
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn base(&self) -> IndexBase {
        self.base
    }

    /// Required offsets length: `nrows + 1` (CSR), `ncols + 1` (CSC), 0 (COO).
    pub fn offsets_len(&self) -> usize {
        match self.format {
            Format::Csr => self.nrows + 1,
            Format::Csc => self.ncols + 1,
            Format::Coo => 0,
        }
    }

    /// Row offsets (CSR) or column offsets (CSC).
    pub fn bind_offsets(&mut self, offsets: &'a mut [O]) -> &mut Self {
        self.offsets = Some(offsets);
        self
    }

    /// Row indices of a COO output.
    pub fn bind_row_indices(&mut self, rows: &'a mut [I]) -> &mut Self {
        self.row_indices = Some(rows);
        self
    }

    /// Column indices (CSR, COO) or row indices (CSC).
    pub fn bind_indices(&mut self, indices: &'a mut [I]) -> &mut Self {
        self.indices = Some(indices);
        self
    }

    pub fn bind_values(&mut self, values: &'a mut [T]) -> &mut Self {
        self.values = Some(values);
        self
    }

    /// Entries written by the last structural fill.
    pub fn filled_nnz(&self) -> Option<usize> {
        self.structure_nnz
    }

    /// The filled result. Requires both structure and values to be written.
    pub fn view(&self) -> Result<SparseView<'_, T, I, O>> {
        let nnz = self.structure_nnz.ok_or(Error::OutputUnbound)?;
        if !self.values_written {
            return Err(Error::OutputUnbound);
        }
        let values: &[T] = self.values.as_deref().ok_or(Error::OutputUnbound)?;
        let indices: &[I] = self.indices.as_deref().ok_or(Error::OutputUnbound)?;
        Ok(match self.format {
            Format::Csr => {
                let offsets: &[O] = self.offsets.as_deref().ok_or(Error::OutputUnbound)?;
                SparseView::Csr(
                    CsrView::new(self.nrows, self.ncols, nnz, offsets, indices, values)
                        .with_base(self.base),
                )
            }
            Format::Csc => {
                let offsets: &[O] = self.offsets.as_deref().ok_or(Error::OutputUnbound)?;
                SparseView::Csc(
                    CscView::new(self.nrows, self.ncols, nnz, offsets, indices, values)
                        .with_base(self.base),
                )
            }
            Format::Coo => {
                let rows: &[I] = self.row_indices.as_deref().ok_or(Error::OutputUnbound)?;
                SparseView::Coo(
                    CooView::new(self.nrows, self.ncols, nnz, rows, indices, values)
                        .with_base(self.base),
                )
            }
        })
    }

    /// Writes a row-major, zero-based result. With `structure` set, the
    /// structure arrays are written; with `vals`, the values. All lengths and
    /// index ranges are checked before anything is written.
    pub(crate) fn emit(
        &mut self,
        offsets: &[usize],
        cols: &[usize],
        vals: Option<&[T]>,
        structure: bool,
    ) -> Result<()> {
        let nnz = cols.len();
        let b = self.base.offset();
        if structure {
            if self.format != Format::Coo {
                check_len("offsets", self.offsets.as_deref(), self.offsets_len())?;
                if O::from_index(nnz + b).is_none() {
                    return Err(Error::IndexOverflow(nnz + b));
                }
            } else {
                check_len("row_indices", self.row_indices.as_deref(), nnz)?;
            }
            check_len("indices", self.indices.as_deref(), nnz)?;
            let top = self.nrows.max(self.ncols);
            if top > 0 && I::from_index(top - 1 + b).is_none() {
                return Err(Error::IndexOverflow(top - 1 + b));
            }
        }
        if vals.is_some() {
            check_len("values", self.values.as_deref(), nnz)?;
        }

        // Storage order of the output: identity for row-major formats,
        // stable counting sort by column for CSC.
        let (perm, major_offsets) = match self.format {
            Format::Csc => {
                let mut col_offsets = vec![0usize; self.ncols + 1];
                for &j in cols {
                    col_offsets[j + 1] += 1;
                }
                for j in 0..self.ncols {
                    col_offsets[j + 1] += col_offsets[j];
                }
                let mut next = col_offsets.clone();
                let mut perm = vec![0usize; nnz];
                for (k, &j) in cols.iter().enumerate() {
                    perm[next[j]] = k;
                    next[j] += 1;
                }
                (Some(perm), col_offsets)
            }
            _ => (None, offsets.to_vec()),
        };
        let src = |p: usize| perm.as_ref().map_or(p, |perm| perm[p]);

        if structure {
            let cast = |v: usize| I::from_index(v + b).expect("range checked");
            if let Some(out) = self.offsets.as_deref_mut() {
                for (o, &v) in out.iter_mut().zip(major_offsets.iter()) {
                    *o = O::from_index(v + b).expect("range checked");
                }
            }
            let out = self.indices.as_deref_mut().expect("length checked");
            match self.format {
                Format::Csr | Format::Coo => {
                    for (o, &j) in out.iter_mut().zip(cols) {
                        *o = cast(j);
                    }
                }
                Format::Csc => {
                    let mut row_of = vec![0usize; nnz];
                    for i in 0..self.nrows {
                        row_of[offsets[i]..offsets[i + 1]].fill(i);
                    }
                    for (p, o) in out.iter_mut().enumerate() {
                        *o = cast(row_of[src(p)]);
                    }
                }
            }
            if let (Format::Coo, Some(rows)) = (self.format, self.row_indices.as_deref_mut()) {
                for i in 0..self.nrows {
                    for o in &mut rows[offsets[i]..offsets[i + 1]] {
                        *o = cast(i);
                    }
                }
            }
            self.structure_nnz = Some(nnz);
            self.values_written = false;
        }
        if let Some(vals) = vals {
            let out = self.values.as_deref_mut().expect("length checked");
            for (p, o) in out.iter_mut().enumerate() {
                *o = vals[src(p)];
            }
            self.values_written = true;
        }
        Ok(())
    }
}

fn check_len<X>(array: &'static str, bound: Option<&[X]>, expected: usize) -> Result<()> {
    match bound {
        None => Err(Error::OutputUnbound),
        Some(a) if a.len() != expected => Err(Error::OutputLength {
            array,
            expected,
            found: a.len(),
        }),
        Some(_) => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::validate;

    // [[1, 0, 2], [0, 3, 0]] row-major
    const RO: [usize; 3] = [0, 2, 3];
    const CI: [usize; 3] = [0, 2, 1];
    const V: [f64; 3] = [1.0, 2.0, 3.0];

    #[test]
    fn emits_all_formats() {
        let (mut ro, mut ci, mut v) = ([0u32; 3], [0u32; 3], [0.0; 3]);
        let mut c = OutputShell::<f64, u32, u32>::csr(2, 3).with_base(IndexBase::One);
        c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
        c.emit(&RO, &CI, Some(&V), true).unwrap();
        assert!(validate(c.view().unwrap().as_ref()).is_ok());
        assert_eq!((ro, ci, v), ([1, 3, 4], [1, 3, 2], V));

        let (mut co, mut ri, mut v) = ([0usize; 4], [0usize; 3], [0.0; 3]);
        let mut c = OutputShell::<f64>::csc(2, 3);
        c.bind_offsets(&mut co).bind_indices(&mut ri).bind_values(&mut v);
        c.emit(&RO, &CI, Some(&V), true).unwrap();
        assert_eq!((co, ri, v), ([0, 1, 2, 3], [0, 1, 0], [1.0, 3.0, 2.0]));

        let (mut r, mut cc, mut v) = ([0usize; 3], [0usize; 3], [0.0; 3]);
        let mut c = OutputShell::<f64>::coo(2, 3);
        c.bind_row_indices(&mut r).bind_indices(&mut cc).bind_values(&mut v);
        c.emit(&RO, &CI, Some(&V), true).unwrap();
        assert_eq!((r, cc), ([0, 0, 1], [0, 2, 1]));
    }

    #[test]
    fn rejects_lengths_without_writing() {
        let (mut ro, mut ci, mut v) = ([7usize; 3], [7usize; 4], [7.0; 3]);
        let mut c = OutputShell::<f64>::csr(2, 3);
        c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
        assert_eq!(
            c.emit(&RO, &CI, Some(&V), true),
            Err(Error::OutputLength { array: "indices", expected: 3, found: 4 })
        );
        assert_eq!(ro, [7; 3]);
        let mut c = OutputShell::<f64>::csr(2, 3);
        assert_eq!(c.emit(&RO, &CI, None, true), Err(Error::OutputUnbound));
        assert_eq!(c.view().unwrap_err(), Error::OutputUnbound);
    }

    #[test]
    fn index_overflow() {
        let big = 3_000_000_000usize;
        let (mut o, mut i, mut v) = ([0i32; 2], [0i32; 1], [0.0; 1]);
        let mut c = OutputShell::<f64, i32, i32>::csr(1, big + 1);
        c.bind_offsets(&mut o).bind_indices(&mut i).bind_values(&mut v);
        assert_eq!(c.emit(&[0, 1], &[big], Some(&[1.0]), true), Err(Error::IndexOverflow(big)));
        assert_eq!(o, [0, 0]);
    }
}
