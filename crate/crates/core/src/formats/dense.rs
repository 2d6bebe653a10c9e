use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DenseLayout {
    #[default]
    RowMajor,
    ColMajor,
}

#[derive(Debug)]
enum Data<'a, T> {
    Ref(&'a [T]),
    Mut(&'a mut [T]),
}

/// Contiguous dense vector (order 1) or matrix (order 2) over user memory.
///
/// Vectors behave as `n x 1` matrices wherever a matrix is expected.
#[derive(Debug)]
pub struct DenseView<'a, T> {
    rows: usize,
    cols: usize,
    order: u8,
    layout: DenseLayout,
    data: Data<'a, T>,
}

impl<'a, T: Scalar> DenseView<'a, T> {
    pub fn vector(data: &'a [T]) -> Self {
        DenseView {
            rows: data.len(),
            cols: 1,
            order: 1,
            layout: DenseLayout::ColMajor,
            data: Data::Ref(data),
        }
    }

    pub fn vector_mut(data: &'a mut [T]) -> Self {
        DenseView {
            rows: data.len(),
            cols: 1,
            order: 1,
            layout: DenseLayout::ColMajor,
            data: Data::Mut(data),
        }
    }

    pub fn matrix(rows: usize, cols: usize, layout: DenseLayout, data: &'a [T]) -> Result<Self> {
        check_len(rows, cols, data.len())?;
        Ok(DenseView {
            rows,
            cols,
            order: 2,
            layout,
            data: Data::Ref(data),
        })
    }

    pub fn matrix_mut(
        rows: usize,
        cols: usize,
        layout: DenseLayout,
        data: &'a mut [T],
    ) -> Result<Self> {
        check_len(rows, cols, data.len())?;
        Ok(DenseView {
            rows,
            cols,
            order: 2,
            layout,
            data: Data::Mut(data),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn layout(&self) -> DenseLayout {
        self.layout
    }

    /// `(row stride, column stride)` into the data array.
    #[inline]
    pub fn strides(&self) -> (usize, usize) {
        match self.layout {
            DenseLayout::RowMajor => (self.cols, 1),
            DenseLayout::ColMajor => (1, self.rows),
        }
    }

    pub fn as_slice(&self) -> &[T] {
        match &self.data {
            Data::Ref(s) => s,
            Data::Mut(s) => s,
        }
    }

    pub fn as_mut_slice(&mut self) -> Result<&mut [T]> {
        match &mut self.data {
            Data::Mut(s) => Ok(s),
            Data::Ref(_) => Err(Error::ReadOnlyValues),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        let (rs, cs) = self.strides();
        self.as_slice()[i * rs + j * cs]
    }
}

fn check_len(rows: usize, cols: usize, len: usize) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(n) if n == len => Ok(()),
        _ => Err(Error::ShapeMismatch(format!(
            "dense {rows}x{cols} needs {} elements, got {len}",
            rows.saturating_mul(cols)
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts_map_elements() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let r = DenseView::matrix(2, 3, DenseLayout::RowMajor, &data).unwrap();
        let c = DenseView::matrix(2, 3, DenseLayout::ColMajor, &data).unwrap();
        assert_eq!(r.get(1, 0), 4.0);
        assert_eq!(c.get(1, 0), 2.0);
        assert_eq!(c.get(0, 2), 5.0);
    }

    #[test]
    fn wrong_length_rejected() {
        let data = [0.0f32; 5];
        assert!(DenseView::matrix(2, 3, DenseLayout::RowMajor, &data).is_err());
    }

    #[test]
    fn read_only_vector() {
        let data = [0.0f64; 2];
        let mut v = DenseView::vector(&data);
        assert_eq!(v.as_mut_slice().unwrap_err(), Error::ReadOnlyValues);
    }
}
