use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{format_value, parse_part, IoError};
use crate::formats::{Format, IndexBase, SparseMatrix, SparseView, TripleError, Values};
use crate::scalar::{Scalar, SpIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmLayout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmField {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

/// Banner and size line of a Matrix Market file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmHeader {
    pub layout: MmLayout,
    pub field: MmField,
    pub symmetry: MmSymmetry,
    pub nrows: usize,
    pub ncols: usize,
    /// Entries listed in the file, before symmetric expansion.
    pub entries: usize,
}

fn header_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Header { line, msg: msg.into() }
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

fn banner(line: &str) -> Result<(MmLayout, MmField, MmSymmetry), IoError> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(header_err(1, "expected '%%MatrixMarket matrix <layout> <field> <symmetry>'"));
    }
    let layout = match words[2].as_str() {
        "coordinate" => MmLayout::Coordinate,
        "array" => MmLayout::Array,
        w => return Err(header_err(1, format!("unknown layout '{w}'"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => MmField::Real,
        "integer" => MmField::Integer,
        "complex" => MmField::Complex,
        "pattern" => MmField::Pattern,
        w => return Err(header_err(1, format!("unknown field '{w}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "skew-symmetric" => MmSymmetry::SkewSymmetric,
        "hermitian" => MmSymmetry::Hermitian,
        w => return Err(header_err(1, format!("unknown symmetry '{w}'"))),
    };
    if layout == MmLayout::Array && field == MmField::Pattern {
        return Err(header_err(1, "array files cannot have a pattern field"));
    }
    if symmetry == MmSymmetry::Hermitian && field != MmField::Complex {
        return Err(header_err(1, "hermitian files need a complex field"));
    }
    Ok((layout, field, symmetry))
}

fn parse_value<T: Scalar>(field: MmField, words: &[&str], line: usize) -> Result<T, IoError> {
    let want = match field {
        MmField::Pattern => 0,
        MmField::Complex => 2,
        _ => 1,
    };
    if words.len() != want {
        return Err(parse_err(line, format!("expected {want} value fields, found {}", words.len())));
    }
    let part = |s: &str| parse_part::<T>(s).ok_or_else(|| parse_err(line, format!("bad value '{s}'")));
    Ok(match field {
        MmField::Pattern => T::one(),
        MmField::Complex => T::from_parts(part(words[0])?, part(words[1])?),
        _ => T::from_parts(part(words[0])?, 0.0),
    })
}

/// Reads a Matrix Market file into a COO matrix with the given index base.
///
/// Symmetric, skew-symmetric and hermitian files are expanded to both
/// triangles; such files may only list entries on or below the diagonal
/// (strictly below for skew-symmetric). Pattern files load with the iso
/// value 1. Array files load every element as a stored entry. Duplicate
/// coordinates are rejected.
pub fn mm_read<T: Scalar>(
    path: impl AsRef<Path>,
    base: IndexBase,
) -> Result<(SparseMatrix<T>, MmHeader), IoError> {
    mm_read_from(BufReader::new(File::open(path)?), base)
}

/// [`mm_read`] from any reader.
pub fn mm_read_from<T: Scalar>(
    reader: impl BufRead,
    base: IndexBase,
) -> Result<(SparseMatrix<T>, MmHeader), IoError> {
    let mut lines = reader.lines().enumerate().map(|(n, l)| (n + 1, l));
    let (layout, field, symmetry) = match lines.next() {
        Some((_, l)) => banner(&l?)?,
        None => return Err(header_err(1, "empty file")),
    };
    if field == MmField::Complex && !T::IS_COMPLEX {
        return Err(IoError::Field("complex"));
    }

    // Remaining non-comment lines, split into words.
    let mut body = lines.filter_map(|(n, l)| match l {
        Err(e) => Some(Err(IoError::from(e))),
        Ok(l) => {
            let t = l.trim();
            (!t.is_empty() && !t.starts_with('%')).then(|| Ok((n, t.to_string())))
        }
    });

    let (size_line, size) = match body.next() {
        Some(r) => r?,
        None => return Err(header_err(2, "missing size line")),
    };
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| header_err(size_line, format!("bad size '{w}'"))))
        .collect::<Result<_, _>>()?;
    let (nrows, ncols, declared) = match (layout, dims.as_slice()) {
        (MmLayout::Coordinate, &[m, n, k]) => (m, n, k),
        (MmLayout::Array, &[m, n]) => (m, n, array_len(m, n, symmetry)),
        _ => return Err(header_err(size_line, "wrong number of size fields")),
    };
    if symmetry != MmSymmetry::General && nrows != ncols {
        return Err(header_err(size_line, "symmetric files must be square"));
    }

    let mut triples: Vec<(usize, usize, T)> = Vec::with_capacity(declared);
    let mut positions = array_positions(nrows, ncols, symmetry);
    let mut listed = 0usize;
    for item in body {
        let (line, text) = item?;
        if listed == declared {
            return Err(parse_err(line, format!("more than the declared {declared} entries")));
        }
        let words: Vec<&str> = text.split_whitespace().collect();
        let (i, j, rest) = match layout {
            MmLayout::Coordinate => {
                if words.len() < 2 {
                    return Err(parse_err(line, "missing coordinates"));
                }
                let index = |w: &str| {
                    w.parse::<usize>()
                        .map_err(|_| parse_err(line, format!("bad index '{w}'")))
                };
                let (r, c) = (index(words[0])?, index(words[1])?);
                if r == 0 || c == 0 || r > nrows || c > ncols {
                    return Err(IoError::OutOfRange {
                        line,
                        row: r,
                        col: c,
                        nrows,
                        ncols,
                    });
                }
                (r - 1, c - 1, &words[2..])
            }
            MmLayout::Array => {
                let (i, j) = positions.next().expect("counted against declared");
                (i, j, &words[..])
            }
        };
        let v = parse_value::<T>(field, rest, line)?;
        listed += 1;
        match symmetry {
            MmSymmetry::General => triples.push((i, j, v)),
            _ if i < j => {
                return Err(parse_err(line, format!("entry ({}, {}) above the diagonal", i + 1, j + 1)))
            }
            MmSymmetry::SkewSymmetric if i == j => {
                return Err(parse_err(line, "diagonal entry in a skew-symmetric file"))
            }
            _ => {
                triples.push((i, j, v));
                if i != j {
                    let mirrored = match symmetry {
                        MmSymmetry::SkewSymmetric => T::zero() - v,
                        MmSymmetry::Hermitian => v.conj(),
                        _ => v,
                    };
                    triples.push((j, i, mirrored));
                }
            }
        }
    }
    if listed != declared {
        return Err(parse_err(0, format!("declared {declared} entries, found {listed}")));
    }

    let matrix = SparseMatrix::from_triples(nrows, ncols, triples, Format::Coo, base).map_err(|e| match e {
        TripleError::Duplicate { row, col } => IoError::Duplicate { row: row + 1, col: col + 1 },
        TripleError::OutOfRange { row, col, nrows, ncols } => IoError::OutOfRange {
            line: 0,
            row: row + 1,
            col: col + 1,
            nrows,
            ncols,
        },
    })?;
    let matrix = if field == MmField::Pattern {
        matrix.with_iso_value(T::one())
    } else {
        matrix
    };
    let header = MmHeader {
        layout,
        field,
        symmetry,
        nrows,
        ncols,
        entries: declared,
    };
    Ok((matrix, header))
}

fn array_len(m: usize, n: usize, symmetry: MmSymmetry) -> usize {
    match symmetry {
        MmSymmetry::General => m * n,
        MmSymmetry::SkewSymmetric => n * n.saturating_sub(1) / 2,
        _ => n * (n + 1) / 2,
    }
}

/// Column-major positions listed by an array file.
fn array_positions(m: usize, n: usize, symmetry: MmSymmetry) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |j| {
        let first = match symmetry {
            MmSymmetry::General => 0,
            MmSymmetry::SkewSymmetric => j + 1,
            _ => j,
        };
        (first..m).map(move |i| (i, j))
    })
}

/// Writes a general coordinate file with 1-based indices, in the view's
/// storage order. Iso views with value 1 are written as pattern files.
pub fn mm_write<T: Scalar, I: SpIndex, O: SpIndex>(
    path: impl AsRef<Path>,
    view: &SparseView<'_, T, I, O>,
) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    mm_write_to(&mut out, view)?;
    out.flush()?;
    Ok(())
}

/// [`mm_write`] to any writer.
pub fn mm_write_to<T: Scalar, I: SpIndex, O: SpIndex>(
    mut out: impl Write,
    view: &SparseView<'_, T, I, O>,
) -> Result<(), IoError> {
    let pattern = matches!(view.values(), Values::Iso(iso) if iso.value == T::one());
    let field = if pattern {
        "pattern"
    } else if T::IS_COMPLEX {
        "complex"
    } else {
        "real"
    };
    writeln!(out, "%%MatrixMarket matrix coordinate {field} general")?;
    let r = view.as_ref();
    writeln!(out, "{} {} {}", r.nrows(), r.ncols(), r.nnz())?;
    for (i, j, v) in r.triples() {
        if pattern {
            writeln!(out, "{} {}", i + 1, j + 1)?;
        } else {
            writeln!(out, "{} {} {}", i + 1, j + 1, format_value(v))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn read<T: Scalar>(text: &str) -> Result<(SparseMatrix<T>, MmHeader), IoError> {
        mm_read_from(text.as_bytes(), IndexBase::Zero)
    }

    #[test]
    fn identity_coordinate() {
        let (m, h) = read::<f64>("%%MatrixMarket matrix coordinate real general\n% c\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n")
            .unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.format(), Format::Coo);
        assert_eq!(h.symmetry, MmSymmetry::General);
        assert_eq!(m.triples(), vec![(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
    }

    #[test]
    fn symmetric_expansion_mirrors_exactly() {
        let (m, _) = read::<f64>("%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n2 1 0.1\n3 3 -2\n").unwrap();
        assert_eq!(m.triples(), vec![(0, 1, 0.1), (1, 0, 0.1), (2, 2, -2.0)]);
        let (s, _) = read::<f64>("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3\n").unwrap();
        assert_eq!(s.triples(), vec![(0, 1, -3.0), (1, 0, 3.0)]);
        let (h, _) =
            read::<Complex64>("%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n2 1 1 2\n").unwrap();
        assert_eq!(
            h.triples(),
            vec![(0, 1, Complex64::new(1.0, -2.0)), (1, 0, Complex64::new(1.0, 2.0))]
        );
    }

    #[test]
    fn pattern_is_iso_one() {
        let (m, h) = read::<f32>("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n").unwrap();
        assert_eq!(h.field, MmField::Pattern);
        assert_eq!(m.values(), &crate::formats::OwnedValues::Iso(1.0));
    }

    #[test]
    fn array_layout_is_column_major() {
        let (m, _) = read::<f64>("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n0\n").unwrap();
        assert_eq!(m.triples(), vec![(0, 0, 1.0), (0, 1, 3.0), (1, 0, 2.0), (1, 1, 0.0)]);
        let (s, _) = read::<f64>("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n").unwrap();
        assert_eq!(s.triples(), vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 3.0)]);
    }

    #[test]
    fn errors_by_category() {
        let cat = |t: &str| read::<f64>(t).unwrap_err().category();
        assert_eq!(cat("%%MatrixMarket vector coordinate real general\n1 1 0\n"), "malformed_header");
        assert_eq!(cat("not a banner\n"), "malformed_header");
        assert_eq!(cat("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"), "out_of_range");
        assert_eq!(cat("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1\n"), "out_of_range");
        assert_eq!(cat("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n"), "duplicate_entry");
        assert_eq!(cat("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"), "parse");
        assert_eq!(cat("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n"), "parse");
        assert_eq!(cat("%%MatrixMarket matrix coordinate complex general\n1 1 0\n"), "field_mismatch");
        assert_eq!(cat("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n"), "parse");
    }

    #[test]
    fn index_base_is_applied() {
        let (m, _) = mm_read_from::<f64>(
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n2 1 5\n".as_bytes(),
            IndexBase::One,
        )
        .unwrap();
        assert_eq!(m.base(), IndexBase::One);
        assert_eq!(m.triples(), vec![(1, 0, 5.0)]);
    }

    fn round_trip<T: Scalar>(m: &SparseMatrix<T>) -> SparseMatrix<T> {
        let mut buf = Vec::new();
        mm_write_to(&mut buf, &m.view()).unwrap();
        read::<T>(std::str::from_utf8(&buf).unwrap()).unwrap().0
    }

    #[test]
    fn write_read_is_bitwise() {
        let vals = [std::f64::consts::PI, 1e-300, -0.0, 5e-324, f64::MAX, f64::INFINITY];
        let triples: Vec<_> = vals.iter().enumerate().map(|(k, &v)| (k, k, v)).collect();
        let m = SparseMatrix::from_triples(6, 6, triples, Format::Csc, IndexBase::One).unwrap();
        let back = round_trip(&m);
        for ((i, j, a), (p, q, b)) in m.triples().into_iter().zip(back.triples()) {
            assert_eq!((i, j, a.to_bits()), (p, q, b.to_bits()));
        }
        let f: Vec<_> = [std::f32::consts::PI, 1e-40, -0.0].iter().enumerate().map(|(k, &v)| (k, 0, v)).collect();
        let m32 = SparseMatrix::from_triples(3, 1, f, Format::Csr, IndexBase::Zero).unwrap();
        let back = round_trip(&m32);
        let bits = |m: &SparseMatrix<f32>| m.triples().iter().map(|t| t.2.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&m32), bits(&back));
        let empty = SparseMatrix::<f64>::from_triples(4, 2, vec![], Format::Coo, IndexBase::Zero).unwrap();
        let back = round_trip(&empty);
        assert_eq!((back.nrows(), back.ncols(), back.nnz()), (4, 2, 0));
    }
}
