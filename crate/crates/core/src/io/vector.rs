use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{format_value, parse_part, IoError};
use crate::scalar::Scalar;

/// Reads one value per line (`re im` for complex); blank lines and lines
/// starting with `%` are skipped.
pub fn read_vector<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<T>, IoError> {
    read_vector_from(BufReader::new(File::open(path)?))
}

/// [`read_vector`] from any reader.
pub fn read_vector_from<T: Scalar>(reader: impl BufRead) -> Result<Vec<T>, IoError> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let words: Vec<&str> = t.split_whitespace().collect();
        let bad = || IoError::Parse {
            line: n + 1,
            msg: format!("bad value '{t}'"),
        };
        let part = |s: &str| parse_part::<T>(s).ok_or_else(bad);
        let v = match (words.len(), T::IS_COMPLEX) {
            (1, _) => T::from_parts(part(words[0])?, 0.0),
            (2, true) => T::from_parts(part(words[0])?, part(words[1])?),
            _ => return Err(bad()),
        };
        out.push(v);
    }
    Ok(out)
}

pub fn write_vector<T: Scalar>(path: impl AsRef<Path>, v: &[T]) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_vector_to(&mut out, v)?;
    out.flush()?;
    Ok(())
}

/// One value per line, shortest round-trip form.
pub fn write_vector_to<T: Scalar>(mut out: impl Write, v: &[T]) -> Result<(), IoError> {
    for &x in v {
        writeln!(out, "{}", format_value(x))?;
    }
    Ok(())
}
