//! Reading and writing Matrix Market files and plain vectors.

use spblas::io::{mm_read_from, mm_write_to, read_vector_from, write_vector_to};
use spblas::IndexBase;

fn main() -> Result<(), spblas::io::IoError> {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n\
                % lower triangle only\n\
                3 3 4\n1 1 2\n2 1 -1\n2 2 2\n3 3 1e-300\n";
    let (a, header) = mm_read_from::<f64>(text.as_bytes(), IndexBase::One)?;
    println!("{header:?}");
    println!("expanded triples: {:?}", a.triples());

    let mut out = Vec::new();
    mm_write_to(&mut out, &a.view())?;
    print!("{}", String::from_utf8_lossy(&out));

    let (back, _) = mm_read_from::<f64>(out.as_slice(), IndexBase::Zero)?;
    let bits = |m: &spblas::formats::SparseMatrix<f64>| {
        m.triples().iter().map(|&(i, j, v)| (i, j, v.to_bits())).collect::<Vec<_>>()
    };
    println!("round trip bitwise: {}", bits(&a) == bits(&back));

    let v: Vec<f32> = read_vector_from("% rhs\n1\n-0.0\n0.1\n".as_bytes())?;
    let mut out = Vec::new();
    write_vector_to(&mut out, &v)?;
    print!("{}", String::from_utf8_lossy(&out));

    let err = mm_read_from::<f64>("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 1\n".as_bytes(), IndexBase::Zero)
        .unwrap_err();
    println!("{}: {err}", err.category());
    Ok(())
}
