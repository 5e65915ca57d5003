use super::{is_finite, norm_1, Lu, Matrix};
use crate::error::{Error, Result};

// Padé(13) coefficients b_0..b_13.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which Padé(13) is accurate to unit roundoff.
const THETA_13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a Padé(13) kernel.
pub fn mat_expm(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "exponential of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if !is_finite(a) {
        return Err(Error::PreconditionViolated("exponential of a non-finite matrix".into()));
    }
    let n = a.nrows();
    let norm = norm_1(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * 2f64.powi(-s);

    let ident = Matrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = &scaled * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];

    let lu = Lu::new(&(&v - &u));
    if lu.is_singular() {
        return Err(Error::singular("Padé denominator", f64::INFINITY));
    }
    let mut r = lu.solve(&(&v + &u));
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}
