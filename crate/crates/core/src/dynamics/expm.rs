//! Real matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham 2005).

use nalgebra::DMatrix;

use crate::error::{Result, SegalError};

const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
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

/// Squarings beyond this are treated as overflow of the time scale.
const MAX_SQUARINGS: i32 = 1000;

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(SegalError::InvalidInput(format!(
            "matrix exponential of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    if !norm.is_finite() || a.iter().any(|x| !x.is_finite()) {
        return Err(SegalError::Range("matrix has non-finite entries".into()));
    }

    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            return pade(a, m);
        }
    }

    let theta13 = THETA[4].1;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    if s > MAX_SQUARINGS {
        return Err(SegalError::Range(format!(
            "1-norm {norm:.3e} needs {s} squarings"
        )));
    }
    let scaled = a * 2f64.powi(-s);
    let mut result = pade(&scaled, 13)?;
    for _ in 0..s {
        result = &result * &result;
    }
    if result.iter().any(|x| !x.is_finite()) {
        return Err(SegalError::Range(
            "matrix exponential overflowed".into(),
        ));
    }
    Ok(result)
}

/// `[m/m]` Padé approximant `q(A)⁻¹ p(A)`.
fn pade(a: &DMatrix<f64>, m: usize) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;

    let (u, v) = if m == 13 {
        let b = &B13;
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
        let u = a * (u_inner + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
        let v_inner = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
        let v = v_inner + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
        (u, v)
    } else {
        let b: &[f64] = match m {
            3 => &B3,
            5 => &B5,
            7 => &B7,
            9 => &B9,
            _ => unreachable!("unsupported Padé degree {m}"),
        };
        // odd powers build U, even powers build V
        let mut u = &id * b[1];
        let mut v = &id * b[0];
        let mut power = id.clone();
        for k in 1..=(m / 2) {
            power = &power * &a2;
            u += &power * b[2 * k + 1];
            v += &power * b[2 * k];
        }
        (a * u, v)
    };

    let p = &v + &u;
    let q = &v - &u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| SegalError::Range("Padé denominator is singular".into()))
}
