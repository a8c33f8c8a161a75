//! Matrix exponential by scaling and squaring with a diagonal Padé core
//! (Higham 2005, "The scaling and squaring method for the matrix exponential
//! revisited").

use super::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
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

/// `exp(A)` for a square complex matrix.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let norm = a.one_norm();
    if !norm.is_finite() {
        return Err(Error::InvalidArgument("expm of a matrix with non-finite entries".into()));
    }
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }

    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, coeffs);
            return solve_pade(&u, &v);
        }
    }

    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil().max(0.0) as i32 } else { 0 };
    let scaled = a.scale_real(0.5f64.powi(s));
    let (u, v) = pade13(&scaled);
    let mut r = solve_pade(&u, &v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn axpy_sum(terms: &[(f64, &ComplexMatrix)], n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for &(c, m) in terms {
        for (o, x) in out.data.iter_mut().zip(&m.data) {
            *o += x * c;
        }
    }
    out
}

/// Odd/even parts `(U, V)` for Padé degrees 3 through 9.
fn pade_low(a: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let ident = ComplexMatrix::identity(n);
    let a2 = a * a;
    let mut powers = vec![ident, a2.clone()];
    let m = b.len() - 1;
    while 2 * (powers.len() - 1) < m {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let odd: Vec<(f64, &ComplexMatrix)> =
        powers.iter().enumerate().filter(|(k, _)| 2 * k + 1 <= m).map(|(k, p)| (b[2 * k + 1], p)).collect();
    let even: Vec<(f64, &ComplexMatrix)> =
        powers.iter().enumerate().filter(|(k, _)| 2 * k <= m).map(|(k, p)| (b[2 * k], p)).collect();
    let u = a * &axpy_sum(&odd, n);
    let v = axpy_sum(&even, n);
    (u, v)
}

fn pade13(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let b = &B13;
    let ident = ComplexMatrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = axpy_sum(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
    let u_sum = &(&a6 * &inner_u) + &axpy_sum(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &ident)], n);
    let u = a * &u_sum;

    let inner_v = axpy_sum(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
    let v = &(&a6 * &inner_v) + &axpy_sum(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &ident)], n);
    (u, v)
}

/// Solves `(V - U) X = (V + U)`.
fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = v + u;
    let q = v - u;
    lu_solve(q, p)
}

/// Gaussian elimination with partial pivoting; solves `A X = B` in place.
pub(crate) fn lu_solve(mut a: ComplexMatrix, mut b: ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    let m = b.cols();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap();
        if a[(pivot, col)] == ZERO {
            return Err(Error::InvalidArgument("singular matrix in linear solve".into()));
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            for j in 0..m {
                let tmp = b[(col, j)];
                b[(col, j)] = b[(pivot, j)];
                b[(pivot, j)] = tmp;
            }
        }
        let inv = ONE / a[(col, col)];
        for i in col + 1..n {
            let f = a[(i, col)] * inv;
            if f == ZERO {
                continue;
            }
            a[(i, col)] = ZERO;
            for j in col + 1..n {
                let t = a[(col, j)];
                a[(i, j)] -= f * t;
            }
            for j in 0..m {
                let t = b[(col, j)];
                b[(i, j)] -= f * t;
            }
        }
    }
    for j in 0..m {
        for i in (0..n).rev() {
            let mut acc: C64 = b[(i, j)];
            for k in i + 1..n {
                acc -= a[(i, k)] * b[(k, j)];
            }
            b[(i, j)] = acc / a[(i, i)];
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(expm(&z).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn exp_of_diagonal() {
        let d = [C64::new(0.3, 0.0), C64::new(-2.0, 1.0), C64::new(7.5, -0.2), C64::new(-40.0, 3.0)];
        let e = expm(&ComplexMatrix::from_diag(&d)).unwrap();
        for (i, di) in d.iter().enumerate() {
            let expected = di.exp();
            assert!((e[(i, i)] - expected).norm() <= 1e-12 * expected.norm().max(1.0));
        }
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(e[(i, j)].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(expm(&ComplexMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn commuting_sum_factorizes() {
        let a = ComplexMatrix::from_diag(&[C64::new(1.2, 0.4), C64::new(-0.7, 2.0), C64::new(3.0, 0.0)]);
        let b = ComplexMatrix::from_diag(&[C64::new(-0.5, 0.1), C64::new(2.5, -1.0), C64::new(-6.0, 0.3)]);
        let lhs = expm(&(&a + &b)).unwrap();
        let rhs = &expm(&a).unwrap() * &expm(&b).unwrap();
        let scale = lhs.sup_norm().max(1.0);
        assert!(lhs.max_abs_diff(&rhs) <= 1e-11 * scale);
    }

    #[test]
    fn nilpotent_exact() {
        // exp([[0,1],[0,0]] * s) = [[1,s],[0,1]]
        for s in [0.01, 0.9, 4.0, 60.0] {
            let a = ComplexMatrix::from_real(2, 2, &[0.0, s, 0.0, 0.0]).unwrap();
            let e = expm(&a).unwrap();
            let expected = ComplexMatrix::from_real(2, 2, &[1.0, s, 0.0, 1.0]).unwrap();
            assert!(e.max_abs_diff(&expected) <= 1e-12 * s.max(1.0));
        }
    }

    #[test]
    fn rotation_generator() {
        // exp(theta * [[0,-1],[1,0]]) = rotation by theta
        let theta = 37.3;
        let a = ComplexMatrix::from_real(2, 2, &[0.0, -theta, theta, 0.0]).unwrap();
        let e = expm(&a).unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        let expected = ComplexMatrix::from_real(2, 2, &[c, -s, s, c]).unwrap();
        assert!(e.max_abs_diff(&expected) <= 1e-12);
    }
}
