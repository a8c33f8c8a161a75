//! Eigenvalue and singular-value kernels.
//!
//! Hermitian problems use cyclic complex Jacobi rotations, which keep small
//! eigenvalues accurate to roundoff relative to the matrix norm. Singular
//! values use one-sided (Hestenes) Jacobi. General spectra use Householder
//! reduction to Hessenberg form followed by single-shift complex QR.

use super::{ComplexMatrix, C64, HERMITICITY_TOL, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Jacobi rotation zeroing the `(p, q)` entry of a Hermitian 2x2 block
/// `[[app, apq], [conj(apq), aqq]]`. Returns `(c, s, phase)` describing
/// `G = [[c, s*phase], [-s*conj(phase), c]]` acting on columns `p, q`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (f64, f64, C64) {
    let r = apq.norm();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// unitary whose columns are the matching eigenvectors.
pub fn herm_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    herm_eig_with_tol(h, HERMITICITY_TOL)
}

pub fn herm_eig_with_tol(h: &ComplexMatrix, hermiticity_tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = h.require_square()?;
    let deviation = h.hermiticity_deviation();
    if deviation > hermiticity_tol {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == ZERO {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                let sp = phase * s;
                let sp_conj = phase.conj() * s;
                // A <- A G
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c - akq * sp_conj;
                    a[(k, q)] = akp * sp + akq * c;
                }
                // A <- G^dagger A
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c - aqk * sp;
                    a[(q, k)] = apk * sp_conj + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * c - vkq * sp_conj;
                    v[(k, q)] = vkp * sp + vkq * c;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Ascending real eigenvalues of a Hermitian matrix.
pub fn herm_eigvals(h: &ComplexMatrix) -> Result<Vec<f64>> {
    herm_eig(h).map(|(vals, _)| vals)
}

pub fn herm_eigvals_with_tol(h: &ComplexMatrix, hermiticity_tol: f64) -> Result<Vec<f64>> {
    herm_eig_with_tol(h, hermiticity_tol).map(|(vals, _)| vals)
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    // Work on the orientation with fewer columns.
    let mut w = if a.cols() <= a.rows() { a.clone() } else { a.adjoint() };
    let (m, n) = (w.rows(), w.cols());
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..m {
                    let (x, y) = (w[(k, p)], w[(k, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == ZERO {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                let sp = phase * s;
                let sp_conj = phase.conj() * s;
                for k in 0..m {
                    let (x, y) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = x * c - y * sp_conj;
                    w[(k, q)] = x * sp + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| (0..m).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Full complex spectrum of a square matrix (unordered).
pub fn eigvals_general(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(a);
    let norm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 100 * n;

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eigs.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::NoConvergence(max_iter));
        }

        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, l, hi, shift);
    }
    eigs.push(h[(0, 0)]);
    Ok(eigs)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let mu1 = half_tr + disc;
    let mu2 = half_tr - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// One shifted QR sweep `H - mu I = QR, H <- RQ + mu I` on the active block `l..=hi`.
fn qr_step(h: &mut ComplexMatrix, l: usize, hi: usize, mu: C64) {
    for k in l..=hi {
        h[(k, k)] -= mu;
    }
    let mut rotations = Vec::with_capacity(hi - l);
    for k in l..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, ZERO)
        } else if x == ZERO {
            (0.0, C64::new(1.0, 0.0))
        } else {
            let xn = x.norm();
            (xn / r, (x / xn) * y.conj() / r)
        };
        for j in k..=hi {
            let (a, b) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = l + idx;
        for i in l..=(k + 1).min(hi) {
            let (a, b) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = a * c + b * s.conj();
            h[(i, k + 1)] = -a * s + b * c;
        }
    }
    for k in l..=hi {
        h[(k, k)] += mu;
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0] == ZERO { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2 v v^dagger) H on rows k+1..n
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= vi * dot * 2.0;
            }
        }
        // H <- H (I - 2 v v^dagger) on columns k+1..n
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(j, vj)| h[(i, k + 1 + j)] * vj).sum();
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= dot * vj.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::pauli;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        random_matrix(n, seed).hermitian_part()
    }

    #[test]
    fn hermitian_basics() {
        assert_eq!(herm_eigvals(&ComplexMatrix::identity(2)).unwrap(), vec![1.0, 1.0]);
        let z = herm_eigvals(&pauli::sigma_z()).unwrap();
        assert_eq!(z, vec![-1.0, 1.0]);
        let y = herm_eigvals(&pauli::sigma_y()).unwrap();
        assert!((y[0] + 1.0).abs() < 1e-15 && (y[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_rejects_non_hermitian() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(herm_eigvals(&a), Err(Error::NotHermitian { .. })));
        // a looser tolerance accepts it (symmetrized)
        assert!(herm_eigvals_with_tol(&a, 2.0).is_ok());
    }

    #[test]
    fn hermitian_residuals_and_trace() {
        for seed in 0..20 {
            let n = 2 + (seed as usize % 7);
            let h = random_hermitian(n, seed);
            let (vals, vecs) = herm_eig(&h).unwrap();
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            for (j, &lambda) in vals.iter().enumerate() {
                let v = vecs.column(j);
                let hv = h.matvec(&v).unwrap();
                let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt();
                assert!(res <= 1e-9, "residual {res}");
            }
            let tr: f64 = vals.iter().sum();
            assert!((tr - h.trace().re).abs() <= 1e-10);
            let unitarity = &vecs.adjoint() * &vecs;
            assert!(unitarity.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-12);
        }
    }

    #[test]
    fn singular_values_of_diagonal_and_rectangular() {
        let d = ComplexMatrix::from_diag(&[C64::new(0.0, 3.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.0)]);
        assert_eq!(singular_values(&d), vec![3.0, 1.0, 0.0]);
        let a = random_matrix(5, 11);
        let rect = ComplexMatrix::from_fn(5, 2, |i, j| a[(i, j)]);
        let sv = singular_values(&rect);
        let gram = &rect.adjoint() * &rect;
        let ev = herm_eigvals(&gram).unwrap();
        assert!((sv[0] * sv[0] - ev[1]).abs() < 1e-12);
        assert!((sv[1] * sv[1] - ev[0]).abs() < 1e-12);
        assert_eq!(singular_values(&rect.adjoint()).len(), 2);
    }

    #[test]
    fn general_spectrum_of_diagonal() {
        let i = C64::new(0.0, 1.0);
        let mut e = eigvals_general(&ComplexMatrix::from_diag(&[i, -i])).unwrap();
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert_eq!(e, vec![-i, i]);
    }

    #[test]
    fn general_spectrum_trace_and_determinant() {
        for seed in 100..130 {
            let a = random_matrix(4, seed);
            let e = eigvals_general(&a).unwrap();
            assert_eq!(e.len(), 4);
            let sum: C64 = e.iter().sum();
            assert!((sum - a.trace()).norm() <= 1e-10);
            // each eigenvalue makes A - lambda I singular
            for &lambda in &e {
                let shifted = &a - &ComplexMatrix::identity(4).scale(lambda);
                let smin = *singular_values(&shifted).last().unwrap();
                assert!(smin <= 1e-10, "smallest singular value {smin}");
            }
        }
    }

    #[test]
    fn general_spectrum_of_jordan_block_and_companion() {
        // companion matrix of (x-1)(x-2)(x-3)(x-4) = x^4 - 10x^3 + 35x^2 - 50x + 24
        let c = ComplexMatrix::from_real(
            4,
            4,
            &[10.0, -35.0, 50.0, -24.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let mut e: Vec<f64> = eigvals_general(&c).unwrap().iter().map(|z| z.re).collect();
        e.sort_by(f64::total_cmp);
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        let j = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let e = eigvals_general(&j).unwrap();
        assert!(e.iter().all(|z| z.norm() == 0.0));
    }
}
