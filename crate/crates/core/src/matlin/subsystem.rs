//! Partial transpose and partial trace over tensor factors.
//!
//! Basis index of a composite system is row-major in the subsystem digits,
//! the first subsystem being the most significant.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::states::DensityMatrix;

fn check_dims(mat: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    let n = mat.require_square()?;
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != n {
        return Err(Error::ShapeMismatch(format!("dims {dims:?} do not match a {n}x{n} matrix")));
    }
    Ok(n)
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Transposes the tensor factors listed in `subsystems`, leaving the rest untouched.
pub fn partial_transpose_dims(mat: &ComplexMatrix, dims: &[usize], subsystems: &[usize]) -> Result<ComplexMatrix> {
    let n = check_dims(mat, dims)?;
    for &s in subsystems {
        if s >= dims.len() {
            return Err(Error::InvalidSubsystem { index: s, count: dims.len() });
        }
    }
    let mut mask = vec![false; dims.len()];
    for &s in subsystems {
        mask[s] = true;
    }
    let mut out = ComplexMatrix::zeros(n, n);
    let mut ri = vec![0; dims.len()];
    let mut ci = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut ri);
        for j in 0..n {
            digits(j, dims, &mut ci);
            let mut a = ri.clone();
            let mut b = ci.clone();
            for k in 0..dims.len() {
                if mask[k] {
                    std::mem::swap(&mut a[k], &mut b[k]);
                }
            }
            out[(compose(&a, dims), compose(&b, dims))] = mat[(i, j)];
        }
    }
    Ok(out)
}

/// Traces out every subsystem not in `keep`; kept factors stay in their original order.
pub fn partial_trace_dims(mat: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<(ComplexMatrix, Vec<usize>)> {
    check_dims(mat, dims)?;
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::InvalidSubsystem { index: k, count: dims.len() });
        }
        kept[k] = true;
    }
    let keep_dims: Vec<usize> = (0..dims.len()).filter(|&k| kept[k]).map(|k| dims[k]).collect();
    let trace_dims: Vec<usize> = (0..dims.len()).filter(|&k| !kept[k]).map(|k| dims[k]).collect();
    let nk: usize = keep_dims.iter().product();
    let nt: usize = trace_dims.iter().product();

    let mut out = ComplexMatrix::zeros(nk, nk);
    let mut kd = vec![0; keep_dims.len()];
    let mut kd2 = vec![0; keep_dims.len()];
    let mut td = vec![0; trace_dims.len()];
    let mut full_row = vec![0; dims.len()];
    let mut full_col = vec![0; dims.len()];
    for a in 0..nk {
        digits(a, &keep_dims, &mut kd);
        for b in 0..nk {
            digits(b, &keep_dims, &mut kd2);
            let mut acc = super::ZERO;
            for e in 0..nt {
                digits(e, &trace_dims, &mut td);
                let (mut ik, mut it) = (0, 0);
                for k in 0..dims.len() {
                    if kept[k] {
                        full_row[k] = kd[ik];
                        full_col[k] = kd2[ik];
                        ik += 1;
                    } else {
                        full_row[k] = td[it];
                        full_col[k] = td[it];
                        it += 1;
                    }
                }
                acc += mat[(compose(&full_row, dims), compose(&full_col, dims))];
            }
            out[(a, b)] = acc;
        }
    }
    Ok((out, keep_dims))
}

/// Partial transpose of a state on the tensor factor `cut`.
pub fn partial_transpose(rho: &DensityMatrix, cut: usize) -> Result<ComplexMatrix> {
    partial_transpose_dims(rho.matrix(), rho.dims(), &[cut])
}

/// Reduced state on the subsystems in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (mat, dims) = partial_trace_dims(rho.matrix(), rho.dims(), keep)?;
    Ok(DensityMatrix::from_parts_unchecked(dims, mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{herm_eigvals, kron};
    use crate::states::{bell_phi_plus, random_density};

    #[test]
    fn transpose_of_product_state_acts_on_one_factor() {
        let a = random_density(&[2], 1);
        let b = random_density(&[3], 2);
        let prod = kron(a.matrix(), b.matrix());
        let pt = partial_transpose_dims(&prod, &[2, 3], &[1]).unwrap();
        let expected = kron(a.matrix(), &b.matrix().transpose());
        assert_eq!(pt, expected);
    }

    #[test]
    fn bell_partial_transpose_has_negative_half() {
        let bell = bell_phi_plus().to_density();
        let pt = partial_transpose(&bell, 1).unwrap();
        let ev = herm_eigvals(&pt).unwrap();
        assert!((ev[0] + 0.5).abs() < 1e-15);
        assert!(ev[1..].iter().all(|&x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let rho = random_density(&[2, 3, 2], 7);
        for cut in 0..3 {
            let once = partial_transpose_dims(rho.matrix(), rho.dims(), &[cut]).unwrap();
            let twice = partial_transpose_dims(&once, rho.dims(), &[cut]).unwrap();
            assert_eq!(&twice, rho.matrix());
            assert!((once.trace() - rho.matrix().trace()).norm() < 1e-14);
            assert!(once.is_hermitian(1e-14));
        }
    }

    #[test]
    fn invalid_cut_rejected() {
        let bell = bell_phi_plus().to_density();
        assert!(matches!(partial_transpose(&bell, 2), Err(Error::InvalidSubsystem { index: 2, count: 2 })));
    }

    #[test]
    fn trace_of_product_and_bell() {
        let a = random_density(&[2], 3);
        let b = random_density(&[2], 4);
        let prod = DensityMatrix::new(vec![2, 2], kron(a.matrix(), b.matrix())).unwrap();
        let ra = partial_trace(&prod, &[0]).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-15);

        let bell = bell_phi_plus().to_density();
        let half = partial_trace(&bell, &[0]).unwrap();
        assert!(half.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        assert_eq!(half.dims(), &[2]);
    }

    #[test]
    fn trace_preserved_for_every_keep_set() {
        let rho = random_density(&[2, 2, 2], 12);
        let sets: [&[usize]; 7] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
        for keep in sets {
            let red = partial_trace(&rho, keep).unwrap();
            assert!((red.matrix().trace().re - 1.0).abs() <= 1e-12);
            assert!(herm_eigvals(red.matrix()).unwrap()[0] >= -1e-10);
        }
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::EmptySelection)));
    }
}
