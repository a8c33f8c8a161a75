//! Propagators checked against an exact rational Taylor series of `exp(L t)`.
//!
//! Every `f64` entry of `L t` is an exact rational, so summing the series to
//! order 60 in `BigRational` arithmetic gives `exp(L t)` of the rounded
//! generator with truncation error far below `f64` resolution for `||L t|| <= 4`.

use lindblad_esd::channels::{lindblad_squeezed, lindblad_thermal, propagator, squeezed_v_closed, thermal_v_closed, BathParams};
use lindblad_esd::{ComplexMatrix, C64};
use num::traits::{ToPrimitive, Zero};
use num::{BigInt, BigRational, Complex};

type Q = Complex<BigRational>;

const ORDER: usize = 60;

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite entry")
}

fn to_exact(m: &ComplexMatrix) -> Vec<Vec<Q>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| Q::new(exact(m[(i, j)].re), exact(m[(i, j)].im))).collect())
        .collect()
}

fn matmul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Q::zero();
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc = acc + a[i][k].clone() * b[k][j].clone();
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn taylor_exp(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let lt = to_exact(a);
    let one = Q::new(BigRational::from_integer(BigInt::from(1)), BigRational::zero());
    let mut term: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| if i == j { one.clone() } else { Q::zero() }).collect()).collect();
    let mut sum = term.clone();
    for k in 1..=ORDER {
        let inv_k = BigRational::new(BigInt::from(1), BigInt::from(k));
        term = matmul(&term, &lt)
            .into_iter()
            .map(|row| row.into_iter().map(|z| Q::new(z.re * inv_k.clone(), z.im * inv_k.clone())).collect())
            .collect();
        for i in 0..n {
            for j in 0..n {
                sum[i][j] = sum[i][j].clone() + term[i][j].clone();
            }
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| C64::new(sum[i][j].re.to_f64().unwrap(), sum[i][j].im.to_f64().unwrap()))
}

#[test]
fn thermal_closed_form_matches_exact_series() {
    for (gamma, n) in [(1.0, 0.0), (0.5, 1.0), (2.0, 3.0)] {
        let p = BathParams::thermal(gamma, n).unwrap();
        let l = lindblad_thermal(&p).unwrap();
        let rate = p.relaxation_rate();
        for t in [0.05, 1.0] {
            let t = t * 2.0 / rate;
            let oracle = taylor_exp(&l.matrix().scale_real(t));
            let closed = thermal_v_closed(&p, t).unwrap();
            let numeric = propagator(&l, t).unwrap();
            assert!(closed.matrix().max_abs_diff(&oracle) <= 1e-13, "gamma={gamma} N={n} t={t}");
            assert!(numeric.matrix().max_abs_diff(&oracle) <= 1e-13, "gamma={gamma} N={n} t={t}");
        }
    }
}

#[test]
fn thermal_propagator_reference_point() {
    let p = BathParams::thermal(1.0, 1.0).unwrap();
    let l = lindblad_thermal(&p).unwrap();
    let oracle = taylor_exp(&l.matrix().scale_real(0.3));
    assert!(propagator(&l, 0.3).unwrap().matrix().max_abs_diff(&oracle) <= 1e-12);
}

#[test]
fn squeezed_closed_form_matches_exact_series() {
    for (n_th, r, phi) in [(0.0, 0.3, 0.0), (0.5, 0.6, 0.9)] {
        let p = BathParams::squeezed(1.0, n_th, r, phi).unwrap();
        let l = lindblad_squeezed(&p).unwrap();
        for t in [0.1, 0.5] {
            let t = t / p.relaxation_rate();
            let oracle = taylor_exp(&l.matrix().scale_real(t));
            let closed = squeezed_v_closed(&p, t).unwrap();
            assert!(closed.matrix().max_abs_diff(&oracle) <= 1e-12, "N_th={n_th} r={r} phi={phi} t={t}");
            assert!(propagator(&l, t).unwrap().matrix().max_abs_diff(&oracle) <= 1e-13);
        }
    }
}
