//! Entanglement quantifiers and separability tests.

use serde::Serialize;

use crate::channels::{apply_to_subsystem, choi, Superoperator};
use crate::error::{Error, Result};
use crate::matlin::{
    herm_eig, herm_eigvals, kron, eigvals_general, partial_transpose_dims, pauli, singular_values, ComplexMatrix,
    C64, ZERO,
};
use crate::states::{DensityMatrix, PureState};

/// Default tolerance for PPT decisions.
pub const PPT_TOL: f64 = 1e-10;

/// Eigenvalues of `rho` below this fraction of the largest are treated as zero
/// when factoring `rho = W W^dagger`.
const RANK_TOL: f64 = 1e-14;

/// Two-qubit (or `d ⊗ 2` pure) concurrence.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Concurrence(f64);

impl Concurrence {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Concurrence> for f64 {
    fn from(c: Concurrence) -> f64 {
        c.0
    }
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::ShapeMismatch(format!("expected a 2⊗2 state, got dims {:?}", rho.dims())));
    }
    Ok(())
}

fn spin_flip() -> ComplexMatrix {
    let sy = pauli::sigma_y();
    kron(&sy, &sy)
}

fn wootters(roots: &mut [f64]) -> Concurrence {
    roots.sort_by(|a, b| b.total_cmp(a));
    let c = roots[0] - roots[1..].iter().sum::<f64>();
    Concurrence(c.max(0.0))
}

/// Wootters concurrence of a two-qubit state.
///
/// The square roots of the spectrum of `rho (sy⊗sy) rho^* (sy⊗sy)` are
/// obtained as the singular values of `W^T (sy⊗sy) W` with `rho = W W^dagger`,
/// which keeps roundoff-level eigenvalues of a rank-deficient `rho` from
/// turning into `sqrt(eps)` errors.
pub fn concurrence(rho: &DensityMatrix) -> Result<Concurrence> {
    require_two_qubits(rho)?;
    let (vals, vecs) = herm_eig(rho.matrix())?;
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<usize> = (0..4).filter(|&k| vals[k] > RANK_TOL * top).collect();
    if kept.is_empty() {
        return Ok(Concurrence(0.0));
    }
    let w = ComplexMatrix::from_fn(4, kept.len(), |i, j| vecs[(i, kept[j])] * vals[kept[j]].sqrt());
    let tau = &(&w.transpose() * &spin_flip()) * &w;
    let mut roots = singular_values(&tau);
    roots.resize(4, 0.0);
    Ok(wootters(&mut roots))
}

/// Concurrence from the non-Hermitian spectrum of `rho rho~`, negative and
/// roundoff-level eigenvalues clamped to zero. Slower and less accurate on
/// rank-deficient states than [`concurrence`]; kept as a cross-check.
pub fn concurrence_spin_flip_spectrum(rho: &DensityMatrix) -> Result<Concurrence> {
    require_two_qubits(rho)?;
    let yy = spin_flip();
    let tilde = &(&yy * &rho.matrix().conj()) * &yy;
    let product = rho.matrix() * &tilde;
    let eig = eigvals_general(&product)?;
    let scale = product.frobenius_norm().max(1.0);
    let mut roots = Vec::with_capacity(4);
    for z in eig {
        if z.im.abs() > 1e-8 * scale {
            return Err(Error::InvalidState(format!("rho rho~ has a complex eigenvalue {z}")));
        }
        roots.push(if z.re < 1e-10 { 0.0 } else { z.re.sqrt() });
    }
    Ok(wootters(&mut roots))
}

fn require_d2(dims: &[usize]) -> Result<usize> {
    if dims.len() != 2 || dims[1] != 2 || dims[0] < 2 {
        return Err(Error::ShapeMismatch(format!("expected a d⊗2 system, got dims {dims:?}")));
    }
    Ok(dims[0])
}

/// Pure-state concurrence `2 s_1 s_2` of a `d ⊗ 2` state.
pub fn concurrence_pure_d2(chi: &PureState) -> Result<Concurrence> {
    require_d2(chi.dims())?;
    let norm = chi.norm();
    if (norm - 1.0).abs() > crate::states::NORM_TOL {
        return Err(Error::InvalidState(format!("state norm {norm} differs from 1")));
    }
    // s_1^2 s_2^2 = det(C^dagger C) for the d x 2 coefficient matrix C
    let cm = chi.coefficient_matrix();
    let gram = &cm.adjoint() * &cm;
    let det = (gram[(0, 0)] * gram[(1, 1)] - gram[(0, 1)] * gram[(1, 0)]).re;
    Ok(Concurrence(2.0 * det.max(0.0).sqrt()))
}

/// Isometry `W` (2 x d) whose rows are the side-A Schmidt vectors of `chi`.
pub fn schmidt_isometry(chi: &PureState) -> Result<ComplexMatrix> {
    let d = require_d2(chi.dims())?;
    let cm = chi.coefficient_matrix();
    let gram = &cm.adjoint() * &cm;
    let (vals, vecs) = herm_eig(&gram)?;
    let top = vals[1].max(0.0);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(2);
    for k in [1, 0] {
        if vals[k] <= 1e-24 * top.max(1e-300) || vals[k] <= 0.0 {
            continue;
        }
        let v = vecs.column(k);
        let s = vals[k].sqrt();
        let u: Vec<C64> = (0..d).map(|a| (cm[(a, 0)] * v[0] + cm[(a, 1)] * v[1]) / s).collect();
        push_orthonormal(&mut basis, u);
    }
    let mut e = 0;
    while basis.len() < 2 {
        let mut u = vec![ZERO; d];
        u[e] = C64::new(1.0, 0.0);
        push_orthonormal(&mut basis, u);
        e += 1;
    }
    Ok(ComplexMatrix::from_fn(2, d, |i, a| basis[i][a].conj()))
}

fn push_orthonormal(basis: &mut Vec<Vec<C64>>, mut u: Vec<C64>) {
    for b in basis.iter() {
        let dot: C64 = b.iter().zip(&u).map(|(x, y)| x.conj() * y).sum();
        for (x, y) in u.iter_mut().zip(b) {
            *x -= dot * y;
        }
    }
    let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 1e-8 {
        basis.push(u.into_iter().map(|z| z / norm).collect());
    }
}

/// Compresses side A of a `d ⊗ 2` state through the isometry `W`: `(W⊗I) rho (W^dagger⊗I)`.
pub fn compress_side_a(rho: &DensityMatrix, isometry: &ComplexMatrix) -> Result<DensityMatrix> {
    let d = require_d2(rho.dims())?;
    if isometry.rows() != 2 || isometry.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: isometry.cols() });
    }
    let lift = kron(isometry, &ComplexMatrix::identity(2));
    let out = &(&lift * rho.matrix()) * &lift.adjoint();
    Ok(DensityMatrix::from_parts_unchecked(vec![2, 2], out))
}

/// The three concurrences entering the factorization law for a `d ⊗ 2` pure
/// state and a qubit channel on side B.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FactorizationTerms {
    /// `C((I⊗V)|chi><chi|)`.
    pub evolved: f64,
    /// `C(|chi>)`.
    pub initial: f64,
    /// `C(choi(V))`.
    pub channel: f64,
    /// `|evolved - initial * channel|`.
    pub residual: f64,
}

pub fn factorization_terms(chi: &PureState, v: &Superoperator) -> Result<FactorizationTerms> {
    let d = require_d2(chi.dims())?;
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: v.dim() });
    }
    let evolved_state = apply_to_subsystem(v, &chi.to_density(), 1)?;
    let two_qubit = if d == 2 { evolved_state } else { compress_side_a(&evolved_state, &schmidt_isometry(chi)?)? };
    let evolved = concurrence(&two_qubit)?.value();
    let initial = concurrence_pure_d2(chi)?.value();
    let channel = concurrence(&choi(v))?.value();
    Ok(FactorizationTerms { evolved, initial, channel, residual: (evolved - initial * channel).abs() })
}

/// `|C((I⊗V)chi) - C(chi) C(choi(V))|`.
pub fn factorization_residual(chi: &PureState, v: &Superoperator) -> Result<f64> {
    factorization_terms(chi, v).map(|t| t.residual)
}

/// Spectrum of the partial transpose over the factors in `subset`, ascending.
pub fn pt_spectrum_across(rho: &DensityMatrix, subset: &[usize]) -> Result<Vec<f64>> {
    if subset.is_empty() {
        return Err(Error::EmptySelection);
    }
    let pt = partial_transpose_dims(rho.matrix(), rho.dims(), subset)?;
    herm_eigvals(&pt)
}

/// Smallest eigenvalue of the partial transpose on factor `cut`.
pub fn min_pt_eigenvalue(rho: &DensityMatrix, cut: usize) -> Result<f64> {
    Ok(pt_spectrum_across(rho, &[cut])?[0])
}

pub fn is_ppt(rho: &DensityMatrix, cut: usize, tol: f64) -> Result<bool> {
    Ok(min_pt_eigenvalue(rho, cut)? >= -tol)
}

/// Sum of the magnitudes of the negative partial-transpose eigenvalues on factor `cut`.
pub fn negativity(rho: &DensityMatrix, cut: usize) -> Result<f64> {
    negativity_across(rho, &[cut])
}

/// Negativity for the bipartition `subset : rest`.
pub fn negativity_across(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    let spec = pt_spectrum_across(rho, subset)?;
    Ok(spec.iter().filter(|&&x| x < 0.0).map(|x| -x).sum())
}

fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Entanglement of formation (bits) as a function of the concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence(rho)?.value()))
}

/// Two-qubit X-shaped matrix with its `|00><11|` coherence held as a
/// log-magnitude, so separability can be decided after the coherence has
/// underflowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XForm {
    diag: [f64; 4],
    inner: C64,
    outer_ln_abs: f64,
}

/// Partial-transpose diagnostics of an [`XForm`] on the second qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PtProbe {
    /// `min over blocks of ln(p q) - ln|c|^2`; negative iff the partial transpose has a negative eigenvalue.
    pub log_margin: f64,
    pub min_eigenvalue: f64,
    /// `ln|min_eigenvalue|`, finite even when `min_eigenvalue` underflows.
    pub min_eigenvalue_ln_abs: f64,
}

impl XForm {
    /// Reads an X-shaped two-qubit matrix; entries outside the X must vanish.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        require_two_qubits(rho)?;
        let m = rho.matrix();
        let scale = m.sup_norm();
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 && m[(i, j)].norm() > 1e-12 * scale {
                    return Err(Error::InvalidState(format!("entry ({i},{j}) breaks the X shape")));
                }
            }
        }
        Ok(Self {
            diag: [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re],
            inner: m[(1, 2)],
            outer_ln_abs: m[(0, 3)].norm().ln(),
        })
    }

    /// Replaces `ln|rho_{00,11}|` with an analytically known value.
    pub fn with_outer_ln_abs(mut self, ln_abs: f64) -> Self {
        self.outer_ln_abs = ln_abs;
        self
    }

    pub fn diagonal(&self) -> [f64; 4] {
        self.diag
    }

    pub fn outer_ln_abs(&self) -> f64 {
        self.outer_ln_abs
    }

    pub fn inner(&self) -> C64 {
        self.inner
    }

    /// Partial transpose on qubit B: the `{00, 11}` block carries the inner
    /// coherence and the `{01, 10}` block the outer one.
    pub fn pt_probe(&self) -> PtProbe {
        let [d0, d1, d2, d3] = self.diag;
        let a = block_probe(d0, d3, self.inner.norm().ln());
        let b = block_probe(d1, d2, self.outer_ln_abs);
        let lower = if signed_less(&a, &b) { a } else { b };
        PtProbe {
            log_margin: a.log_margin.min(b.log_margin),
            min_eigenvalue: lower.min_eigenvalue,
            min_eigenvalue_ln_abs: lower.min_eigenvalue_ln_abs,
        }
    }
}

fn block_probe(p: f64, q: f64, ln_c: f64) -> PtProbe {
    if ln_c == f64::NEG_INFINITY {
        let m = p.min(q);
        return PtProbe { log_margin: f64::INFINITY, min_eigenvalue: m, min_eigenvalue_ln_abs: m.ln() };
    }
    let c = ln_c.exp();
    let margin = if p <= 0.0 || q <= 0.0 { f64::NEG_INFINITY } else { p.ln() + q.ln() - 2.0 * ln_c };
    let top = 0.5 * (p + q) + (0.5 * (p - q)).hypot(c);
    let ln_top = if top > 0.0 { top.ln() } else { ln_c };
    let ln_abs = 2.0 * ln_c + margin.exp_m1().abs().ln() - ln_top;
    let min_eigenvalue = if top > 0.0 { (p * q - c * c) / top } else { 0.0 };
    let sign = if margin < 0.0 { -1.0 } else { 1.0 };
    let min_eigenvalue = if min_eigenvalue == 0.0 { sign * ln_abs.exp() } else { min_eigenvalue };
    PtProbe { log_margin: margin, min_eigenvalue, min_eigenvalue_ln_abs: ln_abs }
}

/// Orders probes by their signed minimum eigenvalue using the log magnitude.
fn signed_less(a: &PtProbe, b: &PtProbe) -> bool {
    let neg_a = a.log_margin < 0.0;
    let neg_b = b.log_margin < 0.0;
    match (neg_a, neg_b) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.min_eigenvalue_ln_abs >= b.min_eigenvalue_ln_abs,
        (false, false) => a.min_eigenvalue_ln_abs <= b.min_eigenvalue_ln_abs,
    }
}
