//! Pure and mixed states on composite systems.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matlin::{self, herm_eigvals, ComplexMatrix, C64, HERMITICITY_TOL, ONE, ZERO};

/// Trace tolerance for [`DensityMatrix`] validation.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted by [`DensityMatrix`] validation.
pub const MIN_EIGENVALUE_TOL: f64 = 1e-9;
/// Norm tolerance for [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

/// Positive semidefinite, unit-trace matrix tagged with its subsystem dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-10) and positivity (-1e-9).
    pub fn new(dims: Vec<usize>, mat: ComplexMatrix) -> Result<Self> {
        check_dims(&dims, mat.rows())?;
        mat.require_square()?;
        let deviation = mat.hermiticity_deviation();
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = herm_eigvals(&mat)?[0];
        if min < -MIN_EIGENVALUE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { dims, mat })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.rows());
        Self { dims, mat }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(herm_eigvals(&self.mat)?[0])
    }

    pub fn partial_transpose(&self, cut: usize) -> Result<ComplexMatrix> {
        matlin::partial_transpose(self, cut)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        matlin::partial_trace(self, keep)
    }

    /// `U rho U^dagger` for a unitary on the full space.
    pub fn transform(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        Ok(Self::from_parts_unchecked(self.dims.clone(), self.mat.conjugate_by(u)?))
    }

    /// Checks the type invariants without consuming the value.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.dims.clone(), self.mat.clone()).map(|_| ())
    }
}

/// Unit vector on a composite system.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    vec: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, vec: Vec<C64>) -> Result<Self> {
        check_dims(&dims, vec.len())?;
        let norm = vec_norm(&vec);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { dims, vec })
    }

    /// Rescales `vec` to unit norm.
    pub fn normalized(dims: Vec<usize>, mut vec: Vec<C64>) -> Result<Self> {
        check_dims(&dims, vec.len())?;
        let norm = vec_norm(&vec);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for z in &mut vec {
            *z /= norm;
        }
        Ok(Self { dims, vec })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.vec
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.vec)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_parts_unchecked(self.dims.clone(), ComplexMatrix::outer(&self.vec, &self.vec))
    }

    /// `U |psi>` for a unitary on the full space.
    pub fn transform(&self, u: &ComplexMatrix) -> Result<PureState> {
        let v = u.matvec(&self.vec)?;
        PureState::normalized(self.dims.clone(), v)
    }

    /// Amplitudes reshaped as a `dims[0] x (rest)` coefficient matrix.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        let rows = self.dims[0];
        let cols = self.vec.len() / rows;
        ComplexMatrix::from_vec(rows, cols, self.vec.clone()).expect("dims checked at construction")
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_dims(dims: &[usize], n: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != n {
        return Err(Error::ShapeMismatch(format!("dims {dims:?} do not match dimension {n}")));
    }
    Ok(())
}

/// `(|00> + |11>) / sqrt(2)`.
pub fn bell_phi_plus() -> PureState {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState { dims: vec![2, 2], vec: vec![h, ZERO, ZERO, h] }
}

/// `sqrt(p)|00> + sqrt(1-p)|11>` on a `d ⊗ 2` system.
pub fn schmidt_pure(p: f64, d: usize) -> Result<PureState> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("Schmidt weight p = {p} must lie in (0, 1)")));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("side A dimension {d} must be at least 2")));
    }
    let mut vec = vec![ZERO; 2 * d];
    vec[0] = C64::new(p.sqrt(), 0.0);
    vec[3] = C64::new((1.0 - p).sqrt(), 0.0);
    Ok(PureState { dims: vec![d, 2], vec })
}

/// Two-qubit state supported on the diagonal and anti-diagonal.
///
/// `anti[0]` is the `|01><10|` coherence and `anti[1]` the `|00><11|` coherence.
pub fn x_state(diag: [f64; 4], anti: [C64; 2]) -> Result<DensityMatrix> {
    if diag.iter().any(|&d| d < 0.0 || !d.is_finite()) {
        return Err(Error::InvalidState(format!("diagonal {diag:?} must be non-negative")));
    }
    let sum: f64 = diag.iter().sum();
    if (sum - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("diagonal sums to {sum}, not 1")));
    }
    let slack = 1e-12;
    if anti[0].norm_sqr() > diag[1] * diag[2] + slack {
        return Err(Error::InvalidState("|rho_{01,10}|^2 exceeds rho_{01,01} rho_{10,10}".into()));
    }
    if anti[1].norm_sqr() > diag[0] * diag[3] + slack {
        return Err(Error::InvalidState("|rho_{00,11}|^2 exceeds rho_{00,00} rho_{11,11}".into()));
    }
    let mut m = ComplexMatrix::from_real_diag(&diag);
    m[(1, 2)] = anti[0];
    m[(2, 1)] = anti[0].conj();
    m[(0, 3)] = anti[1];
    m[(3, 0)] = anti[1].conj();
    Ok(DensityMatrix::from_parts_unchecked(vec![2, 2], m))
}

/// `(|0...0> + |1...1>) / sqrt(2)` on `n` qubits.
pub fn ghz(n: usize) -> PureState {
    let dim = 1 << n;
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut vec = vec![ZERO; dim];
    vec[0] = h;
    vec[dim - 1] = h;
    PureState { dims: vec![2; n], vec }
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w_state(n: usize) -> PureState {
    let dim = 1 << n;
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut vec = vec![ZERO; dim];
    for k in 0..n {
        vec[1 << k] = amp;
    }
    PureState { dims: vec![2; n], vec }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random pure state, deterministic in `seed`.
pub fn random_pure(dims: &[usize], seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_with(dims, &mut rng)
}

fn random_pure_with(dims: &[usize], rng: &mut ChaCha8Rng) -> PureState {
    assert!(!dims.is_empty(), "dims must be nonempty");
    let n: usize = dims.iter().product();
    let vec: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    PureState::normalized(dims.to_vec(), vec).expect("Gaussian vector is nonzero")
}

/// Full-rank mixed state built by mixing `dim` Haar-random pure states with
/// uniformly drawn weights; deterministic in `seed`.
pub fn random_density(dims: &[usize], seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = dims.iter().product();
    let weights: Vec<f64> = (0..n).map(|_| rand::Rng::random::<f64>(&mut rng) + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut mat = ComplexMatrix::zeros(n, n);
    for w in weights {
        let psi = random_pure_with(dims, &mut rng);
        let proj = ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes());
        mat = &mat + &proj.scale_real(w / total);
    }
    DensityMatrix::from_parts_unchecked(dims.to_vec(), mat.hermitian_part())
}

/// Haar-random unitary via Gram-Schmidt on a complex Ginibre matrix.
pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| complex_normal(&mut rng)).collect();
        for c in &cols {
            let dot: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= dot * y;
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Product of the local unitaries, one per subsystem.
pub fn local_unitary(factors: &[ComplexMatrix]) -> ComplexMatrix {
    matlin::kron_all(factors)
}

/// Basis ket `|k>` of dimension `d`.
pub fn basis_vector(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[k] = ONE;
    v
}
