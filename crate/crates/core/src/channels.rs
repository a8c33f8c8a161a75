//! Single-qubit bath channels.
//!
//! Three reservoir models are provided: a thermal bath with mean occupation
//! `N`, a squeezed thermal bath, and a QND (pure dephasing) coupling. Each
//! is available as a Lindblad generator (thermal, squeezed) and as a closed
//! form propagator `V(t)`. The Hamiltonian part of the evolution is omitted
//! throughout; only the dissipator is modeled.
//!
//! Superoperators act on row-major vectorized density matrices: for a qubit
//! the component order is `(rho00, rho01, rho10, rho11)` with `|0>` the
//! ground state.

use serde::Serialize;

use crate::entanglement::{min_pt_eigenvalue, PPT_TOL};
use crate::error::{Error, Result};
use crate::matlin::{expm, kron, pauli, ComplexMatrix, C64, ONE, ZERO};
use crate::states::DensityMatrix;

const RELATION_TOL: f64 = 1e-12;

/// Physical parameters of a local bath.
///
/// `gamma` is the decay rate (`gamma_0` for the squeezed bath), `n_mean` the
/// effective occupation `N`, `n_th` the thermal photon number, `r` and `phi`
/// the squeezing magnitude and phase, `omega` the qubit frequency (only
/// enters as coherence phases `e^{-+ i omega t}`), and `squeeze_phase` the
/// phase carried by the cross-coherence term of the closed-form squeezed
/// propagator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BathParams {
    gamma: f64,
    n_mean: f64,
    n_th: f64,
    r: f64,
    phi: f64,
    omega: f64,
    squeeze_phase: f64,
}

impl BathParams {
    /// Thermal bath: `N = N_th`, no squeezing.
    pub fn thermal(gamma: f64, n_mean: f64) -> Result<Self> {
        Self::squeezed(gamma, n_mean, 0.0, 0.0)
    }

    /// Squeezed thermal bath; `N` follows from `2N + 1 = cosh(2r)(2N_th + 1)`.
    pub fn squeezed(gamma: f64, n_th: f64, r: f64, phi: f64) -> Result<Self> {
        let n_mean = 0.5 * ((2.0 * r).cosh() * (2.0 * n_th + 1.0) - 1.0);
        let p = Self { gamma, n_mean, n_th, r, phi, omega: 0.0, squeeze_phase: -phi };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from independently supplied fields, checking every
    /// defining relation. Missing `n_mean`/`n_th` are derived from the other.
    pub fn from_fields(
        gamma: f64,
        n_mean: Option<f64>,
        n_th: Option<f64>,
        r: f64,
        phi: f64,
        omega: f64,
    ) -> Result<Self> {
        check_finite("r", r)?;
        if r < 0.0 {
            return Err(Error::InvalidParams(format!("squeezing magnitude r = {r} must be >= 0")));
        }
        let c = (2.0 * r).cosh();
        let (n_mean, n_th) = match (n_mean, n_th) {
            (Some(n), Some(nt)) => (n, nt),
            (Some(n), None) => (n, 0.5 * ((2.0 * n + 1.0) / c - 1.0)),
            (None, Some(nt)) => (0.5 * (c * (2.0 * nt + 1.0) - 1.0), nt),
            (None, None) => (0.5 * (c - 1.0), 0.0),
        };
        let p = Self { gamma, n_mean, n_th, r, phi, omega, squeeze_phase: -phi };
        p.validate()?;
        Ok(p)
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// Overrides the cross-coherence phase of the closed-form squeezed propagator.
    pub fn with_squeeze_phase(mut self, phase: f64) -> Self {
        self.squeeze_phase = phase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("N", self.n_mean),
            ("N_th", self.n_th),
            ("r", self.r),
            ("phi", self.phi),
            ("omega", self.omega),
            ("squeeze phase", self.squeeze_phase),
        ] {
            check_finite(name, v)?;
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParams(format!("decay rate gamma = {} must be > 0", self.gamma)));
        }
        if self.n_mean < 0.0 {
            return Err(Error::InvalidParams(format!("mean occupation N = {} must be >= 0", self.n_mean)));
        }
        if self.n_th < 0.0 {
            return Err(Error::InvalidParams(format!("thermal photon number N_th = {} must be >= 0", self.n_th)));
        }
        if self.r < 0.0 {
            return Err(Error::InvalidParams(format!("squeezing magnitude r = {} must be >= 0", self.r)));
        }
        let lhs = 2.0 * self.n_mean + 1.0;
        let rhs = (2.0 * self.r).cosh() * (2.0 * self.n_th + 1.0);
        if (lhs - rhs).abs() > RELATION_TOL * lhs.max(1.0) {
            return Err(Error::InvalidParams(format!(
                "relation 2N+1 = cosh(2r)(2N_th+1) violated: 2N+1 = {lhs}, cosh(2r)(2N_th+1) = {rhs}"
            )));
        }
        if self.a() > lhs * (1.0 + RELATION_TOL) {
            return Err(Error::InvalidParams(format!(
                "relation a = sinh(2r)(2N_th+1) <= 2N+1 violated: a = {}, 2N+1 = {lhs}",
                self.a()
            )));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_mean(&self) -> f64 {
        self.n_mean
    }

    pub fn n_th(&self) -> f64 {
        self.n_th
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn squeeze_phase(&self) -> f64 {
        self.squeeze_phase
    }

    /// `a = sinh(2r)(2N_th + 1)`, twice the magnitude of the anomalous correlation.
    pub fn a(&self) -> f64 {
        (2.0 * self.r).sinh() * (2.0 * self.n_th + 1.0)
    }

    /// Anomalous bath correlation `M = -sinh(2r) e^{i phi} (2N_th + 1) / 2`.
    pub fn m(&self) -> C64 {
        C64::from_polar(-0.5 * self.a(), self.phi)
    }

    /// Population relaxation rate `gamma (2N + 1)`.
    pub fn relaxation_rate(&self) -> f64 {
        self.gamma * (2.0 * self.n_mean + 1.0)
    }

    /// Coherence decay factor `x = exp(-gamma (2N + 1) t / 2)`.
    pub fn x(&self, t: f64) -> f64 {
        (-0.5 * self.relaxation_rate() * t).exp()
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} = {v} is not finite")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::NegativeTime(t))
    } else {
        Ok(())
    }
}

/// Linear map on vectorized `d x d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, mat: ComplexMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if mat.rows() != d2 || mat.cols() != d2 {
            return Err(Error::ShapeMismatch(format!(
                "a superoperator on dimension {dim} needs a {d2}x{d2} matrix, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, mat: ComplexMatrix::identity(dim * dim) }
    }

    /// `rho -> tr(rho) I / d`.
    pub fn completely_depolarizing(dim: usize) -> Self {
        let d2 = dim * dim;
        let mut mat = ComplexMatrix::zeros(d2, d2);
        let w = C64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            for k in 0..dim {
                mat[(i * dim + i, k * dim + k)] = w;
            }
        }
        Self { dim, mat }
    }

    /// `rho -> (1 - p) rho + p tr(rho) I / d`.
    pub fn depolarizing(dim: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("depolarizing weight {p} outside [0, 1]")));
        }
        let id = Self::identity(dim);
        let dep = Self::completely_depolarizing(dim);
        Ok(Self { dim, mat: &id.mat.scale_real(1.0 - p) + &dep.mat.scale_real(p) })
    }

    /// Superoperator of `rho -> a rho b` (`a ⊗ b^T` in row-major vectorization).
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        let dim = a.require_square()?;
        if b.rows() != dim || b.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: b.rows() });
        }
        Ok(Self { dim, mat: kron(a, &b.transpose()) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Applies the map to a `d x d` matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.rows() });
        }
        let out = self.mat.matvec(&rho.vectorize())?;
        ComplexMatrix::unvectorize(self.dim, out)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Superoperator) -> Result<Superoperator> {
        if first.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: first.dim });
        }
        Ok(Self { dim: self.dim, mat: self.mat.matmul(&first.mat)? })
    }

    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(Self { dim: self.dim, mat: &self.mat + &other.mat })
    }

    pub fn scale(&self, s: C64) -> Superoperator {
        Self { dim: self.dim, mat: self.mat.scale(s) }
    }

    /// Largest deviation `|tr(V(E_kl)) - tr(E_kl)|` over the matrix units `E_kl`.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for k in 0..d {
            for l in 0..d {
                let col = k * d + l;
                let tr: C64 = (0..d).map(|i| self.mat[(i * d + i, col)]).sum();
                let expected = if k == l { ONE } else { ZERO };
                worst = worst.max((tr - expected).norm());
            }
        }
        worst
    }

    /// Same as [`trace_preservation_error`](Self::trace_preservation_error) for a generator (expects zero).
    pub fn trace_annihilation_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for col in 0..d * d {
            let tr: C64 = (0..d).map(|i| self.mat[(i * d + i, col)]).sum();
            worst = worst.max(tr.norm());
        }
        worst
    }
}

/// `D[L] rho = L rho L^dagger - (L^dagger L rho + rho L^dagger L) / 2`.
fn dissipator(l: &ComplexMatrix) -> Superoperator {
    let d = l.rows();
    let ldl = &l.adjoint() * l;
    let id = ComplexMatrix::identity(d);
    let jump = kron(l, &l.conj());
    let anti = &kron(&ldl, &id) + &kron(&id, &ldl.transpose());
    Superoperator { dim: d, mat: &jump - &anti.scale_real(0.5) }
}

/// Generator of the thermal-bath master equation
/// `gamma (N+1) D[sigma_-] + gamma N D[sigma_+]`.
pub fn lindblad_thermal(params: &BathParams) -> Result<Superoperator> {
    params.validate()?;
    let g = params.gamma();
    let n = params.n_mean();
    let decay = dissipator(&pauli::sigma_minus()).scale(C64::new(g * (n + 1.0), 0.0));
    let pump = dissipator(&pauli::sigma_plus()).scale(C64::new(g * n, 0.0));
    decay.add(&pump)
}

/// Generator of the squeezed-bath master equation: the thermal dissipators at
/// occupation `N` plus the anomalous terms
/// `-gamma_0 M sigma_+ rho sigma_+ - gamma_0 M^* sigma_- rho sigma_-`.
pub fn lindblad_squeezed(params: &BathParams) -> Result<Superoperator> {
    let thermal = lindblad_thermal(params)?;
    let g = params.gamma();
    let m = params.m();
    let sp = pauli::sigma_plus();
    let sm = pauli::sigma_minus();
    let up = Superoperator::sandwich(&sp, &sp)?.scale(-m * g);
    let down = Superoperator::sandwich(&sm, &sm)?.scale(-m.conj() * g);
    thermal.add(&up)?.add(&down)
}

/// `V(t) = exp(L t)`.
pub fn propagator(l: &Superoperator, t: f64) -> Result<Superoperator> {
    check_time(t)?;
    Ok(Superoperator { dim: l.dim, mat: expm(&l.mat.scale_real(t))? })
}

/// Closed-form thermal propagator.
///
/// Populations relax at rate `gamma (2N+1)` towards the Gibbs state with
/// excited population `N / (2N+1)`; coherences decay as `x`.
pub fn thermal_v_closed(params: &BathParams, t: f64) -> Result<Superoperator> {
    check_time(t)?;
    params.validate()?;
    let n = params.n_mean();
    let x = params.x(t);
    let x2 = x * x;
    let w = 2.0 * n + 1.0;
    let one_minus = -(-params.relaxation_rate() * t).exp_m1();
    let stay_ground = (n + 1.0 + n * x2) / w;
    let up = n * one_minus / w;
    let down = (n + 1.0) * one_minus / w;
    let stay_excited = (n + (n + 1.0) * x2) / w;
    let mat = ComplexMatrix::from_real(
        4,
        4,
        &[
            stay_ground, 0.0, 0.0, down, //
            0.0, x, 0.0, 0.0, //
            0.0, 0.0, x, 0.0, //
            up, 0.0, 0.0, stay_excited,
        ],
    )?;
    Ok(Superoperator { dim: 2, mat })
}

/// Entries of the closed-form squeezed propagator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezedCoefficients {
    /// `|0><0| -> |0><0|` weight.
    pub ground_to_ground: f64,
    /// `|1><1| -> |0><0|` weight.
    pub excited_to_ground: f64,
    /// `|0><0| -> |1><1|` weight.
    pub ground_to_excited: f64,
    /// `|1><1| -> |1><1|` weight.
    pub excited_to_excited: f64,
    /// `rho01 -> rho01` weight, `cosh(gamma_0 a t / 2) x`.
    pub coherence_direct: f64,
    /// Magnitude of the `rho10 -> rho01` weight, `sinh(gamma_0 a t / 2) x`.
    pub coherence_cross: f64,
}

impl SqueezedCoefficients {
    pub fn new(params: &BathParams, t: f64) -> Result<Self> {
        check_time(t)?;
        params.validate()?;
        let n = params.n_mean();
        let w = 2.0 * n + 1.0;
        let rate = params.relaxation_rate();
        let x2 = (-rate * t).exp();
        let one_minus = -(-rate * t).exp_m1();
        let half_a = 0.5 * params.gamma() * params.a() * t;
        let half_rate = 0.5 * rate * t;
        // x cosh(s) and x sinh(s) without overflowing the hyperbolic factors
        let grow = (half_a - half_rate).exp();
        let shrink = (-half_a - half_rate).exp();
        Ok(Self {
            ground_to_ground: (n * (1.0 + x2) + 1.0) / w,
            excited_to_ground: (n + 1.0) * one_minus / w,
            ground_to_excited: n * one_minus / w,
            excited_to_excited: (n * (1.0 + x2) + x2) / w,
            coherence_direct: 0.5 * (grow + shrink),
            coherence_cross: 0.5 * (grow - shrink),
        })
    }
}

/// Closed-form squeezed-bath propagator, including the free phases `e^{-+ i omega t}`.
pub fn squeezed_v_closed(params: &BathParams, t: f64) -> Result<Superoperator> {
    let c = SqueezedCoefficients::new(params, t)?;
    let rot = C64::from_polar(1.0, -params.omega() * t);
    let z = C64::from_polar(c.coherence_cross, params.squeeze_phase());
    let y = C64::new(c.coherence_direct, 0.0);
    let re = |v: f64| C64::new(v, 0.0);
    let mat = ComplexMatrix::from_vec(
        4,
        4,
        vec![
            re(c.ground_to_ground), ZERO, ZERO, re(c.excited_to_ground), //
            ZERO, y * rot, z * rot, ZERO, //
            ZERO, z.conj() * rot.conj(), y * rot.conj(), ZERO, //
            re(c.ground_to_excited), ZERO, ZERO, re(c.excited_to_excited),
        ],
    )?;
    Ok(Superoperator { dim: 2, mat })
}

/// Diagonal phase map `rho01 -> e^{-i omega t} rho01`, the free evolution the
/// closed forms attach to coherences.
pub fn free_rotation(omega: f64, t: f64) -> Superoperator {
    let rot = C64::from_polar(1.0, -omega * t);
    Superoperator { dim: 2, mat: ComplexMatrix::from_diag(&[ONE, rot, rot.conj(), ONE]) }
}

/// QND dephasing channel: populations frozen, coherences multiplied by
/// `e^{-+ i omega t} e^{-g(t)}` where `g(t)` already contains the `(hbar omega)^2`
/// prefactor.
pub fn qnd_v(omega: f64, g: impl Fn(f64) -> f64, t: f64) -> Result<Superoperator> {
    check_time(t)?;
    let gt = g(t);
    qnd_v_from_exponent(omega, gt, t)
}

/// [`qnd_v`] with the dephasing exponent `g(t)` already evaluated.
pub fn qnd_v_from_exponent(omega: f64, g_t: f64, t: f64) -> Result<Superoperator> {
    check_time(t)?;
    if g_t.is_nan() || g_t < 0.0 {
        return Err(Error::InvalidParams(format!("dephasing exponent g(t) = {g_t} must be >= 0")));
    }
    let c = C64::from_polar((-g_t).exp(), -omega * t);
    Ok(Superoperator { dim: 2, mat: ComplexMatrix::from_diag(&[ONE, c, c.conj(), ONE]) })
}

/// Choi state `(I ⊗ V)(|phi+><phi+|)` with the normalized maximally entangled
/// state, so the result has unit trace for a trace-preserving `V`.
pub fn choi(v: &Superoperator) -> DensityMatrix {
    let d = v.dim;
    let w = 1.0 / d as f64;
    // C[(k,i),(l,j)] = V[(i,j),(k,l)] / d
    let mat = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (k, i) = (row / d, row % d);
        let (l, j) = (col / d, col % d);
        v.mat[(i * d + j, k * d + l)] * w
    });
    DensityMatrix::from_parts_unchecked(vec![d, d], mat)
}

/// Applies `v` to tensor factor `which` of `rho`.
pub fn apply_to_subsystem(v: &Superoperator, rho: &DensityMatrix, which: usize) -> Result<DensityMatrix> {
    let mat = apply_to_factor(v, rho.matrix(), rho.dims(), which)?;
    Ok(DensityMatrix::from_parts_unchecked(rho.dims().to_vec(), mat))
}

pub(crate) fn apply_to_factor(
    v: &Superoperator,
    mat: &ComplexMatrix,
    dims: &[usize],
    which: usize,
) -> Result<ComplexMatrix> {
    if which >= dims.len() {
        return Err(Error::InvalidSubsystem { index: which, count: dims.len() });
    }
    let d = dims[which];
    if d != v.dim {
        return Err(Error::DimensionMismatch { expected: v.dim, found: d });
    }
    let left: usize = dims[..which].iter().product();
    let right: usize = dims[which + 1..].iter().product();
    let n = left * d * right;
    let mut out = ComplexMatrix::zeros(n, n);
    let idx = |a: usize, i: usize, b: usize| (a * d + i) * right + b;
    for a in 0..left {
        for b in 0..right {
            for a2 in 0..left {
                for b2 in 0..right {
                    for k in 0..d {
                        for l in 0..d {
                            let src = mat[(idx(a, k, b), idx(a2, l, b2))];
                            if src == ZERO {
                                continue;
                            }
                            let col = k * d + l;
                            for i in 0..d {
                                for j in 0..d {
                                    let w = v.mat[(i * d + j, col)];
                                    if w != ZERO {
                                        out[(idx(a, i, b), idx(a2, j, b2))] += w * src;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Applies `v` to every tensor factor in turn.
pub fn apply_to_all(v: &Superoperator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut mat = rho.matrix().clone();
    for which in 0..rho.dims().len() {
        mat = apply_to_factor(v, &mat, rho.dims(), which)?;
    }
    Ok(DensityMatrix::from_parts_unchecked(rho.dims().to_vec(), mat))
}

/// True iff the Choi state of the qubit channel `v` is PPT, which for `2 ⊗ 2`
/// is equivalent to separability and hence to `v` being entanglement breaking.
pub fn is_entanglement_breaking(v: &Superoperator, tol: f64) -> Result<bool> {
    if v.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: v.dim });
    }
    Ok(min_pt_eigenvalue(&choi(v), 1)? >= -tol)
}

/// [`is_entanglement_breaking`] at the default PPT tolerance.
pub fn is_entanglement_breaking_default(v: &Superoperator) -> Result<bool> {
    is_entanglement_breaking(v, PPT_TOL)
}
