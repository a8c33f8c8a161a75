//! Entanglement sudden death: Choi separability transitions, closed-form
//! thresholds, squeezed-bath conditions, and multi-qubit certificates.
//!
//! A channel family is NPT at time `t` when the partial transpose of
//! `choi(V(t))` has a negative eigenvalue. All supported families produce
//! X-shaped Choi states, so the decision is made on the scale-free block margin
//! `ln(p q) - ln|c|^2` of [`XForm`], which stays meaningful after coherences
//! have decayed far below the populations.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::channels::{
    apply_to_all, choi, is_entanglement_breaking, qnd_v_from_exponent, squeezed_v_closed, thermal_v_closed,
    BathParams, SqueezedCoefficients, Superoperator,
};
use crate::entanglement::{min_pt_eigenvalue, negativity_across, PtProbe, XForm, PPT_TOL};
use crate::error::{Error, Result};
use crate::states::{ghz, random_pure, w_state, PureState};

/// Default number of points of the geometric scan grid.
pub const DEFAULT_GRID_POINTS: usize = 64;
/// Default bisection precision, in units of `1/gamma`.
pub const DEFAULT_PRECISION: f64 = 1e-8;
/// First scan point as a fraction of the horizon.
const GRID_FLOOR: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;

/// Dephasing exponent `g(t)` of the QND channel (including the `(hbar omega)^2` factor).
#[derive(Clone)]
pub enum DephasingProfile {
    /// `g(t) = scale * t`.
    Linear { scale: f64 },
    /// `g(t) = scale * t^2`.
    Quadratic { scale: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl DephasingProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Linear { scale } => scale * t,
            Self::Quadratic { scale } => scale * t * t,
            Self::Custom(f) => f(t),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Linear { .. } => "linear",
            Self::Quadratic { .. } => "quadratic",
            Self::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for DephasingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear { scale } => write!(f, "Linear {{ scale: {scale} }}"),
            Self::Quadratic { scale } => write!(f, "Quadratic {{ scale: {scale} }}"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A local bath model together with its parameters.
#[derive(Clone, Debug)]
pub enum ChannelFamily {
    Thermal(BathParams),
    Squeezed(BathParams),
    Qnd { omega: f64, profile: DephasingProfile },
}

/// A closed-form ESD time, tagged with where the expression comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormTime {
    pub label: &'static str,
    #[serde(serialize_with = "serialize_time")]
    pub time: Option<f64>,
}

impl ChannelFamily {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Thermal(_) => "thermal",
            Self::Squeezed(_) => "squeezed",
            Self::Qnd { .. } => "qnd",
        }
    }

    pub fn superoperator(&self, t: f64) -> Result<Superoperator> {
        match self {
            Self::Thermal(p) => thermal_v_closed(p, t),
            Self::Squeezed(p) => squeezed_v_closed(p, t),
            Self::Qnd { omega, profile } => qnd_v_from_exponent(*omega, profile.eval(t), t),
        }
    }

    /// Choi state at time `t` in X form. For the QND family the `|00><11|`
    /// coherence is carried as `-g(t) - ln 2` so it never underflows.
    pub fn choi_xform(&self, t: f64) -> Result<XForm> {
        let form = XForm::from_density(&choi(&self.superoperator(t)?))?;
        Ok(match self {
            Self::Qnd { profile, .. } => form.with_outer_ln_abs(-profile.eval(t) - std::f64::consts::LN_2),
            _ => form,
        })
    }

    pub fn pt_probe(&self, t: f64) -> Result<PtProbe> {
        Ok(self.choi_xform(t)?.pt_probe())
    }

    /// Closed-form transition times available for this family.
    pub fn closed_form_times(&self) -> Vec<ClosedFormTime> {
        match self {
            Self::Thermal(p) => vec![
                ClosedFormTime { label: "x-state condition", time: thermal_threshold_x_state(p) },
                ClosedFormTime { label: "printed sinh threshold", time: thermal_threshold_paper(p) },
            ],
            Self::Squeezed(p) if p.r() == 0.0 => {
                vec![ClosedFormTime { label: "x-state condition", time: thermal_threshold_x_state(p) }]
            }
            _ => Vec::new(),
        }
    }
}

/// Bisection endpoints: NPT at `t_low`, PPT at `t_high`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub t_low: f64,
    pub t_high: f64,
    pub log_margin_low: f64,
    pub log_margin_high: f64,
    pub min_pt_eigenvalue_low: f64,
    pub min_pt_eigenvalue_high: f64,
}

/// Outcome of a Choi separability scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EsdReport {
    pub family: &'static str,
    /// First time the Choi state is PPT (`t_high` of the bracket), or `None` ("never") up to the horizon.
    #[serde(serialize_with = "serialize_time")]
    pub transition_time: Option<f64>,
    pub horizon: f64,
    pub precision: f64,
    pub tolerance: f64,
    pub bracket: Option<Bracket>,
    pub min_pt_eigenvalue_at_horizon: f64,
    pub min_pt_eigenvalue_ln_abs_at_horizon: f64,
    pub log_margin_at_horizon: f64,
    pub grid_points: usize,
    pub iterations: usize,
    /// Every scan point after the first PPT point is PPT as well.
    pub single_crossing: bool,
    pub closed_forms: Vec<ClosedFormTime>,
}

impl EsdReport {
    pub fn is_never(&self) -> bool {
        self.transition_time.is_none()
    }
}

pub(crate) fn serialize_time<S: Serializer>(t: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match t {
        Some(v) => s.serialize_f64(*v),
        None => s.serialize_str("never"),
    }
}

/// Scan settings for [`choi_ppt_time_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    pub grid_points: usize,
    /// Relative tolerance on the X-block margin.
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { grid_points: DEFAULT_GRID_POINTS, tol: PPT_TOL }
    }
}

/// First time the Choi state of `family` becomes PPT, bisected to `precision`.
pub fn choi_ppt_time(family: &ChannelFamily, horizon: f64, precision: f64) -> Result<EsdReport> {
    choi_ppt_time_with(family, horizon, precision, ScanOptions::default())
}

pub fn choi_ppt_time_with(
    family: &ChannelFamily,
    horizon: f64,
    precision: f64,
    opts: ScanOptions,
) -> Result<EsdReport> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon {horizon} must be positive and finite")));
    }
    if !(precision > 0.0) {
        return Err(Error::InvalidArgument(format!("precision {precision} must be positive")));
    }
    if opts.grid_points < 2 {
        return Err(Error::InvalidArgument("scan grid needs at least 2 points".into()));
    }
    let is_ppt = |p: &PtProbe| p.log_margin >= -opts.tol;

    let n = opts.grid_points;
    let ratio = GRID_FLOOR.powf(-1.0 / (n - 1) as f64);
    let grid: Vec<f64> = (0..n)
        .map(|k| if k == n - 1 { horizon } else { horizon * GRID_FLOOR * ratio.powi(k as i32) })
        .collect();
    let probes: Vec<PtProbe> = grid.iter().map(|&t| family.pt_probe(t)).collect::<Result<_>>()?;
    let at_horizon = probes[n - 1];

    let first = probes.iter().position(is_ppt);
    let mut report = EsdReport {
        family: family.label(),
        transition_time: None,
        horizon,
        precision,
        tolerance: opts.tol,
        bracket: None,
        min_pt_eigenvalue_at_horizon: at_horizon.min_eigenvalue,
        min_pt_eigenvalue_ln_abs_at_horizon: at_horizon.min_eigenvalue_ln_abs,
        log_margin_at_horizon: at_horizon.log_margin,
        grid_points: n,
        iterations: 0,
        single_crossing: true,
        closed_forms: family.closed_form_times(),
    };
    let Some(first) = first else {
        return Ok(report);
    };
    report.single_crossing = probes[first..].iter().all(is_ppt);

    let (mut lo, mut lo_probe) = if first == 0 { (0.0, family.pt_probe(0.0)?) } else { (grid[first - 1], probes[first - 1]) };
    let (mut hi, mut hi_probe) = (grid[first], probes[first]);
    if is_ppt(&lo_probe) {
        // PPT already at t = 0 (no entangling capacity at all)
        hi = 0.0;
        hi_probe = lo_probe;
    } else {
        while hi - lo > precision && report.iterations < MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let probe = family.pt_probe(mid)?;
            if is_ppt(&probe) {
                hi = mid;
                hi_probe = probe;
            } else {
                lo = mid;
                lo_probe = probe;
            }
            report.iterations += 1;
        }
    }
    report.transition_time = Some(hi);
    report.bracket = Some(Bracket {
        t_low: lo,
        t_high: hi,
        log_margin_low: lo_probe.log_margin,
        log_margin_high: hi_probe.log_margin,
        min_pt_eigenvalue_low: lo_probe.min_eigenvalue,
        min_pt_eigenvalue_high: hi_probe.min_eigenvalue,
    });
    Ok(report)
}

/// Root of `sinh(gamma (2N+1) t) = 2 sqrt(N(N+1)) / (2N+1)`, the printed
/// thermal threshold. `None` at `N = 0`.
pub fn thermal_threshold_paper(params: &BathParams) -> Option<f64> {
    let n = params.n_mean();
    if n <= 0.0 {
        return None;
    }
    let w = 2.0 * n + 1.0;
    Some((2.0 * (n * (n + 1.0)).sqrt() / w).asinh() / params.relaxation_rate())
}

/// Root of `sqrt(N(N+1)) (1 - x^2) = x (2N+1)`, i.e.
/// `sinh(gamma (2N+1) t / 2) = (2N+1) / (2 sqrt(N(N+1)))`, the PPT boundary of the thermal Choi state.
pub fn thermal_threshold_x_state(params: &BathParams) -> Option<f64> {
    let n = params.n_mean();
    if n <= 0.0 {
        return None;
    }
    let w = 2.0 * n + 1.0;
    Some(2.0 * (w / (2.0 * (n * (n + 1.0)).sqrt())).asinh() / params.relaxation_rate())
}

/// Left-hand sides of the squeezed-bath separability conditions (unnormalized Choi scale).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezedConditions {
    /// `alpha nu - |z|^2`.
    pub c1a: f64,
    /// `beta mu - y^2`.
    pub c1b: f64,
    /// `N(N+1)/(2N+1) 4 cosh^2(Gamma t/2) - sinh^2(gamma_0 a t/2)` as printed.
    pub c2: f64,
    /// `N(N+1)/(2N+1) 4 sinh^2(Gamma t/2) - cosh^2(gamma_0 a t/2)` as printed.
    pub c3: f64,
    /// Both matrix conditions hold to within `tol`.
    pub is_separable: bool,
}

pub fn squeezed_conditions(params: &BathParams, t: f64, tol: f64) -> Result<SqueezedConditions> {
    let c = SqueezedCoefficients::new(params, t)?;
    let c1a = c.excited_to_excited * c.ground_to_ground - c.coherence_cross * c.coherence_cross;
    let c1b = c.ground_to_excited * c.excited_to_ground - c.coherence_direct * c.coherence_direct;
    let n = params.n_mean();
    let pref = n * (n + 1.0) / (2.0 * n + 1.0) * 4.0;
    let half_rate = 0.5 * params.relaxation_rate() * t;
    let half_a = 0.5 * params.gamma() * params.a() * t;
    let c2 = pref * half_rate.cosh().powi(2) - half_a.sinh().powi(2);
    let c3 = pref * half_rate.sinh().powi(2) - half_a.cosh().powi(2);
    Ok(SqueezedConditions { c1a, c1b, c2, c3, is_separable: c1a >= -tol && c1b >= -tol })
}

/// One row of [`squeezing_effect`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SqueezingRow {
    pub r: f64,
    pub n_mean: f64,
    pub relaxation_rate: f64,
    #[serde(serialize_with = "serialize_time")]
    pub esd_time: Option<f64>,
    /// `esd_time * gamma_0 (2N+1)`.
    #[serde(serialize_with = "serialize_time")]
    pub scaled_esd_time: Option<f64>,
}

/// ESD time of the squeezed family as the squeezing magnitude varies, at the
/// thermal occupation, rate and phase of `base`.
pub fn squeezing_effect(base: &BathParams, r_values: &[f64], horizon: f64, precision: f64) -> Result<Vec<SqueezingRow>> {
    r_values
        .iter()
        .map(|&r| {
            let p = BathParams::squeezed(base.gamma(), base.n_th(), r, base.phi())?;
            let report = choi_ppt_time(&ChannelFamily::Squeezed(p), horizon, precision)?;
            let rate = p.relaxation_rate();
            Ok(SqueezingRow {
                r,
                n_mean: p.n_mean(),
                relaxation_rate: rate,
                esd_time: report.transition_time,
                scaled_esd_time: report.transition_time.map(|t| t * rate),
            })
        })
        .collect()
}

/// Bipartitions `subset : rest` of `n` qubits with qubit 0 in `subset`.
pub fn bipartitions(n: usize) -> Vec<Vec<usize>> {
    let full = (1usize << n) - 1;
    (1..full)
        .filter(|mask| mask & 1 == 1)
        .map(|mask| (0..n).filter(|q| mask >> q & 1 == 1).collect())
        .collect()
}

/// Negativities of one evolved sample state across every bipartition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleCuts {
    pub label: String,
    pub time: f64,
    pub cuts: Vec<Vec<usize>>,
    pub negativities: Vec<f64>,
    pub max_negativity: f64,
}

fn sample_cuts(label: &str, psi: &PureState, v: &Superoperator, time: f64) -> Result<SampleCuts> {
    let n = psi.dims().len();
    let rho = apply_to_all(v, &psi.to_density())?;
    let cuts = bipartitions(n);
    let negativities: Vec<f64> = cuts.iter().map(|c| negativity_across(&rho, c)).collect::<Result<_>>()?;
    let max_negativity = negativities.iter().copied().fold(0.0, f64::max);
    Ok(SampleCuts { label: label.to_string(), time, cuts, negativities, max_negativity })
}

/// Evidence that `V(t)^{⊗n}` disentangles every `n`-qubit state from `t*` on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NqubitCertificate {
    pub n_qubits: usize,
    pub report: EsdReport,
    /// `V(t*)` is entanglement breaking (dense PPT check of its Choi state).
    pub entanglement_breaking: Option<bool>,
    pub samples: Vec<SampleCuts>,
    /// GHZ cut negativities slightly before `t*`.
    pub ghz_before: Option<SampleCuts>,
    pub max_negativity: f64,
    pub negativity_tol: f64,
    /// `t*` exists, `V(t*)` is entanglement breaking, and all sample negativities are within tolerance.
    pub certified: bool,
}

/// Fraction of `t*` at which GHZ is probed for remaining entanglement.
pub const BEFORE_FRACTION: f64 = 0.9;
const RANDOM_SAMPLES: u64 = 5;

pub fn nqubit_esd_certificate(
    n: usize,
    family: &ChannelFamily,
    horizon: f64,
    precision: f64,
    seed: u64,
) -> Result<NqubitCertificate> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 qubits, got {n}")));
    }
    let report = choi_ppt_time(family, horizon, precision)?;
    let mut cert = NqubitCertificate {
        n_qubits: n,
        report: report.clone(),
        entanglement_breaking: None,
        samples: Vec::new(),
        ghz_before: None,
        max_negativity: 0.0,
        negativity_tol: PPT_TOL,
        certified: false,
    };
    let Some(t_star) = report.transition_time else {
        return Ok(cert);
    };
    let v = family.superoperator(t_star)?;
    let eb = is_entanglement_breaking(&v, PPT_TOL)?;
    cert.entanglement_breaking = Some(eb);

    let mut states: Vec<(String, PureState)> = vec![("ghz".into(), ghz(n)), ("w".into(), w_state(n))];
    for k in 0..RANDOM_SAMPLES {
        states.push((format!("random-{k}"), random_pure(&vec![2; n], seed.wrapping_add(k))));
    }
    for (label, psi) in &states {
        cert.samples.push(sample_cuts(label, psi, &v, t_star)?);
    }
    cert.max_negativity = cert.samples.iter().map(|s| s.max_negativity).fold(0.0, f64::max);

    let before = BEFORE_FRACTION * t_star;
    cert.ghz_before = Some(sample_cuts("ghz", &ghz(n), &family.superoperator(before)?, before)?);
    cert.certified = eb && cert.max_negativity <= cert.negativity_tol;
    Ok(cert)
}

/// Whether separability of a channel's Choi state has been established, which
/// makes the channel disentangle every input.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EsdSufficiency {
    Sufficient { witness: &'static str },
    NotSufficient,
    /// PPT but no separability witness found.
    Inconclusive,
}

/// For qubit channels PPT of the Choi state decides. For `d > 2` a PPT Choi
/// state is accepted only inside the separable ball `tr rho^2 <= 1/(D-1)`,
/// `D = d^2`.
pub fn esd_sufficient_general(v: &Superoperator) -> Result<EsdSufficiency> {
    let d = v.dim();
    let c = choi(v);
    if min_pt_eigenvalue(&c, 1)? < -PPT_TOL {
        return Ok(EsdSufficiency::NotSufficient);
    }
    if d == 2 {
        return Ok(EsdSufficiency::Sufficient { witness: "ppt" });
    }
    let total = (d * d) as f64;
    if c.purity() <= 1.0 / (total - 1.0) {
        Ok(EsdSufficiency::Sufficient { witness: "purity ball" })
    } else {
        Ok(EsdSufficiency::Inconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::ComplexMatrix;
    use crate::states::{DensityMatrix, PureState};
    use crate::matlin::C64;

    fn thermal(gamma: f64, n: f64) -> ChannelFamily {
        ChannelFamily::Thermal(BathParams::thermal(gamma, n).unwrap())
    }

    #[test]
    fn zero_temperature_never() {
        let r = choi_ppt_time(&thermal(1.0, 0.0), 50.0, 1e-8).unwrap();
        assert!(r.is_never());
        assert!(r.bracket.is_none());
        assert!(r.log_margin_at_horizon < 0.0);
        assert_eq!(serde_json::to_value(&r).unwrap()["transition_time"], "never");
    }

    #[test]
    fn finite_temperature_crossing_matches_x_state_condition() {
        let r = choi_ppt_time(&thermal(1.0, 1.0), 100.0 / 3.0, 1e-10).unwrap();
        let t = r.transition_time.unwrap();
        let b = r.bracket.unwrap();
        assert!(b.t_high - b.t_low <= 1e-10);
        assert!(b.log_margin_low < -PPT_TOL && b.log_margin_high >= -PPT_TOL);
        assert!(r.single_crossing);
        let x = (-1.5 * t).exp();
        assert!((2f64.sqrt() * (1.0 - x * x) - 3.0 * x).abs() <= 1e-8);
        let closed = thermal_threshold_x_state(&BathParams::thermal(1.0, 1.0).unwrap()).unwrap();
        assert!((t - closed).abs() <= 1e-9);
        assert_eq!(serde_json::to_value(&r).unwrap()["transition_time"], t);
    }

    #[test]
    fn thresholds() {
        let p1 = BathParams::thermal(1.0, 1.0).unwrap();
        let printed = thermal_threshold_paper(&p1).unwrap();
        assert!((printed - (2.0 * 2f64.sqrt() / 3.0).asinh() / 3.0).abs() < 1e-15);
        assert!((printed - 0.28011662873800064).abs() < 1e-15);
        let p2 = BathParams::thermal(2.0, 1.0).unwrap();
        assert!((thermal_threshold_paper(&p2).unwrap() - printed / 2.0).abs() < 1e-15);
        assert!((thermal_threshold_x_state(&p1).unwrap() - 0.615749).abs() < 1e-6);
        assert!(thermal_threshold_paper(&BathParams::thermal(1.0, 0.0).unwrap()).is_none());
        let tiny = thermal_threshold_paper(&BathParams::thermal(1.0, 1e-12).unwrap()).unwrap();
        assert!(tiny < 1e-5);
        let tiny_x = thermal_threshold_x_state(&BathParams::thermal(1.0, 1e-12).unwrap()).unwrap();
        assert!(tiny_x > 20.0);
    }

    #[test]
    fn finite_for_every_positive_temperature() {
        for n in [0.1, 0.5, 1.0, 3.0] {
            let p = BathParams::thermal(1.0, n).unwrap();
            let r = choi_ppt_time(&ChannelFamily::Thermal(p), 100.0 / p.relaxation_rate(), 1e-8).unwrap();
            assert!(r.transition_time.is_some(), "N={n}");
        }
    }

    #[test]
    fn esd_time_strictly_decreasing_in_temperature() {
        let mut last = f64::INFINITY;
        for n in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let t = choi_ppt_time(&thermal(1.0, n), 100.0, 1e-8).unwrap().transition_time.unwrap();
            assert!(t < last, "N={n}");
            last = t;
        }
    }

    #[test]
    fn qnd_never() {
        for profile in [DephasingProfile::Linear { scale: 1.0 }, DephasingProfile::Quadratic { scale: 1.0 }] {
            let fam = ChannelFamily::Qnd { omega: 0.3, profile };
            let r = choi_ppt_time(&fam, 100.0, 1e-8).unwrap();
            assert!(r.is_never());
            assert!(r.min_pt_eigenvalue_ln_abs_at_horizon.is_finite());
        }
        let custom = ChannelFamily::Qnd { omega: 0.0, profile: DephasingProfile::Custom(Arc::new(|t: f64| t.sqrt())) };
        assert!(choi_ppt_time(&custom, 10.0, 1e-8).unwrap().is_never());
    }

    #[test]
    fn invalid_scan_arguments() {
        assert!(choi_ppt_time(&thermal(1.0, 1.0), 0.0, 1e-8).is_err());
        assert!(choi_ppt_time(&thermal(1.0, 1.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn squeezed_condition_examples() {
        let p = BathParams::squeezed(1.0, 0.5, 0.3, 0.0).unwrap();
        assert!(squeezed_conditions(&p, 0.0, PPT_TOL).unwrap().c1b < 0.0);

        // zero squeezing: the thermal X-state blocks
        let p = BathParams::squeezed(1.0, 0.5, 0.0, 0.0).unwrap();
        let t = 0.7;
        let c = squeezed_conditions(&p, t, PPT_TOL).unwrap();
        let v = thermal_v_closed(&BathParams::thermal(1.0, 0.5).unwrap(), t).unwrap();
        let m = v.matrix();
        assert!((c.c1b - (m[(0, 3)].re * m[(3, 0)].re - m[(1, 1)].re.powi(2))).abs() < 1e-15);
        assert!((c.c1a - m[(0, 0)].re * m[(3, 3)].re).abs() < 1e-15);

        let p = BathParams::squeezed(1.0, 0.0, 0.5, 0.0).unwrap();
        let c = squeezed_conditions(&p, 30.0, PPT_TOL).unwrap();
        assert!(c.c1a >= 0.0 && c.c1b >= 0.0 && c.is_separable);
    }

    #[test]
    fn squeezed_conditions_agree_with_dense_choi() {
        let p = BathParams::squeezed(0.9, 0.2, 0.6, 1.1).unwrap();
        for t in [0.1, 0.5, 1.5, 4.0] {
            let c = squeezed_conditions(&p, t, PPT_TOL).unwrap();
            let dense = min_pt_eigenvalue(&choi(&squeezed_v_closed(&p, t).unwrap()), 1).unwrap();
            assert_eq!(c.c1a.min(c.c1b) >= 0.0, dense >= 0.0, "t={t}");
        }
    }

    #[test]
    fn large_time_c1b_is_positive() {
        for (n_th, r) in [(0.0, 0.2), (0.5, 0.6), (2.0, 1.0)] {
            let p = BathParams::squeezed(1.0, n_th, r, 0.0).unwrap();
            assert!(2.0 * p.n_mean() + 1.0 > p.a());
            let t = 60.0 / (p.relaxation_rate() - p.gamma() * p.a());
            assert!(squeezed_conditions(&p, t, PPT_TOL).unwrap().c1b > 0.0);
        }
    }

    #[test]
    fn zero_temperature_squeezing_induces_esd() {
        let base = BathParams::thermal(1.0, 0.0).unwrap();
        let rows = squeezing_effect(&base, &[0.0, 0.2, 0.4], 200.0, 1e-8).unwrap();
        assert!(rows[0].esd_time.is_none());
        assert!(rows[1].esd_time.is_some() && rows[2].esd_time.is_some());
    }

    #[test]
    fn bipartition_listing() {
        assert_eq!(bipartitions(2), vec![vec![0]]);
        assert_eq!(bipartitions(3), vec![vec![0], vec![0, 1], vec![0, 2]]);
        assert_eq!(bipartitions(4).len(), 7);
    }

    #[test]
    fn three_qubit_certificate() {
        let cert = nqubit_esd_certificate(3, &thermal(1.0, 1.0), 100.0, 1e-10, 7).unwrap();
        assert!(cert.certified);
        assert_eq!(cert.entanglement_breaking, Some(true));
        assert_eq!(cert.samples.len(), 7);
        assert!(cert.max_negativity <= 1e-10);

        let never = nqubit_esd_certificate(3, &thermal(1.0, 0.0), 50.0, 1e-8, 7).unwrap();
        assert!(never.report.is_never() && !never.certified && never.samples.is_empty());

        let two = nqubit_esd_certificate(2, &thermal(1.0, 1.0), 100.0, 1e-10, 7).unwrap();
        assert_eq!(two.report, choi_ppt_time(&thermal(1.0, 1.0), 100.0, 1e-10).unwrap());
        assert!(nqubit_esd_certificate(1, &thermal(1.0, 1.0), 100.0, 1e-8, 7).is_err());
    }

    #[test]
    fn sufficiency_examples() {
        assert_eq!(
            esd_sufficient_general(&Superoperator::completely_depolarizing(2)).unwrap(),
            EsdSufficiency::Sufficient { witness: "ppt" }
        );
        assert_eq!(esd_sufficient_general(&Superoperator::identity(2)).unwrap(), EsdSufficiency::NotSufficient);
        let dep = Superoperator::depolarizing(3, 0.99).unwrap();
        assert_eq!(esd_sufficient_general(&dep).unwrap(), EsdSufficiency::Sufficient { witness: "purity ball" });
        // PPT but outside the ball
        let dep = Superoperator::depolarizing(3, 0.8).unwrap();
        assert_eq!(esd_sufficient_general(&dep).unwrap(), EsdSufficiency::Inconclusive);
        assert_eq!(esd_sufficient_general(&Superoperator::identity(3)).unwrap(), EsdSufficiency::NotSufficient);
    }

    /// Isotropic states `F |phi+><phi+| + (1-F)(I - |phi+><phi+|)/(d^2-1)` are
    /// separable iff `F <= 1/d`; the purity ball must never certify an entangled one.
    #[test]
    fn purity_ball_is_sound_on_isotropic_states() {
        let d = 3;
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        for k in 0..d {
            amps[k * d + k] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        let phi = PureState::new(vec![d, d], amps).unwrap().to_density();
        let id = ComplexMatrix::identity(d * d);
        for k in 0..=40 {
            let f = k as f64 / 40.0;
            let rest = &id - phi.matrix();
            let m = &phi.matrix().scale_real(f) + &rest.scale_real((1.0 - f) / (d * d - 1) as f64);
            let rho = DensityMatrix::new(vec![d, d], m).unwrap();
            let in_ball = rho.purity() <= 1.0 / (d * d - 1) as f64;
            if in_ball {
                assert!(f <= 1.0 / d as f64 + 1e-12, "F={f}");
            }
        }
    }
}
