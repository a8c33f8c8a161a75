use lindblad_esd::channels::{
    choi, lindblad_squeezed, propagator, squeezed_v_closed, thermal_v_closed, BathParams,
};
use lindblad_esd::entanglement::{concurrence, factorization_residual, is_ppt, min_pt_eigenvalue, negativity, PPT_TOL};
use lindblad_esd::esd::{choi_ppt_time, squeezed_conditions, ChannelFamily};
use lindblad_esd::matlin::{herm_eigvals, partial_trace_dims, partial_transpose_dims};
use lindblad_esd::states::{local_unitary, random_density, random_pure, random_unitary};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_are_trace_preserving_and_completely_positive(
        gamma in 0.1f64..3.0, n_th in 0.0f64..3.0, r in 0.0f64..1.2, phi in -3.1f64..3.1, t in 0.0f64..20.0,
    ) {
        let p = BathParams::squeezed(gamma, n_th, r, phi).unwrap();
        for v in [squeezed_v_closed(&p, t).unwrap(), thermal_v_closed(&BathParams::thermal(gamma, n_th).unwrap(), t).unwrap()] {
            prop_assert!(v.trace_preservation_error() <= 1e-12);
            let c = choi(&v);
            prop_assert!(c.matrix().is_hermitian(1e-14));
            prop_assert!(herm_eigvals(c.matrix()).unwrap()[0] >= -1e-12);
        }
    }

    #[test]
    fn squeezed_closed_form_matches_generator(
        n_th in 0.0f64..2.0, r in 0.0f64..1.0, phi in -3.1f64..3.1, t in 0.0f64..10.0,
    ) {
        let p = BathParams::squeezed(1.0, n_th, r, phi).unwrap();
        let l = lindblad_squeezed(&p).unwrap();
        let err = squeezed_v_closed(&p, t).unwrap().matrix().max_abs_diff(propagator(&l, t).unwrap().matrix());
        prop_assert!(err <= 1e-10, "err={}", err);
    }

    #[test]
    fn semigroup_law(n in 0.0f64..3.0, s in 0.0f64..5.0, t in 0.0f64..5.0) {
        let p = BathParams::squeezed(1.0, n, 0.4, 0.3).unwrap();
        let l = lindblad_squeezed(&p).unwrap();
        let composed = propagator(&l, t).unwrap().after(&propagator(&l, s).unwrap()).unwrap();
        prop_assert!(composed.matrix().max_abs_diff(propagator(&l, s + t).unwrap().matrix()) <= 1e-11);
    }

    #[test]
    fn squeezed_relation_and_positive_late_condition(n_th in 0.0f64..3.0, r in 0.0f64..2.0) {
        let p = BathParams::squeezed(1.0, n_th, r, 0.0).unwrap();
        prop_assert!(p.a() < 2.0 * p.n_mean() + 1.0);
        prop_assert!(((2.0 * p.n_mean() + 1.0) - (2.0 * r).cosh() * (2.0 * n_th + 1.0)).abs() <= 1e-12 * (2.0 * p.n_mean() + 1.0));
        if r > 0.0 || n_th > 0.0 {
            let t = 40.0 / (p.relaxation_rate() - p.gamma() * p.a());
            prop_assert!(squeezed_conditions(&p, t, PPT_TOL).unwrap().c1b > 0.0);
        }
    }

    #[test]
    fn partial_transpose_preserves_trace_and_partial_trace_keeps_positivity(seed in 0u64..100_000) {
        let rho = random_density(&[2, 3, 2], seed);
        let pt = partial_transpose_dims(rho.matrix(), rho.dims(), &[1]).unwrap();
        prop_assert!((pt.trace() - rho.matrix().trace()).norm() <= 1e-12);
        let (red, dims) = partial_trace_dims(rho.matrix(), rho.dims(), &[0, 2]).unwrap();
        prop_assert_eq!(dims, vec![2, 2]);
        prop_assert!((red.trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(herm_eigvals(&red).unwrap()[0] >= -1e-12);
    }

    #[test]
    fn concurrence_local_unitary_invariance(seed in 0u64..100_000) {
        let rho = random_density(&[2, 2], seed);
        let u = local_unitary(&[random_unitary(2, seed ^ 0xa5a5), random_unitary(2, seed ^ 0x5a5a)]);
        let a = concurrence(&rho).unwrap().value();
        let b = concurrence(&rho.transform(&u).unwrap()).unwrap().value();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn ppt_matches_zero_negativity(seed in 0u64..100_000, n in 0.0f64..2.0, t in 0.0f64..3.0) {
        let v = thermal_v_closed(&BathParams::thermal(1.0, n).unwrap(), t).unwrap();
        let c = choi(&v);
        let mixed = random_density(&[2, 2], seed);
        for rho in [&c, &mixed] {
            let ppt = is_ppt(rho, 1, PPT_TOL).unwrap();
            prop_assert_eq!(ppt, negativity(rho, 1).unwrap() <= PPT_TOL);
        }
    }

    #[test]
    fn factorization_law_for_pure_inputs(seed in 0u64..100_000, d in 2usize..=4, t in 0.0f64..3.0, n in 0.0f64..2.0) {
        let chi = random_pure(&[d, 2], seed);
        let v = squeezed_v_closed(&BathParams::squeezed(1.0, n, 0.3, 0.5).unwrap(), t).unwrap();
        prop_assert!(factorization_residual(&chi, &v).unwrap() <= 1e-9);
    }

    #[test]
    fn esd_bracket_straddles_the_transition(n in 0.05f64..4.0, gamma in 0.2f64..3.0) {
        let p = BathParams::thermal(gamma, n).unwrap();
        let fam = ChannelFamily::Thermal(p);
        let report = choi_ppt_time(&fam, 100.0 / p.relaxation_rate(), 1e-8).unwrap();
        let b = report.bracket.unwrap();
        prop_assert!(b.t_high - b.t_low <= 1e-8);
        prop_assert!(fam.pt_probe(b.t_low).unwrap().log_margin < -PPT_TOL);
        prop_assert!(fam.pt_probe(b.t_high).unwrap().log_margin >= -PPT_TOL);
        let dense_high = min_pt_eigenvalue(&choi(&fam.superoperator(b.t_high).unwrap()), 1).unwrap();
        prop_assert!(dense_high >= -PPT_TOL);
        let dense_low = min_pt_eigenvalue(&choi(&fam.superoperator(b.t_low).unwrap()), 1).unwrap();
        prop_assert!(dense_low < 0.0);
    }
}
