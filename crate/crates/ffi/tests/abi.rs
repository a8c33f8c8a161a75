use std::ffi::CStr;
use std::ptr;

use lindblad_esd_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(le_last_error_message()).to_string_lossy().into_owned() }
}

#[test]
fn zero_temperature_choi_concurrence() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(le_superop_thermal(1.0, 0.0, 0.8, &mut v), LeStatus::Ok);
        assert_eq!(le_superop_dim(v), 2);
        let mut c = ptr::null_mut();
        assert_eq!(le_choi(v, &mut c), LeStatus::Ok);
        assert_eq!(le_density_dim(c), 4);
        let mut conc = 0.0;
        assert_eq!(le_concurrence(c, &mut conc), LeStatus::Ok);
        assert!((conc - (-0.4f64).exp()).abs() <= 1e-12);
        let mut neg = 0.0;
        assert_eq!(le_negativity(c, 1, &mut neg), LeStatus::Ok);
        assert!(neg > 0.0);
        let mut eb = -1;
        assert_eq!(le_superop_is_entanglement_breaking(v, 1e-10, &mut eb), LeStatus::Ok);
        assert_eq!(eb, 0);
        le_density_free(c);
        le_superop_free(v);
    }
}

#[test]
fn superop_matrix_and_identity_channel() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(le_superop_identity(2, &mut v), LeStatus::Ok);
        let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
        assert_eq!(le_superop_matrix(v, re.as_mut_ptr(), im.as_mut_ptr(), 16), LeStatus::Ok);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(re[4 * i + j], if i == j { 1.0 } else { 0.0 });
            }
        }
        assert!(im.iter().all(|&x| x == 0.0));
        assert_eq!(le_superop_matrix(v, re.as_mut_ptr(), im.as_mut_ptr(), 3), LeStatus::InvalidArgument);

        // |00><00| + |11><11| mixture through the identity on qubit 1
        let dims = [2usize, 2];
        let mut re = [0.0; 16];
        re[0] = 0.5;
        re[15] = 0.5;
        let im = [0.0; 16];
        let mut rho = ptr::null_mut();
        assert_eq!(le_density_new(dims.as_ptr(), 2, re.as_ptr(), im.as_ptr(), &mut rho), LeStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(le_apply_to_subsystem(v, rho, 1, &mut out), LeStatus::Ok);
        let (mut ore, mut oim) = ([0.0; 16], [0.0; 16]);
        assert_eq!(le_density_matrix(out, ore.as_mut_ptr(), oim.as_mut_ptr(), 16), LeStatus::Ok);
        assert_eq!(ore, re);
        le_density_free(out);
        le_density_free(rho);
        le_superop_free(v);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        assert_eq!(le_superop_thermal(1.0, 0.0, 1.0, ptr::null_mut()), LeStatus::NullPointer);
        let mut v = ptr::null_mut();
        assert_eq!(le_superop_thermal(-1.0, 0.0, 1.0, &mut v), LeStatus::InvalidParams);
        assert!(v.is_null());
        assert!(!last_error().is_empty());
        let bad = LeBathParams { gamma: 1.0, n_th: -0.5, r: 0.2, phi: 0.0, omega: 0.0 };
        assert_eq!(le_superop_squeezed(&bad, 1.0, &mut v), LeStatus::InvalidParams);
        assert_eq!(le_superop_squeezed(ptr::null(), 1.0, &mut v), LeStatus::NullPointer);
        let mut conc = 0.0;
        assert_eq!(le_concurrence(ptr::null(), &mut conc), LeStatus::NullPointer);

        // non-positive matrix is rejected
        let dims = [2usize];
        let re = [2.0, 0.0, 0.0, -1.0];
        let im = [0.0; 4];
        let mut rho = ptr::null_mut();
        assert_ne!(le_density_new(dims.as_ptr(), 1, re.as_ptr(), im.as_ptr(), &mut rho), LeStatus::Ok);
        assert!(rho.is_null());

        assert_eq!(le_superop_thermal(1.0, 0.5, 1.0, &mut v), LeStatus::Ok);
        assert!(last_error().is_empty());
        le_superop_free(v);
        le_superop_free(ptr::null_mut());
        assert!(!CStr::from_ptr(le_version()).to_bytes().is_empty());
    }
}

#[test]
fn esd_time_finite_and_never() {
    unsafe {
        let p = LeBathParams { gamma: 1.0, n_th: 1.0, r: 0.0, phi: 0.0, omega: 0.0 };
        let mut res = std::mem::zeroed::<LeEsdResult>();
        assert_eq!(le_esd_time(LeFamily::Thermal, &p, 0.0, 30.0, 1e-10, &mut res), LeStatus::Ok);
        assert_eq!(res.never, 0);
        assert!((res.transition_time - 0.6157486952379458).abs() <= 1e-9);
        assert!(res.t_high - res.t_low <= 1e-10);
        assert_eq!(res.single_crossing, 1);

        assert_eq!(le_esd_time(LeFamily::QndQuadratic, ptr::null(), 1.0, 100.0, 1e-8, &mut res), LeStatus::Ok);
        assert_ne!(res.never, 0);
        assert!(res.transition_time.is_nan());

        let squeezed = LeBathParams { gamma: 1.0, n_th: 0.0, r: 0.4, phi: 0.0, omega: 0.0 };
        assert_eq!(le_esd_time(LeFamily::Squeezed, &squeezed, 0.0, 200.0, 1e-8, &mut res), LeStatus::Ok);
        assert_eq!(res.never, 0);
        assert_eq!(le_esd_time(LeFamily::Thermal, &squeezed, 0.0, 200.0, 1e-8, &mut res), LeStatus::InvalidParams);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/lindblad_esd.h")).unwrap();
    for name in [
        "le_superop_thermal",
        "le_superop_squeezed",
        "le_superop_qnd",
        "le_choi",
        "le_concurrence",
        "le_negativity",
        "le_esd_time",
        "le_last_error_message",
        "LE_STATUS_NULL_POINTER",
        "typedef struct LeSuperop LeSuperop",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
