use std::ffi::{CStr, CString};
use std::ptr;

use ge_sim_ffi::*;

fn last_error() -> String {
    let p = ge_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn model() -> *mut GeModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ge_model_new(1e-3, 0.8, 1.2, 0.5, 0.0, &mut m) }, GeStatus::Ok);
    assert!(ge_last_error_message().is_null());
    m
}

#[test]
fn observables_match_the_library() {
    let m = model();
    let lib = ge_sim::Model::dimensionless(1e-3, 0.8, 1.2, num_complex::Complex64::new(0.5, 0.0)).unwrap();
    let t = 3.0 * lib.t_sat;
    let (mut k, mut ts) = (0.0, 0.0);
    let mut p = 0.0;
    let mut v = 0.0;
    let mut n = 0.0;
    let mut sn = 0.0;
    unsafe {
        assert_eq!(ge_model_resonance(m, &mut k, &mut ts), GeStatus::Ok);
        assert_eq!(ge_pex(m, t, GePexMethod::Numeric, &mut p), GeStatus::Ok);
        assert_eq!(ge_visibility(m, t, false, false, &mut v), GeStatus::Ok);
        assert_eq!(
            ge_negativity(m, t, GeNegativityMethod::ClosedForm, &mut n),
            GeStatus::Ok
        );
        assert_eq!(ge_sn_pex(m, t, &mut sn), GeStatus::Ok);
        ge_model_free(m);
    }
    assert_eq!((k, ts), (lib.k_res, lib.t_sat));
    assert_eq!(p, ge_sim::observables::pex_numeric(&lib, t).unwrap());
    assert_eq!(v, ge_sim::observables::visibility(&lib, t, false, false).unwrap());
    assert!((v - ge_sim::observables::visibility_closed_form(&lib, t)).abs() < 1e-12);
    assert!((2.0 * n * n - p).abs() < 1e-12 * p);
    assert!((sn / p - 0.5).abs() < 1e-9);
}

#[test]
fn errors_carry_status_and_message() {
    let mut m = ptr::null_mut();
    let s = unsafe { ge_model_new(1e-3, 1.1, 1.2, 0.5, 0.0, &mut m) };
    assert_eq!(s, GeStatus::ResonanceOrdering);
    assert!(m.is_null());
    assert!(last_error().contains("ordering"));

    let bad = CString::new("{\"m\": 1.0").unwrap();
    assert_eq!(
        unsafe { ge_model_from_si_json(bad.as_ptr(), &mut m) },
        GeStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { ge_pex(ptr::null(), 1.0, GePexMethod::Numeric, ptr::null_mut()) },
        GeStatus::NullPointer
    );

    let good = model();
    assert_eq!(
        unsafe { ge_pex(good, 1.0, GePexMethod::Numeric, ptr::null_mut()) },
        GeStatus::NullPointer
    );
    unsafe {
        ge_model_free(good);
        ge_model_free(ptr::null_mut());
    }
}

#[test]
fn feasibility_point() {
    let input = GeFeasibilityInput {
        mass_ratio: 1.0,
        density: 2e4,
        alpha_abs: 0.7,
        omega_b: 1.0,
        omega0: 0.0,
        tau1: 43200.0,
        t_tot: 31_557_600.0,
        k_res: 0.0,
    };
    let mut r = std::mem::MaybeUninit::<GeFeasibilityReport>::uninit();
    assert_eq!(unsafe { ge_feasibility(&input, r.as_mut_ptr()) }, GeStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert!((r.per_run / 1.3e-3 - 1.0).abs() < 0.1);
    assert!(r.total_linear > 0.8 && r.total_linear <= 1.0);
}

#[test]
fn oracle_handle_matches_direct_propagation() {
    let m = model();
    let spec = GeGridSpec {
        x_max: 40.0,
        nx: 256,
        ny: 32,
        ..ge_grid_spec_default()
    };
    let mut o = ptr::null_mut();
    let mut before = std::mem::MaybeUninit::<GeMeasurement>::uninit();
    let mut after = std::mem::MaybeUninit::<GeMeasurement>::uninit();
    unsafe {
        assert_eq!(ge_oracle_new(m, &spec, &mut o), GeStatus::Ok);
        assert_eq!(ge_oracle_measure(o, before.as_mut_ptr()), GeStatus::Ok);
        assert_eq!(ge_oracle_advance(o, 0.5), GeStatus::Ok);
        assert_eq!(ge_oracle_measure(o, after.as_mut_ptr()), GeStatus::Ok);
        assert_eq!(ge_oracle_advance(o, 0.25), GeStatus::InvalidArgument);
        ge_oracle_free(o);
    }
    let (before, after) = unsafe { (before.assume_init(), after.assume_init()) };
    assert_eq!(before.tau, 0.0);
    assert!(before.p_ex.abs() < 1e-10);

    let lib = ge_sim::Model::dimensionless(1e-3, 0.8, 1.2, num_complex::Complex64::new(0.5, 0.0)).unwrap();
    let direct = ge_sim::oracle::GridSpec {
        x_max: 40.0,
        nx: 256,
        ny: 32,
        ..Default::default()
    };
    let s0 = ge_sim::oracle::initial_state(&lib, &direct).unwrap();
    let r = ge_sim::oracle::measure(&ge_sim::oracle::propagate(&s0, 0.5, &lib).unwrap());
    assert_eq!((after.tau, after.p_ex, after.visibility), (r.tau, r.p_ex, r.visibility));

    let coarse = GeGridSpec { dt: 0.1, ..spec };
    let mut o = ptr::null_mut();
    unsafe {
        assert_eq!(ge_oracle_new(m, &coarse, &mut o), GeStatus::Ok);
        assert_eq!(ge_oracle_advance(o, 1.0), GeStatus::StepSize);
        ge_oracle_free(o);
        ge_model_free(m);
    }
}
