use std::ptr;

use vpmcf_ffi::*;

fn cylinder(n: usize, r: f64) -> *mut VpmcfProfile {
    let rho = vec![r; n + 1];
    let mut out = ptr::null_mut();
    let s = unsafe { vpmcf_profile_new(0.0, 1.0, 2, rho.as_ptr(), rho.len(), &mut out) };
    assert_eq!(s, VpmcfStatus::Ok);
    out
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { vpmcf_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { std::ffi::CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn profile_geometry() {
    let p = cylinder(16, 2.0);
    let (mut v, mut a, mut h) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(vpmcf_profile_len(p), 17);
        assert_eq!(vpmcf_profile_volume(p, &mut v), VpmcfStatus::Ok);
        assert_eq!(vpmcf_profile_area(p, &mut a), VpmcfStatus::Ok);
        assert_eq!(vpmcf_profile_mean_curvature_average(p, &mut h), VpmcfStatus::Ok);
    }
    let pi = std::f64::consts::PI;
    assert!((v - 4.0 * pi).abs() < 1e-12);
    assert!((a - 4.0 * pi).abs() < 1e-12);
    assert!((h - 0.5).abs() < 1e-14);

    let mut field = vec![0.0; 17];
    unsafe {
        assert_eq!(vpmcf_profile_field(p, VpmcfField::P, field.as_mut_ptr(), 17), VpmcfStatus::Ok);
        assert!(field.iter().all(|&x| x == 0.5));
        assert_eq!(vpmcf_profile_field(p, VpmcfField::K, field.as_mut_ptr(), 16), VpmcfStatus::OutOfRange);
        vpmcf_profile_free(p);
    }
}

#[test]
fn invalid_input_sets_error() {
    let rho = [1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
    let mut out = ptr::null_mut();
    let s = unsafe { vpmcf_profile_new(0.0, 1.0, 2, rho.as_ptr(), rho.len(), &mut out) };
    assert_ne!(s, VpmcfStatus::Ok);
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    let s = unsafe { vpmcf_profile_volume(ptr::null(), &mut 0.0) };
    assert_eq!(s, VpmcfStatus::NullPointer);
    assert!(last_error().contains("null"));
    unsafe { vpmcf_profile_free(ptr::null_mut()) };
}

#[test]
fn plain_run_and_fit() {
    let p = cylinder(16, 1.0);
    let mut cfg = std::mem::MaybeUninit::<VpmcfFlowConfig>::uninit();
    let mut cfg = unsafe {
        assert_eq!(vpmcf_flow_config_default(cfg.as_mut_ptr()), VpmcfStatus::Ok);
        cfg.assume_init()
    };
    assert!(cfg.stop_rho_min.is_nan());
    cfg.mode = VpmcfMode::PlainMcf;
    cfg.output_every = 500;
    cfg.record_a2_growth = 1.3;

    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(vpmcf_run(p, &cfg, &mut traj), VpmcfStatus::Ok);
        let mut status = VpmcfRunStatus::Running;
        assert_eq!(vpmcf_trajectory_status(traj, &mut status), VpmcfStatus::Ok);
        assert_eq!(status, VpmcfRunStatus::AxisContact);

        let len = vpmcf_trajectory_len(traj);
        assert!(len > 10);
        let (mut t, mut h, mut last) = (0.0, 1.0, ptr::null_mut());
        assert_eq!(vpmcf_trajectory_state(traj, len - 1, &mut t, &mut h, &mut last), VpmcfStatus::Ok);
        assert!((t - 0.5).abs() < 1e-3 && h == 0.0);
        let mut rt = -1.0;
        assert_eq!(vpmcf_profile_time(last, &mut rt), VpmcfStatus::Ok);
        assert_eq!(rt, t);
        vpmcf_profile_free(last);
        assert_eq!(
            vpmcf_trajectory_state(traj, len, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()),
            VpmcfStatus::OutOfRange
        );

        let mut fit = std::mem::MaybeUninit::<VpmcfFit>::uninit();
        assert_eq!(vpmcf_trajectory_fit(traj, fit.as_mut_ptr()), VpmcfStatus::Ok);
        let fit = fit.assume_init();
        assert_eq!(fit.classification, VpmcfClassification::TypeI);
        assert!((fit.c_est - 0.5).abs() < 1e-6 && (fit.t_est - 0.5).abs() < 1e-6);

        vpmcf_trajectory_free(traj);
        vpmcf_profile_free(p);
    }
}

#[test]
fn series_fit() {
    // |A|^2 = 1/(2 (T - t)), T = 1
    let t: Vec<f64> = (0..200).map(|i| 0.5 + 0.4999 * i as f64 / 199.0).collect();
    let a2: Vec<f64> = t.iter().map(|t| 0.5 / (1.0 - t)).collect();
    let mut fit = std::mem::MaybeUninit::<VpmcfFit>::uninit();
    let s = unsafe { vpmcf_fit_series(t.as_ptr(), a2.as_ptr(), t.len(), 10.0, fit.as_mut_ptr()) };
    assert_eq!(s, VpmcfStatus::Ok);
    let mut fit = unsafe { fit.assume_init() };
    assert!((fit.t_est - 1.0).abs() < 1e-10 && (fit.c_est - 0.5).abs() < 1e-10);

    let s = unsafe { vpmcf_fit_series(t.as_ptr(), a2.as_ptr(), 5, 10.0, &mut fit) };
    assert_eq!(s, VpmcfStatus::InsufficientData);
}
