use std::ffi::CStr;
use std::ptr;

use jpa_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(jpa_last_error()) }.to_string_lossy().into_owned()
}

fn typical() -> *mut JpaDevice {
    let mut dev = ptr::null_mut();
    assert_eq!(unsafe { jpa_device_typical(&mut dev) }, JpaStatus::Ok);
    assert!(!dev.is_null());
    dev
}

#[test]
fn device_lifecycle_and_critical_point() {
    let dev = typical();
    let mut c = JpaCritical::default();
    assert_eq!(unsafe { jpa_critical_params(dev, &mut c) }, JpaStatus::Ok);
    let gamma = 2.0 * std::f64::consts::PI * 54.5e6;
    assert!((c.delta_c / (3f64.sqrt() * gamma) - 1.0).abs() < 1e-12);
    assert!(c.b_c > 0.0 && c.p_c > 0.0);
    unsafe { jpa_device_free(dev) };
    unsafe { jpa_device_free(ptr::null_mut()) };
}

#[test]
fn invalid_device_reports_domain_error() {
    let mut dev = ptr::null_mut();
    let s = unsafe { jpa_device_new(1e10, -1.0, -1e5, &mut dev) };
    assert_eq!(s, JpaStatus::Domain);
    assert!(dev.is_null());
    assert!(last_error().contains("gamma"), "{}", last_error());
}

#[test]
fn null_arguments_are_rejected() {
    assert_eq!(unsafe { jpa_device_typical(ptr::null_mut()) }, JpaStatus::NullPointer);
    let mut x = 0.0;
    assert_eq!(unsafe { jpa_half_photon_probe(ptr::null(), &mut x) }, JpaStatus::NullPointer);
    assert!(!last_error().is_empty());
}

#[test]
fn steady_output_is_all_pass() {
    let dev = typical();
    let (mut re, mut im, mut n, mut bi) = (0.0, 0.0, 0.0, 0);
    let gamma = 2.0 * std::f64::consts::PI * 54.5e6;
    let s = unsafe { jpa_steady_output(dev, 1.54 * gamma, 3e5, 1e5, &mut re, &mut im, &mut n, &mut bi) };
    assert_eq!(s, JpaStatus::Ok);
    assert!(((re * re + im * im).sqrt() / (3e5f64).hypot(1e5) - 1.0).abs() < 1e-12);
    assert!(n > 0.0);
    assert_eq!(bi, 0);
    assert_eq!(last_error(), "");
    unsafe { jpa_device_free(dev) };
}

#[test]
fn gain_lmg_and_deamp() {
    let dev = typical();
    let (mut p, mut g) = (0.0, 0.0);
    assert_eq!(unsafe { jpa_lmg_point(dev, 1.0015, &mut p, &mut g) }, JpaStatus::Ok);
    assert!(g > 15.0, "{g}");
    let mut probe = 0.0;
    unsafe { jpa_half_photon_probe(dev, &mut probe) };
    let mut direct = 0.0;
    assert_eq!(unsafe { jpa_direct_gain(dev, 1.0015, p, probe, 360, &mut direct) }, JpaStatus::Ok);
    assert!(direct > 10.0);
    let (mut ratio, mut g2) = (0.0, 0.0);
    assert_eq!(unsafe { jpa_deamp_ratio(dev, 1.0015, p + 1.0, probe, 360, &mut ratio, &mut g2) }, JpaStatus::Ok);
    assert!(ratio < 0.0);
    // a probe larger than the pump is a domain error
    let s = unsafe { jpa_direct_gain(dev, 1.0015, -200.0, probe, 360, &mut direct) };
    assert_eq!(s, JpaStatus::Domain);
    unsafe { jpa_device_free(dev) };
}

#[test]
fn squeezing_through_the_abi() {
    let dev = typical();
    let (mut s, mut se) = (0.0, 0.0);
    let st = unsafe { jpa_squeezing_min(dev, 1.0015, 0.43, 1.2, 25.0, 20_000, 32, 1, &mut s, &mut se) };
    assert_eq!(st, JpaStatus::Ok, "{}", last_error());
    assert!(s < -3.0 && s > -6.3, "{s}");
    assert!(se > 0.0);
    unsafe { jpa_device_free(dev) };
}

#[test]
fn noise_fit_through_the_abi() {
    let omega = 2.0 * std::f64::consts::PI * 7e9;
    let (mut tv, mut tf, mut ps) = (vec![], vec![], vec![]);
    for &f in &[0.05, 0.3, 0.5] {
        for k in 0..20 {
            let t = 0.03 + 0.05 * k as f64;
            let (mut si, mut sf) = (0.0, 0.0);
            unsafe {
                jpa_thermal_occupancy(t, omega, &mut si);
                jpa_thermal_occupancy(f, omega, &mut sf);
            }
            tv.push(t);
            tf.push(f);
            ps.push(1e7 * (0.79 * si + 0.21 * sf + 0.045));
        }
    }
    let mut out = JpaFit::default();
    let s = unsafe { jpa_fit_added_noise(tv.as_ptr(), tf.as_ptr(), ps.as_ptr(), tv.len(), omega, &mut out) };
    assert_eq!(s, JpaStatus::Ok);
    assert!((out.lambda - 0.79).abs() < 1e-9 && (out.n_add - 0.045).abs() < 1e-9);
    assert!((out.chain_gain_db - 70.0).abs() < 1e-9);
}

#[test]
fn header_is_generated_and_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/jpa.h");
    let text = std::fs::read_to_string(header).unwrap();
    for sym in ["jpa_device_new", "jpa_last_error", "JPA_STATUS_OK", "typedef struct JpaDevice JpaDevice"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
