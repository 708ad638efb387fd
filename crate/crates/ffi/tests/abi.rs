#![allow(clippy::excessive_precision)]

use std::ffi::{CStr, CString};
use std::ptr;

use circle_density_ffi::*;

fn last_error() -> String {
    let p = cd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions() {
    let mut x = f64::NAN;
    unsafe {
        assert_eq!(cd_phi(2, &mut x), CdStatus::Ok);
        assert!((x - 0.292_481_250_360_578_09).abs() < 1e-16);
        assert_eq!(cd_phi(0, &mut x), CdStatus::InvalidArgument);
        assert!(!last_error().is_empty());
        assert_eq!(cd_phi(1, ptr::null_mut()), CdStatus::NullPointer);

        assert_eq!(cd_log_odd_point(3, &mut x), CdStatus::Ok);
        assert!((x - 0.321_928_094_887_362_35).abs() < 1e-16);
        assert_eq!(cd_van_der_corput_point(2, 3, &mut x), CdStatus::Ok);
        assert_eq!(x, 0.75);
        assert_eq!(cd_van_der_corput_point(1, 3, &mut x), CdStatus::InvalidArgument);
        assert_eq!(cd_kronecker_point(0.25, 3, &mut x), CdStatus::Ok);
        assert_eq!(x, 0.75);
    }
    assert_eq!(cd_rho(0.1, 0.9), cd_rho(0.9, 0.1));
    assert!((cd_rho(0.1, 0.9) - 0.2).abs() < 1e-15);
    assert!(cd_rho(f64::NAN, 0.0).is_nan());
}

#[test]
fn stream_and_tracker() {
    let spec = CString::new("log-odd").unwrap();
    let mut stream = ptr::null_mut();
    let tracker = cd_tracker_new();
    let mut rec = CdRecord {
        n: 0,
        dispersion: 0.0,
        min_gap: 0.0,
        n_dispersion: 0.0,
        n_min_gap: 0.0,
        phi: 0.0,
        dispersion_ratio: 0.0,
        min_gap_ratio: 0.0,
        has_min_gap: true,
    };
    unsafe {
        assert_eq!(cd_stream_open(spec.as_ptr(), 64, &mut stream), CdStatus::Ok);
        let mut x = 0.0;
        let mut first = true;
        while cd_stream_next(stream, &mut x) == CdStatus::Ok {
            assert_eq!(cd_tracker_push(tracker, x, &mut rec), CdStatus::Ok);
            if first {
                assert!(!rec.has_min_gap && rec.min_gap.is_nan());
                assert_eq!(rec.dispersion, 0.5);
                first = false;
            } else {
                // log-odd prefixes hit both bounds with equality.
                assert!((rec.dispersion_ratio - 1.0).abs() < 1e-12);
                assert!((rec.min_gap_ratio - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(cd_stream_next(stream, &mut x), CdStatus::Exhausted);
        assert_eq!(cd_tracker_len(tracker), 64);
        assert_eq!(rec.n, 64);
        assert_eq!(
            cd_tracker_push(tracker, f64::INFINITY, ptr::null_mut()),
            CdStatus::InvalidArgument
        );
        cd_stream_free(stream);
        cd_tracker_free(tracker);

        cd_stream_free(ptr::null_mut());
        cd_tracker_free(ptr::null_mut());
        assert_eq!(cd_tracker_len(ptr::null()), 0);
        assert_eq!(cd_stream_next(ptr::null_mut(), &mut x), CdStatus::NullPointer);

        let bad = CString::new("nope:1").unwrap();
        assert_eq!(cd_stream_open(bad.as_ptr(), 4, &mut stream), CdStatus::InvalidArgument);
        let missing = CString::new("file:/nonexistent/points.txt").unwrap();
        assert_eq!(cd_stream_open(missing.as_ptr(), 4, &mut stream), CdStatus::Io);
        assert_eq!(cd_stream_open(ptr::null(), 4, &mut stream), CdStatus::NullPointer);
    }
}

#[test]
fn verification() {
    let mut count = u64::MAX;
    unsafe {
        assert_eq!(cd_verify_example1(2000, &mut count), CdStatus::Ok);
        assert_eq!(count, 0);
        let golden = CString::new("kronecker:golden").unwrap();
        count = u64::MAX;
        assert_eq!(cd_verify_w1(golden.as_ptr(), 100, &mut count), CdStatus::Ok);
        assert_eq!(count, 0);
        count = u64::MAX;
        assert_eq!(cd_verify_w2(golden.as_ptr(), 100, &mut count), CdStatus::Ok);
        assert_eq!(count, 0);
    }
}

#[test]
fn search_fills_buffer() {
    let mut points = [f64::NAN; 2];
    let mut j = 0.0;
    unsafe {
        let status = cd_search(2, 3, 7, 200, 0.25, 0.99, 2, points.as_mut_ptr(), &mut j);
        assert_eq!(status, CdStatus::Ok);
        assert_eq!(points[0], 0.0);
        // 0.5 / log2(4/3), the antipodal pair
        assert!((j - 1.204_710_419_826_604_5).abs() < 1e-6);
        let status = cd_search(1, 3, 7, 200, 0.25, 0.99, 2, points.as_mut_ptr(), &mut j);
        assert_eq!(status, CdStatus::InvalidArgument);
        assert!(last_error().contains("horizon"));
    }
}
