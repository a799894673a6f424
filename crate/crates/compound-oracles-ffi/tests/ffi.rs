//! Round-trip tests through the C ABI entry points.

use compound_oracles_ffi::*;

#[test]
fn version_is_a_c_string() {
    let ptr = co_version();
    let s = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
    assert_eq!(s, env!("CARGO_PKG_VERSION"));
}

#[test]
fn log_density_hand_value_and_domain_error() {
    let fam = co_family_new_gaussian_location();
    let mut out = 0.0f64;
    let status = unsafe { co_log_density(fam, 0.0, 0.0, &mut out) };
    assert_eq!(status, CoStatus::Ok);
    assert_eq!(out, -0.9189385332046727);
    co_family_free(fam);

    let fam = co_family_new_gaussian_scale();
    let status = unsafe { co_log_density(fam, -1.0, 0.0, &mut out) };
    assert_eq!(status, CoStatus::DomainError);
    co_family_free(fam);
}

#[test]
fn null_pointers_are_reported() {
    let mut out = 0.0f64;
    let status = unsafe { co_log_density(std::ptr::null(), 0.0, 0.0, &mut out) };
    assert_eq!(status, CoStatus::NullPointer);
    let fam = co_family_new_gaussian_location();
    let status = unsafe { co_log_density(fam, 0.0, 0.0, std::ptr::null_mut()) };
    assert_eq!(status, CoStatus::NullPointer);
    co_family_free(fam);
    co_family_free(std::ptr::null_mut()); // accepts null
}

#[test]
fn two_point_constructor_validates_members() {
    let fam = co_family_new_two_point(CoMemberKind::Location, 0.0, CoMemberKind::Scale, 3.0);
    assert!(!fam.is_null());
    co_family_free(fam);
    let bad = co_family_new_two_point(CoMemberKind::Location, 0.0, CoMemberKind::Scale, -1.0);
    assert!(bad.is_null());
}

#[test]
fn sampling_is_deterministic_per_seed_and_stream() {
    let fam = co_family_new_gaussian_location();
    let mut a = 0.0f64;
    let mut b = 0.0f64;
    unsafe {
        assert_eq!(co_sample(fam, 2.0, 7, 0, &mut a), CoStatus::Ok);
        assert_eq!(co_sample(fam, 2.0, 7, 0, &mut b), CoStatus::Ok);
    }
    assert_eq!(a, b);
    unsafe {
        assert_eq!(co_sample(fam, 2.0, 7, 1, &mut b), CoStatus::Ok);
    }
    assert_ne!(a, b);
    co_family_free(fam);
}

#[test]
fn rules_agree_across_engines() {
    let fam = co_family_new_gaussian_location();
    let mus = [0.0, 0.0, 1.0, 1.0];
    let ys = [0.3, -0.8, 1.4, 0.9];
    let mut simple = [0.0f64; 4];
    let mut via_enum = [0.0f64; 4];
    let mut via_perm = [0.0f64; 4];
    let mut via_tv = [0.0f64; 4];
    unsafe {
        assert_eq!(
            co_simple_rule(fam, mus.as_ptr(), ys.as_ptr(), 4, simple.as_mut_ptr()),
            CoStatus::Ok
        );
        assert_eq!(
            co_pi_rule(fam, CoEngine::Enum, mus.as_ptr(), ys.as_ptr(), 4, via_enum.as_mut_ptr()),
            CoStatus::Ok
        );
        assert_eq!(
            co_pi_rule(
                fam,
                CoEngine::Permanent,
                mus.as_ptr(),
                ys.as_ptr(),
                4,
                via_perm.as_mut_ptr()
            ),
            CoStatus::Ok
        );
        assert_eq!(
            co_pi_rule(
                fam,
                CoEngine::TwoValued,
                mus.as_ptr(),
                ys.as_ptr(),
                4,
                via_tv.as_mut_ptr()
            ),
            CoStatus::Ok
        );
    }
    for i in 0..4 {
        assert!((via_enum[i] - via_perm[i]).abs() < 1e-9);
        assert!((via_enum[i] - via_tv[i]).abs() < 1e-9);
        assert!(simple[i] >= 0.0 && simple[i] <= 1.0);
    }
    co_family_free(fam);
}

#[test]
fn capacity_errors_surface() {
    let fam = co_family_new_gaussian_location();
    let mus: Vec<f64> = (0..9).map(f64::from).collect();
    let ys = vec![0.0; 9];
    let mut out = vec![0.0; 9];
    let status = unsafe {
        co_pi_rule(
            fam,
            CoEngine::Enum,
            mus.as_ptr(),
            ys.as_ptr(),
            9,
            out.as_mut_ptr(),
        )
    };
    assert_eq!(status, CoStatus::CapacityError);
    co_family_free(fam);
}

#[test]
fn mc_gap_zero_for_equal_parameters() {
    let fam = co_family_new_gaussian_location();
    let mus = [0.5; 5];
    let mut report = CoGapReport::default();
    let status = unsafe {
        co_mc_gap(
            fam,
            CoEngine::TwoValued,
            mus.as_ptr(),
            5,
            64,
            3,
            &mut report,
        )
    };
    assert_eq!(status, CoStatus::Ok);
    assert_eq!(report.gap_sq, 0.0);
    assert_eq!(report.risk_diff, 0.0);
    assert_eq!(report.reps, 64);
    // With all labels equal both rules hit the truth exactly.
    assert_eq!(report.risk_s, 0.0);
    assert_eq!(report.risk_pi, 0.0);
    co_family_free(fam);
}

#[test]
fn permanent_and_esp_kernels() {
    // [[1, 2], [3, 4]] has permanent 10.
    let logs = [1f64.ln(), 2f64.ln(), 3f64.ln(), 4f64.ln()];
    let mut out_log = 0.0f64;
    let mut sign = 0i32;
    let status = unsafe { co_permanent_log(logs.as_ptr(), 2, &mut out_log, &mut sign) };
    assert_eq!(status, CoStatus::Ok);
    assert_eq!(sign, 1);
    assert!((out_log - 10f64.ln()).abs() < 1e-12);

    // Unit weights give binomial coefficients.
    let rhos = [0.0f64; 3];
    let mut table = [0.0f64; 4];
    let status = unsafe { co_esp_log(rhos.as_ptr(), 3, table.as_mut_ptr()) };
    assert_eq!(status, CoStatus::Ok);
    assert!((table[1] - 3f64.ln()).abs() < 1e-12);
    assert!((table[2] - 3f64.ln()).abs() < 1e-12);
    assert!(table[3].abs() < 1e-12);
}

#[test]
fn simple_rule_two_valued_midpoint() {
    let lr = [0.0f64; 4];
    let mut out = [0.0f64; 4];
    let status =
        unsafe { co_simple_rule_two_valued(lr.as_ptr(), 4, 2, 0.0, 1.0, out.as_mut_ptr()) };
    assert_eq!(status, CoStatus::Ok);
    for &v in &out {
        assert!((v - 0.5).abs() < 1e-15);
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("compound_oracles.h");
    assert!(header.exists(), "header not generated");
    // Syntax-check with the system C compiler when one is around.
    let gcc = std::process::Command::new("gcc")
        .args(["-std=c11", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status();
    match gcc {
        Ok(status) => assert!(status.success(), "header fails to compile as C11"),
        Err(_) => eprintln!("gcc unavailable; skipped header syntax check"),
    }
}
