//! C ABI over the compound-oracles library.
//!
//! Families travel as opaque handles, vectors as flat (pointer, length)
//! buffers owned by the caller, and every fallible call returns a
//! [`CoStatus`]. Panics are caught at the boundary and reported as
//! `CO_STATUS_INTERNAL_PANIC`. The generated header lands in
//! `include/compound_oracles.h`.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use compound_oracles::error::Error;
use compound_oracles::families::{Family, GaussianMember, ParameterMultiset};
use compound_oracles::oracles::{
    pi_rule_two_valued, simple_rule, simple_rule_two_valued, two_valued_log_ratios, TwoValuedSpec,
};
use compound_oracles::risk::{mc_gap, Engine};

/// Status codes for every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    ContractError = 4,
    CapacityError = 5,
    NumericError = 6,
    InternalPanic = 7,
}

fn status_of(err: &Error) -> CoStatus {
    match err {
        Error::Domain(_) => CoStatus::DomainError,
        Error::Contract(_) => CoStatus::ContractError,
        Error::Capacity(_) => CoStatus::CapacityError,
        Error::Numeric(_) => CoStatus::NumericError,
    }
}

/// Opaque handle to an observation family.
pub struct CoFamily {
    inner: Family,
}

/// Which Gaussian member a two-point component uses.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoMemberKind {
    /// N(param, 1).
    Location = 0,
    /// N(0, param), param > 0.
    Scale = 1,
}

/// Which permutation-invariant engine to run.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoEngine {
    /// Brute-force enumeration, n <= 8.
    Enum = 0,
    /// Permanental minors, 2 <= n <= 17.
    Permanent = 1,
    /// Two-valued multisets, any n.
    TwoValued = 2,
}

impl CoEngine {
    fn to_engine(self) -> Engine {
        match self {
            CoEngine::Enum => Engine::Enum,
            CoEngine::Permanent => Engine::Permanent,
            CoEngine::TwoValued => Engine::TwoValued,
        }
    }
}

/// Flat result of a paired Monte Carlo risk comparison.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CoGapReport {
    pub gap_sq: f64,
    pub gap_sq_stderr: f64,
    pub risk_s: f64,
    pub risk_s_stderr: f64,
    pub risk_pi: f64,
    pub risk_pi_stderr: f64,
    pub risk_diff: f64,
    pub risk_diff_stderr: f64,
    pub pythagoras_residual: f64,
    pub pythagoras_stderr: f64,
    pub reps: u64,
    pub seed: u64,
}

fn member_of(kind: CoMemberKind, param: f64) -> GaussianMember {
    match kind {
        CoMemberKind::Location => GaussianMember::Location { mean: param },
        CoMemberKind::Scale => GaussianMember::Scale { variance: param },
    }
}

/// Static version string of the underlying library.
#[no_mangle]
pub extern "C" fn co_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// New unit-variance location family (parameter = mean).
#[no_mangle]
pub extern "C" fn co_family_new_gaussian_location() -> *mut CoFamily {
    Box::into_raw(Box::new(CoFamily {
        inner: Family::GaussianLocation,
    }))
}

/// New centered scale family (parameter = variance, must be positive).
#[no_mangle]
pub extern "C" fn co_family_new_gaussian_scale() -> *mut CoFamily {
    Box::into_raw(Box::new(CoFamily {
        inner: Family::GaussianScale,
    }))
}

/// New two-point family with member densities for labels 0 and 1.
/// Returns null when a member parameter is inadmissible.
#[no_mangle]
pub extern "C" fn co_family_new_two_point(
    kind0: CoMemberKind,
    param0: f64,
    kind1: CoMemberKind,
    param1: f64,
) -> *mut CoFamily {
    let family = Family::TwoPoint {
        zero: member_of(kind0, param0),
        one: member_of(kind1, param1),
    };
    if family.check_admissible(0.0).is_err() || family.check_admissible(1.0).is_err() {
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(CoFamily { inner: family }))
}

/// Frees a family handle; accepts null.
#[no_mangle]
pub extern "C" fn co_family_free(family: *mut CoFamily) {
    if !family.is_null() {
        drop(unsafe { Box::from_raw(family) });
    }
}

unsafe fn family_ref<'a>(family: *const CoFamily) -> Option<&'a Family> {
    family.as_ref().map(|f| &f.inner)
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() && len > 0 {
        None
    } else if len == 0 {
        Some(&[])
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn guarded(body: impl FnOnce() -> CoStatus) -> CoStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(CoStatus::InternalPanic)
}

/// log f_mu(y) with respect to Lebesgue measure.
///
/// # Safety
/// `family` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn co_log_density(
    family: *const CoFamily,
    mu: f64,
    y: f64,
    out: *mut f64,
) -> CoStatus {
    guarded(|| {
        let (Some(fam), false) = (family_ref(family), out.is_null()) else {
            return CoStatus::NullPointer;
        };
        match fam.log_density(mu, y) {
            Ok(v) => {
                *out = v;
                CoStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// One draw from F_mu off RNG substream (seed, stream).
///
/// # Safety
/// `family` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn co_sample(
    family: *const CoFamily,
    mu: f64,
    seed: u64,
    stream: u64,
    out: *mut f64,
) -> CoStatus {
    guarded(|| {
        let (Some(fam), false) = (family_ref(family), out.is_null()) else {
            return CoStatus::NullPointer;
        };
        let mut rng = compound_oracles::rng::RngStream::substream(seed, stream);
        match fam.sample_stream(mu, &mut rng) {
            Ok(v) => {
                *out = v;
                CoStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

unsafe fn rules_common(
    family: *const CoFamily,
    mus: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut f64,
) -> Result<(Family, ParameterMultiset, Vec<f64>), CoStatus> {
    let Some(fam) = family_ref(family) else {
        return Err(CoStatus::NullPointer);
    };
    let (Some(mus), Some(ys)) = (slice_arg(mus, n), slice_arg(ys, n)) else {
        return Err(CoStatus::NullPointer);
    };
    if out.is_null() {
        return Err(CoStatus::NullPointer);
    }
    if n == 0 {
        return Err(CoStatus::InvalidArgument);
    }
    let multiset = ParameterMultiset::new(mus.to_vec()).map_err(|e| status_of(&e))?;
    Ok((fam.clone(), multiset, ys.to_vec()))
}

/// Best simple symmetric rule; writes n estimates to `out`.
///
/// # Safety
/// `mus`, `ys` and `out` must point to n readable (resp. writable) doubles.
#[no_mangle]
pub unsafe extern "C" fn co_simple_rule(
    family: *const CoFamily,
    mus: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut f64,
) -> CoStatus {
    guarded(|| {
        let (fam, multiset, ys) = match rules_common(family, mus, ys, n, out) {
            Ok(v) => v,
            Err(s) => return s,
        };
        let result = compound_oracles::families::loglik_matrix(&fam, &multiset, &ys)
            .and_then(|ll| simple_rule(&ll, &multiset));
        match result {
            Ok(est) => {
                std::ptr::copy_nonoverlapping(est.values().as_ptr(), out, n);
                CoStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Best permutation-invariant rule via the chosen engine; writes n
/// estimates to `out`.
///
/// # Safety
/// `mus`, `ys` and `out` must point to n readable (resp. writable) doubles.
#[no_mangle]
pub unsafe extern "C" fn co_pi_rule(
    family: *const CoFamily,
    engine: CoEngine,
    mus: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut f64,
) -> CoStatus {
    guarded(|| {
        let (fam, multiset, ys) = match rules_common(family, mus, ys, n, out) {
            Ok(v) => v,
            Err(s) => return s,
        };
        let result = match engine.to_engine() {
            Engine::TwoValued => TwoValuedSpec::from_multiset(&multiset).and_then(|spec| {
                let lr = two_valued_log_ratios(&fam, &spec, &ys)?;
                pi_rule_two_valued(&lr, &spec)
            }),
            other => {
                compound_oracles::families::loglik_matrix(&fam, &multiset, &ys).and_then(|ll| {
                    match other {
                        Engine::Enum => compound_oracles::oracles::pi_rule_enum(&ll, &multiset),
                        _ => compound_oracles::oracles::pi_rule_permanent(&ll, &multiset),
                    }
                })
            }
        };
        match result {
            Ok(est) => {
                std::ptr::copy_nonoverlapping(est.values().as_ptr(), out, n);
                CoStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Simple symmetric rule for a two-valued multiset given log likelihood
/// ratios directly.
///
/// # Safety
/// `log_rho` must point to n readable doubles and `out` to n writable ones.
#[no_mangle]
pub unsafe extern "C" fn co_simple_rule_two_valued(
    log_rho: *const f64,
    n: usize,
    k: usize,
    mu0: f64,
    mu1: f64,
    out: *mut f64,
) -> CoStatus {
    guarded(|| {
        let Some(lr) = slice_arg(log_rho, n) else {
            return CoStatus::NullPointer;
        };
        if out.is_null() {
            return CoStatus::NullPointer;
        }
        let result =
            TwoValuedSpec::new(n, k, mu0, mu1).and_then(|spec| simple_rule_two_valued(lr, &spec));
        match result {
            Ok(est) => {
                std::ptr::copy_nonoverlapping(est.values().as_ptr(), out, n);
                CoStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Paired Monte Carlo comparison of the two rules; fills `out`.
///
/// # Safety
/// `mus` must point to n readable doubles and `out` to a `CoGapReport`.
#[no_mangle]
pub unsafe extern "C" fn co_mc_gap(
    family: *const CoFamily,
    engine: CoEngine,
    mus: *const f64,
    n: usize,
    reps: u64,
    seed: u64,
    out: *mut CoGapReport,
) -> CoStatus {
    guarded(|| {
        let Some(fam) = family_ref(family) else {
            return CoStatus::NullPointer;
        };
        let Some(mus) = slice_arg(mus, n) else {
            return CoStatus::NullPointer;
        };
        if out.is_null() {
            return CoStatus::NullPointer;
        }
        let multiset = match ParameterMultiset::new(mus.to_vec()) {
            Ok(m) => m,
            Err(e) => return status_of(&e),
        };
        match mc_gap(fam, &multiset, engine.to_engine(), reps, seed) {
            Ok(rep) => {
                *out = CoGapReport {
                    gap_sq: rep.gap_sq.mean,
                    gap_sq_stderr: rep.gap_sq.stderr,
                    risk_s: rep.risk_s.mean,
                    risk_s_stderr: rep.risk_s.stderr,
                    risk_pi: rep.risk_pi.mean,
                    risk_pi_stderr: rep.risk_pi.stderr,
                    risk_diff: rep.risk_diff.mean,
                    risk_diff_stderr: rep.risk_diff.stderr,
                    pythagoras_residual: rep.pythagoras_residual,
                    pythagoras_stderr: rep.pythagoras_stderr,
                    reps,
                    seed,
                };
                CoStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Log of the permanent of exp(log_entries), an n-by-n row-major matrix.
/// Writes the log magnitude and the sign (+1, 0, -1).
///
/// # Safety
/// `log_entries` must point to n*n readable doubles; `out_log` and
/// `out_sign` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn co_permanent_log(
    log_entries: *const f64,
    n: usize,
    out_log: *mut f64,
    out_sign: *mut i32,
) -> CoStatus {
    guarded(|| {
        let Some(entries) = slice_arg(log_entries, n.saturating_mul(n)) else {
            return CoStatus::NullPointer;
        };
        if out_log.is_null() || out_sign.is_null() {
            return CoStatus::NullPointer;
        }
        if n == 0 {
            return CoStatus::InvalidArgument;
        }
        let rows: Vec<Vec<f64>> = entries.chunks(n).map(|c| c.to_vec()).collect();
        let result = compound_oracles::families::LogLikelihoodMatrix::from_rows(rows)
            .and_then(|m| compound_oracles::exact::permanent_log(&m));
        match result {
            Ok(v) => {
                *out_log = v.log_abs;
                *out_sign = v.sign as i32;
                CoStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Elementary symmetric polynomials of exp(log_rhos) in log space; writes
/// n+1 values (e_0 through e_n) to `out`.
///
/// # Safety
/// `log_rhos` must point to n readable doubles and `out` to n+1 writable
/// ones.
#[no_mangle]
pub unsafe extern "C" fn co_esp_log(
    log_rhos: *const f64,
    n: usize,
    out: *mut f64,
) -> CoStatus {
    guarded(|| {
        let Some(rhos) = slice_arg(log_rhos, n) else {
            return CoStatus::NullPointer;
        };
        if out.is_null() {
            return CoStatus::NullPointer;
        }
        match compound_oracles::exact::esp_log(rhos) {
            Ok(table) => {
                std::ptr::copy_nonoverlapping(table.log_e.as_ptr(), out, n + 1);
                CoStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
