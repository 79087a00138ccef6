//! C ABI for `qidetect`.
//!
//! Every fallible function returns a [`QidStatus`]; on failure a message is
//! available from [`qid_last_error_message`] on the same thread. Handles are
//! opaque and owned by the caller once returned, and must be released with
//! the matching `_free` function. Enumerations are passed as `uint32_t`
//! holding a [`QidModel`], [`QidPhase`] or [`QidLabel`] value.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qidetect::detection_models::{advantage_db, decision_moments, fit_zeta, snr_ci, snr_qi};
use qidetect::gaussian_optics::circuit::qi_output_stats;
use qidetect::montecarlo::simulate_decisions;
use qidetect::oracle::compare_qi;
use qidetect::roc::{pd_at_pf, q_function, q_inverse, roc_analytic, roc_empirical, threshold_grid};
use qidetect::{
    Error, ErrorKind, HypothesisMoments, Label, Model, Phase, RocCurve, SampleSet, SimConfig,
    SystemParams,
};

/// Result code of every fallible call. Codes 1 to 4 match the command-line
/// exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QidStatus {
    Ok = 0,
    Io = 1,
    Config = 2,
    Data = 3,
    Physics = 4,
    NullPointer = 5,
    InvalidArgument = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QidModel {
    Ci = 0,
    Qi = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QidPhase {
    Plus = 0,
    Minus = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QidLabel {
    /// Target absent.
    H0 = 0,
    /// Target present.
    H1 = 1,
}

/// Plain copy of the scenario parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QidParamValues {
    /// Mean signal photons per mode.
    pub n_s: f64,
    /// Mean thermal noise photons per mode.
    pub n_b: f64,
    /// Target transmissivity.
    pub kappa: f64,
    /// Idler storage transmissivity.
    pub kappa_i: f64,
    /// Imperfection factor on the QI SNR.
    pub zeta: f64,
    /// Modes per decision.
    pub m: f64,
    /// Phase-conjugator gain.
    pub g_a: f64,
    /// Receiver transmissivity.
    pub kappa_r: f64,
}

/// Decision statistic moments under each hypothesis.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QidMoments {
    pub mu0: f64,
    pub sigma0: f64,
    pub mu1: f64,
    pub sigma1: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QidRocPoint {
    pub beta: f64,
    pub p_f: f64,
    pub p_d: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QidPhotonStats {
    pub mean: f64,
    pub variance: f64,
}

/// One Gaussian-state circuit against closed-form comparison, per mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QidOracleRow {
    pub mean_exact: f64,
    pub mean_closed: f64,
    /// NaN when the gain is one and the comparison is undefined.
    pub variance_exact: f64,
    pub variance_closed: f64,
    /// 1 when both moments are within tolerance.
    pub passed: i32,
}

/// Opaque, validated scenario parameters.
pub struct QidParams(SystemParams);

/// Opaque ROC curve, points ordered by descending threshold.
pub struct QidRoc(RocCurve);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

enum Failure {
    Core(Error),
    Status(QidStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(kind: ErrorKind) -> QidStatus {
    match kind {
        ErrorKind::Io => QidStatus::Io,
        ErrorKind::Config => QidStatus::Config,
        ErrorKind::Data => QidStatus::Data,
        ErrorKind::Physics => QidStatus::Physics,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QidStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            QidStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(&e.to_string());
            status_of(e.kind())
        }
        Ok(Err(Failure::Status(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            QidStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure::Status(QidStatus::NullPointer, format!("`{name}` is null"))
}

fn invalid(message: String) -> Failure {
    Failure::Status(QidStatus::InvalidArgument, message)
}

/// # Safety
/// `p` is null or valid for reads of `T`.
unsafe fn get<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

/// # Safety
/// `p` is null or valid for writes of `T`.
unsafe fn put<T>(p: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

/// # Safety
/// `p` is null or valid for reads of `len` elements.
unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    match (p.is_null(), len) {
        (_, 0) => Ok(&[]),
        (true, _) => Err(null(name)),
        (false, _) => Ok(std::slice::from_raw_parts(p, len)),
    }
}

fn model(value: u32) -> Result<Model, Failure> {
    match value {
        0 => Ok(Model::Ci),
        1 => Ok(Model::Qi),
        v => Err(invalid(format!("unknown model {v}"))),
    }
}

fn phase(value: u32) -> Result<Phase, Failure> {
    match value {
        0 => Ok(Phase::Plus),
        1 => Ok(Phase::Minus),
        v => Err(invalid(format!("unknown phase {v}"))),
    }
}

fn label(value: u32) -> Result<Label, Failure> {
    match value {
        0 => Ok(Label::H0),
        1 => Ok(Label::H1),
        v => Err(invalid(format!("unknown label {v}"))),
    }
}

fn to_core(m: &QidMoments) -> Result<HypothesisMoments, Failure> {
    Ok(HypothesisMoments::new(m.mu0, m.sigma0, m.mu1, m.sigma1)?)
}

fn from_core(m: &HypothesisMoments) -> QidMoments {
    QidMoments {
        mu0: m.mu0,
        sigma0: m.sigma0,
        mu1: m.mu1,
        sigma1: m.sigma1,
    }
}

fn boxed_roc(out: *mut *mut QidRoc, curve: RocCurve) -> Result<(), Failure> {
    // SAFETY: caller guarantees `out` is null or writable.
    unsafe { put(out, "out", Box::into_raw(Box::new(QidRoc(curve)))) }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qid_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn qid_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Validates `values` and returns a new handle in `*out`.
///
/// # Safety
/// `values` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_params_new(
    values: *const QidParamValues,
    out: *mut *mut QidParams,
) -> QidStatus {
    guard(|| {
        let v = get(values, "values")?;
        let p = SystemParams {
            n_s: v.n_s,
            n_b: v.n_b,
            kappa: v.kappa,
            kappa_i: v.kappa_i,
            zeta: v.zeta,
            m: v.m,
            g_a: v.g_a,
            kappa_r: v.kappa_r,
        };
        p.validate()?;
        put(out, "out", Box::into_raw(Box::new(QidParams(p))))
    })
}

/// The reference scenario.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qid_params_fig4(out: *mut *mut QidParams) -> QidStatus {
    guard(|| {
        put(
            out,
            "out",
            Box::into_raw(Box::new(QidParams(SystemParams::fig4()))),
        )
    })
}

/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_params_values(
    params: *const QidParams,
    out: *mut QidParamValues,
) -> QidStatus {
    guard(|| {
        let p = get(params, "params")?.0;
        put(
            out,
            "out",
            QidParamValues {
                n_s: p.n_s,
                n_b: p.n_b,
                kappa: p.kappa,
                kappa_i: p.kappa_i,
                zeta: p.zeta,
                m: p.m,
                g_a: p.g_a,
                kappa_r: p.kappa_r,
            },
        )
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `params` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qid_params_free(params: *mut QidParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Decision-level SNR of `model`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_snr(
    params: *const QidParams,
    model_id: u32,
    out: *mut f64,
) -> QidStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        let snr = match model(model_id)? {
            Model::Ci => snr_ci(p)?,
            Model::Qi => snr_qi(p)?,
        };
        put(out, "out", snr)
    })
}

/// QI over CI SNR advantage in dB. Fails with `Physics` when the CI SNR
/// vanishes.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_advantage_db(params: *const QidParams, out: *mut f64) -> QidStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        let db = advantage_db(p)?.ok_or(Failure::Status(
            QidStatus::Physics,
            "advantage undefined: the CI SNR is zero".into(),
        ))?;
        put(out, "out", db)
    })
}

/// Decision moments of `model`; QI uses the `+` phase.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_moments(
    params: *const QidParams,
    model_id: u32,
    out: *mut QidMoments,
) -> QidStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        let m = decision_moments(p, model(model_id)?)?;
        put(out, "out", from_core(&m))
    })
}

/// Imperfection factor reproducing a measured advantage.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qid_fit_zeta(advantage_db: f64, kappa_i: f64, out: *mut f64) -> QidStatus {
    guard(|| put(out, "out", fit_zeta(advantage_db, kappa_i)?))
}

/// Standard normal tail probability `P(Z > x)`.
#[no_mangle]
pub extern "C" fn qid_q_function(x: f64) -> f64 {
    q_function(x)
}

/// Inverse tail probability for `p` in `(0, 1)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qid_q_inverse(p: f64, out: *mut f64) -> QidStatus {
    guard(|| put(out, "out", q_inverse(p)?))
}

/// Detection probability at false-alarm rate `p_f`.
///
/// # Safety
/// `moments` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_pd_at_pf(
    moments: *const QidMoments,
    p_f: f64,
    out: *mut f64,
) -> QidStatus {
    guard(|| {
        let m = to_core(get(moments, "moments")?)?;
        put(out, "out", pd_at_pf(&m, p_f)?)
    })
}

/// Analytic ROC on `n_thresholds` evenly spaced thresholds.
///
/// # Safety
/// `moments` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_roc_analytic(
    moments: *const QidMoments,
    n_thresholds: usize,
    out: *mut *mut QidRoc,
) -> QidStatus {
    guard(|| {
        let m = to_core(get(moments, "moments")?)?;
        let curve = roc_analytic(&m, &threshold_grid(&m, n_thresholds)?);
        boxed_roc(out, curve)
    })
}

/// Empirical ROC of two decision sets at the given thresholds.
///
/// # Safety
/// Each array must be readable for its length and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_roc_empirical(
    absent: *const f64,
    n_absent: usize,
    present: *const f64,
    n_present: usize,
    thresholds: *const f64,
    n_thresholds: usize,
    out: *mut *mut QidRoc,
) -> QidStatus {
    guard(|| {
        let a = SampleSet::new(Label::H0, slice(absent, n_absent, "absent")?.to_vec())?;
        let b = SampleSet::new(Label::H1, slice(present, n_present, "present")?.to_vec())?;
        let betas = slice(thresholds, n_thresholds, "thresholds")?;
        if betas.iter().any(|x| !x.is_finite()) {
            return Err(invalid("thresholds must be finite".into()));
        }
        boxed_roc(out, roc_empirical(&a, &b, betas)?)
    })
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `roc` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qid_roc_len(roc: *const QidRoc) -> usize {
    roc.as_ref().map_or(0, |r| r.0.len())
}

/// # Safety
/// `roc` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_roc_point(
    roc: *const QidRoc,
    index: usize,
    out: *mut QidRocPoint,
) -> QidStatus {
    guard(|| {
        let curve = &get(roc, "roc")?.0;
        let pt = curve.points.get(index).ok_or_else(|| {
            invalid(format!(
                "index {index} out of range for {} points",
                curve.len()
            ))
        })?;
        put(
            out,
            "out",
            QidRocPoint {
                beta: pt.beta,
                p_f: pt.p_f,
                p_d: pt.p_d,
            },
        )
    })
}

/// Releases a curve; null is ignored.
///
/// # Safety
/// `roc` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qid_roc_free(roc: *mut QidRoc) {
    if !roc.is_null() {
        drop(Box::from_raw(roc));
    }
}

/// Fills `buffer` with `len` simulated decisions. The output depends only on
/// the parameters, model, label, seed and `len`.
///
/// # Safety
/// `params` must be a live handle and `buffer` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn qid_simulate_decisions(
    params: *const QidParams,
    model_id: u32,
    label_id: u32,
    seed: u64,
    buffer: *mut f64,
    len: usize,
) -> QidStatus {
    guard(|| {
        let p = get(params, "params")?.0;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let cfg = SimConfig::new(p, model(model_id)?, len, seed);
        let set = simulate_decisions(&cfg, label(label_id)?)?;
        std::slice::from_raw_parts_mut(buffer, len).copy_from_slice(set.values());
        Ok(())
    })
}

/// Per-mode photon-number difference at the phase-conjugate receiver,
/// from the Gaussian-state circuit.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_qi_output_stats(
    params: *const QidParams,
    phase_id: u32,
    out: *mut QidPhotonStats,
) -> QidStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        let s = qi_output_stats(p, phase(phase_id)?)?;
        put(
            out,
            "out",
            QidPhotonStats {
                mean: s.mean,
                variance: s.variance,
            },
        )
    })
}

/// Compares the QI circuit with its closed-form moments.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qid_oracle_qi(
    params: *const QidParams,
    phase_id: u32,
    out: *mut QidOracleRow,
) -> QidStatus {
    guard(|| {
        let p = &get(params, "params")?.0;
        let c = compare_qi(p, phase(phase_id)?)?;
        put(
            out,
            "out",
            QidOracleRow {
                mean_exact: c.mean_exact,
                mean_closed: c.mean_closed,
                variance_exact: c.variance_exact.unwrap_or(f64::NAN),
                variance_closed: c.variance_closed,
                passed: i32::from(c.passed()),
            },
        )
    })
}

#[cfg(test)]
mod tests {
    use std::ffi::CStr;

    use super::*;

    #[test]
    fn status_codes_follow_error_kinds() {
        assert_eq!(status_of(ErrorKind::Io) as i32, ErrorKind::Io.exit_code());
        assert_eq!(
            status_of(ErrorKind::Config) as i32,
            ErrorKind::Config.exit_code()
        );
        assert_eq!(
            status_of(ErrorKind::Data) as i32,
            ErrorKind::Data.exit_code()
        );
        assert_eq!(
            status_of(ErrorKind::Physics) as i32,
            ErrorKind::Physics.exit_code()
        );
    }

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, QidStatus::Panic);
        let msg = unsafe { CStr::from_ptr(qid_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn interior_nul_is_replaced() {
        set_last_error("a\0b");
        let msg = unsafe { CStr::from_ptr(qid_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }

    #[test]
    fn enum_values_are_checked() {
        assert!(model(2).is_err());
        assert!(phase(7).is_err());
        assert!(label(u32::MAX).is_err());
        assert_eq!(QidModel::Qi as u32, 1);
        assert_eq!(QidLabel::H1 as u32, 1);
        assert_eq!(QidPhase::Minus as u32, 1);
    }
}
