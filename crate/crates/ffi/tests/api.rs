//! The C ABI exercised from Rust.

use std::ffi::CStr;
use std::ptr;

use qidetect_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qid_last_error_message()) }
        .to_str()
        .unwrap()
        .to_owned()
}

struct Params(*mut QidParams);

impl Params {
    fn fig4() -> Self {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { qid_params_fig4(&mut p) }, QidStatus::Ok);
        Self(p)
    }
}

impl Drop for Params {
    fn drop(&mut self) {
        unsafe { qid_params_free(self.0) }
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(qid_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn reference_scenario_values() {
    let p = Params::fig4();
    let mut snr = [0.0; 2];
    unsafe {
        assert_eq!(
            qid_snr(p.0, QidModel::Ci as u32, &mut snr[0]),
            QidStatus::Ok
        );
        assert_eq!(
            qid_snr(p.0, QidModel::Qi as u32, &mut snr[1]),
            QidStatus::Ok
        );
    }
    assert!((snr[1] / snr[0] - 2.0).abs() < 1e-12);
    let mut db = 0.0;
    assert_eq!(unsafe { qid_advantage_db(p.0, &mut db) }, QidStatus::Ok);
    assert!((db - 3.0103).abs() < 1e-4);

    let mut m = QidMoments {
        mu0: 0.0,
        sigma0: 0.0,
        mu1: 0.0,
        sigma1: 0.0,
    };
    assert_eq!(
        unsafe { qid_moments(p.0, QidModel::Qi as u32, &mut m) },
        QidStatus::Ok
    );
    let mut pd = 0.0;
    assert_eq!(unsafe { qid_pd_at_pf(&m, 1e-4, &mut pd) }, QidStatus::Ok);
    assert!((pd - 0.8755).abs() < 1e-3);

    let mut zeta = 0.0;
    assert_eq!(unsafe { qid_fit_zeta(1.48, 1.0, &mut zeta) }, QidStatus::Ok);
    assert!((zeta - 0.7030).abs() < 1e-4);
}

#[test]
fn params_round_trip_and_validation() {
    let p = Params::fig4();
    let mut v = QidParamValues {
        n_s: 0.0,
        n_b: 0.0,
        kappa: 0.0,
        kappa_i: 0.0,
        zeta: 0.0,
        m: 0.0,
        g_a: 0.0,
        kappa_r: 0.0,
    };
    assert_eq!(unsafe { qid_params_values(p.0, &mut v) }, QidStatus::Ok);
    assert_eq!(v.n_b, 1300.0);
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { qid_params_new(&v, &mut q) }, QidStatus::Ok);
    unsafe { qid_params_free(q) };

    let bad = QidParamValues { kappa: 1.5, ..v };
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { qid_params_new(&bad, &mut q) }, QidStatus::Physics);
    assert!(q.is_null());
    assert!(last_error().contains("kappa"), "{}", last_error());
}

#[test]
fn errors_are_reported() {
    let mut x = 0.0;
    assert_eq!(unsafe { qid_q_inverse(0.0, &mut x) }, QidStatus::Physics);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { qid_q_inverse(0.5, &mut x) }, QidStatus::Ok);
    assert!(last_error().is_empty());
    assert_eq!(
        unsafe { qid_q_inverse(0.5, ptr::null_mut()) },
        QidStatus::NullPointer
    );
    assert_eq!(
        unsafe { qid_fit_zeta(4.0, 1.0, &mut x) },
        QidStatus::Physics
    );

    let p = Params::fig4();
    assert_eq!(
        unsafe { qid_snr(p.0, 9, &mut x) },
        QidStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { qid_snr(ptr::null(), 0, &mut x) },
        QidStatus::NullPointer
    );
    assert_eq!(qid_q_function(0.0), 0.5);
}

#[test]
fn roc_handles() {
    let p = Params::fig4();
    let mut m = QidMoments {
        mu0: 0.0,
        sigma0: 0.0,
        mu1: 0.0,
        sigma1: 0.0,
    };
    assert_eq!(
        unsafe { qid_moments(p.0, QidModel::Ci as u32, &mut m) },
        QidStatus::Ok
    );
    let mut roc = ptr::null_mut();
    assert_eq!(unsafe { qid_roc_analytic(&m, 64, &mut roc) }, QidStatus::Ok);
    assert_eq!(unsafe { qid_roc_len(roc) }, 64);
    let mut prev = QidRocPoint {
        beta: f64::INFINITY,
        p_f: 0.0,
        p_d: 0.0,
    };
    for i in 0..64 {
        let mut pt = prev;
        assert_eq!(unsafe { qid_roc_point(roc, i, &mut pt) }, QidStatus::Ok);
        assert!(pt.beta < prev.beta && pt.p_f >= prev.p_f && pt.p_d >= prev.p_d);
        prev = pt;
    }
    assert_eq!(
        unsafe { qid_roc_point(roc, 64, &mut prev) },
        QidStatus::InvalidArgument
    );
    unsafe { qid_roc_free(roc) };
    unsafe { qid_roc_free(ptr::null_mut()) };
    assert_eq!(unsafe { qid_roc_len(ptr::null()) }, 0);
}

#[test]
fn simulation_is_seeded_and_feeds_empirical_roc() {
    let p = Params::fig4();
    let n = 5000;
    let mut h0 = vec![0.0; n];
    let mut h1 = vec![0.0; n];
    let mut again = vec![0.0; n];
    unsafe {
        let qi = QidModel::Qi as u32;
        assert_eq!(
            qid_simulate_decisions(p.0, qi, QidLabel::H0 as u32, 3, h0.as_mut_ptr(), n),
            QidStatus::Ok
        );
        assert_eq!(
            qid_simulate_decisions(p.0, qi, QidLabel::H1 as u32, 3, h1.as_mut_ptr(), n),
            QidStatus::Ok
        );
        assert_eq!(
            qid_simulate_decisions(p.0, qi, QidLabel::H1 as u32, 3, again.as_mut_ptr(), n),
            QidStatus::Ok
        );
        assert_eq!(
            qid_simulate_decisions(p.0, qi, QidLabel::H1 as u32, 3, ptr::null_mut(), n),
            QidStatus::NullPointer
        );
    }
    assert_eq!(h1, again);
    let mean = h1.iter().sum::<f64>() / n as f64;
    assert!(mean > 1.5e6 && mean < 2.5e6, "{mean}");

    let betas = [-1e7, 0.0, 1e6, 1e7];
    let mut roc = ptr::null_mut();
    let status = unsafe {
        qid_roc_empirical(
            h0.as_ptr(),
            n,
            h1.as_ptr(),
            n,
            betas.as_ptr(),
            betas.len(),
            &mut roc,
        )
    };
    assert_eq!(status, QidStatus::Ok);
    let mut pt = QidRocPoint {
        beta: 0.0,
        p_f: 0.0,
        p_d: 0.0,
    };
    assert_eq!(unsafe { qid_roc_point(roc, 3, &mut pt) }, QidStatus::Ok);
    assert_eq!((pt.p_f, pt.p_d), (1.0, 1.0));
    unsafe { qid_roc_free(roc) };

    let status = unsafe {
        qid_roc_empirical(
            h0.as_ptr(),
            0,
            h1.as_ptr(),
            n,
            betas.as_ptr(),
            betas.len(),
            &mut roc,
        )
    };
    assert_eq!(status, QidStatus::Data);
}

#[test]
fn oracle_at_reference_point() {
    let p = Params::fig4();
    let mut row = QidOracleRow {
        mean_exact: 0.0,
        mean_closed: 0.0,
        variance_exact: 0.0,
        variance_closed: 0.0,
        passed: 0,
    };
    assert_eq!(
        unsafe { qid_oracle_qi(p.0, QidPhase::Minus as u32, &mut row) },
        QidStatus::Ok
    );
    assert_eq!(row.passed, 1);
    assert!(row.mean_exact < 0.0);
    assert!(((row.mean_exact - row.mean_closed) / row.mean_closed).abs() < 1e-9);
    let mut stats = QidPhotonStats {
        mean: 0.0,
        variance: 0.0,
    };
    assert_eq!(
        unsafe { qid_qi_output_stats(p.0, QidPhase::Plus as u32, &mut stats) },
        QidStatus::Ok
    );
    assert!(stats.mean > 0.0 && stats.variance > 0.0);
}
