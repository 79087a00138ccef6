//! Single-mode-pair receiver circuits built from the Gaussian primitives.
//!
//! QI chain, per signal-idler pair:
//!
//! ```text
//! vacuum² ──TMSV(N_S)── signal ──BPSK── loss(κ, N_B/(1−κ)) ──┐
//!                   └── idler ──loss(κ_I, 0)─────────────┐    │
//!        vacuum ──────────────────────────── conj(G_A) ──┼────┘
//!                                          loss(κ_R, 0) ─┴─ 50:50 → X, Y
//! ```
//!
//! The conjugator is a two-mode squeezer on (fresh vacuum, received mode)
//! read out on the vacuum port, giving `a_C = √G v + √(G−1) a_R†`. The
//! received mode is then traced out, so the state stays at three modes.
//!
//! CI chain: coherent signal `√N_S` through the same thermal channel, mixed on
//! a 50:50 beamsplitter with a real local oscillator of amplitude `α_LO`.

use crate::detection_models::{Phase, SystemParams};
use crate::error::Result;

use super::{PhotonStats, QuadratureState};

/// Local-oscillator amplitude used for the homodyne oracle. The normalised
/// variance carries an `O(N_B²/α²)` correction, while rounding in the output
/// means grows like `α·ε`; `10⁴` keeps both below `10⁻⁵` relative at the
/// reference point.
pub const DEFAULT_LO_AMPLITUDE: f64 = 1e4;

const SIGNAL: usize = 0;
const IDLER: usize = 1;

/// Returned signal and stored idler after the channel, before the receiver.
pub fn qi_received_state(p: &SystemParams, phase: Phase) -> Result<QuadratureState> {
    p.validate()?;
    let mut s = QuadratureState::vacuum(2)?.two_mode_squeeze(SIGNAL, IDLER, p.n_s)?;
    if phase == Phase::Minus {
        s = s.flip_sign(SIGNAL)?;
    }
    // target absent is kappa = 0: the environment fully replaces the signal
    let env = if p.kappa < 1.0 {
        p.n_b / (1.0 - p.kappa)
    } else {
        0.0
    };
    s.thermal_loss(SIGNAL, p.kappa, env)
}

/// Output ports `X = (I + C)/√2` and `Y = (I − C)/√2` of the phase-conjugate
/// receiver, as modes `0, 1`.
pub fn qi_receiver_state(p: &SystemParams, phase: Phase) -> Result<QuadratureState> {
    let received = qi_received_state(p, phase)?;
    let (s, conj) = received.append_thermal(0.0)?;
    let s = s
        .two_mode_squeeze(conj, SIGNAL, p.g_a - 1.0)?
        .trace_out(SIGNAL)?;
    // after the trace: idler = 0, conjugate = 1
    let (idler, conj) = (0, 1);
    s.thermal_loss(conj, p.kappa_r, 0.0)?
        .thermal_loss(idler, p.kappa_i, 0.0)?
        .beamsplitter(idler, conj, 0.5)
}

/// Per-mode statistics of `N_X − N_Y` at the phase-conjugate receiver.
pub fn qi_output_stats(p: &SystemParams, phase: Phase) -> Result<PhotonStats> {
    qi_receiver_state(p, phase)?.photon_diff_stats(0, 1)
}

/// Per-mode statistics of `N_Y − N_X` at the CI homodyne receiver, normalised
/// by the local oscillator: mean divided by `α_LO`, variance by `α_LO²`.
pub fn ci_output_stats(p: &SystemParams, lo_amplitude: f64) -> Result<PhotonStats> {
    p.validate()?;
    let env = if p.kappa < 1.0 {
        p.n_b / (1.0 - p.kappa)
    } else {
        0.0
    };
    let (signal, lo) = (0, 1);
    let s = QuadratureState::vacuum(2)?
        .displace(signal, p.n_s.sqrt(), 0.0)?
        .thermal_loss(signal, p.kappa, env)?
        .displace(lo, lo_amplitude, 0.0)?
        // out_0 = (a_R + a_LO)/√2 = Y, out_1 = (a_R − a_LO)/√2 = X
        .beamsplitter(signal, lo, 0.5)?;
    let raw = s.photon_diff_stats(0, 1)?;
    Ok(PhotonStats {
        mean: raw.mean / lo_amplitude,
        variance: raw.variance / (lo_amplitude * lo_amplitude),
    })
}
