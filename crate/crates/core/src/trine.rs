//! The trine measurement: three qubit effects with Bloch vectors at 120
//! degrees in the x-z plane, outcome values {0, +1, -1}.
//!
//! This is the worked example used by the game experiments. Its moment
//! operators have closed forms (`X = sigma_z / sqrt(3)`,
//! `sum x_i^2 E_i = (2/3) I - (1/3) sigma_x`), and the outcome variance of
//! a state with Bloch components `(x, z)` is `2/3 - x/3 - z^2/3`.
//!
//! Two unsharpness profiles ship with the measurement:
//!
//! * [`certified_profile`] carries the actual extrema: the variance over
//!   the Bloch ball ranges over `[1/4, 1]` (minimum at
//!   `(x, z) = (1/2, +-sqrt(3)/2)`, maximum at `(-1, 0)`), so the standard
//!   deviation floor is `1/2`; the third absolute central moment never
//!   exceeds 1 (attained at `(-1, 0)`).
//! * [`nominal_profile`] carries the conservative constants
//!   `sigma_minus = 1/3`, `M = 1` that are usually quoted for this
//!   measurement; `1/3` is the variance minimum of the `z = 0` slice and
//!   sits below the true deviation floor `1/2`, so every bound evaluated
//!   with it is valid, just loose.

use alloc::format;
use alloc::string::String;
use alloc::vec;

use crate::error::{CoreError, Result};
use crate::math;
use crate::operator::{Operator, PauliAxis};
use crate::povm::{Povm, UnsharpnessProfile};
use crate::states::{ProductState, SeparableState};

/// Global minimum of the trine outcome variance over all qubit states.
pub const TRINE_MIN_VARIANCE: f64 = 0.25;

/// Global maximum of the trine outcome variance over all qubit states.
pub const TRINE_MAX_VARIANCE: f64 = 1.0;

/// Bloch (x, z) points attaining [`TRINE_MIN_VARIANCE`].
pub fn trine_variance_argmin() -> [(f64, f64); 2] {
    let s = math::sqrt(3.0) / 2.0;
    [(0.5, s), (0.5, -s)]
}

/// The trine POVM: effects `(1/3)(I + m_i . sigma)` with
/// `m_0 = (1, 0, 0)`, `m_{+-1} = (-1/2, 0, +-sqrt(3)/2)`, and values
/// `E_0 -> 0`, `E_{+-1} -> +-1`.
pub fn trine_povm() -> Povm {
    let effect = |mx: f64, mz: f64| {
        Operator::identity(2)
            .add(&Operator::pauli(PauliAxis::X).scale(mx))
            .add(&Operator::pauli(PauliAxis::Z).scale(mz))
            .scale(1.0 / 3.0)
    };
    let s = math::sqrt(3.0) / 2.0;
    Povm::new(
        vec![effect(1.0, 0.0), effect(-0.5, s), effect(-0.5, -s)],
        vec![0.0, 1.0, -1.0],
    )
    .expect("static trine construction")
}

/// Closed-form outcome variance of the trine measurement at a Bloch point.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TrineClosedForm {
    pub bloch_x: f64,
    pub bloch_z: f64,
    pub variance: f64,
}

/// `Var[X] = <B> - <A>^2 = 2/3 - x/3 - z^2/3` for Bloch components
/// `(x, z)`; agrees with [`Povm::moments`] on the corresponding density
/// matrix. Restricted to the unit disk.
///
/// On the circle `x = cos t`, `z = sin t` this is
/// `1/3 + (cos^2 t - cos t)/3`, minimized at `cos t = 1/2` with value 1/4
/// and maximized at `cos t = -1` with value 1.
pub fn trine_variance(bloch_x: f64, bloch_z: f64) -> Result<TrineClosedForm> {
    if bloch_x * bloch_x + bloch_z * bloch_z > 1.0 + 1e-12 {
        return Err(CoreError::InvalidInput(format!(
            "Bloch norm exceeds 1: x = {bloch_x}, z = {bloch_z}"
        )));
    }
    Ok(TrineClosedForm {
        bloch_x,
        bloch_z,
        variance: 2.0 / 3.0 - bloch_x / 3.0 - bloch_z * bloch_z / 3.0,
    })
}

/// Certified unsharpness constants: deviation range `[1/2, 1]` from the
/// closed-form variance extrema, third-moment bound 1.
pub fn certified_profile() -> UnsharpnessProfile {
    UnsharpnessProfile::new(0.5, 1.0, 1.0).expect("static profile")
}

/// Conservative nominal constants `sigma_minus = 1/3`, `M = 1` (the
/// variance floor of the `z = 0` slice used as a deviation floor). Valid
/// for every bound since `1/3 < 1/2`.
pub fn nominal_profile() -> UnsharpnessProfile {
    UnsharpnessProfile::new(1.0 / 3.0, 1.0, 1.0).expect("static profile")
}

/// The i.i.d. `|+>` separable strategy: per-site mean 0 (matching a target
/// of 0) and per-site variance 1/3, the smallest the trine measurement
/// allows at mean 0.
pub fn separable_baseline(n: usize) -> Result<SeparableState> {
    let plus = ProductState::iid(Operator::bloch_density([1.0, 0.0, 0.0]), n)?;
    SeparableState::new(vec![1.0], vec![plus])
}

/// `round(n^beta)` window for the game ansatz; the actual window used is
/// recorded in experiment outputs.
pub fn window_for_beta(n: u64, beta: f64) -> Result<u64> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(CoreError::InvalidInput(format!(
            "beta must lie in (0, 1/2), got {beta}"
        )));
    }
    let l = math::round(math::powf(n as f64, beta)) as u64;
    if 2 * l > n {
        return Err(CoreError::InvalidInput(String::from(
            "rounded window exceeds N/2",
        )));
    }
    Ok(l)
}
