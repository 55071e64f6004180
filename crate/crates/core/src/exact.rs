//! Exact rational checks for the Dicke-window state.
//!
//! The window superposition has squared amplitudes `1/(2L+1)` on integer
//! `m`, so its `S_z` moments are rational numbers. These helpers evaluate
//! them in exact arithmetic; the tests and the acceptance suite use them to
//! pin the identities `<S_z> = 0` and `(DS_z)^2 = L(L+1)/3` without any
//! floating-point slack.

use num_rational::Ratio;

use crate::error::{CoreError, Result};

pub type Rational = Ratio<i128>;

fn window_checked(n_qubits: u64, l_cut: u64) -> Result<()> {
    if n_qubits == 0 || n_qubits % 2 != 0 {
        return Err(CoreError::InvalidInput(alloc::format!(
            "exact window moments need an even positive qubit count, got {n_qubits}"
        )));
    }
    if 2 * l_cut > n_qubits {
        return Err(CoreError::InvalidInput(alloc::format!(
            "window l_cut = {l_cut} exceeds J = {n_qubits}/2"
        )));
    }
    Ok(())
}

/// Exact `<S_z>` of the window state: `sum_{m=-L}^{L} m / (2L+1)`.
pub fn window_sz_mean(n_qubits: u64, l_cut: u64) -> Result<Rational> {
    window_checked(n_qubits, l_cut)?;
    let l = l_cut as i128;
    let mut acc = Rational::new(0, 1);
    let weight = Rational::new(1, 2 * l + 1);
    for m in -l..=l {
        acc += Rational::from_integer(m) * weight;
    }
    Ok(acc)
}

/// Exact `(DS_z)^2` of the window state; equals `L(L+1)/3`.
pub fn window_sz_variance(n_qubits: u64, l_cut: u64) -> Result<Rational> {
    window_checked(n_qubits, l_cut)?;
    let l = l_cut as i128;
    let weight = Rational::new(1, 2 * l + 1);
    let mut first = Rational::new(0, 1);
    let mut second = Rational::new(0, 1);
    for m in -l..=l {
        first += Rational::from_integer(m) * weight;
        second += Rational::from_integer(m * m) * weight;
    }
    Ok(second - first * first)
}

/// Exact Clebsch-Gordan weights `(alpha^2, beta^2)` for splitting off one
/// qubit from `|J, m>` with `k = m + J`: `alpha^2 = k/(2J)` carries the
/// `|1>` branch and `beta^2 = (2J-k)/(2J)` the `|0>` branch. They sum to
/// one identically.
pub fn cg_weights(two_j: u64, k: u64) -> Result<(Rational, Rational)> {
    if two_j == 0 || k > two_j {
        return Err(CoreError::InvalidInput(alloc::format!(
            "cg_weights requires 0 <= k <= 2J with 2J > 0, got k = {k}, 2J = {two_j}"
        )));
    }
    let alpha = Rational::new(k as i128, two_j as i128);
    let beta = Rational::new((two_j - k) as i128, two_j as i128);
    Ok((alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_mean_is_exactly_zero() {
        for n in (2..=64).step_by(2) {
            for l in 0..=(n / 2) {
                assert_eq!(window_sz_mean(n, l).unwrap(), Rational::new(0, 1));
            }
        }
    }

    #[test]
    fn window_variance_is_exactly_l_l_plus_one_over_three() {
        for n in (2..=64).step_by(2) {
            for l in 0..=(n / 2) {
                let expect = Rational::new((l * (l + 1)) as i128, 3);
                assert_eq!(window_sz_variance(n, l).unwrap(), expect);
            }
        }
    }

    #[test]
    fn cg_weights_sum_to_one_exactly() {
        for two_j in 1..=64u64 {
            for k in 0..=two_j {
                let (a, b) = cg_weights(two_j, k).unwrap();
                assert_eq!(a + b, Rational::new(1, 1));
            }
        }
    }

    #[test]
    fn invalid_windows_are_rejected() {
        assert!(window_sz_mean(3, 1).is_err());
        assert!(window_sz_variance(4, 3).is_err());
        assert!(cg_weights(4, 5).is_err());
    }
}
