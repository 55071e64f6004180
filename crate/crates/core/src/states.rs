//! Input-state representations: product states, separable mixtures, and
//! permutation-symmetric spin-J states.
//!
//! A symmetric `N`-qubit pure state is stored as `2J + 1` coefficients over
//! `|J, m>` with `J = N/2` (see the crate-level conventions). The flat
//! Dicke-window superposition `sum_{|m| <= L} |J, m> / sqrt(2L+1)` is the
//! entangled input used by the game experiments; its spin moments have
//! closed forms that the tests pin down exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::math;
use crate::operator::{C64, Operator};
use crate::povm::validate_density_matrix;

/// Normalization tolerance for symmetric-state coefficients.
const NORM_TOL: f64 = 1e-12;

/// An N-qubit product state. Factor storage is either one shared qubit
/// density matrix (i.i.d.) or one matrix per site.
#[derive(Clone, Debug)]
pub struct ProductState {
    factors: Factors,
}

#[derive(Clone, Debug)]
enum Factors {
    Iid { factor: Operator, n: usize },
    PerSite(Vec<Operator>),
}

impl ProductState {
    /// i.i.d. product of `n` copies of one qubit state.
    pub fn iid(factor: Operator, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::InvalidInput(String::from(
                "product state needs at least one site",
            )));
        }
        check_qubit_density(&factor)?;
        Ok(Self {
            factors: Factors::Iid { factor, n },
        })
    }

    /// Product with an explicit factor per site.
    pub fn from_factors(factors: Vec<Operator>) -> Result<Self> {
        if factors.is_empty() {
            return Err(CoreError::InvalidInput(String::from(
                "product state needs at least one site",
            )));
        }
        for f in &factors {
            check_qubit_density(f)?;
        }
        Ok(Self {
            factors: Factors::PerSite(factors),
        })
    }

    pub fn len(&self) -> usize {
        match &self.factors {
            Factors::Iid { n, .. } => *n,
            Factors::PerSite(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn factor(&self, site: usize) -> &Operator {
        match &self.factors {
            Factors::Iid { factor, .. } => factor,
            Factors::PerSite(v) => &v[site],
        }
    }

    /// Distinct factors with their multiplicities, in site order. For the
    /// i.i.d. case this is a single entry.
    pub fn distinct_factors(&self) -> Vec<(&Operator, usize)> {
        match &self.factors {
            Factors::Iid { factor, n } => vec![(factor, *n)],
            Factors::PerSite(v) => v.iter().map(|f| (f, 1)).collect(),
        }
    }
}

fn check_qubit_density(op: &Operator) -> Result<()> {
    if op.dim() != 2 {
        return Err(CoreError::InvalidInput(String::from(
            "product-state factors must be qubits",
        )));
    }
    validate_density_matrix(op)
}

/// A convex mixture of product states of a common length.
#[derive(Clone, Debug)]
pub struct SeparableState {
    weights: Vec<f64>,
    components: Vec<ProductState>,
}

impl SeparableState {
    pub fn new(weights: Vec<f64>, components: Vec<ProductState>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(CoreError::InvalidInput(String::from(
                "separable state needs matching nonempty weights and components",
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(CoreError::InvalidInput(String::from(
                "separable weights must be positive",
            )));
        }
        let total: f64 = weights.iter().sum();
        if math::abs(total - 1.0) > 1e-12 {
            return Err(CoreError::InvalidInput(format!(
                "separable weights sum to {total}, not 1"
            )));
        }
        let n = components[0].len();
        if components.iter().any(|c| c.len() != n) {
            return Err(CoreError::InvalidInput(String::from(
                "all separable components must share one length",
            )));
        }
        Ok(Self {
            weights,
            components,
        })
    }

    pub fn len(&self) -> usize {
        self.components[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[ProductState] {
        &self.components
    }
}

/// Collective spin expectations of a symmetric state.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SpinExpectations {
    /// `<S_z>`.
    pub sz_mean: f64,
    /// `<S_z^2> - <S_z>^2`.
    pub sz_var: f64,
    /// `<S_x>`, obtained as `Re <S_->` through the ladder identity.
    pub sx_mean: f64,
}

/// An N-qubit permutation-symmetric pure state in the spin-J basis.
#[derive(Clone, Debug)]
pub struct SymmetricState {
    two_j: u32,
    coeffs: Vec<C64>,
}

impl SymmetricState {
    /// Builds a state from coefficients `c[k]` over `m = k - J`,
    /// `k = 0..=2J`. The coefficients must be normalized within 1e-12.
    pub fn new(two_j: u32, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != two_j as usize + 1 {
            return Err(CoreError::InvalidInput(format!(
                "expected {} coefficients for two_j = {two_j}, got {}",
                two_j as usize + 1,
                coeffs.len()
            )));
        }
        if !coeffs
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(CoreError::InvalidInput(String::from(
                "coefficients must be finite",
            )));
        }
        let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if math::abs(norm - 1.0) > NORM_TOL {
            return Err(CoreError::InvalidInput(format!(
                "coefficient norm^2 is {norm}, not 1"
            )));
        }
        Ok(Self { two_j, coeffs })
    }

    /// Same as [`SymmetricState::new`] but rescales the coefficients to
    /// unit norm first (they must not all vanish).
    pub fn normalized(two_j: u32, mut coeffs: Vec<C64>) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(CoreError::InvalidInput(String::from(
                "cannot normalize a zero or non-finite vector",
            )));
        }
        let scale = 1.0 / math::sqrt(norm);
        for z in &mut coeffs {
            *z *= scale;
        }
        Self::new(two_j, coeffs)
    }

    /// The flat superposition of `|J, m>` over the window `|m| <= l_cut`,
    /// each with amplitude `1/sqrt(2 l_cut + 1)`. Requires an even number
    /// of qubits (integer m) and `l_cut <= n_qubits / 2`.
    pub fn dicke_superposition(n_qubits: u32, l_cut: u32) -> Result<Self> {
        if n_qubits == 0 || n_qubits % 2 != 0 {
            return Err(CoreError::InvalidInput(format!(
                "dicke_superposition requires an even positive qubit count, got {n_qubits}"
            )));
        }
        let j = n_qubits / 2;
        if l_cut > j {
            return Err(CoreError::InvalidInput(format!(
                "window l_cut = {l_cut} exceeds J = {j}"
            )));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n_qubits as usize + 1];
        let amp = 1.0 / math::sqrt((2 * l_cut + 1) as f64);
        // m in [-L, L] maps to k = m + J.
        for k in (j - l_cut)..=(j + l_cut) {
            coeffs[k as usize] = C64::new(amp, 0.0);
        }
        Self::new(n_qubits, coeffs)
    }

    /// Number of qubits `N = 2J`.
    pub fn n_qubits(&self) -> u32 {
        self.two_j
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// True when every coefficient has a vanishing imaginary part; such
    /// states admit an internal real-arithmetic sampling path.
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|z| z.im == 0.0)
    }

    fn m_of(&self, k: usize) -> f64 {
        k as f64 - self.two_j as f64 / 2.0
    }

    /// Collective spin expectations. `S_z` moments are diagonal sums;
    /// `<S_x> = Re <S_->` with
    /// `S_-|J,m> = sqrt(J(J+1) - m(m-1)) |J,m-1>`.
    pub fn spin_expectations(&self) -> SpinExpectations {
        let mut sz = 0.0;
        let mut sz2 = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let w = c.norm_sqr();
            let m = self.m_of(k);
            sz += m * w;
            sz2 += m * m * w;
        }
        let mut lower = C64::new(0.0, 0.0);
        for k in 1..self.coeffs.len() {
            let m = self.m_of(k);
            lower += self.coeffs[k - 1].conj() * self.coeffs[k] * ladder_coefficient(self.two_j, m);
        }
        SpinExpectations {
            sz_mean: sz,
            sz_var: (sz2 - sz * sz).max(0.0),
            sx_mean: lower.re,
        }
    }

    /// `<S_y> = -Im <S_->`; used for the reduced qubit.
    fn sy_mean(&self) -> f64 {
        let mut lower = C64::new(0.0, 0.0);
        for k in 1..self.coeffs.len() {
            let m = self.m_of(k);
            lower += self.coeffs[k - 1].conj() * self.coeffs[k] * ladder_coefficient(self.two_j, m);
        }
        -lower.im
    }

    /// One-qubit reduced density matrix. In the Pauli frame used by the
    /// POVMs (`pauli(Z) = diag(1,-1)`, `|1>` pointing down) the Bloch
    /// vector is `(2/N) (<S_x>, -<S_y>, -<S_z>)`.
    pub fn reduced_qubit(&self) -> Operator {
        let spin = self.spin_expectations();
        let n = self.two_j as f64;
        Operator::bloch_density([
            2.0 / n * spin.sx_mean,
            -2.0 / n * self.sy_mean(),
            -2.0 / n * spin.sz_mean,
        ])
    }

    /// Exact variance of the summed outcome `X_1 + ... + X_N` when every
    /// qubit is measured once with the trine POVM:
    /// `Var = N/3 - (2/3) <S_x> + (4/3) (DS_z)^2`.
    ///
    /// The identity follows from the trine moment operators
    /// (`sum_i <B_i> = 2N/3 - (2/3)<S_x>` and pair correlations
    /// `(1/3) <sigma_z sigma_z>`); it is specific to that measurement.
    pub fn trine_total_variance(&self) -> f64 {
        let spin = self.spin_expectations();
        self.two_j as f64 / 3.0 - 2.0 / 3.0 * spin.sx_mean + 4.0 / 3.0 * spin.sz_var
    }
}

/// `sqrt(J(J+1) - m(m-1))`, computed from doubled integers so half-integer
/// spins stay exact until the final square root.
fn ladder_coefficient(two_j: u32, m: f64) -> f64 {
    let dm = 2.0 * m;
    let num = (two_j as f64) * (two_j as f64 + 2.0) - dm * (dm - 2.0);
    math::sqrt((num / 4.0).max(0.0))
}

/// Variance bound `Q = (4/9) L(L+1) + N/(3(2L+1)) + 4L^2/(9(N+2))` for the
/// Dicke-window state with `L = l_cut` on `N = n_qubits` qubits.
pub fn q_bound(n_qubits: u64, l_cut: u64) -> Result<f64> {
    if n_qubits == 0 {
        return Err(CoreError::InvalidInput(String::from(
            "q_bound needs at least one qubit",
        )));
    }
    if 2 * l_cut > n_qubits {
        return Err(CoreError::InvalidInput(format!(
            "window l_cut = {l_cut} exceeds J = {}/2",
            n_qubits
        )));
    }
    let n = n_qubits as f64;
    let l = l_cut as f64;
    Ok(4.0 / 9.0 * l * (l + 1.0) + n / (3.0 * (2.0 * l + 1.0)) + 4.0 * l * l / (9.0 * (n + 2.0)))
}

/// Failure-probability bound `s_N = N^{2(alpha-1)} Q / eps^2` for the game
/// at rate `alpha` and window `eps`. The bound is meaningful for
/// `alpha > 1/2`; it is still computed outside that range (callers that
/// care should warn).
pub fn s_bound(n_qubits: u64, l_cut: u64, alpha: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(CoreError::InvalidInput(String::from("eps must be positive")));
    }
    if !alpha.is_finite() {
        return Err(CoreError::InvalidInput(String::from("alpha must be finite")));
    }
    let q = q_bound(n_qubits, l_cut)?;
    let n = n_qubits as f64;
    Ok(math::powf(n, 2.0 * (alpha - 1.0)) / (eps * eps) * q)
}
