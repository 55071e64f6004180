//! POVM representation, the measurement-generated random variable, its
//! moment operators and per-state moments, and unsharpness bounds.
//!
//! A POVM is a list of PSD effects summing to the identity, each paired
//! with a real outcome value. The expectation operator `X = sum_i x_i E_i`
//! and the uncertainty operator `DX = sum_i x_i^2 E_i - X^2` determine the
//! mean and variance of the outcome for any state; the variance is computed
//! through both the operator route and the outcome-probability route and
//! the two are required to agree.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::math;
use crate::operator::{Operator, DEFAULT_PSD_TOL};

/// How closely the two variance routes in [`moments`] must agree.
const VARIANCE_ROUTE_TOL: f64 = 1e-10;

/// A positive operator-valued measure with real outcome values.
#[derive(Clone, Debug)]
pub struct Povm {
    effects: Vec<Operator>,
    values: Vec<f64>,
}

/// Mean, variance and third absolute central moment of the outcome for one
/// state.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct StateMoments {
    pub mean: f64,
    pub variance: f64,
    pub third_abs_central: f64,
}

/// Bounds on the outcome standard deviation over all states, plus a bound
/// on the third absolute central moment.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct UnsharpnessProfile {
    /// Lower bound on the outcome standard deviation.
    pub sigma_minus: f64,
    /// Upper bound on the outcome standard deviation.
    pub sigma_plus: f64,
    /// Upper bound on the third absolute central moment.
    pub third_moment_bound: f64,
}

impl UnsharpnessProfile {
    pub fn new(sigma_minus: f64, sigma_plus: f64, third_moment_bound: f64) -> Result<Self> {
        if !(sigma_minus >= 0.0 && sigma_plus >= sigma_minus) {
            return Err(CoreError::InvalidInput(String::from(
                "unsharpness profile requires 0 <= sigma_minus <= sigma_plus",
            )));
        }
        if !(third_moment_bound >= 0.0) {
            return Err(CoreError::InvalidInput(String::from(
                "third moment bound must be nonnegative",
            )));
        }
        Ok(Self {
            sigma_minus,
            sigma_plus,
            third_moment_bound,
        })
    }
}

/// Result of the qubit extremum search: the profile plus the variance
/// extrema and where on the Bloch sphere they were found.
#[derive(Clone, Debug)]
pub struct SigmaBounds {
    pub profile: UnsharpnessProfile,
    pub min_variance: f64,
    pub max_variance: f64,
    pub argmin_bloch: [f64; 3],
    pub argmax_bloch: [f64; 3],
    /// Largest third absolute central moment seen on the search grid.
    pub grid_max_third_moment: f64,
}

impl Povm {
    /// Builds a POVM after structural checks (matching lengths and
    /// dimensions, finite distinct values, at least two outcomes). Physical
    /// validity (PSD effects, completeness) is checked by [`Povm::validate`].
    pub fn new(effects: Vec<Operator>, values: Vec<f64>) -> Result<Self> {
        if effects.len() < 2 {
            return Err(CoreError::InvalidInput(String::from(
                "a POVM needs at least two outcomes",
            )));
        }
        if effects.len() != values.len() {
            return Err(CoreError::InvalidInput(format!(
                "{} effects but {} values",
                effects.len(),
                values.len()
            )));
        }
        let dim = effects[0].dim();
        if effects.iter().any(|e| e.dim() != dim) {
            return Err(CoreError::InvalidInput(String::from(
                "all effects must share one dimension",
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput(String::from(
                "outcome values must be finite",
            )));
        }
        for i in 0..values.len() {
            for j in (i + 1)..values.len() {
                if values[i] == values[j] {
                    return Err(CoreError::InvalidInput(format!(
                        "outcome values must be pairwise distinct (x_{i} == x_{j})"
                    )));
                }
            }
        }
        Ok(Self { effects, values })
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn outcome_count(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Checks the physical invariants within `tol` and returns a list of
    /// human-readable violations; an empty list means the POVM is valid.
    pub fn validate(&self, tol: f64) -> Vec<String> {
        let mut violations = Vec::new();
        let dim = self.dim();
        let mut sum = Operator::zeros(dim);
        for (i, effect) in self.effects.iter().enumerate() {
            match effect.is_psd(tol) {
                Ok(true) => {}
                Ok(false) => violations.push(format!("effect {i} not PSD within {tol:e}")),
                Err(e) => violations.push(format!("effect {i}: {e}")),
            }
            sum = sum.add(effect);
        }
        let defect = sum.max_abs_diff(&Operator::identity(dim));
        if defect > tol.max(1e-9) {
            violations.push(format!(
                "sum != identity (max entry deviation {defect:.3e})"
            ));
        }
        violations
    }

    fn ensure_valid(&self, tol: f64) -> Result<()> {
        let violations = self.validate(tol);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(CoreError::InvalidInput(format!(
                "invalid POVM: {}",
                violations.join("; ")
            )))
        }
    }

    /// The expectation operator `X = sum_i x_i E_i`.
    pub fn expectation_operator(&self) -> Result<Operator> {
        self.ensure_valid(DEFAULT_PSD_TOL)?;
        let mut out = Operator::zeros(self.dim());
        for (effect, &x) in self.effects.iter().zip(&self.values) {
            out = out.add(&effect.scale(x));
        }
        if !out.is_hermitian(1e-12) {
            return Err(CoreError::NumericFailure(String::from(
                "expectation operator drifted from Hermitian",
            )));
        }
        Ok(out)
    }

    /// The second-moment operator `sum_i x_i^2 E_i`.
    pub fn second_moment_operator(&self) -> Result<Operator> {
        self.ensure_valid(DEFAULT_PSD_TOL)?;
        let mut out = Operator::zeros(self.dim());
        for (effect, &x) in self.effects.iter().zip(&self.values) {
            out = out.add(&effect.scale(x * x));
        }
        Ok(out)
    }

    /// The uncertainty operator `DX = sum_i x_i^2 E_i - X^2`. It is PSD for
    /// every valid POVM (it equals `sum_i (x_i - X) E_i (x_i - X)`), and
    /// vanishes for projective measurements.
    pub fn uncertainty_operator(&self) -> Result<Operator> {
        let x_op = self.expectation_operator()?;
        let second = self.second_moment_operator()?;
        let delta = second.sub(&x_op.matmul(&x_op));
        if !delta.is_psd(DEFAULT_PSD_TOL)? {
            return Err(CoreError::NumericFailure(String::from(
                "uncertainty operator failed PSD check",
            )));
        }
        Ok(delta)
    }

    /// Outcome probabilities `p_i = tr(rho E_i)` for a density matrix.
    pub fn outcome_probabilities(&self, rho: &Operator) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(CoreError::InvalidInput(format!(
                "state dim {} does not match POVM dim {}",
                rho.dim(),
                self.dim()
            )));
        }
        let mut probs = Vec::with_capacity(self.effects.len());
        let mut total = 0.0;
        for effect in &self.effects {
            let p = effect.trace_product(rho);
            if math::abs(p.im) > 1e-9 {
                return Err(CoreError::NumericFailure(String::from(
                    "complex outcome probability",
                )));
            }
            probs.push(p.re);
            total += p.re;
        }
        if math::abs(total - 1.0) > 1e-9 {
            return Err(CoreError::NumericFailure(format!(
                "outcome probabilities sum to {total}, not 1"
            )));
        }
        Ok(probs)
    }

    /// Mean, variance and third absolute central moment of the outcome for
    /// the state `rho`. The variance is computed both from the moment
    /// operators and from the outcome probabilities; disagreement beyond
    /// 1e-10 is reported as a numeric failure.
    pub fn moments(&self, rho: &Operator) -> Result<StateMoments> {
        validate_density_matrix(rho)?;
        self.ensure_valid(DEFAULT_PSD_TOL)?;
        let probs = self.outcome_probabilities(rho)?;

        let mean: f64 = probs
            .iter()
            .zip(&self.values)
            .map(|(p, x)| p * x)
            .sum();
        let second: f64 = probs
            .iter()
            .zip(&self.values)
            .map(|(p, x)| p * x * x)
            .sum();
        let var_prob = second - mean * mean;

        let x_op = self.expectation_operator()?;
        let delta = self.uncertainty_operator()?;
        let x_sq = x_op.matmul(&x_op);
        let mean_op = x_op.trace_product(rho).re;
        let var_op = x_sq.trace_product(rho).re - mean_op * mean_op
            + delta.trace_product(rho).re;
        if math::abs(var_op - var_prob) > VARIANCE_ROUTE_TOL {
            return Err(CoreError::NumericFailure(format!(
                "variance routes disagree: operator {var_op} vs probability {var_prob}"
            )));
        }

        let third: f64 = probs
            .iter()
            .zip(&self.values)
            .map(|(p, x)| {
                let d = math::abs(x - mean);
                p * d * d * d
            })
            .sum();
        Ok(StateMoments {
            mean,
            variance: var_prob.max(0.0),
            third_abs_central: third,
        })
    }

    /// Searches the pure-state Bloch sphere for the extrema of the outcome
    /// variance (Fibonacci grid of `grid_resolution` points followed by
    /// local refinement down to 1e-6 angular resolution) and reports the
    /// unsharpness profile. Only qubit POVMs are supported.
    ///
    /// The variance is concave in the state, so its minimum over all
    /// density matrices is attained at a pure state and the reported
    /// `sigma_minus` is a global bound. The maximum is reported over pure
    /// states only (for every built-in example it is also global, but a
    /// concave function may peak at a mixed state in general).
    ///
    /// `third_moment_bound` in the returned profile is the conservative cap
    /// `(2 max_i |x_i|)^3`; the largest third moment actually seen on the
    /// grid is reported separately.
    pub fn sigma_bounds_qubit(&self, grid_resolution: usize) -> Result<SigmaBounds> {
        if self.dim() != 2 {
            return Err(CoreError::Unsupported(String::from(
                "sigma_bounds_qubit requires a qubit POVM",
            )));
        }
        if grid_resolution == 0 {
            return Err(CoreError::InvalidInput(String::from(
                "grid resolution must be positive",
            )));
        }
        self.ensure_valid(DEFAULT_PSD_TOL)?;

        // Pauli decomposition of each effect: tr(E rho(r)) = e0 + e . r.
        let pauli = [
            Operator::pauli(crate::operator::PauliAxis::X),
            Operator::pauli(crate::operator::PauliAxis::Y),
            Operator::pauli(crate::operator::PauliAxis::Z),
        ];
        let mut effect_affine: Vec<[f64; 4]> = Vec::with_capacity(self.effects.len());
        for effect in &self.effects {
            let e0 = effect.trace().re / 2.0;
            let mut row = [e0, 0.0, 0.0, 0.0];
            for (k, sigma) in pauli.iter().enumerate() {
                row[k + 1] = effect.trace_product(sigma).re / 2.0;
            }
            effect_affine.push(row);
        }
        let values = self.values.clone();

        let eval = |r: [f64; 3]| -> (f64, f64) {
            let prob = |row: &[f64; 4]| row[0] + row[1] * r[0] + row[2] * r[1] + row[3] * r[2];
            let mut mean = 0.0;
            let mut second = 0.0;
            for (row, &x) in effect_affine.iter().zip(&values) {
                let p = prob(row);
                mean += p * x;
                second += p * x * x;
            }
            let var = second - mean * mean;
            let mut third = 0.0;
            for (row, &x) in effect_affine.iter().zip(&values) {
                let d = math::abs(x - mean);
                third += prob(row) * d * d * d;
            }
            (var, third)
        };

        let mut best_min = (f64::INFINITY, [0.0f64; 3]);
        let mut best_max = (f64::NEG_INFINITY, [0.0f64; 3]);
        let mut grid_third: f64 = 0.0;
        let golden = (1.0 + math::sqrt(5.0)) / 2.0;
        for j in 0..grid_resolution {
            let z = 1.0 - 2.0 * (j as f64 + 0.5) / grid_resolution as f64;
            let radius = math::sqrt((1.0 - z * z).max(0.0));
            let phi = 2.0 * core::f64::consts::PI * (j as f64 / golden);
            let r = [radius * math::cos(phi), radius * math::sin(phi), z];
            let (var, third) = eval(r);
            if var < best_min.0 {
                best_min = (var, r);
            }
            if var > best_max.0 {
                best_max = (var, r);
            }
            grid_third = grid_third.max(third);
        }

        // Local refinement: spherical hill-climb with halving step.
        let refine = |start: [f64; 3], minimize: bool| -> (f64, [f64; 3]) {
            let mut theta = math::acos(start[2].clamp(-1.0, 1.0));
            let mut phi = math::atan2(start[1], start[0]);
            let point = |t: f64, p: f64| -> [f64; 3] {
                [
                    math::sin(t) * math::cos(p),
                    math::sin(t) * math::sin(p),
                    math::cos(t),
                ]
            };
            let score = |t: f64, p: f64| -> f64 {
                let (var, _) = eval(point(t, p));
                if minimize {
                    var
                } else {
                    -var
                }
            };
            let mut best = score(theta, phi);
            let mut step = 2.0 / math::sqrt(grid_resolution as f64);
            while step > 1e-6 {
                let mut improved = false;
                for (dt, dp) in [
                    (step, 0.0),
                    (-step, 0.0),
                    (0.0, step),
                    (0.0, -step),
                    (step, step),
                    (step, -step),
                    (-step, step),
                    (-step, -step),
                ] {
                    let cand = score(theta + dt, phi + dp);
                    if cand < best {
                        best = cand;
                        theta += dt;
                        phi += dp;
                        improved = true;
                    }
                }
                if !improved {
                    step /= 2.0;
                }
            }
            let value = if minimize { best } else { -best };
            (value, point(theta, phi))
        };

        let (min_variance, argmin) = refine(best_min.1, true);
        let (max_variance, argmax) = refine(best_max.1, false);

        let max_abs_value = values.iter().fold(0.0f64, |a, &x| a.max(math::abs(x)));
        let cap = {
            let range = 2.0 * max_abs_value;
            range * range * range
        };
        let profile = UnsharpnessProfile::new(
            math::sqrt(min_variance.max(0.0)),
            math::sqrt(max_variance.max(0.0)),
            cap,
        )?;
        Ok(SigmaBounds {
            profile,
            min_variance,
            max_variance,
            argmin_bloch: argmin,
            argmax_bloch: argmax,
            grid_max_third_moment: grid_third,
        })
    }
}

/// Checks that `rho` is PSD with unit trace within 1e-9.
pub fn validate_density_matrix(rho: &Operator) -> Result<()> {
    if !rho.is_psd(DEFAULT_PSD_TOL)? {
        return Err(CoreError::InvalidInput(String::from(
            "density matrix must be PSD",
        )));
    }
    let trace = rho.trace();
    if math::abs(trace.re - 1.0) > 1e-9 || math::abs(trace.im) > 1e-9 {
        return Err(CoreError::InvalidInput(String::from(
            "density matrix must have unit trace",
        )));
    }
    Ok(())
}

/// Mean variance `(1/N) sum_i sigma_i^2` of a list of per-site variances.
pub fn mean_variance(variances: &[f64]) -> Result<f64> {
    if variances.is_empty() {
        return Err(CoreError::InvalidInput(String::from(
            "mean_variance needs a nonempty list",
        )));
    }
    Ok(variances.iter().sum::<f64>() / variances.len() as f64)
}

/// Average mean `(1/N) sum_i mu_i` of a list of per-site means.
pub fn average_mean(means: &[f64]) -> Result<f64> {
    if means.is_empty() {
        return Err(CoreError::InvalidInput(String::from(
            "average_mean needs a nonempty list",
        )));
    }
    Ok(means.iter().sum::<f64>() / means.len() as f64)
}

/// The Lindeberg-condition ratio `max_i sigma_i^2 / (N Sigma_N^2)`; all
/// variances must be strictly positive.
pub fn lindeberg_ratio(variances: &[f64]) -> Result<f64> {
    if variances.is_empty() {
        return Err(CoreError::InvalidInput(String::from(
            "lindeberg_ratio needs a nonempty list",
        )));
    }
    if variances.iter().any(|&v| v <= 0.0) {
        return Err(CoreError::InvalidInput(String::from(
            "lindeberg_ratio requires strictly positive variances",
        )));
    }
    let total: f64 = variances.iter().sum();
    let max = variances.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    Ok(max / total)
}
