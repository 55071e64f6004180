//! Empirical distribution analysis and convergence-rate bounds.
//!
//! The central comparisons are: the Kolmogorov-Smirnov distance between the
//! empirical CDF of the relative frequency and a Gaussian-mixture model
//! built from per-site moments (with the `C0 M / (sigma_-^3 sqrt(N))`
//! bound), the two-term separable win-probability bound, and the Chebyshev
//! lower bound for the entangled window state.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::math;
use crate::povm::Povm;
use crate::sampler::{OutcomeSum, TrialSummary};
use crate::states::SeparableState;

/// z-score of the two-sided 95% normal quantile, used by Wilson intervals.
const WILSON_Z: f64 = 1.959963984540054;

/// Standard normal CDF `Phi(x)`, accurate to well below 1e-12 absolute
/// error. Evaluated as `erfc(-x / sqrt(2)) / 2` with the rational
/// Chebyshev approximation of the complementary error function from the
/// classical SPECFUN `calerf` routine (three segments, max relative error
/// around 1e-16).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

/// Complementary error function, SPECFUN-style rational approximation.
fn erfc(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
        1.85777706184603153e-1,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e1,
        2.44024637934444173e2,
        1.28261652607737228e3,
        2.84423683343917062e3,
    ];
    const C: [f64; 9] = [
        5.64188496988670089e-1,
        8.88314979438837594e0,
        6.61191906371416295e1,
        2.98635138197400131e2,
        8.81952221241769090e2,
        1.71204761263407058e3,
        2.05107837782607147e3,
        1.23033935479799725e3,
        2.15311535474403846e-8,
    ];
    const D: [f64; 8] = [
        1.57449261107098347e1,
        1.17693950891312499e2,
        5.37181101862009858e2,
        1.62138957456669019e3,
        3.29079923573345963e3,
        4.36261909014324716e3,
        3.43936767414372164e3,
        1.23033935480374942e3,
    ];
    const P: [f64; 6] = [
        3.05326634961232344e-1,
        3.60344899949804439e-1,
        1.25781726111229246e-1,
        1.60837851487422766e-2,
        6.58749161529837803e-4,
        1.63153871373020978e-2,
    ];
    const Q: [f64; 5] = [
        2.56852019228982242e0,
        1.87295284992346047e0,
        5.27905102951428412e-1,
        6.05183413124413191e-2,
        2.33520497626869185e-3,
    ];
    const SQRPI: f64 = 5.6418958354775628695e-1; // 1/sqrt(pi)

    let y = math::abs(x);
    if y <= 0.46875 {
        // erfc(x) = 1 - erf(x) with erf from the first rational form.
        let z = if y > 1.11e-16 { y * y } else { 0.0 };
        let mut num = A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + A[i]) * z;
            den = (den + B[i]) * z;
        }
        return 1.0 - x * (num + A[3]) / (den + B[3]);
    }

    let result = if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        let r = (num + C[7]) / (den + D[7]);
        scaled_exp(y) * r
    } else if y < 26.6 {
        let z = 1.0 / (y * y);
        let mut num = P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let r = z * (num + P[4]) / (den + Q[4]);
        scaled_exp(y) * (SQRPI - r) / y
    } else {
        0.0
    };

    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// `exp(-y^2)` computed with the split `y = ysq + del` trick to preserve
/// accuracy for large arguments.
fn scaled_exp(y: f64) -> f64 {
    let ysq = math::floor(y * 16.0) / 16.0;
    let del = (y - ysq) * (y + ysq);
    math::exp(-ysq * ysq) * math::exp(-del)
}

/// One Gaussian component of a mixture CDF.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub std: f64,
}

/// Weighted sum of normal CDFs; weights normalized within 1e-12, standard
/// deviations strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixtureCdf {
    components: Vec<MixtureComponent>,
}

impl GaussianMixtureCdf {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(CoreError::InvalidInput(String::from(
                "mixture needs at least one component",
            )));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if math::abs(total - 1.0) > 1e-12 {
            return Err(CoreError::InvalidInput(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        if components.iter().any(|c| !(c.weight > 0.0)) {
            return Err(CoreError::InvalidInput(String::from(
                "mixture weights must be positive",
            )));
        }
        if components.iter().any(|c| !(c.std > 0.0)) {
            return Err(CoreError::InvalidInput(String::from(
                "mixture stds must be positive",
            )));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * std_normal_cdf((x - c.mean) / c.std))
            .sum()
    }
}

/// Builds the mixture model of the relative frequency for a separable
/// state: component `k` keeps its mixture weight and gets mean
/// `mu_{N,k}` (site-average of means) and std `Sigma_{N,k} / sqrt(N)`
/// (root of the site-average variance over N). Errors when any per-site
/// variance vanishes, since the model presumes strictly unsharp outcomes.
pub fn build_mixture(povm: &Povm, state: &SeparableState) -> Result<GaussianMixtureCdf> {
    let n = state.len() as f64;
    let mut components = Vec::with_capacity(state.weights().len());
    for (weight, product) in state.weights().iter().zip(state.components()) {
        let mut mean_sum = 0.0;
        let mut var_sum = 0.0;
        for (factor, count) in product.distinct_factors() {
            let m = povm.moments(factor)?;
            if m.variance <= 0.0 {
                return Err(CoreError::InvalidInput(String::from(
                    "per-site variance is zero: strictly unsharp premise violated",
                )));
            }
            mean_sum += m.mean * count as f64;
            var_sum += m.variance * count as f64;
        }
        components.push(MixtureComponent {
            weight: *weight,
            mean: mean_sum / n,
            std: math::sqrt(var_sum / n) / math::sqrt(n),
        });
    }
    GaussianMixtureCdf::new(components)
}

/// Right-continuous empirical CDF: sorted jump points with cumulative
/// weights.
#[derive(Clone, Debug)]
pub struct Ecdf {
    points: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Ecdf {
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(CoreError::InvalidInput(String::from(
                "empirical CDF needs at least one sample",
            )));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::InvalidInput(String::from(
                "samples must be finite",
            )));
        }
        samples.sort_unstable_by(f64::total_cmp);
        let n = samples.len() as f64;
        let mut points = Vec::new();
        let mut cumulative = Vec::new();
        let mut seen = 0usize;
        let mut idx = 0usize;
        while idx < samples.len() {
            let x = samples[idx];
            let mut run = 0usize;
            while idx < samples.len() && samples[idx] == x {
                run += 1;
                idx += 1;
            }
            seen += run;
            points.push(x);
            cumulative.push(seen as f64 / n);
        }
        Ok(Self { points, cumulative })
    }

    /// CDF value at `x`.
    pub fn value(&self, x: f64) -> f64 {
        match self.points.partition_point(|&p| p <= x) {
            0 => 0.0,
            k => self.cumulative[k - 1],
        }
    }

    pub fn jump_points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Exact sup-distance between a step CDF and a continuous model CDF:
/// at every jump the model is compared against the level before and after
/// the jump.
pub fn ks_distance(empirical: &Ecdf, model: impl Fn(f64) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut below = 0.0;
    for (point, above) in empirical.points.iter().zip(&empirical.cumulative) {
        let m = model(*point);
        worst = worst.max(math::abs(m - below)).max(math::abs(m - above));
        below = *above;
    }
    worst
}

/// Mixture-representation error bound `C0 M / (sigma_-^3 sqrt(N))`.
pub fn theorem1_bound(n: u64, m_bound: f64, sigma_minus: f64, c0: f64) -> f64 {
    assert!(n > 0 && m_bound > 0.0 && sigma_minus > 0.0 && c0 > 0.0);
    c0 * m_bound / (sigma_minus * sigma_minus * sigma_minus * math::sqrt(n as f64))
}

/// Separable win-probability bound
/// `sqrt(2/pi) (eps/sigma_-) N^{-(alpha - 1/2)} + 2 C0 M / (sigma_-^3 sqrt(N))`.
/// Requires `alpha > 1/2`.
pub fn theorem2_bound(
    n: u64,
    eps: f64,
    alpha: f64,
    sigma_minus: f64,
    m_bound: f64,
    c0: f64,
) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(CoreError::InvalidInput(format!(
            "separable bound requires alpha > 1/2, got {alpha}"
        )));
    }
    if !(n > 0) || !(eps > 0.0) || !(sigma_minus > 0.0) || !(m_bound > 0.0) || !(c0 > 0.0) {
        return Err(CoreError::InvalidInput(String::from(
            "separable bound requires positive n, eps, sigma_minus, M, C0",
        )));
    }
    let nf = n as f64;
    let first = math::sqrt(2.0 / core::f64::consts::PI) * (eps / sigma_minus)
        * math::powf(nf, -(alpha - 0.5));
    let second = 2.0 * c0 * m_bound
        / (sigma_minus * sigma_minus * sigma_minus * math::sqrt(nf));
    Ok(first + second)
}

/// Chebyshev lower bound `1 - N^{2(alpha-1)} Var[X^(N)] / eps^2`; valid
/// when the summed outcome has mean equal to the game target. May be
/// negative (vacuous) and is returned as-is.
pub fn chebyshev_lower(n: u64, alpha: f64, eps: f64, var_xn: f64) -> f64 {
    assert!(n > 0 && eps > 0.0 && var_xn >= 0.0);
    1.0 - math::powf(n as f64, 2.0 * (alpha - 1.0)) * var_xn / (eps * eps)
}

/// The frequency game: win when `|R_N - target| <= eps / N^alpha`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GameSpec {
    pub target: f64,
    pub eps: f64,
    pub alpha: f64,
    pub n: u64,
}

impl GameSpec {
    pub fn new(target: f64, eps: f64, alpha: f64, n: u64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(CoreError::InvalidInput(String::from("eps must be positive")));
        }
        if n == 0 {
            return Err(CoreError::InvalidInput(String::from("n must be positive")));
        }
        if !alpha.is_finite() || !target.is_finite() {
            return Err(CoreError::InvalidInput(String::from(
                "alpha and target must be finite",
            )));
        }
        Ok(Self {
            target,
            eps,
            alpha,
            n,
        })
    }

    /// The comparison is inclusive. For integer-valued sums with an
    /// integer-valued `N * target` the test is carried out in exact
    /// integer arithmetic: `|X - N target| <= floor(eps N^{1-alpha} + 1e-9)`;
    /// the 1e-9 nudge keeps thresholds that are mathematically exact
    /// integers (like `1024^{0.4} = 16`) inclusive despite floating-point
    /// rounding of the exponent.
    pub fn is_win(&self, trial: &TrialSummary) -> bool {
        debug_assert_eq!(trial.n, self.n);
        let nf = self.n as f64;
        if let OutcomeSum::Integer(x) = trial.sum {
            let shifted_target = nf * self.target;
            if shifted_target == math::floor(shifted_target)
                && math::abs(shifted_target) < (1u64 << 40) as f64
            {
                let threshold = math::floor(self.eps * math::powf(nf, 1.0 - self.alpha) + 1e-9);
                let dist = (x - shifted_target as i64).unsigned_abs();
                return (dist as f64) <= threshold;
            }
        }
        let r = trial.sum_value() / nf;
        math::abs(r - self.target) <= self.eps * math::powf(nf, -self.alpha)
    }
}

/// Win-probability estimate with its 95% Wilson interval.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct WinEstimate {
    pub wins: u64,
    pub trials: u64,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl WinEstimate {
    pub fn half_width(&self) -> f64 {
        (self.wilson_high - self.wilson_low) / 2.0
    }
}

/// 95% Wilson score interval for `wins` successes in `trials`.
pub fn wilson_interval(wins: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && wins <= trials);
    let n = trials as f64;
    let p = wins as f64 / n;
    let z = WILSON_Z;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let spread = z * math::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    (
        ((center - spread) / denom).max(0.0),
        ((center + spread) / denom).min(1.0),
    )
}

/// Fraction of trials that win the game, with a Wilson 95% interval. All
/// trials must have the game's length.
pub fn win_probability(results: &[TrialSummary], game: &GameSpec) -> Result<WinEstimate> {
    if results.is_empty() {
        return Err(CoreError::InvalidInput(String::from(
            "win_probability needs at least one trial",
        )));
    }
    if results.iter().any(|t| t.n != game.n) {
        return Err(CoreError::InvalidInput(String::from(
            "trial length does not match the game",
        )));
    }
    let wins = results.iter().filter(|t| game.is_win(t)).count() as u64;
    let trials = results.len() as u64;
    let (lo, hi) = wilson_interval(wins, trials);
    Ok(WinEstimate {
        wins,
        trials,
        estimate: wins as f64 / trials as f64,
        wilson_low: lo,
        wilson_high: hi,
    })
}

/// One observed-versus-bound comparison, as emitted in experiment records.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub n: u64,
    pub observed: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub slack: f64,
    /// Statistical allowance folded into `satisfied` (sampling noise,
    /// confidence half-widths); zero for exact comparisons.
    pub tolerance: f64,
}

impl BoundReport {
    /// `observed <= bound + tolerance`, recording the slack.
    pub fn upper(name: &str, n: u64, observed: f64, bound: f64, tolerance: f64) -> Self {
        Self {
            name: String::from(name),
            n,
            observed,
            bound,
            satisfied: observed <= bound + tolerance,
            slack: bound - observed,
            tolerance,
        }
    }

    /// `observed >= bound - tolerance`, recording the slack.
    pub fn lower(name: &str, n: u64, observed: f64, bound: f64, tolerance: f64) -> Self {
        Self {
            name: String::from(name),
            n,
            observed,
            bound,
            satisfied: observed >= bound - tolerance,
            slack: observed - bound,
            tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Operator;
    use crate::states::ProductState;
    use crate::trine::trine_povm;
    use alloc::vec;

    /// Adaptive Simpson quadrature of the standard normal density;
    /// independent oracle for the CDF implementation.
    fn phi_quadrature(x: f64) -> f64 {
        fn density(t: f64) -> f64 {
            (-(t * t) / 2.0).exp() / (2.0 * core::f64::consts::PI).sqrt()
        }
        fn simpson(a: f64, b: f64) -> f64 {
            let m = (a + b) / 2.0;
            (b - a) / 6.0 * (density(a) + 4.0 * density(m) + density(b))
        }
        fn adaptive(a: f64, b: f64, whole: f64, depth: u32) -> f64 {
            let m = (a + b) / 2.0;
            let left = simpson(a, m);
            let right = simpson(m, b);
            if depth == 0 || (left + right - whole).abs() < 1e-15 {
                left + right + (left + right - whole) / 15.0
            } else {
                adaptive(a, m, left, depth - 1) + adaptive(m, b, right, depth - 1)
            }
        }
        // Integrate from -12 (CDF there is ~2e-33) to x.
        if x <= -12.0 {
            return 0.0;
        }
        adaptive(-12.0, x, simpson(-12.0, x), 48)
    }

    #[test]
    fn normal_cdf_matches_quadrature_oracle() {
        for &x in &[-8.0, -3.5, -1.0, -0.25, 0.0, 0.3, 0.5476, 1.0, 1.96, 2.5, 4.2, 7.0] {
            let got = std_normal_cdf(x);
            let want = phi_quadrature(x);
            assert!(
                (got - want).abs() < 1e-12,
                "Phi({x}): {got} vs quadrature {want}"
            );
        }
    }

    #[test]
    fn normal_cdf_frozen_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        // Frozen from an independent high-precision evaluation.
        assert!((std_normal_cdf(1.96) - 0.9750021048517796).abs() < 1e-10);
    }

    #[test]
    fn normal_cdf_symmetry() {
        for &x in &[0.1, 0.9, 2.2, 5.5, 11.0] {
            let sum = std_normal_cdf(x) + std_normal_cdf(-x);
            assert!((sum - 1.0).abs() < 1e-14, "x = {x}: {sum}");
        }
    }

    #[test]
    fn mixture_cdf_basics() {
        let single = GaussianMixtureCdf::new(vec![MixtureComponent {
            weight: 1.0,
            mean: 0.0,
            std: 1.0,
        }])
        .unwrap();
        assert!((single.cdf(0.0) - 0.5).abs() < 1e-15);
        let pair = GaussianMixtureCdf::new(vec![
            MixtureComponent {
                weight: 0.5,
                mean: -2.0,
                std: 0.7,
            },
            MixtureComponent {
                weight: 0.5,
                mean: 2.0,
                std: 0.7,
            },
        ])
        .unwrap();
        assert!((pair.cdf(0.0) - 0.5).abs() < 1e-14);
        // Monotone with limits 0 and 1.
        let mut prev = 0.0;
        let mut x = -60.0;
        while x <= 60.0 {
            let v = pair.cdf(x);
            assert!(v + 1e-15 >= prev);
            prev = v;
            x += 0.25;
        }
        assert!(pair.cdf(-60.0) < 1e-12);
        assert!(pair.cdf(60.0) > 1.0 - 1e-12);
    }

    #[test]
    fn mixture_weight_validation() {
        assert!(GaussianMixtureCdf::new(vec![]).is_err());
        assert!(GaussianMixtureCdf::new(vec![MixtureComponent {
            weight: 0.9,
            mean: 0.0,
            std: 1.0
        }])
        .is_err());
        assert!(GaussianMixtureCdf::new(vec![MixtureComponent {
            weight: 1.0,
            mean: 0.0,
            std: 0.0
        }])
        .is_err());
    }

    #[test]
    fn build_mixture_single_plus_component() {
        let povm = trine_povm();
        let n = 100usize;
        let plus = ProductState::iid(Operator::bloch_density([1.0, 0.0, 0.0]), n).unwrap();
        let sep = crate::states::SeparableState::new(vec![1.0], vec![plus]).unwrap();
        let mix = build_mixture(&povm, &sep).unwrap();
        assert_eq!(mix.components().len(), 1);
        let c = mix.components()[0];
        assert!(c.mean.abs() < 1e-12);
        let expected_std = (1.0f64 / 3.0).sqrt() / (n as f64).sqrt();
        assert!((c.std - expected_std).abs() < 1e-12);
    }

    #[test]
    fn build_mixture_two_components_uses_true_moments() {
        let povm = trine_povm();
        let n = 16usize;
        let plus = ProductState::iid(Operator::bloch_density([1.0, 0.0, 0.0]), n).unwrap();
        let up = ProductState::iid(Operator::bloch_density([0.0, 0.0, 1.0]), n).unwrap();
        let sep = crate::states::SeparableState::new(vec![0.5, 0.5], vec![plus, up]).unwrap();
        let mix = build_mixture(&povm, &sep).unwrap();
        // Independent oracle: enumerate p_i = tr(E_i rho) per component.
        // For Bloch z = +1: p = {1/3, (1 + sqrt3/2)/3, (1 - sqrt3/2)/3}
        // over values {0, +1, -1}, so mean = +1/sqrt3 and variance
        // = 2/3 - 1/3 = 1/3.
        let c0 = mix.components()[0];
        let c1 = mix.components()[1];
        assert!(c0.mean.abs() < 1e-12);
        assert!((c1.mean - 1.0 / 3.0f64.sqrt()).abs() < 1e-12);
        let per_site_std = (1.0f64 / 3.0).sqrt();
        for c in [c0, c1] {
            assert!((c.std - per_site_std / (n as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn build_mixture_rejects_projective_components() {
        let povm = Povm::new(
            vec![
                Operator::bloch_density([0.0, 0.0, 1.0]),
                Operator::bloch_density([0.0, 0.0, -1.0]),
            ],
            vec![0.0, 1.0],
        )
        .unwrap();
        let up = ProductState::iid(Operator::bloch_density([0.0, 0.0, 1.0]), 4).unwrap();
        let sep = crate::states::SeparableState::new(vec![1.0], vec![up]).unwrap();
        assert!(build_mixture(&povm, &sep).is_err());
    }

    #[test]
    fn ecdf_examples() {
        let single = Ecdf::from_samples(vec![0.0]).unwrap();
        assert_eq!(single.value(-0.1), 0.0);
        assert_eq!(single.value(0.0), 1.0);
        let steps = Ecdf::from_samples(vec![1.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(steps.value(1.0), 0.25);
        assert_eq!(steps.value(2.0), 0.75);
        assert_eq!(steps.value(3.0), 1.0);
        assert_eq!(steps.value(0.5), 0.0);
        assert!(Ecdf::from_samples(vec![]).is_err());
    }

    #[test]
    fn ks_distance_of_point_mass_against_normal_is_half() {
        let e = Ecdf::from_samples(vec![0.0]).unwrap();
        let d = ks_distance(&e, std_normal_cdf);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_distance_of_model_quantiles_is_small() {
        // Samples at the model's own quantiles: distance ~ 1/n.
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) / n as f64;
                // crude inverse via bisection
                let mut lo = -10.0;
                let mut hi = 10.0;
                for _ in 0..60 {
                    let mid = (lo + hi) / 2.0;
                    if std_normal_cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (lo + hi) / 2.0
            })
            .collect();
        let e = Ecdf::from_samples(samples).unwrap();
        let d = ks_distance(&e, std_normal_cdf);
        assert!(d <= 1.0 / n as f64 + 1e-6, "d = {d}");
        assert!(d >= 0.0 && d <= 1.0);
    }

    #[test]
    fn ecdf_of_simulated_normals_passes_ks() {
        // 10^6 Box-Muller draws against Phi at the 1% KS level.
        let mut rng = crate::rng::trial_rng(2024, 0);
        let n = 1_000_000usize;
        let mut samples = Vec::with_capacity(n);
        while samples.len() < n {
            let u1 = crate::rng::uniform_f64(&mut rng).max(1e-300);
            let u2 = crate::rng::uniform_f64(&mut rng);
            let r = (-2.0 * libm::log(u1)).sqrt();
            let t = 2.0 * core::f64::consts::PI * u2;
            samples.push(r * libm::cos(t));
            if samples.len() < n {
                samples.push(r * libm::sin(t));
            }
        }
        let e = Ecdf::from_samples(samples).unwrap();
        let d = ks_distance(&e, std_normal_cdf);
        assert!(d < 1.63 / (n as f64).sqrt(), "d = {d}");
    }

    #[test]
    fn theorem1_bound_values() {
        assert!((theorem1_bound(100, 1.0, 1.0 / 3.0, 0.56) - 1.512).abs() < 1e-12);
        assert!((theorem1_bound(1_000_000, 1.0, 1.0 / 3.0, 0.56) - 0.01512).abs() < 1e-12);
        // Quadrupling N halves the bound.
        let b1 = theorem1_bound(1000, 1.0, 0.5, 0.56);
        let b4 = theorem1_bound(4000, 1.0, 0.5, 0.56);
        assert!((b1 / b4 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn theorem2_bound_values() {
        // Frozen from an independent high-precision evaluation.
        let b = theorem2_bound(100, 1.0, 0.6, 1.0 / 3.0, 1.0, 0.56).unwrap();
        assert!((b - 4.534293371057764).abs() < 1e-12, "{b}");
        let c = theorem2_bound(2048, 1.0, 0.6, 0.5, 1.0, 0.56).unwrap();
        assert!((c - 0.9424425173991625).abs() < 1e-12, "{c}");
        // Strictly decreasing in N; the slow N^{-1/10} term dominates the
        // tail, so just check it keeps shrinking.
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let n = 10u64.pow(k);
            let v = theorem2_bound(n, 1.0, 0.6, 1.0 / 3.0, 1.0, 0.56).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 0.4);
        assert!(theorem2_bound(100, 1.0, 0.5, 1.0, 1.0, 0.56).is_err());
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_lower(10, 0.6, 1.0, 0.0), 1.0);
        let v = chebyshev_lower(4, 1.0, 1.0, 38.0 / 27.0);
        assert!((v - (1.0 - 38.0 / 27.0)).abs() < 1e-15);
        assert!(v < 0.0);
    }

    #[test]
    fn game_threshold_integer_boundaries() {
        // 1024^{0.4} = 16 exactly: |X| = 16 must win (inclusive).
        let game = GameSpec::new(0.0, 1.0, 0.6, 1024).unwrap();
        let hit = TrialSummary {
            n: 1024,
            sum: OutcomeSum::Integer(16),
        };
        let miss = TrialSummary {
            n: 1024,
            sum: OutcomeSum::Integer(17),
        };
        assert!(game.is_win(&hit));
        assert!(!game.is_win(&miss));
        // Non-integer threshold: 256^{0.4} = 9.18...: |X| = 9 wins, 10 loses.
        let game = GameSpec::new(0.0, 1.0, 0.6, 256).unwrap();
        assert!(game.is_win(&TrialSummary {
            n: 256,
            sum: OutcomeSum::Integer(-9)
        }));
        assert!(!game.is_win(&TrialSummary {
            n: 256,
            sum: OutcomeSum::Integer(10)
        }));
    }

    #[test]
    fn win_probability_all_hits() {
        let game = GameSpec::new(0.0, 1.0, 0.6, 4).unwrap();
        let results = vec![
            TrialSummary {
                n: 4,
                sum: OutcomeSum::Integer(0)
            };
            50
        ];
        let est = win_probability(&results, &game).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert!(est.wilson_low > 0.9);
        assert!(est.wilson_high <= 1.0);
        let bad = TrialSummary {
            n: 5,
            sum: OutcomeSum::Integer(0),
        };
        assert!(win_probability(&[bad], &game).is_err());
    }

    #[test]
    fn wilson_interval_is_sane_near_extremes() {
        let (lo, hi) = wilson_interval(0, 100);
        assert!(lo.abs() < 1e-15);
        assert!(hi > 0.0 && hi < 0.06);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo > 0.94 && lo < 1.0);
        assert!((hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bound_reports_record_slack() {
        let r = BoundReport::upper("ks", 10, 0.1, 0.2, 0.01);
        assert!(r.satisfied);
        assert!((r.slack - 0.1).abs() < 1e-15);
        let r = BoundReport::lower("win", 10, 0.5, 0.7, 0.05);
        assert!(!r.satisfied);
    }
}
