//! Outcome-sequence samplers and the brute-force oracle.
//!
//! Three samplers produce trials `X_1 .. X_N`:
//!
//! * [`ProductSampler`] draws each site independently from
//!   `p_j = tr(rho_i E_j)`.
//! * [`SeparableSampler`] first draws a mixture component, then samples the
//!   product state.
//! * [`SymmetricSampler`] measures one qubit of a permutation-symmetric
//!   state at a time. Each step splits off the first qubit with
//!   Clebsch-Gordan weights, applies the Kraus operator `K_i = sqrt(E_i)`
//!   of the drawn outcome, and then keeps a single pure branch of the
//!   post-measurement mixture (purification unraveling): with probability
//!   `|u_i|^2 / p_i` the branch paired with local `|1>`, otherwise the one
//!   paired with `|0>`. Averaged over that extra randomness the joint
//!   distribution of all future outcomes equals the physical one, because
//!   measurement statistics are linear in the density operator. A step
//!   costs O(N), a trial O(N^2).
//!
//! [`oracle`] computes exact outcome-sum distributions for small `N` by
//! enumerating every measurement path in the full `2^N` space, and is the
//! correctness reference for all samplers.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{CoreError, Result};
use crate::math;
use crate::operator::{C64, Operator};
use crate::povm::Povm;
use crate::rng::uniform_f64;
use crate::states::{ProductState, SeparableState, SymmetricState};

/// Probability-conservation tolerance at every measurement step.
const PROB_SUM_TOL: f64 = 1e-9;

/// Sum of outcome values over one trial, kept in exact integer arithmetic
/// whenever every outcome value is an integer.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum OutcomeSum {
    Integer(i64),
    Real(f64),
}

/// Per-trial aggregate: the number of sites and the outcome-value sum.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TrialSummary {
    pub n: u64,
    pub sum: OutcomeSum,
}

impl TrialSummary {
    /// `X^(N)`, the summed outcome value.
    pub fn sum_value(&self) -> f64 {
        match self.sum {
            OutcomeSum::Integer(s) => s as f64,
            OutcomeSum::Real(s) => s,
        }
    }

    /// Relative frequency `R_N = X^(N) / N`.
    pub fn relative_frequency(&self) -> f64 {
        self.sum_value() / self.n as f64
    }
}

/// A full trial: outcome indices per site plus the aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub outcomes: Vec<u32>,
    pub summary: TrialSummary,
}

impl TrialResult {
    pub fn sum_value(&self) -> f64 {
        self.summary.sum_value()
    }

    pub fn relative_frequency(&self) -> f64 {
        self.summary.relative_frequency()
    }
}

/// Outcome values plus their integer image when exact accumulation is
/// possible.
#[derive(Clone, Debug)]
struct ValueTable {
    values: Vec<f64>,
    ints: Option<Vec<i64>>,
}

impl ValueTable {
    fn new(values: &[f64]) -> Self {
        let int_cap = (1u64 << 40) as f64;
        let ints = values
            .iter()
            .map(|&x| {
                if x == math::floor(x) && math::abs(x) <= int_cap {
                    Some(x as i64)
                } else {
                    None
                }
            })
            .collect::<Option<Vec<i64>>>();
        Self {
            values: values.to_vec(),
            ints,
        }
    }

    fn accumulator(&self) -> SumAccumulator<'_> {
        match &self.ints {
            Some(ints) => SumAccumulator::Integer { ints, acc: 0 },
            None => SumAccumulator::Real {
                values: &self.values,
                acc: 0.0,
            },
        }
    }
}

enum SumAccumulator<'a> {
    Integer { ints: &'a [i64], acc: i64 },
    Real { values: &'a [f64], acc: f64 },
}

impl SumAccumulator<'_> {
    #[inline]
    fn add(&mut self, outcome: usize) {
        match self {
            SumAccumulator::Integer { ints, acc } => *acc += ints[outcome],
            SumAccumulator::Real { values, acc } => *acc += values[outcome],
        }
    }

    fn finish(self, n: u64) -> TrialSummary {
        let sum = match self {
            SumAccumulator::Integer { acc, .. } => OutcomeSum::Integer(acc),
            SumAccumulator::Real { acc, .. } => OutcomeSum::Real(acc),
        };
        TrialSummary { n, sum }
    }
}

#[inline]
fn draw_categorical(cum: &[f64], u: f64) -> usize {
    let mut idx = 0;
    while idx + 1 < cum.len() && u >= cum[idx] {
        idx += 1;
    }
    idx
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|&p| {
            acc += p.max(0.0);
            acc
        })
        .collect()
}

/// Site-independent sampler for product states under a qubit POVM.
#[derive(Clone, Debug)]
pub struct ProductSampler {
    /// Cumulative outcome probabilities per run of identical sites.
    runs: Vec<(Vec<f64>, usize)>,
    values: ValueTable,
    n: u64,
}

impl ProductSampler {
    pub fn new(povm: &Povm, state: &ProductState) -> Result<Self> {
        if povm.dim() != 2 {
            return Err(CoreError::Unsupported(String::from(
                "samplers require a qubit POVM",
            )));
        }
        let mut runs = Vec::new();
        for (factor, count) in state.distinct_factors() {
            let probs = povm.outcome_probabilities(factor)?;
            runs.push((cumulative(&probs), count));
        }
        Ok(Self {
            runs,
            values: ValueTable::new(povm.values()),
            n: state.len() as u64,
        })
    }

    pub fn n_sites(&self) -> u64 {
        self.n
    }

    /// Draws one trial, recording only the aggregate.
    pub fn sample_summary(&self, rng: &mut impl RngCore) -> TrialSummary {
        let mut acc = self.values.accumulator();
        for (cum, count) in &self.runs {
            for _ in 0..*count {
                acc.add(draw_categorical(cum, uniform_f64(rng)));
            }
        }
        acc.finish(self.n)
    }

    /// Draws one trial with the full outcome list.
    pub fn sample(&self, rng: &mut impl RngCore) -> TrialResult {
        let mut acc = self.values.accumulator();
        let mut outcomes = Vec::with_capacity(self.n as usize);
        for (cum, count) in &self.runs {
            for _ in 0..*count {
                let o = draw_categorical(cum, uniform_f64(rng));
                outcomes.push(o as u32);
                acc.add(o);
            }
        }
        TrialResult {
            outcomes,
            summary: acc.finish(self.n),
        }
    }
}

/// Sampler for convex mixtures of product states: draws the component,
/// then delegates.
#[derive(Clone, Debug)]
pub struct SeparableSampler {
    cum_weights: Vec<f64>,
    components: Vec<ProductSampler>,
}

impl SeparableSampler {
    pub fn new(povm: &Povm, state: &SeparableState) -> Result<Self> {
        let components = state
            .components()
            .iter()
            .map(|c| ProductSampler::new(povm, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cum_weights: cumulative(state.weights()),
            components,
        })
    }

    pub fn n_sites(&self) -> u64 {
        self.components[0].n_sites()
    }

    /// Index of the mixture component a given draw selects; exposed so
    /// tests can check component frequencies.
    pub fn draw_component(&self, rng: &mut impl RngCore) -> usize {
        draw_categorical(&self.cum_weights, uniform_f64(rng))
    }

    pub fn sample_summary(&self, rng: &mut impl RngCore) -> TrialSummary {
        let k = self.draw_component(rng);
        self.components[k].sample_summary(rng)
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> TrialResult {
        let k = self.draw_component(rng);
        self.components[k].sample(rng)
    }
}

/// The two Clebsch-Gordan branches of a symmetric state with one qubit
/// split off: `|psi> = |1> (x) upper + |0> (x) lower`.
#[derive(Clone, Debug)]
pub struct SplitState {
    /// Spin-(J - 1/2) amplitudes paired with the local `|1>`.
    pub upper: Vec<C64>,
    /// Spin-(J - 1/2) amplitudes paired with the local `|0>`.
    pub lower: Vec<C64>,
}

/// Splits off the first qubit: amplitude `c_m` of `|J, m>` flows with
/// weight `sqrt((J+m)/(2J))` into the upper branch at `m - 1/2` and with
/// weight `sqrt((J-m)/(2J))` into the lower branch at `m + 1/2`. The two
/// branch norms sum to one.
pub fn cg_split(state: &SymmetricState) -> Result<SplitState> {
    let two_j = state.two_j() as usize;
    if two_j == 0 {
        return Err(CoreError::InvalidInput(String::from(
            "cg_split needs at least one qubit",
        )));
    }
    let c = state.coeffs();
    let inv = 1.0 / two_j as f64;
    let mut upper = Vec::with_capacity(two_j);
    let mut lower = Vec::with_capacity(two_j);
    for k in 0..two_j {
        upper.push(c[k + 1] * math::sqrt((k + 1) as f64 * inv));
        lower.push(c[k] * math::sqrt((two_j - k) as f64 * inv));
    }
    Ok(SplitState { upper, lower })
}

/// 2x2 matrix in row-major `[k00, k01, k10, k11]` over `{|0>, |1>}`.
type Mat2 = [C64; 4];

fn operator_to_mat2(op: &Operator) -> Mat2 {
    [
        op.entry(0, 0),
        op.entry(0, 1),
        op.entry(1, 0),
        op.entry(1, 1),
    ]
}

fn kraus_from_povm(povm: &Povm) -> Result<Vec<Mat2>> {
    if povm.dim() != 2 {
        return Err(CoreError::Unsupported(String::from(
            "symmetric sampling requires a qubit POVM",
        )));
    }
    povm.effects()
        .iter()
        .map(|e| Ok(operator_to_mat2(&e.psd_sqrt()?)))
        .collect()
}

/// Measures the first qubit of a symmetric state: returns the outcome
/// index and the (purification-unraveled) post-measurement state on one
/// qubit fewer. The step checks that the outcome probabilities match
/// `tr(rho_1 E_i)` for the reduced qubit within 1e-9.
pub fn measure_first_qubit(
    state: &SymmetricState,
    povm: &Povm,
    rng: &mut impl RngCore,
) -> Result<(u32, SymmetricState)> {
    let kraus = kraus_from_povm(povm)?;
    let split = cg_split(state)?;
    let wuu: f64 = split.upper.iter().map(|z| z.norm_sqr()).sum();
    let wvv: f64 = split.lower.iter().map(|z| z.norm_sqr()).sum();
    let wuv: C64 = split
        .upper
        .iter()
        .zip(&split.lower)
        .map(|(a, b)| a.conj() * b)
        .sum();

    // Cross-check against the reduced density matrix route.
    let rho1 = Operator::new(
        2,
        vec![
            C64::new(wvv, 0.0),
            wuv,
            wuv.conj(),
            C64::new(wuu, 0.0),
        ],
    )?;
    let probs = branch_probabilities(&kraus, wuu, wvv, wuv)?;
    for (i, effect) in povm.effects().iter().enumerate() {
        let direct = effect.trace_product(&rho1).re;
        let p = probs[i].0 + probs[i].1;
        if math::abs(direct - p) > 1e-9 {
            return Err(CoreError::NumericFailure(format!(
                "outcome {i}: branch probability {p} != tr(rho_1 E_i) = {direct}"
            )));
        }
    }

    let (outcome, take_upper) = draw_outcome_and_branch(&probs, rng);
    let k = &kraus[outcome];
    let (coeff_hi, coeff_lo, norm_sq) = if take_upper {
        (k[3], k[2], probs[outcome].0)
    } else {
        (k[1], k[0], probs[outcome].1)
    };
    let inv_norm = 1.0 / math::sqrt(norm_sq);
    let next: Vec<C64> = split
        .upper
        .iter()
        .zip(&split.lower)
        .map(|(a, b)| (coeff_hi * a + coeff_lo * b) * inv_norm)
        .collect();
    let next_state = SymmetricState::normalized(state.two_j() - 1, next)?;
    Ok((outcome as u32, next_state))
}

/// Per-outcome `(|u_i|^2, |v_i|^2)` from the split inner products; errors
/// if the total drifts from one.
fn branch_probabilities(kraus: &[Mat2], wuu: f64, wvv: f64, wuv: C64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(kraus.len());
    let mut total = 0.0;
    for k in kraus {
        let pu = k[3].norm_sqr() * wuu
            + k[2].norm_sqr() * wvv
            + 2.0 * (k[3].conj() * k[2] * wuv).re;
        let pv = k[1].norm_sqr() * wuu
            + k[0].norm_sqr() * wvv
            + 2.0 * (k[1].conj() * k[0] * wuv).re;
        total += pu + pv;
        out.push((pu.max(0.0), pv.max(0.0)));
    }
    if math::abs(total - 1.0) > PROB_SUM_TOL {
        return Err(CoreError::NumericFailure(format!(
            "step probabilities sum to {total}, not 1"
        )));
    }
    Ok(out)
}

fn draw_outcome_and_branch(
    probs: &[(f64, f64)],
    rng: &mut impl RngCore,
) -> (usize, bool) {
    let u = uniform_f64(rng);
    let mut acc = 0.0;
    let mut outcome = usize::MAX;
    for (i, (pu, pv)) in probs.iter().enumerate() {
        acc += pu + pv;
        if u < acc {
            outcome = i;
            break;
        }
    }
    if outcome == usize::MAX {
        // u fell into the rounding slack beyond the accumulated total;
        // fall back to the most likely outcome so zero-probability
        // branches are never selected.
        outcome = probs
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1 .0 + a.1 .1).total_cmp(&(b.1 .0 + b.1 .1)))
            .map(|(i, _)| i)
            .unwrap_or(0);
    }
    let (pu, pv) = probs[outcome];
    let take_upper = uniform_f64(rng) * (pu + pv) < pu;
    (outcome, take_upper)
}

/// Sequential sampler over the symmetric subspace. Construction validates
/// the POVM, takes Kraus square roots once, and selects an internal real
/// arithmetic path when both the state and the Kraus operators are real.
#[derive(Clone, Debug)]
pub struct SymmetricSampler {
    kraus: Vec<Mat2>,
    kraus_real: Option<Vec<[f64; 4]>>,
    initial: Vec<C64>,
    initial_real: Option<Vec<f64>>,
    /// sqrt(k) for k = 0..=N, shared by every step.
    sqrt_table: Vec<f64>,
    values: ValueTable,
    n: u32,
}

impl SymmetricSampler {
    pub fn new(povm: &Povm, state: &SymmetricState) -> Result<Self> {
        if state.two_j() == 0 {
            return Err(CoreError::InvalidInput(String::from(
                "symmetric sampling needs at least one qubit",
            )));
        }
        let kraus = kraus_from_povm(povm)?;
        let kraus_real = if kraus
            .iter()
            .all(|k| k.iter().all(|z| z.im == 0.0))
        {
            Some(
                kraus
                    .iter()
                    .map(|k| [k[0].re, k[1].re, k[2].re, k[3].re])
                    .collect(),
            )
        } else {
            None
        };
        let initial = state.coeffs().to_vec();
        let initial_real = if kraus_real.is_some() && state.is_real() {
            Some(initial.iter().map(|z| z.re).collect())
        } else {
            None
        };
        let sqrt_table = (0..=state.two_j())
            .map(|k| math::sqrt(k as f64))
            .collect();
        Ok(Self {
            kraus,
            kraus_real,
            initial,
            initial_real,
            sqrt_table,
            values: ValueTable::new(povm.values()),
            n: state.two_j(),
        })
    }

    pub fn n_sites(&self) -> u64 {
        self.n as u64
    }

    pub fn sample_summary(&self, rng: &mut impl RngCore) -> Result<TrialSummary> {
        let mut acc = self.values.accumulator();
        if let (Some(kraus), Some(init)) = (&self.kraus_real, &self.initial_real) {
            self.run_real(kraus, init, rng, |o| acc.add(o))?;
        } else {
            self.run_complex(rng, |o| acc.add(o))?;
        }
        Ok(acc.finish(self.n as u64))
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> Result<TrialResult> {
        let mut acc = self.values.accumulator();
        let mut outcomes = Vec::with_capacity(self.n as usize);
        if let (Some(kraus), Some(init)) = (&self.kraus_real, &self.initial_real) {
            self.run_real(kraus, init, rng, |o| {
                outcomes.push(o as u32);
                acc.add(o);
            })?;
        } else {
            self.run_complex(rng, |o| {
                outcomes.push(o as u32);
                acc.add(o);
            })?;
        }
        Ok(TrialResult {
            outcomes,
            summary: acc.finish(self.n as u64),
        })
    }

    fn run_complex(
        &self,
        rng: &mut impl RngCore,
        mut sink: impl FnMut(usize),
    ) -> Result<()> {
        let mut cur = self.initial.clone();
        let mut next: Vec<C64> = Vec::with_capacity(cur.len());
        let mut probs: Vec<(f64, f64)> = Vec::with_capacity(self.kraus.len());
        while cur.len() > 1 {
            let two_j = cur.len() - 1;
            let inv = 1.0 / two_j as f64;
            let mut wuu = 0.0;
            let mut wvv = 0.0;
            let mut wuv = C64::new(0.0, 0.0);
            for (k, c) in cur.iter().enumerate() {
                let w = c.norm_sqr();
                wuu += k as f64 * w;
                wvv += (two_j - k) as f64 * w;
                if k > 0 {
                    let s = self.sqrt_table[k] * self.sqrt_table[two_j - k + 1];
                    wuv += c.conj() * cur[k - 1] * s;
                }
            }
            wuu *= inv;
            wvv *= inv;
            wuv *= inv;

            probs.clear();
            let mut total = 0.0;
            for k in &self.kraus {
                let pu = k[3].norm_sqr() * wuu
                    + k[2].norm_sqr() * wvv
                    + 2.0 * (k[3].conj() * k[2] * wuv).re;
                let pv = k[1].norm_sqr() * wuu
                    + k[0].norm_sqr() * wvv
                    + 2.0 * (k[1].conj() * k[0] * wuv).re;
                total += pu + pv;
                probs.push((pu.max(0.0), pv.max(0.0)));
            }
            if math::abs(total - 1.0) > PROB_SUM_TOL {
                return Err(CoreError::NumericFailure(format!(
                    "step probabilities sum to {total}, not 1"
                )));
            }
            let (outcome, take_upper) = draw_outcome_and_branch(&probs, rng);
            sink(outcome);

            let k = &self.kraus[outcome];
            let (hi, lo, norm_sq) = if take_upper {
                (k[3], k[2], probs[outcome].0)
            } else {
                (k[1], k[0], probs[outcome].1)
            };
            let inv_norm = 1.0 / math::sqrt(norm_sq);
            let sqrt_inv = math::sqrt(inv);
            next.clear();
            for kp in 0..two_j {
                let alpha = self.sqrt_table[kp + 1] * sqrt_inv;
                let beta = self.sqrt_table[two_j - kp] * sqrt_inv;
                next.push((hi * (cur[kp + 1] * alpha) + lo * (cur[kp] * beta)) * inv_norm);
            }
            core::mem::swap(&mut cur, &mut next);
        }
        Ok(())
    }

    fn run_real(
        &self,
        kraus: &[[f64; 4]],
        init: &[f64],
        rng: &mut impl RngCore,
        mut sink: impl FnMut(usize),
    ) -> Result<()> {
        let mut cur = init.to_vec();
        let mut next: Vec<f64> = Vec::with_capacity(cur.len());
        let mut probs: Vec<(f64, f64)> = Vec::with_capacity(kraus.len());
        while cur.len() > 1 {
            let two_j = cur.len() - 1;
            let inv = 1.0 / two_j as f64;
            let mut wuu = 0.0;
            let mut wvv = 0.0;
            let mut wuv = 0.0;
            for (k, &c) in cur.iter().enumerate() {
                let w = c * c;
                wuu += k as f64 * w;
                wvv += (two_j - k) as f64 * w;
                if k > 0 {
                    let s = self.sqrt_table[k] * self.sqrt_table[two_j - k + 1];
                    wuv += s * c * cur[k - 1];
                }
            }
            wuu *= inv;
            wvv *= inv;
            wuv *= inv;

            probs.clear();
            let mut total = 0.0;
            for k in kraus {
                let pu = k[3] * k[3] * wuu + k[2] * k[2] * wvv + 2.0 * k[3] * k[2] * wuv;
                let pv = k[1] * k[1] * wuu + k[0] * k[0] * wvv + 2.0 * k[1] * k[0] * wuv;
                total += pu + pv;
                probs.push((pu.max(0.0), pv.max(0.0)));
            }
            if math::abs(total - 1.0) > PROB_SUM_TOL {
                return Err(CoreError::NumericFailure(format!(
                    "step probabilities sum to {total}, not 1"
                )));
            }
            let (outcome, take_upper) = draw_outcome_and_branch(&probs, rng);
            sink(outcome);

            let k = &kraus[outcome];
            let (hi, lo, norm_sq) = if take_upper {
                (k[3], k[2], probs[outcome].0)
            } else {
                (k[1], k[0], probs[outcome].1)
            };
            let inv_norm = 1.0 / math::sqrt(norm_sq);
            let sqrt_inv = math::sqrt(inv);
            next.clear();
            for kp in 0..two_j {
                let alpha = self.sqrt_table[kp + 1] * sqrt_inv;
                let beta = self.sqrt_table[two_j - kp] * sqrt_inv;
                next.push((hi * alpha * cur[kp + 1] + lo * beta * cur[kp]) * inv_norm);
            }
            core::mem::swap(&mut cur, &mut next);
        }
        Ok(())
    }
}

pub mod oracle {
    //! Exact distributions by full path enumeration, for `N <= 12`.

    use alloc::collections::BTreeMap;

    use super::*;

    /// Hard cap on the qubit count for exact enumeration.
    pub const MAX_QUBITS: u32 = 12;

    /// A probability distribution over outcome-sum values, sorted by sum.
    #[derive(Clone, Debug, PartialEq)]
    pub struct Distribution {
        entries: Vec<(f64, f64)>,
    }

    impl Distribution {
        /// Builds from raw (sum, probability) pairs: sorts, merges keys
        /// closer than 1e-9, and drops zero-probability atoms.
        pub fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Self {
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut entries: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
            for (sum, p) in pairs {
                if let Some(last) = entries.last_mut() {
                    if (sum - last.0).abs() <= 1e-9 {
                        last.1 += p;
                        continue;
                    }
                }
                entries.push((sum, p));
            }
            entries.retain(|&(_, p)| p > 0.0);
            Self { entries }
        }

        pub fn from_integer_counts(counts: &BTreeMap<i64, u64>, total: u64) -> Self {
            let entries = counts
                .iter()
                .map(|(&s, &c)| (s as f64, c as f64 / total as f64))
                .collect();
            Self { entries }
        }

        pub fn entries(&self) -> &[(f64, f64)] {
            &self.entries
        }

        pub fn total_probability(&self) -> f64 {
            self.entries.iter().map(|e| e.1).sum()
        }

        /// Total-variation distance, matching sum values within 1e-9.
        pub fn tv_distance(&self, other: &Self) -> f64 {
            let mut i = 0;
            let mut j = 0;
            let mut acc = 0.0;
            while i < self.entries.len() || j < other.entries.len() {
                if i < self.entries.len()
                    && j < other.entries.len()
                    && (self.entries[i].0 - other.entries[j].0).abs() <= 1e-9
                {
                    acc += (self.entries[i].1 - other.entries[j].1).abs();
                    i += 1;
                    j += 1;
                } else if j >= other.entries.len()
                    || (i < self.entries.len() && self.entries[i].0 < other.entries[j].0)
                {
                    acc += self.entries[i].1;
                    i += 1;
                } else {
                    acc += other.entries[j].1;
                    j += 1;
                }
            }
            acc / 2.0
        }

        /// Largest absolute probability difference over matched atoms.
        pub fn max_abs_diff(&self, other: &Self) -> f64 {
            let mut i = 0;
            let mut j = 0;
            let mut worst: f64 = 0.0;
            while i < self.entries.len() || j < other.entries.len() {
                if i < self.entries.len()
                    && j < other.entries.len()
                    && (self.entries[i].0 - other.entries[j].0).abs() <= 1e-9
                {
                    worst = worst.max((self.entries[i].1 - other.entries[j].1).abs());
                    i += 1;
                    j += 1;
                } else if j >= other.entries.len()
                    || (i < self.entries.len() && self.entries[i].0 < other.entries[j].0)
                {
                    worst = worst.max(self.entries[i].1);
                    i += 1;
                } else {
                    worst = worst.max(other.entries[j].1);
                    j += 1;
                }
            }
            worst
        }
    }

    fn binomial(n: u32, k: u32) -> f64 {
        let k = k.min(n - k.min(n));
        let mut acc = 1.0f64;
        for i in 0..k {
            acc = acc * (n - i) as f64 / (i + 1) as f64;
        }
        acc
    }

    /// Expands a symmetric state into the full `2^N` amplitude vector:
    /// every weight-`k` basis string carries `c[k] / sqrt(C(N, k))`.
    pub fn embed_symmetric(state: &SymmetricState) -> Result<Vec<C64>> {
        let n = state.two_j();
        if n > MAX_QUBITS {
            return Err(CoreError::ResourceLimit(format!(
                "embedding needs 2^{n} amplitudes; cap is N = {MAX_QUBITS}"
            )));
        }
        let c = state.coeffs();
        let norm: Vec<f64> = (0..=n).map(|k| 1.0 / math::sqrt(binomial(n, k))).collect();
        let size = 1usize << n;
        let mut out = Vec::with_capacity(size);
        for idx in 0..size {
            let w = (idx as u32).count_ones() as usize;
            out.push(c[w] * norm[w]);
        }
        Ok(out)
    }

    /// Full product-state vector for i.i.d. pure qubit amplitudes.
    pub fn embed_product_pure(amp0: C64, amp1: C64, n: u32) -> Result<Vec<C64>> {
        if n > MAX_QUBITS {
            return Err(CoreError::ResourceLimit(format!(
                "cap is N = {MAX_QUBITS}"
            )));
        }
        let size = 1usize << n;
        let mut out = Vec::with_capacity(size);
        for idx in 0..size {
            let ones = (idx as u32).count_ones();
            let mut amp = C64::new(1.0, 0.0);
            for _ in 0..ones {
                amp *= amp1;
            }
            for _ in 0..(n - ones) {
                amp *= amp0;
            }
            out.push(amp);
        }
        Ok(out)
    }

    /// Exact distribution of the outcome-value sum when every qubit of
    /// `initial` (a full `2^N` state vector) is measured once. Kraus
    /// operators are `sqrt(E_i)`, optionally twisted to `U_i sqrt(E_i)`;
    /// the distribution is invariant under such twists because only
    /// `K_i^dagger K_i = E_i` enters single-pass statistics.
    pub fn brute_force_distribution(
        povm: &Povm,
        initial: &[C64],
        twists: Option<&[Operator]>,
    ) -> Result<Distribution> {
        let size = initial.len();
        if size < 2 || !size.is_power_of_two() {
            return Err(CoreError::InvalidInput(String::from(
                "initial vector length must be a power of two >= 2",
            )));
        }
        let n = size.trailing_zeros();
        if n > MAX_QUBITS {
            return Err(CoreError::ResourceLimit(format!(
                "N = {n} exceeds the oracle cap {MAX_QUBITS}"
            )));
        }
        let norm: f64 = initial.iter().map(|z| z.norm_sqr()).sum();
        if math::abs(norm - 1.0) > 1e-9 {
            return Err(CoreError::InvalidInput(format!(
                "initial vector norm^2 is {norm}, not 1"
            )));
        }
        let mut kraus = kraus_from_povm(povm)?;
        if let Some(us) = twists {
            if us.len() != kraus.len() {
                return Err(CoreError::InvalidInput(String::from(
                    "need one twist per outcome",
                )));
            }
            for (k, u) in kraus.iter_mut().zip(us) {
                let m = operator_to_mat2(u);
                *k = [
                    m[0] * k[0] + m[1] * k[2],
                    m[0] * k[1] + m[1] * k[3],
                    m[2] * k[0] + m[3] * k[2],
                    m[2] * k[1] + m[3] * k[3],
                ];
            }
        }
        let values = ValueTable::new(povm.values());

        // Iterative DFS over outcome paths, sharing prefix states.
        let mut stack_states: Vec<Vec<C64>> = (0..=n)
            .map(|_| vec![C64::new(0.0, 0.0); size])
            .collect();
        stack_states[0].copy_from_slice(initial);
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        let mut path = vec![0usize; n as usize];
        let outcomes = kraus.len();

        fn apply_kraus(src: &[C64], dst: &mut [C64], k: &Mat2, qubit: u32) {
            let bit = 1usize << qubit;
            for idx in 0..src.len() {
                if idx & bit == 0 {
                    let lo = src[idx];
                    let hi = src[idx | bit];
                    dst[idx] = k[0] * lo + k[1] * hi;
                    dst[idx | bit] = k[2] * lo + k[3] * hi;
                }
            }
        }

        let mut depth = 0usize;
        loop {
            if depth == n as usize {
                let leaf = &stack_states[depth];
                let p: f64 = leaf.iter().map(|z| z.norm_sqr()).sum();
                let sum = match &values.ints {
                    Some(ints) => path.iter().map(|&o| ints[o]).sum::<i64>() as f64,
                    None => path.iter().map(|&o| values.values[o]).sum::<f64>(),
                };
                pairs.push((sum, p));
                // Backtrack to the next unexplored branch.
                loop {
                    if depth == 0 {
                        let dist = Distribution::from_pairs(pairs);
                        let total = dist.total_probability();
                        if math::abs(total - 1.0) > 1e-9 {
                            return Err(CoreError::NumericFailure(format!(
                                "path probabilities sum to {total}, not 1"
                            )));
                        }
                        return Ok(dist);
                    }
                    depth -= 1;
                    if path[depth] + 1 < outcomes {
                        path[depth] += 1;
                        break;
                    }
                }
            } else {
                let (head, tail) = stack_states.split_at_mut(depth + 1);
                apply_kraus(
                    &head[depth],
                    &mut tail[0],
                    &kraus[path[depth]],
                    depth as u32,
                );
                depth += 1;
                if depth < n as usize {
                    path[depth] = 0;
                }
            }
        }
    }

    /// Haar-like random 2x2 unitary (Gram-Schmidt on Gaussian columns),
    /// used to twist Kraus operators in instrument-invariance checks.
    pub fn random_unitary(rng: &mut impl RngCore) -> Operator {
        let mut gauss = || {
            // Box-Muller from two uniforms.
            let u1 = uniform_f64(rng).max(1e-300);
            let u2 = uniform_f64(rng);
            let r = math::sqrt(-2.0 * libm::log(u1));
            let t = 2.0 * core::f64::consts::PI * u2;
            C64::new(r * math::cos(t), r * math::sin(t))
        };
        let g1 = [gauss(), gauss()];
        let g2 = [gauss(), gauss()];
        let n1 = math::sqrt(g1[0].norm_sqr() + g1[1].norm_sqr());
        let u1 = [g1[0] / n1, g1[1] / n1];
        let overlap = u1[0].conj() * g2[0] + u1[1].conj() * g2[1];
        let v = [g2[0] - u1[0] * overlap, g2[1] - u1[1] * overlap];
        let n2 = math::sqrt(v[0].norm_sqr() + v[1].norm_sqr());
        let u2 = [v[0] / n2, v[1] / n2];
        Operator::new(2, vec![u1[0], u2[0], u1[1], u2[1]]).expect("unit columns")
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;
    use crate::rng::trial_rng;
    use crate::trine::trine_povm;
    use alloc::collections::BTreeMap;

    fn plus_state(n: usize) -> ProductState {
        ProductState::iid(Operator::bloch_density([1.0, 0.0, 0.0]), n).unwrap()
    }

    #[test]
    fn product_sampler_matches_site_distribution() {
        let povm = trine_povm();
        let sampler = ProductSampler::new(&povm, &plus_state(1)).unwrap();
        let mut rng = trial_rng(11, 0);
        let mut counts = [0u64; 3];
        let trials = 300_000;
        for _ in 0..trials {
            let t = sampler.sample(&mut rng);
            counts[t.outcomes[0] as usize] += 1;
        }
        // p = {2/3, 1/6, 1/6} for |+>.
        let expected = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
        for (c, e) in counts.iter().zip(expected) {
            let freq = *c as f64 / trials as f64;
            assert!((freq - e).abs() < 4.0 * (e * (1.0 - e) / trials as f64).sqrt());
        }
    }

    #[test]
    fn projective_sampling_is_deterministic_on_eigenstates() {
        let povm = Povm::new(
            vec![
                Operator::bloch_density([0.0, 0.0, 1.0]),
                Operator::bloch_density([0.0, 0.0, -1.0]),
            ],
            vec![0.0, 1.0],
        )
        .unwrap();
        let state = ProductState::iid(Operator::bloch_density([0.0, 0.0, 1.0]), 6).unwrap();
        let sampler = ProductSampler::new(&povm, &state).unwrap();
        let mut rng = trial_rng(3, 0);
        for _ in 0..32 {
            let t = sampler.sample(&mut rng);
            assert!(t.outcomes.iter().all(|&o| o == 0));
            assert_eq!(t.summary.sum, OutcomeSum::Integer(0));
        }
    }

    #[test]
    fn separable_component_frequencies() {
        let povm = trine_povm();
        let sep = SeparableState::new(
            vec![0.3, 0.7],
            vec![plus_state(2), plus_state(2)],
        )
        .unwrap();
        let sampler = SeparableSampler::new(&povm, &sep).unwrap();
        let mut rng = trial_rng(5, 1);
        let trials = 100_000u64;
        let mut first = 0u64;
        for _ in 0..trials {
            if sampler.draw_component(&mut rng) == 0 {
                first += 1;
            }
        }
        let freq = first as f64 / trials as f64;
        let sigma = (0.3f64 * 0.7 / trials as f64).sqrt();
        assert!((freq - 0.3).abs() < 3.0 * sigma, "freq = {freq}");
    }

    #[test]
    fn cg_split_examples() {
        // Stretched state: all amplitude in the upper branch.
        let n = 4u32;
        let mut coeffs = vec![C64::new(0.0, 0.0); 5];
        coeffs[4] = C64::new(1.0, 0.0);
        let split = cg_split(&SymmetricState::new(n, coeffs).unwrap()).unwrap();
        let upper_norm: f64 = split.upper.iter().map(|z| z.norm_sqr()).sum();
        let lower_norm: f64 = split.lower.iter().map(|z| z.norm_sqr()).sum();
        assert!((upper_norm - 1.0).abs() < 1e-12);
        assert!(lower_norm < 1e-15);

        // Triplet zero on two qubits: equal branch weights.
        let s = SymmetricState::new(
            2,
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let split = cg_split(&s).unwrap();
        assert!((split.upper[0].re - (0.5f64).sqrt()).abs() < 1e-12);
        assert!((split.lower[1].re - (0.5f64).sqrt()).abs() < 1e-12);
        let total: f64 = split
            .upper
            .iter()
            .chain(&split.lower)
            .map(|z| z.norm_sqr())
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn first_step_distribution_matches_single_site_moments() {
        let povm = trine_povm();
        let n = 6u32;
        let mut coeffs = vec![C64::new(0.0, 0.0); n as usize + 1];
        coeffs[n as usize] = C64::new(1.0, 0.0); // |1>^N
        let state = SymmetricState::new(n, coeffs).unwrap();
        let rho1 = state.reduced_qubit();
        let expected = povm.outcome_probabilities(&rho1).unwrap();
        let mut rng = trial_rng(17, 0);
        let trials = 200_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..trials {
            let (o, _) = measure_first_qubit(&state, &povm, &mut rng).unwrap();
            counts[o as usize] += 1;
        }
        for (c, e) in counts.iter().zip(expected) {
            let freq = *c as f64 / trials as f64;
            assert!(
                (freq - e).abs() < 4.0 * (e * (1.0 - e) / trials as f64).sqrt(),
                "freq {freq} vs {e}"
            );
        }
    }

    #[test]
    fn single_qubit_symmetric_sampler_reduces_to_plain_povm() {
        let povm = trine_povm();
        // |+> as a spin-1/2 state: c = (1/sqrt2, 1/sqrt2).
        let amp = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let state = SymmetricState::new(1, vec![amp, amp]).unwrap();
        let sampler = SymmetricSampler::new(&povm, &state).unwrap();
        let mut rng = trial_rng(23, 0);
        let trials = 200_000u64;
        let mut counts = BTreeMap::new();
        for _ in 0..trials {
            let t = sampler.sample(&mut rng).unwrap();
            *counts.entry(t.outcomes[0] as i64).or_insert(0u64) += 1;
        }
        // |+> has Bloch x = +1: p = {2/3, 1/6, 1/6}.
        let expected = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
        for (o, e) in expected.iter().enumerate() {
            let freq = *counts.get(&(o as i64)).unwrap_or(&0) as f64 / trials as f64;
            assert!((freq - e).abs() < 4.0 * (e * (1.0 - e) / trials as f64).sqrt());
        }
    }

    #[test]
    fn brute_force_single_site_plus_state() {
        let povm = trine_povm();
        let amp = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let dist = brute_force_distribution(&povm, &[amp, amp], None).unwrap();
        let entries = dist.entries();
        assert_eq!(entries.len(), 3);
        assert!((entries[0].0 + 1.0).abs() < 1e-12 && (entries[0].1 - 1.0 / 6.0).abs() < 1e-12);
        assert!((entries[1].0).abs() < 1e-12 && (entries[1].1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((entries[2].0 - 1.0).abs() < 1e-12 && (entries[2].1 - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_projective_product_is_deterministic() {
        let povm = Povm::new(
            vec![
                Operator::bloch_density([0.0, 0.0, 1.0]),
                Operator::bloch_density([0.0, 0.0, -1.0]),
            ],
            vec![0.0, 1.0],
        )
        .unwrap();
        let state = embed_product_pure(C64::new(1.0, 0.0), C64::new(0.0, 0.0), 2).unwrap();
        let dist = brute_force_distribution(&povm, &state, None).unwrap();
        assert_eq!(dist.entries().len(), 1);
        assert!((dist.entries()[0].0).abs() < 1e-12);
        assert!((dist.entries()[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn instrument_twists_leave_oracle_invariant() {
        let povm = trine_povm();
        let state = SymmetricState::dicke_superposition(4, 1).unwrap();
        let full = embed_symmetric(&state).unwrap();
        let base = brute_force_distribution(&povm, &full, None).unwrap();
        let mut rng = trial_rng(99, 0);
        let twists: Vec<Operator> = (0..3).map(|_| random_unitary(&mut rng)).collect();
        // Unitarity sanity.
        for u in &twists {
            let prod = u.adjoint().matmul(u);
            assert!(prod.max_abs_diff(&Operator::identity(2)) < 1e-12);
        }
        let twisted = brute_force_distribution(&povm, &full, Some(&twists)).unwrap();
        assert!(base.max_abs_diff(&twisted) < 1e-9);
    }

    #[test]
    fn symmetric_sampler_matches_oracle_small() {
        let povm = trine_povm();
        for (n, l) in [(2u32, 1u32), (4, 1)] {
            let state = SymmetricState::dicke_superposition(n, l).unwrap();
            let full = embed_symmetric(&state).unwrap();
            let exact = brute_force_distribution(&povm, &full, None).unwrap();
            let sampler = SymmetricSampler::new(&povm, &state).unwrap();
            assert!(sampler.initial_real.is_some(), "trine ansatz takes the real path");
            let trials = 200_000u64;
            let mut counts = BTreeMap::new();
            for t in 0..trials {
                let mut rng = trial_rng(7000 + n as u64, t);
                let s = sampler.sample_summary(&mut rng).unwrap();
                let OutcomeSum::Integer(v) = s.sum else {
                    panic!("trine sums are integers")
                };
                *counts.entry(v).or_insert(0u64) += 1;
            }
            let empirical = Distribution::from_integer_counts(&counts, trials);
            let tv = exact.tv_distance(&empirical);
            assert!(tv < 0.01, "N={n} L={l}: tv = {tv}");
        }
    }

    #[test]
    fn complex_path_matches_oracle() {
        let povm = trine_povm();
        // A genuinely complex symmetric state on 4 qubits.
        let coeffs = vec![
            C64::new(0.4, 0.1),
            C64::new(0.1, -0.3),
            C64::new(0.5, 0.2),
            C64::new(-0.2, 0.4),
            C64::new(0.3, -0.1),
        ];
        let state = SymmetricState::normalized(4, coeffs).unwrap();
        let sampler = SymmetricSampler::new(&povm, &state).unwrap();
        assert!(sampler.initial_real.is_none());
        let full = embed_symmetric(&state).unwrap();
        let exact = brute_force_distribution(&povm, &full, None).unwrap();
        let trials = 200_000u64;
        let mut counts = BTreeMap::new();
        for t in 0..trials {
            let mut rng = trial_rng(4242, t);
            let s = sampler.sample_summary(&mut rng).unwrap();
            let OutcomeSum::Integer(v) = s.sum else {
                panic!("trine sums are integers")
            };
            *counts.entry(v).or_insert(0u64) += 1;
        }
        let empirical = Distribution::from_integer_counts(&counts, trials);
        let tv = exact.tv_distance(&empirical);
        assert!(tv < 0.01, "tv = {tv}");
    }

    #[test]
    fn oracle_rejects_large_systems() {
        let povm = trine_povm();
        let state = vec![C64::new(0.0, 0.0); 1 << 13];
        assert!(matches!(
            brute_force_distribution(&povm, &state, None),
            Err(CoreError::ResourceLimit(_))
        ));
    }

    #[test]
    fn summary_relative_frequency_is_exact_ratio() {
        let s = TrialSummary {
            n: 8,
            sum: OutcomeSum::Integer(-3),
        };
        assert_eq!(s.sum_value(), -3.0);
        assert_eq!(s.relative_frequency(), -3.0 / 8.0);
    }
}
