//! Dense complex matrix substrate.
//!
//! Everything in this crate that looks like an operator (POVM effects,
//! density matrices, Kraus operators, moment operators) is an [`Operator`]:
//! a small dense complex square matrix in row-major order. Dimensions are
//! tiny (2 for qubits, a handful for generic POVM support), so the
//! eigensolver is a closed form for 2x2 Hermitian matrices and cyclic
//! Jacobi iteration above that. No external numeric dependency is used.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::math;

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Off-diagonal norm at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-12;

/// Default tolerance for positive-semidefiniteness checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Pauli matrix axis selector.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Dense complex square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    /// Builds an operator from row-major entries. Fails when the length is
    /// not `dim * dim`, `dim` is zero, or any entry is non-finite.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(CoreError::InvalidInput(String::from("dim must be >= 1")));
        }
        if entries.len() != dim * dim {
            return Err(CoreError::InvalidInput(alloc::format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                entries.len()
            )));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(CoreError::InvalidInput(String::from(
                "operator entries must be finite",
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        op
    }

    /// The standard 2x2 Pauli matrix for the given axis.
    pub fn pauli(axis: PauliAxis) -> Self {
        let (a, b, c, d) = match axis {
            PauliAxis::X => (
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ),
            PauliAxis::Y => (
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ),
            PauliAxis::Z => (
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
            ),
        };
        Self {
            dim: 2,
            entries: vec![a, b, c, d],
        }
    }

    /// Qubit density matrix `(I + r . sigma)/2` for a Bloch vector `r`
    /// (`|r| <= 1` is the caller's responsibility).
    pub fn bloch_density(r: [f64; 3]) -> Self {
        let [x, y, z] = r;
        Self {
            dim: 2,
            entries: vec![
                C64::new((1.0 + z) / 2.0, 0.0),
                C64::new(x / 2.0, -y / 2.0),
                C64::new(x / 2.0, y / 2.0),
                C64::new((1.0 - z) / 2.0, 0.0),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// `tr(self . other)`, the Hilbert-Schmidt pairing used for expectation
    /// values.
    pub fn trace_product(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.entries[i * d + k] * other.entries[k * d + i];
            }
        }
        acc
    }

    /// Largest absolute entry.
    pub fn max_abs_entry(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| math::hypot(z.re, z.im))
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| {
                let d = a - b;
                math::hypot(d.re, d.im)
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitianity, `max |A - A^dagger| / 2`-free:
    /// reported as the raw max entry difference.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                let diff = self.entries[i * d + j] - self.entries[j * d + i].conj();
                worst = worst.max(math::hypot(diff.re, diff.im));
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Eigenvalues (ascending) and a unitary whose columns are the
    /// eigenvectors, for a Hermitian matrix. 2x2 inputs use the closed
    /// trace/determinant form; larger inputs use cyclic Jacobi sweeps.
    pub fn eigh(&self) -> Result<(Vec<f64>, Operator)> {
        if !self.is_hermitian(1e-9) {
            return Err(CoreError::InvalidInput(String::from(
                "eigh requires a Hermitian matrix",
            )));
        }
        if self.dim == 1 {
            return Ok((
                vec![self.entries[0].re],
                Operator::identity(1),
            ));
        }
        if self.dim == 2 {
            return Ok(self.eigh_2x2());
        }
        self.eigh_jacobi()
    }

    fn eigh_2x2(&self) -> (Vec<f64>, Operator) {
        let a = self.entries[0].re;
        let d = self.entries[3].re;
        let b = self.entries[1];
        let mid = 0.5 * (a + d);
        let half_gap = 0.5 * (a - d);
        let disc = math::hypot(half_gap, math::hypot(b.re, b.im));
        let lo = mid - disc;
        let hi = mid + disc;

        let mut vecs = Operator::identity(2);
        let b_abs = math::hypot(b.re, b.im);
        if b_abs > f64::EPSILON * (math::abs(a) + math::abs(d) + 1.0) {
            // Eigenvector for lambda: (b, lambda - a), normalized.
            for (col, lambda) in [(0usize, lo), (1usize, hi)] {
                let v0 = b;
                let v1 = C64::new(lambda - a, 0.0);
                let norm = math::sqrt(v0.norm_sqr() + v1.norm_sqr());
                vecs.set(0, col, v0 / norm);
                vecs.set(1, col, v1 / norm);
            }
        } else if a > d {
            // Diagonal with swapped order.
            vecs = Operator::new(
                2,
                vec![
                    C64::new(0.0, 0.0),
                    C64::new(1.0, 0.0),
                    C64::new(1.0, 0.0),
                    C64::new(0.0, 0.0),
                ],
            )
            .expect("static 2x2");
        }
        (vec![lo, hi], vecs)
    }

    fn eigh_jacobi(&self) -> Result<(Vec<f64>, Operator)> {
        let d = self.dim;
        let mut a = self.clone();
        // Symmetrize to remove the sub-tolerance Hermiticity defect.
        for i in 0..d {
            for j in 0..d {
                let avg = (a.entry(i, j) + a.entry(j, i).conj()) * 0.5;
                a.set(i, j, avg);
            }
        }
        let mut v = Operator::identity(d);
        let max_sweeps = 60;
        for _ in 0..max_sweeps {
            let mut off: f64 = 0.0;
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = a.entry(p, q);
                    off += apq.norm_sqr();
                }
            }
            if math::sqrt(off) <= JACOBI_TOL {
                let mut pairs: Vec<(f64, usize)> = (0..d)
                    .map(|i| (a.entry(i, i).re, i))
                    .collect();
                pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
                let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let mut sorted_vecs = Operator::zeros(d);
                for (col, &(_, src)) in pairs.iter().enumerate() {
                    for row in 0..d {
                        sorted_vecs.set(row, col, v.entry(row, src));
                    }
                }
                return Ok((values, sorted_vecs));
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = a.entry(p, q);
                    let apq_abs = math::hypot(apq.re, apq.im);
                    if apq_abs <= JACOBI_TOL * 1e-4 {
                        continue;
                    }
                    // Phase that makes the pivot real, then a real rotation.
                    let phase = apq / apq_abs;
                    let app = a.entry(p, p).re;
                    let aqq = a.entry(q, q).re;
                    let tau = (aqq - app) / (2.0 * apq_abs);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + math::sqrt(1.0 + tau * tau))
                    } else {
                        -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
                    };
                    let c = 1.0 / math::sqrt(1.0 + t * t);
                    let s = t * c;
                    // Column update: [p q] <- [p q] . [[c, s*phase], [-s*conj(phase)... ]]
                    // Using G with G[p][p]=c, G[p][q]=s*phase, G[q][p]=-s*phase^*, G[q][q]=c
                    // wait: columns mix as v_p' = c v_p - s conj(phase) v_q is derived below.
                    for r in 0..d {
                        let arp = a.entry(r, p);
                        let arq = a.entry(r, q);
                        a.set(r, p, arp * c - arq * s * phase.conj());
                        a.set(r, q, arp * s * phase + arq * c);
                    }
                    for cidx in 0..d {
                        let apc = a.entry(p, cidx);
                        let aqc = a.entry(q, cidx);
                        a.set(p, cidx, apc * c - aqc * s * phase);
                        a.set(q, cidx, apc * s * phase.conj() + aqc * c);
                    }
                    for r in 0..d {
                        let vrp = v.entry(r, p);
                        let vrq = v.entry(r, q);
                        v.set(r, p, vrp * c - vrq * s * phase.conj());
                        v.set(r, q, vrp * s * phase + vrq * c);
                    }
                }
            }
        }
        Err(CoreError::NumericFailure(String::from(
            "Jacobi iteration did not converge",
        )))
    }

    /// True when the operator is Hermitian within `tol` and all eigenvalues
    /// are `>= -tol`.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        if !self
            .entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(CoreError::InvalidInput(String::from(
                "is_psd requires finite entries",
            )));
        }
        if !self.is_hermitian(tol) {
            return Ok(false);
        }
        let (values, _) = self.eigh()?;
        Ok(values.iter().all(|&l| l >= -tol))
    }

    /// Hermitian PSD square root. Eigenvalues below zero (but within the
    /// PSD tolerance) are clamped to zero; the result satisfies
    /// `S . S = self` within 1e-10 in max-entry norm.
    pub fn psd_sqrt(&self) -> Result<Operator> {
        self.psd_sqrt_with_tol(DEFAULT_PSD_TOL)
    }

    pub fn psd_sqrt_with_tol(&self, tol: f64) -> Result<Operator> {
        if !self.is_psd(tol)? {
            return Err(CoreError::InvalidInput(String::from(
                "psd_sqrt requires a PSD matrix",
            )));
        }
        let (values, vecs) = self.eigh()?;
        let d = self.dim;
        let mut out = Operator::zeros(d);
        for (idx, &lambda) in values.iter().enumerate() {
            let root = math::sqrt(lambda.max(0.0));
            if root == 0.0 {
                continue;
            }
            for i in 0..d {
                let vi = vecs.entry(i, idx);
                for j in 0..d {
                    let vj = vecs.entry(j, idx).conj();
                    let cur = out.entry(i, j);
                    out.set(i, j, cur + vi * vj * root);
                }
            }
        }
        let defect = out.matmul(&out).max_abs_diff(self);
        if defect > 1e-10 {
            return Err(CoreError::NumericFailure(alloc::format!(
                "psd_sqrt residual {defect:.3e} exceeds 1e-10"
            )));
        }
        Ok(out)
    }
}
