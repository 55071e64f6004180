//! Property tests for the operator substrate, POVM moments, and the
//! samplers' conservation laws.

use num_complex::Complex;
use proptest::prelude::*;

use unsharp_core::operator::{Operator, C64};
use unsharp_core::povm::Povm;
use unsharp_core::rng::trial_rng;
use unsharp_core::sampler::{cg_split, SymmetricSampler};
use unsharp_core::states::SymmetricState;
use unsharp_core::statistics::{GaussianMixtureCdf, MixtureComponent};
use unsharp_core::trine::trine_povm;

fn complex_strategy() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex::new(re, im))
}

fn random_matrix(dim: usize) -> impl Strategy<Value = Operator> {
    proptest::collection::vec(complex_strategy(), dim * dim)
        .prop_map(move |entries| Operator::new(dim, entries).unwrap())
}

/// `G^dagger G` is PSD for any G.
fn random_psd(dim: usize) -> impl Strategy<Value = Operator> {
    random_matrix(dim).prop_map(|g| g.adjoint().matmul(&g))
}

/// Random POVM from a PSD decomposition of the identity:
/// `E_i = S^{-1/2} G_i S^{-1/2}` with `S = sum G_i`.
fn random_qubit_povm(outcomes: usize) -> impl Strategy<Value = Povm> {
    proptest::collection::vec(random_psd(2), outcomes).prop_filter_map(
        "sum must be invertible",
        move |gs| {
            let mut sum = Operator::zeros(2);
            for g in &gs {
                sum = sum.add(g);
            }
            let (values, vecs) = sum.eigh().ok()?;
            if values.iter().any(|&l| l < 1e-3) {
                return None;
            }
            // S^{-1/2} from the eigendecomposition.
            let mut inv_root = Operator::zeros(2);
            for (idx, &l) in values.iter().enumerate() {
                let w = 1.0 / l.sqrt();
                for i in 0..2 {
                    for j in 0..2 {
                        let cur = inv_root.entry(i, j);
                        inv_root.set(
                            i,
                            j,
                            cur + vecs.entry(i, idx) * vecs.entry(j, idx).conj() * w,
                        );
                    }
                }
            }
            let effects: Vec<Operator> = gs
                .iter()
                .map(|g| inv_root.matmul(g).matmul(&inv_root))
                .collect();
            let values: Vec<f64> = (0..outcomes).map(|i| i as f64 - 1.0).collect();
            Povm::new(effects, values).ok()
        },
    )
}

fn random_symmetric_state(two_j: u32) -> impl Strategy<Value = SymmetricState> {
    proptest::collection::vec(complex_strategy(), two_j as usize + 1).prop_filter_map(
        "norm must not vanish",
        move |coeffs| SymmetricState::normalized(two_j, coeffs).ok(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psd_sqrt_squares_back_on_random_psd(a in random_psd(2), b in random_psd(3)) {
        for op in [a, b] {
            let s = op.psd_sqrt().unwrap();
            prop_assert!(s.matmul(&s).max_abs_diff(&op) <= 1e-10);
            prop_assert!(s.is_psd(1e-9).unwrap());
        }
    }

    #[test]
    fn is_psd_matches_characteristic_roots_on_2x2(
        a in -2.0f64..2.0,
        d in -2.0f64..2.0,
        bre in -2.0f64..2.0,
        bim in -2.0f64..2.0,
    ) {
        let m = Operator::new(2, vec![
            Complex::new(a, 0.0),
            Complex::new(bre, bim),
            Complex::new(bre, -bim),
            Complex::new(d, 0.0),
        ]).unwrap();
        // Brute-force characteristic polynomial roots.
        let tr = a + d;
        let det = a * d - (bre * bre + bim * bim);
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        let roots = [(tr - disc) / 2.0, (tr + disc) / 2.0];
        let expected = roots.iter().all(|&r| r >= -1e-10);
        prop_assert_eq!(m.is_psd(1e-10).unwrap(), expected);
    }

    #[test]
    fn uncertainty_operator_is_psd_for_random_povms(povm in random_qubit_povm(3)) {
        // Construction guarantees completeness; the uncertainty operator
        // must come out PSD.
        let delta = povm.uncertainty_operator().unwrap();
        prop_assert!(delta.is_psd(1e-8).unwrap());
    }

    #[test]
    fn variance_routes_agree_on_random_pairs(
        povm in random_qubit_povm(3),
        x in -1.0f64..1.0,
        y in -1.0f64..1.0,
        z in -1.0f64..1.0,
    ) {
        let norm = (x * x + y * y + z * z).sqrt();
        let r = if norm > 1.0 { [x / norm, y / norm, z / norm] } else { [x, y, z] };
        let rho = Operator::bloch_density(r);
        // moments() internally cross-checks the operator-form and
        // probability-form variances within 1e-10 and errors on mismatch.
        let m = povm.moments(&rho).unwrap();
        prop_assert!(m.variance >= -1e-12);
        prop_assert!(m.third_abs_central >= 0.0);
    }

    #[test]
    fn cg_split_preserves_norm(state in random_symmetric_state(9)) {
        let split = cg_split(&state).unwrap();
        let total: f64 = split.upper.iter().chain(&split.lower).map(|z| z.norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn symmetric_sampler_conserves_probability(state in random_symmetric_state(8), seed in 0u64..1000) {
        // Every step asserts sum_i p_i = 1 within 1e-9 and returns an
        // error otherwise; a clean run is the property.
        let sampler = SymmetricSampler::new(&trine_povm(), &state).unwrap();
        let mut rng = trial_rng(seed, 0);
        let trial = sampler.sample(&mut rng).unwrap();
        prop_assert_eq!(trial.outcomes.len(), 8);
        let r = trial.relative_frequency();
        prop_assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn mixture_cdf_is_monotone(
        mean1 in -3.0f64..3.0,
        mean2 in -3.0f64..3.0,
        std1 in 0.05f64..2.0,
        std2 in 0.05f64..2.0,
        w in 0.05f64..0.95,
    ) {
        let mix = GaussianMixtureCdf::new(vec![
            MixtureComponent { weight: w, mean: mean1, std: std1 },
            MixtureComponent { weight: 1.0 - w, mean: mean2, std: std2 },
        ]).unwrap();
        let mut prev = -1.0;
        let mut x = -12.0;
        while x <= 12.0 {
            let v = mix.cdf(x);
            prop_assert!(v >= prev - 1e-15);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            prev = v;
            x += 0.5;
        }
    }
}
