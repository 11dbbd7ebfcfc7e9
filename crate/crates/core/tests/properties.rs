use proptest::prelude::*;
use qwerner::correlations::{concurrence_werner, density_matrix, discord, DiscordOptimizer};
use qwerner::fock_oracle::wootters_concurrence;
use qwerner::phasespace::{
    reduced_wigner, wigner_grid, wigner_quasi_werner, GridAxis, GridSpec, MixedPartConvention, PhasePoint2, TwoModeWigner,
};
use qwerner::teleport::{fidelity, fidelity_sweep, FidelityOptions, InputState};
use qwerner::{Complex64, QuasiWernerParams, Sign};

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn params() -> impl Strategy<Value = QuasiWernerParams> {
    (0.1f64..1.5, -3.2f64..3.2, 0.1f64..1.5, -3.2f64..3.2, 0u32..=3, 0.0f64..=1.0, sign()).prop_map(
        |(ra, pa, rb, pb, m, a, s)| {
            QuasiWernerParams::new(Complex64::from_polar(ra, pa), Complex64::from_polar(rb, pb), m, a, s).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_wigner_is_the_marginal(p in params(), q in -2.0f64..2.0, pp in -2.0f64..2.0) {
        let z = Complex64::new(q, pp);
        let w = TwoModeWigner::new(&p, MixedPartConvention::SubspaceIdentity).unwrap();
        let r = reduced_wigner(&p, 1, z, MixedPartConvention::SubspaceIdentity).unwrap();
        prop_assert!((w.marginal_first(z) - r).abs() < 1e-12, "{} vs {}", w.marginal_first(z), r);
    }

    #[test]
    fn closed_form_concurrence_matches_wootters(p in params()) {
        let rho = density_matrix(&p).unwrap();
        let c = concurrence_werner(&p).unwrap();
        prop_assert!((c - wootters_concurrence(&rho).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn discord_bounded_by_mutual_information(p in params()) {
        let r = discord(&p, &DiscordOptimizer::default()).unwrap();
        prop_assert!(r.discord >= -1e-9);
        prop_assert!(r.discord <= r.mutual_information + 1e-12);
    }

    #[test]
    fn fidelity_is_affine_in_mixing(al in 0.1f64..1.2, m in 0u32..=2, s in sign(), a in 0.0f64..1.0) {
        let opts = FidelityOptions::default();
        let input = InputState::Coherent { gamma: Complex64::new(0.0, 0.0) };
        let p = QuasiWernerParams::real(al, al, m, a, s).unwrap();
        let curve = fidelity_sweep(&input, &p, &[0.0, 1.0], &opts).unwrap();
        let direct = fidelity(&input, &p, &opts).unwrap().value;
        let interp = (1.0 - a) * curve.points[0].fidelity.value + a * curve.points[1].fidelity.value;
        prop_assert!((direct - interp).abs() < 1e-9, "{direct} vs {interp}");
    }
}

#[test]
fn grid_matches_pointwise_evaluation() {
    let p = QuasiWernerParams::real(0.7, 0.4, 2, 0.3, Sign::Minus).unwrap();
    let ax = GridAxis::range(-1.5, 1.5, 4);
    let grid = GridSpec { q1: ax, p1: GridAxis::fixed(0.25), q2: ax, p2: ax };
    let rows = wigner_grid(&p, &grid, MixedPartConvention::SubspaceIdentity).unwrap();
    assert_eq!(rows.len(), 64);
    for r in rows {
        let w = wigner_quasi_werner(&p, PhasePoint2::new(r.q1, r.p1, r.q2, r.p2), MixedPartConvention::SubspaceIdentity).unwrap();
        assert_eq!(w, r.w);
    }
}
