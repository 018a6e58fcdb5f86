use std::f64::consts::{PI, SQRT_2};

use entangle_core::analytic::{
    cavity_photon_probs_closed, cavity_photon_probs_quadrature, cavity_pr_closed_form, injected_pr, pr_bound,
    s_matrix, Scatterer,
};
use entangle_core::spectra::SpectralFunction;
use entangle_core::PhysicalParams;
use proptest::prelude::*;

fn lossless() -> impl Strategy<Value = PhysicalParams> {
    (0.01f64..4.0, 0.01f64..4.0, 0.05f64..5.0, -3.0f64..3.0, -PI..PI)
        .prop_map(|(ll, lr, k, de, ph)| PhysicalParams::new(ll, lr, k).with_delta_e(de).with_delta_lr(ph))
}

proptest! {
    #[test]
    fn amplitudes_are_unitary(p in lossless(), x in -30.0f64..30.0) {
        let dk = x * p.kappa;
        let a = Scatterer::new(&p).amplitudes(dk).unwrap();
        prop_assert!((a.total() - 1.0).abs() < 1e-12);
        prop_assert!((s_matrix(&p, dk).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bright_dark_route_agrees(p in lossless(), x in -30.0f64..30.0) {
        let sc = Scatterer::new(&p);
        let a = sc.amplitudes(x * p.kappa).unwrap();
        let b = sc.amplitudes_bright_dark(x * p.kappa).unwrap();
        prop_assert!((a.c_l - b.c_l).norm() < 1e-10);
        prop_assert!((a.c_r - b.c_r).norm() < 1e-10);
    }

    #[test]
    fn phase_only_rotates_c_r(p in lossless(), x in -10.0f64..10.0, phase in -PI..PI) {
        let dk = x * p.kappa;
        let a = Scatterer::new(&p).amplitudes(dk).unwrap();
        let b = Scatterer::new(&p.with_delta_lr(phase)).amplitudes(dk).unwrap();
        prop_assert!((a.c_l - b.c_l).norm() < 1e-12);
        prop_assert!((a.c_r.norm() - b.c_r.norm()).abs() < 1e-12);
    }

    #[test]
    fn probabilities_are_scale_free(p in lossless(), c in 0.01f64..100.0) {
        let a = cavity_photon_probs_closed(&p).unwrap();
        let b = cavity_photon_probs_closed(&p.scaled(c)).unwrap();
        prop_assert!((a.p_r - b.p_r).abs() < 1e-12);
    }

    #[test]
    fn resonant_success_respects_bound(ll in 0.01f64..4.0, lr in 0.0f64..10.0, k in 0.0f64..5.0) {
        let p_r = cavity_pr_closed_form(ll, lr, k, 0.0);
        let b = pr_bound(&PhysicalParams::new(ll, lr, k.max(1e-300)));
        prop_assert!(p_r <= b.bound + 1e-14);
        prop_assert!(p_r <= 0.5 + 1e-14);
    }

    #[test]
    fn detuning_never_helps(ll in 0.01f64..4.0, lr in 0.01f64..4.0, k in 0.05f64..5.0, de in -3.0f64..3.0) {
        prop_assert!(cavity_pr_closed_form(ll, lr, k, de) <= cavity_pr_closed_form(ll, lr, k, 0.0) + 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_quadrature(p in lossless()) {
        let c = cavity_photon_probs_closed(&p).unwrap();
        let q = cavity_photon_probs_quadrature(&p).unwrap();
        prop_assert!((c.p_r - q.p_r).abs() < 1e-8, "{} vs {}", c.p_r, q.p_r);
        prop_assert!((c.p_l - q.p_l).abs() < 1e-8);
    }

    #[test]
    fn losses_only_remove_probability(ll in 0.05f64..2.0, k in 0.2f64..3.0, g in 0.0f64..0.5, w in 0.05f64..2.0) {
        let p = PhysicalParams::new(ll, SQRT_2 * ll, k).with_gamma(g * k);
        let r = injected_pr(&p, &SpectralFunction::gaussian(w * k).unwrap()).unwrap();
        prop_assert!(r.p_l >= 0.0 && r.p_r >= 0.0);
        prop_assert!(r.p_l + r.p_r <= 1.0 + 1e-9);
        if g == 0.0 {
            prop_assert!(r.p_loss < 1e-9);
        }
    }
}
