//! Property suite for the torus Fourier calculus: projection idempotence,
//! solenoidality after every operation, semigroup additivity of fractional
//! powers, truncation commutation, and Parseval against grid quadrature.

mod common;

use common::{lattice, rel_diff};
use hsns_core::{from_physical, to_physical, SpectralField};
use proptest::prelude::*;
use std::sync::Arc;

fn any_beta() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), Just(2.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), beta in any_beta()) {
        let lat = lattice(4);
        // take an unprojected Gaussian: undo nothing, just perturb the field
        // with a gradient part by scaling one component
        let u = SpectralField::random(Arc::clone(&lat), seed, beta);
        let once = u.leray_project();
        let twice = once.leray_project();
        let drift = (&twice - &once).sobolev_norm(0.0);
        prop_assert!(drift <= 1e-13 * u.sobolev_norm(0.0).max(1e-300));
    }

    #[test]
    fn operations_preserve_solenoidality(seed in any::<u64>(), beta in any_beta(), a in -1.0f64..2.0) {
        let lat = lattice(4);
        let u = SpectralField::random(Arc::clone(&lat), seed, beta);
        prop_assert!(u.divergence_residual() < 1e-13);
        prop_assert!(u.leray_project().divergence_residual() < 1e-13);
        prop_assert!(u.fractional_stokes(a).divergence_residual() < 1e-13);
        prop_assert!(u.truncate(2).divergence_residual() < 1e-13);
        prop_assert!(u.hermitian_residual() < 1e-13);
    }

    #[test]
    fn fractional_powers_compose_additively(
        seed in any::<u64>(),
        a in -1.0f64..1.5,
        b in -1.0f64..1.5,
    ) {
        let lat = lattice(4);
        let u = SpectralField::random(Arc::clone(&lat), seed, 1.0);
        let chained = u.fractional_stokes(a).fractional_stokes(b);
        let joint = u.fractional_stokes(a + b);
        prop_assert!(rel_diff(&chained, &joint) < 1e-12);
    }

    #[test]
    fn truncation_commutes_with_fractional_power(
        seed in any::<u64>(),
        a in -1.0f64..2.0,
        m in 1u32..4,
    ) {
        let lat = lattice(4);
        let u = SpectralField::random(Arc::clone(&lat), seed, 0.0);
        let left = u.truncate(m).fractional_stokes(a);
        let right = u.fractional_stokes(a).truncate(m);
        prop_assert!(left.bitwise_eq(&right));
    }

    #[test]
    fn truncation_never_grows_the_norm(seed in any::<u64>(), m in 1u32..5) {
        let lat = lattice(4);
        let u = SpectralField::random(Arc::clone(&lat), seed, 0.0);
        // brute-force partial sum over the surviving modes
        let mut kept = 0.0;
        for i in 0..lat.len() {
            let k = lat.k_at(i);
            let r2: i64 = k.iter().map(|&c| (c as i64) * (c as i64)).sum();
            if r2 <= (m as i64) * (m as i64) {
                kept += u.coeffs()[i].iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        let truncated = u.truncate(m).sobolev_norm_sq(0.0);
        prop_assert!((truncated - kept).abs() <= 1e-12 * kept.max(1e-300));
        prop_assert!(truncated <= u.sobolev_norm_sq(0.0) * (1.0 + 1e-15));
    }

    #[test]
    fn transform_round_trip(seed in any::<u64>(), beta in any_beta()) {
        let lat = lattice(4);
        let u = SpectralField::random(Arc::clone(&lat), seed, beta);
        let back = from_physical(&to_physical(&u), &lat).unwrap();
        prop_assert!(rel_diff(&back, &u) < 1e-12);
    }

    #[test]
    fn parseval_spectral_vs_quadrature(seed in any::<u64>(), beta in any_beta()) {
        let lat = lattice(4);
        let u = SpectralField::random(Arc::clone(&lat), seed, beta);
        let spectral = u.sobolev_norm_sq(0.0);
        let quad = to_physical(&u).mean_sq();
        prop_assert!((spectral - quad).abs() <= 1e-10 * spectral.max(1e-300));
    }

    #[test]
    fn norm_agrees_with_fractional_power_route(seed in any::<u64>(), s in -2.0f64..3.0) {
        // |u|_s equals the zeroth norm of A^{s/2} u; two algebraic routes.
        let lat = lattice(3);
        let u = SpectralField::random(Arc::clone(&lat), seed, 1.0);
        let direct = u.sobolev_norm(s);
        let routed = u.fractional_stokes(s / 2.0).sobolev_norm(0.0);
        prop_assert!((direct - routed).abs() <= 1e-12 * direct.max(1e-300));
    }
}
