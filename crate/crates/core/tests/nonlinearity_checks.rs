//! The advection operator against its independent oracle, the pairing
//! identities, bilinearity, and grid independence of the dealiased product.

mod common;

use std::sync::Arc;

use common::{advection_oracle, c, lattice, lattice_on_grid, rel_diff};
use hsns_core::{advection, pairing, to_physical, InequalityId, SpectralField};
use proptest::prelude::*;

#[test]
fn oracle_agreement_on_small_lattices() {
    for trunc in [2u32, 3, 4] {
        let lat = lattice(trunc);
        for seed in 0..6u64 {
            let u = SpectralField::random(Arc::clone(&lat), 2 * seed, (seed % 3) as f64);
            let v = SpectralField::random(Arc::clone(&lat), 2 * seed + 1, ((seed + 1) % 3) as f64);
            let fast = advection(&u, &v).unwrap();
            let slow = advection_oracle(&u, &v);
            let err = rel_diff(&fast, &slow);
            assert!(err < 1e-11, "trunc {trunc} seed {seed}: oracle mismatch {err}");
        }
    }
}

#[test]
fn oracle_agreement_on_crossed_single_modes() {
    let lat = lattice(2);
    let u = SpectralField::from_mode_pairs(
        Arc::clone(&lat),
        &[([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])],
    )
    .unwrap();
    let v = SpectralField::from_mode_pairs(
        Arc::clone(&lat),
        &[([0, 1, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])],
    )
    .unwrap();
    let fast = advection(&u, &v).unwrap();
    let slow = advection_oracle(&u, &v);
    assert!(rel_diff(&fast, &slow) < 1e-13);
}

#[test]
fn pairing_matches_grid_quadrature() {
    let lat = lattice(4);
    for seed in 0..8u64 {
        let u = SpectralField::random(Arc::clone(&lat), seed, 1.0);
        let v = SpectralField::random(Arc::clone(&lat), seed + 100, 0.0);
        let spectral = pairing(&u, &v).unwrap();
        let quad = to_physical(&u).dot_mean(&to_physical(&v));
        assert!(
            (spectral - quad).abs() <= 1e-10 * spectral.abs().max(1.0),
            "seed {seed}: {spectral} vs {quad}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn antisymmetry_of_the_trilinear_form(seed in any::<u64>()) {
        let lat = lattice(4);
        let u = SpectralField::random(Arc::clone(&lat), seed, 0.0);
        let v = SpectralField::random(Arc::clone(&lat), seed ^ 0xA5A5, 1.0);
        let w = SpectralField::random(Arc::clone(&lat), seed ^ 0x5A5A, 2.0);
        let lhs = pairing(&advection(&u, &v).unwrap(), &w).unwrap();
        let rhs = pairing(&advection(&u, &w).unwrap(), &v).unwrap();
        let scale = u.sobolev_norm(0.0) * v.sobolev_norm(1.0) * w.sobolev_norm(1.0);
        prop_assert!((lhs + rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn bilinearity_in_each_argument(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let lat = lattice(3);
        let u1 = SpectralField::random(Arc::clone(&lat), seed, 0.0);
        let u2 = SpectralField::random(Arc::clone(&lat), seed ^ 1, 1.0);
        let v = SpectralField::random(Arc::clone(&lat), seed ^ 2, 0.0);

        let combo = &u1.scaled(a) + &u2.scaled(b);
        let left = advection(&combo, &v).unwrap();
        let right = &advection(&u1, &v).unwrap().scaled(a) + &advection(&u2, &v).unwrap().scaled(b);
        prop_assert!(rel_diff(&left, &right) < 1e-11);

        let left2 = advection(&v, &combo).unwrap();
        let right2 = &advection(&v, &u1).unwrap().scaled(a) + &advection(&v, &u2).unwrap().scaled(b);
        prop_assert!(rel_diff(&left2, &right2) < 1e-11);
    }

    #[test]
    fn dealiasing_makes_grid_size_irrelevant(seed in any::<u64>()) {
        // any grid at or above three times the truncation gives the same
        // retained product
        let trunc = 4u32;
        let tight = lattice_on_grid(trunc, 12);
        let loose = lattice_on_grid(trunc, 16);
        let u_t = SpectralField::random(Arc::clone(&tight), seed, 0.0);
        let v_t = SpectralField::random(Arc::clone(&tight), seed ^ 7, 1.0);
        let u_l = u_t.restrict(&loose);
        let v_l = v_t.restrict(&loose);
        let b_t = advection(&u_t, &v_t).unwrap();
        let b_l = advection(&u_l, &v_l).unwrap().restrict(&tight);
        prop_assert!(rel_diff(&b_t, &b_l) < 1e-12);
    }
}

#[test]
fn single_mode_pair_ratio_against_oracle() {
    // the product-estimate ratio evaluated on the crossed single-mode pair,
    // checked against the direct-summation route
    let lat = lattice(2);
    let u = SpectralField::from_mode_pairs(
        Arc::clone(&lat),
        &[([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])],
    )
    .unwrap();
    let v = SpectralField::from_mode_pairs(
        Arc::clone(&lat),
        &[([0, 1, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])],
    )
    .unwrap();
    let ratio = hsns_core::inequality_ratio(InequalityId::B1M1, 1.25, &[u.clone(), v.clone()])
        .unwrap()
        .unwrap();
    let expected =
        advection_oracle(&u, &v).sobolev_norm(1.0) / (u.sobolev_norm(2.0) * v.sobolev_norm(2.0));
    assert!((ratio - expected).abs() <= 1e-11 * expected);
}

#[test]
fn estimator_is_reproducible_and_seed_sensitive() {
    let lat = lattice(3);
    let a = hsns_core::estimate_inequality_constant(&lat, InequalityId::Bcon4, 1.25, 64, 5).unwrap();
    let b = hsns_core::estimate_inequality_constant(&lat, InequalityId::Bcon4, 1.25, 64, 5).unwrap();
    assert_eq!(a.max_ratio, b.max_ratio);
    assert_eq!(
        a.witness.as_ref().map(|w| w.trial_index),
        b.witness.as_ref().map(|w| w.trial_index)
    );
    let other =
        hsns_core::estimate_inequality_constant(&lat, InequalityId::Bcon4, 1.25, 64, 6).unwrap();
    assert_ne!(a.max_ratio, other.max_ratio);
}

#[test]
fn wire_line_has_the_fixed_key_set() {
    let lat = lattice(2);
    let report =
        hsns_core::estimate_inequality_constant(&lat, InequalityId::B1M1, 1.25, 8, 1).unwrap();
    let line = report.wire_line();
    let value: serde_json::Value = serde_json::from_str(&line).unwrap();
    let obj = value.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        vec!["alpha", "id", "max_ratio", "seed", "trials", "trunc_n", "witness_seed"]
    );
    assert_eq!(obj["id"], "B1_m1");
}
