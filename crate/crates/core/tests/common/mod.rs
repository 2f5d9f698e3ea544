//! Shared helpers for the integration suites, most importantly the
//! brute-force convolution oracle the pseudo-spectral pipeline is checked
//! against. The oracle never touches a transform: it sums over all retained
//! mode pairs directly, so it is an independent route to the advection term.

#![allow(dead_code)]

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use hsns_core::{Lattice, SpectralField, TorusConfig, Vec3c};

pub fn lattice(trunc_n: u32) -> Arc<Lattice> {
    TorusConfig::new(TAU, trunc_n, 3 * trunc_n as usize)
        .unwrap()
        .lattice()
        .unwrap()
}

pub fn lattice_on_grid(trunc_n: u32, grid_n: usize) -> Arc<Lattice> {
    TorusConfig::new(TAU, trunc_n, grid_n).unwrap().lattice().unwrap()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Projected advection term by direct summation over all retained mode
/// pairs: coefficient at `m` is `i sum_{k1 + k2 = m} (u(k1) . kappa2) v(k2)`,
/// projected mode by mode. Quadratic in the mode count; use small lattices.
pub fn advection_oracle(u: &SpectralField, v: &SpectralField) -> SpectralField {
    let lat = u.lattice();
    assert!(lat.same_as(v.lattice()), "oracle needs matching lattices");
    let zero: Vec3c = [Complex64::ZERO; 3];
    let mut sums: Vec<Vec3c> = vec![zero; lat.len()];
    for i1 in 0..lat.len() {
        let cu = u.coeffs()[i1];
        if cu.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        let k1 = lat.k_at(i1);
        for i2 in 0..lat.len() {
            let k2 = lat.k_at(i2);
            let m = [k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]];
            let Some(im) = lat.index_of(m) else { continue };
            let kappa2 = lat.kappa_at(i2);
            let dot = cu[0] * kappa2[0] + cu[1] * kappa2[1] + cu[2] * kappa2[2];
            let f = Complex64::i() * dot;
            let cv = v.coeffs()[i2];
            for comp in 0..3 {
                sums[im][comp] += f * cv[comp];
            }
        }
    }
    let entries: Vec<([i32; 3], Vec3c)> =
        (0..lat.len()).map(|i| (lat.k_at(i), sums[i])).collect();
    SpectralField::from_modes(Arc::clone(lat), &entries)
        .unwrap()
        .leray_project()
}

/// Relative difference in the zeroth Sobolev norm, guarded for zero scale.
pub fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let scale = a.sobolev_norm(0.0).max(b.sobolev_norm(0.0));
    if scale == 0.0 {
        0.0
    } else {
        (a - b).sobolev_norm(0.0) / scale
    }
}
