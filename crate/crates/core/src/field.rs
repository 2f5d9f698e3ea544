//! Divergence-free vector fields stored as truncated Fourier coefficients.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{mode_rng, Stream};
use crate::torus::Lattice;

/// Complex amplitude of one vector mode.
pub type Vec3c = [Complex64; 3];

pub(crate) const ZERO3: Vec3c = [Complex64::ZERO, Complex64::ZERO, Complex64::ZERO];

/// Per-mode orthogonal projection onto the plane normal to `kappa`,
/// `c - kappa (kappa . c) / |kappa|^2`. This is the Fourier symbol of the
/// projection onto divergence-free fields; it annihilates gradients exactly.
pub fn project_normal(kappa: [f64; 3], c: Vec3c) -> Vec3c {
    let k2 = kappa[0] * kappa[0] + kappa[1] * kappa[1] + kappa[2] * kappa[2];
    let dot = c[0] * kappa[0] + c[1] * kappa[1] + c[2] * kappa[2];
    let f = dot / k2;
    [c[0] - f * kappa[0], c[1] - f * kappa[1], c[2] - f * kappa[2]]
}

/// A real divergence-free zero-mean vector field on the torus, represented by
/// its Fourier coefficients on the retained lattice.
///
/// Invariants (maintained by the operations of this crate, measurable via
/// [`SpectralField::divergence_residual`] and
/// [`SpectralField::hermitian_residual`]):
/// - Hermitian symmetry `c(-k) = conj(c(k))`, so the physical field is real;
/// - `kappa . c(k) = 0` per mode, so the field is divergence-free;
/// - no `k = 0` entry exists, so the mean vanishes structurally.
///
/// Coefficients follow the convention `u(x) = sum_k c(k) exp(i kappa . x)`.
/// All Sobolev norms are plain lattice sums `(sum_k lambda^s |c(k)|^2)^{1/2}`
/// with `lambda = |kappa|^2`; the constant volume factor `L^3` relating the
/// zeroth norm to the physical integral is omitted everywhere.
#[derive(Debug, Clone)]
pub struct SpectralField {
    lattice: Arc<Lattice>,
    coeffs: Vec<Vec3c>,
}

impl SpectralField {
    pub fn zero(lattice: Arc<Lattice>) -> Self {
        let coeffs = vec![ZERO3; lattice.len()];
        Self { lattice, coeffs }
    }

    /// Build a field from explicit `(k, amplitude)` entries without any
    /// symmetrization or projection. A `k = 0` entry is rejected (it would
    /// carry a mean), as is any mode outside the retained ball.
    pub fn from_modes(lattice: Arc<Lattice>, entries: &[([i32; 3], Vec3c)]) -> Result<Self> {
        let mut field = Self::zero(lattice);
        for &(k, c) in entries {
            if k == [0, 0, 0] {
                return Err(Error::ZeroMode);
            }
            let i = field
                .lattice
                .index_of(k)
                .ok_or(Error::ModeOutsideLattice(k[0], k[1], k[2]))?;
            field.coeffs[i] = c;
        }
        Ok(field)
    }

    /// Build a field from `(k, amplitude)` entries, filling `-k` with the
    /// conjugate amplitude so the result is Hermitian by construction.
    pub fn from_mode_pairs(lattice: Arc<Lattice>, entries: &[([i32; 3], Vec3c)]) -> Result<Self> {
        let mut field = Self::zero(lattice);
        for &(k, c) in entries {
            if k == [0, 0, 0] {
                return Err(Error::ZeroMode);
            }
            let i = field
                .lattice
                .index_of(k)
                .ok_or(Error::ModeOutsideLattice(k[0], k[1], k[2]))?;
            field.coeffs[i] = c;
            let j = field.lattice.conjugate_of(i);
            field.coeffs[j] = [c[0].conj(), c[1].conj(), c[2].conj()];
        }
        Ok(field)
    }

    /// Gaussian field with spectral profile `lambda^{-beta}`, projected onto
    /// divergence-free fields and Hermitian-symmetrized. Deterministic in
    /// `(seed, beta)`.
    pub fn random(lattice: Arc<Lattice>, seed: u64, beta: f64) -> Self {
        let mut field = Self::zero(lattice);
        for &h in field.lattice.half() {
            let k = field.lattice.k_at(h);
            let kappa = field.lattice.kappa_at(h);
            let profile = field.lattice.lambda_at(h).powf(-beta);
            let mut rng = mode_rng(seed, Stream::FieldSynthesis, 0, k);
            let mut g = ZERO3;
            for c in &mut g {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *c = Complex64::new(re, im);
            }
            let mut c = project_normal(kappa, g);
            for comp in &mut c {
                *comp *= profile;
            }
            field.coeffs[h] = c;
            field.coeffs[field.lattice.conjugate_of(h)] = [c[0].conj(), c[1].conj(), c[2].conj()];
        }
        field
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Vec3c] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Vec3c] {
        &mut self.coeffs
    }

    pub fn coeff(&self, k: [i32; 3]) -> Option<Vec3c> {
        self.lattice.index_of(k).map(|i| self.coeffs[i])
    }

    /// Projection onto divergence-free fields, applied mode by mode.
    /// Idempotent; preserves Hermitian symmetry.
    pub fn leray_project(&self) -> Self {
        let mut out = self.clone();
        for i in 0..out.coeffs.len() {
            out.coeffs[i] = project_normal(self.lattice.kappa_at(i), self.coeffs[i]);
        }
        out
    }

    /// Apply the fractional dissipation operator: multiply each mode by
    /// `lambda^exponent`. Negative exponents are fine since `lambda > 0` on
    /// the whole lattice. Commutes with truncation and with itself.
    pub fn fractional_stokes(&self, exponent: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.coeffs.len() {
            let m = self.lattice.lambda_at(i).powf(exponent);
            for c in &mut out.coeffs[i] {
                *c *= m;
            }
        }
        out
    }

    /// Apply the linear dissipative flow over time `t`: multiply each mode by
    /// `exp(-nu lambda^alpha t)`. Exact, so the stiff part of any step costs
    /// no accuracy.
    pub fn dissipate(&self, nu: f64, alpha: f64, t: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.coeffs.len() {
            let m = (-nu * self.lattice.lambda_at(i).powf(alpha) * t).exp();
            for c in &mut out.coeffs[i] {
                *c *= m;
            }
        }
        out
    }

    /// Squared Sobolev norm `sum_k lambda^s |c(k)|^2` over the full lattice.
    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.coeffs.len() {
            let w = if s == 0.0 { 1.0 } else { self.lattice.lambda_at(i).powf(s) };
            let c = &self.coeffs[i];
            total += w * (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr());
        }
        total
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    /// Zero every coefficient with `|k| > m`. Idempotent; commutes with
    /// `fractional_stokes` exactly (both act diagonally).
    pub fn truncate(&self, m: u32) -> Self {
        let r2max = (m as i64) * (m as i64);
        let mut out = self.clone();
        for i in 0..out.coeffs.len() {
            let k = self.lattice.k_at(i);
            let r2 = k.iter().map(|&c| (c as i64) * (c as i64)).sum::<i64>();
            if r2 > r2max {
                out.coeffs[i] = ZERO3;
            }
        }
        out
    }

    /// Copy coefficients onto another lattice, keeping modes present in both
    /// and zeroing the rest. Used to compare runs at different truncations.
    pub fn restrict(&self, target: &Arc<Lattice>) -> Self {
        let mut out = Self::zero(Arc::clone(target));
        for i in 0..out.coeffs.len() {
            let k = target.k_at(i);
            if let Some(j) = self.lattice.index_of(k) {
                out.coeffs[i] = self.coeffs[j];
            }
        }
        out
    }

    /// `max_k |kappa . c(k)|` relative to the first Sobolev norm; 0 for the
    /// zero field. Exactly solenoidal fields score at round-off level.
    pub fn divergence_residual(&self) -> f64 {
        let norm1 = self.sobolev_norm(1.0);
        if norm1 == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.coeffs.len() {
            let kappa = self.lattice.kappa_at(i);
            let c = &self.coeffs[i];
            let dot = c[0] * kappa[0] + c[1] * kappa[1] + c[2] * kappa[2];
            worst = worst.max(dot.norm());
        }
        worst / norm1
    }

    /// `max_k |c(-k) - conj(c(k))|` relative to the largest coefficient
    /// amplitude; 0 for the zero field.
    pub fn hermitian_residual(&self) -> f64 {
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for i in 0..self.coeffs.len() {
            let j = self.lattice.conjugate_of(i);
            let a = &self.coeffs[i];
            let b = &self.coeffs[j];
            for c in 0..3 {
                scale = scale.max(a[c].norm());
                worst = worst.max((b[c] - a[c].conj()).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            for z in c.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    /// Exact coefficient-level equality; used by determinism contracts.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.lattice.same_as(&other.lattice)
            && self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| {
                (0..3).all(|c| {
                    a[c].re.to_bits() == b[c].re.to_bits() && a[c].im.to_bits() == b[c].im.to_bits()
                })
            })
    }

    fn assert_compatible(&self, other: &Self, what: &str) {
        assert!(
            self.lattice.same_as(&other.lattice),
            "lattice mismatch in field {what}"
        );
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        self.assert_compatible(rhs, "addition");
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            for c in 0..3 {
                a[c] += b[c];
            }
        }
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        self.assert_compatible(rhs, "subtraction");
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            for c in 0..3 {
                a[c] -= b[c];
            }
        }
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::TorusConfig;
    use std::f64::consts::TAU;

    fn lat(n: u32) -> Arc<Lattice> {
        TorusConfig::new(TAU, n, 3 * n as usize).unwrap().lattice().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn leray_kills_gradient_modes() {
        // c(k) = i kappa phi is the transform of grad(phi); projection must
        // send it to zero.
        let lat = lat(2);
        let k = [1, 1, 0];
        let i = lat.index_of(k).unwrap();
        let kappa = lat.kappa_at(i);
        let phi = c(0.3, -0.7);
        let grad: Vec3c = [
            Complex64::i() * kappa[0] * phi,
            Complex64::i() * kappa[1] * phi,
            Complex64::i() * kappa[2] * phi,
        ];
        let u = SpectralField::from_mode_pairs(Arc::clone(&lat), &[(k, grad)]).unwrap();
        let p = u.leray_project();
        assert!(p.sobolev_norm(0.0) < 1e-15 * u.sobolev_norm(0.0).max(1.0));
    }

    #[test]
    fn leray_fixes_transverse_modes() {
        let lat = lat(2);
        let u = SpectralField::from_mode_pairs(
            Arc::clone(&lat),
            &[([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])],
        )
        .unwrap();
        let p = u.leray_project();
        assert!((&p - &u).sobolev_norm(0.0) == 0.0);
    }

    #[test]
    fn leray_oblique_mode_by_hand() {
        // k = (1,1,0), c = e_x: I - kappa kappa^T / |kappa|^2 gives
        // (1/2, -1/2, 0), and kappa . result = 0.
        let lat = lat(2);
        let u = SpectralField::from_mode_pairs(
            Arc::clone(&lat),
            &[([1, 1, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])],
        )
        .unwrap();
        let p = u.leray_project();
        let out = p.coeff([1, 1, 0]).unwrap();
        assert!((out[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((out[1] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!(out[2].norm() < 1e-15);
        assert!(p.divergence_residual() < 1e-14);
    }

    #[test]
    fn mean_component_rejected() {
        let lat = lat(2);
        let err = SpectralField::from_modes(
            Arc::clone(&lat),
            &[([0, 0, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])],
        )
        .unwrap_err();
        assert!(matches!(err, Error::ZeroMode));
    }

    #[test]
    fn fractional_stokes_examples() {
        let lat = lat(2);
        let u = SpectralField::from_mode_pairs(
            Arc::clone(&lat),
            &[([1, 0, 0], [c(0.0, 0.0), c(2.0, -1.0), c(0.0, 0.0)])],
        )
        .unwrap();
        // zero exponent is the identity
        assert!(u.fractional_stokes(0.0).bitwise_eq(&u));
        // lambda = 1 at |k| = 1 with period 2*pi, so exponent 1 is also the identity there
        let a = u.fractional_stokes(1.0);
        assert!((a.coeff([1, 0, 0]).unwrap()[1] - c(2.0, -1.0)).norm() < 1e-15);

        // lambda = 3 at k = (1,1,1); multiplier 3^{5/4}
        let lat3 = self::lat(2);
        let v = SpectralField::from_mode_pairs(
            Arc::clone(&lat3),
            &[([1, 1, 1], [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])],
        )
        .unwrap();
        let w = v.fractional_stokes(1.25);
        let expected = 3.0f64.powf(1.25);
        assert!((expected - 3.9482220388574776).abs() < 1e-12);
        assert!((w.coeff([1, 1, 1]).unwrap()[0] - c(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sobolev_norm_examples() {
        let lat = lat(2);
        let zero = SpectralField::zero(Arc::clone(&lat));
        assert_eq!(zero.sobolev_norm(0.0), 0.0);
        assert_eq!(zero.sobolev_norm(-1.5), 0.0);

        let a = 0.8;
        let u = SpectralField::from_mode_pairs(
            Arc::clone(&lat),
            &[([1, 0, 0], [c(0.0, 0.0), c(a, 0.0), c(0.0, 0.0)])],
        )
        .unwrap();
        // two conjugate modes each contribute a^2
        assert!((u.sobolev_norm(0.0) - (2.0f64).sqrt() * a).abs() < 1e-15);
        // lambda = 1 at this mode, so s = 2 gives the same value
        assert!((u.sobolev_norm(2.0) - (2.0f64).sqrt() * a).abs() < 1e-15);
    }

    #[test]
    fn truncation_examples() {
        let lat = lat(3);
        let u = SpectralField::from_mode_pairs(
            Arc::clone(&lat),
            &[
                ([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
                ([3, 0, 0], [c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]),
            ],
        )
        .unwrap();
        assert!(u.truncate(3).bitwise_eq(&u));
        let t = u.truncate(2);
        assert_eq!(t.coeff([3, 0, 0]).unwrap(), ZERO3);
        assert!((t.sobolev_norm(0.0) - (2.0f64).sqrt()).abs() < 1e-15);
        // single mode |k| = 3 truncated at 2 vanishes entirely
        let v = SpectralField::from_mode_pairs(
            Arc::clone(&lat),
            &[([3, 0, 0], [c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)])],
        )
        .unwrap();
        assert_eq!(v.truncate(2).sobolev_norm(0.0), 0.0);
    }

    #[test]
    fn random_field_is_solenoidal_and_hermitian() {
        let lat = lat(3);
        let u = SpectralField::random(Arc::clone(&lat), 42, 1.0);
        assert!(u.divergence_residual() < 1e-13);
        assert!(u.hermitian_residual() < 1e-15);
        assert!(u.sobolev_norm(0.0) > 0.0);
        // deterministic in the seed
        let v = SpectralField::random(Arc::clone(&lat), 42, 1.0);
        assert!(u.bitwise_eq(&v));
        let w = SpectralField::random(Arc::clone(&lat), 43, 1.0);
        assert!(!u.bitwise_eq(&w));
    }

    #[test]
    fn restrict_keeps_common_modes() {
        let big = lat(3);
        let small = lat(2);
        let u = SpectralField::random(Arc::clone(&big), 7, 0.0);
        let r = u.restrict(&small);
        for i in 0..small.len() {
            let k = small.k_at(i);
            assert_eq!(r.coeffs()[i], u.coeff(k).unwrap());
        }
    }
}
