//! Transforms between coefficient space and the physical grid.
//!
//! Convention: `u(x_j) = sum_k c(k) exp(2 pi i k . j / N)` on the uniform
//! grid `x_j = (L/N) j`. The synthesis direction is the unnormalized inverse
//! DFT; analysis divides by `N^3`. Under this convention the grid mean square
//! `(1/N^3) sum_j |u(x_j)|^2` equals `sum_k |c(k)|^2` exactly for band-limited
//! fields (discrete Parseval), which is what the norm tests rely on.

use std::cell::RefCell;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::torus::Lattice;

/// Real-valued vector field sampled on the uniform grid.
///
/// Storage is component-major; within a component the index is
/// `(ix * n + iy) * n + iz`.
#[derive(Debug, Clone)]
pub struct PhysicalField {
    pub grid_n: usize,
    pub period: f64,
    pub components: [Vec<f64>; 3],
}

impl PhysicalField {
    pub fn zeros(grid_n: usize, period: f64) -> Self {
        Self {
            grid_n,
            period,
            components: [
                vec![0.0; grid_n * grid_n * grid_n],
                vec![0.0; grid_n * grid_n * grid_n],
                vec![0.0; grid_n * grid_n * grid_n],
            ],
        }
    }

    pub fn value_at(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        let i = (ix * self.grid_n + iy) * self.grid_n + iz;
        [self.components[0][i], self.components[1][i], self.components[2][i]]
    }

    /// Grid mean of `|u(x)|^2`; the quadrature counterpart of the squared
    /// zeroth Sobolev norm.
    pub fn mean_sq(&self) -> f64 {
        let n3 = (self.grid_n * self.grid_n * self.grid_n) as f64;
        let total: f64 = self
            .components
            .iter()
            .map(|comp| comp.iter().map(|v| v * v).sum::<f64>())
            .sum();
        total / n3
    }

    /// Grid mean of `u(x) . v(x)`; the quadrature counterpart of the pairing.
    pub fn dot_mean(&self, other: &PhysicalField) -> f64 {
        assert_eq!(self.grid_n, other.grid_n, "grid mismatch in dot_mean");
        let n3 = (self.grid_n * self.grid_n * self.grid_n) as f64;
        let mut total = 0.0;
        for c in 0..3 {
            total += self.components[c]
                .iter()
                .zip(&other.components[c])
                .map(|(a, b)| a * b)
                .sum::<f64>();
        }
        total / n3
    }
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    // The planner caches plans internally; the lock is held only for lookup.
    planner().lock().unwrap().plan_fft(n, direction)
}

thread_local! {
    // Per-thread transform workspace; the cube sizes in one process are few,
    // so a single growable buffer per role is enough.
    static FFT_SWAP: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
    static FFT_SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// In-place 3D FFT of an `n^3` cube stored as `(ix * n + iy) * n + iz`.
///
/// Each round batch-transforms the contiguous last axis and then applies the
/// cyclic transpose `(x, y, z) -> (z, x, y)`; after three rounds all axes are
/// transformed and the layout is back to the original orientation.
pub(crate) fn fft3(data: &mut Vec<Complex64>, n: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n * n * n);
    let fft = plan(n, direction);
    FFT_SWAP.with(|swap_cell| {
        FFT_SCRATCH.with(|scratch_cell| {
            let mut swap = swap_cell.borrow_mut();
            let mut scratch = scratch_cell.borrow_mut();
            swap.resize(data.len(), Complex64::ZERO);
            scratch.resize(fft.get_inplace_scratch_len(), Complex64::ZERO);
            for _ in 0..3 {
                fft.process_with_scratch(data, &mut scratch);
                for ix in 0..n {
                    for iy in 0..n {
                        let src = (ix * n + iy) * n;
                        for iz in 0..n {
                            swap[(iz * n + ix) * n + iy] = data[src + iz];
                        }
                    }
                }
                std::mem::swap(data, &mut *swap);
            }
        })
    });
}

pub(crate) fn grid_index(k: [i32; 3], n: usize) -> usize {
    let ni = n as i32;
    let wrap = |c: i32| c.rem_euclid(ni) as usize;
    (wrap(k[0]) * n + wrap(k[1])) * n + wrap(k[2])
}

/// Synthesize two Hermitian coefficient sets into two real grids with a
/// single complex transform: pack `C(k) = A(k) + i B(k)`, so the inverse
/// transform carries `a(x)` in the real part and `b(x)` in the imaginary
/// part. Fields packed together must negate together for sign symmetry to
/// survive bit for bit; callers group related slots accordingly.
pub(crate) fn synthesize_pair(
    lat: &Lattice,
    n: usize,
    coeff_a: impl Fn(usize) -> Complex64,
    coeff_b: impl Fn(usize) -> Complex64,
    out_a: &mut [f64],
    out_b: &mut [f64],
    work: &mut Vec<Complex64>,
) {
    work.fill(Complex64::ZERO);
    for m in 0..lat.len() {
        let idx = grid_index(lat.k_at(m), n);
        work[idx] = coeff_a(m) + Complex64::i() * coeff_b(m);
    }
    fft3(work, n, FftDirection::Inverse);
    for ((a, b), g) in out_a.iter_mut().zip(out_b.iter_mut()).zip(work.iter()) {
        *a = g.re;
        *b = g.im;
    }
}

pub(crate) fn synthesize_single(
    lat: &Lattice,
    n: usize,
    coeff: impl Fn(usize) -> Complex64,
    out: &mut [f64],
    work: &mut Vec<Complex64>,
) {
    work.fill(Complex64::ZERO);
    for m in 0..lat.len() {
        work[grid_index(lat.k_at(m), n)] = coeff(m);
    }
    fft3(work, n, FftDirection::Inverse);
    for (o, g) in out.iter_mut().zip(work.iter()) {
        *o = g.re;
    }
}

/// Forward counterpart of [`synthesize_pair`]: one complex transform of
/// `a + i b` and the Hermitian split
/// `A(k) = (Z(k) + conj(Z(-k))) / 2`, `B(k) = (Z(k) - conj(Z(-k))) / (2i)`
/// on the retained modes only.
pub(crate) fn analyze_pair(
    lat: &Lattice,
    n: usize,
    in_a: &[f64],
    in_b: &[f64],
    work: &mut Vec<Complex64>,
    mut out: impl FnMut(usize, Complex64, Complex64),
) {
    for (g, (a, b)) in work.iter_mut().zip(in_a.iter().zip(in_b.iter())) {
        *g = Complex64::new(*a, *b);
    }
    fft3(work, n, FftDirection::Forward);
    let half_inv = 0.5 / (n * n * n) as f64;
    let half_inv_i = Complex64::new(0.0, -half_inv);
    for m in 0..lat.len() {
        let zp = work[grid_index(lat.k_at(m), n)];
        let zm = work[grid_index(lat.k_at(lat.conjugate_of(m)), n)];
        let a = (zp + zm.conj()) * half_inv;
        let b = (zp - zm.conj()) * half_inv_i;
        out(m, a, b);
    }
}

pub(crate) fn analyze_single(
    lat: &Lattice,
    n: usize,
    input: &[f64],
    work: &mut Vec<Complex64>,
    mut out: impl FnMut(usize, Complex64),
) {
    for (g, v) in work.iter_mut().zip(input.iter()) {
        *g = Complex64::new(*v, 0.0);
    }
    fft3(work, n, FftDirection::Forward);
    let inv = 1.0 / (n * n * n) as f64;
    for m in 0..lat.len() {
        out(m, work[grid_index(lat.k_at(m), n)] * inv);
    }
}

/// Evaluate the field on the physical grid of its torus configuration.
pub fn to_physical(u: &SpectralField) -> PhysicalField {
    let lat = u.lattice();
    let n = lat.config().grid_n;
    let mut out = PhysicalField::zeros(n, lat.config().period);
    let mut grid = vec![Complex64::ZERO; n * n * n];
    for comp in 0..3 {
        grid.fill(Complex64::ZERO);
        for i in 0..lat.len() {
            grid[grid_index(lat.k_at(i), n)] = u.coeffs()[i][comp];
        }
        fft3(&mut grid, n, FftDirection::Inverse);
        // Hermitian coefficients synthesize a real field; the imaginary part
        // is round-off and is dropped.
        for (dst, src) in out.components[comp].iter_mut().zip(&grid) {
            *dst = src.re;
        }
    }
    out
}

/// Read the band-limited part of a grid field back into coefficients.
///
/// The `k = 0` bin (the grid mean) is discarded: representable fields have
/// zero mean by construction. No projection is applied, so the round trip
/// `to_physical` then `from_physical` is the identity on band-limited fields
/// up to round-off.
pub fn from_physical(p: &PhysicalField, lattice: &Arc<Lattice>) -> Result<SpectralField> {
    let cfg = lattice.config();
    if p.grid_n < 2 * cfg.trunc_n as usize + 1 {
        return Err(Error::GridTooSmall { grid_n: p.grid_n, trunc_n: cfg.trunc_n });
    }
    if p.period != cfg.period {
        return Err(Error::ConfigMismatch(format!(
            "grid period {} differs from lattice period {}",
            p.period, cfg.period
        )));
    }
    let n = p.grid_n;
    let n3 = (n * n * n) as f64;
    let mut out = SpectralField::zero(Arc::clone(lattice));
    let mut grid = vec![Complex64::ZERO; n * n * n];
    for comp in 0..3 {
        for (dst, src) in grid.iter_mut().zip(&p.components[comp]) {
            *dst = Complex64::new(*src, 0.0);
        }
        fft3(&mut grid, n, FftDirection::Forward);
        for i in 0..lattice.len() {
            out.coeffs_mut()[i][comp] = grid[grid_index(lattice.k_at(i), n)] / n3;
        }
    }
    Ok(out)
}
