//! Periodic box geometry and the retained wavevector lattice.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of the periodic box and the retained Fourier band.
///
/// Fixes the wavevector lattice and thereby every norm in the crate. Modes
/// with `0 < |k| <= trunc_n` (Euclidean length of the integer index) are
/// retained; `k = 0` never is, so every representable field has zero mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusConfig {
    /// Side length of the box.
    pub period: f64,
    /// Truncation radius of the retained ball `|k| <= trunc_n`.
    pub trunc_n: u32,
    /// Physical-space grid points per axis. Must be at least `3 * trunc_n`
    /// so that quadratic products of retained modes are alias-free.
    pub grid_n: usize,
}

impl TorusConfig {
    pub fn new(period: f64, trunc_n: u32, grid_n: usize) -> Result<Self> {
        let cfg = Self { period, trunc_n, grid_n };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::Config(format!(
                "torus.period must be positive and finite, got {}",
                self.period
            )));
        }
        if self.trunc_n < 1 {
            return Err(Error::Config("torus.trunc_n must be at least 1".into()));
        }
        if self.grid_n < 3 * self.trunc_n as usize {
            return Err(Error::GridTooSmall { grid_n: self.grid_n, trunc_n: self.trunc_n });
        }
        Ok(())
    }

    /// Build the retained lattice for this box.
    pub fn lattice(&self) -> Result<Arc<Lattice>> {
        self.validate()?;
        Ok(Arc::new(Lattice::build(*self)))
    }

    /// Number of retained modes without building the lattice.
    pub fn mode_count(&self) -> u64 {
        let n = self.trunc_n as i64;
        let mut count = 0u64;
        for kx in -n..=n {
            for ky in -n..=n {
                for kz in -n..=n {
                    let r2 = kx * kx + ky * ky + kz * kz;
                    if r2 > 0 && r2 <= n * n {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

/// One retained Fourier mode: integer index and physical wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    pub k: [i32; 3],
    /// `(2 pi / L) * k`.
    pub kappa: [f64; 3],
}

impl WaveVector {
    /// Dissipation eigenvalue `|kappa|^2`; strictly positive on the lattice.
    pub fn lambda(&self) -> f64 {
        self.kappa[0] * self.kappa[0] + self.kappa[1] * self.kappa[1] + self.kappa[2] * self.kappa[2]
    }
}

/// The retained wavevector set with precomputed geometry.
///
/// Modes are stored in lexicographic order of `k`; that order is the storage
/// order of every coefficient vector and of the snapshot container. For each
/// mode the position of its conjugate partner `-k` is precomputed, and
/// `half()` lists one representative per `{k, -k}` pair (the lexicographically
/// positive one). Since `k = 0` is excluded and `trunc_n < grid_n / 2`, no
/// retained mode is its own conjugate.
#[derive(Debug)]
pub struct Lattice {
    config: TorusConfig,
    modes: Vec<[i32; 3]>,
    index: HashMap<[i32; 3], usize>,
    kappa: Vec<[f64; 3]>,
    lambda: Vec<f64>,
    conjugate: Vec<usize>,
    half: Vec<usize>,
}

impl Lattice {
    fn build(config: TorusConfig) -> Self {
        let n = config.trunc_n as i32;
        let r2max = (n as i64) * (n as i64);
        let scale = TAU / config.period;

        let mut modes = Vec::new();
        for kx in -n..=n {
            for ky in -n..=n {
                for kz in -n..=n {
                    let r2 = (kx as i64) * (kx as i64)
                        + (ky as i64) * (ky as i64)
                        + (kz as i64) * (kz as i64);
                    if r2 > 0 && r2 <= r2max {
                        modes.push([kx, ky, kz]);
                    }
                }
            }
        }
        // The nested loops emit lexicographic order already.
        debug_assert!(modes.windows(2).all(|w| w[0] < w[1]));

        let index: HashMap<[i32; 3], usize> =
            modes.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let kappa: Vec<[f64; 3]> = modes
            .iter()
            .map(|k| [scale * k[0] as f64, scale * k[1] as f64, scale * k[2] as f64])
            .collect();
        let lambda: Vec<f64> =
            kappa.iter().map(|kp| kp[0] * kp[0] + kp[1] * kp[1] + kp[2] * kp[2]).collect();
        let conjugate: Vec<usize> =
            modes.iter().map(|k| index[&[-k[0], -k[1], -k[2]]]).collect();
        let half: Vec<usize> = modes
            .iter()
            .enumerate()
            .filter(|(_, k)| **k > [0, 0, 0])
            .map(|(i, _)| i)
            .collect();

        Self { config, modes, index, kappa, lambda, conjugate, half }
    }

    pub fn config(&self) -> &TorusConfig {
        &self.config
    }

    /// Total number of retained modes (both halves of each conjugate pair).
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn k_at(&self, i: usize) -> [i32; 3] {
        self.modes[i]
    }

    pub fn kappa_at(&self, i: usize) -> [f64; 3] {
        self.kappa[i]
    }

    pub fn lambda_at(&self, i: usize) -> f64 {
        self.lambda[i]
    }

    pub fn wavevector(&self, i: usize) -> WaveVector {
        WaveVector { k: self.modes[i], kappa: self.kappa[i] }
    }

    /// Storage position of `-k` for the mode stored at `i`.
    pub fn conjugate_of(&self, i: usize) -> usize {
        self.conjugate[i]
    }

    /// Positions of the lexicographically positive representative of each
    /// conjugate pair.
    pub fn half(&self) -> &[usize] {
        &self.half
    }

    pub fn index_of(&self, k: [i32; 3]) -> Option<usize> {
        self.index.get(&k).copied()
    }

    /// Whether another lattice describes the same box and band.
    pub fn same_as(&self, other: &Lattice) -> bool {
        self.config == other.config
    }
}
