//! The advection operator `P (u . grad) v` and its empirical calculus.
//!
//! Products are evaluated pseudo-spectrally on the dealiased grid mandated by
//! the torus configuration (`grid_n >= 3 * trunc_n`), so the quadratic term is
//! exact on retained modes for solenoidal `u` and the algebraic pairing
//! identities hold to round-off.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::rng::{mode_rng, Stream};
use crate::torus::Lattice;
use crate::transform::{analyze_pair, analyze_single, synthesize_pair, synthesize_single};

/// Trials whose right-hand side carries a factor below this are skipped by
/// the inequality estimator; the ratio is not defined there.
pub const DENOMINATOR_GUARD: f64 = 1e-14;

/// Inner product of two coefficient fields: the real part of
/// `sum_k c_w(k) . conj(c_f(k))` over the full lattice. Symmetric and
/// bilinear; equals the grid quadrature of `w . f` for band-limited fields.
pub fn pairing(w: &SpectralField, f: &SpectralField) -> Result<f64> {
    if !w.lattice().same_as(f.lattice()) {
        return Err(Error::ConfigMismatch("pairing of fields on different tori".into()));
    }
    let mut total = 0.0;
    for (a, b) in w.coeffs().iter().zip(f.coeffs()) {
        for c in 0..3 {
            total += (a[c] * b[c].conj()).re;
        }
    }
    Ok(total)
}

/// The projected advection term `P (u . grad) v`.
///
/// Pipeline: differentiate `v` spectrally, transform `u` and `grad v` to the
/// physical grid, multiply pointwise, transform back, keep retained modes,
/// project. Output is divergence-free and Hermitian; it vanishes when either
/// argument does.
///
/// Real grids ride the transforms two at a time (one in the real, one in the
/// imaginary part). Velocity slots and derivative slots are never packed
/// together: within each of the four argument combinations of the split
/// scheme they negate as blocks, so keeping the blocks apart preserves exact
/// sign symmetry of the result.
pub fn advection(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    if !u.lattice().same_as(v.lattice()) {
        return Err(Error::ConfigMismatch("advection of fields on different tori".into()));
    }
    let lat = Arc::clone(u.lattice());
    let n = lat.config().grid_n;
    let n3 = n * n * n;

    // slots 0..3: components of u; slot 3 + 3i + j: the grid of d_i v_j
    let mut real: Vec<Vec<f64>> = (0..12).map(|_| vec![0.0f64; n3]).collect();
    let mut work = vec![Complex64::ZERO; n3];
    {
        let deriv = |slot: usize, m: usize| {
            let i = slot / 3;
            let j = slot % 3;
            Complex64::i() * lat.kappa_at(m)[i] * v.coeffs()[m][j]
        };
        let (u_slots, g_slots) = real.split_at_mut(3);
        let (u01, u2) = u_slots.split_at_mut(2);
        let (ua, ub) = u01.split_at_mut(1);
        synthesize_pair(
            &lat,
            n,
            |m| u.coeffs()[m][0],
            |m| u.coeffs()[m][1],
            &mut ua[0],
            &mut ub[0],
            &mut work,
        );
        synthesize_single(&lat, n, |m| u.coeffs()[m][2], &mut u2[0], &mut work);

        let (g_pairs, g_last) = g_slots.split_at_mut(8);
        for (p, chunk) in g_pairs.chunks_mut(2).enumerate() {
            let (ga, gb) = chunk.split_at_mut(1);
            synthesize_pair(
                &lat,
                n,
                |m| deriv(2 * p, m),
                |m| deriv(2 * p + 1, m),
                &mut ga[0],
                &mut gb[0],
                &mut work,
            );
        }
        synthesize_single(&lat, n, |m| deriv(8, m), &mut g_last[0], &mut work);
    }

    let mut acc: Vec<Vec<f64>> = (0..3).map(|_| vec![0.0f64; n3]).collect();
    for (j, aj) in acc.iter_mut().enumerate() {
        for i in 0..3 {
            let ug = &real[i];
            let gg = &real[3 + 3 * i + j];
            for ((a, uv), gv) in aj.iter_mut().zip(ug.iter()).zip(gg.iter()) {
                *a += uv * gv;
            }
        }
    }

    let mut out = SpectralField::zero(Arc::clone(&lat));
    {
        let co = out.coeffs_mut();
        analyze_pair(&lat, n, &acc[0], &acc[1], &mut work, |m, a, b| {
            co[m][0] = a;
            co[m][1] = b;
        });
        analyze_single(&lat, n, &acc[2], &mut work, |m, a| {
            co[m][2] = a;
        });
    }
    Ok(out.leray_project())
}

/// Which functional inequality of the advection term a ratio refers to.
///
/// The string tags are part of the report wire format and are kept stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityId {
    /// `|<B(u1,u2), u3>| <= c |u1|_0 |u2|_a |u3|_a`, valid for `a >= 5/4`.
    #[serde(rename = "Bcon4")]
    Bcon4,
    /// `|<B(u1,u2), A u3>| <= c |u1|_a |u2|_1 |u3|_{a+1}`, `a >= 5/4`.
    #[serde(rename = "BconA")]
    BconA,
    /// `|<B(u1,u2), A u3>| <= c |u1|_1 |u2|_a |u3|_{a+1}`, `a >= 5/4`.
    #[serde(rename = "BconA2")]
    BconA2,
    /// `|B(u,w)|_1 <= c |u|_2 |w|_2`.
    #[serde(rename = "B1_m1")]
    B1M1,
    /// `|B(u,w)|_2 <= c |u|_3 |w|_3`.
    #[serde(rename = "B1_m2")]
    B1M2,
}

impl InequalityId {
    pub const ALL: [InequalityId; 5] = [
        InequalityId::Bcon4,
        InequalityId::BconA,
        InequalityId::BconA2,
        InequalityId::B1M1,
        InequalityId::B1M2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::Bcon4 => "Bcon4",
            InequalityId::BconA => "BconA",
            InequalityId::BconA2 => "BconA2",
            InequalityId::B1M1 => "B1_m1",
            InequalityId::B1M2 => "B1_m2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|id| id.as_str() == s)
    }

    /// Number of random fields a trial consumes.
    pub fn arity(&self) -> usize {
        match self {
            InequalityId::Bcon4 | InequalityId::BconA | InequalityId::BconA2 => 3,
            InequalityId::B1M1 | InequalityId::B1M2 => 2,
        }
    }

    /// Whether the inequality is only claimed for `alpha >= 5/4`.
    pub fn requires_alpha_hypothesis(&self) -> bool {
        matches!(self, InequalityId::Bcon4 | InequalityId::BconA | InequalityId::BconA2)
    }
}

impl std::fmt::Display for InequalityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// LHS/RHS ratio of one inequality on one field tuple, or `None` when a
/// denominator factor falls under [`DENOMINATOR_GUARD`].
pub fn inequality_ratio(
    id: InequalityId,
    alpha: f64,
    fields: &[SpectralField],
) -> Result<Option<f64>> {
    if fields.len() != id.arity() {
        return Err(Error::Config(format!(
            "{id} takes {} fields, got {}",
            id.arity(),
            fields.len()
        )));
    }
    let guarded = |lhs: f64, rhs_factors: &[f64]| {
        if rhs_factors.iter().any(|&f| f < DENOMINATOR_GUARD) {
            None
        } else {
            Some(lhs / rhs_factors.iter().product::<f64>())
        }
    };
    let ratio = match id {
        InequalityId::Bcon4 => {
            let b = advection(&fields[0], &fields[1])?;
            let lhs = pairing(&b, &fields[2])?.abs();
            guarded(
                lhs,
                &[
                    fields[0].sobolev_norm(0.0),
                    fields[1].sobolev_norm(alpha),
                    fields[2].sobolev_norm(alpha),
                ],
            )
        }
        InequalityId::BconA => {
            let b = advection(&fields[0], &fields[1])?;
            let lhs = pairing(&b, &fields[2].fractional_stokes(1.0))?.abs();
            guarded(
                lhs,
                &[
                    fields[0].sobolev_norm(alpha),
                    fields[1].sobolev_norm(1.0),
                    fields[2].sobolev_norm(alpha + 1.0),
                ],
            )
        }
        InequalityId::BconA2 => {
            let b = advection(&fields[0], &fields[1])?;
            let lhs = pairing(&b, &fields[2].fractional_stokes(1.0))?.abs();
            guarded(
                lhs,
                &[
                    fields[0].sobolev_norm(1.0),
                    fields[1].sobolev_norm(alpha),
                    fields[2].sobolev_norm(alpha + 1.0),
                ],
            )
        }
        InequalityId::B1M1 => {
            let b = advection(&fields[0], &fields[1])?;
            guarded(
                b.sobolev_norm(1.0),
                &[fields[0].sobolev_norm(2.0), fields[1].sobolev_norm(2.0)],
            )
        }
        InequalityId::B1M2 => {
            let b = advection(&fields[0], &fields[1])?;
            guarded(
                b.sobolev_norm(2.0),
                &[fields[0].sobolev_norm(3.0), fields[1].sobolev_norm(3.0)],
            )
        }
    };
    Ok(ratio)
}

/// The field tuple that realized the running maximum of a ratio sweep.
/// Reproducible: rebuild the fields from `trial_seed` and `betas` and the
/// same ratio comes back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub trial_index: u32,
    pub trial_seed: u64,
    pub betas: Vec<f64>,
    pub ratio: f64,
}

/// Empirical bound on one inequality constant over a randomized ensemble.
/// A finite maximum over trials is evidence, not proof; this type only
/// reports what was observed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub alpha: f64,
    pub trunc_n: u32,
    pub num_trials: u32,
    pub seed: u64,
    pub max_ratio: f64,
    pub witness: Option<Witness>,
}

impl InequalityReport {
    /// One NDJSON object with the fixed wire key set.
    pub fn wire_line(&self) -> String {
        serde_json::json!({
            "id": self.id.as_str(),
            "alpha": self.alpha,
            "trunc_n": self.trunc_n,
            "trials": self.num_trials,
            "seed": self.seed,
            "max_ratio": self.max_ratio,
            "witness_seed": self.witness.as_ref().map(|w| w.trial_seed),
        })
        .to_string()
    }
}

/// Draw the field tuple of one trial. Spectral profiles `lambda^{-beta}`
/// with `beta` uniform on `{0, 1, 2}` per field span rough through smooth
/// ensembles, so the reported maximum is not an artifact of one smoothness
/// class.
pub fn trial_fields(
    lattice: &Arc<Lattice>,
    seed: u64,
    trial: u32,
    arity: usize,
) -> (u64, Vec<f64>, Vec<SpectralField>) {
    let mut trng = mode_rng(seed, Stream::InequalityTrial, trial as u64, [0; 3]);
    let trial_seed = trng.next_u64();
    let mut betas = Vec::with_capacity(arity);
    let mut fields = Vec::with_capacity(arity);
    for f in 0..arity {
        let beta = trng.random_range(0..3u8) as f64;
        let fseed = mode_rng(trial_seed, Stream::FieldSynthesis, f as u64, [0; 3]).next_u64();
        betas.push(beta);
        fields.push(SpectralField::random(Arc::clone(lattice), fseed, beta));
    }
    (trial_seed, betas, fields)
}

/// Estimate the constant of one inequality by the maximum LHS/RHS ratio over
/// seeded random trials. Trials are independent, keyed by `(seed, trial)`,
/// and run in parallel; the result does not depend on scheduling order.
pub fn estimate_inequality_constant(
    lattice: &Arc<Lattice>,
    id: InequalityId,
    alpha: f64,
    trials: u32,
    seed: u64,
) -> Result<InequalityReport> {
    if trials < 1 {
        return Err(Error::Config("inequality trials must be at least 1".into()));
    }
    if id.requires_alpha_hypothesis() && alpha < 1.25 {
        return Err(Error::Hypothesis(format!(
            "{id} is only claimed for alpha >= 5/4, got alpha = {alpha}"
        )));
    }
    let outcomes: Vec<Option<Witness>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (trial_seed, betas, fields) = trial_fields(lattice, seed, t, id.arity());
            let ratio = inequality_ratio(id, alpha, &fields)
                .expect("trial fields match the inequality arity");
            ratio.map(|ratio| Witness { trial_index: t, trial_seed, betas, ratio })
        })
        .collect();

    // Sequential reduction keeps the result independent of thread timing.
    let mut best: Option<Witness> = None;
    for w in outcomes.into_iter().flatten() {
        let better = match &best {
            None => true,
            Some(b) => w.ratio > b.ratio,
        };
        if better {
            best = Some(w);
        }
    }
    Ok(InequalityReport {
        id,
        alpha,
        trunc_n: lattice.config().trunc_n,
        num_trials: trials,
        seed,
        max_ratio: best.as_ref().map_or(0.0, |w| w.ratio),
        witness: best,
    })
}
