//! Mutual-information maximization by Blahut–Arimoto, and the symmetry
//! invariance checks on the maximizer.
//!
//! Optimization runs in double precision; the exact transition matrix is
//! rounded once at this boundary. Because the transition matrices here are
//! full-rank, the mutual information is strictly concave in the input
//! distribution and the maximizer is unique, so converged runs agree
//! regardless of initialization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitstring::BitString;
use crate::channel::TransitionMatrix;
use crate::error::{Error, Result};
use crate::rational::{rational_to_f64, Rational};
use crate::symmetry::orbit;

/// Probabilities are floored here before any logarithm.
const LOG_FLOOR: f64 = 1e-300;

pub const DEFAULT_BA_TOL: f64 = 1e-10;
pub const DEFAULT_BA_MAX_ITER: usize = 100_000;

/// A distribution over `{0,1}^n` in lexicographic order; entries are
/// nonnegative and kept normalized to within 1e-12.
#[derive(Debug, Clone, Serialize)]
pub struct InputDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl InputDistribution {
    pub fn uniform(n: usize) -> Self {
        let size = 1usize << n;
        InputDistribution {
            n,
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn from_probs(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "expected 2^{n} probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidInput("total mass must be positive".into()));
        }
        let mut dist = InputDistribution { n, probs };
        dist.renormalize();
        Ok(dist)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: &BitString) -> f64 {
        self.probs[x.raw_bits() as usize]
    }

    fn renormalize(&mut self) {
        let total: f64 = self.probs.iter().sum();
        for p in &mut self.probs {
            *p /= total;
        }
    }
}

/// Seeded random interior point (normalized exponential draws), for the
/// uniqueness test; the uniform start is already G̃-invariant so it cannot
/// witness initialization independence.
pub fn random_distribution(n: usize, seed: u64) -> InputDistribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs: Vec<f64> = (0..1usize << n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    InputDistribution::from_probs(n, probs).expect("positive draws")
}

/// Result of one Blahut–Arimoto run.
#[derive(Debug, Clone, Serialize)]
pub struct MiResult {
    /// I(X;Y)/n in bits per symbol.
    pub mi_per_symbol: f64,
    pub distribution: InputDistribution,
    pub iterations: usize,
    pub converged: bool,
    /// max over g ∈ G̃ and x of |P(x) − P(gx)| for the final distribution.
    pub invariance_gap: f64,
}

fn f64_matrix(m: &TransitionMatrix) -> (usize, usize, Vec<f64>) {
    (m.num_rows(), m.num_cols(), m.to_f64_rows())
}

/// I(X;Y) in bits: H(M·dist) − Σ_x dist(x)·H(row_x).
pub fn mutual_information(dist: &InputDistribution, m: &TransitionMatrix) -> Result<f64> {
    if dist.n() != m.n() {
        return Err(Error::DimensionMismatch(format!(
            "distribution over {{0,1}}^{} against a blocklength-{} matrix",
            dist.n(),
            m.n()
        )));
    }
    let (rows, cols, w) = f64_matrix(m);
    let p = dist.probs();
    let mut q = vec![0f64; cols];
    for r in 0..rows {
        let pr = p[r];
        if pr == 0.0 {
            continue;
        }
        for c in 0..cols {
            q[c] += pr * w[r * cols + c];
        }
    }
    let hy: f64 = q
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.max(LOG_FLOOR).log2())
        .sum();
    let hyx: f64 = (0..rows)
        .map(|r| {
            let row = &w[r * cols..(r + 1) * cols];
            let h: f64 = row
                .iter()
                .filter(|&&v| v > 0.0)
                .map(|&v| -v * v.max(LOG_FLOOR).log2())
                .sum();
            p[r] * h
        })
        .sum();
    Ok(hy - hyx)
}

/// Blahut–Arimoto from the uniform start.
pub fn blahut_arimoto(m: &TransitionMatrix, tol: f64, max_iter: usize) -> Result<MiResult> {
    blahut_arimoto_with_init(m, tol, max_iter, &InputDistribution::uniform(m.n()))
}

/// Blahut–Arimoto from a given start. Convergence is declared when the
/// standard capacity sandwich `max_x D(W_x‖q) − Σ_x p_x D(W_x‖q)` drops
/// below `tol` (in bits); non-convergence within `max_iter` returns the
/// best iterate with `converged = false`.
pub fn blahut_arimoto_with_init(
    m: &TransitionMatrix,
    tol: f64,
    max_iter: usize,
    init: &InputDistribution,
) -> Result<MiResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter < 1 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    if init.n() != m.n() {
        return Err(Error::DimensionMismatch(format!(
            "init over {{0,1}}^{} against a blocklength-{} matrix",
            init.n(),
            m.n()
        )));
    }
    let (rows, cols, w) = f64_matrix(m);
    for r in 0..rows {
        let s: f64 = w[r * cols..(r + 1) * cols].iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "matrix row {r} sums to {s}, not stochastic"
            )));
        }
    }
    // Σ_y W_xy ln W_xy is constant per row.
    let row_wlogw: Vec<f64> = (0..rows)
        .map(|r| {
            w[r * cols..(r + 1) * cols]
                .iter()
                .filter(|&&v| v > 0.0)
                .map(|&v| v * v.ln())
                .sum()
        })
        .collect();

    let mut p = init.probs().to_vec();
    let mut q = vec![0f64; cols];
    let mut d = vec![0f64; rows];
    let mut iterations = 0;
    let mut converged = false;
    let mut mi_nats = 0f64;
    let mut prev_mi = f64::NEG_INFINITY;

    while iterations < max_iter {
        iterations += 1;
        q.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..rows {
            let pr = p[r];
            if pr == 0.0 {
                continue;
            }
            let row = &w[r * cols..(r + 1) * cols];
            for (qc, &wc) in q.iter_mut().zip(row) {
                *qc += pr * wc;
            }
        }
        let lq: Vec<f64> = q.iter().map(|&v| v.max(LOG_FLOOR).ln()).collect();
        for r in 0..rows {
            let row = &w[r * cols..(r + 1) * cols];
            let cross: f64 = row
                .iter()
                .zip(&lq)
                .filter(|(&wc, _)| wc > 0.0)
                .map(|(&wc, &l)| wc * l)
                .sum();
            d[r] = row_wlogw[r] - cross;
        }
        mi_nats = (0..rows).map(|r| p[r] * d[r]).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // The objective is non-decreasing along BA iterates.
        debug_assert!(
            mi_nats >= prev_mi - 1e-9,
            "objective decreased: {prev_mi} -> {mi_nats}"
        );
        prev_mi = mi_nats;
        if (upper - mi_nats) / std::f64::consts::LN_2 < tol {
            converged = true;
            break;
        }
        // p_x ← p_x exp(D_x), normalized; zero entries stay zero.
        let dmax = upper;
        let mut total = 0f64;
        for r in 0..rows {
            if p[r] > 0.0 {
                p[r] *= (d[r] - dmax).exp();
                total += p[r];
            }
        }
        for v in &mut p {
            *v /= total;
        }
    }

    let distribution = InputDistribution { n: m.n(), probs: p };
    let gap = invariance_gap(&distribution);
    Ok(MiResult {
        mi_per_symbol: mi_nats / std::f64::consts::LN_2 / m.n() as f64,
        distribution,
        iterations,
        converged,
        invariance_gap: gap,
    })
}

/// Replaces each probability by the mean over its G̃ orbit. Idempotent,
/// mass-preserving, and never decreases I(X;Y) for a G̃-symmetric channel.
pub fn orbit_symmetrize(dist: &InputDistribution) -> InputDistribution {
    let n = dist.n();
    let mut probs = vec![0f64; dist.probs().len()];
    for x in BitString::all_strings(n) {
        let orb = orbit(&x);
        let mean: f64 = orb
            .members()
            .iter()
            .map(|y| dist.probs()[y.raw_bits() as usize])
            .sum::<f64>()
            / orb.len() as f64;
        probs[x.raw_bits() as usize] = mean;
    }
    InputDistribution { n, probs }
}

/// max over g ∈ G̃ and x of |P(x) − P(gx)|; zero iff G̃-invariant.
pub fn invariance_gap(dist: &InputDistribution) -> f64 {
    let n = dist.n();
    let p = dist.probs();
    let mut gap = 0f64;
    for x in BitString::all_strings(n) {
        let px = p[x.raw_bits() as usize];
        for gx in [x.flipped(), x.reversed(), x.reversed().flipped()] {
            gap = gap.max((px - p[gx.raw_bits() as usize]).abs());
        }
    }
    gap
}

/// 1 + p·log2(p) + (1−p)·log2(1−p): the BSC capacity, achieved by the
/// uniform input distribution.
pub fn bsc_capacity_closed_form(p: &Rational) -> f64 {
    let pf = rational_to_f64(p);
    assert!(pf > 0.0 && pf < 1.0, "p must lie in (0,1)");
    1.0 + pf * pf.log2() + (1.0 - pf) * (1.0 - pf).log2()
}
