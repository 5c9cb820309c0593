//! Free energy as the location of the generating-function singularity.
//!
//! With a force `f` every 1-pattern contributes `z^l e^f`, and the free
//! energy is `F = -log z*` where the weighted transfer matrix reaches
//! spectral radius one. We write `F = a + g` with the anchor
//! `a = max(f/2, f/W)`, which is a lower bound for `F`, and solve for the
//! gap `g >= 0`. Every weight is then `exp(f - l a - l g) <= 1`, and the gap
//! stays resolvable even when `F` itself is large.
//!
//! The weighted matrix is folded onto boundary states (it factors through
//! them, so the nonzero spectrum is unchanged), and `rho(N) < 1` is decided
//! exactly as "I - N is a nonsingular M-matrix", i.e. Gaussian elimination
//! without pivoting keeps every pivot positive. No eigenvalue iteration is
//! involved, so near-degenerate spectra at large |f| are not a problem.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::PatternSystem;

use super::{build_transfer_matrix, TransferMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyPoint {
    pub f: f64,
    /// Singularity location `z* = exp(-F)`.
    pub z_star: f64,
    pub free_energy: f64,
    /// `max(f/2, f/W)`.
    pub anchor: f64,
    /// `F - anchor`, computed directly.
    pub gap: f64,
    /// Width of the final bisection bracket on `gap`.
    pub tolerance: f64,
}

impl FreeEnergyPoint {
    /// `F - f/2`, without cancellation when `f > 0`.
    pub fn gap_plus(&self, width: usize) -> f64 {
        if self.f >= 0.0 {
            self.gap
        } else {
            self.f / width as f64 - self.f / 2.0 + self.gap
        }
    }

    /// `F - f/W`, without cancellation when `f < 0`.
    pub fn gap_over_width(&self, width: usize) -> f64 {
        if self.f <= 0.0 {
            self.gap
        } else {
            self.f / 2.0 - self.f / width as f64 + self.gap
        }
    }
}

/// Solver over the unrestricted pattern system of one tube.
#[derive(Clone, Debug)]
pub struct FreeEnergySolver {
    width: usize,
    num_states: usize,
    /// `(from state, to state) -> [(block length, multiplicity)]`.
    entries: Vec<((usize, usize), Vec<(u32, f64)>)>,
    pub relative_tolerance: f64,
}

impl FreeEnergySolver {
    pub fn new(system: &PatternSystem) -> Self {
        assert!(!system.full_only, "the free energy needs the unrestricted system");
        Self::from_matrix(&build_transfer_matrix(system))
    }

    pub fn from_matrix(matrix: &TransferMatrix) -> Self {
        let mut grouped: BTreeMap<(usize, usize), BTreeMap<u32, f64>> = BTreeMap::new();
        for &j in &matrix.proper {
            let from = matrix.input[j as usize].unwrap() as usize;
            let to = matrix.output[j as usize].unwrap() as usize;
            *grouped
                .entry((from, to))
                .or_default()
                .entry(matrix.lengths[j as usize])
                .or_insert(0.0) += 1.0;
        }
        FreeEnergySolver {
            width: matrix.width,
            num_states: matrix.num_states,
            entries: grouped
                .into_iter()
                .map(|(k, v)| (k, v.into_iter().collect()))
                .collect(),
            relative_tolerance: 1e-13,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn anchor(&self, f: f64) -> f64 {
        (f / 2.0).max(f / self.width as f64)
    }

    /// Log-weights `f - l (a + g)` plus log-multiplicity.
    fn log_weight(f: f64, anchor: f64, gap: f64, len: u32, mult: f64) -> f64 {
        let l = len as f64;
        mult.ln() + (f - l * anchor) - l * gap
    }

    /// Whether the folded matrix at gap `g` has spectral radius below one.
    pub fn radius_below_one(&self, f: f64, gap: f64) -> bool {
        let n = self.num_states;
        let anchor = self.anchor(f);
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        for &((from, to), ref terms) in &self.entries {
            let mut logs: Vec<f64> = terms
                .iter()
                .map(|&(len, mult)| Self::log_weight(f, anchor, gap, len, mult))
                .collect();
            if from == to {
                // 1 - sum: peel off the largest term through expm1.
                logs.sort_by(|x, y| y.total_cmp(x));
                let mut diag = -logs[0].exp_m1();
                for &lw in &logs[1..] {
                    diag -= lw.exp();
                }
                a[from * n + from] = diag;
            } else {
                a[from * n + to] = -logs.iter().map(|lw| lw.exp()).sum::<f64>();
            }
        }
        // Elimination without pivoting; an M-matrix keeps positive pivots.
        for k in 0..n {
            let pivot = a[k * n + k];
            if pivot.is_nan() || pivot <= 0.0 {
                return false;
            }
            for i in k + 1..n {
                let factor = a[i * n + k] / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
            }
        }
        true
    }

    /// Solves for the free energy at force `f`.
    pub fn solve(&self, f: f64) -> Result<FreeEnergyPoint> {
        let anchor = self.anchor(f);
        if self.radius_below_one(f, 0.0) {
            // F would fall below max(f/2, f/W), which is impossible.
            return Err(Error::BracketFailure { f });
        }
        let mut hi = 1.0;
        while !self.radius_below_one(f, hi) {
            hi *= 2.0;
            if hi > 1e3 {
                return Err(Error::BracketFailure { f });
            }
        }
        // lo always has radius >= 1, so anchor + lo is a lower bound for F.
        let mut lo = 0.0f64;
        while hi - lo > self.relative_tolerance * hi && hi > f64::MIN_POSITIVE {
            let mid = if lo == 0.0 { 0.5 * hi } else { 0.5 * (lo + hi) };
            if self.radius_below_one(f, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let free_energy = anchor + lo;
        Ok(FreeEnergyPoint {
            f,
            z_star: (-free_energy).exp(),
            free_energy,
            anchor,
            gap: lo,
            tolerance: hi - lo,
        })
    }
}

/// Free energy of the tube at force `f`.
pub fn free_energy(system: &PatternSystem, f: f64) -> Result<FreeEnergyPoint> {
    FreeEnergySolver::new(system).solve(f)
}
