//! Cross-checks between the transfer-matrix results and the oracle.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::TubeSpec;
use crate::oracle::{partition_function, EnumerationTable};
use crate::transfer::{growth_rates, FreeEnergyPoint, FreeEnergySolver, GrowthRates};

/// Whether the Hamiltonian component carries the largest growth rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub spec: TubeSpec,
    pub kappa_h: f64,
    pub next_largest: Option<f64>,
    pub dominant_component_is_hamiltonian: bool,
    /// `kappa_h - next_largest`; absent when there is no other cyclic component.
    pub margin: Option<f64>,
    pub hamiltonian_size: usize,
    pub hamiltonian_period: u32,
    /// Size and period of the component realizing `next_largest`.
    pub runner_up: Option<(usize, u32)>,
}

impl ConjectureReport {
    pub fn from_rates(rates: &GrowthRates) -> Self {
        let ham = rates.hamiltonian();
        let margin = rates.next_largest.map(|next| rates.kappa_h - next);
        ConjectureReport {
            spec: rates.spec,
            kappa_h: rates.kappa_h,
            next_largest: rates.next_largest,
            dominant_component_is_hamiltonian: margin.is_none_or(|m| m > 0.0),
            margin,
            hamiltonian_size: ham.size,
            hamiltonian_period: ham.period,
            runner_up: rates.runner_up().map(|c| (c.size, c.period)),
        }
    }
}

pub fn verify_conjecture(spec: TubeSpec) -> Result<ConjectureReport> {
    Ok(ConjectureReport::from_rates(&growth_rates(spec)?))
}

/// `lower <= Z_n(f) <= upper` with
/// `lower = max(e^{f (n-2)/2}, p_n(s_min) e^{f s_min})` and
/// `upper = max(e^{f s_min}, e^{f (n-2)/2}) p_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionBounds {
    pub n: usize,
    pub f: f64,
    pub lower: f64,
    pub z: f64,
    pub upper: f64,
}

impl PartitionBounds {
    pub fn holds(&self) -> bool {
        let slack = 1e-12 * self.z;
        self.lower <= self.z + slack && self.z <= self.upper + slack
    }
}

/// Bounds on `Z_n(f)` from the span window; `None` when there are no
/// `n`-edge polygons.
pub fn partition_bounds(table: &EnumerationTable, n: usize, f: f64) -> Option<PartitionBounds> {
    let s_min = table.min_span(n)?;
    let s_max = (n - 2) as f64 / 2.0;
    let p_n = table.total(n) as f64;
    let p_min = table.count(n, s_min) as f64;
    let s_min = s_min as f64;
    Some(PartitionBounds {
        n,
        f,
        lower: (f * s_max).exp().max(p_min * (f * s_min).exp()),
        z: partition_function(table, n, f),
        upper: (f * s_min).exp().max((f * s_max).exp()) * p_n,
    })
}

/// Every bound check for `n <= table.n_max` and the given forces.
pub fn check_partition_bounds(table: &EnumerationTable, forces: &[f64]) -> Vec<PartitionBounds> {
    (4..=table.n_max)
        .flat_map(|n| forces.iter().filter_map(move |&f| partition_bounds(table, n, f)))
        .collect()
}

/// `max(f/2, f/W + kappa_H) <= F(f) <= max(f/W, f/2) + F(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyBounds {
    pub f: f64,
    pub free_energy: f64,
    pub lower: f64,
    pub upper: f64,
}

impl FreeEnergyBounds {
    pub fn new(point: &FreeEnergyPoint, width: usize, kappa_h: f64, f0: f64) -> Self {
        let f = point.f;
        let w = width as f64;
        FreeEnergyBounds {
            f,
            free_energy: point.free_energy,
            lower: (f / 2.0).max(f / w + kappa_h),
            upper: (f / w).max(f / 2.0) + f0,
        }
    }

    /// Sandwich check with an absolute slack for the solver tolerance.
    pub fn holds(&self, slack: f64) -> bool {
        self.lower <= self.free_energy + slack && self.free_energy <= self.upper + slack
    }
}

/// Free energy on a grid with the bound and convexity checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyReport {
    pub spec: TubeSpec,
    pub kappa_h: f64,
    pub points: Vec<FreeEnergyPoint>,
    pub bounds: Vec<FreeEnergyBounds>,
    /// Middle forces of consecutive triples where convexity fails by more
    /// than the tolerance.
    pub convexity_violations: Vec<f64>,
}

impl FreeEnergyReport {
    pub fn bounds_hold(&self, slack: f64) -> bool {
        self.bounds.iter().all(|b| b.holds(slack))
    }
}

/// Middle points of consecutive triples `f1 < f2 < f3` where `F(f2)`
/// exceeds the chord through `F(f1)` and `F(f3)` by more than `tolerance`.
pub fn convexity_violations(points: &[FreeEnergyPoint], tolerance: f64) -> Vec<f64> {
    points
        .windows(3)
        .filter(|w| {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            let t = (b.f - a.f) / (c.f - a.f);
            let chord = (1.0 - t) * a.free_energy + t * c.free_energy;
            b.free_energy > chord + tolerance
        })
        .map(|w| w[1].f)
        .collect()
}

/// Solves on `grid` (sorted ascending) and checks the linear sandwich and convexity.
pub fn check_free_energy_bounds_and_convexity(
    solver: &FreeEnergySolver,
    spec: TubeSpec,
    kappa_h: f64,
    grid: &[f64],
    convexity_tolerance: f64,
) -> Result<FreeEnergyReport> {
    let f0 = solver.solve(0.0)?.free_energy;
    let points = grid.iter().map(|&f| solver.solve(f)).collect::<Result<Vec<_>>>()?;
    let bounds = points
        .iter()
        .map(|p| FreeEnergyBounds::new(p, solver.width(), kappa_h, f0))
        .collect();
    Ok(FreeEnergyReport {
        spec,
        kappa_h,
        convexity_violations: convexity_violations(&points, convexity_tolerance),
        points,
        bounds,
    })
}

/// `log(Z_{n+2}(f) / Z_n(f)) / 2` at the largest `n` with both terms
/// enumerated and nonzero.
pub fn ratio_estimate(table: &EnumerationTable, f: f64) -> Option<(usize, f64)> {
    (4..=table.n_max.saturating_sub(2))
        .rev()
        .find(|&n| table.total(n) > 0 && table.total(n + 2) > 0)
        .map(|n| {
            let ratio = partition_function(table, n + 2, f) / partition_function(table, n, f);
            (n, ratio.ln() / 2.0)
        })
}

/// `(1/n) log p^H_n` with `n = (s+1) W`, at the largest span with a nonzero
/// count.
pub fn hamiltonian_slope(counts: &[BigUint], width: usize) -> Option<(usize, f64)> {
    counts
        .iter()
        .enumerate()
        .rev()
        .find(|(_, c)| c.bits() > 0)
        .map(|(s, c)| {
            let n = (s + 1) * width;
            (n, log_biguint(c) / n as f64)
        })
}

fn log_biguint(c: &BigUint) -> f64 {
    let bits = c.bits();
    if bits < 1000 {
        c.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (c >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteReport {
    pub spec: TubeSpec,
    pub kappa_h: f64,
    /// Positive forces in the order given, with `F - f/2`.
    pub gap_plus: Vec<(f64, f64)>,
    /// Negative forces in the order given, with `F - f/W - kappa_H`.
    pub gap_minus: Vec<(f64, f64)>,
}

impl AsymptoteReport {
    pub fn plus_strictly_decreasing(&self) -> bool {
        strictly_decreasing(&self.gap_plus)
    }

    pub fn minus_strictly_decreasing(&self) -> bool {
        strictly_decreasing(&self.gap_minus)
    }

    pub fn gaps_positive(&self) -> bool {
        self.gap_plus.iter().chain(&self.gap_minus).all(|&(_, g)| g > 0.0)
    }
}

fn strictly_decreasing(gaps: &[(f64, f64)]) -> bool {
    gaps.windows(2).all(|w| w[1].1 < w[0].1)
}

/// Distances to the two linear asymptotes. `plus` should increase and
/// `minus` decrease for the gaps to be expected to shrink.
pub fn asymptote_report(
    solver: &FreeEnergySolver,
    spec: TubeSpec,
    kappa_h: f64,
    plus: &[f64],
    minus: &[f64],
) -> Result<AsymptoteReport> {
    let w = solver.width();
    let gap_plus = plus
        .iter()
        .map(|&f| Ok((f, solver.solve(f)?.gap_plus(w))))
        .collect::<Result<_>>()?;
    let gap_minus = minus
        .iter()
        .map(|&f| Ok((f, solver.solve(f)?.gap_over_width(w) - kappa_h)))
        .collect::<Result<_>>()?;
    Ok(AsymptoteReport {
        spec,
        kappa_h,
        gap_plus,
        gap_minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_polygons;
    use crate::patterns::PatternSystem;

    fn tube(l: u32, m: u32) -> TubeSpec {
        TubeSpec::new(l, m).unwrap()
    }

    #[test]
    fn smallest_tube_bounds_are_tight() {
        let table = enumerate_polygons(tube(1, 0), 12).unwrap();
        for b in check_partition_bounds(&table, &[-3.0, 0.0, 2.5]) {
            assert!(b.holds(), "{b:?}");
            assert!((b.lower - b.z).abs() <= 1e-12 * b.z);
        }
        let r = verify_conjecture(tube(1, 0)).unwrap();
        assert!(r.dominant_component_is_hamiltonian);
        assert_eq!(r.margin, None);
    }

    #[test]
    fn zero_force_bounds_reduce_to_counts() {
        let table = enumerate_polygons(tube(1, 1), 12).unwrap();
        for n in (4..=12).step_by(2) {
            let b = partition_bounds(&table, n, 0.0).unwrap();
            assert_eq!(b.z, table.total(n) as f64);
            assert_eq!(b.upper, b.z);
        }
    }

    #[test]
    fn convexity_detects_a_bump() {
        let point = |f: f64, free_energy: f64| FreeEnergyPoint {
            f,
            z_star: (-free_energy).exp(),
            free_energy,
            anchor: 0.0,
            gap: 0.0,
            tolerance: 0.0,
        };
        let pts = [point(0.0, 0.0), point(1.0, 1.0), point(2.0, 1.0)];
        assert_eq!(convexity_violations(&pts, 1e-9), vec![1.0]);
        let pts = [point(0.0, 0.0), point(1.0, 0.2), point(2.0, 1.0)];
        assert!(convexity_violations(&pts, 1e-9).is_empty());
    }

    #[test]
    fn smallest_tube_sits_on_the_stretched_asymptote() {
        let spec = tube(1, 0);
        let solver = FreeEnergySolver::new(&PatternSystem::build(spec, false).unwrap());
        let r = asymptote_report(&solver, spec, 0.0, &[5.0, 10.0], &[]).unwrap();
        assert!(r.gap_plus.iter().all(|&(_, g)| g == 0.0));
    }

    #[test]
    fn big_log() {
        let c = BigUint::from(3u32).pow(2000);
        assert!((log_biguint(&c) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
