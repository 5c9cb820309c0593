//! Subcommand implementations. Each returns the text for stdout and the
//! record describing the run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use num_bigint::BigUint;
use tubepoly::analysis::{
    asymptote_report, check_free_energy_bounds_and_convexity, check_partition_bounds,
    ConjectureReport, FreeEnergyBounds,
};
use tubepoly::oracle::{enumerate_polygons, full_block_census, hamiltonian_census};
use tubepoly::transfer::{
    build_transfer_matrix, component_rates, full_pattern_counts, hamiltonian_counts,
    polygon_counts, FreeEnergySolver, GrowthRates, SpectralOptions,
};
use tubepoly::{Error, PatternSystem, StateSpace, TubeSpec};

use crate::cache;
use crate::record::{
    Assertion, ComponentRecord, CountTable, FreeEnergyRow, GrowthPayload, Measured, Metadata,
    Payload, ResultRecord,
};

pub struct Output {
    pub stdout: String,
    pub record: ResultRecord,
}

/// Options shared by every subcommand.
pub struct Context<'a> {
    pub spec: TubeSpec,
    pub cache_dir: Option<&'a Path>,
    pub timestamp: Option<u64>,
}

impl Context<'_> {
    fn metadata(&self, command: &str, tolerances: &[(&str, f64)]) -> Metadata {
        Metadata {
            tube: self.spec.to_string(),
            command: command.to_string(),
            tolerances: tolerances.iter().map(|&(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
            timestamp: self.timestamp,
        }
    }

    fn system(&self, full_only: bool, space: StateSpace) -> Result<PatternSystem> {
        cache::load_or_build(self.cache_dir, self.spec, full_only, space)
    }

    fn growth(&self, space: StateSpace, tolerance: f64) -> Result<GrowthRates> {
        let system = self.system(true, space)?;
        let options = SpectralOptions {
            tolerance,
            ..SpectralOptions::default()
        };
        Ok(component_rates(&system, options)?)
    }

    fn solver(&self, tolerance: f64) -> Result<FreeEnergySolver> {
        let mut solver = FreeEnergySolver::new(&self.system(false, StateSpace::Realizable)?);
        solver.relative_tolerance = tolerance;
        Ok(solver)
    }
}

pub fn state_space_name(space: StateSpace) -> &'static str {
    match space {
        StateSpace::Realizable => "realizable",
        StateSpace::AllMatchings => "all-matchings",
    }
}

/// Error bounds for `lambda` and `log(lambda) / W` from the final
/// Collatz-Wielandt bracket, whose relative width is `residual`.
fn rate_bounds(lambda: f64, residual: f64, width: usize) -> (Measured, Measured) {
    let lambda_tol = 0.5 * residual * (lambda + 1.0);
    let rate_tol = if lambda > 0.0 {
        lambda_tol / (lambda * width as f64)
    } else {
        f64::INFINITY
    };
    (
        Measured::new(lambda, lambda_tol),
        Measured::new(lambda.ln() / width as f64, rate_tol),
    )
}

fn growth_payload(rates: &GrowthRates, space: StateSpace) -> GrowthPayload {
    let w = rates.spec.width();
    let components: Vec<ComponentRecord> = rates
        .components
        .iter()
        .map(|c| {
            let (lambda, rate) = rate_bounds(c.lambda, c.residual, w);
            ComponentRecord {
                id: c.id,
                size: c.size,
                period: c.period,
                hamiltonian: c.hamiltonian,
                lambda,
                rate,
            }
        })
        .collect();
    let kappa_h = components.iter().find(|c| c.hamiltonian).unwrap().rate;
    let next_largest = rates.runner_up().map(|r| {
        components
            .iter()
            .find(|c| c.id == r.id)
            .unwrap()
            .rate
    });
    GrowthPayload {
        state_space: state_space_name(space).to_string(),
        pattern_count: rates.pattern_count,
        kappa_h,
        next_largest,
        components,
    }
}

pub fn growth(ctx: &Context, space: StateSpace, tolerance: f64) -> Result<Output> {
    let rates = ctx.growth(space, tolerance)?;
    let payload = growth_payload(&rates, space);
    let mut out = String::new();
    writeln!(out, "tube {}  W = {}  patterns = {}", ctx.spec, ctx.spec.width(), payload.pattern_count)?;
    writeln!(out, "kappa_H = {:.9} +/- {:.1e}", payload.kappa_h.value, payload.kappa_h.tolerance)?;
    match payload.next_largest {
        Some(next) => writeln!(out, "next    = {:.9} +/- {:.1e}", next.value, next.tolerance)?,
        None => writeln!(out, "next    = none (no other cyclic component)")?,
    }
    writeln!(out, "components: {}", payload.components.len())?;
    writeln!(out, "{:>6} {:>9} {:>7} {:>16} {:>13}", "id", "size", "period", "lambda", "rate")?;
    for c in &payload.components {
        writeln!(
            out,
            "{:>6} {:>9} {:>7} {:>16.10} {:>13.9}{}",
            c.id,
            c.size,
            c.period,
            c.lambda.value,
            c.rate.value,
            if c.hamiltonian { "  H" } else { "" }
        )?;
    }
    let meta = ctx.metadata("growth", &[("spectral_relative", tolerance)]);
    Ok(Output {
        stdout: out,
        record: ResultRecord::new(meta, Payload::Growth(payload)),
    })
}

/// `f_min, f_min + step, ...` up to `f_max`, without accumulated drift.
pub fn force_grid(f_min: f64, f_max: f64, step: f64) -> Vec<f64> {
    let n = ((f_max - f_min) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| f_min + i as f64 * step).collect()
}

pub fn free_energy(ctx: &Context, grid: &[f64], tolerance: f64) -> Result<Output> {
    let rates = ctx.growth(StateSpace::Realizable, SpectralOptions::default().tolerance)?;
    let kappa_tol = growth_payload(&rates, StateSpace::Realizable).kappa_h.tolerance;
    let solver = ctx.solver(tolerance)?;
    let f0 = solver.solve(0.0)?;
    let mut csv = String::from("f,F,lower,upper\n");
    let mut rows = Vec::with_capacity(grid.len());
    for &f in grid {
        let point = solver.solve(f)?;
        let b = FreeEnergyBounds::new(&point, solver.width(), rates.kappa_h, f0.free_energy);
        writeln!(csv, "{},{},{},{}", f, b.free_energy, b.lower, b.upper)?;
        rows.push(FreeEnergyRow {
            f,
            free_energy: Measured::new(b.free_energy, point.tolerance),
            lower: Measured::new(b.lower, if b.lower == f / 2.0 { 0.0 } else { kappa_tol }),
            upper: Measured::new(b.upper, f0.tolerance),
        });
    }
    let meta = ctx.metadata("free-energy", &[("gap_relative", tolerance)]);
    Ok(Output {
        stdout: csv,
        record: ResultRecord::new(meta, Payload::FreeEnergy { rows }),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    All,
    Hamiltonian,
    FullBlocks,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::All => "all",
            Class::Hamiltonian => "hamiltonian",
            Class::FullBlocks => "full-blocks",
        }
    }
}

/// Largest number of explicit walks the full-block census may hold.
pub const BLOCK_CENSUS_CAP: u64 = 20_000_000;

pub fn count_table(ctx: &Context, class: Class, limit: usize) -> Result<CountTable> {
    let (columns, rows): (&[&str], Vec<Vec<String>>) = match class {
        Class::All => {
            let system = ctx.system(false, StateSpace::Realizable)?;
            let counts = polygon_counts(&build_transfer_matrix(&system), limit);
            let rows = counts
                .iter()
                .enumerate()
                .flat_map(|(n, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, c)| c.bits() > 0)
                        .map(move |(s, c)| vec![n.to_string(), s.to_string(), c.to_string()])
                })
                .collect();
            (&["n", "s", "count"], rows)
        }
        Class::Hamiltonian => {
            let system = ctx.system(true, StateSpace::Realizable)?;
            let w = ctx.spec.width();
            let counts = hamiltonian_counts(&build_transfer_matrix(&system), limit);
            let rows = counts
                .iter()
                .enumerate()
                .map(|(s, c)| vec![s.to_string(), ((s + 1) * w).to_string(), c.to_string()])
                .collect();
            (&["s", "n", "count"], rows)
        }
        Class::FullBlocks => {
            let system = ctx.system(true, StateSpace::Realizable)?;
            let patterns = full_pattern_counts(&build_transfer_matrix(&system), limit);
            let walks: BigUint = patterns.iter().sum();
            if walks > BigUint::from(BLOCK_CENSUS_CAP) {
                return Err(Error::ResourceCap { cap: BLOCK_CENSUS_CAP }.into());
            }
            let blocks = full_block_census(ctx.spec, limit)?;
            let rows = patterns
                .iter()
                .zip(&blocks)
                .enumerate()
                .map(|(r, (t, b))| vec![(r + 1).to_string(), t.to_string(), b.to_string()])
                .collect();
            (&["r", "patterns", "blocks"], rows)
        }
    };
    Ok(CountTable {
        class: class.name().to_string(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

pub fn table_to_csv(table: &CountTable) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn enumerate(ctx: &Context, class: Class, limit: usize, json: bool) -> Result<Output> {
    let table = count_table(ctx, class, limit)?;
    let meta = ctx.metadata("enumerate", &[("count", 0.0)]);
    let record = ResultRecord::new(meta, Payload::Counts(table.clone()));
    let stdout = if json { record.to_json() } else { table_to_csv(&table) };
    Ok(Output { stdout, record })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Bounds,
    Asymptotes,
    Conjecture,
    OracleXcheck,
    All,
}

pub struct VerifyLimits {
    pub n_max: usize,
    pub s_max: usize,
    pub r_max: usize,
}

const BOUNDS_SLACK: f64 = 1e-9;
const CONVEXITY_TOLERANCE: f64 = 1e-9;

fn assertion(suite: &str, name: &str, passed: bool, detail: String, value: Option<Measured>) -> Assertion {
    Assertion {
        suite: suite.to_string(),
        name: name.to_string(),
        passed,
        detail,
        value,
    }
}

fn verify_conjecture(ctx: &Context, out: &mut Vec<Assertion>) -> Result<()> {
    let rates = ctx.growth(StateSpace::Realizable, SpectralOptions::default().tolerance)?;
    let payload = growth_payload(&rates, StateSpace::Realizable);
    let report = ConjectureReport::from_rates(&rates);
    out.push(assertion(
        "conjecture",
        "single-hamiltonian-component",
        true,
        format!(
            "size {} period {}",
            report.hamiltonian_size, report.hamiltonian_period
        ),
        Some(payload.kappa_h),
    ));
    let margin = payload
        .next_largest
        .map(|n| Measured::new(payload.kappa_h.value - n.value, payload.kappa_h.tolerance + n.tolerance));
    let detail = match (report.next_largest, margin) {
        (Some(next), Some(m)) => format!(
            "kappa_H {:.6} next {:.6} margin {:.6}",
            report.kappa_h, next, m.value
        ),
        _ => format!("kappa_H {:.6}, no other cyclic component", report.kappa_h),
    };
    out.push(assertion(
        "conjecture",
        "dominant-component-is-hamiltonian",
        report.dominant_component_is_hamiltonian,
        detail,
        margin,
    ));
    Ok(())
}

fn verify_bounds(ctx: &Context, limits: &VerifyLimits, out: &mut Vec<Assertion>) -> Result<()> {
    let grid = force_grid(-10.0, 10.0, 0.5);
    let table = enumerate_polygons(ctx.spec, limits.n_max)?;
    let checks = check_partition_bounds(&table, &grid);
    let failed = checks.iter().filter(|b| !b.holds()).count();
    out.push(assertion(
        "bounds",
        "partition-function-bounds",
        failed == 0,
        format!("{} of {} (n, f) pairs with n <= {} fail", failed, checks.len(), limits.n_max),
        None,
    ));
    let rates = ctx.growth(StateSpace::Realizable, SpectralOptions::default().tolerance)?;
    let solver = ctx.solver(1e-13)?;
    let report = check_free_energy_bounds_and_convexity(
        &solver,
        ctx.spec,
        rates.kappa_h,
        &grid,
        CONVEXITY_TOLERANCE,
    )?;
    let failed = report.bounds.iter().filter(|b| !b.holds(BOUNDS_SLACK)).count();
    out.push(assertion(
        "bounds",
        "free-energy-sandwich",
        failed == 0,
        format!("{} of {} forces in [-10, 10] fail", failed, report.bounds.len()),
        None,
    ));
    out.push(assertion(
        "bounds",
        "free-energy-convexity",
        report.convexity_violations.is_empty(),
        format!("violations at {:?}", report.convexity_violations),
        Some(Measured::exact(CONVEXITY_TOLERANCE)),
    ));
    Ok(())
}

fn verify_asymptotes(ctx: &Context, out: &mut Vec<Assertion>) -> Result<()> {
    let rates = ctx.growth(StateSpace::Realizable, SpectralOptions::default().tolerance)?;
    let solver = ctx.solver(1e-13)?;
    let plus = [5.0, 10.0, 20.0, 40.0];
    let minus = [-5.0, -10.0, -20.0, -40.0];
    let report = asymptote_report(&solver, ctx.spec, rates.kappa_h, &plus, &minus)?;
    // On the 1x0 tube every polygon is a stretched rectangle: both gaps vanish.
    let flat = ctx.spec.width() == 2;
    let judge = |gaps: &[(f64, f64)], decreasing: bool| {
        if flat {
            gaps.iter().all(|&(_, g)| g.abs() <= 1e-12)
        } else {
            decreasing && gaps.iter().all(|&(_, g)| g > 0.0)
        }
    };
    let show = |gaps: &[(f64, f64)]| {
        gaps.iter()
            .map(|(f, g)| format!("{f}: {g:.3e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    out.push(assertion(
        "asymptotes",
        "stretched-gap-shrinks",
        judge(&report.gap_plus, report.plus_strictly_decreasing()),
        show(&report.gap_plus),
        Some(Measured::new(report.gap_plus.last().unwrap().1, solver.relative_tolerance)),
    ));
    out.push(assertion(
        "asymptotes",
        "compressed-gap-shrinks",
        judge(&report.gap_minus, report.minus_strictly_decreasing()),
        show(&report.gap_minus),
        None,
    ));
    Ok(())
}

fn double_factorial(n: usize) -> u64 {
    (1..=n).rev().step_by(2).map(|k| k as u64).product()
}

fn verify_oracle(ctx: &Context, limits: &VerifyLimits, out: &mut Vec<Assertion>) -> Result<()> {
    let general = build_transfer_matrix(&ctx.system(false, StateSpace::Realizable)?);
    let series = polygon_counts(&general, limits.n_max);
    let table = enumerate_polygons(ctx.spec, limits.n_max)?;
    let mismatches = (0..=limits.n_max)
        .flat_map(|n| (0..=table.s_max()).map(move |s| (n, s)))
        .filter(|&(n, s)| {
            let t = series[n].get(s).cloned().unwrap_or_default();
            t != BigUint::from(table.count(n, s))
        })
        .count();
    out.push(assertion(
        "oracle-xcheck",
        "polygon-counts",
        mismatches == 0,
        format!("{mismatches} mismatched (n, s) cells for n <= {}", limits.n_max),
        None,
    ));

    let full = build_transfer_matrix(&ctx.system(true, StateSpace::Realizable)?);
    let series = hamiltonian_counts(&full, limits.s_max);
    let census = hamiltonian_census(ctx.spec, limits.s_max)?;
    let same = series.len() == census.len()
        && series.iter().zip(&census).all(|(a, &b)| *a == BigUint::from(b));
    out.push(assertion(
        "oracle-xcheck",
        "hamiltonian-counts",
        same,
        format!("spans 0..={}: transfer {:?} oracle {:?}", limits.s_max, strings(&series), census),
        None,
    ));

    let patterns = full_pattern_counts(&full, limits.r_max);
    let walks: BigUint = patterns.iter().sum();
    if walks > BigUint::from(BLOCK_CENSUS_CAP) {
        return Err(Error::ResourceCap { cap: BLOCK_CENSUS_CAP }.into());
    }
    let blocks = full_block_census(ctx.spec, limits.r_max)?;
    let w = ctx.spec.width();
    let factor = BigUint::from(double_factorial(w - 1));
    let sandwich = patterns.iter().zip(&blocks).all(|(t, &b)| {
        let b = BigUint::from(b);
        &b <= t && *t <= &factor * &b
    });
    out.push(assertion(
        "oracle-xcheck",
        "full-block-sandwich",
        sandwich,
        format!("r <= {}: patterns {:?} blocks {:?}", limits.r_max, strings(&patterns), blocks),
        None,
    ));
    Ok(())
}

fn strings(v: &[BigUint]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

pub fn verify(ctx: &Context, suite: Suite, limits: &VerifyLimits) -> Result<(Output, bool)> {
    let mut assertions = Vec::new();
    let run = |s: Suite| suite == s || suite == Suite::All;
    if run(Suite::Conjecture) {
        verify_conjecture(ctx, &mut assertions)?;
    }
    if run(Suite::Bounds) {
        verify_bounds(ctx, limits, &mut assertions)?;
    }
    if run(Suite::Asymptotes) {
        verify_asymptotes(ctx, &mut assertions)?;
    }
    if run(Suite::OracleXcheck) {
        verify_oracle(ctx, limits, &mut assertions)?;
    }
    let passed = assertions.iter().all(|a| a.passed);
    let mut out = String::new();
    for a in &assertions {
        let tag = if a.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{tag} {}/{}: {}", a.suite, a.name, a.detail)?;
    }
    writeln!(out, "{}", if passed { "all assertions passed" } else { "verification failed" })?;
    let meta = ctx.metadata(
        "verify",
        &[("bounds_slack", BOUNDS_SLACK), ("convexity", CONVEXITY_TOLERANCE)],
    );
    let record = ResultRecord::new(meta, Payload::Verification { passed, assertions });
    Ok((Output { stdout: out, record }, passed))
}
