use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TubeSpec;
use crate::patterns::{PatternKind, PatternSystem, StateSpace, DEFAULT_PATTERN_CAP};

use super::{
    build_transfer_matrix, dominant_eigenvalue, strongly_connected_components, SccDecomposition,
    SpectralOptions, TransferMatrix,
};

/// Growth data for one strongly connected component of the full system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRate {
    pub id: u32,
    pub size: usize,
    /// Gcd of cycle lengths in the component.
    pub period: u32,
    pub lambda: f64,
    pub residual: f64,
    /// `log(lambda) / W`.
    pub rate: f64,
    pub hamiltonian: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRates {
    pub spec: TubeSpec,
    pub kappa_h: f64,
    /// Largest rate among the other cyclic components, if there are any.
    pub next_largest: Option<f64>,
    /// Every cyclic component, in component-id order.
    pub components: Vec<ComponentRate>,
    pub pattern_count: usize,
}

impl GrowthRates {
    pub fn hamiltonian(&self) -> &ComponentRate {
        self.components
            .iter()
            .find(|c| c.hamiltonian)
            .expect("growth rates always include the Hamiltonian component")
    }

    /// The component realizing `next_largest`.
    pub fn runner_up(&self) -> Option<&ComponentRate> {
        self.components
            .iter()
            .filter(|c| !c.hamiltonian)
            .max_by(|a, b| a.rate.total_cmp(&b.rate))
    }
}

fn reach(
    start: impl IntoIterator<Item = u32>,
    n: usize,
    step: impl Fn(u32, &mut dyn FnMut(u32)),
) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for s in start {
        if !seen[s as usize] {
            seen[s as usize] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        step(v, &mut |w| {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        });
    }
    seen
}

/// Finds the component made of the full proper patterns that lie between a
/// full leftmost and a full rightmost pattern, i.e. the patterns of
/// Hamiltonian polygons. Fails if those patterns do not form exactly one
/// strongly connected component.
pub fn hamiltonian_component(matrix: &TransferMatrix, scc: &SccDecomposition) -> Result<u32> {
    let n = matrix.dim();
    let forward = reach(matrix.boundary_in.iter().copied(), n, |v, push| {
        for &w in matrix.successors(v) {
            push(w);
        }
    });
    // Predecessors of pattern v are the patterns whose output is v's input.
    let mut entering: Vec<Vec<u32>> = vec![Vec::new(); matrix.num_states];
    for i in 0..n as u32 {
        if let Some(s) = matrix.output[i as usize] {
            entering[s as usize].push(i);
        }
    }
    let backward = reach(matrix.boundary_out.iter().copied(), n, |v, push| {
        if let Some(s) = matrix.input[v as usize] {
            for &w in &entering[s as usize] {
                push(w);
            }
        }
    });
    let mut ids: Vec<u32> = matrix
        .proper
        .iter()
        .filter(|&&p| forward[p as usize] && backward[p as usize])
        .map(|&p| scc.component[p as usize])
        .collect();
    ids.sort_unstable();
    ids.dedup();
    match ids.as_slice() {
        [id] if scc.cyclic[*id as usize] => Ok(*id),
        _ => Err(Error::ConjectureStructureViolation {
            components: ids.len(),
        }),
    }
}

fn period(matrix: &TransferMatrix, scc: &SccDecomposition, id: u32) -> u32 {
    let members = &scc.components[id as usize];
    let mut level = std::collections::HashMap::new();
    let mut queue = VecDeque::new();
    level.insert(members[0], 0i64);
    queue.push_back(members[0]);
    let mut g = 0i64;
    while let Some(v) = queue.pop_front() {
        let lv = level[&v];
        for &w in matrix.successors(v) {
            if scc.component[w as usize] != id {
                continue;
            }
            match level.get(&w) {
                Some(&lw) => g = gcd(g, (lv + 1 - lw).abs()),
                None => {
                    level.insert(w, lv + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    g as u32
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Growth rates of every cyclic component of an already built full system.
pub fn component_rates(
    system: &PatternSystem,
    options: SpectralOptions,
) -> Result<GrowthRates> {
    assert!(system.full_only, "growth rates are defined on the full system");
    let matrix = build_transfer_matrix(system);
    let scc = strongly_connected_components(&matrix);
    let ham = hamiltonian_component(&matrix, &scc)?;
    let w = system.spec.width() as f64;
    let mut components = Vec::new();
    for (id, members) in scc.components.iter().enumerate() {
        if !scc.cyclic[id] {
            continue;
        }
        debug_assert!(members
            .iter()
            .all(|&p| matrix.kinds[p as usize] == PatternKind::Proper));
        let r = dominant_eigenvalue(&matrix, members, 1.0, options)?;
        components.push(ComponentRate {
            id: id as u32,
            size: members.len(),
            period: period(&matrix, &scc, id as u32),
            lambda: r.lambda,
            residual: r.residual,
            rate: r.lambda.ln() / w,
            hamiltonian: id as u32 == ham,
        });
    }
    let kappa_h = components.iter().find(|c| c.hamiltonian).map(|c| c.rate).unwrap();
    let next_largest = components
        .iter()
        .filter(|c| !c.hamiltonian)
        .map(|c| c.rate)
        .max_by(f64::total_cmp);
    Ok(GrowthRates {
        spec: system.spec,
        kappa_h,
        next_largest,
        components,
        pattern_count: system.len(),
    })
}

/// `kappa_H = log(lambda(T^H(1))) / W` and the next largest component rate.
pub fn growth_rates(spec: TubeSpec) -> Result<GrowthRates> {
    growth_rates_in(spec, StateSpace::Realizable)
}

/// As [`growth_rates`], over the given boundary-state space.
pub fn growth_rates_in(spec: TubeSpec, space: StateSpace) -> Result<GrowthRates> {
    let system = PatternSystem::build_with(spec, true, space, DEFAULT_PATTERN_CAP)?;
    component_rates(&system, SpectralOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_tube() {
        let g = growth_rates(TubeSpec::new(1, 0).unwrap()).unwrap();
        assert!(g.kappa_h.abs() < 1e-12);
        assert_eq!(g.next_largest, None);
        assert_eq!(g.components.len(), 1);
        assert_eq!(g.hamiltonian().period, 1);
    }

    #[test]
    fn crossing_states_only_matter_in_the_plane() {
        let spec = TubeSpec::new(1, 1).unwrap();
        let a = growth_rates(spec).unwrap();
        let b = growth_rates_in(spec, StateSpace::AllMatchings).unwrap();
        assert_eq!(a.kappa_h, b.kappa_h);
        let line = TubeSpec::new(4, 0).unwrap();
        let a = growth_rates(line).unwrap();
        let b = growth_rates_in(line, StateSpace::AllMatchings).unwrap();
        assert_eq!(a.kappa_h, b.kappa_h);
        assert_eq!(a.next_largest, None);
        // Four crossing strands and a hole that hops between neighbours.
        let runner = b.runner_up().unwrap();
        assert_eq!(runner.size, 8);
        assert!((runner.lambda - 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(0, 4), 4);
        assert_eq!(gcd(6, 4), 2);
    }
}
