//! Transfer matrices over pattern systems.
//!
//! Entry `(i, j)` of the matrix is `z^{l_j}` when pattern `j` can follow
//! pattern `i`. Since "can follow" only compares the right boundary state of
//! `i` with the left boundary state of `j`, the matrix factors through the
//! boundary states and is never stored densely: a product `x T` is computed
//! by first summing `x` into states and then spreading the sums over the
//! patterns that leave each state.

mod free_energy;
mod growth;
mod scc;
mod series;
mod spectral;

pub use free_energy::{free_energy, FreeEnergyPoint, FreeEnergySolver};
pub use growth::{component_rates, growth_rates, growth_rates_in, hamiltonian_component, ComponentRate, GrowthRates};
pub use scc::{strongly_connected_components, tarjan_scc, SccDecomposition};
pub use series::{full_pattern_counts, hamiltonian_counts, polygon_counts};
pub use spectral::{dominant_eigenvalue, SpectralOptions, SpectralResult};

use crate::patterns::{PatternKind, PatternSystem};

#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub full_only: bool,
    pub width: usize,
    pub lengths: Vec<u32>,
    pub kinds: Vec<PatternKind>,
    pub input: Vec<Option<u32>>,
    pub output: Vec<Option<u32>>,
    pub num_states: usize,
    input_offsets: Vec<u32>,
    by_input: Vec<u32>,
    /// Span-0 polygons, A0.
    pub closed: Vec<u32>,
    /// Leftmost patterns, A1; rows of the left boundary matrix.
    pub boundary_in: Vec<u32>,
    /// Proper patterns, A2.
    pub proper: Vec<u32>,
    /// Rightmost patterns, A3; columns of the right boundary matrix.
    pub boundary_out: Vec<u32>,
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    /// Patterns that can follow `i`, i.e. the nonzero columns of row `i`.
    pub fn successors(&self, i: u32) -> &[u32] {
        match self.output[i as usize] {
            Some(s) => self.leaving(s),
            None => &[],
        }
    }

    /// Patterns whose left boundary state is `s`.
    pub fn leaving(&self, s: u32) -> &[u32] {
        let a = self.input_offsets[s as usize] as usize;
        let b = self.input_offsets[s as usize + 1] as usize;
        &self.by_input[a..b]
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        (0..self.dim() as u32).map(|i| self.successors(i).len()).sum()
    }

    /// Sums `values[i]` into the right boundary state of each pattern `i`
    /// listed in `members`.
    fn sum_into_states(&self, members: &[u32], values: &[f64], acc: &mut [f64]) {
        for (k, &i) in members.iter().enumerate() {
            if let Some(s) = self.output[i as usize] {
                acc[s as usize] += values[k];
            }
        }
    }
}

pub fn build_transfer_matrix(system: &PatternSystem) -> TransferMatrix {
    let class = |k: usize| system.class(k).collect::<Vec<u32>>();
    TransferMatrix {
        full_only: system.full_only,
        width: system.spec.width(),
        lengths: (0..system.len() as u32).map(|i| system.length(i)).collect(),
        kinds: system.patterns.iter().map(|p| p.kind).collect(),
        input: system.patterns.iter().map(|p| p.input).collect(),
        output: system.patterns.iter().map(|p| p.output).collect(),
        num_states: system.states.len(),
        input_offsets: system.input_offsets.clone(),
        by_input: system.by_input.clone(),
        closed: class(0),
        boundary_in: class(1),
        proper: class(2),
        boundary_out: class(3),
    }
}
