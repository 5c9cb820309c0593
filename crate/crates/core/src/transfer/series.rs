//! Exact coefficient extraction by repeated vector-matrix products.

use num_bigint::BigUint;
use num_traits::Zero;

use super::TransferMatrix;

/// Sums per-pattern values into their right boundary states.
fn into_states<T: Clone + Zero + for<'a> std::ops::AddAssign<&'a T>>(
    matrix: &TransferMatrix,
    values: &[(u32, T)],
) -> Vec<T> {
    let mut acc = vec![T::zero(); matrix.num_states];
    for (i, v) in values {
        if let Some(s) = matrix.output[*i as usize] {
            acc[s as usize] += v;
        }
    }
    acc
}

/// Hamiltonian polygon counts `p^H` by span `0..=max_s` from the full
/// system: span 0 is `|A0|`, span `s >= 1` counts sequences from a full
/// leftmost pattern through `s - 1` proper patterns to a rightmost one.
pub fn hamiltonian_counts(matrix: &TransferMatrix, max_s: usize) -> Vec<BigUint> {
    assert!(matrix.full_only, "Hamiltonian counts need the full system");
    let mut out = vec![BigUint::from(matrix.closed.len())];
    let mut current: Vec<(u32, BigUint)> =
        matrix.boundary_in.iter().map(|&i| (i, BigUint::from(1u32))).collect();
    for _ in 1..=max_s {
        let acc = into_states(matrix, &current);
        let closing: BigUint = matrix
            .boundary_out
            .iter()
            .map(|&j| &acc[matrix.input[j as usize].unwrap() as usize])
            .sum();
        out.push(closing);
        current = matrix
            .proper
            .iter()
            .map(|&j| (j, acc[matrix.input[j as usize].unwrap() as usize].clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
    }
    out
}

/// Number of `r`-patterns (properly connected sequences of `r` patterns)
/// for `r = 1..=r_max`.
pub fn full_pattern_counts(matrix: &TransferMatrix, r_max: usize) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut current: Vec<(u32, BigUint)> =
        (0..matrix.dim() as u32).map(|i| (i, BigUint::from(1u32))).collect();
    for r in 1..=r_max {
        out.push(current.iter().map(|(_, v)| v).sum());
        if r == r_max {
            break;
        }
        let acc = into_states(matrix, &current);
        current = (0..matrix.dim() as u32)
            .filter_map(|j| matrix.input[j as usize].map(|s| (j, acc[s as usize].clone())))
            .filter(|(_, v)| !v.is_zero())
            .collect();
    }
    out
}

/// Polynomial in the length variable, truncated above `n_max`.
#[derive(Clone, Debug, PartialEq)]
struct Poly(Vec<BigUint>);

impl Zero for Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl std::ops::Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl<'a> std::ops::AddAssign<&'a Poly> for Poly {
    fn add_assign(&mut self, rhs: &'a Poly) {
        if self.0.len() < rhs.0.len() {
            self.0.resize(rhs.0.len(), BigUint::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl Poly {
    fn shifted(&self, by: usize, n_max: usize) -> Poly {
        let mut out = vec![BigUint::zero(); (self.0.len() + by).min(n_max + 1)];
        for (k, c) in self.0.iter().enumerate() {
            if k + by <= n_max {
                out[k + by] = c.clone();
            }
        }
        Poly(out)
    }
}

/// General polygon counts `counts[n][s]` for all `n <= n_max` from the
/// unrestricted system, tracking length through the block lengths.
pub fn polygon_counts(matrix: &TransferMatrix, n_max: usize) -> Vec<Vec<BigUint>> {
    let s_max = n_max.saturating_sub(2) / 2;
    let mut counts = vec![vec![BigUint::zero(); s_max + 1]; n_max + 1];
    for &i in &matrix.closed {
        let n = matrix.lengths[i as usize] as usize;
        if n <= n_max {
            counts[n][0] += 1u32;
        }
    }
    let mut current: Vec<(u32, Poly)> = matrix
        .boundary_in
        .iter()
        .filter(|&&i| matrix.lengths[i as usize] as usize <= n_max)
        .map(|&i| {
            let len = matrix.lengths[i as usize] as usize;
            let mut p = Poly(vec![BigUint::zero(); len + 1]);
            p.0[len] = BigUint::from(1u32);
            (i, p)
        })
        .collect();
    for s in 1..=s_max {
        let acc = into_states(matrix, &current);
        for &j in &matrix.boundary_out {
            let p = acc[matrix.input[j as usize].unwrap() as usize]
                .shifted(matrix.lengths[j as usize] as usize, n_max);
            for (n, c) in p.0.iter().enumerate() {
                counts[n][s] += c;
            }
        }
        current = matrix
            .proper
            .iter()
            .map(|&j| {
                let p = &acc[matrix.input[j as usize].unwrap() as usize];
                (j, p.shifted(matrix.lengths[j as usize] as usize, n_max))
            })
            .filter(|(_, p)| !p.is_zero())
            .collect();
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TubeSpec;
    use crate::patterns::PatternSystem;
    use crate::transfer::build_transfer_matrix;

    fn matrix(l: u32, m: u32, full: bool) -> TransferMatrix {
        build_transfer_matrix(&PatternSystem::build(TubeSpec::new(l, m).unwrap(), full).unwrap())
    }

    #[test]
    fn smallest_tube_series() {
        let t = matrix(1, 0, true);
        let ham = hamiltonian_counts(&t, 6);
        assert_eq!(ham[0], BigUint::zero());
        assert!(ham[1..].iter().all(|c| *c == BigUint::from(1u32)));
        let general = polygon_counts(&matrix(1, 0, false), 12);
        for n in (4..=12).step_by(2) {
            let total: BigUint = general[n].iter().sum();
            assert_eq!(total, BigUint::from(1u32), "n = {n}");
            assert_eq!(general[n][(n - 2) / 2], BigUint::from(1u32));
        }
    }

    #[test]
    fn odd_width_hamiltonian_parity() {
        let t = matrix(2, 0, true);
        let ham = hamiltonian_counts(&t, 7);
        for (s, c) in ham.iter().enumerate() {
            if (s + 1) * 3 % 2 == 1 {
                assert!(c.is_zero(), "span {s}");
            } else {
                assert!(!c.is_zero(), "span {s}");
            }
        }
    }

    #[test]
    fn pattern_counts_start_with_dimension() {
        let t = matrix(2, 1, true);
        let counts = full_pattern_counts(&t, 3);
        assert_eq!(counts[0], BigUint::from(t.dim()));
        assert_eq!(counts[1], BigUint::from(t.nnz()));
    }
}
