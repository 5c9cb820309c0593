use crate::error::{Error, Result};

use super::TransferMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    /// Relative gap between the Collatz-Wielandt bounds at convergence.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tolerance: 1e-12,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralResult {
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Perron root of the matrix restricted to `members` (one strongly
/// connected component), with entry `(i, j)` equal to `z^{l_j}`.
///
/// Power iteration runs on `T + I`, which is primitive whenever `T` is
/// irreducible, so periodic components converge too. For a positive iterate
/// `x` the ratios `(Bx)_j / x_j` bracket the Perron root of `B = T + I`
/// (Collatz-Wielandt); iteration stops once the bracket is tight.
pub fn dominant_eigenvalue(
    matrix: &TransferMatrix,
    members: &[u32],
    z: f64,
    options: SpectralOptions,
) -> Result<SpectralResult> {
    assert!(z > 0.0, "z must be positive");
    let weights: Vec<f64> = members
        .iter()
        .map(|&j| z.powi(matrix.lengths[j as usize] as i32))
        .collect();
    dominant_eigenvalue_weighted(matrix, members, &weights, options)
}

pub(crate) fn dominant_eigenvalue_weighted(
    matrix: &TransferMatrix,
    members: &[u32],
    weights: &[f64],
    options: SpectralOptions,
) -> Result<SpectralResult> {
    let k = members.len();
    assert!(k > 0, "empty component");
    let mut acc = vec![0.0f64; matrix.num_states];
    let mut x = vec![1.0f64; k];
    let mut y = vec![0.0f64; k];
    let mut residual = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        matrix.sum_into_states(members, &x, &mut acc);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (idx, &j) in members.iter().enumerate() {
            let into = matrix.input[j as usize].map_or(0.0, |s| acc[s as usize]);
            y[idx] = weights[idx] * into + x[idx];
            let ratio = y[idx] / x[idx];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        for &i in members {
            if let Some(s) = matrix.output[i as usize] {
                acc[s as usize] = 0.0;
            }
        }
        residual = (hi - lo) / hi;
        if residual <= options.tolerance {
            return Ok(SpectralResult {
                lambda: (0.5 * (hi + lo) - 1.0).max(0.0),
                residual,
                iterations: iteration,
            });
        }
        let scale = y.iter().copied().fold(0.0, f64::max);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / scale;
        }
    }
    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TubeSpec;
    use crate::patterns::PatternSystem;
    use crate::transfer::{build_transfer_matrix, strongly_connected_components};

    /// Characteristic polynomial by Faddeev-LeVerrier, highest degree first.
    fn char_poly(a: &[Vec<f64>]) -> Vec<f64> {
        let n = a.len();
        let mut coeffs = vec![1.0];
        let mut m = vec![vec![0.0; n]; n];
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{k-1} I
            let mut next = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    next[i][j] = (0..n).map(|t| a[i][t] * m[t][j]).sum::<f64>();
                }
                next[i][i] += coeffs[k - 1];
            }
            m = next;
            let am_trace: f64 = (0..n)
                .map(|i| (0..n).map(|t| a[i][t] * m[t][i]).sum::<f64>())
                .sum();
            coeffs.push(-am_trace / k as f64);
        }
        coeffs
    }

    fn largest_real_root(coeffs: &[f64], upper: f64) -> f64 {
        let eval = |x: f64| coeffs.iter().fold(0.0, |acc, c| acc * x + c);
        // Scan down from the row-sum bound for the last sign change.
        let steps = 200_000;
        let mut hi = upper + 1.0;
        let mut prev = eval(hi);
        for s in (0..steps).rev() {
            let x = (upper + 1.0) * s as f64 / steps as f64;
            let v = eval(x);
            if v == 0.0 {
                return x;
            }
            if v.signum() != prev.signum() {
                let (mut a, mut b) = (x, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if eval(mid).signum() == eval(a).signum() {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                return 0.5 * (a + b);
            }
            hi = x;
            prev = v;
        }
        0.0
    }

    #[test]
    fn smallest_tube_self_loop_is_one() {
        let sys = PatternSystem::build(TubeSpec::new(1, 0).unwrap(), true).unwrap();
        let t = build_transfer_matrix(&sys);
        let r = dominant_eigenvalue(&t, &t.proper, 1.0, SpectralOptions::default()).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-12);
        let tiny = dominant_eigenvalue(&t, &t.proper, 1e-9, SpectralOptions::default()).unwrap();
        assert!(tiny.lambda < 1e-15);
    }

    /// Small components against the characteristic polynomial.
    #[test]
    fn small_components_match_characteristic_polynomial() {
        let mut checked = 0;
        for (l, m, full) in [(3, 0, true), (4, 0, true), (2, 1, true), (1, 1, false), (2, 0, false), (5, 0, true)] {
            let sys = PatternSystem::build(TubeSpec::new(l, m).unwrap(), full).unwrap();
            let t = build_transfer_matrix(&sys);
            let scc = strongly_connected_components(&t);
            for (c, members) in scc.components.iter().enumerate() {
                if !scc.cyclic[c] || members.len() > 12 {
                    continue;
                }
                let z = 0.9f64;
                let n = members.len();
                let mut a = vec![vec![0.0; n]; n];
                for (r, &i) in members.iter().enumerate() {
                    for &j in t.successors(i) {
                        if let Some(col) = members.iter().position(|&x| x == j) {
                            a[r][col] = z.powi(t.lengths[j as usize] as i32);
                        }
                    }
                }
                let bound = a.iter().map(|row| row.iter().sum::<f64>()).fold(0.0, f64::max);
                let expect = largest_real_root(&char_poly(&a), bound);
                let got = dominant_eigenvalue(&t, members, z, SpectralOptions::default()).unwrap();
                assert!((got.lambda - expect).abs() < 1e-10, "{l}x{m}: {} vs {expect}", got.lambda);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}
