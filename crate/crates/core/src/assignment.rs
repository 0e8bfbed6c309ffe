//! Optimal bipartite assignment (Kuhn-Munkres).
//!
//! The public interface maximises total weight. Internally the weights are
//! negated and fed to a shortest-augmenting-path Hungarian solver over a
//! square matrix; rectangular inputs are padded with zero-cost dummy rows or
//! columns whose pairs are dropped from the result.
//!
//! Ties are resolved by scan order: rows are inserted in increasing index
//! order and, among equally cheap columns, the lowest index wins. The output
//! is therefore a pure function of the input bits.

use crate::error::{Error, Result};

/// A dense `rows × cols` matrix of finite similarity weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|w| !w.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite weight {} at ({}, {})",
                data[k],
                k / cols,
                k % cols
            )));
        }
        Ok(WeightMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        WeightMatrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Sum of the weights of `pairs`, accumulated in the order given.
    pub fn total(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(r, c)| self.get(r, c)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        WeightMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|w| w * factor).collect(),
        )
    }
}

/// Returns a maximum-weight partial bijection as `(row, col)` pairs sorted by
/// row. Its length is `min(rows, cols)`.
pub fn solve_assignment(w: &WeightMatrix) -> Result<Vec<(usize, usize)>> {
    if w.rows == 0 || w.cols == 0 {
        return Ok(Vec::new());
    }
    if let Some(k) = w.data.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidMatrix(format!(
            "non-finite weight at index {k}"
        )));
    }

    let n = w.rows.max(w.cols);
    let cost = |i: usize, j: usize| -> f64 {
        if i < w.rows && j < w.cols {
            -w.data[i * w.cols + j]
        } else {
            0.0
        }
    };

    // 1-based potentials and matching; column 0 is the virtual source.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_slack = vec![0.0f64; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        col_owner[0] = i;
        let mut j0 = 0usize;
        min_slack.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);

        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < min_slack[j] {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=n)
        .filter_map(|j| {
            let i = col_owner[j];
            (i >= 1 && i - 1 < w.rows && j - 1 < w.cols).then(|| (i - 1, j - 1))
        })
        .collect();
    pairs.sort_unstable();
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::oracle::brute_force_assignment;
    use proptest::prelude::*;

    #[test]
    fn identity_like() {
        let w = WeightMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let pairs = solve_assignment(&w).unwrap();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(w.total(&pairs), 3.0);
    }

    #[test]
    fn square_example_matches_enumeration() {
        let w = WeightMatrix::from_rows(&[
            vec![0.9, 0.1, 0.0],
            vec![0.2, 0.8, 0.1],
            vec![0.0, 0.3, 0.7],
        ])
        .unwrap();
        let pairs = solve_assignment(&w).unwrap();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 2)]);
        let (best, _) = brute_force_assignment(&w).unwrap();
        assert!((w.total(&pairs) - 2.4).abs() < 1e-12);
        assert_eq!(w.total(&pairs), best);
    }

    #[test]
    fn wide_example() {
        let w = WeightMatrix::from_rows(&[vec![0.1, 0.9, 0.2], vec![0.8, 0.1, 0.1]]).unwrap();
        let pairs = solve_assignment(&w).unwrap();
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
        assert!((w.total(&pairs) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn tall_matrix_never_returns_padding() {
        let w = WeightMatrix::from_rows(&[vec![0.1], vec![0.7], vec![0.3]]).unwrap();
        assert_eq!(solve_assignment(&w).unwrap(), vec![(1, 0)]);
    }

    #[test]
    fn empty_and_invalid() {
        let empty = WeightMatrix::new(0, 0, vec![]).unwrap();
        assert!(solve_assignment(&empty).unwrap().is_empty());
        assert!(matches!(
            WeightMatrix::new(1, 2, vec![0.0, f64::NAN]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            WeightMatrix::new(1, 1, vec![f64::INFINITY]),
            Err(Error::InvalidMatrix(_))
        ));
    }

    #[test]
    fn all_ties_resolve_to_diagonal() {
        let w = WeightMatrix::new(4, 4, vec![0.5; 16]).unwrap();
        assert_eq!(
            solve_assignment(&w).unwrap(),
            vec![(0, 0), (1, 1), (2, 2), (3, 3)]
        );
    }

    fn matrix_strategy() -> impl Strategy<Value = WeightMatrix> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-10.0f64..10.0, r * c)
                .prop_map(move |d| WeightMatrix::new(r, c, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn output_is_partial_bijection(w in matrix_strategy()) {
            let pairs = solve_assignment(&w).unwrap();
            prop_assert_eq!(pairs.len(), w.rows().min(w.cols()));
            let mut rows: Vec<_> = pairs.iter().map(|p| p.0).collect();
            let mut cols: Vec<_> = pairs.iter().map(|p| p.1).collect();
            rows.dedup();
            cols.sort_unstable();
            cols.dedup();
            prop_assert_eq!(rows.len(), pairs.len());
            prop_assert_eq!(cols.len(), pairs.len());
        }

        #[test]
        fn positive_scaling_keeps_assignment(w in matrix_strategy(), c in 0.1f64..50.0) {
            let base = solve_assignment(&w).unwrap();
            let scaled = w.scaled(c).unwrap();
            let pairs = solve_assignment(&scaled).unwrap();
            let (best, _) = brute_force_assignment(&w).unwrap();
            prop_assert!((scaled.total(&pairs) - c * best).abs() <= 1e-9 * (1.0 + c * best.abs()));
            // random continuous weights have a unique optimum almost surely
            prop_assert_eq!(pairs, base);
        }

        #[test]
        fn shift_keeps_square_assignment(n in 1usize..=6, shift in -20.0f64..20.0, seed in any::<u64>()) {
            let mut state = seed | 1;
            let data: Vec<f64> = (0..n * n).map(|_| {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64
            }).collect();
            let w = WeightMatrix::new(n, n, data.clone()).unwrap();
            let shifted = WeightMatrix::new(n, n, data.iter().map(|x| x + shift).collect()).unwrap();
            prop_assert_eq!(solve_assignment(&w).unwrap(), solve_assignment(&shifted).unwrap());
        }
    }
}
