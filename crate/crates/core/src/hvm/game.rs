//! Exact solver for finite two-player zero-sum games over rationals.
//!
//! The row player maximizes. After shifting the payoffs to be strictly
//! positive, the column player's problem `max sum(w) s.t. M w <= 1, w >= 0` is
//! in standard form with the slack basis feasible at the origin, so a single
//! simplex phase suffices. Bland's rule (smallest eligible index entering,
//! smallest basis index leaving on ratio ties) guarantees termination and makes
//! the returned vertex deterministic. The row player's optimal strategy is read
//! off the final objective row.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    /// Value of the game to the row (maximizing) player.
    pub value: Rational64,
    /// Optimal mixed strategy for the rows.
    pub row_strategy: Vec<Rational64>,
    /// Optimal mixed strategy for the columns.
    pub col_strategy: Vec<Rational64>,
}

impl GameSolution {
    /// Smallest expected payoff the row strategy guarantees against any column.
    pub fn row_guarantee(&self, payoff: &[Vec<Rational64>]) -> Rational64 {
        let cols = payoff[0].len();
        (0..cols)
            .map(|j| {
                payoff
                    .iter()
                    .zip(&self.row_strategy)
                    .map(|(row, &p)| row[j] * p)
                    .sum::<Rational64>()
            })
            .min()
            .expect("at least one column")
    }

    /// Largest expected payoff any row can extract against the column strategy.
    pub fn col_guarantee(&self, payoff: &[Vec<Rational64>]) -> Rational64 {
        payoff
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.col_strategy)
                    .map(|(&m, &q)| m * q)
                    .sum::<Rational64>()
            })
            .max()
            .expect("at least one row")
    }
}

/// Solves the game with payoff matrix `payoff[row][col]` exactly.
///
/// Panics on an empty or ragged matrix.
pub fn solve_zero_sum(payoff: &[Vec<Rational64>]) -> GameSolution {
    let m = payoff.len();
    assert!(m > 0, "payoff matrix has no rows");
    let n = payoff[0].len();
    assert!(n > 0, "payoff matrix has no columns");
    assert!(payoff.iter().all(|r| r.len() == n), "ragged payoff matrix");

    let min = payoff.iter().flatten().copied().min().expect("non-empty");
    let shift = Rational64::one() - min;

    // Tableau rows 0..m are constraints, row m is the objective.
    // Columns 0..n are w, n..n+m are slacks, the last is the right-hand side.
    let width = n + m + 1;
    let mut t = vec![vec![Rational64::zero(); width]; m + 1];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = payoff[i][j] + shift;
        }
        t[i][n + i] = Rational64::one();
        t[i][width - 1] = Rational64::one();
    }
    for cell in t[m].iter_mut().take(n) {
        *cell = -Rational64::one();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) {
        let leave = (0..m)
            .filter(|&i| t[i][enter].is_positive())
            .min_by(|&a, &b| {
                let ra = t[a][width - 1] / t[a][enter];
                let rb = t[b][width - 1] / t[b][enter];
                ra.cmp(&rb).then(basis[a].cmp(&basis[b]))
            })
            .expect("positive shifted payoffs keep the program bounded");
        pivot(&mut t, leave, enter);
        basis[leave] = enter;
    }

    let total = t[m][width - 1];
    let shifted_value = total.recip();
    let mut col_strategy = vec![Rational64::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            col_strategy[b] = t[i][width - 1] * shifted_value;
        }
    }
    let row_strategy = (0..m).map(|i| t[m][n + i] * shifted_value).collect();
    GameSolution {
        value: shifted_value - shift,
        row_strategy,
        col_strategy,
    }
}

fn pivot(t: &mut [Vec<Rational64>], row: usize, col: usize) {
    let p = t[row][col];
    for cell in t[row].iter_mut() {
        *cell /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let factor = r[col];
        if factor.is_zero() {
            continue;
        }
        for (cell, &pv) in r.iter_mut().zip(&pivot_row) {
            *cell -= factor * pv;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn matrix(rows: &[&[i64]]) -> Vec<Vec<Rational64>> {
        rows.iter()
            .map(|row| row.iter().map(|&x| r(x)).collect())
            .collect()
    }

    fn assert_optimal(payoff: &[Vec<Rational64>], sol: &GameSolution) {
        assert_eq!(sol.row_strategy.iter().sum::<Rational64>(), r(1));
        assert_eq!(sol.col_strategy.iter().sum::<Rational64>(), r(1));
        assert!(sol.row_strategy.iter().all(|p| !p.is_negative()));
        assert!(sol.col_strategy.iter().all(|p| !p.is_negative()));
        assert_eq!(sol.row_guarantee(payoff), sol.value);
        assert_eq!(sol.col_guarantee(payoff), sol.value);
    }

    #[test]
    fn matching_pennies() {
        let m = matrix(&[&[1, -1], &[-1, 1]]);
        let sol = solve_zero_sum(&m);
        assert_eq!(sol.value, r(0));
        assert_eq!(sol.row_strategy, vec![Rational64::new(1, 2); 2]);
        assert_optimal(&m, &sol);
    }

    #[test]
    fn rock_scissors_paper_with_double_blow() {
        // Value 1/12 with row strategy (1/4, 1/3, 5/12): each column pays 1/12.
        let m = matrix(&[&[0, 2, -1], &[-1, 0, 1], &[1, -1, 0]]);
        let sol = solve_zero_sum(&m);
        assert_eq!(sol.value, Rational64::new(1, 12));
        assert_eq!(
            sol.row_strategy,
            vec![
                Rational64::new(1, 4),
                Rational64::new(1, 3),
                Rational64::new(5, 12)
            ]
        );
        assert_optimal(&m, &sol);
    }

    #[test]
    fn saddle_point() {
        let m = matrix(&[&[3, 5], &[1, 2]]);
        let sol = solve_zero_sum(&m);
        assert_eq!(sol.value, r(3));
        assert_eq!(sol.row_strategy, vec![r(1), r(0)]);
        assert_optimal(&m, &sol);
    }
}
