//! Zero-sum matrix games solved by a self-contained dense simplex.
//!
//! The row player maximizes, the column player minimizes. Payoffs are
//! shifted to be strictly positive, the column player's value LP
//! (max Σq subject to A·q ≤ 1) is solved with Bland's rule, and the row
//! player's optimal mixture is read off the duals. Desk-scale matrices are
//! tiny, so robustness beats sophistication here.

use crate::error::{GameError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
}

impl MatrixGame {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(GameError::InvalidParameter(
                "matrix game must be nonempty with rows*cols entries".into(),
            ));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(GameError::InvalidParameter(
                "matrix game entries must be finite".into(),
            ));
        }
        Ok(MatrixGame { rows, cols, a: entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }
}

/// Value of the game plus optimal mixed strategies for both players.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGameSolution {
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
}

impl MatrixGameSolution {
    /// Guaranteed payoff of the row mixture (its worst column).
    pub fn maximin(&self, mg: &MatrixGame) -> f64 {
        (0..mg.cols())
            .map(|j| (0..mg.rows()).map(|i| self.row_strategy[i] * mg.get(i, j)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Exposure of the column mixture (its best row).
    pub fn minimax(&self, mg: &MatrixGame) -> f64 {
        (0..mg.rows())
            .map(|i| (0..mg.cols()).map(|j| self.col_strategy[j] * mg.get(i, j)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn pure_row(rows: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; rows];
    v[i] = 1.0;
    v
}

fn normalize(v: &mut [f64]) {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        for x in v.iter_mut() {
            *x /= sum;
        }
    }
}

/// Solve the zero-sum game: maximin = minimax within solver precision.
pub fn matrix_game_value(mg: &MatrixGame) -> MatrixGameSolution {
    // one-line cases: a single row is a plain minimum, a single column a
    // plain maximum
    if mg.rows == 1 {
        let (j, value) = (0..mg.cols)
            .map(|j| (j, mg.get(0, j)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        return MatrixGameSolution {
            value,
            row_strategy: vec![1.0],
            col_strategy: pure_row(mg.cols, j),
        };
    }
    if mg.cols == 1 {
        let (i, value) = (0..mg.rows)
            .map(|i| (i, mg.get(i, 0)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        return MatrixGameSolution {
            value,
            row_strategy: pure_row(mg.rows, i),
            col_strategy: vec![1.0],
        };
    }

    let m = mg.rows;
    let k = mg.cols;
    let shift = 1.0 - mg.a.iter().copied().fold(f64::INFINITY, f64::min);
    let width = k + m + 1;
    let rhs = k + m;
    // rows 0..m: A'q + slack = 1; bottom row: reduced costs for max Σq
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        for j in 0..k {
            t[i * width + j] = mg.get(i, j) + shift;
        }
        t[i * width + k + i] = 1.0;
        t[i * width + rhs] = 1.0;
    }
    for j in 0..k {
        t[m * width + j] = -1.0;
    }
    let mut basis: Vec<usize> = (k..k + m).collect();

    const EPS: f64 = 1e-11;
    // Bland: entering variable with the smallest index
    while let Some(enter) = (0..k + m).find(|&j| t[m * width + j] < -EPS) {
        // ratio test; ties resolved toward the smallest basis index (Bland)
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let coef = t[i * width + enter];
            if coef > EPS {
                let ratio = t[i * width + rhs] / coef;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-15
                            || (ratio < best + 1e-15 && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let leave = leave.expect("value LP is bounded: every column has positive entries");
        let pivot = t[leave * width + enter];
        for j in 0..width {
            t[leave * width + j] /= pivot;
        }
        for i in 0..=m {
            if i == leave {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= f * t[leave * width + j];
                }
            }
        }
        basis[leave] = enter;
    }

    let objective = t[m * width + rhs];
    let shifted_value = 1.0 / objective;
    let mut q = vec![0.0; k];
    for i in 0..m {
        if basis[i] < k {
            q[basis[i]] = t[i * width + rhs];
        }
    }
    let mut col_strategy: Vec<f64> = q.iter().map(|&x| x * shifted_value).collect();
    let mut row_strategy: Vec<f64> =
        (0..m).map(|i| t[m * width + k + i] * shifted_value).collect();
    normalize(&mut col_strategy);
    normalize(&mut row_strategy);
    MatrixGameSolution {
        value: shifted_value - shift,
        row_strategy,
        col_strategy,
    }
}
