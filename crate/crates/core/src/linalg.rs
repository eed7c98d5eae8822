//! Dense LU factorization with partial pivoting.
//!
//! Every linear system in this crate is desk scale (a few hundred unknowns at
//! most) and well conditioned after the graph-based eliminations, so a dense
//! factorization that can be reused across many right-hand sides is the right
//! tool.

use crate::error::{GameError, Result};

/// Row-major square matrix factored as P·A = L·U.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    // pivots[k] = row swapped with row k at elimination step k
    pivots: Vec<usize>,
}

/// Factor a flat row-major n×n matrix. Consumes the buffer.
pub fn lu_factor(mut a: Vec<f64>, n: usize) -> Result<LuFactors> {
    assert_eq!(a.len(), n * n, "matrix buffer has wrong length");
    let mut pivots = vec![0usize; n];
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best < 1e-14 {
            return Err(GameError::Internal(format!(
                "singular linear system (pivot {best:.3e} at column {k})"
            )));
        }
        pivots[k] = p;
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
        }
        let diag = a[k * n + k];
        for i in k + 1..n {
            let factor = a[i * n + k] / diag;
            a[i * n + k] = factor;
            for j in k + 1..n {
                a[i * n + j] -= factor * a[k * n + j];
            }
        }
    }
    Ok(LuFactors { n, lu: a, pivots })
}

impl LuFactors {
    /// Solve A·x = b for one right-hand side.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n, "rhs has wrong length");
        let mut x = b.to_vec();
        // stored multipliers are in fully pivoted row order, so the whole
        // permutation must be applied before substitution starts
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// One-shot solve for callers that do not reuse the factorization.
pub fn solve_dense(a: Vec<f64>, n: usize, b: &[f64]) -> Result<Vec<f64>> {
    Ok(lu_factor(a, n)?.solve(b))
}
