//! Dense exact simplex for `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! Starts from the slack basis and pivots with Bland's rule, so it always
//! terminates. Intended for small instances only.

use num::{Signed, Zero};

use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    Unbounded,
    NegativeRhs(usize),
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Q,
    pub x: Vec<Q>,
    pub pivots: usize,
}

/// A single `coeffs · x <= rhs` row.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub rhs: Q,
}

pub fn maximize(objective: &[Q], constraints: &[Constraint]) -> Result<LpSolution, LpError> {
    let n = objective.len();
    let m = constraints.len();
    for (i, c) in constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(LpError::Shape(format!(
                "row {i} has {} coefficients, expected {n}",
                c.coeffs.len()
            )));
        }
        if c.rhs.is_negative() {
            return Err(LpError::NegativeRhs(i));
        }
    }

    let width = n + m;
    // Row-major tableau; column `width` holds the right-hand side.
    let mut t: Vec<Vec<Q>> = constraints
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut row = Vec::with_capacity(width + 1);
            row.extend(c.coeffs.iter().cloned());
            row.extend((0..m).map(|k| {
                if k == i {
                    Q::from_integer(1.into())
                } else {
                    Q::zero()
                }
            }));
            row.push(c.rhs.clone());
            row
        })
        .collect();
    // Reduced costs of the minimisation form, plus the negated objective value.
    let mut z: Vec<Q> = objective.iter().map(|c| -c.clone()).collect();
    z.extend((0..=m).map(|_| Q::zero()));
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;

    while let Some(enter) = (0..width).find(|&j| z[j].is_negative()) {
        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in t.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width] / &row[enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            return Err(LpError::Unbounded);
        };

        let piv = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let factor = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        if !z[enter].is_zero() {
            let factor = z[enter].clone();
            for (v, p) in z.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        basis[r] = enter;
        pivots += 1;
    }

    let mut x = vec![Q::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width].clone();
        }
    }
    Ok(LpSolution {
        value: z[width].clone(),
        x,
        pivots,
    })
}
