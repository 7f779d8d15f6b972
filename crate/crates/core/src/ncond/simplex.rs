//! Dense two-phase simplex over exact rationals, with Bland's rule.
//!
//! Sized for the witness-construction programs (tens of rows); not a general
//! LP solver.

use num::rational::BigRational;
use num::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rel: Rel,
    pub rhs: BigRational,
}

#[derive(Debug, Clone)]
pub(crate) enum LpOutcome {
    Optimal {
        value: BigRational,
        point: Vec<BigRational>,
    },
    Infeasible,
    Unbounded,
}

/// Maximizes `objective · x` over `x >= 0` subject to `constraints`.
pub(crate) fn maximize(objective: &[BigRational], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();

    // Column layout: structural 0..n, then one slack/surplus per inequality,
    // then artificials. Rows are normalized to non-negative rhs first.
    let mut rows: Vec<(Vec<BigRational>, Rel, BigRational)> = constraints
        .iter()
        .map(|c| {
            assert_eq!(c.coeffs.len(), n, "constraint arity");
            if c.rhs.is_negative() {
                let coeffs = c.coeffs.iter().map(|a| -a).collect();
                let rel = match c.rel {
                    Rel::Le => Rel::Ge,
                    Rel::Ge => Rel::Le,
                    Rel::Eq => Rel::Eq,
                };
                (coeffs, rel, -&c.rhs)
            } else {
                (c.coeffs.clone(), c.rel, c.rhs.clone())
            }
        })
        .collect();

    let slack_count = rows.iter().filter(|r| r.1 != Rel::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != Rel::Le).count();
    let total = n + slack_count + art_count;
    let art_start = n + slack_count;

    let mut tableau: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); total + 1]; m];
    let mut basis = vec![usize::MAX; m];
    let mut next_slack = n;
    let mut next_art = art_start;

    for (i, (coeffs, rel, rhs)) in rows.drain(..).enumerate() {
        tableau[i][..n].clone_from_slice(&coeffs);
        tableau[i][total] = rhs;
        match rel {
            Rel::Le => {
                tableau[i][next_slack] = BigRational::one();
                basis[i] = next_slack;
                next_slack += 1;
            }
            Rel::Ge => {
                tableau[i][next_slack] = -BigRational::one();
                next_slack += 1;
                tableau[i][next_art] = BigRational::one();
                basis[i] = next_art;
                next_art += 1;
            }
            Rel::Eq => {
                tableau[i][next_art] = BigRational::one();
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    // Phase 1: maximize minus the sum of artificials.
    if art_count > 0 {
        let mut obj = vec![BigRational::zero(); total + 1];
        for cell in &mut obj[art_start..total] {
            *cell = BigRational::one();
        }
        for (i, &b) in basis.iter().enumerate() {
            if b >= art_start {
                let row = tableau[i].clone();
                for (o, r) in obj.iter_mut().zip(row.iter()) {
                    *o -= r;
                }
            }
        }
        match run_pivots(&mut tableau, &mut obj, &mut basis, total) {
            PivotEnd::Optimal => {}
            PivotEnd::Unbounded => unreachable!("phase 1 objective is bounded"),
        }
        if !obj[total].is_zero() {
            return LpOutcome::Infeasible;
        }
        // Pivot any artificial still in the basis out, or drop its row.
        for i in 0..m {
            if basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| !tableau[i][j].is_zero()) {
                    pivot(&mut tableau, &mut obj, &mut basis, i, j);
                } else {
                    // Redundant row: everything structural is zero.
                    for cell in tableau[i].iter_mut() {
                        *cell = BigRational::zero();
                    }
                }
            }
        }
    }

    // Phase 2 objective, with basic columns eliminated. Artificial columns
    // stay out: the pivot loop only considers columns below `art_start`.
    let mut obj = vec![BigRational::zero(); total + 1];
    for j in 0..n {
        obj[j] = -&objective[j];
    }
    for (i, &b) in basis.iter().enumerate() {
        if b != usize::MAX && !obj[b].is_zero() {
            let factor = obj[b].clone();
            let row = tableau[i].clone();
            for (o, r) in obj.iter_mut().zip(row.iter()) {
                *o -= &factor * r;
            }
        }
    }
    match run_pivots(&mut tableau, &mut obj, &mut basis, art_start) {
        PivotEnd::Optimal => {}
        PivotEnd::Unbounded => return LpOutcome::Unbounded,
    }

    let mut point = vec![BigRational::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            point[b] = tableau[i][total].clone();
        }
    }
    LpOutcome::Optimal {
        value: obj[total].clone(),
        point,
    }
}

enum PivotEnd {
    Optimal,
    Unbounded,
}

/// Bland's rule: smallest eligible entering column, leaving row breaks ratio
/// ties by smallest basis index. Guarantees termination.
fn run_pivots(
    tableau: &mut [Vec<BigRational>],
    obj: &mut [BigRational],
    basis: &mut [usize],
    enterable: usize,
) -> PivotEnd {
    let total = obj.len() - 1;
    loop {
        let Some(col) = (0..enterable).find(|&j| obj[j].is_negative()) else {
            return PivotEnd::Optimal;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[total] / &row[col];
                let better = match &leave {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return PivotEnd::Unbounded;
        };
        pivot(tableau, obj, basis, row, col);
    }
}

fn pivot(
    tableau: &mut [Vec<BigRational>],
    obj: &mut [BigRational],
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    let pivot_val = tableau[row][col].clone();
    debug_assert!(!pivot_val.is_zero());
    for cell in tableau[row].iter_mut() {
        *cell /= &pivot_val;
    }
    let pivot_row = tableau[row].clone();
    for (i, other) in tableau.iter_mut().enumerate() {
        if i != row && !other[col].is_zero() {
            let factor = other[col].clone();
            for (cell, p) in other.iter_mut().zip(&pivot_row) {
                *cell -= &factor * p;
            }
        }
    }
    if !obj[col].is_zero() {
        let factor = obj[col].clone();
        for (cell, p) in obj.iter_mut().zip(&pivot_row) {
            *cell -= &factor * p;
        }
    }
    basis[row] = col;
}
