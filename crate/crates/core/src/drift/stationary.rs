//! Stationary distributions of truncated chains, by direct linear solve of
//! the balance equations. Truncation reflects: steps that would leave the
//! box become holds. Periodic chains are fine; the stationary measure solves
//! πP = π regardless (convergence statements are only Cesàro).

use super::{BirthDeathChain, ChainClass, DriftError, QuadrantWalk, WalkRegion};
use nalgebra::{DMatrix, DVector};

fn refuse_unstable(class: ChainClass) -> Result<(), DriftError> {
    // Boundary chains still have a stationary law after truncation.
    match class {
        ChainClass::Ergodic | ChainClass::Boundary => Ok(()),
        ChainClass::Transient | ChainClass::Unsupported => Err(DriftError::NotErgodic),
    }
}

/// Solves π = πP with Σπ = 1 for a row-stochastic dense matrix.
fn solve_balance(p: &DMatrix<f64>) -> Result<Vec<f64>, DriftError> {
    let n = p.nrows();
    // (Pᵀ − I) π = 0 with the last equation replaced by normalization.
    let mut a = p.transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let solution = a.lu().solve(&b).ok_or(DriftError::SingularSystem)?;
    let mut pi: Vec<f64> = solution.iter().copied().collect();
    // Numerical dust only; a genuinely negative mass means the system was
    // degenerate.
    if pi.iter().any(|&x| x < -1e-8) {
        return Err(DriftError::SingularSystem);
    }
    for x in pi.iter_mut() {
        *x = x.max(0.0);
    }
    let total: f64 = pi.iter().sum();
    for x in pi.iter_mut() {
        *x /= total;
    }
    Ok(pi)
}

/// Stationary law of the birth-death chain reflected at `cutoff`
/// (states 0..=cutoff). The chain is reversible, so the balance equations
/// reduce to the cut recurrence π_{i+1}·down = π_i·up, solved exactly; a
/// generic dense solve cannot resolve the tail, which sits tens of orders
/// of magnitude below π₀.
pub fn stationary_truncated_birth_death(
    chain: &BirthDeathChain,
    cutoff: usize,
) -> Result<Vec<f64>, DriftError> {
    assert!(cutoff >= 1, "need at least two states");
    refuse_unstable(chain.classify().class)?;
    let ratio = &chain.up / &chain.down;
    let mut unnormalized = Vec::with_capacity(cutoff + 1);
    let mut current = crate::scalar::Scalar::one();
    let mut total = crate::scalar::Scalar::zero();
    for _ in 0..=cutoff {
        total = &total + &current;
        unnormalized.push(current.clone());
        current = &current * &ratio;
    }
    Ok(unnormalized
        .into_iter()
        .map(|pi| (&pi / &total).to_f64())
        .collect())
}

/// Stationary law of the quarter-plane walk reflected at `cutoff` in both
/// coordinates; entry `[x][y]` of the result is π(x, y).
pub fn stationary_truncated_quadrant(
    walk: &QuadrantWalk,
    cutoff: usize,
) -> Result<Vec<Vec<f64>>, DriftError> {
    assert!(cutoff >= 1, "need at least a 2x2 box");
    assert!(cutoff <= 60, "dense solve is sized for desk-scale cutoffs");
    refuse_unstable(super::fmm_classify(&super::drifts(walk)).class)?;
    let side = cutoff + 1;
    let states = side * side;
    let index = |x: usize, y: usize| x * side + y;
    let mut p = DMatrix::zeros(states, states);
    for x in 0..side {
        for y in 0..side {
            let region = match (x, y) {
                (0, 0) => WalkRegion::Origin,
                (_, 0) if x > 0 => WalkRegion::XAxis,
                (0, _) => WalkRegion::YAxis,
                _ => WalkRegion::Interior,
            };
            let row = match region {
                WalkRegion::Interior => walk.interior(),
                WalkRegion::XAxis => walk.x_axis(),
                WalkRegion::YAxis => walk.y_axis(),
                WalkRegion::Origin => walk.origin(),
            };
            for ((dx, dy), prob) in row {
                let nx = x as i64 + i64::from(*dx);
                let ny = y as i64 + i64::from(*dy);
                let target = if nx < 0 || ny < 0 || nx > cutoff as i64 || ny > cutoff as i64 {
                    index(x, y) // reflected: hold instead of leaving the box
                } else {
                    index(nx as usize, ny as usize)
                };
                p[(index(x, y), target)] += prob.to_f64();
            }
        }
    }
    let flat = solve_balance(&p)?;
    Ok((0..side)
        .map(|x| flat[x * side..(x + 1) * side].to_vec())
        .collect())
}
