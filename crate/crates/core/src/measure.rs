//! Arrival laws: strictly positive probability vectors over the item
//! classes, exact-rational capable, plus the doubling of a measure.

use crate::graph::VertexSet;
use crate::scalar::Scalar;
use num::rational::BigRational;
use num::{BigInt, Signed};
use rand::Rng;

/// Tolerance on the sum-to-one check for approximate entries.
pub const SUM_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum MeasureError {
    #[error("measure needs at least one entry")]
    Empty,
    #[error("entry for class {0} is not strictly positive")]
    NotPositive(usize),
    #[error("entries sum to {0}, expected 1")]
    BadSum(String),
}

/// μ ∈ M(V): strictly positive, sums to one (exactly for rational entries,
/// within [`SUM_TOL`] otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<Scalar>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<Scalar>) -> Result<Self, MeasureError> {
        if entries.is_empty() {
            return Err(MeasureError::Empty);
        }
        for (i, e) in entries.iter().enumerate() {
            let positive = match e {
                Scalar::Exact(r) => r.is_positive(),
                Scalar::Approx(x) => *x > 0.0,
            };
            if !positive {
                return Err(MeasureError::NotPositive(i));
            }
        }
        let sum = Scalar::sum(&entries);
        let ok = match &sum {
            Scalar::Exact(r) => *r == BigRational::from_integer(BigInt::from(1)),
            Scalar::Approx(x) => (x - 1.0).abs() <= SUM_TOL,
        };
        if !ok {
            return Err(MeasureError::BadSum(sum.to_string()));
        }
        Ok(ProbabilityVector { entries })
    }

    pub fn from_rationals(entries: Vec<BigRational>) -> Result<Self, MeasureError> {
        ProbabilityVector::new(entries.into_iter().map(Scalar::Exact).collect())
    }

    pub fn from_f64s(entries: &[f64]) -> Result<Self, MeasureError> {
        ProbabilityVector::new(entries.iter().map(|&x| Scalar::Approx(x)).collect())
    }

    /// Exact measure with entry `w_i / Σw`.
    pub fn from_integer_weights(weights: &[u64]) -> Result<Self, MeasureError> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(MeasureError::Empty);
        }
        let denom = BigInt::from(total);
        ProbabilityVector::from_rationals(
            weights
                .iter()
                .map(|&w| BigRational::new(BigInt::from(w), denom.clone()))
                .collect(),
        )
    }

    pub fn uniform(n: usize) -> Self {
        ProbabilityVector::from_integer_weights(&vec![1; n]).expect("uniform is valid")
    }

    /// Random exact-rational measure for randomized verification.
    pub fn random_rational<R: Rng>(n: usize, rng: &mut R) -> Self {
        let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=60)).collect();
        ProbabilityVector::from_integer_weights(&weights).expect("positive weights")
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, v: usize) -> &Scalar {
        &self.entries[v]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(Scalar::is_exact)
    }

    /// μ(U).
    pub fn mass(&self, set: &VertexSet) -> Scalar {
        set.iter()
            .fold(Scalar::zero(), |acc, v| &acc + &self.entries[v])
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.entries.iter().map(Scalar::to_f64).collect()
    }

    /// 2∘μ on the doubling graph: the original u and its copy ũ each carry
    /// μ(u)/2. Index layout matches `MatchingGraph::doubling_graph`.
    pub fn doubled(&self) -> ProbabilityVector {
        let half = Scalar::ratio(1, 2);
        let halved: Vec<Scalar> = self.entries.iter().map(|e| e * &half).collect();
        let mut entries = halved.clone();
        entries.extend(halved);
        ProbabilityVector { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Sign;

    #[test]
    fn validates_positivity_and_sum() {
        assert!(ProbabilityVector::new(vec![]).is_err());
        assert!(matches!(
            ProbabilityVector::new(vec![
                Scalar::ratio(1, 2),
                Scalar::ratio(1, 2),
                Scalar::zero()
            ]),
            Err(MeasureError::NotPositive(2))
        ));
        assert!(matches!(
            ProbabilityVector::new(vec![Scalar::ratio(1, 2), Scalar::ratio(1, 3)]),
            Err(MeasureError::BadSum(_))
        ));
        // Float entries get the tolerance.
        assert!(ProbabilityVector::from_f64s(&[0.1, 0.2, 0.3, 0.4]).is_ok());
        assert!(ProbabilityVector::from_f64s(&[0.1, 0.2, 0.3, 0.5]).is_err());
    }

    #[test]
    fn doubling_examples() {
        // Uniform on 3 classes doubles to uniform on 6.
        let third = ProbabilityVector::uniform(3);
        assert_eq!(third.doubled(), ProbabilityVector::uniform(6));

        let mu = ProbabilityVector::from_integer_weights(&[20, 30, 25, 25]).unwrap();
        let doubled = mu.doubled();
        let expected: Vec<Scalar> = [10, 15, 125, 125, 10, 15, 125, 125]
            .iter()
            .zip([100i64, 100, 1000, 1000, 100, 100, 1000, 1000])
            .map(|(&n, d)| Scalar::ratio(n, d))
            .collect();
        assert_eq!(doubled.entries(), &expected[..]);
    }

    proptest::proptest! {
        /// Doubling halves every entry into an original/copy pair and keeps
        /// total mass one.
        #[test]
        fn doubling_preserves_total_mass(
            weights in proptest::collection::vec(1u64..100, 2..10),
        ) {
            let mu = ProbabilityVector::from_integer_weights(&weights).unwrap();
            let n = mu.dim();
            let doubled = mu.doubled();
            proptest::prop_assert_eq!(doubled.dim(), 2 * n);
            proptest::prop_assert_eq!(Scalar::sum(doubled.entries()), Scalar::from_int(1));
            let half = Scalar::ratio(1, 2);
            for v in 0..n {
                let halved = mu.get(v) * &half;
                proptest::prop_assert_eq!(doubled.get(v), &halved);
                proptest::prop_assert_eq!(doubled.get(n + v), &halved);
            }
        }
    }

    #[test]
    fn mass_of_sets() {
        let mu = ProbabilityVector::from_integer_weights(&[20, 30, 25, 25]).unwrap();
        let set = VertexSet::from_indices([0, 2]);
        assert_eq!(mu.mass(&set), Scalar::ratio(45, 100));
        assert_eq!(mu.mass(&VertexSet::EMPTY).sign(), Sign::Zero);
    }
}
