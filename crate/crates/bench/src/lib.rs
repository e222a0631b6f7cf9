//! Fixtures shared by the benchmarks.

use fastslow_core::poisson::random_homogeneous;
use fastslow_core::{FrequencyVector, FullState, GradedPolynomial, PoissonAlgebra, PotentialTerm, QuadSurd, SlowHamiltonian};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn sqrt2() -> Vec<QuadSurd> {
    vec![QuadSurd::one(), QuadSurd::sqrt_of(2)]
}

pub fn algebra() -> PoissonAlgebra {
    PoissonAlgebra::new(sqrt2(), 1)
}

/// A pair of random homogeneous polynomials of the given orders.
pub fn polynomial_pair(o1: u32, o2: u32, terms: usize) -> (GradedPolynomial, GradedPolynomial) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (
        random_homogeneous(&mut rng, 2, 1, o1, terms, Some(2)),
        random_homogeneous(&mut rng, 2, 1, o2, terms, Some(2)),
    )
}

/// `Q^2/2 + Q^2 (q_1 + q_2)/2`.
pub fn cubic() -> SlowHamiltonian {
    let half = BigRational::new(1.into(), 2.into());
    let term = |fast: Vec<u32>| PotentialTerm {
        coeff: half.clone(),
        slow_exp: vec![2],
        fast_exp: fast,
    };
    SlowHamiltonian::new(2, 1, vec![term(vec![0, 0]), term(vec![1, 0]), term(vec![0, 1])]).expect("valid system")
}

pub fn frequencies(epsilon: f64) -> FrequencyVector {
    FrequencyVector::from_ratios(sqrt2(), epsilon).expect("valid ratios")
}

pub fn state() -> FullState {
    FullState {
        p: vec![0.6, -0.4],
        q: vec![0.005, 0.003],
        slow_p: vec![0.3],
        slow_q: vec![-0.5],
        t: 0.0,
    }
}
