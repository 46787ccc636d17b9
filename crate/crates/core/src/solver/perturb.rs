//! A general coarse solver with a prescribed accuracy, for testing the epsilon bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{add_vec, scale_vec, DenseMatrix, SpsdOperator};
use crate::solver::sweep::{seminorm, CoarseSolve};

/// Direction of the injected coarse error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbDirection {
    /// Uniform random direction projected onto `R(A_c)`.
    Random,
    /// Along `+e_c`, giving `(1 + eps) e_c`.
    Along,
    /// Along `-e_c`, giving `(1 - eps) e_c`.
    Against,
}

/// Returns `e_c + d` with `d ∈ R(A_c)` and `||d||_{A_c} = eps ||e_c||_{A_c}` exactly.
pub struct EpsilonPerturbedSolver {
    ac: SpsdOperator,
    range_projector: DenseMatrix,
    eps: f64,
    direction: PerturbDirection,
    rng: ChaCha8Rng,
}

impl EpsilonPerturbedSolver {
    pub fn new(ac: &SpsdOperator, eps: f64, direction: PerturbDirection, seed: u64) -> Self {
        Self {
            ac: ac.clone(),
            range_projector: ac.range_projector(),
            eps,
            direction,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl CoarseSolve for EpsilonPerturbedSolver {
    fn solve(&mut self, r_c: &[f64]) -> Vec<f64> {
        let e_c = self.ac.pinv().matvec(r_c);
        let target = self.eps * seminorm(&self.ac, &e_c);
        let d = match self.direction {
            PerturbDirection::Random => {
                let raw: Vec<f64> = (0..e_c.len())
                    .map(|_| self.rng.random_range(-1.0..1.0))
                    .collect();
                self.range_projector.matvec(&raw)
            }
            PerturbDirection::Along => e_c.clone(),
            PerturbDirection::Against => scale_vec(&e_c, -1.0),
        };
        let size = seminorm(&self.ac, &d);
        if size == 0.0 || target == 0.0 {
            return e_c;
        }
        add_vec(&e_c, &scale_vec(&d, target / size))
    }
}
