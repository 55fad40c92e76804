//! Seeded random matrices for the histories fixtures.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resonance_core::histories::{CMatrix, DensityMatrix, Hamiltonian, Projector};
use resonance_core::{Complex64, Result};

/// Deterministic generator of random states, generators and projector families.
pub struct FixtureRng {
    rng: ChaCha8Rng,
}

impl FixtureRng {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn entry(&mut self) -> Complex64 {
        Complex64::new(self.rng.random_range(-1.0..1.0), self.rng.random_range(-1.0..1.0))
    }

    fn square(&mut self, n: usize) -> CMatrix {
        DMatrix::from_fn(n, n, |_, _| self.entry())
    }

    /// `G G^dagger / Tr` with a random complex `G`.
    pub fn density_matrix(&mut self, n: usize) -> Result<DensityMatrix> {
        let g = self.square(n);
        let w = &g * g.adjoint();
        let tr = w.trace().re;
        DensityMatrix::new(w.unscale(tr))
    }

    pub fn hamiltonian(&mut self, n: usize) -> Result<Hamiltonian> {
        let a = self.square(n);
        Hamiltonian::new((&a + a.adjoint()).scale(0.5))
    }

    /// Random unitary from the QR factor of a random matrix.
    pub fn unitary(&mut self, n: usize) -> CMatrix {
        self.square(n).qr().q()
    }

    /// Complete orthogonal family: the columns of a random unitary split into
    /// between 2 and `n` contiguous blocks.
    pub fn family(&mut self, n: usize) -> Result<Vec<Projector>> {
        let u = self.unitary(n);
        let blocks = self.rng.random_range(2..=n);
        let mut cuts: Vec<usize> = (1..n).collect();
        while cuts.len() > blocks - 1 {
            let i = self.rng.random_range(0..cuts.len());
            cuts.remove(i);
        }
        let mut bounds = vec![0];
        bounds.extend(cuts);
        bounds.push(n);
        bounds
            .windows(2)
            .map(|w| {
                let cols: Vec<Vec<Complex64>> = (w[0]..w[1])
                    .map(|j| u.column(j).iter().copied().collect())
                    .collect();
                Projector::span(&cols)
            })
            .collect()
    }
}
