//! Seeded model generation for randomized suites.
//!
//! The generator is ChaCha20 (a counter-based stream cipher generator) keyed
//! with `seed_from_u64(seed)`; independent cases use distinct stream ids via
//! [`Generator::for_case`]. Hermitian matrices are drawn with independent
//! real and imaginary parts uniform on `[-1, 1)` and symmetrized as
//! `(A + A*)/2`. Values replicate exactly within this implementation only.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::decomposition::{Label, LabeledOperator};
use crate::testfn::{Family, TestFunction};
use crate::{HermitianOperator, C64};

pub struct Generator {
    rng: ChaCha20Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Generator for the `case`-th independent case of a suite.
    pub fn for_case(seed: u64, case: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(case);
        Self { rng }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn integer(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    fn unit_complex(&mut self) -> C64 {
        C64::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }

    pub fn hermitian(&mut self, dim: usize) -> HermitianOperator {
        let a = DMatrix::from_fn(dim, dim, |_, _| self.unit_complex());
        let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        HermitianOperator::new(h).expect("symmetrized draw is Hermitian")
    }

    /// Unitary factor of the QR decomposition of a uniform complex draw.
    pub fn unitary(&mut self, dim: usize) -> DMatrix<C64> {
        let a = DMatrix::from_fn(dim, dim, |_, _| self.unit_complex());
        a.qr().q()
    }

    /// Test function of the given family with support centred near the
    /// typical spectrum of a unit-scale draw.
    pub fn test_function(&mut self, family: Family) -> TestFunction {
        let lo = self.uniform(-3.0, -1.0);
        let hi = self.uniform(1.0, 3.0);
        let amplitude = self.uniform(0.5, 2.0);
        match family {
            Family::Plateau { .. } => {
                let width = hi - lo;
                TestFunction::plateau(lo, hi, lo + 0.25 * width, hi - 0.25 * width, amplitude)
                    .expect("ordered plateau")
            }
            f => TestFunction::new(f, lo, hi, amplitude).expect("ordered support"),
        }
    }

    /// Block-labeled operator with one block per `(dim, label)` pair.
    pub fn labeled(&mut self, layout: &[(usize, Label)]) -> LabeledOperator {
        let blocks = layout
            .iter()
            .map(|&(d, label)| (self.hermitian(d), label))
            .collect();
        LabeledOperator::new(blocks).expect("nonempty layout")
    }
}
