//! Seeded random fixtures.
//!
//! All randomness flows through ChaCha20 seeded from a single `u64`
//! (`rand_chacha::ChaCha20Rng::seed_from_u64`), so a seed pins every fixture
//! on every platform. Complex entries are `a + ib` with `a, b` standard normal.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::context::{PhasePoint, QhaContext};
use crate::operators::{MixedState, OperatorMatrix, Signal};
use crate::phase_space::{Domain, PhaseFn};

pub struct Fixtures {
    ctx: QhaContext,
    rng: ChaCha20Rng,
}

impl Fixtures {
    pub fn new(ctx: &QhaContext, seed: u64) -> Self {
        Self { ctx: *ctx, rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    pub fn complex(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im)
    }

    pub fn signal(&mut self) -> Signal {
        let values = (0..self.ctx.n()).map(|_| self.complex()).collect();
        Signal::new(&self.ctx, values).expect("length matches context")
    }

    pub fn unit_signal(&mut self) -> Signal {
        self.signal().normalized()
    }

    pub fn operator(&mut self) -> OperatorMatrix {
        let n = self.ctx.n();
        let values: Vec<_> = (0..n * n).map(|_| self.complex()).collect();
        OperatorMatrix::from_row_major(&self.ctx, &values).expect("shape matches context")
    }

    pub fn hermitian(&mut self) -> OperatorMatrix {
        self.operator().hermitian_part()
    }

    /// `X X*` with `X` of size `N × rank`.
    pub fn positive(&mut self, rank: usize) -> OperatorMatrix {
        let n = self.ctx.n();
        let rank = rank.clamp(1, n);
        let x = DMatrix::from_fn(n, rank, |_, _| self.complex());
        let m = &x * x.adjoint();
        OperatorMatrix::from_matrix(&self.ctx, m).expect("shape matches context").hermitian_part()
    }

    pub fn mixed_state(&mut self, rank: usize) -> MixedState {
        let p = self.positive(rank);
        let tr = p.trace().re;
        let op = p.scale(Complex64::new(1.0 / tr, 0.0));
        // the trace of the rescaled matrix can miss 1 by an ulp or two
        let op = OperatorMatrix::from_fn(op.ctx(), |i, j| {
            if i == j {
                Complex64::new(op.get(i, j).re, 0.0)
            } else {
                op.get(i, j)
            }
        });
        MixedState::new(op).expect("normalized positive operator is a mixed state")
    }

    pub fn phase_fn(&mut self) -> PhaseFn {
        let n = self.ctx.n();
        let values = (0..n * n).map(|_| self.complex()).collect();
        PhaseFn::from_values(&self.ctx, values).expect("shape matches context")
    }

    /// Real values uniform in `[-1, 1]`.
    pub fn real_mask(&mut self) -> PhaseFn {
        let n = self.ctx.n();
        let values = (0..n * n).map(|_| Complex64::new(self.rng.random_range(-1.0..=1.0), 0.0)).collect();
        PhaseFn::from_values(&self.ctx, values).expect("shape matches context")
    }

    /// Real values uniform in `[0, 1]`.
    pub fn nonnegative_fn(&mut self) -> PhaseFn {
        let n = self.ctx.n();
        let values = (0..n * n).map(|_| Complex64::new(self.rng.random_range(0.0..=1.0), 0.0)).collect();
        PhaseFn::from_values(&self.ctx, values).expect("shape matches context")
    }

    /// Each point included independently with probability `density`.
    pub fn domain_with_density(&mut self, density: f64) -> Domain {
        let ctx = self.ctx;
        Domain::from_fn(&ctx, |_| self.rng.random_bool(density.clamp(0.0, 1.0)))
    }

    pub fn domain(&mut self) -> Domain {
        self.domain_with_density(0.5)
    }

    pub fn point(&mut self) -> PhasePoint {
        let n = self.ctx.n();
        PhasePoint { k: self.rng.random_range(0..n), l: self.rng.random_range(0..n) }
    }

    pub fn points(&mut self, count: usize) -> Vec<PhasePoint> {
        (0..count).map(|_| self.point()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_pin_fixtures() {
        let ctx = QhaContext::new(6).unwrap();
        let a = Fixtures::new(&ctx, 42).mixed_state(3);
        let b = Fixtures::new(&ctx, 42).mixed_state(3);
        assert_eq!(a, b);
        let c = Fixtures::new(&ctx, 43).mixed_state(3);
        assert_ne!(a, c);
    }

    #[test]
    fn mixed_states_have_requested_rank() {
        let ctx = QhaContext::new(7).unwrap();
        let s = Fixtures::new(&ctx, 1).mixed_state(3);
        let sv = s.op().singular_values();
        assert!(sv[2] > 1e-6 && sv[3] < 1e-12);
        assert!((s.op().trace().re - 1.0).abs() < 1e-14);
    }
}
