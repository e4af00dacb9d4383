//! Fixed problem instances for the criterion benches.

use std::sync::Arc;

use nesta_core::experiment::gen_sparse_signal;
use nesta_core::reference::epsilon0;
use nesta_core::rng::Rng64;
use nesta_core::{LinearMap, ProblemInstance, Regularizer, Result};

/// Noisy sparse recovery with a subsampled DCT, `m = n/8`, `s = m/5`.
pub struct SparseFixture {
    pub a: Arc<LinearMap>,
    pub b: Vec<f64>,
    pub sigma: f64,
}

impl SparseFixture {
    pub fn new(n: usize, dynamic_range_db: f64, seed: u64) -> Result<Self> {
        let m = n / 8;
        let sigma = 0.1;
        let mut rng = Rng64::new(seed);
        let a = Arc::new(LinearMap::subsampled_dct(n, m, rng.next_u64())?);
        let x = gen_sparse_signal(n, m / 5, dynamic_range_db, rng.next_u64())?;
        let mut b = a.apply(&x)?;
        let noise = rng.gaussian_vec(m, sigma);
        b.iter_mut().zip(&noise).for_each(|(v, e)| *v += e);
        Ok(SparseFixture { a, b, sigma })
    }

    pub fn problem(&self) -> Result<ProblemInstance> {
        let eps = epsilon0(self.b.len(), self.sigma);
        ProblemInstance::new(self.a.clone(), self.b.clone(), eps, Regularizer::L1)
    }
}
