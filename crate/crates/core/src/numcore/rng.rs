//! Seeded random streams.
//!
//! Every stream is a ChaCha20 generator (`rand_chacha::ChaCha20Rng`) keyed
//! from a 64-bit seed with `SeedableRng::seed_from_u64`; uniforms are the
//! generator's 53-bit `f64` draws and normals come from the Box–Muller
//! transform with the second variate cached. The construction uses no
//! platform-dependent arithmetic, so a seed plus a call sequence fixes the
//! output bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{psd_factor, Matrix, SymmetricMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSeed(pub u64);

impl From<u64> for RandomSeed {
    fn from(v: u64) -> Self {
        RandomSeed(v)
    }
}

pub struct SeededRng {
    inner: ChaCha20Rng,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: RandomSeed) -> Self {
        SeededRng { inner: ChaCha20Rng::seed_from_u64(seed.0), spare: None }
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the log finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }
}

/// `n` i.i.d. draws from N(mean, cov) as the rows of an n×p matrix.
pub fn mvn_sample(mean: &[f64], cov: &SymmetricMatrix, n: usize, seed: RandomSeed) -> Result<Matrix> {
    let mut rng = SeededRng::new(seed);
    mvn_sample_with(&mut rng, mean, cov, n)
}

/// As [`mvn_sample`], drawing from an existing stream.
pub fn mvn_sample_with(rng: &mut SeededRng, mean: &[f64], cov: &SymmetricMatrix, n: usize) -> Result<Matrix> {
    let p = mean.len();
    if cov.order() != p {
        return Err(Error::LengthMismatch { expected: p, actual: cov.order() });
    }
    if mean.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("mvn_sample: non-finite mean".into()));
    }
    let factor = psd_factor(cov)?;
    let mut out = Matrix::zeros(n, p);
    let mut z = vec![0.0; p];
    for i in 0..n {
        z.iter_mut().for_each(|v| *v = rng.standard_normal());
        for a in 0..p {
            let mut s = mean[a];
            for (k, zk) in z.iter().enumerate() {
                s += factor[(a, k)] * zk;
            }
            out[(i, a)] = s;
        }
    }
    Ok(out)
}
