//! Self-contained numerical kernel shared by every analysis module.
//!
//! Accuracy contract:
//!
//! | routine | method | tolerance |
//! |---|---|---|
//! | t / F CDF | regularized incomplete beta, Lentz continued fraction | CF step `1e-15`, ≤ 1e-10 absolute |
//! | chi-square CDF | incomplete gamma series / continued fraction | ≤ 1e-12 absolute |
//! | normal CDF | `erfc` through Q(½, z²) | ≤ 1e-12 absolute |
//! | eigen_symmetric | cyclic Jacobi, off-diagonal norm ≤ `1e-12·‖M‖F`, ≤ 100 sweeps | reconstruction ≤ 1e-10·‖M‖∞ |
//! | solve_spd | Cholesky | residual ≤ 1e-10·‖b‖∞ |
//!
//! Quantiles use the continuous type-7 rule. Variances and covariances use
//! the unbiased `n − 1` divisor throughout.

pub mod dist;
pub mod linalg;
pub mod rng;
pub mod special;
pub mod stats;

pub use dist::{cdf, sf, DistributionSpec};
pub use linalg::{eigen_symmetric, solve_spd, Eigen, Matrix, SymmetricMatrix};
pub use rng::{mvn_sample, RandomSeed, SeededRng};
pub use stats::{covariance, descriptive, pearson, quantiles, SampleStats};
