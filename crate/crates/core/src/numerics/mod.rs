//! Dense linear algebra, seedable randomness and multivariate-normal sampling.

mod cholesky;
mod lstsq;
mod matrix;
mod mvn;
mod rng;
mod stats;

pub use cholesky::{backward_substitute_transposed, cholesky_factor, forward_substitute};
pub use lstsq::{least_squares_with_rank, solve_least_squares};
pub use matrix::{dot, mean, Matrix};
pub use mvn::{sample_mvn, sample_mvn_with};
pub use rng::RngStream;
pub use stats::{column_stats, mean_sd, ColumnStats};

/// Empirical covariance (divisor `n − 1`) of the columns of `x`.
pub fn sample_covariance(x: &Matrix) -> Matrix {
    let (n, p) = (x.nrows(), x.ncols());
    let means: Vec<f64> = x.columns().map(mean).collect();
    let mut c = Matrix::zeros(p, p);
    let denom = (n.max(2) - 1) as f64;
    for a in 0..p {
        for b in a..p {
            let (ca, cb) = (x.col(a), x.col(b));
            let s: f64 = ca
                .iter()
                .zip(cb)
                .map(|(u, v)| (u - means[a]) * (v - means[b]))
                .sum();
            c[(a, b)] = s / denom;
            c[(b, a)] = s / denom;
        }
    }
    c
}
