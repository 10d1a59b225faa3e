use rand::Rng;
use rand_distr::StandardNormal;

use super::cholesky::cholesky_factor;
use super::matrix::Matrix;
use super::rng::RngStream;
use crate::error::{arg, Result};

/// `n` iid rows from `N(mu, s)`, drawn as `mu + L z`.
pub fn sample_mvn(mu: &[f64], s: &Matrix, n: usize, rng: &RngStream) -> Result<Matrix> {
    sample_mvn_with(mu, s, n, &mut rng.generator())
}

/// Same as [`sample_mvn`] but continues an existing generator. Row `i`
/// consumes `p` standard normals in column order.
pub fn sample_mvn_with<R: Rng + ?Sized>(
    mu: &[f64],
    s: &Matrix,
    n: usize,
    rng: &mut R,
) -> Result<Matrix> {
    let p = mu.len();
    if s.nrows() != p || s.ncols() != p {
        return arg(format!(
            "covariance is {}x{} but mean has length {p}",
            s.nrows(),
            s.ncols()
        ));
    }
    let l = cholesky_factor(s)?;
    let mut out = Matrix::zeros(n, p);
    let mut z = vec![0.0; p];
    for i in 0..n {
        for zk in z.iter_mut() {
            *zk = rng.sample(StandardNormal);
        }
        for j in 0..p {
            let mut v = mu[j];
            for k in 0..=j {
                v += l[(j, k)] * z[k];
            }
            out[(i, j)] = v;
        }
    }
    Ok(out)
}
