//! Least squares through Householder QR with column pivoting.
//!
//! Rank-deficient systems are finished with a complete orthogonal
//! decomposition, so the returned vector is the minimum-norm minimizer.

use super::matrix::Matrix;
use crate::error::{arg, Result};

/// Applies `I - beta v vᵀ` to `x` in place.
#[inline]
fn reflect(v: &[f64], beta: f64, x: &mut [f64]) {
    if beta == 0.0 {
        return;
    }
    let s: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() * beta;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}

/// Overwrites `x` with a Householder vector and returns `(beta, alpha)` where
/// the reflector maps the original `x` onto `alpha * e1`.
fn householder(x: &mut [f64]) -> (f64, f64) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    x[0] -= alpha;
    let vtv: f64 = x.iter().map(|v| v * v).sum();
    if vtv == 0.0 {
        return (0.0, alpha);
    }
    (2.0 / vtv, alpha)
}

/// Minimum-norm minimizer of `‖y − Xβ‖²`.
pub fn solve_least_squares(x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    least_squares_with_rank(x, y).map(|(b, _)| b)
}

/// [`solve_least_squares`] plus the numerical rank found by the pivoted QR.
pub fn least_squares_with_rank(x: &Matrix, y: &[f64]) -> Result<(Vec<f64>, usize)> {
    let (n, p) = (x.nrows(), x.ncols());
    if n == 0 || p == 0 {
        return arg("least squares needs at least one row and one column");
    }
    if y.len() != n {
        return arg(format!("response has {} values but design has {n} rows", y.len()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return arg("response contains non-finite values");
    }

    let mut a = x.as_slice().to_vec();
    let mut b = y.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let kmax = n.min(p);
    let mut rank = 0;
    let mut tol = 0.0;

    for k in 0..kmax {
        let (mut best, mut best_norm) = (k, -1.0);
        for j in k..p {
            let c = &a[j * n + k..(j + 1) * n];
            let nrm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nrm > best_norm {
                best = j;
                best_norm = nrm;
            }
        }
        if k == 0 {
            tol = (n.max(p) as f64) * f64::EPSILON * best_norm;
        }
        if best_norm <= tol || best_norm == 0.0 {
            break;
        }
        if best != k {
            for i in 0..n {
                a.swap(k * n + i, best * n + i);
            }
            perm.swap(k, best);
        }
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let v = &mut head[k * n + k..(k + 1) * n];
        let (beta, alpha) = householder(v);
        for j in 0..p - k - 1 {
            reflect(v, beta, &mut tail[j * n + k..(j + 1) * n]);
        }
        reflect(v, beta, &mut b[k..]);
        // Keep R_kk in place of the reflector head; the reflector is no
        // longer needed once b and the trailing columns are updated.
        v[0] = alpha;
        for e in v[1..].iter_mut() {
            *e = 0.0;
        }
        rank += 1;
    }

    let mut beta_out = vec![0.0; p];
    if rank == 0 {
        return Ok((beta_out, 0));
    }
    let r = |i: usize, j: usize| a[j * n + i];
    let c = &b[..rank];

    let z = if rank == p {
        let mut z = vec![0.0; p];
        for i in (0..p).rev() {
            let s: f64 = (i + 1..p).map(|j| r(i, j) * z[j]).sum();
            z[i] = (c[i] - s) / r(i, i);
        }
        z
    } else {
        // [R11 R12]ᵀ = Q2 R2, then z = Q2 [R2⁻ᵀ c; 0].
        let mut m = vec![0.0; p * rank];
        for i in 0..rank {
            for j in i..p {
                m[i * p + j] = r(i, j);
            }
        }
        let mut reflectors = Vec::with_capacity(rank);
        for k in 0..rank {
            let (head, tail) = m.split_at_mut((k + 1) * p);
            let v = &mut head[k * p + k..(k + 1) * p];
            let (beta, alpha) = householder(v);
            for j in 0..rank - k - 1 {
                reflect(v, beta, &mut tail[j * p + k..(j + 1) * p]);
            }
            reflectors.push((v.to_vec(), beta, alpha));
        }
        // R2[i][j] for i < j sits at m[j * p + i]; the diagonal is alpha.
        let mut w = vec![0.0; rank];
        for i in 0..rank {
            let s: f64 = (0..i).map(|l| m[i * p + l] * w[l]).sum();
            w[i] = (c[i] - s) / reflectors[i].2;
        }
        let mut z = vec![0.0; p];
        z[..rank].copy_from_slice(&w);
        for (k, (v, beta, _)) in reflectors.iter().enumerate().rev() {
            reflect(v, *beta, &mut z[k..]);
        }
        z
    };

    for (k, &j) in perm.iter().enumerate() {
        beta_out[j] = z[k];
    }
    Ok((beta_out, rank))
}
