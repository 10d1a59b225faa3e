use super::matrix::Matrix;
use crate::error::{arg, Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const PIVOT_FLOOR: f64 = 1e-12;

/// Lower-triangular `L` with `L·Lᵀ = S`.
pub fn cholesky_factor(s: &Matrix) -> Result<Matrix> {
    let p = s.nrows();
    if s.ncols() != p {
        return arg(format!("cholesky needs a square matrix, got {}x{}", p, s.ncols()));
    }
    let asym = s.asymmetry();
    if asym > SYMMETRY_TOL {
        return arg(format!("matrix is not symmetric (max asymmetry {asym:e})"));
    }
    let mut l = Matrix::zeros(p, p);
    for j in 0..p {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > PIVOT_FLOOR) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..p {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / djj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn forward_substitute(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let p = l.nrows();
    let mut x = vec![0.0; p];
    for i in 0..p {
        let mut v = b[i];
        for k in 0..i {
            v -= l[(i, k)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    x
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub fn backward_substitute_transposed(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let p = l.nrows();
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut v = b[i];
        for k in i + 1..p {
            v -= l[(k, i)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(cholesky_factor(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
        let s = Matrix::from_rows(&[[4.0, 0.0], [0.0, 9.0]]).unwrap();
        let l = cholesky_factor(&s).unwrap();
        assert_eq!(l, Matrix::from_rows(&[[2.0, 0.0], [0.0, 3.0]]).unwrap());
    }

    #[test]
    fn two_by_two_reconstructs() {
        let s = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let l = cholesky_factor(&s).unwrap();
        // Reference values from L·Lᵀ = S solved by hand: sqrt 2, 1/sqrt 2, sqrt(3/2).
        let expect = Matrix::from_rows(&[[2f64.sqrt(), 0.0], [0.5f64.sqrt(), 1.5f64.sqrt()]]).unwrap();
        assert!(close(&l, &expect, 1e-12));
        let back = l.matmul(&l.transpose()).unwrap();
        assert!(close(&back, &s, 1e-10));
    }

    #[test]
    fn indefinite_reports_pivot() {
        let s = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        match cholesky_factor(&s) {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn asymmetric_rejected() {
        let s = Matrix::from_rows(&[[1.0, 0.5], [0.4, 1.0]]).unwrap();
        assert!(matches!(cholesky_factor(&s), Err(Error::Argument(_))));
    }

    #[test]
    fn triangular_solves() {
        let s = Matrix::from_rows(&[[4.0, 2.0], [2.0, 3.0]]).unwrap();
        let l = cholesky_factor(&s).unwrap();
        let y = forward_substitute(&l, &[2.0, 1.0]);
        let x = backward_substitute_transposed(&l, &y);
        let back = s.matvec(&x).unwrap();
        assert!((back[0] - 2.0).abs() < 1e-12 && (back[1] - 1.0).abs() < 1e-12);
    }
}
