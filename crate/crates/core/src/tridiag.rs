//! Eigendecomposition of real symmetric tridiagonal matrices.
//!
//! Both the squeeze-operator exponential and the oracle's excitation-number
//! blocks reduce to chains of this form, so one implicit-shift QL solver
//! serves the whole crate.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenpairs of a symmetric tridiagonal matrix, eigenvalues ascending.
/// Column `j` of `vectors` is the normalized eigenvector for `values[j]`.
#[derive(Debug, Clone)]
pub struct TridiagEigen<T> {
    pub values: Vec<T>,
    pub vectors: Array2<T>,
}

impl<T: Real> TridiagEigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Diagonalizes the matrix with main diagonal `diag` and first off-diagonal
/// `off` (`off[i]` couples rows `i` and `i + 1`).
pub fn symmetric_tridiagonal_eigen<T: Real>(diag: &[T], off: &[T]) -> Result<TridiagEigen<T>> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagEigen { values: Vec::new(), vectors: Array2::zeros((0, 0)) });
    }
    if off.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "off-diagonal length {} does not match dimension {n}",
            off.len()
        )));
    }

    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(T::zero());
    let mut z = Array2::<T>::eye(n);
    let two = T::lit(2.0);
    let max_iter = 60;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence);
            }

            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zf = z[[k, i + 1]];
                    let zi = z[[k, i]];
                    z[[k, i + 1]] = s * zi + c * zf;
                    z[[k, i]] = c * zi - s * zf;
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&j| d[j]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&z.column(src));
    }
    Ok(TridiagEigen { values, vectors })
}
