//! Symmetric sparse matrices and preconditioned conjugate gradients.

use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};

/// Square matrix in compressed sparse row form with sorted column indices.
/// Both triangles are stored.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl CsrMatrix {
    pub fn mul_vec(&self, policy: ExecPolicy, x: &[f64], out: &mut [f64]) {
        exec::fill(policy, out, |i| {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            acc
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.col[k] == i)
                    .map_or(0.0, |k| self.val[k])
            })
            .collect()
    }
}

/// Zero-fill incomplete Cholesky factor `L` (lower triangle, diagonal last in each row).
#[derive(Clone, Debug)]
pub struct IncompleteCholesky {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
    /// Relative diagonal shift that made the factorization succeed.
    pub shift: f64,
}

impl IncompleteCholesky {
    /// Factors `A + shift·diag(A)`, raising the shift until every pivot is positive.
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let mut shift = 0.0;
        for _ in 0..12 {
            if let Some(f) = Self::try_factor(a, shift) {
                return Ok(f);
            }
            shift = if shift == 0.0 { 1e-3 } else { shift * 4.0 };
        }
        Err(Error::Constraint("incomplete Cholesky broke down for every diagonal shift".into()))
    }

    fn try_factor(a: &CsrMatrix, shift: f64) -> Option<Self> {
        let n = a.n;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col[k];
                if j <= i {
                    col.push(j);
                    val.push(if j == i { a.val[k] * (1.0 + shift) } else { a.val[k] });
                }
            }
            if col.last() != Some(&i) {
                return None;
            }
            row_ptr.push(col.len());
        }
        // Row-oriented IC(0): L_ij = (A_ij - Σ_{k<j} L_ik L_jk) / L_jj on the pattern of A.
        for i in 0..n {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            for p in lo..hi - 1 {
                let j = col[p];
                let (jlo, jhi) = (row_ptr[j], row_ptr[j + 1]);
                let mut s = val[p];
                let (mut a_k, mut b_k) = (lo, jlo);
                while a_k < p && b_k < jhi - 1 {
                    match col[a_k].cmp(&col[b_k]) {
                        std::cmp::Ordering::Less => a_k += 1,
                        std::cmp::Ordering::Greater => b_k += 1,
                        std::cmp::Ordering::Equal => {
                            s -= val[a_k] * val[b_k];
                            a_k += 1;
                            b_k += 1;
                        }
                    }
                }
                val[p] = s / val[jhi - 1];
            }
            let mut d = val[hi - 1];
            for p in lo..hi - 1 {
                d -= val[p] * val[p];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            val[hi - 1] = d.sqrt();
        }
        Some(IncompleteCholesky {
            n,
            row_ptr,
            col,
            val,
            shift,
        })
    }

    /// Solves `L Lᵀ z = r`.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        for i in 0..self.n {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut s = r[i];
            for p in lo..hi - 1 {
                s -= self.val[p] * z[self.col[p]];
            }
            z[i] = s / self.val[hi - 1];
        }
        for i in (0..self.n).rev() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            z[i] /= self.val[hi - 1];
            let zi = z[i];
            for p in lo..hi - 1 {
                z[self.col[p]] -= self.val[p] * zi;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOptions {
    /// Relative residual target `‖b - Ax‖ / ‖b‖`.
    pub tol: f64,
    /// Iteration cap; `None` means `50·√n`.
    pub max_iter: Option<usize>,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

impl CgOptions {
    pub fn cap(&self, n: usize) -> usize {
        self.max_iter
            .unwrap_or_else(|| (50.0 * (n as f64).sqrt()).ceil() as usize)
            .max(1)
    }
}

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual of the returned iterate.
    pub residual: f64,
}

fn dot(policy: ExecPolicy, a: &[f64], b: &[f64]) -> f64 {
    exec::sum(policy, a.len(), |i| a[i] * b[i])
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
pub fn cg(policy: ExecPolicy, a: &CsrMatrix, b: &[f64], opts: &CgOptions) -> Result<CgOutcome> {
    let n = a.n;
    let bnorm = dot(policy, b, b).sqrt();
    if n == 0 || bnorm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let pre = IncompleteCholesky::new(a)?;
    let cap = opts.cap(n);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    pre.apply(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(policy, &r, &z);
    let mut it = 0;
    let mut rel = 1.0;
    while it < cap {
        a.mul_vec(policy, &p, &mut ap);
        let pap = dot(policy, &p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Constraint("matrix is not positive definite".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        it += 1;
        rel = dot(policy, &r, &r).sqrt() / bnorm;
        if rel <= opts.tol {
            // recompute from scratch before accepting
            a.mul_vec(policy, &x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            rel = dot(policy, &r, &r).sqrt() / bnorm;
            if rel <= opts.tol {
                return Ok(CgOutcome {
                    x,
                    iterations: it,
                    residual: rel,
                });
            }
        }
        pre.apply(&r, &mut z);
        let rz_new = dot(policy, &r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence {
        iterations: it,
        residual: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> CsrMatrix {
        let mut row_ptr = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        for i in 0..n {
            if i > 0 {
                col.push(i - 1);
                val.push(-1.0);
            }
            col.push(i);
            val.push(2.0);
            if i + 1 < n {
                col.push(i + 1);
                val.push(-1.0);
            }
            row_ptr.push(col.len());
        }
        CsrMatrix { n, row_ptr, col, val }
    }

    #[test]
    fn tridiagonal_ic0_is_exact() {
        let a = path_laplacian(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).cos()).collect();
        let out = cg(ExecPolicy::Sequential, &a, &b, &CgOptions::default()).unwrap();
        assert!(out.iterations <= 2, "{}", out.iterations);
        assert!(out.residual <= 1e-10);
    }

    #[test]
    fn solves_against_dense_reference() {
        let a = path_laplacian(30);
        let b: Vec<f64> = (0..30).map(|i| 1.0 + i as f64).collect();
        let out = cg(ExecPolicy::Parallel, &a, &b, &CgOptions::default()).unwrap();
        let mut dense = nalgebra::DMatrix::zeros(30, 30);
        for i in 0..30 {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                dense[(i, a.col[k])] = a.val[k];
            }
        }
        let exact = dense.lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
        for i in 0..30 {
            assert!((out.x[i] - exact[i]).abs() < 1e-8 * exact.amax());
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let a = path_laplacian(400);
        let b = vec![1.0; 400];
        let opts = CgOptions {
            tol: 1e-30,
            max_iter: Some(3),
        };
        match cg(ExecPolicy::Sequential, &a, &b, &opts) {
            Err(Error::NonConvergence { iterations: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = path_laplacian(5);
        let out = cg(ExecPolicy::Sequential, &a, &[0.0; 5], &CgOptions::default()).unwrap();
        assert_eq!(out.x, vec![0.0; 5]);
    }
}
