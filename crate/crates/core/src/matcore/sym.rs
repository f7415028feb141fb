use super::Mat;
use crate::{Error, Result};

/// Symmetric `dim x dim` matrix stored as its packed lower triangle,
/// row by row: `(s11, s21, s22, s31, s32, s33, ...)`.
///
/// Densification writes each packed entry to both `(i, j)` and `(j, i)`,
/// so the dense form is exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMat {
    dim: usize,
    packed: Vec<f64>,
}

/// Length of the packed lower triangle of a `dim x dim` matrix.
pub const fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

#[inline]
fn slot(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

impl SymMat {
    pub fn new(dim: usize, packed: Vec<f64>) -> Result<Self> {
        if packed.len() != packed_len(dim) {
            return Err(Error::DimensionMismatch(format!(
                "{} packed entries for a symmetric {dim}x{dim} matrix",
                packed.len()
            )));
        }
        if packed.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, packed })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, packed: vec![0.0; packed_len(dim)] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![1.0; dim])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut s = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            s.packed[slot(i, i)] = x;
        }
        s
    }

    /// Symmetric part `(A + Aᵀ) / 2` of a square matrix.
    pub fn from_dense(a: &Mat) -> Self {
        assert!(a.is_square(), "SymMat::from_dense needs a square matrix");
        let dim = a.rows();
        let mut packed = Vec::with_capacity(packed_len(dim));
        for i in 0..dim {
            for j in 0..=i {
                packed.push(if i == j { a[(i, i)] } else { 0.5 * (a[(i, j)] + a[(j, i)]) });
            }
        }
        Self { dim, packed }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[slot(i, j)]
    }

    pub fn to_dense(&self) -> Mat {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn scale(&self, alpha: f64) -> SymMat {
        Self { dim: self.dim, packed: self.packed.iter().map(|x| alpha * x).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.packed.iter().all(|&x| x == 0.0)
    }

    pub fn frob_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let x = self.get(i, j);
                acc += if i == j { x * x } else { 2.0 * x * x };
            }
        }
        acc.sqrt()
    }
}

/// Sweep limit of the cyclic Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `S = V diag(values) Vᵀ`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// Orthogonal matrix whose columns are the eigenvectors.
    pub vectors: Mat,
}

impl SymEig {
    /// `V diag(f(λ)) Vᵀ`, packed directly so the result is exactly symmetric.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> SymMat {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut packed = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            for j in 0..=i {
                packed.push((0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)]).sum());
            }
        }
        SymMat { dim: n, packed }
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Converged once the off-diagonal Frobenius mass is `<= 1e-14 * ‖S‖_F`.
pub fn sym_eig(s: &SymMat) -> Result<SymEig> {
    let n = s.dim();
    let mut a = s.to_dense();
    let mut v = Mat::identity(n);
    let target = 1e-14 * s.frob_norm();
    let off = |a: &Mat| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..i {
                acc += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        acc.sqrt()
    };

    let mut converged = false;
    for _ in 0..=JACOBI_MAX_SWEEPS {
        if off(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymEig { values, vectors })
}

/// Positive-definiteness threshold used for eigenvalue tests.
pub(crate) fn pd_tol(norm: f64) -> f64 {
    1e-14 * norm
}

/// Unique symmetric positive definite square root.
pub fn spd_sqrt(m: &SymMat) -> Result<SymMat> {
    let eig = sym_eig(m)?;
    let min = eig.values.first().copied().unwrap_or(f64::INFINITY);
    if min <= pd_tol(m.frob_norm()) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(eig.apply(f64::sqrt))
}
