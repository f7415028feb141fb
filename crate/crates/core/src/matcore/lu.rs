use super::Mat;
use crate::{Error, Result};

/// LU factorization with partial (row) pivoting, `Π A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Factors a square matrix; fails when a pivot magnitude is `<= pivot_tol`.
    pub fn new(a: &Mat, pivot_tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= pivot_tol {
                return Err(Error::SingularMatrix { pivot, tol: pivot_tol });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let diag = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / diag;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= factor * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    /// Factors with the operand's default tolerance.
    pub fn with_default_tol(a: &Mat) -> Result<Self> {
        Self::new(a, a.default_tol())
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &Mat) -> Mat {
        let n = self.dim();
        assert_eq!(b.rows(), n, "rhs row count must match the factored matrix");
        let m = b.cols();
        let mut x = Mat::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        x
    }

    /// Solves `X A = B`, i.e. `Aᵀ Xᵀ = Bᵀ`.
    pub fn solve_right(&self, b: &Mat) -> Mat {
        let n = self.dim();
        assert_eq!(b.cols(), n, "rhs column count must match the factored matrix");
        // Aᵀ = Uᵀ Lᵀ Π, so Xᵀ = Πᵀ L⁻ᵀ U⁻ᵀ Bᵀ
        let m = b.rows();
        let mut y = b.transpose();
        for j in 0..m {
            for i in 0..n {
                let mut s = y[(i, j)];
                for k in 0..i {
                    s -= self.lu[(k, i)] * y[(k, j)];
                }
                y[(i, j)] = s / self.lu[(i, i)];
            }
            for i in (0..n).rev() {
                let mut s = y[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(k, i)] * y[(k, j)];
                }
                y[(i, j)] = s;
            }
        }
        let mut xt = Mat::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                xt[(self.perm[i], j)] = y[(i, j)];
            }
        }
        xt.transpose()
    }

    pub fn det(&self) -> f64 {
        (0..self.dim()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    pub fn inverse(&self) -> Mat {
        self.solve(&Mat::identity(self.dim()))
    }
}

/// Solves `A X = B` with partial pivoting and the default pivot tolerance.
pub fn lu_solve(a: &Mat, b: &Mat) -> Result<Mat> {
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!("rhs has {} rows, matrix has {}", b.rows(), a.rows())));
    }
    Ok(Lu::with_default_tol(a)?.solve(b))
}

pub fn inverse(a: &Mat) -> Result<Mat> {
    Ok(Lu::with_default_tol(a)?.inverse())
}

/// Determinant; exactly singular input gives 0.
pub fn det(a: &Mat) -> f64 {
    assert!(a.is_square(), "det of a non-square matrix");
    match Lu::new(a, 0.0) {
        Ok(lu) => lu.det(),
        Err(_) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        (a - b).frob_norm() <= tol
    }

    #[test]
    fn identity_solve() {
        let i2 = Mat::identity(2);
        assert_eq!(lu_solve(&i2, &i2).unwrap(), i2);
    }

    #[test]
    fn diagonal_solve() {
        let a = Mat::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let b = Mat::from_rows(&[[1.0], [1.0]]).unwrap();
        let x = lu_solve(&a, &b).unwrap();
        assert_eq!(x, Mat::from_rows(&[[0.5], [0.25]]).unwrap());
    }

    #[test]
    fn upper_shear_solve_multiplies_back() {
        let a = Mat::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let b = Mat::from_rows(&[[2.0], [1.0]]).unwrap();
        let x = lu_solve(&a, &b).unwrap();
        assert!(close(&x, &Mat::from_rows(&[[1.0], [1.0]]).unwrap(), 1e-15));
        assert!(close(&(&a * &x), &b, 1e-15));
    }

    #[test]
    fn singular_is_reported() {
        let a = Mat::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(lu_solve(&a, &Mat::identity(2)), Err(Error::SingularMatrix { .. })));
        assert!(matches!(inverse(&Mat::zeros(2, 2)), Err(Error::SingularMatrix { .. })));
        assert_eq!(det(&a), 0.0);
    }

    #[test]
    fn determinant_values() {
        let j = Mat::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert!((det(&j) - 1.0).abs() < 1e-15);
        let p = Mat::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 3.0]]).unwrap();
        assert!((det(&p) + 3.0).abs() < 1e-15);
    }

    #[test]
    fn random_self_solve_and_right_solve() {
        let mut rng = crate::seeded_rng(11);
        for n in 1..=16 {
            let a = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let lu = Lu::with_default_tol(&a).unwrap();
            let kappa = super::super::cond(&a);
            let x = lu.solve(&a);
            assert!(close(&x, &Mat::identity(n), 1e-10 * kappa), "n={n}");
            let b = Mat::from_fn(3, n, |_, _| rng.gen_range(-1.0..1.0));
            let y = lu.solve_right(&b);
            assert!(close(&(&y * &a), &b, 1e-10 * kappa), "n={n}");
        }
    }
}
