use super::Mat;
use crate::{Error, Result};

/// Greedy maximal independent subset of the rows of `a`, in index order.
///
/// A row is kept when its distance to the span of the rows kept so far
/// exceeds `tol`. Indices are zero-based.
pub fn independent_rows(a: &Mat, tol: f64) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut picked = Vec::new();
    for i in 0..a.rows() {
        let mut r = a.row(i).to_vec();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let proj: f64 = q.iter().zip(&r).map(|(x, y)| x * y).sum();
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= proj * qi;
                }
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > tol {
            r.iter_mut().for_each(|x| *x /= norm);
            basis.push(r);
            picked.push(i);
        }
    }
    picked
}

/// `A = P · diag(I_r, 0) · Q` with `P`, `Q` nonsingular.
#[derive(Clone, Debug)]
pub struct RankFactor {
    pub p: Mat,
    pub rank: usize,
    pub q: Mat,
}

impl RankFactor {
    pub fn reconstruct(&self) -> Mat {
        let n = self.p.rows();
        let mut mid = Mat::zeros(n, n);
        for i in 0..self.rank {
            mid[(i, i)] = 1.0;
        }
        &(&self.p * &mid) * &self.q
    }
}

/// Rank-revealing factorization by Gaussian elimination with full pivoting.
///
/// Elimination stops once every remaining entry is `<= tol` in magnitude;
/// the number of completed steps is the numerical rank.
pub fn rank_factor(a: &Mat, tol: f64) -> Result<RankFactor> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "rank_factor needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut w = a.clone();
    let mut rp: Vec<usize> = (0..n).collect();
    let mut cp: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    while rank < n {
        let k = rank;
        let (mut p, mut q, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                let v = w[(i, j)].abs();
                if v > best {
                    (p, q, best) = (i, j, v);
                }
            }
        }
        if best <= tol {
            break;
        }
        if p != k {
            for j in 0..n {
                let t = w[(k, j)];
                w[(k, j)] = w[(p, j)];
                w[(p, j)] = t;
            }
            rp.swap(k, p);
        }
        if q != k {
            for i in 0..n {
                let t = w[(i, k)];
                w[(i, k)] = w[(i, q)];
                w[(i, q)] = t;
            }
            cp.swap(k, q);
        }
        let pivot = w[(k, k)];
        for i in k + 1..n {
            let l = w[(i, k)] / pivot;
            w[(i, k)] = l;
            for j in k + 1..n {
                w[(i, j)] -= l * w[(k, j)];
            }
        }
        rank += 1;
    }

    // Πr A Πc = L [U_top; 0] and [U_top; 0] = diag(I_r, 0) · [[U11, U12], [0, I]]
    let mut p = Mat::zeros(n, n);
    let mut q = Mat::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let l = match k {
                _ if k == i => 1.0,
                _ if k < i && k < rank => w[(i, k)],
                _ => 0.0,
            };
            p[(rp[i], k)] = l;
        }
        for j in 0..n {
            let u = if i < rank {
                if j >= i {
                    w[(i, j)]
                } else {
                    0.0
                }
            } else if j == i {
                1.0
            } else {
                0.0
            };
            q[(i, cp[j])] = u;
        }
    }
    Ok(RankFactor { p, rank, q })
}

/// Orthonormal basis (as columns) of `{x : K x = 0}`.
///
/// Householder QR with column pivoting of `Kᵀ`; columns of `Kᵀ` whose
/// remaining norm is `<= tol` are treated as dependent.
pub fn null_space(k: &Mat, tol: f64) -> Mat {
    let mut a = k.transpose();
    let (n, m) = a.shape();
    let mut reflectors: Vec<Vec<f64>> = Vec::new();
    for j in 0..n.min(m) {
        let (mut q, mut best) = (j, -1.0);
        for c in j..m {
            let norm = (j..n).map(|i| a[(i, c)] * a[(i, c)]).sum::<f64>().sqrt();
            if norm > best {
                (q, best) = (c, norm);
            }
        }
        if best <= tol {
            break;
        }
        if q != j {
            for i in 0..n {
                let t = a[(i, j)];
                a[(i, j)] = a[(i, q)];
                a[(i, q)] = t;
            }
        }
        let alpha = if a[(j, j)] >= 0.0 { -best } else { best };
        let mut v: Vec<f64> = (j..n).map(|i| a[(i, j)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            v.iter_mut().for_each(|x| *x /= vnorm);
        }
        for c in j..m {
            let dot: f64 = v.iter().enumerate().map(|(t, vi)| vi * a[(j + t, c)]).sum();
            for (t, vi) in v.iter().enumerate() {
                a[(j + t, c)] -= 2.0 * dot * vi;
            }
        }
        reflectors.push(v);
    }
    let rank = reflectors.len();
    let mut basis = Mat::zeros(n, n - rank);
    for (col, e) in (rank..n).enumerate() {
        let mut x = vec![0.0; n];
        x[e] = 1.0;
        for (j, v) in reflectors.iter().enumerate().rev() {
            let dot: f64 = v.iter().enumerate().map(|(t, vi)| vi * x[j + t]).sum();
            for (t, vi) in v.iter().enumerate() {
                x[j + t] -= 2.0 * dot * vi;
            }
        }
        for i in 0..n {
            basis[(i, col)] = x[i];
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::min_singular_value;
    use rand::Rng;

    fn m(rows: &[&[f64]]) -> Mat {
        Mat::from_rows(rows).unwrap()
    }

    #[test]
    fn independent_rows_examples() {
        let i2 = Mat::identity(2);
        assert_eq!(independent_rows(&i2, i2.default_tol()), vec![0, 1]);
        let dup = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(independent_rows(&dup, dup.default_tol()), vec![0]);
        let d = Mat::from_diag(&[1.0, 0.0]);
        assert_eq!(independent_rows(&d, d.default_tol()), vec![0]);
        assert!(independent_rows(&Mat::zeros(3, 3), 0.0).is_empty());
    }

    #[test]
    fn independent_rows_is_maximal() {
        let mut rng = crate::seeded_rng(5);
        for trial in 0..50 {
            let n = 2 + trial % 6;
            let r = trial % n;
            let left = Mat::from_fn(n, r, |_, _| rng.gen_range(-1.0..1.0));
            let right = Mat::from_fn(r, n, |_, _| rng.gen_range(-1.0..1.0));
            let a = &left * &right;
            let tol = 1e-9;
            let picked = independent_rows(&a, tol);
            assert_eq!(picked.len(), r);
            let sub = Mat::from_fn(picked.len(), n, |i, j| a[(picked[i], j)]);
            if r > 0 {
                assert!(min_singular_value(&sub) > tol);
            }
            for extra in (0..n).filter(|i| !picked.contains(i)) {
                let mut rows: Vec<usize> = picked.clone();
                rows.push(extra);
                let sub = Mat::from_fn(rows.len(), n, |i, j| a[(rows[i], j)]);
                assert!(min_singular_value(&sub) <= tol);
            }
        }
    }

    #[test]
    fn rank_factor_examples() {
        let i3 = Mat::identity(3);
        let f = rank_factor(&i3, i3.default_tol()).unwrap();
        assert_eq!(f.rank, 3);
        assert!((&f.reconstruct() - &i3).frob_norm() == 0.0);

        let z = Mat::zeros(2, 2);
        let f = rank_factor(&z, 0.0).unwrap();
        assert_eq!(f.rank, 0);
        assert_eq!(f.reconstruct(), z);
        assert!(min_singular_value(&f.p) > 0.5 && min_singular_value(&f.q) > 0.5);

        let ones = m(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let tol = ones.default_tol();
        let f = rank_factor(&ones, tol).unwrap();
        assert_eq!(f.rank, 1);
        assert!((&f.reconstruct() - &ones).frob_norm() <= tol * ones.frob_norm());
    }

    #[test]
    fn rank_factor_random_low_rank() {
        let mut rng = crate::seeded_rng(8);
        for trial in 0..40 {
            let n = 1 + trial % 7;
            let r = trial % (n + 1);
            let left = Mat::from_fn(n, r, |_, _| rng.gen_range(-1.0..1.0));
            let right = Mat::from_fn(r, n, |_, _| rng.gen_range(-1.0..1.0));
            let a = &left * &right;
            let f = rank_factor(&a, 1e-10).unwrap();
            assert_eq!(f.rank, r, "trial {trial}");
            assert!((&f.reconstruct() - &a).frob_norm() <= 1e-10 * (1.0 + a.frob_norm()));
            assert!(min_singular_value(&f.p) > 0.0 && min_singular_value(&f.q) > 0.0);
        }
    }

    #[test]
    fn null_space_is_orthonormal_and_annihilated() {
        let mut rng = crate::seeded_rng(3);
        let k = Mat::from_fn(4, 7, |_, _| rng.gen_range(-1.0..1.0));
        let basis = null_space(&k, 1e-12);
        assert_eq!(basis.cols(), 3);
        assert!((&k * &basis).frob_norm() < 1e-13);
        let gram = &basis.transpose() * &basis;
        assert!((&gram - &Mat::identity(3)).frob_norm() < 1e-13);

        let empty = Mat::zeros(0, 3);
        assert_eq!(null_space(&empty, 0.0), Mat::identity(3));
    }
}
