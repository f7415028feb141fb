//! A nonsingular square matrix as a product of two symmetric matrices.
//!
//! Every real square `A` is similar to its transpose, so the linear system
//! `Aᵀ Y = Y A` has nonsingular symmetric solutions `Y`. For any such `Y`,
//! `A = Y⁻¹ · (Y A)` where both `Y⁻¹` and `Y A` are symmetric.
//!
//! The solution space is spanned numerically (orthonormal null-space basis
//! of the map `Y ↦ AᵀY − YA` restricted to symmetric `Y`), and `Y` is a
//! seeded random combination of that basis, keeping the best conditioned of
//! several draws.

use rand::Rng;

use crate::matcore::{cond, null_space, packed_len, sym_eig, Lu, Mat, SymEig, SymMat};
use crate::{seeded_rng, Error, Result};

/// Draws per attempt.
pub const DRAWS_PER_ATTEMPT: usize = 32;

/// Accept a draw when `min |λ(Y)| > ACCEPT_RATIO · ‖Y‖_F`.
const ACCEPT_RATIO: f64 = 1e-8;

/// Seed stream used for the second attempt.
const RETRY_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

/// `A = P₁ · P₂` with `P₁`, `P₂` symmetric and nonsingular.
#[derive(Clone, Debug)]
pub struct SymmetricPair {
    pub p1: SymMat,
    pub p2: SymMat,
    /// `P₁⁻¹`, which the algorithm has in hand before `P₁` itself.
    pub p1_inv: SymMat,
    /// `‖YA − (YA)ᵀ‖_F` before `P₂` was symmetrized.
    pub p2_asymmetry: f64,
    /// 2-norm condition number of `P₁` (diagnostic only).
    pub cond_p1: f64,
}

impl SymmetricPair {
    pub fn product(&self) -> Mat {
        &self.p1.to_dense() * &self.p2.to_dense()
    }
}

/// Matrix of `Y ↦ AᵀY − YA` from packed symmetric `Y` to the strictly lower
/// entries of the (skew-symmetric) image.
fn intertwining_operator(a: &Mat) -> Mat {
    let d = a.rows();
    let rows = d * d.saturating_sub(1) / 2;
    let mut k = Mat::zeros(rows, packed_len(d));
    let mut col = 0;
    for p in 0..d {
        for q in 0..=p {
            // basis element: ones at (p, q) and (q, p)
            let mut row = 0;
            for i in 0..d {
                for j in 0..i {
                    let mut v = 0.0;
                    // (AᵀY)_ij = Σ_m A_mi Y_mj
                    if j == q {
                        v += a[(p, i)];
                    }
                    if j == p && p != q {
                        v += a[(q, i)];
                    }
                    // (YA)_ij = Σ_m Y_im A_mj
                    if i == p {
                        v -= a[(q, j)];
                    }
                    if i == q && p != q {
                        v -= a[(p, j)];
                    }
                    k[(row, col)] = v;
                    row += 1;
                }
            }
            col += 1;
        }
    }
    k
}

/// Orthonormal basis (packed coordinates) of the symmetric solutions of
/// `AᵀY = YA`.
pub fn intertwiner_basis(a: &Mat, tol: f64) -> Vec<SymMat> {
    let d = a.rows();
    let basis = null_space(&intertwining_operator(a), tol);
    (0..basis.cols())
        .map(|c| {
            let packed = (0..basis.rows()).map(|r| basis[(r, c)]).collect();
            SymMat::new(d, packed).expect("null-space column has packed length")
        })
        .collect()
}

struct Draw {
    y: SymMat,
    eig: SymEig,
    ratio: f64,
}

fn best_draw(basis: &[SymMat], rng: &mut impl Rng) -> Result<Option<Draw>> {
    let Some(first) = basis.first() else {
        return Ok(None);
    };
    let len = first.packed().len();
    let mut best: Option<Draw> = None;
    for _ in 0..DRAWS_PER_ATTEMPT {
        let mut packed = vec![0.0; len];
        for b in basis {
            let c: f64 = rng.gen_range(-1.0..1.0);
            for (acc, x) in packed.iter_mut().zip(b.packed()) {
                *acc += c * x;
            }
        }
        let y = SymMat::new(first.dim(), packed)?;
        let norm = y.frob_norm();
        let eig = sym_eig(&y)?;
        let min = eig.min_abs();
        if norm == 0.0 || min <= ACCEPT_RATIO * norm {
            continue;
        }
        let ratio = min / norm;
        if best.as_ref().is_none_or(|b| ratio > b.ratio) {
            best = Some(Draw { y, eig, ratio });
        }
    }
    Ok(best)
}

/// Splits a nonsingular `A` into symmetric `P₁`, `P₂` with `P₁ P₂ = A`.
///
/// Exactly symmetric input returns `(A, I)`. Output is a deterministic
/// function of `(A, seed)`.
pub fn two_symmetric_factors(a: &Mat, seed: u64) -> Result<SymmetricPair> {
    let lu = Lu::with_default_tol(a)?;
    let d = a.rows();
    if a.asymmetry() == 0.0 {
        return Ok(SymmetricPair {
            p1: SymMat::from_dense(a),
            p2: SymMat::identity(d),
            p1_inv: SymMat::from_dense(&lu.inverse()),
            p2_asymmetry: 0.0,
            cond_p1: cond(a),
        });
    }

    let k = intertwining_operator(a);
    let mut rng = seeded_rng(seed);
    let mut draw = best_draw(&intertwiner_basis(a, k.default_tol()), &mut rng)?;
    if draw.is_none() {
        // rescale, loosen the null-space threshold, fresh stream
        let scaled = a.scale(1.0 / a.frob_norm());
        let tol = 10.0 * intertwining_operator(&scaled).default_tol();
        let mut rng = seeded_rng(seed ^ RETRY_STREAM);
        draw = best_draw(&intertwiner_basis(&scaled, tol), &mut rng)?;
    }
    let Draw { y, eig, .. } = draw.ok_or(Error::NonsingularSolutionNotFound { draws: 2 * DRAWS_PER_ATTEMPT })?;

    let p1 = eig.apply(|x| 1.0 / x);
    let ya = &y.to_dense() * a;
    Ok(SymmetricPair {
        p1,
        p2: SymMat::from_dense(&ya),
        p2_asymmetry: ya.asymmetry(),
        cond_p1: eig.max_abs() / eig.min_abs(),
        p1_inv: y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Mat {
        Mat::from_rows(rows).unwrap()
    }

    fn residual(pair: &SymmetricPair, a: &Mat) -> f64 {
        (&pair.product() - a).frob_norm()
    }

    #[test]
    fn symmetric_input_is_its_own_first_factor() {
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let pair = two_symmetric_factors(&a, 0).unwrap();
        assert_eq!(pair.p1.to_dense(), a);
        assert_eq!(pair.p2, SymMat::identity(2));

        let pair = two_symmetric_factors(&m(&[&[-3.0]]), 9).unwrap();
        assert_eq!((pair.p1.get(0, 0), pair.p2.get(0, 0)), (-3.0, 1.0));
    }

    #[test]
    fn hand_solved_shear() {
        // AᵀY = YA forces Y = [[0, b], [b, c]]; b = 1, c = 0 gives
        // P₁ = Y⁻¹ = [[0, 1], [1, 0]], P₂ = YA = [[0, 1], [1, 1]]
        let a = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let hand_p1 = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let hand_p2 = m(&[&[0.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(&hand_p1 * &hand_p2, a);

        let basis = intertwiner_basis(&a, 1e-14);
        assert_eq!(basis.len(), 2);
        for y in &basis {
            assert!(y.get(0, 0).abs() < 1e-15);
        }
        let pair = two_symmetric_factors(&a, 1).unwrap();
        assert!(residual(&pair, &a) < 1e-13);
    }

    #[test]
    fn singular_input_is_rejected() {
        let a = m(&[&[1.0, 2.0], &[2.0, 4.0 + 1e-300]]);
        assert!(matches!(two_symmetric_factors(&a, 0), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn derogatory_input_uses_larger_solution_space() {
        // A = diag(2, 2, 3) + nilpotent part in the repeated block is not symmetric
        let a = m(&[&[2.0, 0.0, 1.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0]]);
        let pair = two_symmetric_factors(&a, 4).unwrap();
        assert!(residual(&pair, &a) < 1e-12);
        assert!(intertwiner_basis(&a, 1e-14).len() >= 3);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = m(&[&[1.0, 2.0, 0.5], &[-0.3, 1.0, 0.0], &[0.2, 0.1, -1.0]]);
        let x = two_symmetric_factors(&a, 42).unwrap();
        let y = two_symmetric_factors(&a, 42).unwrap();
        assert_eq!((x.p1, x.p2), (y.p1, y.p2));
    }
}
