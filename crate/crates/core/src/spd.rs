//! Positive definite symplectic matrices as `LᵀL` with a three-factor `L`.
//!
//! For symmetric positive definite symplectic `H = [[P, A], [Aᵀ, ·]]`:
//!
//! ```text
//! S = sqrt(P + P⁻¹ − I),   T = (P − S)(P + P⁻¹)⁻¹,   U = P⁻¹A − I,
//! L = [[I, S], [0, I]] · [[I, 0], [T, I]] · [[I, U], [0, I]],   H = LᵀL.
//! ```
//!
//! `S`, `T`, `P` are all functions of `P`, so they commute and `T` is
//! symmetric in exact arithmetic; the computed asymmetry is still checked.
//! Two factors never suffice for `diag(I/2, 2I)`, see [`counterexample_l2`].

use crate::matcore::{cond, pd_tol, spd_sqrt, sym_eig, Lu, Mat, SymMat};
use crate::symplectic::{default_symp_tol, j_matrix, symplectic_residual, FactorChain, UnitTriFactor};
use crate::{Error, Result};

/// Relative bound on the asymmetry of the computed `T`.
pub const T_ASYMMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdReport {
    pub asymmetry: f64,
    pub min_eigenvalue: f64,
    pub symplectic_residual: f64,
    pub is_spd_symplectic: bool,
}

/// Membership report for symmetric positive definite symplectic matrices.
///
/// `tol` is relative: asymmetry `<= tol · ‖M‖_F`, symplectic residual
/// `<= tol · ‖M‖_F²`, and the smallest eigenvalue of the symmetric part must
/// exceed `1e-14 · ‖M‖_F`.
pub fn spd_report(m: &Mat, tol: f64) -> Result<SpdReport> {
    let symplectic_residual = symplectic_residual(m)?;
    let norm = m.frob_norm();
    let asymmetry = m.asymmetry();
    let min_eigenvalue = sym_eig(&SymMat::from_dense(m))?.values.first().copied().unwrap_or(0.0);
    let is_spd_symplectic =
        asymmetry <= tol * norm && min_eigenvalue > pd_tol(norm) && symplectic_residual <= tol * norm * norm;
    Ok(SpdReport { asymmetry, min_eigenvalue, symplectic_residual, is_spd_symplectic })
}

/// `false` for malformed shapes as well as non-members.
pub fn is_spd_symplectic(m: &Mat, tol: f64) -> bool {
    spd_report(m, tol).is_ok_and(|r| r.is_spd_symplectic)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpdShape {
    /// `L = [[I, S], [0, I]] · [[I, 0], [T, I]] · [[I, U], [0, I]]`
    UpperLowerUpper,
    /// `L = [[I, 0], [S, I]] · [[I, T], [0, I]] · [[I, 0], [U, I]]`,
    /// obtained from the conjugate `JᵀHJ`; needs the lower-right block PD.
    LowerUpperLower,
}

#[derive(Clone, Debug)]
pub struct SpdFactors {
    pub shape: SpdShape,
    pub s: SymMat,
    pub t: SymMat,
    pub u: SymMat,
    /// The positive definite block the factors were computed from.
    pub p: SymMat,
    pub t_asymmetry: f64,
    pub u_asymmetry: f64,
    /// `‖LᵀL − H‖_F`
    pub residual: f64,
}

impl SpdFactors {
    /// The chain `L`.
    pub fn chain(&self) -> FactorChain {
        let d = self.s.dim();
        let (s, t, u) = (self.s.clone(), self.t.clone(), self.u.clone());
        let factors = match self.shape {
            SpdShape::UpperLowerUpper => {
                vec![UnitTriFactor::upper(s), UnitTriFactor::lower(t), UnitTriFactor::upper(u)]
            }
            SpdShape::LowerUpperLower => {
                vec![UnitTriFactor::lower(s), UnitTriFactor::upper(t), UnitTriFactor::lower(u)]
            }
        };
        FactorChain::new(d, factors)
    }

    /// `LᵀL`.
    pub fn reconstruct(&self) -> Mat {
        let l = self.chain().reconstruct();
        &l.transpose() * &l
    }

    /// `‖P − T̃P − PT̃ + T̃(P + P⁻¹)T̃ − I‖_F` with `T̃ = −T`: the quadratic
    /// equation whose solution the middle factor encodes.
    pub fn quadratic_residual(&self) -> Result<f64> {
        let d = self.p.dim();
        let p = self.p.to_dense();
        let w = &p + &Lu::with_default_tol(&p)?.inverse();
        // the mirrored shape stores T already negated
        let sign = match self.shape {
            SpdShape::UpperLowerUpper => -1.0,
            SpdShape::LowerUpperLower => 1.0,
        };
        let t = self.t.to_dense().scale(sign);
        let tp = &t * &p;
        let lhs = &(&(&p + &tp) + &tp.transpose()) + &(&(&t * &w) * &t);
        Ok((&lhs - &Mat::identity(d)).frob_norm())
    }
}

/// Default reconstruction tolerance `1e-9 · cond(P) · ‖H‖_F`.
pub fn spd_tol(h: &Mat) -> f64 {
    let d = h.rows() / 2;
    1e-9 * cond(&h.block(0, 0, d, d)) * h.frob_norm()
}

fn factor_upper(h: &Mat) -> Result<(SymMat, SymMat, SymMat, SymMat, f64, f64)> {
    let d = h.rows() / 2;
    let p = h.block(0, 0, d, d).symmetrized();
    let a = h.block(0, d, d, d);
    let p_lu = Lu::with_default_tol(&p)?;
    let p_inv = p_lu.inverse().symmetrized();
    let w = &p + &p_inv;
    let shifted = SymMat::from_dense(&(&w - &Mat::identity(d)));
    let s = spd_sqrt(&shifted)?;
    let t = Lu::with_default_tol(&w)?.solve_right(&(&p - &s.to_dense()));
    let t_asymmetry = t.asymmetry();
    let t_tol = T_ASYMMETRY_TOL * t.frob_norm();
    if t_asymmetry > t_tol {
        return Err(Error::AsymmetricFactor { asymmetry: t_asymmetry, tol: t_tol });
    }
    let u = &p_lu.solve(&a) - &Mat::identity(d);
    let u_asymmetry = u.asymmetry();
    Ok((s, SymMat::from_dense(&t), SymMat::from_dense(&u), SymMat::from_dense(&p), t_asymmetry, u_asymmetry))
}

/// Factors `H` as `LᵀL` with `L` a three-factor unit triangular chain.
pub fn factor_spd(h: &Mat, shape: SpdShape) -> Result<SpdFactors> {
    let residual = symplectic_residual(h)?;
    let tol = default_symp_tol(h);
    if residual > tol {
        return Err(Error::NotSymplectic { residual, tol });
    }
    let asymmetry = h.asymmetry();
    if asymmetry > 1e-10 * h.frob_norm() {
        return Err(Error::InvalidArgument(format!("input is not symmetric (asymmetry {asymmetry:e})")));
    }
    let d = h.rows() / 2;
    let (s, t, u, p, t_asymmetry, u_asymmetry) = match shape {
        SpdShape::UpperLowerUpper => factor_upper(h)?,
        SpdShape::LowerUpperLower => {
            // J L J ᵀ maps U(X) to L(−X) and L(X) to U(−X)
            let j = j_matrix(d);
            let conj = &(&j.transpose() * h) * &j;
            let (s, t, u, p, ta, ua) = factor_upper(&conj)?;
            (s.scale(-1.0), t.scale(-1.0), u.scale(-1.0), p, ta, ua)
        }
    };
    let mut out = SpdFactors { shape, s, t, u, p, t_asymmetry, u_asymmetry, residual: 0.0 };
    out.residual = (&out.reconstruct() - h).frob_norm();
    Ok(out)
}

/// `diag(I/2, 2I)`: positive definite symplectic, not `LᵀL` for any
/// two-factor `L` (that would need a symmetric `T` with `T² = −I/2`).
pub fn counterexample_l2(d: usize) -> Mat {
    let diag: Vec<f64> = (0..2 * d).map(|i| if i < d { 0.5 } else { 2.0 }).collect();
    Mat::from_diag(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn membership_examples() {
        assert!(is_spd_symplectic(&Mat::identity(2), 1e-10));
        assert!(is_spd_symplectic(&Mat::from_diag(&[2.0, 0.5]), 1e-10));
        assert!(!is_spd_symplectic(&j_matrix(1), 1e-10));
        assert!(!is_spd_symplectic(&Mat::from_diag(&[2.0, 2.0]), 1e-10));
        assert!(!is_spd_symplectic(&Mat::from_diag(&[-1.0, -1.0]), 1e-10));
        assert!(!is_spd_symplectic(&Mat::identity(3), 1e-10));
    }

    #[test]
    fn identity_hand_values() {
        let f = factor_spd(&Mat::identity(2), SpdShape::UpperLowerUpper).unwrap();
        assert_eq!((f.s.get(0, 0), f.t.get(0, 0), f.u.get(0, 0)), (1.0, 0.0, -1.0));
        assert_eq!(f.reconstruct(), Mat::identity(2));
    }

    #[test]
    fn stretch_hand_values() {
        // P = 2, A = 0: S = sqrt(2 + 1/2 − 1), T = (2 − S) / 2.5, U = −1
        let h = Mat::from_diag(&[2.0, 0.5]);
        let f = factor_spd(&h, SpdShape::UpperLowerUpper).unwrap();
        let s = 1.5f64.sqrt();
        assert!((f.s.get(0, 0) - s).abs() < 1e-12);
        assert!((f.t.get(0, 0) - (2.0 - s) / 2.5).abs() < 1e-12);
        assert!((f.t.get(0, 0) - 0.31010).abs() < 1e-5);
        assert_eq!(f.u.get(0, 0), -1.0);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn counterexample_fixture() {
        assert_eq!(counterexample_l2(1), Mat::from_diag(&[0.5, 2.0]));
        assert_eq!(counterexample_l2(2), Mat::from_diag(&[0.5, 0.5, 2.0, 2.0]));
        for d in 1..4 {
            let h = counterexample_l2(d);
            assert!(is_spd_symplectic(&h, 1e-12));
            let f = factor_spd(&h, SpdShape::UpperLowerUpper).unwrap();
            assert_eq!(f.chain().len(), 3);
            assert!(f.residual < 1e-12);
        }
    }

    #[test]
    fn random_reconstruction_and_quadratic_identity() {
        let mut rng = crate::seeded_rng(5);
        for trial in 0..50 {
            let d = [1, 2, 3, 5, 8][trial % 5];
            let h = gen::random_spd_symplectic(&mut rng, d, 1.0).into_inner();
            for shape in [SpdShape::UpperLowerUpper, SpdShape::LowerUpperLower] {
                let f = factor_spd(&h, shape).unwrap();
                assert!(f.residual <= spd_tol(&h), "d={d} {shape:?}");
                let q = f.quadratic_residual().unwrap();
                assert!(q <= 1e-9, "d={d} {shape:?} q={q:e} cond={:e}", cond(&f.p.to_dense()));
                let s = match shape {
                    SpdShape::UpperLowerUpper => f.s.clone(),
                    SpdShape::LowerUpperLower => f.s.scale(-1.0),
                };
                assert!(spd_sqrt(&s).is_ok(), "S must be definite");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            factor_spd(&Mat::from_diag(&[2.0, 2.0]), SpdShape::UpperLowerUpper),
            Err(Error::NotSymplectic { .. })
        ));
        assert!(matches!(factor_spd(&j_matrix(1), SpdShape::UpperLowerUpper), Err(Error::InvalidArgument(_))));
        // symmetric symplectic but negative definite
        assert!(matches!(
            factor_spd(&Mat::from_diag(&[-2.0, -0.5]), SpdShape::UpperLowerUpper),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
