//! Singular symplectic matrices, i.e. symplectic `H` with `det(H − I) = 0`.
//!
//! Generator: `H = Q · F₆F₅F₄F₃F₂F₁ · Q⁻¹` where odd factors are upper
//! `[[I, Sₖ], [0, I]]` with `Sₖ` symmetric `d x d`, even factors are lower
//! `[[I, 0], [diag(0, Sₖ), I]]` with `Sₖ` symmetric `(d−1) x (d−1)`, and `Q`
//! is any symplectic matrix. Every inner factor fixes `e₁`, hence `H − I`
//! is singular.

use rand::Rng;

use crate::gen::{random_chain, random_sym};
use crate::matcore::{min_singular_value, Mat, SymMat};
use crate::symplectic::{symplectic_residual, FactorChain, SympMat, UnitTriFactor};
use crate::{Error, Result};

/// The conjugating symplectic matrix `Q`.
#[derive(Clone, Debug)]
pub enum Conjugator {
    Chain(FactorChain),
    Matrix(SympMat),
}

impl Conjugator {
    fn to_sympmat(&self) -> SympMat {
        match self {
            Conjugator::Chain(c) => c.to_sympmat(),
            Conjugator::Matrix(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SingularSpec {
    pub d: usize,
    /// `S₁, S₃, S₅`, each `d x d`.
    pub s_odd: [SymMat; 3],
    /// `S₂, S₄, S₆`, each `(d−1) x (d−1)`.
    pub s_even: [SymMat; 3],
    pub q: Conjugator,
}

impl SingularSpec {
    pub fn new(s_odd: [SymMat; 3], s_even: [SymMat; 3], q: Conjugator) -> Result<Self> {
        let d = s_odd[0].dim();
        if d == 0 {
            return Err(Error::InvalidArgument("d must be at least 1".into()));
        }
        if s_odd.iter().any(|s| s.dim() != d) || s_even.iter().any(|s| s.dim() != d - 1) {
            return Err(Error::DimensionMismatch(format!(
                "odd parameters must be {d}x{d} and even ones {0}x{0}",
                d - 1
            )));
        }
        let qd = match &q {
            Conjugator::Chain(c) => c.d,
            Conjugator::Matrix(m) => m.d(),
        };
        if qd != d {
            return Err(Error::DimensionMismatch(format!("conjugator has d = {qd}, expected {d}")));
        }
        Ok(Self { d, s_odd, s_even, q })
    }

    /// Inner factors `F₆, …, F₁` in display order.
    pub fn inner_factors(&self) -> Vec<UnitTriFactor> {
        let mut out = Vec::with_capacity(6);
        for k in (0..3).rev() {
            out.push(UnitTriFactor::lower(embed_lower_right(&self.s_even[k])));
            out.push(UnitTriFactor::upper(self.s_odd[k].clone()));
        }
        out
    }
}

/// `diag(0, S)`, one size larger than `S`.
fn embed_lower_right(s: &SymMat) -> SymMat {
    let d = s.dim() + 1;
    let dense = Mat::from_fn(d, d, |i, j| if i == 0 || j == 0 { 0.0 } else { s.get(i - 1, j - 1) });
    SymMat::from_dense(&dense)
}

pub fn generate_singular(spec: &SingularSpec) -> SympMat {
    let q = spec.q.to_sympmat();
    let inner = FactorChain::new(spec.d, spec.inner_factors());
    let h = &inner.apply_left(&q.inverse());
    SympMat::new(q.matrix() * h).expect("even side")
}

/// Random spec: parameters uniform in `[-scale, scale]`, `Q` a random
/// five-factor chain with the same scale.
pub fn random_spec(rng: &mut impl Rng, d: usize, scale: f64) -> SingularSpec {
    let s_odd = [(); 3].map(|_| random_sym(rng, d, scale));
    let s_even = [(); 3].map(|_| random_sym(rng, d - 1, scale));
    let q = Conjugator::Chain(random_chain(rng, d, 5, scale));
    SingularSpec::new(s_odd, s_even, q).expect("dimensions are consistent")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularReport {
    pub symplectic_residual: f64,
    /// Smallest singular value of `M − I`.
    pub min_singular_value: f64,
    pub is_symplectic: bool,
    pub is_singular: bool,
}

impl SingularReport {
    pub fn is_singular_symplectic(&self) -> bool {
        self.is_symplectic && self.is_singular
    }
}

/// Symplectic residual `<= tol · max(1, ‖M‖_F²)` and
/// `σ_min(M − I) <= tol · ‖M‖_F`.
///
/// Singularity of `M − I` is measured by its smallest singular value rather
/// than its determinant, which underflows for moderate `d`.
pub fn check_singular_symplectic(m: &Mat, tol: f64) -> Result<SingularReport> {
    let symplectic_residual = symplectic_residual(m)?;
    let norm = m.frob_norm();
    let shifted = m - &Mat::identity(m.rows());
    let min_singular_value = min_singular_value(&shifted);
    Ok(SingularReport {
        symplectic_residual,
        min_singular_value,
        is_symplectic: symplectic_residual <= tol * norm.powi(2).max(1.0),
        is_singular: min_singular_value <= tol * norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::det;
    use crate::symplectic::j_matrix;

    fn scalar(x: f64) -> SymMat {
        SymMat::from_diag(&[x])
    }

    #[test]
    fn one_dimensional_spec_is_a_shear() {
        let spec = SingularSpec::new(
            [scalar(0.5), scalar(-2.0), scalar(0.25)],
            [SymMat::zeros(0), SymMat::zeros(0), SymMat::zeros(0)],
            Conjugator::Matrix(SympMat::identity(1)),
        )
        .unwrap();
        let h = generate_singular(&spec).into_inner();
        assert_eq!(h, Mat::from_rows(&[[1.0, -1.25], [0.0, 1.0]]).unwrap());
        assert_eq!(det(&(&h - &Mat::identity(2))), 0.0);
    }

    #[test]
    fn zero_parameters_give_identity() {
        let mut rng = crate::seeded_rng(4);
        let q = Conjugator::Chain(random_chain(&mut rng, 3, 5, 1.0));
        let spec = SingularSpec::new([(); 3].map(|_| SymMat::zeros(3)), [(); 3].map(|_| SymMat::zeros(2)), q).unwrap();
        let h = generate_singular(&spec).into_inner();
        assert!((&h - &Mat::identity(6)).frob_norm() < 1e-9);
    }

    #[test]
    fn dimension_checks() {
        let bad = SingularSpec::new(
            [(); 3].map(|_| SymMat::zeros(2)),
            [(); 3].map(|_| SymMat::zeros(2)),
            Conjugator::Matrix(SympMat::identity(2)),
        );
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn check_examples() {
        let r = check_singular_symplectic(&Mat::identity(2), 1e-8).unwrap();
        assert!(r.is_singular_symplectic());
        // det(J − I) = 2 for d = 1
        assert!((det(&(&j_matrix(1) - &Mat::identity(2))) - 2.0).abs() < 1e-15);
        let r = check_singular_symplectic(&j_matrix(1), 1e-8).unwrap();
        assert!(r.is_symplectic && !r.is_singular);
    }

    #[test]
    fn random_specs_pass_the_check() {
        let mut rng = crate::seeded_rng(6);
        for trial in 0..40 {
            let d = [1, 2, 3, 5][trial % 4];
            let h = generate_singular(&random_spec(&mut rng, d, 1.0)).into_inner();
            let r = check_singular_symplectic(&h, 1e-8).unwrap();
            assert!(r.is_singular_symplectic(), "d={d} {r:?}");
        }
    }

    #[test]
    fn conjugating_further_stays_singular() {
        let mut rng = crate::seeded_rng(7);
        let spec = random_spec(&mut rng, 3, 0.7);
        let g = random_chain(&mut rng, 3, 4, 0.7).to_sympmat();
        let Conjugator::Chain(q) = &spec.q else { unreachable!() };
        let qg = q.to_sympmat().mul(&g).unwrap();
        let spec2 = SingularSpec { q: Conjugator::Matrix(qg), ..spec };
        let h = generate_singular(&spec2).into_inner();
        assert!(check_singular_symplectic(&h, 1e-8).unwrap().is_singular_symplectic());
    }
}
