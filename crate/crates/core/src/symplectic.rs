//! Symplectic matrices, unit triangular factors, and the block LDU / ULU
//! splittings.
//!
//! Block layout used throughout the crate: a `2d x 2d` matrix is read as
//!
//! ```text
//! H = [[A, B],      A = A₁ (upper-left),  B = B₁ (upper-right),
//!      [C, D]]      C = A₂ (lower-left),  D = B₂ (lower-right).
//! ```
//!
//! With this map the column-pair conditions `AᵀC = CᵀA`, `BᵀD = DᵀB`,
//! `AᵀD − CᵀB = I` are equivalent to `HᵀJH = J`.

use crate::matcore::{cond, Lu, Mat, SymMat};
use crate::triangular::DiagShift;
use crate::{Error, Result};

/// `J = [[0, I], [-I, 0]]` of side `2d`.
pub fn j_matrix(d: usize) -> Mat {
    let mut j = Mat::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

fn half_dim(m: &Mat) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if !m.rows().is_multiple_of(2) {
        return Err(Error::OddDimension(m.rows()));
    }
    Ok(m.rows() / 2)
}

/// `‖MᵀJM − J‖_F`.
pub fn symplectic_residual(m: &Mat) -> Result<f64> {
    let d = half_dim(m)?;
    // J M = [[C, D], [-A, -B]]
    let mut jm = Mat::zeros(2 * d, 2 * d);
    jm.set_block(0, 0, &m.block(d, 0, d, 2 * d));
    jm.set_block(d, 0, &-&m.block(0, 0, d, 2 * d));
    let lhs = &m.transpose() * &jm;
    Ok((&lhs - &j_matrix(d)).frob_norm())
}

/// Default membership tolerance `1e-10 · ‖M‖_F²` on the symplectic residual.
pub fn default_symp_tol(m: &Mat) -> f64 {
    1e-10 * m.frob_norm().powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymplecticReport {
    pub is_symplectic: bool,
    pub residual: f64,
}

/// `true` iff `‖MᵀJM − J‖_F <= tol`.
pub fn is_symplectic(m: &Mat, tol: f64) -> Result<SymplecticReport> {
    let residual = symplectic_residual(m)?;
    Ok(SymplecticReport { is_symplectic: residual <= tol, residual })
}

/// A `2d x 2d` matrix together with its symplectic residual.
///
/// Construction records the residual instead of rejecting; use
/// [`SympMat::checked`] for a strict constructor.
#[derive(Clone, Debug, PartialEq)]
pub struct SympMat {
    d: usize,
    m: Mat,
    residual: f64,
}

impl SympMat {
    pub fn new(m: Mat) -> Result<Self> {
        let d = half_dim(&m)?;
        let residual = symplectic_residual(&m)?;
        Ok(Self { d, m, residual })
    }

    /// Rejects inputs whose residual exceeds `tol`.
    pub fn checked(m: Mat, tol: f64) -> Result<Self> {
        let h = Self::new(m)?;
        if h.residual > tol {
            return Err(Error::NotSymplectic { residual: h.residual, tol });
        }
        Ok(h)
    }

    /// Rejects inputs failing the default tolerance `1e-10 · ‖M‖_F²`.
    pub fn checked_default(m: Mat) -> Result<Self> {
        let tol = default_symp_tol(&m);
        Self::checked(m, tol)
    }

    pub fn identity(d: usize) -> Self {
        Self { d, m: Mat::identity(2 * d), residual: 0.0 }
    }

    pub fn j(d: usize) -> Self {
        Self { d, m: j_matrix(d), residual: 0.0 }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn into_inner(self) -> Mat {
        self.m
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `A₁` / `A`
    pub fn upper_left(&self) -> Mat {
        self.m.block(0, 0, self.d, self.d)
    }

    /// `B₁` / `B`
    pub fn upper_right(&self) -> Mat {
        self.m.block(0, self.d, self.d, self.d)
    }

    /// `A₂` / `C`
    pub fn lower_left(&self) -> Mat {
        self.m.block(self.d, 0, self.d, self.d)
    }

    /// `B₂` / `D`
    pub fn lower_right(&self) -> Mat {
        self.m.block(self.d, self.d, self.d, self.d)
    }

    /// `H⁻¹ = Jᵀ Hᵀ J = [[Dᵀ, −Bᵀ], [−Cᵀ, Aᵀ]]`.
    pub fn inverse(&self) -> Mat {
        Mat::from_blocks(
            &self.lower_right().transpose(),
            &-&self.upper_right().transpose(),
            &-&self.lower_left().transpose(),
            &self.upper_left().transpose(),
        )
    }

    pub fn mul(&self, rhs: &SympMat) -> Result<SympMat> {
        SympMat::new(&self.m * &rhs.m)
    }
}

/// Residuals of the three block conditions of a symplectic matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockResiduals {
    /// `‖AᵀC − CᵀA‖_F`
    pub first_columns: f64,
    /// `‖BᵀD − DᵀB‖_F`
    pub second_columns: f64,
    /// `‖AᵀD − CᵀB − I‖_F`
    pub cross: f64,
}

impl BlockResiduals {
    pub fn max(&self) -> f64 {
        self.first_columns.max(self.second_columns).max(self.cross)
    }
}

pub fn check_block_conditions(h: &SympMat) -> BlockResiduals {
    let (a, b, c, d) = (h.upper_left(), h.upper_right(), h.lower_left(), h.lower_right());
    let (at, bt, ct, dt) = (a.transpose(), b.transpose(), c.transpose(), d.transpose());
    let first = &(&at * &c) - &(&ct * &a);
    let second = &(&bt * &d) - &(&dt * &b);
    let cross = &(&(&at * &d) - &(&ct * &b)) - &Mat::identity(h.d());
    BlockResiduals { first_columns: first.frob_norm(), second_columns: second.frob_norm(), cross: cross.frob_norm() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriKind {
    /// `[[I, S], [0, I]]`
    Upper,
    /// `[[I, 0], [S, I]]`
    Lower,
}

impl TriKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TriKind::Upper => "upper",
            TriKind::Lower => "lower",
        }
    }
}

/// A unit triangular symplectic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitTriFactor {
    pub kind: TriKind,
    pub s: SymMat,
}

impl UnitTriFactor {
    pub fn upper(s: SymMat) -> Self {
        Self { kind: TriKind::Upper, s }
    }

    pub fn lower(s: SymMat) -> Self {
        Self { kind: TriKind::Lower, s }
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn dense(&self) -> Mat {
        self.apply_left(&Mat::identity(2 * self.dim()))
    }

    /// `F · X` without forming `F`.
    pub fn apply_left(&self, x: &Mat) -> Mat {
        let d = self.dim();
        assert_eq!(x.rows(), 2 * d, "factor side does not match operand");
        let n = x.cols();
        let top = x.block(0, 0, d, n);
        let bottom = x.block(d, 0, d, n);
        let s = self.s.to_dense();
        let mut out = x.clone();
        match self.kind {
            TriKind::Upper => out.set_block(0, 0, &(&top + &(&s * &bottom))),
            TriKind::Lower => out.set_block(d, 0, &(&bottom + &(&s * &top))),
        }
        out
    }

    pub fn inverse(&self) -> Self {
        Self { kind: self.kind, s: self.s.scale(-1.0) }
    }
}

/// Ordered product of unit triangular factors, optionally led by a 0/1
/// diagonal shift `[[I, diag(δ)], [0, I]]`.
///
/// Factors are listed as displayed left to right; the product is
/// `shift · factors[0] · factors[1] · …`, so the last listed factor acts
/// first on a vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorChain {
    pub d: usize,
    pub diag_shift: Option<DiagShift>,
    pub factors: Vec<UnitTriFactor>,
}

impl FactorChain {
    pub fn new(d: usize, factors: Vec<UnitTriFactor>) -> Self {
        Self { d, diag_shift: None, factors }
    }

    pub fn with_shift(d: usize, shift: DiagShift, factors: Vec<UnitTriFactor>) -> Self {
        Self { d, diag_shift: Some(shift), factors }
    }

    /// Number of unit triangular factors, counting the shift.
    pub fn len(&self) -> usize {
        self.factors.len() + usize::from(self.diag_shift.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All factors in display order, with the shift expanded into an
    /// upper factor.
    pub fn all_factors(&self) -> Vec<UnitTriFactor> {
        let mut out = Vec::with_capacity(self.len());
        if let Some(shift) = &self.diag_shift {
            out.push(UnitTriFactor::upper(shift.to_symmat()));
        }
        out.extend(self.factors.iter().cloned());
        out
    }

    /// `chain · X`.
    pub fn apply_left(&self, x: &Mat) -> Mat {
        self.all_factors().iter().rev().fold(x.clone(), |acc, f| f.apply_left(&acc))
    }

    pub fn reconstruct(&self) -> Mat {
        self.apply_left(&Mat::identity(2 * self.d))
    }

    pub fn to_sympmat(&self) -> SympMat {
        SympMat::new(self.reconstruct()).expect("chain product has even side")
    }
}

/// `diag(P, P⁻ᵀ)`.
pub fn block_diag(p: &Mat) -> Result<Mat> {
    let d = p.rows();
    let p_inv_t = Lu::with_default_tol(p)?.inverse().transpose();
    Ok(Mat::from_blocks(p, &Mat::zeros(d, d), &Mat::zeros(d, d), &p_inv_t))
}

/// Where the block-diagonal factor sits in an LDU splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LduVariant {
    /// `diag(P, P⁻ᵀ) · [[I, 0], [S, I]] · [[I, T], [0, I]]`
    LeftDiag,
    /// `[[I, 0], [S, I]] · diag(P, P⁻ᵀ) · [[I, T], [0, I]]`
    CenterDiag,
    /// `[[I, 0], [S, I]] · [[I, T], [0, I]] · diag(P, P⁻ᵀ)`
    RightDiag,
}

#[derive(Clone, Debug)]
pub struct LduResult {
    pub variant: LduVariant,
    pub s: SymMat,
    pub t: SymMat,
    pub p: Mat,
    /// `‖X − Xᵀ‖_F` of the computed `S` and `T` before symmetrization.
    pub s_asymmetry: f64,
    pub t_asymmetry: f64,
}

impl LduResult {
    pub fn reconstruct(&self) -> Result<Mat> {
        let dp = block_diag(&self.p)?;
        let l = UnitTriFactor::lower(self.s.clone());
        let u = UnitTriFactor::upper(self.t.clone());
        Ok(match self.variant {
            LduVariant::LeftDiag => &dp * &l.apply_left(&u.dense()),
            LduVariant::CenterDiag => l.apply_left(&(&dp * &u.dense())),
            LduVariant::RightDiag => l.apply_left(&u.apply_left(&dp)),
        })
    }
}

/// Default LDU/ULU reconstruction tolerance `1e-9 · cond(A₁) · ‖H‖_F`.
pub fn ldu_tol(h: &SympMat) -> f64 {
    1e-9 * cond(&h.upper_left()) * h.matrix().frob_norm()
}

fn pivot_tol(h: &SympMat) -> f64 {
    h.matrix().default_tol()
}

fn factor_upper_left(h: &SympMat) -> std::result::Result<Lu, f64> {
    let a = h.upper_left();
    Lu::new(&a, pivot_tol(h)).map_err(|_| crate::matcore::min_singular_value(&a))
}

fn split_sym(x: &Mat) -> (SymMat, f64) {
    (SymMat::from_dense(x), x.asymmetry())
}

/// Block LDU splitting of a symplectic matrix with nonsingular `A₁`.
pub fn ldu(h: &SympMat, variant: LduVariant) -> Result<LduResult> {
    let lu = factor_upper_left(h).map_err(|min_singular_value| Error::SingularUpperLeftBlock { min_singular_value })?;
    let (a, b, c) = (h.upper_left(), h.upper_right(), h.lower_left());
    let (s, t) = match variant {
        LduVariant::LeftDiag => (&a.transpose() * &c, lu.solve(&b)),
        LduVariant::CenterDiag => (lu.solve_right(&c), lu.solve(&b)),
        LduVariant::RightDiag => (lu.solve_right(&c), &b * &a.transpose()),
    };
    let (s, s_asymmetry) = split_sym(&s);
    let (t, t_asymmetry) = split_sym(&t);
    Ok(LduResult { variant, s, t, p: a, s_asymmetry, t_asymmetry })
}

/// `H = [[I, S], [0, I]] · [[I, 0], [T, I]] · [[I, U], [0, I]] · diag(P, P⁻ᵀ)`.
#[derive(Clone, Debug)]
pub struct UluResult {
    pub s: SymMat,
    pub t: SymMat,
    pub u: SymMat,
    pub p: Mat,
    pub t_asymmetry: f64,
    pub u_asymmetry: f64,
}

impl UluResult {
    pub fn reconstruct(&self) -> Result<Mat> {
        let dp = block_diag(&self.p)?;
        let chain = FactorChain::new(
            self.p.rows(),
            vec![
                UnitTriFactor::upper(self.s.clone()),
                UnitTriFactor::lower(self.t.clone()),
                UnitTriFactor::upper(self.u.clone()),
            ],
        );
        Ok(chain.apply_left(&dp))
    }
}

/// Given `S`, the unique `T`, `U`, `P` with
/// `H = [[I, S], [0, I]] · [[I, 0], [T, I]] · [[I, U], [0, I]] · diag(P, P⁻ᵀ)`.
pub fn ulu_factor(h: &SympMat, s: &SymMat) -> Result<UluResult> {
    if s.dim() != h.d() {
        return Err(Error::DimensionMismatch(format!("shift is {}x{}, matrix has d = {}", s.dim(), s.dim(), h.d())));
    }
    let shifted = SympMat::new(UnitTriFactor::upper(s.scale(-1.0)).apply_left(h.matrix()))?;
    let right = ldu(&shifted, LduVariant::RightDiag).map_err(|e| match e {
        Error::SingularUpperLeftBlock { min_singular_value } => Error::SingularAfterShift { min_singular_value },
        other => other,
    })?;
    Ok(UluResult {
        s: s.clone(),
        t: right.s,
        u: right.t,
        p: right.p,
        t_asymmetry: right.s_asymmetry,
        u_asymmetry: right.t_asymmetry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn m(rows: &[&[f64]]) -> Mat {
        Mat::from_rows(rows).unwrap()
    }

    fn random_sym(rng: &mut impl Rng, d: usize, scale: f64) -> SymMat {
        let packed = (0..d * (d + 1) / 2).map(|_| rng.gen_range(-scale..scale)).collect();
        SymMat::new(d, packed).unwrap()
    }

    fn random_chain(rng: &mut impl Rng, d: usize, len: usize) -> FactorChain {
        let factors = (0..len)
            .map(|k| {
                let s = random_sym(rng, d, 1.0);
                if k % 2 == 0 {
                    UnitTriFactor::lower(s)
                } else {
                    UnitTriFactor::upper(s)
                }
            })
            .collect();
        FactorChain::new(d, factors)
    }

    #[test]
    fn membership_examples() {
        assert!(is_symplectic(&Mat::identity(2), 0.0).unwrap().is_symplectic);
        for d in 1..5 {
            assert_eq!(symplectic_residual(&j_matrix(d)).unwrap(), 0.0);
        }
        let shear = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(is_symplectic(&shear, 0.0).unwrap().is_symplectic);
        // 2x2 symplectic iff det = 1; det(2I) = 4
        let r = is_symplectic(&Mat::from_diag(&[2.0, 2.0]), 1e-10).unwrap();
        assert!(!r.is_symplectic);
        assert!((r.residual - 3.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn odd_side_is_rejected() {
        assert_eq!(is_symplectic(&Mat::identity(3), 1.0), Err(Error::OddDimension(3)));
        assert!(matches!(SympMat::new(Mat::zeros(2, 4)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn checked_rejects_non_symplectic() {
        let e = SympMat::checked_default(Mat::from_diag(&[2.0, 2.0])).unwrap_err();
        assert!(matches!(e, Error::NotSymplectic { .. }));
        let h = SympMat::new(Mat::from_diag(&[2.0, 2.0])).unwrap();
        assert!(h.residual() > 1.0);
    }

    #[test]
    fn unit_factors_are_exactly_symplectic() {
        let mut rng = crate::seeded_rng(1);
        for d in 1..8 {
            let s = random_sym(&mut rng, d, 3.0);
            for f in [UnitTriFactor::upper(s.clone()), UnitTriFactor::lower(s)] {
                assert_eq!(symplectic_residual(&f.dense()).unwrap(), 0.0);
                let prod = &f.dense() * &f.inverse().dense();
                assert_eq!(prod, Mat::identity(2 * d));
            }
        }
    }

    #[test]
    fn block_conditions() {
        assert_eq!(check_block_conditions(&SympMat::identity(3)).max(), 0.0);
        assert_eq!(check_block_conditions(&SympMat::j(3)).max(), 0.0);
        let mut rng = crate::seeded_rng(2);
        for d in [1, 2, 3, 5] {
            let h = random_chain(&mut rng, d, 5).to_sympmat();
            assert!(check_block_conditions(&h).max() <= 1e-10, "d={d}");
        }
        let bad = SympMat::new(Mat::from_diag(&[2.0, 2.0])).unwrap();
        assert!((check_block_conditions(&bad).cross - 3.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_is_exact_for_symplectic() {
        let mut rng = crate::seeded_rng(4);
        let h = random_chain(&mut rng, 3, 4).to_sympmat();
        let prod = h.matrix() * &h.inverse();
        assert!((&prod - &Mat::identity(6)).frob_norm() < 1e-11);
    }

    #[test]
    fn ldu_examples() {
        let r = ldu(&SympMat::identity(2), LduVariant::CenterDiag).unwrap();
        assert!(r.s.is_zero() && r.t.is_zero());
        assert_eq!(r.p, Mat::identity(2));

        let lower = SympMat::new(m(&[&[1.0, 0.0], &[1.0, 1.0]])).unwrap();
        let r = ldu(&lower, LduVariant::CenterDiag).unwrap();
        assert_eq!((r.s.get(0, 0), r.t.get(0, 0), r.p[(0, 0)]), (1.0, 0.0, 1.0));

        let stretch = SympMat::new(m(&[&[2.0, 0.0], &[0.0, 0.5]])).unwrap();
        let r = ldu(&stretch, LduVariant::CenterDiag).unwrap();
        assert_eq!((r.s.get(0, 0), r.t.get(0, 0), r.p[(0, 0)]), (0.0, 0.0, 2.0));
    }

    #[test]
    fn ldu_rejects_singular_upper_left() {
        let e = ldu(&SympMat::j(2), LduVariant::LeftDiag).unwrap_err();
        assert!(matches!(e, Error::SingularUpperLeftBlock { .. }));
    }

    #[test]
    fn ldu_reconstructs_random_inputs() {
        let mut rng = crate::seeded_rng(12);
        for d in [1, 2, 3, 5, 8] {
            for _ in 0..20 {
                let h = random_chain(&mut rng, d, 4).to_sympmat();
                for variant in [LduVariant::LeftDiag, LduVariant::CenterDiag, LduVariant::RightDiag] {
                    let r = ldu(&h, variant).unwrap();
                    let res = (&r.reconstruct().unwrap() - h.matrix()).frob_norm();
                    assert!(res <= ldu_tol(&h), "d={d} {variant:?} res={res:e}");
                    // deterministic
                    let again = ldu(&h, variant).unwrap();
                    assert_eq!((again.s, again.t, again.p), (r.s, r.t, r.p));
                }
            }
        }
    }

    #[test]
    fn ulu_examples() {
        let r = ulu_factor(&SympMat::identity(2), &SymMat::zeros(2)).unwrap();
        assert!(r.t.is_zero() && r.u.is_zero());
        assert_eq!(r.p, Mat::identity(2));

        // J with S = 1: [[1,-1],[0,1]] J = [[1,1],[-1,0]] -> T = -1, U = 1, P = 1
        let r = ulu_factor(&SympMat::j(1), &SymMat::identity(1)).unwrap();
        assert_eq!((r.t.get(0, 0), r.u.get(0, 0), r.p[(0, 0)]), (-1.0, 1.0, 1.0));
        assert!((&r.reconstruct().unwrap() - &j_matrix(1)).frob_norm() <= 1e-12);

        let e = ulu_factor(&SympMat::j(2), &SymMat::zeros(2)).unwrap_err();
        assert!(matches!(e, Error::SingularAfterShift { .. }));
    }
}
