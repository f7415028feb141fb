//! Optimal unit triangular factorization of symplectic matrices.
//!
//! Any symplectic `H` is written as
//!
//! ```text
//! H = [[I, diag(δ)], [0, I]] · [[I, 0], [S, I]] · [[I, T], [0, I]]
//!                            · [[I, 0], [U, I]] · [[I, V], [0, I]]
//! ```
//!
//! with `δᵢ ∈ {0, 1}` and `S, T, U, V` symmetric. The pipeline:
//!
//! 1. pick a greedy maximal independent row set `Γ` of the upper-left
//!    block `A`; set `δᵢ = 0` on `Γ` and `1` elsewhere. Rows `Aᵢ` (`i ∈ Γ`)
//!    together with `Aᵢ − Cᵢ` (`i ∉ Γ`) are independent, so the shifted
//!    matrix `[[I, −diag(δ)], [0, I]] · H` has a nonsingular upper-left block;
//! 2. split that block as `A₁ = P₁ P₂` with `P₁`, `P₂` symmetric;
//! 3. read the four remaining factors off `A₁`, `A₂`, `B₁`, `P₁`, `P₂`.
//!
//! Four factors do not suffice in general: `[[0, Q], [−Q⁻ᵀ, 0]]` with an
//! asymmetric `Q` has no four-factor form, and this crate always emits the
//! leading shift slot.

use crate::matcore::{cond, independent_rows, min_singular_value, rank_factor, Lu, Mat, SymMat};
use crate::symplectic::{default_symp_tol, FactorChain, SympMat, UnitTriFactor};
use crate::symprod::two_symmetric_factors;
use crate::{Error, Result};

/// The 0/1 diagonal of the leading shift factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagShift {
    deltas: Vec<bool>,
}

impl DiagShift {
    pub fn new(deltas: Vec<bool>) -> Self {
        Self { deltas }
    }

    pub fn zeros(d: usize) -> Self {
        Self { deltas: vec![false; d] }
    }

    /// Parses numeric entries, which must each be exactly 0 or 1.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&x| match x {
                _ if x == 0.0 => Ok(false),
                _ if x == 1.0 => Ok(true),
                _ => Err(Error::InvalidArgument(format!("shift entry {x} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn dim(&self) -> usize {
        self.deltas.len()
    }

    pub fn deltas(&self) -> &[bool] {
        &self.deltas
    }

    pub fn values(&self) -> Vec<f64> {
        self.deltas.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn ones(&self) -> usize {
        self.deltas.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        self.ones() == 0
    }

    pub fn to_symmat(&self) -> SymMat {
        SymMat::from_diag(&self.values())
    }
}

/// Scale-relative rank/pivot threshold `1e-12 · 2d · max|H|`.
pub fn default_rank_tol(h: &SympMat) -> f64 {
    h.matrix().default_tol()
}

/// Result of the 0/1 diagonal nonsingularization.
#[derive(Clone, Debug)]
pub struct Nonsingularized {
    pub shift: DiagShift,
    /// `[[I, −diag(δ)], [0, I]] · H`
    pub shifted: SympMat,
    /// Tolerance that produced the accepted shift (after any retry).
    pub tol: f64,
    pub min_singular_value: f64,
}

fn diag_shift_once(h: &SympMat, tol: f64) -> Result<Nonsingularized> {
    let d = h.d();
    let gamma = independent_rows(&h.upper_left(), tol);
    let mut deltas = vec![true; d];
    for i in gamma {
        deltas[i] = false;
    }
    let shift = DiagShift::new(deltas);
    let shifted = UnitTriFactor::upper(shift.to_symmat().scale(-1.0)).apply_left(h.matrix());
    let shifted = SympMat::new(shifted)?;
    let min_singular_value = min_singular_value(&shifted.upper_left());
    if min_singular_value > tol {
        Ok(Nonsingularized { shift, shifted, tol, min_singular_value })
    } else {
        Err(Error::NonsingularizationFailed { min_singular_value, tol })
    }
}

/// Finds `δ ∈ {0,1}ᵈ` so that `[[I, −diag(δ)], [0, I]] · H` has a
/// nonsingular upper-left block (`min σ > tol`).
///
/// A failed rank decision is retried once with `10 · tol`.
pub fn nonsingularize(h: &SympMat, tol: f64) -> Result<Nonsingularized> {
    diag_shift_once(h, tol).or_else(|_| diag_shift_once(h, 10.0 * tol))
}

/// Result of the `λS` nonsingularization.
#[derive(Clone, Debug)]
pub struct LambdaShifted {
    /// `S = P · diag(0_r, I_{d−r}) · Pᵀ` from `A = P · diag(I_r, 0) · Q`.
    pub s: SymMat,
    pub lambda: f64,
    pub rank: usize,
    /// `[[I, −λS], [0, I]] · H`
    pub shifted: SympMat,
    pub min_singular_value: f64,
}

impl LambdaShifted {
    /// The leading factor `[[I, λS], [0, I]]`.
    pub fn leading_factor(&self) -> UnitTriFactor {
        UnitTriFactor::upper(self.s.scale(self.lambda))
    }
}

/// Nonsingularization through a rank factorization of the upper-left block;
/// works for every `λ ≠ 0`.
pub fn nonsingularize_lambda(h: &SympMat, lambda: f64, tol: f64) -> Result<LambdaShifted> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be finite and nonzero, got {lambda}")));
    }
    let d = h.d();
    let attempt = |tol: f64| -> Result<LambdaShifted> {
        let rf = rank_factor(&h.upper_left(), tol)?;
        let mut mid = Mat::zeros(d, d);
        for i in rf.rank..d {
            mid[(i, i)] = 1.0;
        }
        let s = SymMat::from_dense(&(&(&rf.p * &mid) * &rf.p.transpose()));
        let shifted = UnitTriFactor::upper(s.scale(-lambda)).apply_left(h.matrix());
        let shifted = SympMat::new(shifted)?;
        let min_singular_value = min_singular_value(&shifted.upper_left());
        if min_singular_value > tol {
            Ok(LambdaShifted { s, lambda, rank: rf.rank, shifted, min_singular_value })
        } else {
            Err(Error::NonsingularizationFailed { min_singular_value, tol })
        }
    };
    attempt(tol).or_else(|_| attempt(10.0 * tol))
}

/// Numerical side information of a 4-factor split.
#[derive(Clone, Copy, Debug, Default)]
pub struct FactorDiagnostics {
    /// Condition number of the symmetric factor `P₁`.
    pub cond_p1: f64,
    pub p2_asymmetry: f64,
    /// Asymmetry of the computed `S` and `V` before symmetrization.
    pub s_asymmetry: f64,
    pub v_asymmetry: f64,
}

#[derive(Clone, Debug)]
pub struct Factor4 {
    /// Exactly four factors: lower, upper, lower, upper.
    pub chain: FactorChain,
    pub diagnostics: FactorDiagnostics,
}

/// `H = [[I, 0], [S, I]] · [[I, T], [0, I]] · [[I, 0], [U, I]] · [[I, V], [0, I]]`
/// for symplectic `H` with nonsingular upper-left block.
///
/// With `A₁ = P₁ P₂` (both symmetric):
/// `S = A₂A₁⁻¹ + P₁⁻¹A₁⁻¹ − P₁⁻¹`, `T = P₁`, `U = P₂ − P₁⁻¹`,
/// `V = A₁⁻¹B₁ − P₂⁻¹`.
pub fn factor4_nonsingular(h: &SympMat, seed: u64) -> Result<Factor4> {
    let d = h.d();
    let a1 = h.upper_left();
    let lu = Lu::new(&a1, default_rank_tol(h))
        .map_err(|_| Error::SingularUpperLeftBlock { min_singular_value: min_singular_value(&a1) })?;
    let pair = two_symmetric_factors(&a1, seed)?;
    let p1 = pair.p1.to_dense();
    let p1_inv = pair.p1_inv.to_dense();
    let p2 = pair.p2.to_dense();

    // S = (A₂ + P₁⁻¹) A₁⁻¹ − P₁⁻¹
    let s = &lu.solve_right(&(&h.lower_left() + &p1_inv)) - &p1_inv;
    let u = &p2 - &p1_inv;
    // P₂⁻¹ = A₁⁻¹P₁, so V = A₁⁻¹(B₁ − P₁)
    let v = lu.solve(&(&h.upper_right() - &p1));

    let diagnostics = FactorDiagnostics {
        cond_p1: pair.cond_p1,
        p2_asymmetry: pair.p2_asymmetry,
        s_asymmetry: s.asymmetry(),
        v_asymmetry: v.asymmetry(),
    };
    let chain = FactorChain::new(
        d,
        vec![
            UnitTriFactor::lower(SymMat::from_dense(&s)),
            UnitTriFactor::upper(pair.p1),
            UnitTriFactor::lower(SymMat::from_dense(&u)),
            UnitTriFactor::upper(SymMat::from_dense(&v)),
        ],
    );
    Ok(Factor4 { chain, diagnostics })
}

/// How the leading factor of the 5-factor chain is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Nonsingularization {
    /// `[[I, diag(δ)], [0, I]]` with `δᵢ ∈ {0, 1}`.
    DiagonalShift,
    /// `[[I, λS], [0, I]]` with `S` from a rank factorization.
    Lambda(f64),
}

#[derive(Clone, Copy, Debug)]
pub struct Factor5Options {
    pub route: Nonsingularization,
    /// Rank/pivot threshold; `None` means [`default_rank_tol`].
    pub rank_tol: Option<f64>,
    /// Membership tolerance on the symplectic residual; `None` means
    /// `1e-10 · ‖H‖_F²`.
    pub symp_tol: Option<f64>,
}

impl Default for Factor5Options {
    fn default() -> Self {
        Self { route: Nonsingularization::DiagonalShift, rank_tol: None, symp_tol: None }
    }
}

#[derive(Clone, Debug)]
pub struct Factor5 {
    /// Shift slot plus four factors (lower, upper, lower, upper). On the
    /// `λ` route the shift is an ordinary upper factor instead.
    pub chain: FactorChain,
    /// `‖chain − H‖_F`
    pub residual: f64,
    /// Condition number of the shifted upper-left block.
    pub cond_a1: f64,
    pub diagnostics: FactorDiagnostics,
}

impl Factor5 {
    pub fn relative_residual(&self, h: &SympMat) -> f64 {
        self.residual / h.matrix().frob_norm()
    }
}

/// Default reconstruction tolerance `1e-8 · cond(A₁) · ‖H‖_F`.
pub fn fac_tol(cond_a1: f64, h: &SympMat) -> f64 {
    1e-8 * cond_a1 * h.matrix().frob_norm()
}

/// Factors any symplectic matrix into at most five unit triangular factors.
pub fn factor5(h: &SympMat, seed: u64) -> Result<Factor5> {
    factor5_with(h, seed, &Factor5Options::default())
}

pub fn factor5_with(h: &SympMat, seed: u64, opts: &Factor5Options) -> Result<Factor5> {
    let symp_tol = opts.symp_tol.unwrap_or_else(|| default_symp_tol(h.matrix()));
    if h.residual() > symp_tol {
        return Err(Error::NotSymplectic { residual: h.residual(), tol: symp_tol });
    }
    let tol = opts.rank_tol.unwrap_or_else(|| default_rank_tol(h));
    let d = h.d();
    let (leading, shifted) = match opts.route {
        Nonsingularization::DiagonalShift => {
            let ns = nonsingularize(h, tol)?;
            (Leading::Diag(ns.shift), ns.shifted)
        }
        Nonsingularization::Lambda(lambda) => {
            let ns = nonsingularize_lambda(h, lambda, tol)?;
            (Leading::Upper(ns.leading_factor()), ns.shifted)
        }
    };
    let Factor4 { chain: inner, diagnostics } = factor4_nonsingular(&shifted, seed)?;
    let chain = match leading {
        Leading::Diag(shift) => FactorChain::with_shift(d, shift, inner.factors),
        Leading::Upper(first) => {
            let mut factors = vec![first];
            factors.extend(inner.factors);
            FactorChain::new(d, factors)
        }
    };
    let residual = (&chain.reconstruct() - h.matrix()).frob_norm();
    Ok(Factor5 { chain, residual, cond_a1: cond(&shifted.upper_left()), diagnostics })
}

enum Leading {
    Diag(DiagShift),
    Upper(UnitTriFactor),
}

/// `[[0, Q], [−Q⁻ᵀ, 0]]`, symplectic for any nonsingular `Q` and outside
/// the four-factor set whenever `Q` is not symmetric.
pub fn four_factor_counterexample(q: &Mat) -> Result<SympMat> {
    let d = q.rows();
    let q_inv_t = Lu::with_default_tol(q)?.inverse().transpose();
    SympMat::new(Mat::from_blocks(&Mat::zeros(d, d), q, &-&q_inv_t, &Mat::zeros(d, d)))
}
