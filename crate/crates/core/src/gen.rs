//! Seeded random generators.
//!
//! Every generator builds its output from a structural parameterization, so
//! membership in the requested class holds by construction rather than up to
//! a tolerance. Symmetric parameters are drawn uniformly from
//! `[-scale, scale]`.

use rand::Rng;

use crate::matcore::{Lu, Mat, SymMat};
use crate::symplectic::{block_diag, FactorChain, SympMat, UnitTriFactor};

fn uniform(rng: &mut impl Rng, scale: f64) -> f64 {
    if scale == 0.0 {
        // keep the stream position independent of the scale
        let _: f64 = rng.gen();
        0.0
    } else {
        rng.gen_range(-scale..=scale)
    }
}

pub fn random_sym(rng: &mut impl Rng, d: usize, scale: f64) -> SymMat {
    let packed = (0..d * (d + 1) / 2).map(|_| uniform(rng, scale)).collect();
    SymMat::new(d, packed).expect("packed length is exact")
}

/// `len` factors alternating lower, upper, lower, ... from the left.
pub fn random_chain(rng: &mut impl Rng, d: usize, len: usize, scale: f64) -> FactorChain {
    let factors = (0..len)
        .map(|k| {
            let s = random_sym(rng, d, scale);
            if k % 2 == 0 {
                UnitTriFactor::lower(s)
            } else {
                UnitTriFactor::upper(s)
            }
        })
        .collect();
    FactorChain::new(d, factors)
}

/// Product `[[I, diag(v)], [0, I]] · L · U · L · U` with every parameter
/// uniform in `[-scale, scale]`.
pub fn random_symplectic(rng: &mut impl Rng, d: usize, scale: f64) -> SympMat {
    let v: Vec<f64> = (0..d).map(|_| uniform(rng, scale)).collect();
    let mut factors = vec![UnitTriFactor::upper(SymMat::from_diag(&v))];
    factors.extend(random_chain(rng, d, 4, scale).factors);
    FactorChain::new(d, factors).to_sympmat()
}

/// Well-conditioned `I + N` with `‖N‖₂ <= 1/2`.
fn near_identity(rng: &mut impl Rng, d: usize) -> Mat {
    let w = 0.5 / d as f64;
    Mat::from_fn(d, d, |i, j| f64::from(u8::from(i == j)) + rng.gen_range(-w..=w))
}

/// Symplectic matrix whose upper-left block has rank exactly `rank`.
///
/// `L(S) · diag(G, G⁻ᵀ) · E · diag(K, K⁻ᵀ) · U(T)`, where `E` swaps the
/// coordinate pairs `(qᵢ, pᵢ)` of `d − rank` random indices. Left lower and
/// right upper factors leave the upper-left block unchanged, so it equals
/// `G · diag(1/0 pattern) · K`.
pub fn rank_deficient_symplectic(rng: &mut impl Rng, d: usize, rank: usize) -> SympMat {
    assert!(rank <= d, "rank exceeds d");
    let mut idx: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    let mut e = Mat::identity(2 * d);
    for &i in &idx[..d - rank] {
        e[(i, i)] = 0.0;
        e[(d + i, d + i)] = 0.0;
        e[(i, d + i)] = 1.0;
        e[(d + i, i)] = -1.0;
    }
    let g = block_diag(&near_identity(rng, d)).expect("near-identity is nonsingular");
    let k = block_diag(&near_identity(rng, d)).expect("near-identity is nonsingular");
    let left = UnitTriFactor::lower(random_sym(rng, d, 1.0));
    let right = UnitTriFactor::upper(random_sym(rng, d, 1.0));
    let core = &(&g * &e) * &k;
    SympMat::new(left.apply_left(&(&core * &right.dense()))).expect("even side")
}

/// Symplectic matrix with the prescribed nonsingular upper-left block:
/// `L(S) · diag(A₁, A₁⁻ᵀ) · U(T)`.
pub fn symplectic_with_upper_left(rng: &mut impl Rng, a1: &Mat, scale: f64) -> SympMat {
    let d = a1.rows();
    Lu::with_default_tol(a1).expect("upper-left block must be nonsingular");
    let mid = block_diag(a1).expect("nonsingular");
    let left = UnitTriFactor::lower(random_sym(rng, d, scale));
    let right = UnitTriFactor::upper(random_sym(rng, d, scale));
    SympMat::new(left.apply_left(&(&mid * &right.dense()))).expect("even side")
}

/// `LᵀL` for a random three-factor chain `L = U(S) · L(T) · U(U)`.
pub fn random_spd_symplectic(rng: &mut impl Rng, d: usize, scale: f64) -> SympMat {
    let factors = (0..3)
        .map(|k| {
            let s = random_sym(rng, d, scale);
            if k % 2 == 0 {
                UnitTriFactor::upper(s)
            } else {
                UnitTriFactor::lower(s)
            }
        })
        .collect();
    let l = FactorChain::new(d, factors).reconstruct();
    let h = (&l.transpose() * &l).symmetrized();
    SympMat::new(h).expect("even side")
}
