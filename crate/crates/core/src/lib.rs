//! Unit triangular factorizations of real symplectic matrices.
//!
//! A real `2d x 2d` matrix `H` is symplectic when `Hᵀ J H = J` with
//! `J = [[0, I], [-I, 0]]`. This crate factors any such matrix into at most
//! five unit triangular symplectic factors `[[I, S], [0, I]]` /
//! `[[I, 0], [S, I]]` (`S` symmetric), factors symmetric positive definite
//! symplectic matrices as `LᵀL` with `L` a three-factor chain, generates
//! singular symplectic matrices, and exposes the resulting unconstrained
//! `2d² + 3d` parameter chart of the symplectic group for optimization.
//!
//! Module map:
//!
//! - [`matcore`]: dense matrix kernels (LU, rank decisions, Jacobi eigen/SVD).
//! - [`symplectic`]: membership checks, unit triangular factors, LDU/ULU.
//! - [`symprod`]: a nonsingular matrix as a product of two symmetric ones.
//! - [`triangular`]: nonsingularization and the 4- and 5-factor factorizations.
//! - [`spd`]: `H = LᵀL` for positive definite symplectic `H`.
//! - [`singular`]: generator and checker for `det(H - I) = 0`.
//! - [`paramopt`]: the parameter chart, its gradient, and a descent optimizer.
//! - [`gen`]: seeded random generators for every matrix class above.
//! - [`cli`]: document formats and the command implementations behind the binary.

pub mod cli;
mod error;
pub mod gen;
pub mod matcore;
pub mod paramopt;
pub mod singular;
pub mod spd;
pub mod symplectic;
pub mod symprod;
pub mod triangular;

pub use error::{Error, Result};
pub use matcore::{Mat, SymMat};
pub use symplectic::{FactorChain, SympMat, TriKind, UnitTriFactor};
pub use triangular::DiagShift;

/// Seeded generator used for every random draw in the crate.
///
/// ChaCha with 8 rounds, seeded through `SeedableRng::seed_from_u64`; the
/// stream is platform independent, so equal seeds give equal output.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
