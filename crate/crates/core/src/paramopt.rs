//! Unconstrained parameterization of the real symplectic group.
//!
//! A parameter vector `θ = (v, Pa(S₁), Pa(S₂), Pa(S₃), Pa(S₄))` of length
//! `2d² + 3d` maps to
//!
//! ```text
//! H(θ) = [[I, diag(v)], [0, I]] · [[I, 0], [S₄, I]] · [[I, S₃], [0, I]]
//!                               · [[I, 0], [S₂, I]] · [[I, S₁], [0, I]]
//! ```
//!
//! which is symplectic for every `θ` and reaches every symplectic matrix, so
//! `min f(X) s.t. XᵀJX = J` becomes `min f(H(θ))` over all of `ℝ^{2d²+3d}`.
//! `Pa` packs the lower triangle row by row (see [`SymMat`]).

use crate::matcore::{packed_len, Mat, SymMat};
use crate::symplectic::{FactorChain, SympMat, TriKind, UnitTriFactor};
use crate::{DiagShift, Error, Result};

/// `2d² + 3d`.
pub const fn param_count(d: usize) -> usize {
    2 * d * d + 3 * d
}

/// Flat parameter vector `(v, Pa(S₁), …, Pa(S₄))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    d: usize,
    data: Vec<f64>,
}

impl ParamVector {
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != param_count(d) {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for d = {d}, expected {}",
                data.len(),
                param_count(d)
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { d, data })
    }

    pub fn zeros(d: usize) -> Self {
        Self { d, data: vec![0.0; param_count(d)] }
    }

    /// `s[k]` holds `S_{k+1}`.
    pub fn from_parts(v: &[f64], s: [&SymMat; 4]) -> Result<Self> {
        let d = v.len();
        if s.iter().any(|x| x.dim() != d) {
            return Err(Error::DimensionMismatch("all symmetric blocks must be d x d".into()));
        }
        let mut data = v.to_vec();
        for x in s {
            data.extend_from_slice(x.packed());
        }
        Self::new(d, data)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn v(&self) -> &[f64] {
        &self.data[..self.d]
    }

    /// `S_k` for `k ∈ 1..=4`.
    pub fn s(&self, k: usize) -> SymMat {
        assert!((1..=4).contains(&k), "symmetric block index must be 1..=4");
        let n = packed_len(self.d);
        let start = self.d + (k - 1) * n;
        SymMat::new(self.d, self.data[start..start + n].to_vec()).expect("slice has packed length")
    }

    /// `[[I, diag(v)], [0, I]], L(S₄), U(S₃), L(S₂), U(S₁)`.
    pub fn to_chain(&self) -> FactorChain {
        FactorChain::new(
            self.d,
            vec![
                UnitTriFactor::upper(SymMat::from_diag(self.v())),
                UnitTriFactor::lower(self.s(4)),
                UnitTriFactor::upper(self.s(3)),
                UnitTriFactor::lower(self.s(2)),
                UnitTriFactor::upper(self.s(1)),
            ],
        )
    }

    /// Packs a five-slot chain (shift, lower, upper, lower, upper) such as
    /// the one produced by the 5-factor factorization. A leading upper
    /// factor is accepted in place of the shift when its matrix is diagonal.
    pub fn from_chain(chain: &FactorChain) -> Result<Self> {
        let d = chain.d;
        let (v, rest): (Vec<f64>, &[UnitTriFactor]) = match &chain.diag_shift {
            Some(shift) => (shift.values(), &chain.factors[..]),
            None => {
                let first = chain.factors.first().ok_or_else(|| Error::ChainPattern("empty chain".into()))?;
                let diagonal = (0..d).all(|i| (0..i).all(|j| first.s.get(i, j) == 0.0));
                if first.kind != TriKind::Upper || !diagonal {
                    return Err(Error::ChainPattern("leading factor must be upper with diagonal S".into()));
                }
                ((0..d).map(|i| first.s.get(i, i)).collect(), &chain.factors[1..])
            }
        };
        let expected = [TriKind::Lower, TriKind::Upper, TriKind::Lower, TriKind::Upper];
        if rest.len() != 4 || rest.iter().zip(expected).any(|(f, k)| f.kind != k) {
            return Err(Error::ChainPattern("expected lower, upper, lower, upper after the shift".into()));
        }
        Self::from_parts(&v, [&rest[3].s, &rest[2].s, &rest[1].s, &rest[0].s])
    }

    fn axpy(&self, alpha: f64, dir: &ParamVector) -> ParamVector {
        let data = self.data.iter().zip(&dir.data).map(|(x, g)| x + alpha * g).collect();
        ParamVector { d: self.d, data }
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `H(θ)`; exactly symplectic up to rounding in the five products.
pub fn build(theta: &ParamVector) -> SympMat {
    theta.to_chain().to_sympmat()
}

/// A smooth function of a `2d x 2d` matrix.
pub trait Objective {
    fn evaluate(&self, x: &Mat) -> f64;

    /// Entrywise `∂f/∂X`; `None` falls back to central differences.
    fn gradient(&self, _x: &Mat) -> Option<Mat> {
        None
    }
}

/// `f(X) = ‖X − M‖_F²`.
#[derive(Clone, Debug)]
pub struct NearestObjective {
    pub target: Mat,
}

impl Objective for NearestObjective {
    fn evaluate(&self, x: &Mat) -> f64 {
        (x - &self.target).frob_norm().powi(2)
    }

    fn gradient(&self, x: &Mat) -> Option<Mat> {
        Some((x - &self.target).scale(2.0))
    }
}

/// Central differences on every entry, step `1e-6 · (1 + |x|)`.
pub fn finite_difference_gradient(obj: &dyn Objective, x: &Mat) -> Mat {
    let mut g = Mat::zeros(x.rows(), x.cols());
    let mut probe = x.clone();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let x0 = x[(i, j)];
            let h = 1e-6 * (1.0 + x0.abs());
            probe[(i, j)] = x0 + h;
            let fp = obj.evaluate(&probe);
            probe[(i, j)] = x0 - h;
            let fm = obj.evaluate(&probe);
            probe[(i, j)] = x0;
            g[(i, j)] = (fp - fm) / (2.0 * h);
        }
    }
    g
}

fn matrix_gradient(obj: &dyn Objective, x: &Mat) -> Mat {
    obj.gradient(x).unwrap_or_else(|| finite_difference_gradient(obj, x))
}

/// `∂f(H(θ))/∂θ` by the product rule.
///
/// For `H = F₀F₁F₂F₃F₄` and `G = ∂f/∂H`, the derivative along a parameter of
/// `F_k` is `⟨L_kᵀ G R_kᵀ, ∂F_k⟩` with prefix `L_k = F₀⋯F_{k−1}` and suffix
/// `R_k = F_{k+1}⋯F₄`; only the off-diagonal block of `∂F_k` is nonzero.
pub fn grad(theta: &ParamVector, obj: &dyn Objective) -> ParamVector {
    let (value_grad, _) = grad_at(theta, obj);
    value_grad
}

fn grad_at(theta: &ParamVector, obj: &dyn Objective) -> (ParamVector, Mat) {
    let d = theta.d();
    let n = 2 * d;
    let factors = theta.to_chain().factors;
    let dense: Vec<Mat> = factors.iter().map(UnitTriFactor::dense).collect();
    let mut prefix = vec![Mat::identity(n)];
    for f in &dense {
        let next = prefix.last().unwrap() * f;
        prefix.push(next);
    }
    let mut suffix = vec![Mat::identity(n); dense.len() + 1];
    for k in (0..dense.len()).rev() {
        suffix[k] = &dense[k] * &suffix[k + 1];
    }
    let h = build(theta).into_inner();
    let g = matrix_gradient(obj, &h);

    let mut out = vec![0.0; param_count(d)];
    // slot k of the chain carries: 0 -> v, 1 -> S₄, 2 -> S₃, 3 -> S₂, 4 -> S₁
    for (k, factor) in factors.iter().enumerate() {
        let m = &(&prefix[k].transpose() * &g) * &suffix[k + 1].transpose();
        let block = match factor.kind {
            TriKind::Upper => m.block(0, d, d, d),
            TriKind::Lower => m.block(d, 0, d, d),
        };
        if k == 0 {
            for i in 0..d {
                out[i] = block[(i, i)];
            }
            continue;
        }
        let s_index = 5 - k;
        let mut pos = d + (s_index - 1) * packed_len(d);
        for i in 0..d {
            for j in 0..=i {
                out[pos] = if i == j { block[(i, i)] } else { block[(i, j)] + block[(j, i)] };
                pos += 1;
            }
        }
    }
    (ParamVector { d, data: out }, h)
}

#[derive(Clone, Copy, Debug)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Stop once `‖∇θ f‖ <= grad_tol`.
    pub grad_tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_c: f64,
    pub shrink: f64,
    pub initial_step: f64,
    /// Backtracking gives up below this step length.
    pub min_step: f64,
    /// Stop once an accepted step lowers `f` by at most `stall_tol · |f|`.
    pub stall_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-12,
            armijo_c: 1e-4,
            shrink: 0.5,
            initial_step: 1.0,
            min_step: 1e-20,
            stall_tol: 1e-15,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptStatus {
    /// Gradient below tolerance or no measurable progress.
    Converged,
    MaxIterations,
    /// Backtracking could not find a decreasing step; the best iterate so
    /// far is returned.
    LineSearchFailed,
}

impl OptStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            OptStatus::Converged => "converged",
            OptStatus::MaxIterations => "max_iterations",
            OptStatus::LineSearchFailed => "line_search_failed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptResult {
    pub theta: ParamVector,
    pub h: SympMat,
    /// Objective at the initial point and after every accepted step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub status: OptStatus,
    pub grad_norm: f64,
}

impl OptResult {
    pub fn objective(&self) -> f64 {
        *self.trace.last().expect("trace holds the initial value")
    }
}

/// Gradient descent with Armijo backtracking over the parameter chart.
pub fn minimize(obj: &dyn Objective, init: &ParamVector, opts: &MinimizeOptions) -> OptResult {
    let mut theta = init.clone();
    let (mut g, mut h) = grad_at(&theta, obj);
    let mut f = obj.evaluate(&h);
    let mut trace = vec![f];
    let mut status = OptStatus::MaxIterations;
    let mut iterations = 0;
    let mut grad_norm = g.norm();

    while iterations < opts.max_iters {
        if grad_norm <= opts.grad_tol {
            status = OptStatus::Converged;
            break;
        }
        let slope = grad_norm * grad_norm;
        let mut step = opts.initial_step;
        let accepted = loop {
            let candidate = theta.axpy(-step, &g);
            let fc = obj.evaluate(build(&candidate).matrix());
            if fc.is_finite() && fc <= f - opts.armijo_c * step * slope {
                break Some((candidate, fc));
            }
            step *= opts.shrink;
            if step < opts.min_step {
                break None;
            }
        };
        let Some((next, fnext)) = accepted else {
            status = OptStatus::LineSearchFailed;
            break;
        };
        let stalled = f - fnext <= opts.stall_tol * f.abs();
        theta = next;
        f = fnext;
        trace.push(f);
        iterations += 1;
        (g, h) = grad_at(&theta, obj);
        grad_norm = g.norm();
        if stalled {
            status = OptStatus::Converged;
            break;
        }
    }
    if status == OptStatus::MaxIterations && grad_norm <= opts.grad_tol {
        status = OptStatus::Converged;
    }
    let h = SympMat::new(h).expect("even side");
    OptResult { theta, h, trace, iterations, status, grad_norm }
}

/// Parameters reproducing a 5-factor chain exactly; see
/// [`ParamVector::from_chain`].
pub fn params_from_shift_chain(shift: &DiagShift, factors: &[UnitTriFactor]) -> Result<ParamVector> {
    ParamVector::from_chain(&FactorChain::with_shift(shift.dim(), shift.clone(), factors.to_vec()))
}
