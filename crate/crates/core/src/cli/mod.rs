//! Command-line surface of the `sympfac` binary.
//!
//! Exit codes: `0` success, `1` `check` found a non-symplectic matrix,
//! `2` unreadable input, bad flags or I/O failure, `3` input not symplectic
//! at the requested tolerance, `4` numerical failure (the error name is
//! printed). Documents go to `--out` or standard output; residuals and
//! other diagnostics go to standard error.
//!
//! The default relative tolerance is `1e-10`; `SYMPFAC_TOL` replaces it,
//! and an explicit `--tol` wins over both.

pub mod doc;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::matcore::{min_singular_value, Mat};
use crate::paramopt::{build, minimize, MinimizeOptions, NearestObjective, Objective, OptStatus, ParamVector};
use crate::singular::{generate_singular, random_spec};
use crate::spd::{factor_spd, spd_report, SpdShape};
use crate::symplectic::{ldu, symplectic_residual, ulu_factor, LduVariant, SympMat, UnitTriFactor};
use crate::triangular::{factor5_with, nonsingularize_lambda, Factor5Options, Nonsingularization};
use crate::{gen, seeded_rng, Error};

pub use doc::{ChainDoc, ChainForm, DocFactor, MatrixFormat, ParseError};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const TOL_ENV: &str = "SYMPFAC_TOL";
/// `H − I` counts as singular when `σ_min(H − I) <= SINGULAR_TOL · ‖H‖_F`.
pub const SINGULAR_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "sympfac", version, about = "Unit triangular factorizations of symplectic matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Factor a symplectic matrix into a chain document.
    Factor(FactorArgs),
    /// Emit a seeded random matrix of the requested class.
    Random(RandomArgs),
    /// Report membership in the symplectic, SPD-symplectic and singular sets.
    Check(CheckArgs),
    /// Minimize an objective over the symplectic group.
    Optimize(OptimizeArgs),
    /// Multiply a chain document back into a matrix document.
    Reconstruct(ReconstructArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FactorMode {
    /// Five unit triangular factors with a 0/1 diagonal shift.
    Utf5,
    /// `H = LᵀL` with a three-factor `L`.
    Spd,
    /// Lower, block diagonal, upper (see `--variant`).
    Ldu,
    /// Upper, lower, upper, block diagonal.
    Ulu,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LduArg {
    Left,
    Center,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpdShapeArg {
    /// `L = U(S) L(T) U(U)`
    Ulu,
    /// `L = L(S) U(T) L(U)`
    Lul,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ShiftRoute {
    /// 0/1 diagonal shift.
    Diag,
    /// `λS` from a rank factorization of the upper-left block.
    Lambda,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for MatrixFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => MatrixFormat::Json,
            FormatArg::Text => MatrixFormat::Text,
        }
    }
}

#[derive(Args, Debug)]
pub struct FactorArgs {
    /// Matrix document (JSON or text).
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FactorMode::Utf5)]
    pub mode: FactorMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative symplectic tolerance: residual <= tol · max(1, ‖H‖²).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Placement of the block-diagonal factor in `--mode ldu`.
    #[arg(long, value_enum, default_value_t = LduArg::Center)]
    pub variant: LduArg,
    /// Chain shape in `--mode spd`.
    #[arg(long, value_enum, default_value_t = SpdShapeArg::Ulu)]
    pub shape: SpdShapeArg,
    /// Leading factor in `--mode utf5`.
    #[arg(long, value_enum, default_value_t = ShiftRoute::Diag)]
    pub route: ShiftRoute,
    /// Scale of the rank-factorization shift (`--route lambda`, `--mode ulu`).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Symplectic,
    Spd,
    Singular,
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Parameters are uniform in [-scale, scale].
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    /// ‖X − M‖_F² for the target M.
    Nearest,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    /// Factor the target; falls back to zero when that is worse.
    Factor,
    Zero,
    /// Uniform in [-0.1, 0.1] from `--seed`.
    Random,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    /// Target matrix document.
    pub target: PathBuf,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Nearest)]
    pub objective: ObjectiveArg,
    /// Expected half dimension; must match the target.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Factor)]
    pub init: InitArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// Chain document.
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

/// What a command produced; written out by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: String,
    pub out: Option<PathBuf>,
    pub diagnostics: Vec<String>,
    pub code: i32,
}

impl Outcome {
    fn ok(document: String, out: Option<PathBuf>) -> Self {
        Self { document, out, diagnostics: Vec::new(), code: 0 }
    }

    fn note(mut self, line: String) -> Self {
        self.diagnostics.push(line);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn numerical(e: &Error) -> Self {
        match e {
            Error::NotSymplectic { .. } => Self { code: 3, message: format!("not symplectic: {e}") },
            _ => Self { code: 4, message: format!("numerical failure: {}: {e}", e.name()) },
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        Self::usage(format!("parse error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// `--tol`, else `SYMPFAC_TOL`, else [`DEFAULT_TOL`].
pub fn resolve_tol(flag: Option<f64>) -> CliResult<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| CliError::usage(format!("{TOL_ENV}={s:?} is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(CliError::usage(format!("tolerance must be positive and finite, got {tol}")))
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> CliResult<Mat> {
    Ok(doc::parse_matrix(&read_input(path)?)?)
}

/// Symplectic residual bound `tol · max(1, ‖M‖_F²)`.
fn symp_bound(m: &Mat, tol: f64) -> f64 {
    tol * m.frob_norm().powi(2).max(1.0)
}

pub fn cmd_factor(args: &FactorArgs) -> CliResult<Outcome> {
    let m = read_matrix(&args.input)?;
    let tol = resolve_tol(args.tol)?;
    let doc = factor_matrix(&m, args, tol)?;
    let residual = doc.residual;
    Ok(Outcome::ok(doc.to_json(), args.out.clone()).note(format!("residual: {}", doc::fmt_num(residual))))
}

/// The chain document for `m`; `tol` is the relative symplectic tolerance.
pub fn factor_matrix(m: &Mat, args: &FactorArgs, tol: f64) -> CliResult<ChainDoc> {
    let h = SympMat::new(m.clone()).map_err(|e| CliError::usage(e.to_string()))?;
    let bound = symp_bound(m, tol);
    if h.residual() > bound {
        return Err(CliError {
            code: 3,
            message: format!("not symplectic: residual {:e} exceeds {:e}", h.residual(), bound),
        });
    }
    let d = h.d();
    let num = |e: Error| CliError::numerical(&e);
    let mut doc = match args.mode {
        FactorMode::Utf5 => {
            let route = match args.route {
                ShiftRoute::Diag => Nonsingularization::DiagonalShift,
                ShiftRoute::Lambda => Nonsingularization::Lambda(args.lambda),
            };
            let opts = Factor5Options { route, rank_tol: None, symp_tol: Some(bound) };
            let f = factor5_with(&h, args.seed, &opts).map_err(num)?;
            ChainDoc {
                d,
                form: ChainForm::Product,
                diag_shift: f.chain.diag_shift,
                factors: f.chain.factors.into_iter().map(DocFactor::Tri).collect(),
                residual: 0.0,
            }
        }
        FactorMode::Spd => {
            let shape = match args.shape {
                SpdShapeArg::Ulu => SpdShape::UpperLowerUpper,
                SpdShapeArg::Lul => SpdShape::LowerUpperLower,
            };
            let f = factor_spd(m, shape).map_err(num)?;
            let factors = f.chain().factors.into_iter().map(DocFactor::Tri).collect();
            ChainDoc { d, form: ChainForm::Gram, diag_shift: None, factors, residual: 0.0 }
        }
        FactorMode::Ldu => {
            let variant = match args.variant {
                LduArg::Left => LduVariant::LeftDiag,
                LduArg::Center => LduVariant::CenterDiag,
                LduArg::Right => LduVariant::RightDiag,
            };
            let r = ldu(&h, variant).map_err(num)?;
            let (l, p, u) = (
                DocFactor::Tri(UnitTriFactor::lower(r.s)),
                DocFactor::Diag(r.p),
                DocFactor::Tri(UnitTriFactor::upper(r.t)),
            );
            let factors = match variant {
                LduVariant::LeftDiag => vec![p, l, u],
                LduVariant::CenterDiag => vec![l, p, u],
                LduVariant::RightDiag => vec![l, u, p],
            };
            ChainDoc { d, form: ChainForm::Product, diag_shift: None, factors, residual: 0.0 }
        }
        FactorMode::Ulu => {
            let shift = nonsingularize_lambda(&h, args.lambda, h.matrix().default_tol()).map_err(num)?;
            let r = ulu_factor(&h, &shift.s.scale(args.lambda)).map_err(num)?;
            let factors = vec![
                DocFactor::Tri(UnitTriFactor::upper(r.s)),
                DocFactor::Tri(UnitTriFactor::lower(r.t)),
                DocFactor::Tri(UnitTriFactor::upper(r.u)),
                DocFactor::Diag(r.p),
            ];
            ChainDoc { d, form: ChainForm::Product, diag_shift: None, factors, residual: 0.0 }
        }
    };
    let rebuilt = doc.reconstruct().map_err(|e| CliError { code: 4, message: format!("numerical failure: {e}") })?;
    doc.residual = (&rebuilt - m).frob_norm();
    Ok(doc)
}

/// The matrix a `random` invocation emits.
pub fn random_matrix(kind: Kind, d: usize, seed: u64, scale: f64) -> CliResult<Mat> {
    if d == 0 {
        return Err(CliError::usage("--d must be at least 1"));
    }
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(CliError::usage(format!("--scale must be finite and non-negative, got {scale}")));
    }
    let mut rng = seeded_rng(seed);
    Ok(match kind {
        Kind::Symplectic => gen::random_symplectic(&mut rng, d, scale).into_inner(),
        Kind::Spd => gen::random_spd_symplectic(&mut rng, d, scale).into_inner(),
        Kind::Singular => generate_singular(&random_spec(&mut rng, d, scale)).into_inner(),
    })
}

pub fn cmd_random(args: &RandomArgs) -> CliResult<Outcome> {
    let m = random_matrix(args.kind, args.d, args.seed, args.scale)?;
    Ok(Outcome::ok(doc::write_matrix(&m, args.format.into()), args.out.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub symplectic: bool,
    pub spd: bool,
    pub singular: bool,
    pub symplectic_residual: f64,
    pub min_eigenvalue: f64,
    /// `σ_min(M − I)`
    pub min_singular_value: f64,
}

/// Membership at relative tolerance `tol`; the singular set additionally
/// needs `σ_min(M − I) <= SINGULAR_TOL · ‖M‖_F`.
pub fn membership(m: &Mat, tol: f64) -> CliResult<Membership> {
    let residual = symplectic_residual(m).map_err(|e| CliError::usage(e.to_string()))?;
    let symplectic = residual <= symp_bound(m, tol);
    let spd = spd_report(m, tol).map_err(|e| CliError::numerical(&e))?;
    let min_sv = min_singular_value(&(m - &Mat::identity(m.rows())));
    Ok(Membership {
        symplectic,
        spd: symplectic && spd.is_spd_symplectic,
        singular: symplectic && min_sv <= SINGULAR_TOL * m.frob_norm(),
        symplectic_residual: residual,
        min_eigenvalue: spd.min_eigenvalue,
        min_singular_value: min_sv,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn format_report(m: &Mat, r: &Membership) -> String {
    let mut out = String::new();
    let exact = if r.singular && (m - &Mat::identity(m.rows())).max_abs() == 0.0 { " (H-I=0)" } else { "" };
    let _ = writeln!(
        out,
        "symplectic: {}; spd: {}; singular: {}{exact}",
        yes_no(r.symplectic),
        yes_no(r.spd),
        yes_no(r.singular)
    );
    let _ = writeln!(out, "symplectic residual: {}", doc::fmt_num(r.symplectic_residual));
    let _ = writeln!(out, "min eigenvalue of symmetric part: {}", doc::fmt_num(r.min_eigenvalue));
    let _ = writeln!(out, "min singular value of H-I: {}", doc::fmt_num(r.min_singular_value));
    out
}

pub fn cmd_check(args: &CheckArgs) -> CliResult<Outcome> {
    let m = read_matrix(&args.input)?;
    let tol = resolve_tol(args.tol)?;
    let r = membership(&m, tol)?;
    let mut outcome = Outcome::ok(format_report(&m, &r), None);
    outcome.code = if r.symplectic { 0 } else { 1 };
    Ok(outcome)
}

/// Starting point for `optimize`.
pub fn initial_params(target: &Mat, init: InitArg, seed: u64) -> CliResult<ParamVector> {
    let d = target.rows() / 2;
    Ok(match init {
        InitArg::Zero => ParamVector::zeros(d),
        InitArg::Random => {
            let mut rng = seeded_rng(seed);
            let data = (0..crate::paramopt::param_count(d)).map(|_| rng.gen_range(-0.1..=0.1)).collect();
            ParamVector::new(d, data).map_err(|e| CliError::numerical(&e))?
        }
        InitArg::Factor => {
            let zero = ParamVector::zeros(d);
            let h = SympMat::new(target.clone()).map_err(|e| CliError::usage(e.to_string()))?;
            let opts = Factor5Options { symp_tol: Some(f64::INFINITY), ..Default::default() };
            let candidate = factor5_with(&h, seed, &opts).ok().and_then(|f| ParamVector::from_chain(&f.chain).ok());
            let obj = NearestObjective { target: target.clone() };
            match candidate {
                Some(c) if obj.evaluate(build(&c).matrix()) < obj.evaluate(build(&zero).matrix()) => c,
                _ => zero,
            }
        }
    })
}

pub fn cmd_optimize(args: &OptimizeArgs) -> CliResult<Outcome> {
    let target = read_matrix(&args.target)?;
    let d = target.rows() / 2;
    if let Some(expected) = args.d {
        if expected != d {
            return Err(CliError::usage(format!("--d {expected} does not match target with d = {d}")));
        }
    }
    let ObjectiveArg::Nearest = args.objective;
    let init = initial_params(&target, args.init, args.seed)?;
    let obj = NearestObjective { target };
    let opts = MinimizeOptions { max_iters: args.max_iters, ..Default::default() };
    let result = minimize(&obj, &init, &opts);
    let mut outcome = Outcome::ok(doc::write_optimization(&result, "nearest"), args.out.clone())
        .note(format!("final objective: {}", doc::fmt_num(result.objective())))
        .note(format!("status: {} after {} iterations", result.status.as_str(), result.iterations));
    if result.status == OptStatus::LineSearchFailed {
        outcome.code = 4;
        outcome.diagnostics.push("numerical failure: line search failed; best iterate written".into());
    }
    Ok(outcome)
}

pub fn cmd_reconstruct(args: &ReconstructArgs) -> CliResult<Outcome> {
    let chain = ChainDoc::parse(&read_input(&args.input)?)?;
    let m = chain.reconstruct()?;
    Ok(Outcome::ok(doc::write_matrix(&m, args.format.into()), args.out.clone()))
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Factor(a) => cmd_factor(a),
        Command::Random(a) => cmd_random(a),
        Command::Check(a) => cmd_check(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
    }
}

fn emit(outcome: &Outcome) -> CliResult<()> {
    for line in &outcome.diagnostics {
        eprintln!("{line}");
    }
    match &outcome.out {
        Some(path) => std::fs::write(path, &outcome.document)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.document.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::usage(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = execute(&cli.command).and_then(|outcome| emit(&outcome).map(|_| outcome.code));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::j_matrix;

    fn factor_args(mode: FactorMode) -> FactorArgs {
        FactorArgs {
            input: PathBuf::new(),
            mode,
            seed: 0,
            tol: None,
            out: None,
            variant: LduArg::Center,
            shape: SpdShapeArg::Ulu,
            route: ShiftRoute::Diag,
            lambda: 1.0,
        }
    }

    #[test]
    fn factor_identity_and_j() {
        let doc = factor_matrix(&Mat::identity(4), &factor_args(FactorMode::Utf5), DEFAULT_TOL).unwrap();
        assert!(doc.diag_shift.as_ref().unwrap().is_zero());
        assert_eq!(doc.residual, 0.0);
        let doc = factor_matrix(&j_matrix(3), &factor_args(FactorMode::Utf5), DEFAULT_TOL).unwrap();
        assert_eq!(doc.diag_shift.as_ref().unwrap().ones(), 3);
        assert!(doc.residual <= 1e-12);
    }

    fn scalar_params(doc: &ChainDoc) -> Vec<f64> {
        doc.factors
            .iter()
            .map(|f| match f {
                DocFactor::Tri(t) => t.s.get(0, 0),
                DocFactor::Diag(p) => p[(0, 0)],
            })
            .collect()
    }

    #[test]
    fn factor_spd_hand_values() {
        let r = 1.5f64.sqrt();
        // P = 2: S = sqrt(2 + 1/2 − 1), T = (2 − S) / 2.5 ≈ 0.31010, U = −1
        let doc = factor_matrix(&Mat::from_diag(&[2.0, 0.5]), &factor_args(FactorMode::Spd), DEFAULT_TOL).unwrap();
        let p = scalar_params(&doc);
        assert!((p[0] - r).abs() < 1e-12 && (p[1] - 0.31010).abs() < 1e-5 && p[2] == -1.0, "{p:?}");
        // P = 1/2 gives the same S but T = (1/2 − S) / 2.5
        let doc = factor_matrix(&Mat::from_diag(&[0.5, 2.0]), &factor_args(FactorMode::Spd), DEFAULT_TOL).unwrap();
        let p = scalar_params(&doc);
        assert!((p[0] - r).abs() < 1e-12 && (p[1] - (0.5 - r) / 2.5).abs() < 1e-12 && p[2] == -1.0, "{p:?}");
        assert_eq!(doc.form, ChainForm::Gram);
        assert!(doc.residual < 1e-12);
    }

    #[test]
    fn factor_modes_reconstruct() {
        let m = random_matrix(Kind::Symplectic, 3, 11, 0.5).unwrap();
        for mode in [FactorMode::Utf5, FactorMode::Ldu, FactorMode::Ulu] {
            let doc = factor_matrix(&m, &factor_args(mode), DEFAULT_TOL).unwrap();
            assert!(doc.residual <= 1e-9 * m.frob_norm(), "{mode:?}");
        }
        for variant in [LduArg::Left, LduArg::Right] {
            let args = FactorArgs { variant, ..factor_args(FactorMode::Ldu) };
            assert!(factor_matrix(&m, &args, DEFAULT_TOL).unwrap().residual <= 1e-9 * m.frob_norm());
        }
        let args = FactorArgs { route: ShiftRoute::Lambda, ..factor_args(FactorMode::Utf5) };
        assert!(factor_matrix(&m, &args, DEFAULT_TOL).unwrap().residual <= 1e-9 * m.frob_norm());
    }

    #[test]
    fn factor_error_codes() {
        let e = factor_matrix(&Mat::from_diag(&[2.0, 2.0]), &factor_args(FactorMode::Utf5), DEFAULT_TOL);
        assert_eq!(e.unwrap_err().code, 3);
        let e = factor_matrix(&j_matrix(2), &factor_args(FactorMode::Ldu), DEFAULT_TOL).unwrap_err();
        assert_eq!(e.code, 4);
        assert!(e.message.contains("SingularUpperLeftBlock"), "{}", e.message);
        let e = factor_matrix(&j_matrix(1), &factor_args(FactorMode::Spd), DEFAULT_TOL).unwrap_err();
        assert_eq!(e.code, 4);
    }

    #[test]
    fn random_kinds() {
        assert_eq!(random_matrix(Kind::Spd, 1, 1, 0.0).unwrap(), Mat::identity(2));
        let m = random_matrix(Kind::Symplectic, 2, 7, 1.0).unwrap();
        assert!(symplectic_residual(&m).unwrap() <= 1e-10);
        let m = random_matrix(Kind::Singular, 2, 3, 1.0).unwrap();
        assert!(membership(&m, DEFAULT_TOL).unwrap().singular);
        assert_eq!(random_matrix(Kind::Spd, 0, 1, 1.0).unwrap_err().code, 2);
        assert_eq!(random_matrix(Kind::Spd, 1, 1, -1.0).unwrap_err().code, 2);
    }

    #[test]
    fn check_reports() {
        let id = Mat::identity(2);
        let r = membership(&id, DEFAULT_TOL).unwrap();
        assert!(format_report(&id, &r).starts_with("symplectic: yes; spd: yes; singular: yes"));
        let r = membership(&j_matrix(1), DEFAULT_TOL).unwrap();
        assert!((r.symplectic, r.spd, r.singular) == (true, false, false));
        let gl = Mat::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert!(!membership(&gl, DEFAULT_TOL).unwrap().symplectic);
    }

    #[test]
    fn optimize_init_choices() {
        let theta0 = ParamVector::new(1, vec![0.3, -0.2, 0.5, 0.1, 0.7]).unwrap();
        let target = build(&theta0).into_inner();
        let init = initial_params(&target, InitArg::Factor, 0).unwrap();
        assert!((build(&init).matrix() - &target).frob_norm() < 1e-12);
        assert_eq!(initial_params(&target, InitArg::Zero, 0).unwrap(), ParamVector::zeros(1));
        let a = initial_params(&target, InitArg::Random, 5).unwrap();
        assert_eq!(a, initial_params(&target, InitArg::Random, 5).unwrap());
        assert!(a.as_slice().iter().all(|x| x.abs() <= 0.1));
    }

    #[test]
    fn clap_rejects_bad_flags() {
        let e = Cli::try_parse_from(["sympfac", "random", "--kind", "nope", "--d", "2"]).unwrap_err();
        assert!(e.use_stderr());
        assert!(Cli::try_parse_from(["sympfac", "factor"]).is_err());
        assert_eq!(run(["sympfac", "check", "/nonexistent/matrix.json"]), 2);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert_eq!(resolve_tol(Some(1e-6)).unwrap(), 1e-6);
        assert_eq!(resolve_tol(Some(0.0)).unwrap_err().code, 2);
        assert_eq!(resolve_tol(Some(f64::NAN)).unwrap_err().code, 2);
    }
}
