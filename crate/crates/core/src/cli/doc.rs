//! Matrix, factor-chain and optimization documents.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite `f64` exactly. Output is built by hand so the
//! bytes depend only on the values; input goes through `serde_json`.

use std::fmt::Write as _;

use serde_json::Value;

use crate::matcore::{Lu, Mat, SymMat};
use crate::paramopt::OptResult;
use crate::symplectic::{block_diag, TriKind, UnitTriFactor};
use crate::DiagShift;

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ParseError(pub String);

type ParseResult<T> = std::result::Result<T, ParseError>;

fn bad(msg: impl Into<String>) -> ParseError {
    ParseError(msg.into())
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_row(row: &[f64]) -> String {
    let items: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", items.join(", "))
}

fn fmt_inline(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.rows()).map(|i| fmt_row(m.row(i))).collect();
    format!("[{}]", rows.join(", "))
}

fn push_rows(out: &mut String, m: &Mat, indent: &str) {
    out.push_str("[\n");
    for i in 0..m.rows() {
        let sep = if i + 1 < m.rows() { "," } else { "" };
        let _ = writeln!(out, "{indent}  {}{sep}", fmt_row(m.row(i)));
    }
    let _ = write!(out, "{indent}]");
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Json,
    Text,
}

/// `{"d": N, "matrix": [...]}` or the plain-text form: `d` on the first
/// line, then `2d` rows of `2d` numbers.
pub fn write_matrix(m: &Mat, format: MatrixFormat) -> String {
    let d = m.rows() / 2;
    let mut out = String::new();
    match format {
        MatrixFormat::Json => {
            let _ = write!(out, "{{\n  \"d\": {d},\n  \"matrix\": ");
            push_rows(&mut out, m, "  ");
            out.push_str("\n}\n");
        }
        MatrixFormat::Text => {
            let _ = writeln!(out, "{d}");
            for i in 0..m.rows() {
                let items: Vec<String> = m.row(i).iter().map(|&x| fmt_num(x)).collect();
                let _ = writeln!(out, "{}", items.join(" "));
            }
        }
    }
    out
}

fn as_f64(v: &Value) -> ParseResult<f64> {
    let x = v.as_f64().ok_or_else(|| bad(format!("expected a number, found {v}")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad("non-finite number"))
    }
}

fn as_usize(v: &Value, what: &str) -> ParseResult<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| bad(format!("\"{what}\" must be a non-negative integer")))
}

fn field<'a>(obj: &'a Value, key: &str) -> ParseResult<&'a Value> {
    obj.get(key).ok_or_else(|| bad(format!("missing \"{key}\"")))
}

fn parse_grid(v: &Value, rows: usize, cols: usize, what: &str) -> ParseResult<Mat> {
    let arr = v.as_array().ok_or_else(|| bad(format!("\"{what}\" must be an array of rows")))?;
    if arr.len() != rows {
        return Err(bad(format!("\"{what}\" has {} rows, expected {rows}", arr.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in arr.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| bad(format!("row {i} of \"{what}\" is not an array")))?;
        if row.len() != cols {
            return Err(bad(format!("row {i} of \"{what}\" has {} entries, expected {cols}", row.len())));
        }
        for x in row {
            data.push(as_f64(x)?);
        }
    }
    Mat::new(rows, cols, data).map_err(|e| bad(e.to_string()))
}

fn parse_json(text: &str) -> ParseResult<Value> {
    serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Reads either matrix format; `d` must agree with the number of rows.
pub fn parse_matrix(text: &str) -> ParseResult<Mat> {
    if looks_like_json(text) {
        let v = parse_json(text)?;
        let d = as_usize(field(&v, "d")?, "d")?;
        if d == 0 {
            return Err(bad("d must be at least 1"));
        }
        return parse_grid(field(&v, "matrix")?, 2 * d, 2 * d, "matrix");
    }
    let mut tokens = text.split_whitespace();
    let d: usize = tokens
        .next()
        .ok_or_else(|| bad("empty input"))?
        .parse()
        .map_err(|_| bad("first token must be the integer d"))?;
    if d == 0 {
        return Err(bad("d must be at least 1"));
    }
    let n = 2 * d;
    let data = tokens
        .map(|t| match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(bad(format!("bad number {t:?}"))),
        })
        .collect::<ParseResult<Vec<f64>>>()?;
    if data.len() != n * n {
        return Err(bad(format!("expected {} numbers after d, found {}", n * n, data.len())));
    }
    Mat::new(n, n, data).map_err(|e| bad(e.to_string()))
}

/// One entry of a chain document.
#[derive(Clone, Debug, PartialEq)]
pub enum DocFactor {
    Tri(UnitTriFactor),
    /// `diag(P, P⁻ᵀ)`
    Diag(Mat),
}

impl DocFactor {
    fn dense(&self) -> ParseResult<Mat> {
        match self {
            DocFactor::Tri(f) => Ok(f.dense()),
            DocFactor::Diag(p) => block_diag(p).map_err(|e| bad(format!("diag factor: {e}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainForm {
    /// The matrix is the product of the factors.
    Product,
    /// The factors multiply to `L` and the matrix is `LᵀL`.
    Gram,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainDoc {
    pub d: usize,
    pub form: ChainForm,
    pub diag_shift: Option<DiagShift>,
    /// Display order: the leftmost factor first.
    pub factors: Vec<DocFactor>,
    pub residual: f64,
}

impl ChainDoc {
    pub fn reconstruct(&self) -> ParseResult<Mat> {
        let mut acc = match &self.diag_shift {
            Some(shift) => UnitTriFactor::upper(shift.to_symmat()).dense(),
            None => Mat::identity(2 * self.d),
        };
        for f in &self.factors {
            acc = &acc * &f.dense()?;
        }
        Ok(match self.form {
            ChainForm::Product => acc,
            ChainForm::Gram => &acc.transpose() * &acc,
        })
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{\n  \"d\": {},", self.d);
        if self.form == ChainForm::Gram {
            out.push_str("  \"form\": \"gram\",\n");
        }
        if let Some(shift) = &self.diag_shift {
            let bits: Vec<&str> = shift.deltas().iter().map(|&b| if b { "1" } else { "0" }).collect();
            let _ = writeln!(out, "  \"diag_shift\": [{}],", bits.join(", "));
        }
        out.push_str("  \"factors\": [\n");
        for (k, f) in self.factors.iter().enumerate() {
            let sep = if k + 1 < self.factors.len() { "," } else { "" };
            let body = match f {
                DocFactor::Tri(t) => {
                    format!("\"kind\": \"{}\", \"S\": {}", t.kind.as_str(), fmt_inline(&t.s.to_dense()))
                }
                DocFactor::Diag(p) => format!("\"kind\": \"diag\", \"P\": {}", fmt_inline(p)),
            };
            let _ = writeln!(out, "    {{{body}}}{sep}");
        }
        let _ = write!(out, "  ],\n  \"residual\": {}\n}}\n", fmt_num(self.residual));
        out
    }

    pub fn parse(text: &str) -> ParseResult<Self> {
        let v = parse_json(text)?;
        let d = as_usize(field(&v, "d")?, "d")?;
        if d == 0 {
            return Err(bad("d must be at least 1"));
        }
        let form = match v.get("form").map(|f| f.as_str()) {
            None | Some(Some("product")) => ChainForm::Product,
            Some(Some("gram")) => ChainForm::Gram,
            Some(other) => return Err(bad(format!("unknown form {other:?}"))),
        };
        let diag_shift = match v.get("diag_shift") {
            None | Some(Value::Null) => None,
            Some(s) => {
                let arr = s.as_array().ok_or_else(|| bad("\"diag_shift\" must be an array"))?;
                let values = arr.iter().map(as_f64).collect::<ParseResult<Vec<f64>>>()?;
                if values.len() != d {
                    return Err(bad(format!("\"diag_shift\" has {} entries, expected {d}", values.len())));
                }
                Some(DiagShift::from_values(&values).map_err(|e| bad(e.to_string()))?)
            }
        };
        let list = field(&v, "factors")?.as_array().ok_or_else(|| bad("\"factors\" must be an array"))?;
        let factors = list.iter().map(|f| parse_factor(f, d)).collect::<ParseResult<Vec<_>>>()?;
        let residual = match v.get("residual") {
            Some(r) => as_f64(r)?,
            None => 0.0,
        };
        Ok(Self { d, form, diag_shift, factors, residual })
    }
}

fn parse_factor(v: &Value, d: usize) -> ParseResult<DocFactor> {
    let kind = field(v, "kind")?.as_str().ok_or_else(|| bad("\"kind\" must be a string"))?;
    let tri = |kind: TriKind| -> ParseResult<DocFactor> {
        let s = parse_grid(field(v, "S")?, d, d, "S")?;
        if s.asymmetry() > 1e-12 * s.frob_norm() {
            return Err(bad("factor matrix S is not symmetric"));
        }
        Ok(DocFactor::Tri(UnitTriFactor { kind, s: SymMat::from_dense(&s) }))
    };
    match kind {
        "upper" => tri(TriKind::Upper),
        "lower" => tri(TriKind::Lower),
        "diag" => {
            let p = parse_grid(field(v, "P")?, d, d, "P")?;
            Lu::with_default_tol(&p).map_err(|_| bad("diag factor P is singular"))?;
            Ok(DocFactor::Diag(p))
        }
        other => Err(bad(format!("unknown factor kind {other:?}"))),
    }
}

/// `θ*`, `H(θ*)` and the objective trace.
pub fn write_optimization(result: &OptResult, objective: &str) -> String {
    let nums = |xs: &[f64]| xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "{{\n  \"d\": {},", result.theta.d());
    let _ = writeln!(out, "  \"objective\": \"{objective}\",");
    let _ = writeln!(out, "  \"status\": \"{}\",", result.status.as_str());
    let _ = writeln!(out, "  \"iterations\": {},", result.iterations);
    let _ = writeln!(out, "  \"final_objective\": {},", fmt_num(result.objective()));
    let _ = writeln!(out, "  \"theta\": [{}],", nums(result.theta.as_slice()));
    out.push_str("  \"matrix\": ");
    push_rows(&mut out, result.h.matrix(), "  ");
    let _ = write!(out, ",\n  \"trace\": [{}]\n}}\n", nums(&result.trace));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 123456789.12345679, f64::MIN_POSITIVE, -0.0] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let v: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(v.as_f64().unwrap(), x);
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn matrix_documents_round_trip() {
        let m = Mat::from_rows(&[[0.1, 2.0], [-3.5e-7, 1.0 / 3.0]]).unwrap();
        for format in [MatrixFormat::Json, MatrixFormat::Text] {
            let text = write_matrix(&m, format);
            assert_eq!(parse_matrix(&text).unwrap(), m);
        }
        assert_eq!(
            write_matrix(&Mat::identity(2), MatrixFormat::Text),
            "1\n1.0000000000000000e0 0.0000000000000000e0\n0.0000000000000000e0 1.0000000000000000e0\n"
        );
    }

    #[test]
    fn matrix_parse_errors() {
        assert!(parse_matrix("{\"d\": 1, \"matrix\": [[1, 0], [0]]}").is_err());
        assert!(parse_matrix("{\"d\": 2, \"matrix\": [[1, 0], [0, 1]]}").is_err());
        assert!(parse_matrix("{\"d\": 0, \"matrix\": []}").is_err());
        assert!(parse_matrix("1\n1 0\n0").is_err());
        assert!(parse_matrix("1\n1 0\n0 x").is_err());
        assert!(parse_matrix("{\"d\": 1,").is_err());
        assert_eq!(parse_matrix("1\n1 0 0 1").unwrap(), Mat::identity(2));
    }

    #[test]
    fn chain_documents_round_trip() {
        let s = SymMat::new(2, vec![1.0, 0.5, -2.0]).unwrap();
        let doc = ChainDoc {
            d: 2,
            form: ChainForm::Product,
            diag_shift: Some(DiagShift::new(vec![true, false])),
            factors: vec![
                DocFactor::Tri(UnitTriFactor::lower(s.clone())),
                DocFactor::Diag(Mat::from_rows(&[[2.0, 1.0], [0.0, 1.0]]).unwrap()),
                DocFactor::Tri(UnitTriFactor::upper(s)),
            ],
            residual: 1.5e-16,
        };
        let text = doc.to_json();
        let back = ChainDoc::parse(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), text);
        let gram = ChainDoc { form: ChainForm::Gram, diag_shift: None, ..doc };
        assert_eq!(ChainDoc::parse(&gram.to_json()).unwrap(), gram);
    }

    #[test]
    fn chain_reconstruction() {
        let doc = ChainDoc {
            d: 1,
            form: ChainForm::Product,
            diag_shift: Some(DiagShift::new(vec![true])),
            factors: vec![DocFactor::Tri(UnitTriFactor::lower(SymMat::from_diag(&[1.0])))],
            residual: 0.0,
        };
        // [[1, 1], [0, 1]] · [[1, 0], [1, 1]]
        assert_eq!(doc.reconstruct().unwrap(), Mat::from_rows(&[[2.0, 1.0], [1.0, 1.0]]).unwrap());
        let gram = ChainDoc { form: ChainForm::Gram, diag_shift: None, ..doc };
        assert_eq!(gram.reconstruct().unwrap(), Mat::from_rows(&[[2.0, 1.0], [1.0, 1.0]]).unwrap());
    }

    #[test]
    fn chain_parse_errors() {
        let base = |factors: &str| format!("{{\"d\": 1, \"factors\": [{factors}], \"residual\": 0}}");
        assert!(ChainDoc::parse(&base("{\"kind\": \"upper\", \"S\": [[1]]}")).is_ok());
        assert!(ChainDoc::parse(&base("{\"kind\": \"side\", \"S\": [[1]]}")).is_err());
        assert!(ChainDoc::parse(&base("{\"kind\": \"diag\", \"P\": [[0]]}")).is_err());
        assert!(ChainDoc::parse(&base("{\"kind\": \"upper\", \"S\": [[1, 2]]}")).is_err());
        let asym = "{\"d\": 2, \"factors\": [{\"kind\": \"lower\", \"S\": [[1, 2], [3, 4]]}]}";
        assert!(ChainDoc::parse(asym).is_err());
        let shift = "{\"d\": 1, \"diag_shift\": [2], \"factors\": []}";
        assert!(ChainDoc::parse(shift).is_err());
    }
}
