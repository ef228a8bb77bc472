//! Job files: `{command?, P, a, b, Q?, options?}`.
//!
//! Polynomials are coefficient lists in ascending degree, or `{"coeffs": [...]}`
//! as emitted in reports. Each coefficient and point is a number or `[re, im]`.

use polymoment::{Complex64, ComplexPoly, Tolerances};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Scalar> for Complex64 {
    fn from(s: Scalar) -> Self {
        match s {
            Scalar::Real(re) => Complex64::new(re, 0.0),
            Scalar::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PolyInput {
    List(Vec<Scalar>),
    Object { coeffs: Vec<Scalar> },
}

impl From<PolyInput> for ComplexPoly {
    fn from(p: PolyInput) -> Self {
        let (PolyInput::List(c) | PolyInput::Object { coeffs: c }) = p;
        ComplexPoly::new(c.into_iter().map(Complex64::from).collect())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobOptions {
    pub moments: Option<usize>,
    pub truncation: Option<i64>,
    pub tol: Option<Tolerances>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    command: Option<String>,
    #[serde(rename = "P")]
    p: Option<PolyInput>,
    a: Option<Scalar>,
    b: Option<Scalar>,
    #[serde(rename = "Q")]
    q: Option<PolyInput>,
    #[serde(default)]
    options: JobOptions,
    /// Free-form provenance, ignored.
    #[allow(dead_code)]
    meta: Option<Value>,
}

#[derive(Debug, Clone, Default)]
pub struct Job {
    pub command: Option<String>,
    pub p: Option<ComplexPoly>,
    pub a: Option<Complex64>,
    pub b: Option<Complex64>,
    pub q: Option<ComplexPoly>,
    pub options: JobOptions,
}

pub fn parse(text: &str) -> Result<Job, String> {
    let raw: RawJob = serde_json::from_str(text).map_err(|e| e.to_string())?;
    Ok(Job {
        command: raw.command,
        p: raw.p.map(ComplexPoly::from),
        a: raw.a.map(Complex64::from),
        b: raw.b.map(Complex64::from),
        q: raw.q.map(ComplexPoly::from),
        options: raw.options,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_both_polynomial_forms() {
        let job = parse(r#"{"P": [0, 0, 1], "a": -1, "b": [1, 0], "Q": {"coeffs": [[0, 0], [1, 0]]}}"#).unwrap();
        assert_eq!(job.p.unwrap().degree(), Some(2));
        assert_eq!(job.q.unwrap().degree(), Some(1));
        assert_eq!(job.a, Some(Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn partial_tolerances_keep_defaults() {
        let job = parse(r#"{"options": {"tol": {"phi": 1e-6}}}"#).unwrap();
        let tol = job.options.tol.unwrap();
        assert_eq!(tol.phi, 1e-6);
        assert_eq!(tol.root, Tolerances::default().root);
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(parse(r#"{"P": [1, 1], "extra": 1}"#).is_err());
        assert!(parse(r#"{"P": "z^2"}"#).is_err());
    }
}
