//! JSON scheme files.
//!
//! User-supplied coefficient sets are read from a small JSON document:
//!
//! ```json
//! {
//!   "kind": "splitting",
//!   "name": "LT",
//!   "a": [[1.0, 0.0]],
//!   "b": [[1.0, 0.0]],
//!   "p": 1,
//!   "q": 2
//! }
//! ```
//!
//! Coefficients are always `[re, im]` pairs; real schemes use `im = 0`.
//! Four kinds are accepted:
//!
//! * `splitting` — `a`, `b` per stage; `p`/`q` orders required; optional
//!   `symmetric` flag (auto-detected when omitted).
//! * `williamson` — `a` holds the increment decay factors `A_i` (first 0),
//!   `b` the update weights `B_i`.
//! * `vdh` — `a` holds the subdiagonal (one entry fewer than `b`), `b` the
//!   weights, optional `b_hat` embedded weights.
//! * `butcher` — `a` holds the strictly lower triangle concatenated row by
//!   row (`0 + 1 + … + (s−1)` entries), `b` the weights, optional `b_hat`.
//!
//! Every loaded scheme passes through the same validating constructors as
//! the bundled catalogue, so inconsistent files are rejected with the name
//! of the failed check.

use super::lowstorage::{LowStorageScheme, VdhScheme, WilliamsonScheme};
use super::tableau::ButcherTableau;
use super::SplittingScheme;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// On-disk schema; numbers are `[re, im]` pairs.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    kind: String,
    name: String,
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b_hat: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symmetric: Option<bool>,
}

/// Any scheme a file can describe.
#[derive(Debug, Clone)]
pub enum LoadedScheme<S: Scalar> {
    Splitting(SplittingScheme<S>),
    LowStorage(LowStorageScheme<S>),
    Tableau(ButcherTableau<S>),
}

impl<S: Scalar> LoadedScheme<S> {
    pub fn name(&self) -> &str {
        match self {
            Self::Splitting(s) => s.name(),
            Self::LowStorage(l) => l.name(),
            Self::Tableau(t) => t.name(),
        }
    }

    /// The `kind` tag this scheme serializes under.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Splitting(_) => "splitting",
            Self::LowStorage(l) => l.format_name(),
            Self::Tableau(_) => "butcher",
        }
    }
}

/// Reads and validates a scheme file.
pub fn load_scheme_file<S: Scalar>(path: impl AsRef<Path>) -> Result<LoadedScheme<S>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_with_origin(&text, &path.display().to_string())
}

/// Parses a scheme from JSON text (same schema as [`load_scheme_file`]).
pub fn parse_scheme_json<S: Scalar>(text: &str) -> Result<LoadedScheme<S>> {
    parse_with_origin(text, "<json>")
}

fn parse_with_origin<S: Scalar>(text: &str, origin: &str) -> Result<LoadedScheme<S>> {
    let file: SchemeFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        detail: e.to_string(),
    })?;
    build(file, origin)
}

fn convert<S: Scalar>(pairs: &[[f64; 2]], scheme: &str) -> Result<Vec<S>> {
    pairs
        .iter()
        .map(|&[re, im]| {
            S::from_re_im(re, im).ok_or_else(|| Error::ComplexCoefficients {
                scheme: scheme.to_string(),
            })
        })
        .collect()
}

fn build<S: Scalar>(file: SchemeFile, origin: &str) -> Result<LoadedScheme<S>> {
    let name = file.name.clone();
    let a = convert::<S>(&file.a, &name)?;
    let b = convert::<S>(&file.b, &name)?;
    let b_hat = file
        .b_hat
        .as_ref()
        .map(|bh| convert::<S>(bh, &name))
        .transpose()?;
    let invalid = |check: &'static str, detail: String| Error::InvalidScheme {
        scheme: name.clone(),
        check,
        detail,
    };

    match file.kind.as_str() {
        "splitting" => {
            if b_hat.is_some() {
                return Err(invalid(
                    "embedded_weights",
                    "splitting schemes derive their error estimate from the register \
                     pair; b_hat is not allowed"
                        .into(),
                ));
            }
            let (Some(p), Some(q)) = (file.p, file.q) else {
                return Err(invalid(
                    "orders",
                    "splitting schemes require both p (component order) and q \
                     (averaged order)"
                        .into(),
                ));
            };
            Ok(LoadedScheme::Splitting(SplittingScheme::new(
                name,
                a,
                b,
                p,
                q,
                file.symmetric,
            )?))
        }
        "williamson" => {
            if b_hat.is_some() {
                return Err(invalid(
                    "embedded_weights",
                    "the two-register increment format has no embedded weights".into(),
                ));
            }
            Ok(LoadedScheme::LowStorage(LowStorageScheme::Williamson(
                WilliamsonScheme::new(name, a, b)?,
            )))
        }
        "vdh" => Ok(LoadedScheme::LowStorage(LowStorageScheme::VanDerHouwen(
            VdhScheme::new(name, a, b, b_hat)?,
        ))),
        "butcher" => {
            let s = b.len();
            let expected = s * (s.saturating_sub(1)) / 2;
            if a.len() != expected {
                return Err(invalid(
                    "stage_matrix",
                    format!(
                        "{} lower-triangle entries for {} stages, expected {}",
                        a.len(),
                        s,
                        expected
                    ),
                ));
            }
            let mut rows = Vec::with_capacity(s);
            let mut rest = a.as_slice();
            for i in 0..s {
                let (row, tail) = rest.split_at(i);
                rows.push(row.to_vec());
                rest = tail;
            }
            Ok(LoadedScheme::Tableau(ButcherTableau::explicit(
                name, rows, b, b_hat,
            )?))
        }
        other => Err(Error::Parse {
            path: origin.to_string(),
            detail: format!("unknown scheme kind {other:?}"),
        }),
    }
}

fn pairs<S: Scalar>(values: &[S]) -> Vec<[f64; 2]> {
    values.iter().map(|x| [x.re(), x.im()]).collect()
}

/// Serializes a scheme back to the file schema (exact `[re, im]` pairs).
pub fn scheme_to_json<S: Scalar>(scheme: &LoadedScheme<S>) -> String {
    let file = match scheme {
        LoadedScheme::Splitting(s) => SchemeFile {
            kind: "splitting".into(),
            name: s.name().into(),
            a: pairs(s.a()),
            b: pairs(s.b()),
            b_hat: None,
            p: Some(s.p_component()),
            q: Some(s.q_averaged()),
            symmetric: Some(s.is_symmetric()),
        },
        LoadedScheme::LowStorage(LowStorageScheme::Williamson(w)) => SchemeFile {
            kind: "williamson".into(),
            name: w.name().into(),
            a: pairs(w.a()),
            b: pairs(w.b()),
            b_hat: None,
            p: None,
            q: None,
            symmetric: None,
        },
        LoadedScheme::LowStorage(LowStorageScheme::VanDerHouwen(v)) => SchemeFile {
            kind: "vdh".into(),
            name: v.name().into(),
            a: pairs(v.a_sub()),
            b: pairs(v.b()),
            b_hat: v.b_hat().map(pairs),
            p: None,
            q: None,
            symmetric: None,
        },
        LoadedScheme::Tableau(t) => {
            let flat: Vec<[f64; 2]> = t
                .a()
                .iter()
                .flat_map(|row| row.iter().map(|x| [x.re(), x.im()]))
                .collect();
            SchemeFile {
                kind: "butcher".into(),
                name: t.name().into(),
                a: flat,
                b: pairs(t.weights()),
                b_hat: t.embedded_weights().map(pairs),
                p: None,
                q: None,
                symmetric: None,
            }
        }
    };
    serde_json::to_string_pretty(&file).expect("schema has no non-serializable values")
}
