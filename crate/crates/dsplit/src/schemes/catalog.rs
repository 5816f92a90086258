//! Bundled splitting schemes.
//!
//! | name   | s  | p | q | evals/step | symmetric | complex |
//! |--------|----|---|---|------------|-----------|---------|
//! | LT     | 1  | 1 | 2 | 2          | no        | no      |
//! | S2     | 2  | 2 | 2 | 3          | yes       | no      |
//! | BM4    | 7  | 4 | 4 | 13         | yes       | no      |
//! | BM6    | 11 | 6 | 6 | 21         | yes       | no      |
//! | 2N-S6  | 7  | 4 | 6 | 13         | yes       | no      |
//! | SPL24+ | 3  | 2 | 4 | 5          | yes       | yes     |
//! | SPL24- | 3  | 2 | 4 | 5          | yes       | yes     |
//!
//! Closure relations (`a₄ = 1 − 2(a₁+a₂+a₃)` and the like) are evaluated at
//! construction rather than baked in as rounded literals, so the consistency
//! sums hold to machine precision.

use super::SplittingScheme;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex64;

/// Names of the bundled splitting schemes, in catalogue order.
pub const BUILTIN_SPLITTING: &[&str] = &["LT", "S2", "BM4", "BM6", "2N-S6", "SPL24+", "SPL24-"];

struct RawScheme {
    name: &'static str,
    a: Vec<(f64, f64)>,
    b: Vec<(f64, f64)>,
    p: u32,
    q: u32,
}

fn re_seq(values: Vec<f64>) -> Vec<(f64, f64)> {
    values.into_iter().map(|v| (v, 0.0)).collect()
}

/// Lie-Trotter in duplicated form: first order per register, second order
/// averaged.
fn lt() -> RawScheme {
    RawScheme {
        name: "LT",
        a: re_seq(vec![1.0]),
        b: re_seq(vec![1.0]),
        p: 1,
        q: 2,
    }
}

/// Strang composition.
fn s2() -> RawScheme {
    RawScheme {
        name: "S2",
        a: re_seq(vec![0.5, 0.5]),
        b: re_seq(vec![1.0, 0.0]),
        p: 2,
        q: 2,
    }
}

/// 7-stage symmetric fourth-order composition with minimized principal
/// error, 13 evaluations per step.
fn bm4() -> RawScheme {
    const A1: f64 = 0.079_203_696_431_195_65;
    const A2: f64 = 0.353_172_906_049_774;
    const A3: f64 = -0.042_065_080_357_719_52;
    const B1: f64 = 0.209_515_106_613_362;
    const B2: f64 = -0.143_851_773_179_818;
    let a4 = 1.0 - 2.0 * (A1 + A2 + A3);
    let b3 = 0.5 - (B1 + B2);
    RawScheme {
        name: "BM4",
        a: re_seq(vec![A1, A2, A3, a4, A3, A2, A1]),
        b: re_seq(vec![B1, B2, b3, b3, B2, B1, 0.0]),
        p: 4,
        q: 4,
    }
}

/// 11-stage symmetric sixth-order composition, 21 evaluations per step.
fn bm6() -> RawScheme {
    const A1: f64 = 0.050_262_764_400_392_23;
    const A2: f64 = 0.413_514_300_428_344;
    const A3: f64 = 0.045_079_889_794_397_66;
    const A4: f64 = -0.188_054_853_819_569;
    const A5: f64 = 0.541_960_678_450_780;
    const B1: f64 = 0.148_816_447_901_042;
    const B2: f64 = -0.132_385_865_767_784;
    const B3: f64 = 0.067_307_604_692_185_01;
    const B4: f64 = 0.432_666_402_578_175;
    let a6 = 1.0 - 2.0 * (A1 + A2 + A3 + A4 + A5);
    let b5 = 0.5 - (B1 + B2 + B3 + B4);
    RawScheme {
        name: "BM6",
        a: re_seq(vec![A1, A2, A3, A4, A5, a6, A5, A4, A3, A2, A1]),
        b: re_seq(vec![B1, B2, B3, B4, b5, b5, B4, B3, B2, B1, 0.0]),
        p: 6,
        q: 6,
    }
}

/// 7-stage fourth-order composition whose register average is sixth order,
/// 13 evaluations per step.
fn ns6() -> RawScheme {
    const A1: f64 = 0.341_177_116_266_088_93;
    const A2: f64 = -0.115_563_978_808_529_43;
    const A3: f64 = 0.009_100_784_400_689_662_4;
    const B1: f64 = -0.190_485_988_653_493_96;
    const B2: f64 = -0.432_155_189_073_545_79;
    let a4 = 1.0 - 2.0 * (A1 + A2 + A3);
    let b3 = 0.5 - (B1 + B2);
    RawScheme {
        name: "2N-S6",
        a: re_seq(vec![A1, A2, A3, a4, A3, A2, A1]),
        b: re_seq(vec![B1, B2, b3, b3, B2, B1, 0.0]),
        p: 4,
        q: 6,
    }
}

/// 3-stage complex-coefficient composition: second order per register,
/// fourth order averaged. `sign` selects the conjugate root of
/// `12a² − 6a + 1 = 0`.
fn spl24(sign: f64) -> RawScheme {
    let alpha_re = 0.25;
    let alpha_im = sign * 3.0_f64.sqrt() / 12.0;
    RawScheme {
        name: if sign > 0.0 { "SPL24+" } else { "SPL24-" },
        a: vec![
            (alpha_re, alpha_im),
            (1.0 - 2.0 * alpha_re, -2.0 * alpha_im),
            (alpha_re, alpha_im),
        ],
        b: vec![(0.5, 0.0), (0.5, 0.0), (0.0, 0.0)],
        p: 2,
        q: 4,
    }
}

fn raw_scheme(name: &str) -> Option<RawScheme> {
    let canon = name.trim().to_ascii_uppercase();
    match canon.as_str() {
        "LT" => Some(lt()),
        "S2" => Some(s2()),
        "BM4" => Some(bm4()),
        "BM6" => Some(bm6()),
        "2N-S6" => Some(ns6()),
        "SPL24+" => Some(spl24(1.0)),
        "SPL24-" => Some(spl24(-1.0)),
        _ => None,
    }
}

fn build<S: Scalar>(raw: RawScheme) -> Result<SplittingScheme<S>> {
    let convert = |seq: &[(f64, f64)]| -> Result<Vec<S>> {
        seq.iter()
            .map(|&(re, im)| {
                S::from_re_im(re, im).ok_or_else(|| Error::ComplexCoefficients {
                    scheme: raw.name.to_string(),
                })
            })
            .collect()
    };
    let a = convert(&raw.a)?;
    let b = convert(&raw.b)?;
    SplittingScheme::new(raw.name, a, b, raw.p, raw.q, None)
}

/// Loads a bundled splitting scheme by name (case-insensitive).
///
/// Errors with [`Error::UnknownMethod`] for unknown names and
/// [`Error::ComplexCoefficients`] when a complex scheme is requested over a
/// real field.
pub fn load_scheme<S: Scalar>(name: &str) -> Result<SplittingScheme<S>> {
    let raw = raw_scheme(name).ok_or_else(|| Error::UnknownMethod(name.to_string()))?;
    build(raw)
}

/// A named collection of splitting schemes: the bundled catalogue plus any
/// user-registered additions.
pub struct SchemeCatalog<S: Scalar> {
    schemes: Vec<SplittingScheme<S>>,
}

impl<S: Scalar> SchemeCatalog<S> {
    /// Catalogue holding every bundled scheme representable in `S`
    /// (complex-coefficient schemes are omitted over a real field).
    pub fn with_builtins() -> Self {
        let schemes = BUILTIN_SPLITTING
            .iter()
            .filter_map(|name| load_scheme::<S>(name).ok())
            .collect();
        Self { schemes }
    }

    pub fn empty() -> Self {
        Self { schemes: Vec::new() }
    }

    /// Adds a scheme; names must be unique (case-insensitive).
    pub fn register(&mut self, scheme: SplittingScheme<S>) -> Result<()> {
        if self.get(scheme.name()).is_some() {
            return Err(Error::Config(format!(
                "scheme `{}` is already registered",
                scheme.name()
            )));
        }
        self.schemes.push(scheme);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&SplittingScheme<S>> {
        self.schemes
            .iter()
            .find(|s| s.name().eq_ignore_ascii_case(name.trim()))
    }

    /// Registered names in declaration order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.schemes.iter().map(|s| s.name())
    }
}

/// Catalogue row describing one bundled scheme.
#[derive(Debug, Clone)]
pub struct SchemeInfo {
    pub name: String,
    pub stages: usize,
    pub p_component: u32,
    pub q_averaged: u32,
    pub evals_per_step: usize,
    pub symmetric: bool,
    pub complex: bool,
}

/// Metadata for every bundled scheme, in catalogue order.
pub fn builtin_scheme_info() -> Vec<SchemeInfo> {
    BUILTIN_SPLITTING
        .iter()
        .map(|name| {
            let s = load_scheme::<Complex64>(name)
                .expect("bundled schemes are representable over the complex field");
            SchemeInfo {
                name: s.name().to_string(),
                stages: s.stages(),
                p_component: s.p_component(),
                q_averaged: s.q_averaged(),
                evals_per_step: s.evals_per_step(),
                symmetric: s.is_symmetric(),
                complex: s.has_complex_coefficients(),
            }
        })
        .collect()
}
