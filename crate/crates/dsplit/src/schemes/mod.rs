//! Coefficient schemes.
//!
//! The central type is [`SplittingScheme`]: a pair of coefficient sequences
//! `(a₁…a_s, b₁…b_s)` that drive the two-register stepper in
//! [`crate::stepper`]. Each scheme carries two orders: `p_component`, the
//! order of either register on its own, and `q_averaged`, the order of the
//! register average. The module also provides classical Butcher tableaux
//! ([`tableau`]), the Williamson and van-der-Houwen low-storage formats
//! ([`lowstorage`]), and a JSON file format for user-supplied coefficients
//! ([`file`]).

mod catalog;
mod file;
mod lowstorage;
mod tableau;

pub use catalog::{builtin_scheme_info, load_scheme, SchemeCatalog, SchemeInfo, BUILTIN_SPLITTING};
pub use file::{load_scheme_file, parse_scheme_json, scheme_to_json, LoadedScheme};
pub use lowstorage::{LowStorageScheme, VdhScheme, WilliamsonScheme};
pub use tableau::{
    builtin_tableau, dsplit_to_butcher, ButcherTableau, BUILTIN_TABLEAUX, TABLEAU_CONSISTENCY_TOL,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance for the `Σa = Σb = 1` consistency checks.
///
/// Coefficient sums are evaluated with compensated summation, so honest
/// coefficient sets land well inside this bound.
pub const CONSISTENCY_TOL: f64 = 1e-15;

/// Tolerance for recognizing palindromic coefficient patterns.
const SYMMETRY_TOL: f64 = 1e-15;

/// Compensated (Kahan) sum. For complex scalars the compensation acts
/// componentwise, which is exactly Kahan on each part.
pub(crate) fn kahan_sum<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    let mut sum = S::zero();
    let mut comp = S::zero();
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Compensated running prefix sums: `out[i] = v₀ + … + vᵢ`.
pub(crate) fn kahan_prefix<S: Scalar>(values: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(values.len());
    let mut sum = S::zero();
    let mut comp = S::zero();
    for &v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        out.push(sum);
    }
    out
}

/// Which palindromic coefficient pattern a symmetric scheme follows.
///
/// All three describe the same time-symmetry of the composed map; they
/// differ only in where the structural zero sits and how the two sequences
/// reflect onto each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryPattern {
    /// `a_s = 0`, `aᵢ = a_{s−i}`, `bᵢ = b_{s+1−i}` (1-based).
    TrailingAZero,
    /// `a₁ = 0`, `a_{i+1} = a_{s+1−i}`, `bᵢ = b_{s+1−i}` (1-based).
    LeadingAZero,
    /// `b_s = 0`, `aᵢ = a_{s+1−i}`, `bᵢ = b_{s−i}` (1-based).
    TrailingBZero,
}

/// Structural summary returned by [`SplittingScheme::verify_consistency`].
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// Compensated `Σaᵢ` as `(re, im)`.
    pub sum_a: (f64, f64),
    /// Compensated `Σbᵢ` as `(re, im)`.
    pub sum_b: (f64, f64),
    /// Palindromic pattern matched, if any.
    pub symmetry: Option<SymmetryPattern>,
    /// Field evaluations one forward step performs (zero coefficients are
    /// skipped by the stepper).
    pub evals_per_step: usize,
}

/// Splitting coefficients `(a, b)` with their declared orders.
///
/// One step advances the register pair `(u, v)` through
/// `v += h·aᵢ·f(u)`, `u += h·bᵢ·f(v)` for `i = 1…s`. The average
/// `(u_s + v_s)/2` is accurate to order `q_averaged`; each register alone to
/// order `p_component`; `‖u_s − v_s‖` is the embedded error estimate.
#[derive(Debug, Clone)]
pub struct SplittingScheme<S: Scalar> {
    name: String,
    a: Vec<S>,
    b: Vec<S>,
    /// Compensated prefix sums of `a`: the stage nodes of the `v` register.
    nodes_a: Vec<S>,
    /// Compensated prefix sums of `b`: the stage nodes of the `u` register.
    nodes_b: Vec<S>,
    p_component: u32,
    q_averaged: u32,
    symmetry: Option<SymmetryPattern>,
}

impl<S: Scalar> SplittingScheme<S> {
    /// Validates and constructs a scheme.
    ///
    /// Checks performed: nonempty matching lengths, finite coefficients,
    /// `Σa` and `Σb` within [`CONSISTENCY_TOL`] of 1, `1 ≤ p ≤ q`, and —
    /// when `symmetric` is declared — agreement between the flag and the
    /// detected palindromic pattern. Pass `symmetric: None` to auto-detect.
    pub fn new(
        name: impl Into<String>,
        a: Vec<S>,
        b: Vec<S>,
        p_component: u32,
        q_averaged: u32,
        symmetric: Option<bool>,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |check: &'static str, detail: String| Error::InvalidScheme {
            scheme: name.clone(),
            check,
            detail,
        };

        if a.is_empty() || a.len() != b.len() {
            return Err(invalid(
                "stage_count",
                format!("need equal nonempty sequences, got |a| = {}, |b| = {}", a.len(), b.len()),
            ));
        }
        if !a.iter().chain(b.iter()).all(|c| c.is_finite()) {
            return Err(invalid("finite_coefficients", "non-finite coefficient".into()));
        }

        let sum_a = kahan_sum(a.iter().copied());
        let sum_b = kahan_sum(b.iter().copied());
        let one = S::one();
        if (sum_a - one).abs() > CONSISTENCY_TOL {
            return Err(invalid("sum_a", format!("Σa = {sum_a:?}, expected 1")));
        }
        if (sum_b - one).abs() > CONSISTENCY_TOL {
            return Err(invalid("sum_b", format!("Σb = {sum_b:?}, expected 1")));
        }

        if p_component < 1 {
            return Err(invalid("orders", "p_component must be at least 1".into()));
        }
        if q_averaged < p_component {
            return Err(invalid(
                "orders",
                format!("q_averaged = {q_averaged} below p_component = {p_component}"),
            ));
        }

        let symmetry = detect_symmetry(&a, &b);
        match symmetric {
            Some(true) if symmetry.is_none() => {
                return Err(invalid(
                    "symmetry",
                    "declared symmetric but no palindromic pattern matches".into(),
                ));
            }
            Some(false) if symmetry.is_some() => {
                return Err(invalid(
                    "symmetry",
                    format!("declared non-symmetric but coefficients match {symmetry:?}"),
                ));
            }
            _ => {}
        }

        let nodes_a = kahan_prefix(&a);
        let nodes_b = kahan_prefix(&b);
        Ok(Self {
            name,
            a,
            b,
            nodes_a,
            nodes_b,
            p_component,
            q_averaged,
            symmetry,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of splitting stages `s`.
    pub fn stages(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[S] {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    /// Stage node of the `v` register after stage `i` (0-based): `Σ_{j≤i} aⱼ`.
    pub fn node_a(&self, i: usize) -> S {
        self.nodes_a[i]
    }

    /// Stage node of the `u` register after stage `i` (0-based): `Σ_{j≤i} bⱼ`.
    pub fn node_b(&self, i: usize) -> S {
        self.nodes_b[i]
    }

    /// Stage node of the `u` register *before* stage `i`: `Σ_{j<i} bⱼ`.
    pub fn node_b_before(&self, i: usize) -> S {
        if i == 0 {
            S::zero()
        } else {
            self.nodes_b[i - 1]
        }
    }

    /// Order of a single register chained on its own.
    pub fn p_component(&self) -> u32 {
        self.p_component
    }

    /// Order of the register average.
    pub fn q_averaged(&self) -> u32 {
        self.q_averaged
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry.is_some()
    }

    /// The palindromic pattern this scheme matches, if symmetric.
    pub fn symmetry_pattern(&self) -> Option<SymmetryPattern> {
        self.symmetry
    }

    /// True when any coefficient has a nonzero imaginary part.
    pub fn has_complex_coefficients(&self) -> bool {
        self.a.iter().chain(self.b.iter()).any(|c| c.im() != 0.0)
    }

    /// Field evaluations per forward step; zero coefficients cost nothing.
    pub fn evals_per_step(&self) -> usize {
        self.a.iter().filter(|c| !c.is_zero()).count()
            + self.b.iter().filter(|c| !c.is_zero()).count()
    }

    /// Recomputes the structural checks and returns them as a report.
    pub fn verify_consistency(&self) -> ConsistencyReport {
        let sum_a = kahan_sum(self.a.iter().copied());
        let sum_b = kahan_sum(self.b.iter().copied());
        ConsistencyReport {
            sum_a: (sum_a.re(), sum_a.im()),
            sum_b: (sum_b.re(), sum_b.im()),
            symmetry: detect_symmetry(&self.a, &self.b),
            evals_per_step: self.evals_per_step(),
        }
    }
}

fn close<S: Scalar>(x: S, y: S) -> bool {
    (x - y).abs() <= SYMMETRY_TOL
}

fn detect_symmetry<S: Scalar>(a: &[S], b: &[S]) -> Option<SymmetryPattern> {
    let s = a.len();
    let zero = S::zero();

    // a_s = 0, aᵢ = a_{s−i}, bᵢ = b_{s+1−i}
    let trailing_a = close(a[s - 1], zero)
        && (0..s - 1).all(|i| close(a[i], a[s - 2 - i]))
        && (0..s).all(|i| close(b[i], b[s - 1 - i]));
    if trailing_a {
        return Some(SymmetryPattern::TrailingAZero);
    }

    // a₁ = 0, a_{i+1} = a_{s+1−i}, bᵢ = b_{s+1−i}
    let leading_a = close(a[0], zero)
        && (1..s).all(|i| close(a[i], a[s - i]))
        && (0..s).all(|i| close(b[i], b[s - 1 - i]));
    if leading_a {
        return Some(SymmetryPattern::LeadingAZero);
    }

    // b_s = 0, aᵢ = a_{s+1−i}, bᵢ = b_{s−i}
    let trailing_b = close(b[s - 1], zero)
        && (0..s).all(|i| close(a[i], a[s - 1 - i]))
        && (0..s - 1).all(|i| close(b[i], b[s - 2 - i]));
    if trailing_b {
        return Some(SymmetryPattern::TrailingBZero);
    }

    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inconsistent_sum() {
        let err = SplittingScheme::new("bad", vec![0.45, 0.45], vec![1.0, 0.0], 1, 1, None)
            .unwrap_err();
        match err {
            Error::InvalidScheme { check, .. } => assert_eq!(check, "sum_a"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_order_inversion() {
        let err =
            SplittingScheme::new("bad", vec![1.0], vec![1.0], 2, 1, None).unwrap_err();
        assert!(matches!(err, Error::InvalidScheme { check: "orders", .. }));
    }

    #[test]
    fn rejects_symmetry_flag_mismatch() {
        // a = [1], b = [1] matches no palindromic pattern.
        let err =
            SplittingScheme::new("bad", vec![1.0], vec![1.0], 1, 2, Some(true)).unwrap_err();
        assert!(matches!(err, Error::InvalidScheme { check: "symmetry", .. }));

        // Strang coefficients do match one; declaring them asymmetric is an error.
        let err = SplittingScheme::new("bad", vec![0.5, 0.5], vec![1.0, 0.0], 2, 2, Some(false))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidScheme { check: "symmetry", .. }));
    }

    #[test]
    fn detects_all_three_patterns() {
        // trailing a-zero: a = [x, x, 0] with palindromic b
        assert_eq!(
            detect_symmetry(&[0.5, 0.5, 0.0], &[0.25, 0.5, 0.25]),
            Some(SymmetryPattern::TrailingAZero)
        );
        // leading a-zero
        assert_eq!(
            detect_symmetry(&[0.0, 0.5, 0.5], &[0.25, 0.5, 0.25]),
            Some(SymmetryPattern::LeadingAZero)
        );
        // trailing b-zero (the bundled convention)
        assert_eq!(
            detect_symmetry(&[0.5, 0.5], &[1.0, 0.0]),
            Some(SymmetryPattern::TrailingBZero)
        );
        assert_eq!(detect_symmetry(&[1.0], &[1.0]), None);
    }

    #[test]
    fn kahan_prefix_tracks_running_sums() {
        let vals = [0.1, 0.2, 0.3, 0.4];
        let prefix = kahan_prefix(&vals);
        assert_eq!(prefix.len(), 4);
        assert!((prefix[3] - 1.0).abs() < 1e-16);
        assert!((prefix[1] - 0.30000000000000004).abs() < 1e-16 || (prefix[1] - 0.3).abs() < 1e-16);
    }

    #[test]
    fn evals_per_step_skips_zero_coefficients() {
        let s = SplittingScheme::new("strang", vec![0.5, 0.5], vec![1.0, 0.0], 2, 2, None)
            .unwrap();
        assert_eq!(s.evals_per_step(), 3);
        assert!(s.is_symmetric());
        let lt = SplittingScheme::new("lt", vec![1.0], vec![1.0], 1, 2, None).unwrap();
        assert_eq!(lt.evals_per_step(), 2);
        assert!(!lt.is_symmetric());
    }
}
