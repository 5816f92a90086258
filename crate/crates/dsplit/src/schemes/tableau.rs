//! Explicit Butcher tableaux.
//!
//! [`ButcherTableau`] is the reference representation every other scheme
//! format expands into, which makes it the oracle for equivalence tests:
//! a low-storage or splitting stepper must reproduce the generic tableau
//! stepper on its expanded tableau to rounding accuracy.

use super::{kahan_sum, SplittingScheme};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance for user-supplied tableau weight sums; looser than the
/// splitting-scheme bound because hand-rounded decimal tableaux are common.
pub const TABLEAU_CONSISTENCY_TOL: f64 = 1e-13;

/// Names of the bundled classical tableaux.
pub const BUILTIN_TABLEAUX: &[&str] = &["RK2", "RK4"];

/// An explicit Runge-Kutta tableau: strictly lower-triangular stage matrix,
/// weights, optional embedded weights, and nodes computed as row sums.
#[derive(Debug, Clone)]
pub struct ButcherTableau<S: Scalar> {
    name: String,
    a: Vec<Vec<S>>,
    b: Vec<S>,
    b_hat: Option<Vec<S>>,
    c: Vec<S>,
}

impl<S: Scalar> ButcherTableau<S> {
    /// Validates and constructs an explicit tableau.
    ///
    /// `a` holds one row per stage; row `i` must have exactly `i` entries
    /// (the strictly lower triangle). Nodes `c` are always derived as
    /// compensated row sums.
    pub fn explicit(
        name: impl Into<String>,
        a: Vec<Vec<S>>,
        b: Vec<S>,
        b_hat: Option<Vec<S>>,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |check: &'static str, detail: String| Error::InvalidScheme {
            scheme: name.clone(),
            check,
            detail,
        };

        let s = b.len();
        if s == 0 {
            return Err(invalid("stage_count", "empty weight vector".into()));
        }
        if a.len() != s {
            return Err(invalid(
                "stage_matrix",
                format!("{} rows for {} stages", a.len(), s),
            ));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != i {
                return Err(invalid(
                    "stage_matrix",
                    format!("row {i} has {} entries, expected {i}", row.len()),
                ));
            }
        }
        let embedded = b_hat.iter().flatten();
        let mut all = a.iter().flatten().chain(b.iter()).chain(embedded);
        if !all.all(|x| x.is_finite()) {
            return Err(invalid("finite_coefficients", "non-finite entry".into()));
        }

        let sum_b = kahan_sum(b.iter().copied());
        if (sum_b - S::one()).abs() > TABLEAU_CONSISTENCY_TOL {
            return Err(invalid("sum_b", format!("Σb = {sum_b:?}, expected 1")));
        }
        if let Some(bh) = &b_hat {
            if bh.len() != s {
                return Err(invalid(
                    "embedded_weights",
                    format!("{} embedded weights for {} stages", bh.len(), s),
                ));
            }
            let sum = kahan_sum(bh.iter().copied());
            if (sum - S::one()).abs() > TABLEAU_CONSISTENCY_TOL {
                return Err(invalid("sum_b_hat", format!("Σb̂ = {sum:?}, expected 1")));
            }
        }

        let c = a.iter().map(|row| kahan_sum(row.iter().copied())).collect();
        Ok(Self { name, a, b, b_hat, c })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Strictly lower-triangular stage rows; row `i` has `i` entries.
    pub fn a(&self) -> &[Vec<S>] {
        &self.a
    }

    pub fn weights(&self) -> &[S] {
        &self.b
    }

    pub fn embedded_weights(&self) -> Option<&[S]> {
        self.b_hat.as_deref()
    }

    /// Stage nodes (row sums of the stage matrix).
    pub fn c(&self) -> &[S] {
        &self.c
    }
}

/// Loads a bundled classical tableau: `RK2` (the trapezoidal predictor-
/// corrector) or `RK4` (the classical fourth-order method).
pub fn builtin_tableau<S: Scalar>(name: &str) -> Result<ButcherTableau<S>> {
    let r = |x: f64| S::from_re(x);
    match name.trim().to_ascii_uppercase().as_str() {
        "RK2" => ButcherTableau::explicit(
            "RK2",
            vec![vec![], vec![r(1.0)]],
            vec![r(0.5), r(0.5)],
            None,
        ),
        "RK4" => ButcherTableau::explicit(
            "RK4",
            vec![
                vec![],
                vec![r(0.5)],
                vec![r(0.0), r(0.5)],
                vec![r(0.0), r(0.0), r(1.0)],
            ],
            vec![
                r(1.0 / 6.0),
                r(1.0 / 3.0),
                r(1.0 / 3.0),
                r(1.0 / 6.0),
            ],
            None,
        ),
        other => Err(Error::UnknownMethod(other.to_string())),
    }
}

/// Expands a splitting scheme into its equivalent `2s`-stage explicit
/// tableau.
///
/// Stage order follows computability: `u₀, v₁, u₁, v₂, …, u_{s−1}, v_s`.
/// Even rows (0-based) are the `u` chain, odd rows the `v` chain. The main
/// weights are the interleaved half-coefficients `½[a₁, b₁, a₂, b₂, …]`
/// (the register average) and the embedded weights are the `u_s` row
/// `[0, b₁, 0, b₂, …]`.
pub fn dsplit_to_butcher<S: Scalar>(scheme: &SplittingScheme<S>) -> ButcherTableau<S> {
    let s = scheme.stages();
    let half = S::from_re(0.5);
    let zero = S::zero();

    let mut rows: Vec<Vec<S>> = Vec::with_capacity(2 * s);
    rows.push(Vec::new()); // u₀ = x
    for i in 1..=s {
        // v_i = x + h Σ_{j≤i} a_j f(u_{j−1}) — a_j sits at column 2(j−1).
        let mut row = vec![zero; 2 * i - 1];
        for j in 1..=i {
            row[2 * (j - 1)] = scheme.a()[j - 1];
        }
        rows.push(row);
        if i < s {
            // u_i = x + h Σ_{j≤i} b_j f(v_j) — b_j sits at column 2j−1.
            let mut row = vec![zero; 2 * i];
            for j in 1..=i {
                row[2 * j - 1] = scheme.b()[j - 1];
            }
            rows.push(row);
        }
    }

    let mut weights = Vec::with_capacity(2 * s);
    let mut embedded = Vec::with_capacity(2 * s);
    for j in 0..s {
        weights.push(half * scheme.a()[j]);
        weights.push(half * scheme.b()[j]);
        embedded.push(zero);
        embedded.push(scheme.b()[j]);
    }

    ButcherTableau::explicit(
        format!("{}(avg)", scheme.name()),
        rows,
        weights,
        Some(embedded),
    )
    .expect("expansion of a validated splitting scheme is always consistent")
}
