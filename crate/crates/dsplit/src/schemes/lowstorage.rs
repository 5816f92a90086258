//! Low-storage Runge-Kutta coefficient formats.
//!
//! Two classical two-register formats are supported as baselines:
//!
//! * **Williamson**: the method is given by per-stage pairs `(A_i, B_i)`
//!   driving the recursion `Δy ← A_i Δy + h f(y)`, `y ← y + B_i Δy`,
//!   with `A_1 = 0`.
//! * **van der Houwen** (often called 2R): slopes `k_i` are consumed as
//!   soon as they are produced, `y_i = y_{i−1} + h b_i k_i`, and each
//!   stage argument only corrects the last slope's weight. Its full
//!   tableau has `a_{ij} = b_j` for `j ≤ i−2` and a free subdiagonal.
//!
//! Both containers validate at construction by expanding to an explicit
//! [`ButcherTableau`] and checking consistency there, so the expansion is
//! the single source of truth for what the recursions compute.

use super::tableau::{ButcherTableau, TABLEAU_CONSISTENCY_TOL};
use crate::error::{Error, Result};
use crate::rhs::is_zero;
use crate::scalar::Scalar;

/// Coefficients for the Williamson two-register recursion.
#[derive(Debug, Clone)]
pub struct WilliamsonScheme<S: Scalar> {
    name: String,
    a: Vec<S>,
    b: Vec<S>,
}

impl<S: Scalar> WilliamsonScheme<S> {
    /// Validates and constructs a Williamson scheme.
    ///
    /// Requires `a.len() == b.len() ≥ 1`, finite entries, `a[0] = 0`
    /// (the first stage must start the increment register from scratch),
    /// and an expanded weight sum of 1.
    pub fn new(name: impl Into<String>, a: Vec<S>, b: Vec<S>) -> Result<Self> {
        let name = name.into();
        let invalid = |check: &'static str, detail: String| Error::InvalidScheme {
            scheme: name.clone(),
            check,
            detail,
        };
        if a.is_empty() || a.len() != b.len() {
            return Err(invalid(
                "stage_count",
                format!("{} increment and {} update coefficients", a.len(), b.len()),
            ));
        }
        if !a.iter().chain(b.iter()).all(|x| x.is_finite()) {
            return Err(invalid("finite_coefficients", "non-finite entry".into()));
        }
        if !is_zero(a[0]) {
            return Err(invalid(
                "leading_increment_weight",
                format!("A_1 = {:?}, expected 0", a[0]),
            ));
        }
        let scheme = Self { name, a, b };
        scheme.expand()?;
        Ok(scheme)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Per-stage increment-register decay factors `A_i` (first is 0).
    pub fn a(&self) -> &[S] {
        &self.a
    }

    /// Per-stage update weights `B_i`.
    pub fn b(&self) -> &[S] {
        &self.b
    }

    /// Net weight that slope `j` carries into the state after stage
    /// updates `j..=end` have run: `Σ_{l=j..end} B_l Π_{m=j+1..l} A_m`.
    fn slope_weight(&self, j: usize, end: usize) -> S {
        let mut product = S::one();
        let mut total = S::zero();
        for l in j..=end {
            if l > j {
                product = product * self.a[l];
            }
            total += self.b[l] * product;
        }
        total
    }

    fn expand(&self) -> Result<ButcherTableau<S>> {
        let s = self.stages();
        let rows = (0..s)
            .map(|i| (0..i).map(|j| self.slope_weight(j, i - 1)).collect())
            .collect();
        let weights = (0..s).map(|j| self.slope_weight(j, s - 1)).collect();
        ButcherTableau::explicit(self.name.clone(), rows, weights, None)
    }

    /// Expands the recursion into its equivalent explicit tableau.
    pub fn to_butcher(&self) -> ButcherTableau<S> {
        self.expand()
            .expect("expansion was validated at construction")
    }
}

/// Coefficients for the van der Houwen two-register recursion.
#[derive(Debug, Clone)]
pub struct VdhScheme<S: Scalar> {
    name: String,
    a_sub: Vec<S>,
    b: Vec<S>,
    b_hat: Option<Vec<S>>,
}

impl<S: Scalar> VdhScheme<S> {
    /// Validates and constructs a van der Houwen scheme from its weights
    /// and subdiagonal (`a_sub[i]` feeds stage `i+1`, so it has one entry
    /// fewer than `b`).
    pub fn new(
        name: impl Into<String>,
        a_sub: Vec<S>,
        b: Vec<S>,
        b_hat: Option<Vec<S>>,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |check: &'static str, detail: String| Error::InvalidScheme {
            scheme: name.clone(),
            check,
            detail,
        };
        if b.is_empty() || a_sub.len() + 1 != b.len() {
            return Err(invalid(
                "stage_count",
                format!(
                    "{} weights need {} subdiagonal entries, found {}",
                    b.len(),
                    b.len().saturating_sub(1),
                    a_sub.len()
                ),
            ));
        }
        if let Some(bh) = &b_hat {
            if bh.len() != b.len() {
                return Err(invalid(
                    "embedded_weights",
                    format!("{} embedded weights for {} stages", bh.len(), b.len()),
                ));
            }
            let sum = super::kahan_sum(bh.iter().copied());
            if (sum - S::one()).abs() > TABLEAU_CONSISTENCY_TOL {
                return Err(invalid("sum_b_hat", format!("Σb̂ = {sum:?}, expected 1")));
            }
        }
        let scheme = Self { name, a_sub, b, b_hat };
        scheme.expand()?;
        Ok(scheme)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Subdiagonal stage coefficients; entry `i` feeds stage `i+1`.
    pub fn a_sub(&self) -> &[S] {
        &self.a_sub
    }

    /// Update weights `b_i`.
    pub fn b(&self) -> &[S] {
        &self.b
    }

    /// Optional embedded weights for error estimation.
    pub fn b_hat(&self) -> Option<&[S]> {
        self.b_hat.as_deref()
    }

    fn expand(&self) -> Result<ButcherTableau<S>> {
        let s = self.stages();
        let rows = (0..s)
            .map(|i| {
                let mut row: Vec<S> = Vec::with_capacity(i);
                if i > 0 {
                    row.extend_from_slice(&self.b[..i - 1]);
                    row.push(self.a_sub[i - 1]);
                }
                row
            })
            .collect();
        ButcherTableau::explicit(
            self.name.clone(),
            rows,
            self.b.clone(),
            self.b_hat.clone(),
        )
    }

    /// Expands the recursion into its equivalent explicit tableau.
    pub fn to_butcher(&self) -> ButcherTableau<S> {
        self.expand()
            .expect("expansion was validated at construction")
    }
}

/// A scheme in one of the two supported two-register formats.
#[derive(Debug, Clone)]
pub enum LowStorageScheme<S: Scalar> {
    Williamson(WilliamsonScheme<S>),
    VanDerHouwen(VdhScheme<S>),
}

impl<S: Scalar> LowStorageScheme<S> {
    pub fn name(&self) -> &str {
        match self {
            Self::Williamson(w) => w.name(),
            Self::VanDerHouwen(v) => v.name(),
        }
    }

    pub fn stages(&self) -> usize {
        match self {
            Self::Williamson(w) => w.stages(),
            Self::VanDerHouwen(v) => v.stages(),
        }
    }

    /// Human-readable format tag used in listings and CSV output.
    pub fn format_name(&self) -> &'static str {
        match self {
            Self::Williamson(_) => "williamson",
            Self::VanDerHouwen(_) => "vdh",
        }
    }

    pub fn to_butcher(&self) -> ButcherTableau<S> {
        match self {
            Self::Williamson(w) => w.to_butcher(),
            Self::VanDerHouwen(v) => v.to_butcher(),
        }
    }
}
