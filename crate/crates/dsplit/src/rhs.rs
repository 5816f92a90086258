//! Right-hand-side evaluation contract.
//!
//! Vector fields are consumed through an *accumulate* contract:
//!
//! ```text
//! y ← y + c · f(t, x)
//! ```
//!
//! Evaluations scale-and-add directly into a caller-owned register instead
//! of returning a fresh vector. This is what lets the two-register steppers
//! run without allocating: the field writes straight into the register being
//! updated. The borrow checker enforces the contract's aliasing rule (`x`
//! and `y` are distinct buffers) at compile time.
//!
//! [`RhsSystem`] wraps a [`VectorField`] and owns the evaluation counter:
//! every call to [`RhsSystem::accumulate_rhs`] increments it by exactly one,
//! including calls with `c = 0`.

use crate::error::Result;
use crate::scalar::Scalar;
use crate::state::StateVector;

/// A vector field `f(t, x)` evaluated under the accumulate contract.
///
/// Implementations must not mutate `x` (the signature enforces this) and
/// should not allocate buffers of the state dimension per call; fields that
/// need internal workspace (e.g. spectral transforms) allocate it at
/// construction and report it via [`VectorField::scratch_registers`].
pub trait VectorField<S: Scalar> {
    /// State dimension `N`.
    fn dimension(&self) -> usize;

    /// True when `f` does not depend on `t`.
    fn autonomous(&self) -> bool {
        true
    }

    /// Accumulates `y += c * f(t, x)`.
    fn accumulate(&mut self, t: S, x: &[S], c: S, y: &mut [S]) -> Result<()>;

    /// Number of state-sized scratch buffers the field owns internally.
    fn scratch_registers(&self) -> usize {
        0
    }
}

/// A vector field together with its evaluation counter.
pub struct RhsSystem<S: Scalar> {
    field: Box<dyn VectorField<S>>,
    evals: u64,
}

impl<S: Scalar> RhsSystem<S> {
    pub fn new(field: impl VectorField<S> + 'static) -> Self {
        Self {
            field: Box::new(field),
            evals: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.field.dimension()
    }

    pub fn autonomous(&self) -> bool {
        self.field.autonomous()
    }

    /// Evaluations performed since construction or the last reset.
    pub fn eval_count(&self) -> u64 {
        self.evals
    }

    pub fn reset_eval_count(&mut self) {
        self.evals = 0;
    }

    /// State-sized scratch buffers held by the underlying field.
    pub fn scratch_registers(&self) -> usize {
        self.field.scratch_registers()
    }

    /// Accumulates `y += c * f(t, x)` and counts one evaluation.
    ///
    /// A zero coefficient still counts: the field is evaluated, its
    /// contribution just happens to vanish. Callers that want to avoid the
    /// work of a zero-weight evaluation must skip the call themselves.
    pub fn accumulate_rhs(
        &mut self,
        t: S,
        x: &StateVector<S>,
        c: S,
        y: &mut StateVector<S>,
    ) -> Result<()> {
        let n = self.dimension();
        x.check_len(n)?;
        y.check_len(n)?;
        self.field.accumulate(t, x.as_slice(), c, y.as_mut_slice())?;
        self.evals += 1;
        Ok(())
    }
}

/// Free-function form of [`RhsSystem::accumulate_rhs`].
pub fn accumulate_rhs<S: Scalar>(
    rhs: &mut RhsSystem<S>,
    t: S,
    x: &StateVector<S>,
    c: S,
    y: &mut StateVector<S>,
) -> Result<()> {
    rhs.accumulate_rhs(t, x, c, y)
}

/// Adapts a closure written against the accumulate contract.
struct FnField<S, F> {
    dimension: usize,
    autonomous: bool,
    f: F,
    _marker: std::marker::PhantomData<S>,
}

impl<S, F> VectorField<S> for FnField<S, F>
where
    S: Scalar,
    F: FnMut(S, &[S], S, &mut [S]),
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn autonomous(&self) -> bool {
        self.autonomous
    }

    fn accumulate(&mut self, t: S, x: &[S], c: S, y: &mut [S]) -> Result<()> {
        (self.f)(t, x, c, y);
        Ok(())
    }
}

/// Adapts a plain function `out = f(t, x)` to the accumulate contract.
///
/// The adapter evaluates into an internal buffer and then adds the scaled
/// result into `y`, so it costs one extra state-sized register over a
/// native accumulate implementation — visible in storage reports.
struct PlainFnField<S: Scalar, F> {
    dimension: usize,
    autonomous: bool,
    f: F,
    buffer: StateVector<S>,
}

impl<S, F> VectorField<S> for PlainFnField<S, F>
where
    S: Scalar,
    F: FnMut(S, &[S], &mut [S]),
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn autonomous(&self) -> bool {
        self.autonomous
    }

    fn accumulate(&mut self, t: S, x: &[S], c: S, y: &mut [S]) -> Result<()> {
        self.buffer.set_zero();
        (self.f)(t, x, self.buffer.as_mut_slice());
        for (yi, &fi) in y.iter_mut().zip(self.buffer.iter()) {
            *yi += c * fi;
        }
        Ok(())
    }

    fn scratch_registers(&self) -> usize {
        1
    }
}

impl<S: Scalar> RhsSystem<S> {
    /// Autonomous field from an accumulate-contract closure `(x, c, y)`.
    pub fn from_accumulate(
        dimension: usize,
        f: impl FnMut(&[S], S, &mut [S]) + 'static,
    ) -> Self {
        let mut f = f;
        Self::new(FnField {
            dimension,
            autonomous: true,
            f: move |_t: S, x: &[S], c: S, y: &mut [S]| f(x, c, y),
            _marker: std::marker::PhantomData,
        })
    }

    /// Time-dependent field from an accumulate-contract closure `(t, x, c, y)`.
    pub fn from_accumulate_nonautonomous(
        dimension: usize,
        f: impl FnMut(S, &[S], S, &mut [S]) + 'static,
    ) -> Self {
        Self::new(FnField {
            dimension,
            autonomous: false,
            f,
            _marker: std::marker::PhantomData,
        })
    }

    /// Autonomous field from a plain function `out = f(x)`.
    ///
    /// Costs one internal state-sized buffer; prefer the accumulate forms
    /// where register economy matters.
    pub fn from_plain_fn(dimension: usize, f: impl FnMut(&[S], &mut [S]) + 'static) -> Self {
        let mut f = f;
        Self::new(PlainFnField {
            dimension,
            autonomous: true,
            f: move |_t: S, x: &[S], out: &mut [S]| f(x, out),
            buffer: StateVector::zeros(dimension),
        })
    }
}

/// True when a stage coefficient is exactly zero (its evaluation is skipped).
pub(crate) fn is_zero<S: Scalar>(c: S) -> bool {
    c.is_zero()
}
