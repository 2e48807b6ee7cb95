use std::fmt;
use std::sync::Arc;

use crate::scalar::Real;

type BoundFn<T> = Arc<dyn Fn(usize) -> T + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    /// Every entry is stored.
    ExactFinite,
    /// Rigorous bound supplied by the caller.
    UserBound,
    /// Bound fitted from decay data; not a proof.
    Estimated,
    /// The operator is known not to be in ℓ¹.
    NotSummable,
}

/// Control of the ℓ¹ mass a [`SparseL1Matrix`](super::SparseL1Matrix) does
/// not store.
///
/// `bound(N)` bounds the mass of unstored entries lying outside the window
/// `[-N,N]ⁿ × [-N,N]ⁿ`. When a complete radius `R` is set, every entry inside
/// the `R`-window is stored, so queries at `N > R` are answered with
/// `bound(R)`. An optional coupling bound controls the part of that mass that
/// links the window to its complement (one index inside, one outside); it
/// defaults to the full bound.
#[derive(Clone)]
pub struct TailModel<T: Real> {
    kind: TailKind,
    bound: Option<BoundFn<T>>,
    coupling: Option<BoundFn<T>>,
    complete_radius: Option<usize>,
    decay_exponent: Option<T>,
    note: Option<String>,
}

impl<T: Real> fmt::Debug for TailModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TailModel")
            .field("kind", &self.kind)
            .field("complete_radius", &self.complete_radius)
            .field("decay_exponent", &self.decay_exponent)
            .field("note", &self.note)
            .finish_non_exhaustive()
    }
}

impl<T: Real> Default for TailModel<T> {
    fn default() -> Self {
        Self::exact()
    }
}

impl<T: Real> TailModel<T> {
    pub fn exact() -> Self {
        TailModel {
            kind: TailKind::ExactFinite,
            bound: None,
            coupling: None,
            complete_radius: None,
            decay_exponent: None,
            note: None,
        }
    }

    pub fn user_bound(f: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        TailModel { kind: TailKind::UserBound, bound: Some(Arc::new(f)), ..Self::exact() }
    }

    pub fn estimated(f: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        TailModel { kind: TailKind::Estimated, bound: Some(Arc::new(f)), ..Self::exact() }
    }

    pub fn not_summable(reason: impl Into<String>) -> Self {
        TailModel { kind: TailKind::NotSummable, note: Some(reason.into()), ..Self::exact() }
    }

    /// `c · max(N,1)^{-p}`, with decay exponent `p` for extrapolation.
    pub fn power_law(c: T, p: T) -> Self {
        Self::user_bound(move |n| c * T::from_usize_lossy(n.max(1)).powf(-p)).with_decay_exponent(p)
    }

    /// `c · r^N` with `0 ≤ r < 1`.
    pub fn geometric(c: T, r: T) -> Self {
        Self::user_bound(move |n| c * r.powi(n.min(i32::MAX as usize) as i32))
    }

    pub fn with_coupling(mut self, f: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        self.coupling = Some(Arc::new(f));
        self
    }

    pub fn with_complete_radius(mut self, r: usize) -> Self {
        self.complete_radius = Some(r);
        self
    }

    /// Leading exponent `p` of the truncation error `~ N^{-p}`.
    pub fn with_decay_exponent(mut self, p: T) -> Self {
        self.decay_exponent = Some(p);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn kind(&self) -> TailKind {
        self.kind
    }

    pub fn is_summable(&self) -> bool {
        self.kind != TailKind::NotSummable
    }

    pub fn decay_exponent(&self) -> Option<T> {
        self.decay_exponent
    }

    pub fn complete_radius(&self) -> Option<usize> {
        self.complete_radius
    }

    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    fn effective(&self, n: usize) -> usize {
        self.complete_radius.map_or(n, |r| n.min(r))
    }

    /// Bound on unstored mass outside window `n`.
    pub fn unstored_mass(&self, n: usize) -> T {
        match (&self.kind, &self.bound) {
            (TailKind::ExactFinite, _) => T::zero(),
            (TailKind::NotSummable, _) => T::max_value().unwrap_or_else(T::one),
            (_, Some(f)) => f(self.effective(n)),
            (_, None) => T::zero(),
        }
    }

    /// Bound on the unstored mass coupling window `n` to its complement.
    pub fn unstored_coupling(&self, n: usize) -> T {
        match (&self.kind, &self.coupling) {
            (TailKind::ExactFinite, _) => T::zero(),
            (TailKind::UserBound | TailKind::Estimated, Some(f)) => f(self.effective(n)),
            _ => self.unstored_mass(n),
        }
    }

    /// Spot-checks that the bound is nonincreasing and nonnegative on `0..=max_radius`.
    pub fn is_monotone_up_to(&self, max_radius: usize) -> bool {
        if !matches!(self.kind, TailKind::UserBound | TailKind::Estimated) {
            return true;
        }
        let vals: Vec<T> = (0..=max_radius).map(|n| self.unstored_mass(n)).collect();
        vals.iter().all(|v| *v >= T::zero() && v.is_finite()) && vals.windows(2).all(|w| w[1] <= w[0])
    }
}
