use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::l1_algebra::{SparseL1Matrix, TailModel};
use crate::lattice::{power_tail_bound, MultiIndex, TruncationWindow};
use crate::scalar::{cabs, czero, Cx, Real};

/// `(−Δ)^{ν/2} u + Q u = 0` on `𝕋ⁿ` with `Q(x) = Σ_k g_k e^{2πix·k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HillProblem<T: Real> {
    dim: usize,
    nu: T,
    potential: BTreeMap<MultiIndex, Cx<T>>,
}

impl<T: Real> HillProblem<T> {
    pub fn new(dim: usize, nu: T, potential: BTreeMap<MultiIndex, Cx<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if !(nu > T::from_usize_lossy(dim)) {
            return Err(Error::InfeasibleOrder { nu: nu.to_f64_lossy(), dim });
        }
        if let Some(k) = potential.keys().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
        }
        Ok(HillProblem { dim, nu, potential })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn potential(&self) -> &BTreeMap<MultiIndex, Cx<T>> {
        &self.potential
    }

    /// `Σ |g_k|`.
    pub fn potential_mass(&self) -> T {
        self.potential.values().fold(T::zero(), |acc, v| acc + cabs(*v))
    }

    /// Largest `|k|∞` with `g_k` present.
    pub fn support_radius(&self) -> usize {
        self.potential.keys().map(MultiIndex::max_norm).max().unwrap_or(0)
    }

    /// The problem with potential `Q + λ`.
    pub fn shifted(&self, lambda: T) -> Self {
        let mut potential = self.potential.clone();
        *potential.entry(MultiIndex::zero(self.dim)).or_insert_with(czero) += Cx::new(lambda, T::zero());
        HillProblem { potential, ..self.clone() }
    }

    /// `(2π)^ν |k|^ν`.
    pub fn multiplier(&self, k: &MultiIndex) -> T {
        T::two_pi().powf(self.nu) * T::from_i64_lossy(k.norm_sq()).powf(self.nu / T::cst(2.0))
    }

    /// Bound on `Σ_{|k|∞ > m} ((2π)^ν|k|^ν + 1)^{-1}`.
    pub fn shell_tail(&self, m: i64) -> T {
        let scale = T::two_pi().powf(-self.nu);
        if m < 0 {
            T::one() + scale * power_tail_bound(self.dim, self.nu, 0)
        } else {
            scale * power_tail_bound(self.dim, self.nu, m)
        }
    }
}

/// `A[k,m] = g_{k−m} / ((2π)^ν|k|^ν + 1)` for `k, m ∈ w`.
///
/// The tail model bounds the unstored mass outside window `N` by
/// `Σ|g| · Σ_{|k|∞ > N−s} ((2π)^ν|k|^ν+1)^{-1}` with `s` the potential's
/// support radius; windows at least `s` inside `w` have no unstored coupling.
pub fn build_hill_matrix<T: Real>(p: &HillProblem<T>, w: TruncationWindow) -> Result<(SparseL1Matrix<T>, TailModel<T>)> {
    if w.dim != p.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, found: w.dim });
    }
    let mut entries = Vec::new();
    for k in w.iter() {
        let d = p.multiplier(&k) + T::one();
        for (l, g) in &p.potential {
            let m = &k - l;
            if w.contains(&m) {
                entries.push((k.clone(), m, *g / d));
            }
        }
    }
    let a = SparseL1Matrix::from_entries(p.dim, entries)?;
    if p.potential.is_empty() {
        return Ok((a, TailModel::exact()));
    }
    let mass = p.potential_mass();
    let s = p.support_radius();
    let r = w.radius;
    let shell = p.clone();
    let total = move |n: usize| mass * shell.shell_tail(n as i64 - s as i64);
    let tail = TailModel::user_bound(total.clone())
        .with_coupling(move |n| if n + s <= r { T::zero() } else { total(n) })
        .with_complete_radius(r)
        .with_decay_exponent(p.nu - T::from_usize_lossy(p.dim));
    Ok((a, tail))
}
