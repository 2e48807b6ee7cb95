use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{symbol_to_matrix, ToroidalSymbol};
use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::l1_algebra::LatticeVector;
use crate::lattice::{bracket, forward_difference, lower_set, MultiIndex, TruncationWindow};
use crate::scalar::{cabs, cx, FftReal, Real};

use super::grid::grid_point;

/// `k ↦ (2π)^ν |k|^ν` (order `ν`).
pub fn fractional_laplacian_symbol<T: Real>(nu: T, dim: usize) -> Result<ToroidalSymbol<T>> {
    if !(nu > T::zero()) {
        return Err(Error::InvalidArgument(format!("nu must be positive, got {nu}")));
    }
    let c = T::two_pi().powf(nu);
    let half = nu / T::cst(2.0);
    Ok(ToroidalSymbol::multiplier(dim, move |k| cx(c * T::from_i64_lossy(k.norm_sq()).powf(half), T::zero()))
        .with_order(nu))
}

/// `(Σ_k ⟨k⟩^{2s} |û(k)|²)^{1/2}`.
pub fn sobolev_norm<T: Real>(coeffs: &LatticeVector<T>, s: T) -> T {
    coeffs
        .iter()
        .fold(T::zero(), |acc, (k, v)| acc + (T::one() + T::from_i64_lossy(k.norm_sq())).powf(s) * v.norm_sqr())
        .sqrt()
}

fn x_samples<T: Real>(dim: usize, x_grid: usize) -> Vec<Vec<T>> {
    let g = x_grid.max(1);
    (0..g.pow(dim as u32)).map(|i| grid_point(dim, g, i)).collect()
}

/// Sample point where the ellipticity ratio is smallest.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T: Real> {
    pub x: Vec<T>,
    pub k: MultiIndex,
    /// `Re σ(x,k) / ⟨k⟩^m`.
    pub ratio: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticityReport<T: Real> {
    pub passed: bool,
    pub c0: T,
    pub n0: usize,
    pub worst: Option<Witness<T>>,
}

/// Sweeps `x` over the grid and `k` over `w` for `Re σ(x,k) ≥ C₀⟨k⟩^m`,
/// `|k| ≥ n₀`.
///
/// `n₀` is the smallest integer beyond which every sampled ratio is positive
/// and `C₀` the smallest ratio there. The check passes only when
/// `n₀ ≤ N/2`, so that the bound is seen on a nontrivial range of shells.
pub fn strong_ellipticity_check<T: Real>(
    sigma: &ToroidalSymbol<T>,
    m: T,
    w: TruncationWindow,
    x_grid: usize,
) -> EllipticityReport<T> {
    let xs = x_samples::<T>(sigma.dim(), x_grid);
    let pts: Vec<MultiIndex> = w.iter().collect();
    let per_k: Vec<(usize, Witness<T>)> = pts
        .into_par_iter()
        .map(|k| {
            let weight = bracket::<T>(&k).powf(m);
            let (x, ratio) = xs
                .iter()
                .map(|x| (x, sigma.evaluate(x, &k).re / weight))
                .fold(None, |best: Option<(&Vec<T>, T)>, (x, r)| match best {
                    Some((_, b)) if b <= r => best,
                    _ => Some((x, r)),
                })
                .expect("grid has at least one point");
            let shell = T::from_i64_lossy(k.norm_sq()).sqrt().floor().to_f64_lossy() as usize;
            (shell, Witness { x: x.clone(), k, ratio })
        })
        .collect();

    let mut by_shell: BTreeMap<usize, &Witness<T>> = BTreeMap::new();
    for (s, wit) in &per_k {
        let e = by_shell.entry(*s).or_insert(wit);
        if wit.ratio < e.ratio {
            *e = wit;
        }
    }
    let mut suffix: Vec<(usize, &Witness<T>)> = Vec::new();
    let mut best: Option<&Witness<T>> = None;
    for (s, wit) in by_shell.iter().rev() {
        if best.is_none_or(|b| wit.ratio < b.ratio) {
            best = Some(wit);
        }
        suffix.push((*s, best.expect("set above")));
    }
    suffix.reverse();
    let global = suffix.first().map(|(_, w)| (*w).clone());
    let found = suffix.iter().find(|(_, wit)| wit.ratio > T::zero());
    match found {
        Some((s, wit)) if *s <= w.radius / 2 => {
            // Shells are floors of |k|, so every point with |k| ≥ s is covered.
            EllipticityReport { passed: true, c0: wit.ratio, n0: *s, worst: Some((*wit).clone()) }
        }
        _ => EllipticityReport { passed: false, c0: T::zero(), n0: found.map_or(w.radius + 1, |(s, _)| *s), worst: global },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFit<T: Real> {
    pub alpha: MultiIndex,
    /// Fitted decay exponent of `sup |Δ^α σ|`, i.e. `m − |α|`.
    pub exponent: Option<T>,
    /// `max sup |Δ^α σ| / ⟨k⟩^{m̂ − |α|}` over the fitted shells.
    pub constant: T,
    /// Every sampled difference was exactly zero.
    pub vanishing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport<T: Real> {
    /// Estimated order `m̂`.
    pub order: Option<T>,
    pub fits: Vec<AlphaFit<T>>,
    /// Shells `|k|∞ = r` used, `r ∈ [first, last]`.
    pub shells: (usize, usize),
}

fn least_squares_slope<T: Real>(pts: &[(T, T)]) -> Option<T> {
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_usize_lossy(pts.len());
    let (sx, sy) = pts.iter().fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + *x, b + *y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + (*x - mx) * (*y - my), b + (*x - mx) * (*x - mx)));
    (sxx > T::zero()).then(|| sxy / sxx)
}

/// Fits the decay of `sup_x |Δ_k^α σ(x,k)|` against `⟨k⟩` over the shells
/// `max(1, N/4) ≤ |k|∞ ≤ N`, for every `α ≤ alpha_max`. Advisory only.
pub fn symbol_order_diagnostic<T: Real>(
    sigma: &ToroidalSymbol<T>,
    alpha_max: &MultiIndex,
    w: TruncationWindow,
    x_grid: usize,
) -> Result<OrderReport<T>> {
    if alpha_max.dim() != sigma.dim() || w.dim != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), found: alpha_max.dim() });
    }
    if alpha_max.coords().iter().any(|&a| a < 0) {
        return Err(Error::InvalidOrder(alpha_max.coords().to_vec()));
    }
    let first = (w.radius / 4).max(1);
    let shells = (w.radius + 1).saturating_sub(first);
    if shells < 4 {
        return Err(Error::FitWindowTooSmall { shells });
    }
    let xs = x_samples::<T>(sigma.dim(), x_grid);
    let pts: Vec<MultiIndex> = w.iter().filter(|k| k.max_norm() >= first).collect();

    let mut sups: Vec<(MultiIndex, Vec<T>)> = Vec::new();
    for alpha in lower_set(alpha_max) {
        let per_point: Vec<(usize, T)> = pts
            .par_iter()
            .map(|k| {
                let s = xs.iter().fold(T::zero(), |acc, x| {
                    let d = forward_difference(|q: &MultiIndex| sigma.evaluate(x, q), &alpha, k)
                        .expect("alpha validated");
                    acc.max(cabs(d))
                });
                (k.max_norm(), s)
            })
            .collect();
        let mut shell_sup = vec![T::zero(); shells];
        for (r, s) in per_point {
            let slot = &mut shell_sup[r - first];
            *slot = slot.max(s);
        }
        sups.push((alpha, shell_sup));
    }

    let log_bracket = |r: usize| (T::one() + T::from_usize_lossy(r * r)).sqrt().ln();
    let slopes: Vec<Option<T>> = sups
        .iter()
        .map(|(_, s)| {
            let data: Vec<(T, T)> = s
                .iter()
                .enumerate()
                .filter(|(_, v)| **v > T::zero())
                .map(|(i, v)| (log_bracket(first + i), v.ln()))
                .collect();
            least_squares_slope(&data)
        })
        .collect();
    let order = sups
        .iter()
        .zip(&slopes)
        .find_map(|((alpha, _), s)| s.map(|s| s + T::from_i64_lossy(alpha.order())));

    let fits = sups
        .into_iter()
        .zip(slopes)
        .map(|((alpha, s), exponent)| {
            let vanishing = s.iter().all(|v| *v == T::zero());
            let constant = match order {
                Some(m) => {
                    let e = m - T::from_i64_lossy(alpha.order());
                    s.iter().enumerate().fold(T::zero(), |acc, (i, v)| {
                        acc.max(*v / log_bracket(first + i).exp().powf(e))
                    })
                }
                None => T::zero(),
            };
            AlphaFit { alpha, exponent, constant, vanishing }
        })
        .collect();
    Ok(OrderReport { order, fits, shells: (first, w.radius) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1Membership<T: Real> {
    pub in_l1: bool,
    /// Order used for the decision (metadata, else the fitted estimate).
    pub order: Option<T>,
    /// `(N, ‖A restricted to window N‖₁)`.
    pub ladder: Vec<(usize, T)>,
    pub limit: Option<T>,
    pub discrepancy: Option<T>,
    pub warning: Option<String>,
}

/// Decides whether the symbol's matrix is in ℓ¹: requires order `m < −n`,
/// shrinking ladder increments, and an extrapolated ladder limit stable to
/// `tol`.
pub fn l1_membership_check<T: FftReal>(
    sigma: &ToroidalSymbol<T>,
    radii: &[usize],
    tol: T,
) -> Result<L1Membership<T>> {
    if radii.is_empty() || radii.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidArgument("ladder radii must be nonempty and strictly increasing".into()));
    }
    let dim = sigma.dim();
    let n = T::from_usize_lossy(dim);
    let r_max = *radii.last().expect("nonempty");
    let order = match sigma.order() {
        Some(m) => Some(m),
        None => symbol_order_diagnostic(sigma, &MultiIndex::zero(dim), TruncationWindow::new(dim, r_max), 8)
            .ok()
            .and_then(|r| r.order),
    };

    let (a, _) = symbol_to_matrix(sigma, TruncationWindow::new(dim, r_max))?;
    let mut by_radius = vec![T::zero(); r_max + 1];
    for (j, k, v) in a.entries() {
        by_radius[j.max_norm().max(k.max_norm())] += cabs(v);
    }
    let mut cumulative = Vec::with_capacity(r_max + 1);
    let mut acc = T::zero();
    for v in by_radius {
        acc += v;
        cumulative.push(acc);
    }
    let ladder: Vec<(usize, T)> = radii.iter().map(|&r| (r, cumulative[r])).collect();

    let steps: Vec<T> = ladder.windows(2).map(|p| (p[1].1 - p[0].1).abs()).collect();
    let shrinking = steps.len() >= 2 && steps.windows(2).all(|d| d[1] < d[0]);

    let mut warning = None;
    let decay = match order {
        None => {
            warning = Some("order unknown and could not be estimated".to_string());
            None
        }
        Some(m) if (m + n).abs() <= T::cst(1e-12) * n => {
            warning = Some(format!("order {m} equals -n: boundary case, not summable"));
            None
        }
        Some(m) if m > -n => None,
        Some(m) => Some(-(m + n)),
    };
    let extrapolated = decay.and_then(|p| {
        let rr: Vec<usize> = ladder.iter().map(|(r, _)| *r).collect();
        let vals: Vec<_> = ladder.iter().map(|(_, v)| cx(*v, T::zero())).collect();
        richardson(&rr, &vals, p, 5)
    });
    let limit = extrapolated.map(|e| e.value.re);
    let discrepancy = extrapolated.map(|e| e.discrepancy);
    let in_l1 = decay.is_some() && shrinking && discrepancy.is_some_and(|d| d <= tol);
    Ok(L1Membership { in_l1, order, ladder, limit, discrepancy, warning })
}
