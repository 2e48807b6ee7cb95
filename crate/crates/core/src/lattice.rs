//! Multi-indices on the lattice ℤⁿ, box truncation windows, the Japanese
//! bracket weight and forward finite differences.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{czero, Cx, Real};

/// A point of ℤⁿ.
///
/// Ordering is lexicographic on the coordinates, which is the canonical order
/// used for every enumeration and reduction in the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        let coords = coords.into();
        assert!(!coords.is_empty(), "multi-index needs at least one coordinate");
        MultiIndex(coords)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex::new(vec![0; dim])
    }

    /// The unit vector `δ_j` (zero-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut c = vec![0; dim];
        c[axis] = 1;
        MultiIndex(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `max_i |k_i|`.
    pub fn max_norm(&self) -> usize {
        self.0.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// `Σ k_i²`.
    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    /// `|k|` for a multi-index of nonnegative entries (order of a difference).
    pub fn order(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn euclidean<T: Real>(&self) -> T {
        T::from_i64_lossy(self.norm_sq()).sqrt()
    }

    /// `x · k` for a point of the torus.
    pub fn dot<T: Real>(&self, x: &[T]) -> T {
        self.0
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (&k, &xi)| acc + T::from_i64_lossy(k) * xi)
    }

    /// Componentwise `self ≤ other`.
    pub fn le_componentwise(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn check_dim(&self, other: &MultiIndex) {
        assert_eq!(self.dim(), other.dim(), "multi-index dimensions differ");
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex::new(v)
    }
}

impl<const N: usize> From<[i64; N]> for MultiIndex {
    fn from(v: [i64; N]) -> Self {
        MultiIndex::new(v.to_vec())
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        self.check_dim(rhs);
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        self.check_dim(rhs);
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

/// The box `[-N, N]ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruncationWindow {
    pub dim: usize,
    pub radius: usize,
}

impl TruncationWindow {
    pub fn new(dim: usize, radius: usize) -> Self {
        assert!(dim >= 1, "window dimension must be at least 1");
        TruncationWindow { dim, radius }
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    /// `(2N+1)ⁿ`.
    pub fn cardinality(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        k.dim() == self.dim && k.max_norm() <= self.radius
    }

    /// Position of `k` in [`enumerate_window`] order, if inside.
    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let side = self.side() as i64;
        let r = self.radius as i64;
        Some(k.coords().iter().fold(0i64, |acc, &c| acc * side + (c + r)) as usize)
    }

    /// Inverse of [`TruncationWindow::position`].
    pub fn point(&self, mut pos: usize) -> MultiIndex {
        let side = self.side();
        let mut coords = vec![0i64; self.dim];
        for c in coords.iter_mut().rev() {
            *c = (pos % side) as i64 - self.radius as i64;
            pos /= side;
        }
        MultiIndex(coords)
    }

    pub fn iter(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.cardinality()).map(move |p| self.point(p))
    }
}

/// `⟨k⟩ = (1 + |k|²)^{1/2}`.
pub fn bracket<T: Real>(k: &MultiIndex) -> T {
    (T::one() + T::from_i64_lossy(k.norm_sq())).sqrt()
}

/// All points of the window in lexicographic order.
pub fn enumerate_window(w: TruncationWindow) -> Vec<MultiIndex> {
    w.iter().collect()
}

/// Upper bound on `Σ_{|k|∞ > M} |k|∞^{-s}` over `ℤⁿ` for `s > n`.
///
/// Shell `|k|∞ = r` has at most `2n·3^{n-1}·r^{n-1}` points; the sum over
/// `r > M` is compared with `∫_M^∞ r^{n-1-s} dr`. A negative `M` includes the
/// origin with weight one.
pub fn power_tail_bound<T: Real>(dim: usize, s: T, m: i64) -> T {
    let n = T::from_usize_lossy(dim);
    assert!(s > n, "power tail needs s > n");
    let shell = T::cst(2.0) * n * T::cst(3.0).powi(dim as i32 - 1);
    let gap = s - n;
    match m {
        m if m < 0 => T::one() + shell * (T::one() + T::one() / gap),
        0 => shell * (T::one() + T::one() / gap),
        m => shell * T::from_i64_lossy(m).powf(-gap) / gap,
    }
}

fn binomial(n: i64, k: i64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Δ_k^α φ(k) = Σ_{β≤α} (−1)^{|α−β|} (α choose β) φ(k+β)`.
pub fn forward_difference<T, F>(phi: F, alpha: &MultiIndex, k: &MultiIndex) -> Result<Cx<T>>
where
    T: Real,
    F: Fn(&MultiIndex) -> Cx<T>,
{
    if alpha.coords().iter().any(|&a| a < 0) {
        return Err(Error::InvalidOrder(alpha.coords().to_vec()));
    }
    if alpha.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: alpha.dim() });
    }
    let mut acc = czero::<T>();
    for beta in lower_set(alpha) {
        let weight: f64 = alpha
            .coords()
            .iter()
            .zip(beta.coords())
            .map(|(&a, &b)| binomial(a, b))
            .product();
        let sign = if (alpha.order() - beta.order()) % 2 == 0 { 1.0 } else { -1.0 };
        acc += phi(&(k + &beta)) * T::cst(sign * weight);
    }
    Ok(acc)
}

/// All `β` with `0 ≤ β ≤ α` componentwise, in lexicographic order.
pub fn lower_set(alpha: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![Vec::with_capacity(alpha.dim())];
    for &a in alpha.coords() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a.max(0)).map(move |b| {
                    let mut p = prefix.clone();
                    p.push(b);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(MultiIndex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn real(x: f64) -> Cx<f64> {
        cx(x, 0.0)
    }

    /// One-step operator iterated axis by axis.
    fn iterated(phi: &dyn Fn(&MultiIndex) -> Cx<f64>, alpha: &MultiIndex, k: &MultiIndex) -> Cx<f64> {
        match alpha.coords().iter().position(|&a| a > 0) {
            None => phi(k),
            Some(axis) => {
                let mut lower = alpha.coords().to_vec();
                lower[axis] -= 1;
                let lower = MultiIndex::new(lower);
                let shifted = k + &MultiIndex::unit(k.dim(), axis);
                iterated(phi, &lower, &shifted) - iterated(phi, &lower, k)
            }
        }
    }

    #[test]
    fn bracket_values() {
        assert_eq!(bracket::<f64>(&MultiIndex::zero(3)), 1.0);
        assert!((bracket::<f64>(&[3, 4].into()) - 26f64.sqrt()).abs() < 1e-15);
        assert!((bracket::<f64>(&[1].into()) - 2f64.sqrt()).abs() < 1e-15);
        let k: MultiIndex = [-2, 5, 1].into();
        assert_eq!(bracket::<f64>(&k), bracket::<f64>(&-&k));
    }

    #[test]
    fn window_enumeration() {
        assert_eq!(enumerate_window(TruncationWindow::new(2, 0)), vec![MultiIndex::zero(2)]);
        let w1: Vec<MultiIndex> = enumerate_window(TruncationWindow::new(1, 1));
        assert_eq!(w1, vec![[-1].into(), [0].into(), [1].into()]);
        let w2 = enumerate_window(TruncationWindow::new(2, 1));
        assert_eq!(w2.len(), 9);
        assert_eq!(w2[0], [-1, -1].into());
        assert_eq!(w2[8], [1, 1].into());
        assert!(w2.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn window_position_roundtrip_and_nesting() {
        let w = TruncationWindow::new(3, 2);
        for (i, k) in w.iter().enumerate() {
            assert_eq!(w.position(&k), Some(i));
        }
        let outer = TruncationWindow::new(3, 3);
        assert!(w.iter().all(|k| outer.contains(&k)));
        assert_eq!(w.position(&[3, 0, 0].into()), None);
    }

    #[test]
    fn elementary_differences() {
        let lin = |k: &MultiIndex| real(k.coords()[0] as f64);
        let sq = |k: &MultiIndex| real((k.coords()[0] * k.coords()[0]) as f64);
        let bil = |k: &MultiIndex| real((k.coords()[0] * k.coords()[1]) as f64);
        for k0 in -3..4 {
            assert_eq!(forward_difference(lin, &[1].into(), &[k0].into()).unwrap(), real(1.0));
            assert_eq!(forward_difference(sq, &[2].into(), &[k0].into()).unwrap(), real(2.0));
            assert_eq!(forward_difference(bil, &[1, 1].into(), &[k0, 2 - k0].into()).unwrap(), real(1.0));
        }
    }

    #[test]
    fn negative_order_rejected() {
        let phi = |_: &MultiIndex| real(1.0);
        assert_eq!(
            forward_difference(phi, &[1, -1].into(), &[0, 0].into()),
            Err(Error::InvalidOrder(vec![1, -1]))
        );
    }

    #[test]
    fn closed_formula_matches_iterated_steps() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for dim in 1..=2usize {
            let table: Vec<f64> = (0..9usize.pow(dim as u32)).map(|_| rng.gen_range(-50..50) as f64).collect();
            let w = TruncationWindow::new(dim, 4);
            let phi = |k: &MultiIndex| real(table[w.position(k).unwrap()]);
            let amax = MultiIndex::new(vec![3; dim]);
            for alpha in lower_set(&amax) {
                let k = MultiIndex::new(vec![-4; dim]);
                let a = forward_difference(phi, &alpha, &k).unwrap();
                assert_eq!(a, iterated(&phi, &alpha, &k), "alpha {alpha:?}");
            }
        }
    }

    #[test]
    fn power_tail_dominates_direct_sums() {
        for (dim, s) in [(1usize, 2.0f64), (1, 1.5), (2, 3.0), (2, 2.5)] {
            let w = TruncationWindow::new(dim, 60);
            for m in [-1i64, 0, 1, 3, 10] {
                let direct: f64 = w
                    .iter()
                    .filter(|k| k.max_norm() as i64 > m)
                    .map(|k| if k.is_zero() { 1.0 } else { (k.max_norm() as f64).powf(-s) })
                    .sum();
                assert!(direct <= power_tail_bound(dim, s, m), "dim {dim} s {s} m {m}");
            }
        }
    }

    #[test]
    fn annihilates_low_degree_polynomials() {
        let cubic = |k: &MultiIndex| {
            let x = k.coords()[0] as f64;
            real(2.0 * x * x * x - x + 5.0)
        };
        for k0 in -5..5 {
            assert_eq!(forward_difference(cubic, &[4].into(), &[k0].into()).unwrap(), real(0.0));
        }
    }
}
