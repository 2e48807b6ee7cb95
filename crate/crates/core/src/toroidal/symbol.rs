use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{bracket, MultiIndex, TruncationWindow};
use crate::scalar::{cx, czero, unit_phase, FftReal, Cx, Real};

use super::grid::{fft_nd, grid_point};

pub type IndexRule<T> = Arc<dyn Fn(&MultiIndex) -> Cx<T> + Send + Sync>;
/// `(l, k) ↦ σ̂(l, k)`.
pub type TableRule<T> = Arc<dyn Fn(&MultiIndex, &MultiIndex) -> Cx<T> + Send + Sync>;
/// `(x, k) ↦ σ(x, k)`.
pub type SampledRule<T> = Arc<dyn Fn(&[T], &MultiIndex) -> Cx<T> + Send + Sync>;

#[derive(Clone)]
pub enum Representation<T: Real> {
    /// `σ(x,k) = m(k)`.
    Multiplier(IndexRule<T>),
    /// `σ(x,k) = Σ_l q̂(l) e^{2πix·l}`.
    Multiplication(BTreeMap<MultiIndex, Cx<T>>),
    /// Partial Fourier coefficients in `x`, zero for `|l|∞ > band`.
    Table { rule: TableRule<T>, band: usize },
    /// Black-box symbol; coefficients by FFT on a grid of size `grid`.
    Sampled { rule: SampledRule<T>, band: usize, grid: usize },
    Sum(Vec<ToroidalSymbol<T>>),
}

/// Symbol `σ(x, k)` on `𝕋ⁿ × ℤⁿ` with optional order metadata.
///
/// Quantization: `Tf(x) = Σ_k e^{2πix·k} σ(x,k) f̂(k)`.
#[derive(Clone)]
pub struct ToroidalSymbol<T: Real> {
    dim: usize,
    repr: Representation<T>,
    order: Option<T>,
    /// `σ(·,k) = 0` for `|k|∞` beyond this radius.
    k_support: Option<usize>,
}

impl<T: Real> fmt::Debug for ToroidalSymbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Representation::Multiplier(_) => "Multiplier".to_string(),
            Representation::Multiplication(c) => format!("Multiplication({} coefficients)", c.len()),
            Representation::Table { band, .. } => format!("Table(band {band})"),
            Representation::Sampled { band, grid, .. } => format!("Sampled(band {band}, grid {grid})"),
            Representation::Sum(t) => format!("Sum({} terms)", t.len()),
        };
        f.debug_struct("ToroidalSymbol")
            .field("dim", &self.dim)
            .field("repr", &kind)
            .field("order", &self.order)
            .field("k_support", &self.k_support)
            .finish()
    }
}

impl<T: Real> ToroidalSymbol<T> {
    fn build(dim: usize, repr: Representation<T>) -> Self {
        assert!(dim >= 1, "symbol dimension must be at least 1");
        ToroidalSymbol { dim, repr, order: None, k_support: None }
    }

    pub fn multiplier(dim: usize, m: impl Fn(&MultiIndex) -> Cx<T> + Send + Sync + 'static) -> Self {
        Self::build(dim, Representation::Multiplier(Arc::new(m)))
    }

    /// Multiplier given by a finite table of values, zero elsewhere.
    pub fn multiplier_values(dim: usize, values: BTreeMap<MultiIndex, Cx<T>>) -> Result<Self> {
        check_keys(dim, values.keys())?;
        let support = values.keys().map(MultiIndex::max_norm).max().unwrap_or(0);
        let mut s = Self::multiplier(dim, move |k| values.get(k).copied().unwrap_or_else(czero));
        s.k_support = Some(support);
        Ok(s)
    }

    /// Multiplication by `Q(x) = Σ_l q̂(l) e^{2πix·l}` (order 0).
    pub fn multiplication(dim: usize, coeffs: BTreeMap<MultiIndex, Cx<T>>) -> Result<Self> {
        check_keys(dim, coeffs.keys())?;
        let mut s = Self::build(dim, Representation::Multiplication(coeffs));
        s.order = Some(T::zero());
        Ok(s)
    }

    pub fn table(
        dim: usize,
        band: usize,
        rule: impl Fn(&MultiIndex, &MultiIndex) -> Cx<T> + Send + Sync + 'static,
    ) -> Self {
        Self::build(dim, Representation::Table { rule: Arc::new(rule), band })
    }

    /// `σ̂(l,k) = q̂(l)·w(k)`, i.e. `σ(x,k) = Q(x) w(k)`.
    pub fn modulated(
        dim: usize,
        coeffs: BTreeMap<MultiIndex, Cx<T>>,
        w: impl Fn(&MultiIndex) -> Cx<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        check_keys(dim, coeffs.keys())?;
        let band = coeffs.keys().map(MultiIndex::max_norm).max().unwrap_or(0);
        Ok(Self::table(dim, band, move |l, k| coeffs.get(l).map_or_else(czero, |q| *q * w(k))))
    }

    pub fn sampled(
        dim: usize,
        band: usize,
        grid: usize,
        rule: impl Fn(&[T], &MultiIndex) -> Cx<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        if grid <= 2 * band {
            return Err(Error::Aliasing { grid, radius: band });
        }
        Ok(Self::build(dim, Representation::Sampled { rule: Arc::new(rule), band, grid }))
    }

    pub fn sum(terms: Vec<ToroidalSymbol<T>>) -> Result<Self> {
        let dim = terms.first().map(|t| t.dim).ok_or_else(|| Error::InvalidArgument("empty symbol sum".into()))?;
        if let Some(t) = terms.iter().find(|t| t.dim != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: t.dim });
        }
        let order = terms.iter().map(|t| t.order).try_fold(None::<T>, |acc, o| {
            o.map(|o| Some(acc.map_or(o, |a: T| a.max(o))))
        });
        let k_support = terms.iter().map(|t| t.k_support).try_fold(0, |acc, s| s.map(|s| acc.max(s)));
        let mut s = Self::build(dim, Representation::Sum(terms));
        s.order = order.flatten();
        s.k_support = k_support;
        Ok(s)
    }

    /// `⟨k⟩^m` scaled by `scale` (order `m`).
    pub fn bracket_power(dim: usize, m: T, scale: T) -> Self {
        Self::multiplier(dim, move |k| cx(scale * bracket::<T>(k).powf(m), T::zero())).with_order(m)
    }

    /// Declares `σ(·,k) = 0` for `|k|∞ > r`; evaluation honours it.
    pub fn with_k_support(mut self, r: usize) -> Self {
        self.k_support = Some(r);
        self
    }

    pub fn with_order(mut self, m: T) -> Self {
        self.order = Some(m);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn representation(&self) -> &Representation<T> {
        &self.repr
    }

    pub fn order(&self) -> Option<T> {
        self.order
    }

    pub fn k_support(&self) -> Option<usize> {
        self.k_support
    }

    /// Radius in `l` outside which `σ̂(l, k)` vanishes.
    pub fn band(&self) -> usize {
        match &self.repr {
            Representation::Multiplier(_) => 0,
            Representation::Multiplication(c) => c.keys().map(MultiIndex::max_norm).max().unwrap_or(0),
            Representation::Table { band, .. } | Representation::Sampled { band, .. } => *band,
            Representation::Sum(t) => t.iter().map(Self::band).max().unwrap_or(0),
        }
    }

    /// `σ(x, k)`.
    pub fn evaluate(&self, x: &[T], k: &MultiIndex) -> Cx<T> {
        debug_assert_eq!(x.len(), self.dim);
        if self.k_support.is_some_and(|s| k.max_norm() > s) {
            return czero();
        }
        match &self.repr {
            Representation::Multiplier(m) => m(k),
            Representation::Multiplication(c) => {
                c.iter().fold(czero(), |acc, (l, q)| acc + *q * unit_phase(l.dot(x)))
            }
            Representation::Table { rule, band } => TruncationWindow::new(self.dim, *band)
                .iter()
                .fold(czero(), |acc, l| acc + rule(&l, k) * unit_phase(l.dot(x))),
            Representation::Sampled { rule, .. } => rule(x, k),
            Representation::Sum(t) => t.iter().fold(czero(), |acc, s| acc + s.evaluate(x, k)),
        }
    }
}

impl<T: FftReal> ToroidalSymbol<T> {
    /// Nonzero `σ̂(l, k)` for fixed `k`, keyed by `l`.
    pub fn coefficient_column(&self, k: &MultiIndex) -> Result<BTreeMap<MultiIndex, Cx<T>>> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: k.dim() });
        }
        let mut out = BTreeMap::new();
        if self.k_support.is_some_and(|s| k.max_norm() > s) {
            return Ok(out);
        }
        self.accumulate_column(k, &mut out)?;
        out.retain(|_, v: &mut Cx<T>| !(v.re == T::zero() && v.im == T::zero()));
        Ok(out)
    }

    fn accumulate_column(&self, k: &MultiIndex, out: &mut BTreeMap<MultiIndex, Cx<T>>) -> Result<()> {
        let mut add = |l: MultiIndex, v: Cx<T>| *out.entry(l).or_insert_with(czero) += v;
        match &self.repr {
            Representation::Multiplier(m) => add(MultiIndex::zero(self.dim), m(k)),
            Representation::Multiplication(c) => c.iter().for_each(|(l, q)| add(l.clone(), *q)),
            Representation::Table { rule, band } => {
                for l in TruncationWindow::new(self.dim, *band).iter() {
                    let v = rule(&l, k);
                    add(l, v);
                }
            }
            Representation::Sampled { rule, band, grid } => {
                let len = grid.pow(self.dim as u32);
                let mut data: Vec<Cx<T>> = (0..len).map(|i| rule(&grid_point(self.dim, *grid, i), k)).collect();
                fft_nd(&mut data, self.dim, *grid, false);
                let scale = T::one() / T::from_usize_lossy(len);
                for l in TruncationWindow::new(self.dim, *band).iter() {
                    let off = l.coords().iter().fold(0, |acc, &c| acc * grid + c.rem_euclid(*grid as i64) as usize);
                    add(l, data[off] * scale);
                }
            }
            Representation::Sum(t) => {
                for s in t {
                    if !s.k_support.is_some_and(|r| k.max_norm() > r) {
                        s.accumulate_column(k, out)?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_keys<'a>(dim: usize, keys: impl Iterator<Item = &'a MultiIndex>) -> Result<()> {
    for k in keys {
        if k.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_evaluates_fourier_series() {
        let q: BTreeMap<_, _> = [(MultiIndex::new(vec![1]), cx(1.0, 0.0)), (MultiIndex::new(vec![-1]), cx(1.0, 0.0))]
            .into_iter()
            .collect();
        let s = ToroidalSymbol::<f64>::multiplication(1, q).unwrap();
        let v = s.evaluate(&[0.125], &MultiIndex::new(vec![7]));
        assert!((v - cx(2.0 * (std::f64::consts::TAU * 0.125).cos(), 0.0)).norm() < 1e-15);
        assert_eq!(s.order(), Some(0.0));
        assert_eq!(s.band(), 1);
    }

    #[test]
    fn sampled_column_matches_table() {
        let w = |k: &MultiIndex| cx(1.0 / (1.0 + k.norm_sq() as f64), 0.0);
        let q: BTreeMap<_, _> = [(MultiIndex::new(vec![1]), cx(0.5, 0.25)), (MultiIndex::new(vec![-2]), cx(-1.0, 0.0))]
            .into_iter()
            .collect();
        let table = ToroidalSymbol::modulated(1, q, w).unwrap();
        let t2 = table.clone();
        let sampled = ToroidalSymbol::sampled(1, 2, 16, move |x, k| t2.evaluate(x, k)).unwrap();
        for k0 in -3..=3 {
            let k = MultiIndex::new(vec![k0]);
            let a = table.coefficient_column(&k).unwrap();
            let b = sampled.coefficient_column(&k).unwrap();
            for (l, v) in &a {
                assert!((b.get(l).copied().unwrap_or_default() - v).norm() < 1e-14);
            }
            assert!(b.iter().filter(|(l, _)| !a.contains_key(*l)).all(|(_, v)| v.norm() < 1e-14));
        }
    }

    #[test]
    fn sum_merges_metadata() {
        let a = ToroidalSymbol::<f64>::bracket_power(1, -2.0, 1.0);
        let b = ToroidalSymbol::<f64>::bracket_power(1, -3.0, 2.0);
        let s = ToroidalSymbol::sum(vec![a, b]).unwrap();
        assert_eq!(s.order(), Some(-2.0));
        let v = s.evaluate(&[0.3], &MultiIndex::new(vec![1]));
        assert!((v.re - (0.5 + 2.0 * 2f64.powf(-1.5))).abs() < 1e-15);
        let vals: BTreeMap<_, _> = [(MultiIndex::new(vec![2]), cx(1.0, 0.0))].into_iter().collect();
        let finite = ToroidalSymbol::<f64>::multiplier_values(1, vals).unwrap();
        assert_eq!(finite.k_support(), Some(2));
        assert_eq!(finite.evaluate(&[0.0], &MultiIndex::new(vec![3])), cx(0.0, 0.0));
        assert!(ToroidalSymbol::<f64>::sum(vec![]).is_err());
    }
}
