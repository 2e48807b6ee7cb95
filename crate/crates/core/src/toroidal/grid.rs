use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::l1_algebra::LatticeVector;
use crate::lattice::{MultiIndex, TruncationWindow};
use crate::scalar::{cabs, czero, FftReal, Cx, Real};

/// Samples of a function on the uniform grid `(j₁/M, …, jₙ/M)`, `0 ≤ jᵢ < M`,
/// stored with the first axis most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T: Real> {
    dim: usize,
    size: usize,
    samples: Vec<Cx<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(dim: usize, size: usize, samples: Vec<Cx<T>>) -> Result<Self> {
        if dim == 0 || size == 0 {
            return Err(Error::InvalidArgument("grid needs dim >= 1 and size >= 1".into()));
        }
        let expected = size.pow(dim as u32);
        if samples.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: samples.len() });
        }
        Ok(GridFunction { dim, size, samples })
    }

    pub fn from_fn(dim: usize, size: usize, f: impl Fn(&[T]) -> Cx<T>) -> Self {
        assert!(dim >= 1 && size >= 1);
        let samples = (0..size.pow(dim as u32)).map(|i| f(&grid_point(dim, size, i))).collect();
        GridFunction { dim, size, samples }
    }

    pub fn zeros(dim: usize, size: usize) -> Self {
        Self::from_fn(dim, size, |_| czero())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn samples(&self) -> &[Cx<T>] {
        &self.samples
    }

    /// Coordinates of sample `i`.
    pub fn point(&self, i: usize) -> Vec<T> {
        grid_point(self.dim, self.size, i)
    }

    /// `(∫|f|²)^{1/2}` by the grid quadrature.
    pub fn l2_norm(&self) -> T {
        let s = self.samples.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr());
        (s / T::from_usize_lossy(self.samples.len())).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.dim, self.size), (other.dim, other.size));
        self.samples.iter().zip(&other.samples).fold(T::zero(), |acc, (a, b)| acc.max(cabs(*a - *b)))
    }

    /// Largest coefficient radius the grid resolves without aliasing.
    pub fn resolved_radius(&self) -> usize {
        (self.size - 1) / 2
    }
}

pub(crate) fn grid_point<T: Real>(dim: usize, size: usize, mut i: usize) -> Vec<T> {
    let mut x = vec![T::zero(); dim];
    let m = T::from_usize_lossy(size);
    for c in x.iter_mut().rev() {
        *c = T::from_usize_lossy(i % size) / m;
        i /= size;
    }
    x
}

fn check_alias(size: usize, radius: usize) -> Result<()> {
    if size <= 2 * radius {
        return Err(Error::Aliasing { grid: size, radius });
    }
    Ok(())
}

fn wrap(k: i64, size: usize) -> usize {
    k.rem_euclid(size as i64) as usize
}

fn grid_offset(k: &MultiIndex, size: usize) -> usize {
    k.coords().iter().fold(0, |acc, &c| acc * size + wrap(c, size))
}

/// In-place separable transform over every axis; unnormalized.
pub(crate) fn fft_nd<T: FftReal>(data: &mut [Cx<T>], dim: usize, size: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse { planner.plan_fft_inverse(size) } else { planner.plan_fft_forward(size) };
    let mut line = vec![czero::<T>(); size];
    for axis in 0..dim {
        let stride = size.pow((dim - 1 - axis) as u32);
        let block = stride * size;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (t, v) in line.iter_mut().enumerate() {
                    *v = data[base + t * stride];
                }
                fft.process(&mut line);
                for (t, v) in line.iter().enumerate() {
                    data[base + t * stride] = *v;
                }
            }
        }
    }
}

impl<T: FftReal> GridFunction<T> {
    /// `∫ e^{-2πix·k} f(x) dx` for `k ∈ w` by the normalized discrete
    /// transform; exact for trigonometric polynomials of degree ≤ N.
    pub fn fourier_coeffs(&self, w: TruncationWindow) -> Result<LatticeVector<T>> {
        if w.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: w.dim });
        }
        check_alias(self.size, w.radius)?;
        let mut data = self.samples.clone();
        fft_nd(&mut data, self.dim, self.size, false);
        let scale = T::one() / T::from_usize_lossy(data.len());
        Ok(w.iter().map(|k| {
            let v = data[grid_offset(&k, self.size)] * scale;
            (k, v)
        })
        .collect())
    }

    /// `f(x) = Σ_k c_k e^{2πix·k}` sampled on the grid.
    pub fn from_coeffs(dim: usize, size: usize, coeffs: &LatticeVector<T>) -> Result<Self> {
        let radius = coeffs.keys().map(MultiIndex::max_norm).max().unwrap_or(0);
        check_alias(size, radius)?;
        let mut data = vec![czero::<T>(); size.pow(dim as u32)];
        for (k, v) in coeffs {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
            }
            data[grid_offset(k, size)] += *v;
        }
        fft_nd(&mut data, dim, size, true);
        GridFunction::new(dim, size, data)
    }
}
