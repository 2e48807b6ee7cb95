#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use poincare_core::lattice::{MultiIndex, TruncationWindow};
use poincare_core::SparseL1Matrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type C = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn index(rng: &mut impl Rng, dim: usize, radius: i64) -> MultiIndex {
    MultiIndex::new((0..dim).map(|_| rng.gen_range(-radius..=radius)).collect::<Vec<_>>())
}

/// Uniform in the disk of the given radius.
pub fn complex_in_disk(rng: &mut impl Rng, r: f64) -> C {
    loop {
        let (a, b) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if a * a + b * b <= 1.0 {
            return C::new(r * a, r * b);
        }
    }
}

pub fn sparse(rng: &mut impl Rng, dim: usize, max_entries: usize, radius: i64, amp: f64) -> SparseL1Matrix<f64> {
    let n = rng.gen_range(0..=max_entries);
    let entries: Vec<_> = (0..n)
        .map(|_| (index(rng, dim, radius), index(rng, dim, radius), complex_in_disk(rng, amp)))
        .collect();
    SparseL1Matrix::from_entries(dim, entries).unwrap()
}

pub fn dense(rng: &mut impl Rng, m: usize, amp: f64) -> DMatrix<C> {
    DMatrix::from_fn(m, m, |_, _| complex_in_disk(rng, amp))
}

/// A window with at most `max_size` points.
pub fn window(rng: &mut impl Rng, max_size: usize) -> TruncationWindow {
    loop {
        let dim = rng.gen_range(1..=2);
        let w = TruncationWindow::new(dim, rng.gen_range(0..=19));
        if w.cardinality() <= max_size {
            return w;
        }
    }
}

pub fn det_shift(f: &DMatrix<C>) -> C {
    (DMatrix::identity(f.nrows(), f.ncols()) + f).lu().determinant()
}

pub fn rel_close(a: C, b: C, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm())
}
