//! Richardson extrapolation of truncation ladders.
//!
//! A quantity computed on windows of radius `N` is modelled as
//! `L + Σ_j c_j N^{-(p+j)}` with a known leading exponent `p`; the limit `L`
//! is obtained by solving the square system formed by the last few rungs.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{cabs, cone, cx, Cx, Real};

/// Limit estimate from a ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation<T: Real> {
    pub value: Cx<T>,
    /// Difference between the estimates using `terms` and `terms - 1` rungs.
    pub discrepancy: T,
    pub terms: usize,
}

fn solve_limit<T: Real>(radii: &[usize], values: &[Cx<T>], exponent: T) -> Option<Cx<T>> {
    let k = radii.len();
    let mut a = DMatrix::<Cx<T>>::zeros(k, k);
    for (i, &n) in radii.iter().enumerate() {
        let h = T::one() / T::from_usize_lossy(n.max(1));
        a[(i, 0)] = cone();
        for j in 1..k {
            a[(i, j)] = cx(h.powf(exponent + T::from_usize_lossy(j - 1)), T::zero());
        }
    }
    let b = DVector::from_column_slice(values);
    let sol = a.lu().solve(&b)?;
    let v = sol[0];
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

/// Extrapolates the ladder `(radii[i], values[i])` to infinite radius using at
/// most `max_terms` trailing rungs. Needs at least three rungs with distinct
/// positive radii.
pub fn richardson<T: Real>(
    radii: &[usize],
    values: &[Cx<T>],
    exponent: T,
    max_terms: usize,
) -> Option<Extrapolation<T>> {
    assert_eq!(radii.len(), values.len());
    let k = radii.len().min(max_terms);
    if k < 3 || exponent <= T::zero() {
        return None;
    }
    let r = &radii[radii.len() - k..];
    if r.windows(2).any(|w| w[0] >= w[1]) || r[0] == 0 {
        return None;
    }
    let v = &values[values.len() - k..];
    let full = solve_limit(r, v, exponent)?;
    let reduced = solve_limit(&r[1..], &v[1..], exponent)?;
    Some(Extrapolation { value: full, discrepancy: cabs(full - reduced), terms: k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_model_sequences() {
        let radii = [4usize, 8, 16, 32];
        let vals: Vec<Cx<f64>> = radii
            .iter()
            .map(|&n| {
                let h = 1.0 / n as f64;
                cx(2.5 + 0.3 * h - 1.1 * h * h + 0.05 * h.powi(3), -1.0 + 0.7 * h)
            })
            .collect();
        let e = richardson(&radii, &vals, 1.0, 4).unwrap();
        assert!((e.value - cx(2.5, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn zeta_tail() {
        // Σ_{|k|≤N} 1/(1+k²) → π coth π
        let radii = [8usize, 16, 32, 64, 128];
        let vals: Vec<Cx<f64>> = radii
            .iter()
            .map(|&n| cx((-(n as i64)..=n as i64).map(|k| 1.0 / (1.0 + (k * k) as f64)).sum(), 0.0))
            .collect();
        let target = std::f64::consts::PI / std::f64::consts::PI.tanh();
        let e = richardson(&radii, &vals, 1.0, 4).unwrap();
        assert!((e.value.re - target).abs() < 1e-6, "{}", e.value.re - target);
        assert!((vals[4].re - target).abs() > 1e-2);
    }

    #[test]
    fn too_short_ladder() {
        assert!(richardson(&[4, 8], &[cx(1.0, 0.0), cx(1.0, 0.0)], 1.0, 4).is_none());
        assert!(richardson(&[0, 1, 2], &[cx(1.0f64, 0.0); 3], 1.0, 4).is_none());
    }
}
