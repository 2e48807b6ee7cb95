use nalgebra::DMatrix;
use rayon::prelude::*;

use super::section::{tail_query_radius, truncate};
use super::{finite_trace, SparseL1Matrix, TailModel};
use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::lattice::TruncationWindow;
use crate::scalar::{cabs, Cx, Real};

/// SVD-based block bounds are skipped above this section size.
const SVD_LIMIT: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminantOptions<T: Real> {
    pub tol: T,
    pub max_radius: usize,
    /// Largest dense section `(2N+1)ⁿ` the ladder may factor.
    pub max_section: usize,
    /// Richardson-extrapolate uncertified ladders when the tail model knows
    /// its decay exponent.
    pub extrapolate: bool,
    pub extrapolation_terms: usize,
}

impl<T: Real> Default for DeterminantOptions<T> {
    fn default() -> Self {
        DeterminantOptions {
            tol: T::cst(1e-8),
            max_radius: 64,
            max_section: 1200,
            extrapolate: true,
            extrapolation_terms: 4,
        }
    }
}

impl<T: Real> DeterminantOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        DeterminantOptions { tol, ..Self::default() }
    }

    pub fn max_radius(mut self, r: usize) -> Self {
        self.max_radius = r;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// One evaluated window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRung<T: Real> {
    pub radius: usize,
    pub value: Cx<T>,
    /// ℓ¹ mass outside the window (stored plus tail model).
    pub tail_norm: T,
    /// Certified bound on `|limit − value|`.
    pub bound: T,
    /// Floating-point part of `bound`; convergence is judged on
    /// `bound − rounding`, the part a larger window can reduce.
    pub rounding: T,
}

impl<T: Real> LadderRung<T> {
    pub fn truncation_bound(&self) -> T {
        self.bound - self.rounding
    }
}

/// Limit of a truncation ladder with a certified error.
///
/// `value` is either the last rung or, when the ladder is not certified to
/// `tol`, its Richardson extrapolation; in both cases
/// `certified_error ≥ |value − last rung|` and bounds `|limit − value|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantResult<T: Real> {
    pub value: Cx<T>,
    pub ladder: Vec<LadderRung<T>>,
    pub certified_error: T,
    /// Heuristic error (extrapolation discrepancy or last ladder step).
    pub estimated_error: T,
    pub extrapolated: bool,
    pub converged: bool,
}

/// Same shape as [`DeterminantResult`]; rung bounds bound the trace tail.
pub type TraceResult<T> = DeterminantResult<T>;

impl<T: Real> DeterminantResult<T> {
    pub fn last_rung(&self) -> &LadderRung<T> {
        self.ladder.last().expect("ladder is never empty")
    }

    pub fn to_not_converged(&self, tol: T) -> Error {
        Error::NotConverged {
            radius: self.last_rung().radius,
            value_re: self.value.re.to_f64_lossy(),
            value_im: self.value.im.to_f64_lossy(),
            certified_error: self.certified_error.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
            ladder: self
                .ladder
                .iter()
                .map(|r| (r.radius, r.value.re.to_f64_lossy(), r.value.im.to_f64_lossy()))
                .collect(),
        }
    }

    fn into_checked(self, tol: T) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(self.to_not_converged(tol))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invertibility {
    Invertible,
    Singular,
    Undecided,
}

/// Three-valued zero test on a determinant with certified error.
pub fn classify<T: Real>(det: &DeterminantResult<T>, tol: T) -> Invertibility {
    let v = cabs(det.value);
    if v > det.certified_error {
        Invertibility::Invertible
    } else if v + det.certified_error < tol {
        Invertibility::Singular
    } else {
        Invertibility::Undecided
    }
}

/// Radii `N₀, 2N₀, …` clamped to the stored support, `max_radius` and the
/// dense-section budget.
pub fn ladder_radii<T: Real>(a: &SparseL1Matrix<T>, opts: &DeterminantOptions<T>) -> Vec<usize> {
    let mut cap = 0;
    while TruncationWindow::new(a.dim(), cap + 1).cardinality() <= opts.max_section {
        cap += 1;
    }
    let last = a.support_radius().unwrap_or(0).min(opts.max_radius).min(cap);
    let mut r = last.min(4);
    let mut radii = vec![r];
    while r < last {
        r = (2 * r).max(1).min(last);
        radii.push(r);
    }
    radii
}

fn total_norm<T: Real>(a: &SparseL1Matrix<T>, tail: &TailModel<T>) -> T {
    a.l1_norm() + tail.unstored_mass(tail_query_radius(a, tail, 0))
}

fn check_summable<T: Real>(tail: &TailModel<T>) -> Result<()> {
    if tail.is_summable() {
        Ok(())
    } else {
        Err(Error::NotL1(tail.note().unwrap_or("tail model is not summable").to_string()))
    }
}

fn determinant_rung<T: Real>(
    a: &SparseL1Matrix<T>,
    tail: &TailModel<T>,
    radius: usize,
    a_norm: T,
) -> LadderRung<T> {
    let t = truncate(a, tail, TruncationWindow::new(a.dim(), radius));
    let f_l1 = t.section.l1_norm();
    let f_fro = t.section.matrix().iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt();
    let m = t.section.size();
    let id_f = t.section.shifted_identity();
    let value = id_f.clone().lu().determinant();
    let det_abs = cabs(value);

    let tau = t.tail_norm;
    let mf = T::from_usize_lossy(m);
    let delta = T::cst(8.0) * mf * T::default_epsilon() * f_fro;
    let lipschitz = tau * (a_norm + T::one()).exp();

    let eps = if tau < T::one() {
        Some(t.coupling_norm * t.coupling_norm / (T::cst(4.0) * (T::one() - tau)))
    } else {
        None
    };
    let (leading, rounding) = if m <= SVD_LIMIT {
        let sv = sorted_singular_values(id_f);
        let lead = |x: T| sv.iter().take(m - 1).fold(T::one(), |acc, s| acc * (*s + x));
        (eps.map(|e| e * lead(e)), mf * delta * lead(delta))
    } else {
        (eps.map(|e| e * (f_l1 + e).exp()), mf * delta * (f_l1 + delta).exp())
    };
    let schur = leading.map_or(T::max_value().unwrap_or(lipschitz), |l| {
        tau.exp() * l + det_abs * (tau.exp() - T::one())
    });
    LadderRung { radius, value, tail_norm: tau, bound: lipschitz.min(schur) + rounding, rounding }
}

fn sorted_singular_values<T: Real>(m: DMatrix<Cx<T>>) -> Vec<T> {
    let mut sv: Vec<T> = m.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

fn trace_rung<T: Real>(a: &SparseL1Matrix<T>, tail: &TailModel<T>, radius: usize) -> LadderRung<T> {
    let t = truncate(a, tail, TruncationWindow::new(a.dim(), radius));
    let value = finite_trace(&t.section);
    let diag_mass = t.section.matrix().diagonal().iter().fold(T::zero(), |acc, v| acc + cabs(*v));
    let n = tail_query_radius(a, tail, radius);
    let tail_bound = t.stored_diagonal_tail + tail.unstored_mass(n);
    let rounding = T::from_usize_lossy(t.section.size()) * T::default_epsilon() * diag_mass;
    LadderRung { radius, value, tail_norm: t.tail_norm, bound: tail_bound + rounding, rounding }
}

fn finish<T: Real>(mut ladder: Vec<LadderRung<T>>, tail: &TailModel<T>, opts: &DeterminantOptions<T>) -> DeterminantResult<T> {
    if let Some(i) = ladder.iter().position(|r| r.truncation_bound() <= opts.tol) {
        ladder.truncate(i + 1);
    }
    let last = *ladder.last().expect("ladder is never empty");
    let step = match ladder.len() {
        0 | 1 => last.bound,
        k => cabs(last.value - ladder[k - 2].value),
    };
    let mut out = DeterminantResult {
        value: last.value,
        certified_error: last.bound,
        estimated_error: step.min(last.bound),
        extrapolated: false,
        converged: last.truncation_bound() <= opts.tol,
        ladder,
    };
    if out.converged || !opts.extrapolate {
        return out;
    }
    let Some(p) = tail.decay_exponent() else {
        return out;
    };
    let rungs: Vec<&LadderRung<T>> = out.ladder.iter().filter(|r| r.radius > 0).collect();
    let radii: Vec<usize> = rungs.iter().map(|r| r.radius).collect();
    let values: Vec<Cx<T>> = rungs.iter().map(|r| r.value).collect();
    if let Some(e) = richardson(&radii, &values, p, opts.extrapolation_terms) {
        if e.discrepancy < step {
            out.value = e.value;
            out.certified_error = last.bound + cabs(e.value - last.value);
            out.estimated_error = e.discrepancy;
            out.extrapolated = true;
            out.converged = out.certified_error - last.rounding <= opts.tol;
        }
    }
    out
}

/// `Det(I + F_N)` at a single radius, with its certified rung bound.
pub fn determinant_at_radius<T: Real>(a: &SparseL1Matrix<T>, tail: &TailModel<T>, radius: usize) -> Result<LadderRung<T>> {
    check_summable(tail)?;
    Ok(determinant_rung(a, tail, radius, total_norm(a, tail)))
}

/// Evaluates the determinant ladder without failing on non-convergence.
///
/// Rungs are factored concurrently and merged in radius order. The rung bound
/// is the smaller of the Lipschitz estimate `tail · exp(‖A‖₁ + 1)` and a
/// block (Schur complement) estimate driven by the coupling mass, plus a
/// rounding term; see [`DeterminantResult`].
pub fn determinant_ladder<T: Real>(
    a: &SparseL1Matrix<T>,
    tail: &TailModel<T>,
    opts: &DeterminantOptions<T>,
) -> Result<DeterminantResult<T>> {
    opts.validate()?;
    check_summable(tail)?;
    let a_norm = total_norm(a, tail);
    let ladder: Vec<LadderRung<T>> = ladder_radii(a, opts)
        .into_par_iter()
        .map(|r| determinant_rung(a, tail, r, a_norm))
        .collect();
    Ok(finish(ladder, tail, opts))
}

/// `Det(I + A)` as the limit of finite-section determinants.
///
/// Fails with [`Error::NotConverged`] when the truncation part of the certified
/// error (the rounding floor excluded) exceeds `tol`
/// at the largest admissible window; the error carries the best value.
pub fn poincare_determinant<T: Real>(
    a: &SparseL1Matrix<T>,
    tail: &TailModel<T>,
    opts: &DeterminantOptions<T>,
) -> Result<DeterminantResult<T>> {
    determinant_ladder(a, tail, opts)?.into_checked(opts.tol)
}

/// Trace ladder without failing on non-convergence.
pub fn trace_ladder<T: Real>(
    a: &SparseL1Matrix<T>,
    tail: &TailModel<T>,
    opts: &DeterminantOptions<T>,
) -> Result<TraceResult<T>> {
    opts.validate()?;
    check_summable(tail)?;
    let ladder = ladder_radii(a, opts).into_iter().map(|r| trace_rung(a, tail, r)).collect();
    Ok(finish(ladder, tail, opts))
}

/// `Tr A` as the limit of finite-section traces.
pub fn poincare_trace<T: Real>(
    a: &SparseL1Matrix<T>,
    tail: &TailModel<T>,
    opts: &DeterminantOptions<T>,
) -> Result<TraceResult<T>> {
    trace_ladder(a, tail, opts)?.into_checked(opts.tol)
}

/// Decides invertibility of `I + A` from the determinant ladder.
///
/// Non-convergence is not an error here: the decision only compares `|det|`
/// with its certified error.
pub fn invertibility_test<T: Real>(
    a: &SparseL1Matrix<T>,
    tail: &TailModel<T>,
    opts: &DeterminantOptions<T>,
) -> Result<Invertibility> {
    Ok(classify(&determinant_ladder(a, tail, opts)?, opts.tol))
}
