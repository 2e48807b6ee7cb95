use rayon::prelude::*;

use super::{build_hill_matrix, HillProblem};
use crate::error::{Error, Result};
use crate::l1_algebra::{
    classify, determinant_at_radius, determinant_ladder, finite_determinant, truncate, DeterminantOptions, DeterminantResult,
    Invertibility, LadderRung, LatticeVector, TailModel,
};
use crate::lattice::TruncationWindow;
use crate::scalar::{cabs, czero, Cx, Real};

/// Ladder of the literal damped determinant; never fails on non-convergence.
pub fn hill_ladder<T: Real>(p: &HillProblem<T>, opts: &DeterminantOptions<T>) -> Result<DeterminantResult<T>> {
    let w = TruncationWindow::new(p.dim(), opts.max_radius + p.support_radius());
    let (a, tail) = build_hill_matrix(p, w)?;
    determinant_ladder(&a, &tail, opts)
}

/// `Det(I + Ã)` for the matrix of [`build_hill_matrix`], ladder included;
/// fails with [`Error::NotConverged`] when `tol` is not certified.
pub fn hill_determinant<T: Real>(p: &HillProblem<T>, opts: &DeterminantOptions<T>) -> Result<DeterminantResult<T>> {
    let r = hill_ladder(p, opts)?;
    if r.converged {
        Ok(r)
    } else {
        Err(r.to_not_converged(opts.tol))
    }
}

/// Determinant whose zeros are exactly the nontrivial solutions of
/// `(2π)^ν|k|^ν b_k + Σ_m g_{k−m} b_m = 0`.
///
/// Dividing row `k` of that system by `(2π)^ν|k|^ν + 1` gives `I + Ã` with
/// `Ã` the damped matrix of the potential `g − δ₀`. Never fails on
/// non-convergence; check `converged`.
pub fn equation_determinant<T: Real>(p: &HillProblem<T>, opts: &DeterminantOptions<T>) -> Result<DeterminantResult<T>> {
    hill_ladder(&p.shifted(-T::one()), opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existence {
    NontrivialSolution,
    OnlyTrivial,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport<T: Real> {
    pub decision: Existence,
    pub determinant: DeterminantResult<T>,
}

/// Three-valued existence decision from [`equation_determinant`].
pub fn existence_test<T: Real>(p: &HillProblem<T>, opts: &DeterminantOptions<T>) -> Result<ExistenceReport<T>> {
    let determinant = equation_determinant(p, opts)?;
    let decision = match classify(&determinant, opts.tol) {
        Invertibility::Singular => Existence::NontrivialSolution,
        Invertibility::Invertible => Existence::OnlyTrivial,
        Invertibility::Undecided => Existence::Undecided,
    };
    Ok(ExistenceReport { decision, determinant })
}

/// Approximate null solution on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCandidate<T: Real> {
    /// Fourier coefficients, `‖b‖₂ = 1`.
    pub b: LatticeVector<T>,
    /// `‖(2π)^ν|k|^ν b_k + Σ_m g_{k−m} b_m‖₂` over the window.
    pub residual: T,
    /// `Σ |k|^ν |b_k|`.
    pub regularity_mass: T,
    /// `(2π)^{−ν} (‖g‖₁‖b‖₁ + ‖residual‖₁)`, which `regularity_mass` cannot exceed.
    pub regularity_bound: T,
    pub sigma_min: T,
    pub window: TruncationWindow,
}

/// Right singular vector of the smallest singular value of the section of
/// `I + Ã` (equation form) on `w`.
pub fn extract_null_solution<T: Real>(
    p: &HillProblem<T>,
    w: TruncationWindow,
    threshold: T,
) -> Result<SolutionCandidate<T>> {
    let (a, _) = build_hill_matrix(&p.shifted(-T::one()), w)?;
    let section = truncate(&a, &TailModel::exact(), w).section;
    let svd = section.shifted_identity().svd(false, true);
    let (idx, sigma_min) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::max_value().unwrap_or(T::one())), |best, (i, s)| if s < best.1 { (i, s) } else { best });
    if sigma_min > threshold {
        return Err(Error::NoNullSolution { sigma: sigma_min.to_f64_lossy(), threshold: threshold.to_f64_lossy() });
    }
    let v_t = svd.v_t.expect("requested");
    let mut coeffs: Vec<Cx<T>> = v_t.row(idx).iter().map(|z| z.conj()).collect();

    let pivot = coeffs.iter().copied().fold(czero::<T>(), |best, z| if cabs(z) > cabs(best) { z } else { best });
    let norm = coeffs.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
    if cabs(pivot) > T::zero() {
        let phase = pivot.conj() / (cabs(pivot) * norm);
        coeffs.iter_mut().for_each(|z| *z *= phase);
    }

    let pts: Vec<_> = w.iter().collect();
    let b: LatticeVector<T> = pts.iter().cloned().zip(coeffs.iter().copied()).collect();
    let mut res_sq = T::zero();
    let mut res_l1 = T::zero();
    let mut regularity_mass = T::zero();
    for (k, bk) in &b {
        let mut r = *bk * p.multiplier(k);
        for (l, g) in p.potential() {
            if let Some(bm) = b.get(&(k - l)) {
                r += *g * *bm;
            }
        }
        res_sq += r.norm_sqr();
        res_l1 += cabs(r);
        regularity_mass += T::from_i64_lossy(k.norm_sq()).powf(p.nu() / T::cst(2.0)) * cabs(*bk);
    }
    let b_l1 = b.values().fold(T::zero(), |acc, z| acc + cabs(*z));
    let regularity_bound = T::two_pi().powf(-p.nu()) * (p.potential_mass() * b_l1 + res_l1);
    Ok(SolutionCandidate { b, residual: res_sq.sqrt(), regularity_mass, regularity_bound, sigma_min, window: w })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Exact zero at a grid point.
    GridPoint,
    /// Sign change of the real part, refined by bisection.
    SignChange,
    /// Magnitude dip without a sign change, refined by golden-section search.
    Dip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRoot<T: Real> {
    pub lambda: T,
    pub det_abs: T,
    pub certified_error: T,
    pub bracket: (T, T),
    pub kind: RootKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScan<T: Real> {
    pub lambdas: Vec<T>,
    pub dets: Vec<Cx<T>>,
    pub certified_errors: Vec<T>,
    pub brackets: Vec<(T, T)>,
    /// Roots with `|det| < max(tol, 10·certified error)`.
    pub roots: Vec<ScanRoot<T>>,
    /// Sign-change brackets whose refined point failed that test.
    pub rejected: Vec<ScanRoot<T>>,
}

const MAX_ITER: usize = 60;

struct Shifted<'a, T: Real> {
    p: &'a HillProblem<T>,
    window: TruncationWindow,
    radius: usize,
}

impl<T: Real> Shifted<'_, T> {
    fn eval(&self, lambda: T) -> Result<LadderRung<T>> {
        let (a, tail) = build_hill_matrix(&self.p.shifted(lambda - T::one()), self.window)?;
        determinant_at_radius(&a, &tail, self.radius)
    }

    /// Value only, without the singular values needed for the bound.
    fn value(&self, lambda: T) -> Result<Cx<T>> {
        let (a, tail) = build_hill_matrix(&self.p.shifted(lambda - T::one()), self.window)?;
        let w = TruncationWindow::new(self.p.dim(), self.radius);
        Ok(finite_determinant(&truncate(&a, &tail, w).section))
    }
}

/// Evaluates the equation determinant of `Q + λ` on the grid and refines its
/// zeros. A root `λ*` means `−λ*` is an approximate eigenvalue of
/// `(−Δ)^{ν/2} + Q`.
///
/// Values are the raw determinant at the largest admissible window (no
/// extrapolation, so the scanned function is smooth in `λ`). Grid points are
/// evaluated concurrently and merged in order.
pub fn spectral_shift_scan<T: Real>(
    p: &HillProblem<T>,
    lambdas: &[T],
    opts: &DeterminantOptions<T>,
) -> Result<SpectralScan<T>> {
    if lambdas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("lambda grid must be strictly increasing".into()));
    }
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let mut radius = opts.max_radius;
    while radius > 0 && TruncationWindow::new(p.dim(), radius).cardinality() > opts.max_section {
        radius -= 1;
    }
    let f = Shifted { p, window: TruncationWindow::new(p.dim(), radius + p.support_radius()), radius };
    let rungs: Vec<LadderRung<T>> = lambdas.par_iter().map(|&l| f.eval(l)).collect::<Result<_>>()?;
    let dets: Vec<Cx<T>> = rungs.iter().map(|r| r.value).collect();
    let certified_errors: Vec<T> = rungs.iter().map(|r| r.bound).collect();

    let real = dets.iter().all(|d| d.im.abs() <= T::cst(1e-10) * cabs(*d));
    let key = |d: &Cx<T>| if real { d.re } else { cabs(*d) };
    let vals: Vec<T> = dets.iter().map(key).collect();
    let tol = opts.tol;

    let mut candidates: Vec<((T, T), RootKind)> = Vec::new();
    let n = lambdas.len();
    for i in 0..n {
        if vals[i] == T::zero() {
            candidates.push(((lambdas[i], lambdas[i]), RootKind::GridPoint));
        }
    }
    if real {
        for i in 0..n.saturating_sub(1) {
            if vals[i] != T::zero() && vals[i + 1] != T::zero() && (vals[i] < T::zero()) != (vals[i + 1] < T::zero()) {
                candidates.push(((lambdas[i], lambdas[i + 1]), RootKind::SignChange));
            }
        }
    }
    for i in 1..n.saturating_sub(1) {
        let (a, b, c) = (vals[i - 1], vals[i], vals[i + 1]);
        let same_sign = (a > T::zero()) == (b > T::zero()) && (b > T::zero()) == (c > T::zero());
        if b != T::zero() && same_sign && b.abs() < a.abs() && b.abs() <= c.abs() {
            candidates.push(((lambdas[i - 1], lambdas[i + 1]), RootKind::Dip));
        }
    }

    let refined: Vec<Vec<(ScanRoot<T>, bool)>> = candidates
        .par_iter()
        .map(|&(br, kind)| refine(&f, br, kind, real, tol))
        .collect::<Result<_>>()?;

    let mut brackets = Vec::new();
    let mut roots: Vec<ScanRoot<T>> = Vec::new();
    let mut rejected = Vec::new();
    for ((br, kind), found) in candidates.iter().zip(refined) {
        if *kind != RootKind::Dip {
            brackets.push(*br);
        }
        for (root, ok) in found {
            if ok {
                roots.push(root);
            } else if *kind != RootKind::Dip {
                rejected.push(root);
            }
        }
    }
    roots.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap_or(std::cmp::Ordering::Equal));
    roots.dedup_by(|a, b| (a.lambda - b.lambda).abs() <= tol);
    Ok(SpectralScan { lambdas: lambdas.to_vec(), dets, certified_errors, brackets, roots, rejected })
}

fn accept<T: Real>(r: &LadderRung<T>, tol: T) -> bool {
    cabs(r.value) < tol.max(T::cst(10.0) * r.bound)
}

fn refine<T: Real>(
    f: &Shifted<'_, T>,
    br: (T, T),
    kind: RootKind,
    real: bool,
    tol: T,
) -> Result<Vec<(ScanRoot<T>, bool)>> {
    let make = |lambda: T, r: &LadderRung<T>, bracket, kind| {
        (ScanRoot { lambda, det_abs: cabs(r.value), certified_error: r.bound, bracket, kind }, accept(r, tol))
    };
    match kind {
        RootKind::GridPoint => {
            let r = f.eval(br.0)?;
            Ok(vec![make(br.0, &r, br, kind)])
        }
        RootKind::SignChange => {
            let (l, r) = bisect(f, br, tol)?;
            Ok(vec![make(l, &r, br, kind)])
        }
        RootKind::Dip => {
            let s = if real && f.value(br.0)?.re < T::zero() { -T::one() } else { T::one() };
            let objective = |x: T| -> Result<T> {
                let v = f.value(x)?;
                Ok(if real { s * v.re } else { cabs(v) })
            };
            let x = golden_min(&objective, br, tol)?;
            if real && objective(x)? < T::zero() {
                let (l1, r1) = bisect(f, (br.0, x), tol)?;
                let (l2, r2) = bisect(f, (x, br.1), tol)?;
                Ok(vec![make(l1, &r1, (br.0, x), RootKind::SignChange), make(l2, &r2, (x, br.1), RootKind::SignChange)])
            } else {
                Ok(vec![make(x, &f.eval(x)?, br, kind)])
            }
        }
    }
}

fn bisect<T: Real>(f: &Shifted<'_, T>, (mut lo, mut hi): (T, T), tol: T) -> Result<(T, LadderRung<T>)> {
    let mut f_lo = f.value(lo)?.re;
    let target = tol / T::cst(64.0);
    for _ in 0..MAX_ITER {
        if hi - lo <= target {
            break;
        }
        let mid = (lo + hi) / T::cst(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f.value(mid)?.re;
        if v == T::zero() {
            return Ok((mid, f.eval(mid)?));
        }
        if (v < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = v;
        } else {
            hi = mid;
        }
    }
    let mid = (lo + hi) / T::cst(2.0);
    Ok((mid, f.eval(mid)?))
}

fn golden_min<T: Real>(g: &dyn Fn(T) -> Result<T>, (mut a, mut b): (T, T), tol: T) -> Result<T> {
    let inv_phi = (T::cst(5.0).sqrt() - T::one()) / T::cst(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..MAX_ITER {
        if b - a <= tol / T::cst(64.0) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d)?;
        }
    }
    Ok(if gc < gd { c } else { d })
}
