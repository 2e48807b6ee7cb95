//! JSON input documents.
//!
//! Matrix:
//! ```json
//! {"dimension": 1,
//!  "entries": [{"row": [0], "col": [1], "re": 0.5, "im": 0.0}],
//!  "tail_bound": {"kind": "power_law", "c": 0.1, "p": 1.0, "complete_radius": 64}}
//! ```
//! `tail_bound` kinds: `exact` (default), `power_law {c, p}`, `geometric {c, r}`,
//! `not_summable {reason}`; `complete_radius` is optional for the bounded kinds.
//!
//! Symbol: `{"dimension", "kind", ..., "order_m"}` with kinds
//! `fractional_laplacian {nu}`, `multiplier {values | bracket_power}`,
//! `multiplication {coefficients}`, `modulated {coefficients, bracket_power}`,
//! `table {entries: [{l, k, re, im}]}` and `sum {terms}`.
//!
//! Hill problem:
//! ```json
//! {"dimension": 1, "nu": 2.0, "potential": [{"index": [0], "re": 3.0, "im": 0.0}],
//!  "scan": {"lambda_min": -90.0, "lambda_max": 10.0, "steps": 200}}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use poincare_core::lattice::MultiIndex;
use poincare_core::{Cx, HillProblem, SparseL1Matrix, TailModel, ToroidalSymbol};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    dimension: usize,
    entries: Vec<EntryDoc>,
    #[serde(default)]
    tail_bound: Option<TailDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    row: Vec<i64>,
    col: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TailDoc {
    Exact,
    PowerLaw { c: f64, p: f64, complete_radius: Option<usize> },
    Geometric { c: f64, r: f64, complete_radius: Option<usize> },
    NotSummable { reason: Option<String> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffDoc {
    index: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntryDoc {
    l: Vec<i64>,
    k: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketDoc {
    m: f64,
    #[serde(default = "one")]
    scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
struct SymbolDoc {
    dimension: usize,
    #[serde(flatten)]
    body: SymbolBody,
    #[serde(default)]
    order_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SymbolBody {
    FractionalLaplacian { nu: f64 },
    Multiplier { values: Option<Vec<CoeffDoc>>, bracket_power: Option<BracketDoc> },
    Multiplication { coefficients: Vec<CoeffDoc> },
    Modulated { coefficients: Vec<CoeffDoc>, bracket_power: BracketDoc },
    Table { entries: Vec<TableEntryDoc> },
    Sum { terms: Vec<SymbolDoc> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HillDoc {
    dimension: usize,
    nu: f64,
    #[serde(default)]
    potential: Vec<CoeffDoc>,
    #[serde(default)]
    scan: Option<ScanSpec>,
}

/// Uniform grid of `steps` points from `lambda_min` to `lambda_max`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub steps: usize,
}

impl ScanSpec {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        if self.steps < 2 || !(self.lambda_min < self.lambda_max) {
            return Err(CliError::Validation(
                "scan: need steps >= 2 and lambda_min < lambda_max".into(),
            ));
        }
        let h = (self.lambda_max - self.lambda_min) / (self.steps - 1) as f64;
        Ok((0..self.steps).map(|i| self.lambda_min + h * i as f64).collect())
    }
}

#[derive(Debug)]
pub struct HillInput {
    pub problem: HillProblem<f64>,
    pub scan: Option<ScanSpec>,
}

fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn index(dim: usize, coords: &[i64], field: &str) -> Result<MultiIndex, CliError> {
    if coords.len() != dim {
        return Err(CliError::Validation(format!(
            "{field}: index {coords:?} has {} coordinates, dimension is {dim}",
            coords.len()
        )));
    }
    Ok(MultiIndex::new(coords.to_vec()))
}

fn finite(x: f64, field: &str) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("{field}: value must be finite")))
    }
}

fn check_dimension(dim: usize) -> Result<(), CliError> {
    if dim == 0 {
        return Err(CliError::Validation("dimension must be at least 1".into()));
    }
    Ok(())
}

fn coefficients(dim: usize, list: &[CoeffDoc], field: &str) -> Result<BTreeMap<MultiIndex, Cx<f64>>, CliError> {
    let mut out = BTreeMap::new();
    for (i, c) in list.iter().enumerate() {
        let f = format!("{field}[{i}]");
        let k = index(dim, &c.index, &f)?;
        let v = Cx::new(finite(c.re, &f)?, finite(c.im, &f)?);
        if out.insert(k, v).is_some() {
            return Err(CliError::Validation(format!("{f}: duplicate index {:?}", c.index)));
        }
    }
    Ok(out)
}

pub fn load_matrix(path: &Path) -> Result<(SparseL1Matrix<f64>, TailModel<f64>), CliError> {
    let doc: MatrixDoc = read(path)?;
    check_dimension(doc.dimension)?;
    let mut entries = Vec::with_capacity(doc.entries.len());
    for (i, e) in doc.entries.iter().enumerate() {
        let f = format!("entries[{i}]");
        entries.push((
            index(doc.dimension, &e.row, &format!("{f}.row"))?,
            index(doc.dimension, &e.col, &format!("{f}.col"))?,
            Cx::new(finite(e.re, &f)?, finite(e.im, &f)?),
        ));
    }
    let a = SparseL1Matrix::from_entries(doc.dimension, entries)?;
    let tail = match doc.tail_bound.unwrap_or(TailDoc::Exact) {
        TailDoc::Exact => TailModel::exact(),
        TailDoc::PowerLaw { c, p, complete_radius } => {
            if !(c >= 0.0 && p > 0.0) {
                return Err(CliError::Validation("tail_bound: power_law needs c >= 0 and p > 0".into()));
            }
            with_radius(TailModel::power_law(c, p), complete_radius)
        }
        TailDoc::Geometric { c, r, complete_radius } => {
            if !(c >= 0.0 && (0.0..1.0).contains(&r)) {
                return Err(CliError::Validation("tail_bound: geometric needs c >= 0 and 0 <= r < 1".into()));
            }
            with_radius(TailModel::geometric(c, r), complete_radius)
        }
        TailDoc::NotSummable { reason } => TailModel::not_summable(reason.unwrap_or_else(|| "declared not summable".into())),
    };
    Ok((a, tail))
}

fn with_radius(t: TailModel<f64>, r: Option<usize>) -> TailModel<f64> {
    match r {
        Some(r) => t.with_complete_radius(r),
        None => t,
    }
}

pub fn load_symbol(path: &Path) -> Result<ToroidalSymbol<f64>, CliError> {
    let doc: SymbolDoc = read(path)?;
    build_symbol(&doc, "symbol")
}

fn bracket_rule(b: BracketDoc) -> impl Fn(&MultiIndex) -> Cx<f64> + Send + Sync + 'static {
    move |k| Cx::new(b.scale * (1.0 + k.norm_sq() as f64).powf(b.m / 2.0), 0.0)
}

fn build_symbol(doc: &SymbolDoc, field: &str) -> Result<ToroidalSymbol<f64>, CliError> {
    let dim = doc.dimension;
    check_dimension(dim)?;
    let s = match &doc.body {
        SymbolBody::FractionalLaplacian { nu } => poincare_core::toroidal::fractional_laplacian_symbol(*nu, dim)?,
        SymbolBody::Multiplier { values: Some(v), bracket_power: None } => {
            ToroidalSymbol::multiplier_values(dim, coefficients(dim, v, &format!("{field}.values"))?)?
        }
        SymbolBody::Multiplier { values: None, bracket_power: Some(b) } => {
            ToroidalSymbol::multiplier(dim, bracket_rule(*b)).with_order(b.m)
        }
        SymbolBody::Multiplier { .. } => {
            return Err(CliError::Validation(format!(
                "{field}: multiplier needs exactly one of `values` or `bracket_power`"
            )))
        }
        SymbolBody::Multiplication { coefficients: c } => {
            ToroidalSymbol::multiplication(dim, coefficients(dim, c, &format!("{field}.coefficients"))?)?
        }
        SymbolBody::Modulated { coefficients: c, bracket_power: b } => {
            ToroidalSymbol::modulated(dim, coefficients(dim, c, &format!("{field}.coefficients"))?, bracket_rule(*b))?
                .with_order(b.m)
        }
        SymbolBody::Table { entries } => {
            let mut table = BTreeMap::new();
            for (i, e) in entries.iter().enumerate() {
                let f = format!("{field}.entries[{i}]");
                let key = (index(dim, &e.l, &format!("{f}.l"))?, index(dim, &e.k, &format!("{f}.k"))?);
                table.insert(key, Cx::new(finite(e.re, &f)?, finite(e.im, &f)?));
            }
            let band = table.keys().map(|(l, _)| l.max_norm()).max().unwrap_or(0);
            let support = table.keys().map(|(_, k)| k.max_norm()).max().unwrap_or(0);
            ToroidalSymbol::table(dim, band, move |l, k| {
                table.get(&(l.clone(), k.clone())).copied().unwrap_or(Cx::new(0.0, 0.0))
            })
            .with_k_support(support)
        }
        SymbolBody::Sum { terms } => {
            let built = terms
                .iter()
                .enumerate()
                .map(|(i, t)| build_symbol(t, &format!("{field}.terms[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            ToroidalSymbol::sum(built)?
        }
    };
    Ok(match doc.order_m {
        Some(m) => s.with_order(m),
        None => s,
    })
}

pub fn load_hill(path: &Path) -> Result<HillInput, CliError> {
    let doc: HillDoc = read(path)?;
    check_dimension(doc.dimension)?;
    let g = coefficients(doc.dimension, &doc.potential, "potential")?;
    let problem = HillProblem::new(doc.dimension, finite(doc.nu, "nu")?, g)?;
    Ok(HillInput { problem, scan: doc.scan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn minimal_matrix() {
        let f = file(r#"{"dimension": 1, "entries": [{"row": [0], "col": [1], "re": 3, "im": -4}]}"#);
        let (a, tail) = load_matrix(f.path()).unwrap();
        assert_eq!(a.l1_norm(), 5.0);
        assert_eq!(tail.kind(), poincare_core::TailKind::ExactFinite);
    }

    #[test]
    fn index_length_is_checked() {
        let f = file(r#"{"dimension": 2, "entries": [{"row": [0], "col": [1, 0], "re": 1}]}"#);
        let err = load_matrix(f.path()).unwrap_err().to_string();
        assert!(err.contains("entries[0].row"), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let f = file("{\"dimension\": 1,\n \"entries\": [}");
        let err = load_matrix(f.path()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn hill_order_is_validated() {
        let f = file(r#"{"dimension": 1, "nu": 1, "potential": []}"#);
        let err = load_hill(f.path()).unwrap_err().to_string();
        assert!(err.contains("nu must exceed dimension"), "{err}");
    }

    #[test]
    fn fractional_laplacian_spot_value() {
        let f = file(r#"{"dimension": 1, "kind": "fractional_laplacian", "nu": 2}"#);
        let s = load_symbol(f.path()).unwrap();
        let v = s.evaluate(&[0.3], &MultiIndex::new(vec![1]));
        assert!((v.re - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn nested_sum_symbol() {
        let f = file(
            r#"{"dimension": 1, "kind": "sum", "terms": [
                {"dimension": 1, "kind": "multiplier", "bracket_power": {"m": -2}},
                {"dimension": 1, "kind": "table", "entries": [{"l": [1], "k": [0], "re": 2}]}
            ]}"#,
        );
        let s = load_symbol(f.path()).unwrap();
        assert_eq!(s.band(), 1);
        let v = s.evaluate(&[0.0], &MultiIndex::new(vec![0]));
        assert!((v.re - 3.0).abs() < 1e-15);
    }
}
