//! Deterministic JSON and CSV emission.
//!
//! Floats are written as `{:.16e}` (17 significant digits) and non-finite
//! values as `null`, so equal results give byte-identical documents.

use std::io::{self, Write};

use poincare_core::l1_algebra::LadderRung;
use poincare_core::{Cx, DeterminantResult};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn write_json<T: Serialize, W: Write>(out: &mut W, doc: &T) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *out, FixedFloats(PrettyFormatter::new()));
    doc.serialize(&mut ser).map_err(io::Error::other)?;
    writeln!(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<Cx<f64>> for Complex {
    fn from(z: Cx<f64>) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
pub struct Rung {
    pub radius: usize,
    pub value: Complex,
    pub tail_norm: f64,
    pub bound: f64,
}

impl From<&LadderRung<f64>> for Rung {
    fn from(r: &LadderRung<f64>) -> Self {
        Rung { radius: r.radius, value: r.value.into(), tail_norm: r.tail_norm, bound: r.bound }
    }
}

#[derive(Debug, Serialize)]
pub struct Limit {
    pub value: Complex,
    pub certified_error: f64,
    pub estimated_error: f64,
    pub extrapolated: bool,
    pub converged: bool,
    pub ladder: Vec<Rung>,
}

impl From<&DeterminantResult<f64>> for Limit {
    fn from(r: &DeterminantResult<f64>) -> Self {
        Limit {
            value: r.value.into(),
            certified_error: r.certified_error,
            estimated_error: r.estimated_error,
            extrapolated: r.extrapolated,
            converged: r.converged,
            ladder: r.ladder.iter().map(Rung::from).collect(),
        }
    }
}

pub const SCAN_COLUMNS: [&str; 4] = ["lambda", "det_re", "det_im", "certified_error"];

/// Scan table as CSV with the columns of [`SCAN_COLUMNS`].
pub fn write_scan_csv<W: Write>(out: W, lambdas: &[f64], dets: &[Cx<f64>], errors: &[f64]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCAN_COLUMNS)?;
    for ((l, d), e) in lambdas.iter().zip(dets).zip(errors) {
        w.write_record([l, &d.re, &d.im, e].map(|x| fixed(*x)))?;
    }
    w.flush()?;
    Ok(())
}

fn fixed(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Doc {
        a: f64,
        b: Vec<f64>,
        c: Option<f64>,
    }

    #[test]
    fn floats_have_fixed_precision() {
        let mut buf = Vec::new();
        write_json(&mut buf, &Doc { a: 1.0, b: vec![0.1, f64::NAN], c: None }).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"a\": 1.0000000000000000e0"), "{text}");
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("null"));
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["a"], 1.0);
    }

    #[test]
    fn csv_header_and_rows() {
        let mut buf = Vec::new();
        write_scan_csv(&mut buf, &[0.5], &[Cx::new(2.0, 0.0)], &[1e-9]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("lambda,det_re,det_im,certified_error"));
        assert_eq!(lines.next(), Some("5.0000000000000000e-1,2.0000000000000000e0,0.0000000000000000e0,1.0000000000000001e-9"));
    }
}
