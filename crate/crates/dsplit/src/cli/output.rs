//! CSV emission: fixed-precision float formatting and a minimal writer.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::Result;

/// Formats a float with 17 significant digits and a `.` decimal separator,
/// enough to reproduce the exact bit pattern when parsed back.
///
/// Non-finite values become `nan`, `inf`, or `-inf`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// CSV sink writing one header row followed by data rows.
///
/// Fields are joined with commas verbatim; callers only pass numeric
/// strings and plain identifiers, so no quoting is needed.
pub struct CsvWriter {
    out: BufWriter<Box<dyn Write>>,
    header_written: bool,
}

impl CsvWriter {
    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn create(path: Option<&Path>) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout()),
        };
        Ok(Self {
            out: BufWriter::new(sink),
            header_written: false,
        })
    }

    pub fn header(&mut self, columns: &[&str]) -> Result<()> {
        debug_assert!(!self.header_written, "header written twice");
        self.header_written = true;
        writeln!(self.out, "{}", columns.join(","))?;
        Ok(())
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        let values = [
            1.0,
            -1.0 / 3.0,
            std::f64::consts::PI * 1e-17,
            6.02214076e23,
            f64::MIN_POSITIVE,
            -0.0,
        ];
        for &v in &values {
            let s = format_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} formatted as {s}");
            assert!(!s.contains(','), "{s}");
        }
    }

    #[test]
    fn non_finite_values_have_fixed_spellings() {
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn writer_emits_header_then_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let mut w = CsvWriter::create(Some(&path)).unwrap();
        w.header(&["a", "b"]).unwrap();
        w.row(&["1".to_string(), format_float(0.5)]).unwrap();
        w.finish().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\n1,5.0000000000000000e-1\n");
    }
}
