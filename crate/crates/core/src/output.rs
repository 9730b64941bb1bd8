//! Fixed-format CSV emission shared by every report and trajectory.
//!
//! Numbers are written with 17 significant digits in scientific notation,
//! `.` as decimal separator and LF line endings, so identical inputs give
//! byte-identical files.

use std::borrow::Cow;
use std::io::{self, Write};

/// First line of every CSV file.
pub const UNITS_NOTE: &str = "# hbar=1, dimensionless";

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn escape(field: &str) -> Cow<'_, str> {
    if field.contains([',', '"', '\n']) {
        Cow::Owned(format!("\"{}\"", field.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(field)
    }
}

pub struct CsvWriter<W: Write> {
    inner: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    /// Writes the units note and the header row.
    pub fn new<S: AsRef<str>>(mut inner: W, columns: &[S]) -> io::Result<Self> {
        writeln!(inner, "{UNITS_NOTE}")?;
        let mut writer = Self {
            inner,
            columns: columns.len(),
        };
        writer.record(columns.iter().map(|c| c.as_ref().to_string()))?;
        Ok(writer)
    }

    pub fn record<I, S>(&mut self, fields: I) -> io::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let fields: Vec<S> = fields.into_iter().collect();
        if fields.len() != self.columns {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!(
                    "row has {} fields, header has {}",
                    fields.len(),
                    self.columns
                ),
            ));
        }
        let line: Vec<Cow<'_, str>> = fields.iter().map(|f| escape(f.as_ref())).collect();
        self.inner.write_all(line.join(",").as_bytes())?;
        self.inner.write_all(b"\n")
    }

    pub fn numbers(&mut self, values: &[f64]) -> io::Result<()> {
        self.record(values.iter().map(|&v| fmt_num(v)))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_seventeen_digits() {
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(-0.25), "-2.5000000000000000e-1");
        assert_eq!(fmt_num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn quoting_and_layout() {
        let mut buf = Vec::new();
        let mut w = CsvWriter::new(&mut buf, &["identity", "x"]).unwrap();
        w.record(["{a, b} = 0", "1"]).unwrap();
        assert!(w.record(["only one"]).is_err());
        w.finish().unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# hbar=1, dimensionless\nidentity,x\n\"{a, b} = 0\",1\n"));
        assert!(!text.contains('\r'));
    }
}
