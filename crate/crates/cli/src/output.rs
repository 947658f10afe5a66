//! Result tables and their CSV/JSON encodings.

use std::io::Write;

use crate::run::CliError;
use crate::Format;

/// Rows of reals with an error column; metadata and summary are ordered
/// key/value pairs so that output is reproducible byte for byte.
#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    pub metadata: Vec<(String, String)>,
    pub summary: Vec<(String, f64)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub errors: Vec<Option<String>>,
}

impl ResultTable {
    pub fn new(metadata: Vec<(String, String)>, columns: Vec<String>) -> Self {
        Self {
            metadata,
            columns,
            ..Default::default()
        }
    }

    /// Pushes a row. Non-finite values without an error message get one.
    pub fn push(&mut self, row: Vec<f64>, error: Option<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        let error = match error {
            None if row.iter().any(|v| !v.is_finite()) => Some("non-finite value".to_string()),
            e => e,
        };
        self.rows.push(row);
        self.errors.push(error);
    }

    /// A row of NaN carrying `error`.
    pub fn push_error(&mut self, error: String) {
        let row = vec![f64::NAN; self.columns.len()];
        self.push(row, Some(error));
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)?;
                Ok(())
            }
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        for (k, v) in &self.summary {
            writeln!(out, "# summary {k}: {}", fmt_float(*v))?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(out);
        let mut header = self.columns.clone();
        header.push("error".into());
        w.write_record(&header)?;
        for (row, err) in self.rows.iter().zip(&self.errors) {
            let mut rec: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
            rec.push(err.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn to_json(&self) -> serde_json::Value {
        let obj = |pairs: Vec<(String, serde_json::Value)>| {
            serde_json::Value::Object(pairs.into_iter().collect())
        };
        let num =
            |v: f64| serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, Into::into);
        obj(vec![
            (
                "metadata".into(),
                obj(self
                    .metadata
                    .iter()
                    .map(|(k, v)| (k.clone(), v.clone().into()))
                    .collect()),
            ),
            (
                "summary".into(),
                obj(self
                    .summary
                    .iter()
                    .map(|(k, v)| (k.clone(), num(*v)))
                    .collect()),
            ),
            ("columns".into(), self.columns.clone().into()),
            (
                "rows".into(),
                self.rows
                    .iter()
                    .map(|r| r.iter().map(|v| num(*v)).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
                    .into(),
            ),
            (
                "errors".into(),
                self.errors
                    .iter()
                    .map(|e| e.clone().map_or(serde_json::Value::Null, Into::into))
                    .collect::<Vec<_>>()
                    .into(),
            ),
        ])
    }
}

/// 17 significant digits, which round-trips every `f64`.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn non_finite_rows_get_an_error() {
        let mut t = ResultTable::new(vec![], vec!["a".into()]);
        t.push(vec![f64::NAN], None);
        assert!(t.errors[0].is_some());
    }
}
