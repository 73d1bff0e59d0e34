use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::{PirdError, Result};

/// Multichannel samples, one row per time step.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesMatrix {
    samples: DMatrix<f64>,
    fs: f64,
    names: Vec<String>,
}

impl TimeSeriesMatrix {
    pub fn new(samples: DMatrix<f64>, fs: f64, names: Vec<String>) -> Result<Self> {
        if samples.nrows() == 0 || samples.ncols() == 0 {
            return Err(PirdError::Argument("time series needs at least one sample and channel".into()));
        }
        if names.len() != samples.ncols() {
            return Err(PirdError::Argument(format!(
                "{} names for {} channels",
                names.len(),
                samples.ncols()
            )));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(PirdError::Argument(format!("sampling frequency must be positive, got {fs}")));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(PirdError::Argument(format!(
                "non-finite sample at row {}, column {}",
                pos % samples.nrows(),
                pos / samples.nrows()
            )));
        }
        Ok(Self { samples, fs, names })
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    pub fn n_channels(&self) -> usize {
        self.samples.ncols()
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn with_fs(mut self, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(PirdError::Argument(format!("sampling frequency must be positive, got {fs}")));
        }
        self.fs = fs;
        Ok(self)
    }

    /// Copy with every channel's sample mean subtracted.
    pub fn demeaned(&self) -> Self {
        let mut out = self.clone();
        for mut col in out.samples.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        out
    }

    /// Reads CSV: a header row of channel names, then one row per sample.
    pub fn read_csv<R: Read>(reader: R, fs: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
            return Err(PirdError::Format("empty CSV: missing header row".into()));
        }
        if header.iter().all(|h| h.parse::<f64>().is_ok()) {
            return Err(PirdError::Format(
                "missing header row: first line is numeric, expected channel names".into(),
            ));
        }
        let names: Vec<String> = header.iter().map(str::to_string).collect();
        let q = names.len();
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != q {
                return Err(PirdError::Format(format!(
                    "row {} has {} fields, expected {q}",
                    row + 2,
                    record.len()
                )));
            }
            for (col, cell) in record.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| {
                    PirdError::Format(format!(
                        "non-numeric cell {cell:?} at row {}, column {:?}",
                        row + 2,
                        names[col]
                    ))
                })?;
                if !v.is_finite() {
                    return Err(PirdError::Format(format!(
                        "non-finite cell at row {}, column {:?}",
                        row + 2,
                        names[col]
                    )));
                }
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(PirdError::Format("CSV has a header but no samples".into()));
        }
        let samples = DMatrix::from_row_slice(values.len() / q, q, &values);
        Self::new(samples, fs, names)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        for row in self.samples.row_iter() {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let samples = DMatrix::from_row_slice(3, 2, &[0.1, -2.5, 1e-17, 3.0, 7.25, -0.333333333333]);
        let ts = TimeSeriesMatrix::new(samples, 2.0, vec!["Y".into(), "X1".into()]).unwrap();
        let mut buf = Vec::new();
        ts.write_csv(&mut buf).unwrap();
        let back = TimeSeriesMatrix::read_csv(buf.as_slice(), 2.0).unwrap();
        assert_eq!(ts, back);
    }

    #[test]
    fn format_errors() {
        let missing_header = "1.0,2.0\n3.0,4.0\n";
        assert!(matches!(
            TimeSeriesMatrix::read_csv(missing_header.as_bytes(), 1.0),
            Err(PirdError::Format(_))
        ));
        let bad_cell = "Y,X1\n1.0,abc\n";
        assert!(matches!(
            TimeSeriesMatrix::read_csv(bad_cell.as_bytes(), 1.0),
            Err(PirdError::Format(_))
        ));
        let no_rows = "Y,X1\n";
        assert!(matches!(
            TimeSeriesMatrix::read_csv(no_rows.as_bytes(), 1.0),
            Err(PirdError::Format(_))
        ));
        let ragged = "Y,X1\n1.0,2.0\n3.0\n";
        assert!(matches!(
            TimeSeriesMatrix::read_csv(ragged.as_bytes(), 1.0),
            Err(PirdError::Format(_))
        ));
    }

    #[test]
    fn demeaning() {
        let samples = DMatrix::from_row_slice(2, 2, &[1.0, 10.0, 3.0, 20.0]);
        let ts = TimeSeriesMatrix::new(samples, 1.0, vec!["a".into(), "b".into()]).unwrap();
        let d = ts.demeaned();
        assert_eq!(d.samples().as_slice(), &[-1.0, 1.0, -5.0, 5.0]);
    }
}
