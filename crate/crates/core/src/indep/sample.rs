use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1};

use crate::{NcfaError, Result};

/// s×n matrix of observations: rows are samples, columns the measurement
/// variables M_1..M_n.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    data: Array2<f64>,
    names: Vec<String>,
}

impl SampleMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let names = (1..=data.ncols()).map(|j| format!("M{j}")).collect();
        Self::with_names(data, names)
    }

    pub fn with_names(data: Array2<f64>, names: Vec<String>) -> Result<Self> {
        if names.len() != data.ncols() {
            return Err(NcfaError::DimensionMismatch(format!(
                "{} column names for {} columns",
                names.len(),
                data.ncols()
            )));
        }
        if let Some(((r, c), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(NcfaError::InvalidInput(format!(
                "non-finite value {v} at row {r}, column {c}"
            )));
        }
        Ok(SampleMatrix { data, names })
    }

    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_vars(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.column(j).to_vec()
    }

    pub fn column_view(&self, j: usize) -> ArrayView1<'_, f64> {
        self.data.column(j)
    }

    /// Rows selected by `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Array2<f64> {
        self.data.select(ndarray::Axis(0), indices)
    }

    /// Parses comma-separated numbers. With `has_header`, the first row names
    /// the columns; otherwise they are called M1..Mn.
    pub fn from_csv_reader<R: Read>(reader: R, has_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names: Option<Vec<String>> = if has_header {
            Some(rdr.headers()?.iter().map(str::to_owned).collect())
        } else {
            None
        };
        let mut values = Vec::new();
        let mut width = None;
        let mut rows = 0;
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            let w = *width.get_or_insert(record.len());
            if record.len() != w {
                return Err(NcfaError::InvalidInput(format!(
                    "row {} has {} fields, expected {w}",
                    r + 1,
                    record.len()
                )));
            }
            for (c, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    NcfaError::InvalidInput(format!(
                        "row {}, column {}: {field:?} is not a number",
                        r + 1,
                        c + 1
                    ))
                })?;
                values.push(v);
            }
            rows += 1;
        }
        let cols = width.or(names.as_ref().map(Vec::len)).unwrap_or(0);
        let data = Array2::from_shape_vec((rows, cols), values)
            .map_err(|e| NcfaError::InvalidInput(e.to_string()))?;
        match names {
            Some(names) => Self::with_names(data, names),
            None => Self::new(data),
        }
    }

    pub fn read_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, has_header)
    }

    /// Writes a header row followed by the data. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        for row in self.data.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn csv_round_trip() {
        let m = SampleMatrix::new(array![[1.5, -2.0], [0.1, 3e-12]]).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "M1,M2\n1.5,-2\n0.1,0.000000000003\n");
        let back = SampleMatrix::from_csv_reader(buf.as_slice(), true).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn headerless_csv() {
        let m = SampleMatrix::from_csv_reader("1,2,3\n4,5,6\n".as_bytes(), false).unwrap();
        assert_eq!(m.n_samples(), 2);
        assert_eq!(m.names(), &["M1", "M2", "M3"]);
        assert_eq!(m.column(2), vec![3.0, 6.0]);
    }

    #[test]
    fn bad_csv() {
        assert!(SampleMatrix::from_csv_reader("a,b\n1,x\n".as_bytes(), true).is_err());
        assert!(SampleMatrix::from_csv_reader("1,2\n3\n".as_bytes(), false).is_err());
        assert!(SampleMatrix::from_csv_reader("1,NaN\n".as_bytes(), false).is_err());
    }
}
