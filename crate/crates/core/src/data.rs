//! Named-column tables and their CSV form.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Binary,
    /// Values are level indices into `levels`.
    Categorical { levels: Vec<String> },
    /// One indicator of a reference-coded categorical group.
    Indicator { group: String, level: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub values: Vec<f64>,
}

impl Column {
    pub fn continuous(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Continuous,
            values,
        }
    }

    pub fn binary(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Binary,
            values,
        }
    }

    pub fn categorical(name: impl Into<String>, levels: Vec<String>, codes: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical { levels },
            values: codes.into_iter().map(|c| c as f64).collect(),
        }
    }

    pub fn is_numeric(&self) -> bool {
        !matches!(self.kind, ColumnKind::Categorical { .. })
    }
}

/// A rectangular table of named columns, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    columns: Vec<Column>,
    n_rows: usize,
}

impl DataTable {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let mut t = DataTable::default();
        for c in columns {
            t.push(c)?;
        }
        Ok(t)
    }

    /// Builds a table of continuous columns.
    pub fn from_columns<S: Into<String>>(cols: impl IntoIterator<Item = (S, Vec<f64>)>) -> Result<Self> {
        Self::new(
            cols.into_iter()
                .map(|(n, v)| Column::continuous(n, v))
                .collect(),
        )
    }

    pub fn push(&mut self, column: Column) -> Result<()> {
        if self.column(&column.name).is_some() {
            return Err(Error::DuplicateColumn(column.name));
        }
        if self.columns.is_empty() {
            self.n_rows = column.values.len();
        } else if column.values.len() != self.n_rows {
            return Err(Error::RaggedColumn {
                column: column.name,
                len: column.values.len(),
                rows: self.n_rows,
            });
        }
        if column.kind == ColumnKind::Binary
            && column.values.iter().any(|&v| v != 0.0 && v != 1.0)
        {
            return Err(Error::NotBinary(column.name));
        }
        self.columns.push(column);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_mut(&mut self, name: &str) -> Option<&mut Column> {
        self.columns.iter_mut().find(|c| c.name == name)
    }

    /// Values of a numeric column.
    pub fn values(&self, name: &str) -> Result<&[f64]> {
        match self.column(name) {
            Some(c) if c.is_numeric() => Ok(&c.values),
            Some(_) => Err(Error::InvalidArgument(format!(
                "column `{name}` is categorical; one-hot code it first"
            ))),
            None => Err(Error::UnknownColumn(name.to_string())),
        }
    }

    /// Replaces a column's values in place, keeping its kind.
    pub fn set_values(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        let rows = self.n_rows;
        let col = self
            .column_mut(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        if values.len() != rows {
            return Err(Error::RaggedColumn {
                column: name.to_string(),
                len: values.len(),
                rows,
            });
        }
        col.values = values;
        Ok(())
    }

    /// New table with the given rows, in the given order (repeats allowed).
    pub fn select_rows(&self, rows: &[usize]) -> DataTable {
        DataTable {
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    kind: c.kind.clone(),
                    values: rows.iter().map(|&r| c.values[r]).collect(),
                })
                .collect(),
            n_rows: rows.len(),
        }
    }

    /// Replaces a categorical column with k − 1 reference-coded indicators
    /// named `col=level`; the first level is the reference.
    pub fn one_hot(&self, column: &str) -> Result<DataTable> {
        let pos = self
            .columns
            .iter()
            .position(|c| c.name == column)
            .ok_or_else(|| Error::UnknownColumn(column.to_string()))?;
        let col = &self.columns[pos];
        let ColumnKind::Categorical { levels } = &col.kind else {
            return Err(Error::NotCategorical(column.to_string()));
        };
        if levels.len() < 2 {
            return Err(Error::TooFewLevels(column.to_string()));
        }
        let mut codes = Vec::with_capacity(col.values.len());
        for &v in &col.values {
            let code = v as usize;
            if v < 0.0 || v.fract() != 0.0 || code >= levels.len() {
                return Err(Error::UnseenLevel {
                    column: column.to_string(),
                    code,
                });
            }
            codes.push(code);
        }
        let indicators = levels.iter().enumerate().skip(1).map(|(k, level)| Column {
            name: format!("{column}={level}"),
            kind: ColumnKind::Indicator {
                group: column.to_string(),
                level: level.clone(),
            },
            values: codes.iter().map(|&c| f64::from(c == k)).collect(),
        });
        let mut columns = self.columns[..pos].to_vec();
        columns.extend(indicators);
        columns.extend_from_slice(&self.columns[pos + 1..]);
        DataTable::new(columns)
    }

    /// One-hot codes every categorical column.
    pub fn one_hot_all(&self) -> Result<DataTable> {
        let cats: Vec<String> = self
            .columns
            .iter()
            .filter(|c| !c.is_numeric())
            .map(|c| c.name.clone())
            .collect();
        cats.iter().try_fold(self.clone(), |t, c| t.one_hot(c))
    }

    /// Writes the table as CSV: a header row, numbers in shortest round-trip
    /// form, binary columns as 0/1 and categorical columns as level labels.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.names())?;
        let mut record = Vec::with_capacity(self.columns.len());
        for r in 0..self.n_rows {
            record.clear();
            for c in &self.columns {
                let v = c.values[r];
                record.push(match &c.kind {
                    ColumnKind::Categorical { levels } => levels[v as usize].clone(),
                    ColumnKind::Binary | ColumnKind::Indicator { .. } => {
                        if v == 0.0 { "0" } else { "1" }.to_string()
                    }
                    ColumnKind::Continuous => format!("{v}"),
                });
            }
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Reads a CSV with a header row. Column kinds are inferred: all-numeric
    /// columns holding only 0 and 1 are binary, other numeric columns are
    /// continuous, and anything else is categorical with levels sorted
    /// lexicographically.
    pub fn read_csv<R: Read>(reader: R) -> Result<DataTable> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
        for rec in rdr.records() {
            let rec = rec?;
            for (i, field) in rec.iter().enumerate() {
                raw[i].push(field.trim().to_string());
            }
        }
        let columns = headers
            .into_iter()
            .zip(raw)
            .map(|(name, cells)| infer_column(name, cells))
            .collect::<Result<Vec<_>>>()?;
        DataTable::new(columns)
    }

    pub fn read_csv_file(path: impl AsRef<std::path::Path>) -> Result<DataTable> {
        let f = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}

fn infer_column(name: String, cells: Vec<String>) -> Result<Column> {
    let parsed: Option<Vec<f64>> = cells.iter().map(|s| s.parse::<f64>().ok()).collect();
    match parsed {
        Some(values) if !values.is_empty() && values.iter().all(|&v| v == 0.0 || v == 1.0) => {
            Ok(Column::binary(name, values))
        }
        Some(values) => Ok(Column::continuous(name, values)),
        None => {
            let levels: Vec<String> = cells
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let codes = cells
                .iter()
                .map(|c| levels.binary_search(c).expect("level present"))
                .collect();
            Ok(Column::categorical(name, levels, codes))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc_table() -> DataTable {
        DataTable::new(vec![
            Column::continuous("x", vec![0.5, -1.25, 3.0, 1e-17]),
            Column::categorical("col", vec!["A".into(), "B".into(), "C".into()], vec![0, 2, 1, 0]),
            Column::binary("y", vec![1., 0., 1., 1.]),
        ])
        .unwrap()
    }

    #[test]
    fn one_hot_reference_coding() {
        let t = abc_table().one_hot("col").unwrap();
        let names: Vec<&str> = t.names().collect();
        assert_eq!(names, ["x", "col=B", "col=C", "y"]);
        let b = t.values("col=B").unwrap();
        let c = t.values("col=C").unwrap();
        assert_eq!((b[0], c[0]), (0.0, 0.0)); // level A
        assert_eq!((b[1], c[1]), (0.0, 1.0)); // level C
        assert_eq!((b[2], c[2]), (1.0, 0.0)); // level B
    }

    #[test]
    fn one_hot_binary_categorical() {
        let t = DataTable::new(vec![Column::categorical(
            "size",
            vec!["low".into(), "high".into()],
            vec![0, 1, 1],
        )])
        .unwrap()
        .one_hot("size")
        .unwrap();
        assert_eq!(t.names().collect::<Vec<_>>(), ["size=high"]);
        assert_eq!(t.values("size=high").unwrap(), &[0., 1., 1.]);
    }

    #[test]
    fn one_hot_errors() {
        let t = abc_table();
        assert!(matches!(t.one_hot("x"), Err(Error::NotCategorical(_))));
        let mut bad = t.clone();
        bad.column_mut("col").unwrap().values[1] = 5.0;
        assert!(matches!(bad.one_hot("col"), Err(Error::UnseenLevel { code: 5, .. })));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = abc_table();
        let text = t.to_csv_string().unwrap();
        assert!(text.starts_with("x,col,y\n"));
        let back = DataTable::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            DataTable::from_columns([("a", vec![1., 2.]), ("b", vec![1.])]),
            Err(Error::RaggedColumn { .. })
        ));
        assert!(matches!(
            DataTable::from_columns([("a", vec![1.]), ("a", vec![1.])]),
            Err(Error::DuplicateColumn(_))
        ));
        assert!(matches!(
            DataTable::new(vec![Column::binary("b", vec![0.5])]),
            Err(Error::NotBinary(_))
        ));
    }
}
