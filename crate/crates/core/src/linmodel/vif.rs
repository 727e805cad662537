//! Variance inflation factors and threshold-based pruning.

use serde::{Deserialize, Serialize};

use super::design::{response, Design};
use super::ols::ols_fit_design;
use crate::data::DataTable;
use crate::error::{Error, Result};

pub const VIF_THRESHOLD: f64 = 5.0;

/// R² above this is treated as exact collinearity and reported as +∞.
const COLLINEAR_R2: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VifRemoval {
    pub column: String,
    pub vif: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VifTable {
    pub columns: Vec<String>,
    /// VIF per column; `null` in JSON for perfectly collinear columns.
    pub values: Vec<f64>,
    pub trace: Vec<VifRemoval>,
}

impl VifTable {
    pub fn get(&self, column: &str) -> Option<f64> {
        self.columns
            .iter()
            .position(|c| c == column)
            .map(|i| self.values[i])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// VIF_j = 1 / (1 − R²_j), R²_j from regressing column j on the other
/// columns with an intercept.
pub fn vif(table: &DataTable, columns: &[String]) -> Result<VifTable> {
    if columns.len() < 2 {
        return Err(Error::InvalidArgument(
            "vif needs at least two columns".into(),
        ));
    }
    let mut values = Vec::with_capacity(columns.len());
    for (j, target) in columns.iter().enumerate() {
        let others: Vec<String> = columns
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, c)| c.clone())
            .collect();
        let design = Design::from_table(table, &others, true)?;
        let y = response(table, target)?;
        let value = match ols_fit_design(&design, &y, target) {
            Ok(fit) if fit.r2 < COLLINEAR_R2 => (1.0 / (1.0 - fit.r2)).max(1.0),
            Ok(_) | Err(Error::RankDeficient(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        values.push(value);
    }
    Ok(VifTable {
        columns: columns.to_vec(),
        values,
        trace: Vec::new(),
    })
}

/// Drops the highest-VIF column until every VIF is at or below `threshold`.
/// On ties the column declared later goes first.
pub fn vif_prune(
    table: &DataTable,
    columns: &[String],
    threshold: f64,
) -> Result<(Vec<String>, VifTable)> {
    let mut current = columns.to_vec();
    let mut trace = Vec::new();
    loop {
        if current.len() < 2 {
            return Ok((
                current.clone(),
                VifTable {
                    values: vec![1.0; current.len()],
                    columns: current,
                    trace,
                },
            ));
        }
        let table_now = vif(table, &current)?;
        // max_by keeps the last maximum, i.e. the later-declared column on ties
        let (worst, &worst_vif) = table_now
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        if worst_vif <= threshold {
            return Ok((
                current,
                VifTable {
                    trace,
                    ..table_now
                },
            ));
        }
        trace.push(VifRemoval {
            column: current.remove(worst),
            vif: worst_vif,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn orthogonal_columns_have_unit_vif() {
        let t = DataTable::from_columns([
            ("a", vec![1., -1., 1., -1.]),
            ("b", vec![1., 1., -1., -1.]),
        ])
        .unwrap();
        let v = vif(&t, &names(&["a", "b"])).unwrap();
        assert_eq!(v.values, vec![1.0, 1.0]);
        let (kept, table) = vif_prune(&t, &names(&["a", "b"]), 5.0).unwrap();
        assert_eq!(kept, names(&["a", "b"]));
        assert!(table.trace.is_empty());
    }

    #[test]
    fn exact_sum_is_infinite() {
        let a = vec![1., 2., 3., 4., 5., 6.];
        let b = vec![2., -1., 0., 1., 3., -2.];
        let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let t = DataTable::from_columns([("a", a), ("b", b), ("c", c)]).unwrap();
        let v = vif(&t, &names(&["a", "b", "c"])).unwrap();
        assert!(v.values.iter().all(|x| x.is_infinite()), "{:?}", v.values);
        // all tied at +∞: the last declared column goes
        let (kept, table) = vif_prune(&t, &names(&["a", "b", "c"]), 5.0).unwrap();
        assert_eq!(kept, names(&["a", "b"]));
        assert_eq!(table.trace[0].column, "c");
    }

    #[test]
    fn needs_two_columns() {
        let t = DataTable::from_columns([("a", vec![1., 2., 3.])]).unwrap();
        assert!(vif(&t, &names(&["a"])).is_err());
    }
}
