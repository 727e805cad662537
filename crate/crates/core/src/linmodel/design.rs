use nalgebra::{DMatrix, DVector};

use crate::data::DataTable;
use crate::error::{Error, Result};

pub const INTERCEPT: &str = "(Intercept)";

/// A model matrix with named columns.
#[derive(Debug, Clone)]
pub struct Design {
    pub names: Vec<String>,
    pub x: DMatrix<f64>,
    pub intercept: bool,
}

impl Design {
    /// Builds `[1 | predictors]` from table columns. Missing, non-finite and
    /// zero-variance predictors are rejected by name.
    pub fn from_table(table: &DataTable, predictors: &[String], intercept: bool) -> Result<Self> {
        if predictors.is_empty() && intercept {
            return Ok(Self::intercept_only(table.n_rows()));
        }
        let cols = predictors
            .iter()
            .map(|p| {
                let v = table.values(p)?;
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite(p.clone()));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_slices(predictors, &cols, intercept)
    }

    pub fn from_slices(names: &[String], cols: &[&[f64]], intercept: bool) -> Result<Self> {
        let n = cols.first().map_or(0, |c| c.len());
        for (name, c) in names.iter().zip(cols) {
            if c.len() != n {
                return Err(Error::LengthMismatch {
                    left: c.len(),
                    right: n,
                });
            }
            let first = c[0];
            if c.iter().all(|&v| v == first) {
                return Err(Error::ZeroVariance(name.clone()));
            }
        }
        let offset = usize::from(intercept);
        let p = cols.len() + offset;
        let x = DMatrix::from_fn(n, p, |i, j| {
            if intercept && j == 0 {
                1.0
            } else {
                cols[j - offset][i]
            }
        });
        let mut all = Vec::with_capacity(p);
        if intercept {
            all.push(INTERCEPT.to_string());
        }
        all.extend(names.iter().cloned());
        Ok(Self {
            names: all,
            x,
            intercept,
        })
    }

    /// Intercept-only design for `n` rows.
    pub fn intercept_only(n: usize) -> Self {
        Self {
            names: vec![INTERCEPT.to_string()],
            x: DMatrix::from_element(n, 1, 1.0),
            intercept: true,
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

pub(crate) fn response(table: &DataTable, name: &str) -> Result<DVector<f64>> {
    let v = table.values(name)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(name.to_string()));
    }
    Ok(DVector::from_column_slice(v))
}

/// Upper-triangular factor of the column-normalized design plus the column
/// norms. A diagonal entry below 1e-9 marks a column lying in the span of the
/// columns before it.
pub(crate) struct ScaledQr {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub norms: DVector<f64>,
}

pub(crate) fn scaled_qr(design: &Design) -> Result<ScaledQr> {
    let (n, p) = (design.n(), design.p());
    if n < p {
        return Err(Error::InsufficientRows { rows: n, terms: p });
    }
    let norms = DVector::from_iterator(p, design.x.column_iter().map(|c| c.norm()));
    let mut xs = design.x.clone();
    for (j, mut c) in xs.column_iter_mut().enumerate() {
        if norms[j] > 0.0 {
            c /= norms[j];
        }
    }
    let qr = xs.qr();
    let r = qr.r();
    let dependent: Vec<String> = (0..p)
        .filter(|&j| r[(j, j)].abs() < 1e-9)
        .map(|j| design.names[j].clone())
        .collect();
    if !dependent.is_empty() {
        return Err(Error::RankDeficient(dependent));
    }
    Ok(ScaledQr {
        q: qr.q(),
        r,
        norms,
    })
}

impl ScaledQr {
    pub fn coefficients(&self, y: &DVector<f64>) -> DVector<f64> {
        let qty = self.q.transpose() * y;
        let beta_scaled = self
            .r
            .solve_upper_triangular(&qty)
            .expect("nonsingular triangular factor");
        beta_scaled.component_div(&self.norms)
    }

    /// (XᵀX)⁻¹ of the unscaled design.
    pub fn xtx_inverse(&self) -> DMatrix<f64> {
        let p = self.r.ncols();
        let r_inv = self
            .r
            .solve_upper_triangular(&DMatrix::identity(p, p))
            .expect("nonsingular triangular factor");
        let mut inv = &r_inv * r_inv.transpose();
        for i in 0..p {
            for j in 0..p {
                inv[(i, j)] /= self.norms[i] * self.norms[j];
            }
        }
        inv
    }
}
