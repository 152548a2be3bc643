use std::fmt::Write as _;
use std::io;

use crate::error::LpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
    pub name: String,
}

/// A sparse row whose activity `Σ a_j x_j` must lie in `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub lower: f64,
    pub upper: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        let (lower, upper) = match sense {
            Sense::Le => (f64::NEG_INFINITY, rhs),
            Sense::Ge => (rhs, f64::INFINITY),
            Sense::Eq => (rhs, rhs),
        };
        Row { coeffs, lower, upper }
    }

    pub fn ranged(coeffs: Vec<(usize, f64)>, lower: f64, upper: f64) -> Self {
        Row { coeffs, lower, upper }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        (self.lower - act).max(act - self.upper).max(0.0)
    }
}

/// Minimization LP: `min c·x` subject to row intervals and column bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpModel {
    pub(crate) cols: Vec<Column>,
    pub(crate) rows: Vec<Row>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_column(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        self.add_named_column(format!("c{}", self.cols.len()), lower, upper, cost)
    }

    pub fn add_named_column(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> usize {
        self.cols.push(Column { lower, upper, cost, name: name.into() });
        self.cols.len() - 1
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.cols
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        if lower > upper {
            return Err(LpError::InvalidBounds { col, lower, upper });
        }
        let c = &mut self.cols[col];
        c.lower = lower;
        c.upper = upper;
        Ok(())
    }

    fn check_row(&self, index: usize, row: &Row) -> Result<(), LpError> {
        for &(col, a) in &row.coeffs {
            if col >= self.cols.len() {
                return Err(LpError::UnknownColumn { row: index, col, ncols: self.cols.len() });
            }
            if !a.is_finite() {
                return Err(LpError::NonFinite { row: index });
            }
        }
        if row.lower.is_nan() || row.upper.is_nan() {
            return Err(LpError::NonFinite { row: index });
        }
        Ok(())
    }

    pub fn add_row(&mut self, row: Row) -> Result<usize, LpError> {
        self.check_row(self.rows.len(), &row)?;
        self.rows.push(row);
        Ok(self.rows.len() - 1)
    }

    /// Appends all rows or none of them.
    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = Row>) -> Result<(), LpError> {
        let rows: Vec<Row> = rows.into_iter().collect();
        for (i, row) in rows.iter().enumerate() {
            self.check_row(self.rows.len() + i, row)?;
        }
        self.rows.extend(rows);
        Ok(())
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cols.iter().zip(x).map(|(c, v)| c.cost * v).sum()
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x)).fold(0.0, f64::max);
        let bounds = self
            .cols
            .iter()
            .zip(x)
            .map(|(c, &v)| (c.lower - v).max(v - c.upper).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    /// Writes the model in CPLEX LP text format.
    pub fn write_lp(&self, mut out: impl io::Write) -> io::Result<()> {
        let mut s = String::from("\\ generated by expsearch-lp\nMinimize\n obj:");
        let mut any = false;
        for c in self.cols.iter().filter(|c| c.cost != 0.0) {
            let _ = write!(s, " {} {}", signed(c.cost), c.name);
            any = true;
        }
        if !any {
            s.push_str(" 0");
        }
        s.push_str("\nSubject To\n");
        for (i, r) in self.rows.iter().enumerate() {
            let mut lhs = String::new();
            for &(j, a) in &r.coeffs {
                let _ = write!(lhs, " {} {}", signed(a), self.cols[j].name);
            }
            if lhs.is_empty() {
                lhs.push_str(" 0 ");
                lhs.push_str(&self.cols.first().map(|c| c.name.clone()).unwrap_or_default());
            }
            if r.lower == r.upper {
                let _ = writeln!(s, " r{i}:{lhs} = {}", r.lower);
            } else {
                if r.lower.is_finite() {
                    let _ = writeln!(s, " r{i}_lo:{lhs} >= {}", r.lower);
                }
                if r.upper.is_finite() {
                    let _ = writeln!(s, " r{i}_hi:{lhs} <= {}", r.upper);
                }
            }
        }
        s.push_str("Bounds\n");
        for c in &self.cols {
            let lo = if c.lower.is_finite() { c.lower.to_string() } else { "-inf".into() };
            let hi = if c.upper.is_finite() { c.upper.to_string() } else { "+inf".into() };
            let _ = writeln!(s, " {lo} <= {} <= {hi}", c.name);
        }
        s.push_str("End\n");
        out.write_all(s.as_bytes())
    }
}

fn signed(v: f64) -> String {
    if v < 0.0 {
        format!("- {}", -v)
    } else {
        format!("+ {v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_column_is_rejected_atomically() {
        let mut m = LpModel::new();
        let x = m.add_column(0.0, 1.0, 1.0);
        let good = Row::new(vec![(x, 1.0)], Sense::Le, 1.0);
        let bad = Row::new(vec![(7, 1.0)], Sense::Le, 1.0);
        let err = m.add_rows([good, bad]).unwrap_err();
        assert_eq!(err, LpError::UnknownColumn { row: 1, col: 7, ncols: 1 });
        assert_eq!(m.num_rows(), 0);
    }

    #[test]
    fn lp_dump_mentions_every_row() {
        let mut m = LpModel::new();
        let x = m.add_named_column("x", 0.0, 10.0, 1.0);
        let y = m.add_named_column("y", 0.0, 1.0, -2.0);
        m.add_row(Row::new(vec![(x, 1.0), (y, 1.0)], Sense::Ge, 3.0)).unwrap();
        m.add_row(Row::ranged(vec![(x, 1.0), (y, -1.0)], 0.0, 1.0)).unwrap();
        let mut buf = Vec::new();
        m.write_lp(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("obj: + 1 x - 2 y"));
        assert!(text.contains("r0_lo: + 1 x + 1 y >= 3"));
        assert!(text.contains("r1_hi: + 1 x - 1 y <= 1"));
        assert!(text.contains("0 <= x <= 10"));
    }
}
