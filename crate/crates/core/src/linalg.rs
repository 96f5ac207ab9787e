//! Dense exact linear algebra over a `FieldDescriptor`, plus the reduced
//! echelon structure behind `Subspace`.

use crate::error::{Error, Result};
use crate::exact::{FieldDescriptor, FieldElem};

#[derive(Debug, Clone)]
pub struct Mat {
    pub desc: FieldDescriptor,
    pub rows: usize,
    pub cols: usize,
    data: Vec<FieldElem>,
}

impl Mat {
    pub fn zero(desc: &FieldDescriptor, rows: usize, cols: usize) -> Self {
        Mat {
            desc: desc.clone(),
            rows,
            cols,
            data: vec![FieldElem::zero(desc); rows * cols],
        }
    }

    pub fn identity(desc: &FieldDescriptor, n: usize) -> Self {
        let mut m = Mat::zero(desc, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = FieldElem::one(desc);
        }
        m
    }

    pub fn from_rows(desc: &FieldDescriptor, rows: Vec<Vec<FieldElem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            desc: desc.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &FieldElem {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut FieldElem {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zero(&self.desc, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b)?;
                    let cur = out.at(i, j).add(&prod);
                    *out.at_mut(i, j) = cur;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![FieldElem::zero(&self.desc); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for i in 0..self.rows {
                let a = self.at(i, j);
                if !a.is_zero() {
                    out[i] = out[i].add(&a.mul(x)?);
                }
            }
        }
        Ok(out)
    }

    /// In-place reduced row echelon form; returns the pivot columns. Pivot
    /// choice is the first row with a nonzero entry, so results are
    /// deterministic.
    pub fn rref(&mut self) -> Result<Vec<usize>> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(pr) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(row * self.cols + c, pr * self.cols + c);
                }
            }
            let inv = self.at(row, col).inv()?;
            for c in col..self.cols {
                let v = self.at(row, c).mul(&inv)?;
                *self.at_mut(row, c) = v;
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let factor = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c).sub(&self.at(row, c).mul(&factor)?);
                        *self.at_mut(r, c) = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        Ok(pivots)
    }

    pub fn rank(&self) -> Result<usize> {
        let mut m = self.clone();
        Ok(m.rref()?.len())
    }

    pub fn is_invertible(&self) -> Result<bool> {
        Ok(self.rows == self.cols && self.rank()? == self.rows)
    }

    /// Basis of the right kernel, one vector per free column, deterministic.
    pub fn kernel(&self) -> Result<Vec<Vec<FieldElem>>> {
        let mut m = self.clone();
        let pivots = m.rref()?;
        let mut basis = Vec::new();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut vec = vec![FieldElem::zero(&self.desc); self.cols];
            vec[free] = FieldElem::one(&self.desc);
            for (c, pr) in pivot_of_col.iter().enumerate() {
                if let Some(r) = pr {
                    vec[c] = m.at(*r, free).neg();
                }
            }
            basis.push(vec);
        }
        Ok(basis)
    }

    /// One solution of `self * x = rhs` with free variables set to zero, or
    /// `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &[FieldElem]) -> Result<Option<Vec<FieldElem>>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Mat::zero(&self.desc, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, self.cols) = rhs[r].clone();
        }
        let pivots = aug.rref()?;
        if pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![FieldElem::zero(&self.desc); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        Ok(Some(x))
    }
}

/// A reduced row-echelon basis maintained incrementally: basis vectors are
/// linearly independent with ascending pivot columns.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    pub desc: FieldDescriptor,
    pub width: usize,
    rows: Vec<Vec<FieldElem>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(desc: &FieldDescriptor, width: usize) -> Self {
        EchelonBasis {
            desc: desc.clone(),
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<FieldElem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` against the basis; the result has no support on pivot
    /// columns.
    pub fn reduce(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>> {
        let mut v = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if !v[piv].is_zero() {
                let factor = v[piv].clone();
                for c in piv..self.width {
                    if !row[c].is_zero() {
                        v[c] = v[c].sub(&row[c].mul(&factor)?);
                    }
                }
            }
        }
        Ok(v)
    }

    pub fn contains(&self, v: &[FieldElem]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(FieldElem::is_zero))
    }

    /// Insert a vector, keeping reduced echelon form. Returns `true` when the
    /// dimension grew.
    pub fn insert(&mut self, v: &[FieldElem]) -> Result<bool> {
        let mut v = self.reduce(v)?;
        let Some(piv) = v.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let inv = v[piv].inv()?;
        for c in piv..self.width {
            if !v[c].is_zero() {
                v[c] = v[c].mul(&inv)?;
            }
        }
        // back-eliminate the new pivot from existing rows
        for row in &mut self.rows {
            if !row[piv].is_zero() {
                let factor = row[piv].clone();
                for c in piv..self.width {
                    if !v[c].is_zero() {
                        row[c] = row[c].sub(&v[c].mul(&factor)?);
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < piv);
        self.pivots.insert(at, piv);
        self.rows.insert(at, v);
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldDescriptor {
        FieldDescriptor::prime(3).unwrap()
    }

    fn m(desc: &FieldDescriptor, rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            desc,
            rows.iter()
                .map(|r| r.iter().map(|&v| FieldElem::from_int(desc, v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_kernel() {
        let d = f3();
        let a = m(&d, &[&[1, 2, 0], &[2, 4, 0], &[0, 0, 1]]);
        assert_eq!(a.rank().unwrap(), 2);
        let k = a.kernel().unwrap();
        assert_eq!(k.len(), 1);
        for v in &k {
            let img = a.apply(v).unwrap();
            assert!(img.iter().all(FieldElem::is_zero));
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let d = f3();
        let a = m(&d, &[&[1, 1], &[0, 1]]);
        let rhs = vec![FieldElem::from_int(&d, 2), FieldElem::from_int(&d, 1)];
        let x = a.solve(&rhs).unwrap().unwrap();
        assert_eq!(a.apply(&x).unwrap(), rhs);

        let b = m(&d, &[&[1, 1], &[2, 2]]);
        let rhs = vec![FieldElem::from_int(&d, 0), FieldElem::from_int(&d, 1)];
        assert!(b.solve(&rhs).unwrap().is_none());
    }

    #[test]
    fn echelon_insert_dedups() {
        let d = f3();
        let mut e = EchelonBasis::new(&d, 3);
        let v1 = vec![
            FieldElem::from_int(&d, 1),
            FieldElem::from_int(&d, 2),
            FieldElem::from_int(&d, 0),
        ];
        let v2 = vec![
            FieldElem::from_int(&d, 2),
            FieldElem::from_int(&d, 4),
            FieldElem::from_int(&d, 0),
        ];
        assert!(e.insert(&v1).unwrap());
        assert!(!e.insert(&v2).unwrap());
        assert_eq!(e.dim(), 1);
        assert!(e.contains(&v2).unwrap());
    }
}
