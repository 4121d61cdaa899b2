//! Exact linear algebra: sparse integer echelon forms for large blocks,
//! dense Bareiss elimination over ℚ, and Gaussian elimination over the
//! coefficient field.

pub mod expand;
pub mod sparse;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{ChartRef, ScalarExpr, Q};

pub use sparse::{Echelon, IntVec};

/// Dense rational matrix with rank by fraction-free elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        Ok(ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                let mut l = BigInt::one();
                for x in row {
                    l = num_integer::Integer::lcm(&l, x.denom());
                }
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }

    /// Rank via Bareiss elimination; every division is exact.
    pub fn rank(&self) -> usize {
        let mut m = self.integer_rows();
        let (nr, nc) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..nc {
            let Some(piv) = (r..nr).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, piv);
            for i in r + 1..nr {
                for j in c + 1..nc {
                    let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                    m[i][j] = v / &prev;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            r += 1;
            if r == nr {
                break;
            }
        }
        r
    }

    /// Right kernel basis, one rational vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (nr, nc) = (self.rows, self.cols);
        let mut m: Vec<Vec<Q>> = (0..nr).map(|i| self.data[i * nc..(i + 1) * nc].to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..nc {
            let Some(piv) = (r..nr).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, piv);
            let inv = Q::one() / &m[r][c];
            for x in m[r].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..nr {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..nc {
                        let v = &m[r][j] * &f;
                        m[i][j] = &m[i][j] - v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..nc).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); nc];
                v[f] = Q::one();
                for (k, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m[k][f].clone();
                }
                v
            })
            .collect()
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Q::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect()
    }
}

/// Dense square/rectangular matrix over the coefficient field.
#[derive(Clone, Debug)]
pub struct FieldMatrix {
    pub chart: ChartRef,
    pub rows: Vec<Vec<ScalarExpr>>,
}

impl FieldMatrix {
    pub fn new(chart: &ChartRef, rows: Vec<Vec<ScalarExpr>>) -> Self {
        FieldMatrix { chart: chart.clone(), rows }
    }

    fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Row echelon with pivots; returns (reduced rows, pivot columns, sign of permutation).
    fn rref(&self) -> (Vec<Vec<ScalarExpr>>, Vec<usize>, i32) {
        let mut m = self.rows.clone();
        let nr = m.len();
        let nc = self.ncols();
        let mut pivots = Vec::new();
        let mut sign = 1;
        let mut r = 0;
        for c in 0..nc {
            let Some(piv) = (r..nr).find(|&i| !m[i][c].is_zero()) else { continue };
            if piv != r {
                m.swap(r, piv);
                sign = -sign;
            }
            for i in 0..nr {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].checked_div(&m[r][c]).expect("nonzero pivot");
                    for j in 0..nc {
                        let v = &m[r][j] * &f;
                        m[i][j] = &m[i][j] - &v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, sign)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Result<ScalarExpr> {
        let n = self.rows.len();
        if self.ncols() != n {
            return Err(Error::DegreeMismatch("determinant of a non-square matrix".into()));
        }
        if n == 0 {
            return Ok(ScalarExpr::one(&self.chart));
        }
        let (m, pivots, sign) = self.rref();
        if pivots.len() < n {
            return Ok(ScalarExpr::zero(&self.chart));
        }
        let mut d = ScalarExpr::int(&self.chart, sign as i64);
        for (i, row) in m.iter().enumerate() {
            d = &d * &row[i];
        }
        Ok(d)
    }

    pub fn inverse(&self) -> Result<FieldMatrix> {
        let n = self.rows.len();
        if self.ncols() != n {
            return Err(Error::DegreeMismatch("inverse of a non-square matrix".into()));
        }
        let mut aug = Vec::with_capacity(n);
        for (i, row) in self.rows.iter().enumerate() {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { ScalarExpr::one(&self.chart) } else { ScalarExpr::zero(&self.chart) });
            }
            aug.push(r);
        }
        let (m, pivots, _) = FieldMatrix::new(&self.chart, aug).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::DivisionByZero);
        }
        let rows = m
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let p = r[i].inv().expect("pivot");
                r[n..].iter().map(|x| x * &p).collect()
            })
            .collect();
        Ok(FieldMatrix::new(&self.chart, rows))
    }

    /// One solution of `M x = b` with free unknowns set to zero.
    pub fn solve(&self, b: &[ScalarExpr]) -> Option<Vec<ScalarExpr>> {
        let nc = self.ncols();
        let aug: Vec<Vec<ScalarExpr>> = self
            .rows
            .iter()
            .zip(b)
            .map(|(r, x)| {
                let mut r = r.clone();
                r.push(x.clone());
                r
            })
            .collect();
        let (m, pivots, _) = FieldMatrix::new(&self.chart, aug).rref();
        if pivots.last() == Some(&nc) {
            return None;
        }
        let mut x = vec![ScalarExpr::zero(&self.chart); nc];
        for (k, &pc) in pivots.iter().enumerate() {
            x[pc] = m[k][nc].checked_div(&m[k][pc]).ok()?;
        }
        Some(x)
    }
}
