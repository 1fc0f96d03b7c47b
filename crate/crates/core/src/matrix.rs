//! Leading `N x N` blocks of infinite matrices.
//!
//! Each block carries its upper bandwidth `u` (entries with `j - i > u` are
//! zero in the infinite matrix) and the number of leading rows that are known
//! to equal the infinite matrix. Row `i` of a product `A B` sums over
//! `k <= i + u_A`, so it is exact only when those rows of `B` are exact and
//! lie inside the block.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedMatrix {
    size: usize,
    entries: Vec<Rational>,
    upper_bandwidth: i64,
    valid_rows: usize,
}

impl TruncatedMatrix {
    pub fn zeros(size: usize, upper_bandwidth: i64) -> Self {
        Self {
            size,
            entries: vec![Rational::zero(); size * size],
            upper_bandwidth,
            valid_rows: size,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, 0);
        for i in 0..size {
            m.set(i, i, int(1));
        }
        m
    }

    /// Builds from a row-major closure; entries beyond the bandwidth must be
    /// zero and are not queried.
    pub fn from_fn<F>(size: usize, upper_bandwidth: i64, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Rational,
    {
        let mut m = Self::zeros(size, upper_bandwidth);
        for i in 0..size {
            for j in 0..size {
                if j as i64 - i as i64 <= upper_bandwidth {
                    m.set(i, j, f(i, j));
                }
            }
        }
        m
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len(), 0);
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn upper_bandwidth(&self) -> i64 {
        self.upper_bandwidth
    }

    pub fn valid_rows(&self) -> usize {
        self.valid_rows
    }

    pub fn with_valid_rows(mut self, rows: usize) -> Self {
        self.valid_rows = rows.min(self.size);
        self
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.size + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.size == other.size {
            Ok(())
        } else {
            Err(Error::SizeMismatch { left: self.size, right: other.size })
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let n = self.size;
        let ua = self.upper_bandwidth;
        let mut out = Self::zeros(n, ua + other.upper_bandwidth);
        for i in 0..n {
            let kend = (i as i64 + ua + 1).clamp(0, n as i64) as usize;
            for k in 0..kend {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        let shift = ua.max(0) as usize;
        out.valid_rows = self
            .valid_rows
            .min(other.valid_rows.saturating_sub(shift))
            .min(n.saturating_sub(shift));
        Ok(out)
    }

    fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(&Rational, &Rational) -> Rational,
    {
        self.check_size(other)?;
        Ok(Self {
            size: self.size,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
            upper_bandwidth: self.upper_bandwidth.max(other.upper_bandwidth),
            valid_rows: self.valid_rows.min(other.valid_rows),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            entries: self.entries.iter().map(|e| e * s).collect(),
            ..self.clone()
        }
    }

    /// Exact inverse of a unit lower triangular block.
    ///
    /// Only the valid leading rows must be unit lower triangular; the inverse
    /// of a lower triangular leading block is the leading block of the
    /// inverse, so validity carries over unchanged.
    pub fn invert_unit_lower(&self) -> Result<Self> {
        let n = self.size;
        let v = self.valid_rows;
        for i in 0..v {
            if !self.get(i, i).is_one() {
                return Err(Error::NotUnitLowerTriangular(i));
            }
            if (i + 1..n).any(|j| !self.get(i, j).is_zero()) {
                return Err(Error::NotUnitLowerTriangular(i));
            }
        }
        let mut inv = Self::zeros(n, 0);
        // Forward substitution, row by row: inv[i] = e_i - sum_{k<i} a[i][k] inv[k].
        for i in 0..v {
            inv.set(i, i, int(1));
            for k in 0..i {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..=k {
                    let delta = a * inv.get(k, j);
                    if !delta.is_zero() {
                        inv.entries[i * n + j] -= delta;
                    }
                }
            }
        }
        inv.valid_rows = v;
        Ok(inv)
    }

    /// Keeps only the diagonals `-lower..=upper`.
    pub fn band(&self, lower: usize, upper: usize) -> Self {
        let mut m = self.clone();
        for i in 0..self.size {
            for j in 0..self.size {
                if i > j + lower || j > i + upper {
                    m.set(i, j, Rational::zero());
                }
            }
        }
        m.upper_bandwidth = self.upper_bandwidth.min(upper as i64);
        m
    }

    /// Max absolute entry and first nonzero position over the leading `rows`.
    pub fn max_abs_in_rows(&self, rows: usize) -> (Rational, Option<(usize, usize)>) {
        let mut max = Rational::zero();
        let mut witness = None;
        for i in 0..rows.min(self.size) {
            for j in 0..self.size {
                let e = self.get(i, j);
                if !e.is_zero() {
                    witness.get_or_insert((i, j));
                    let a = e.abs();
                    if a > max {
                        max = a;
                    }
                }
            }
        }
        (max, witness)
    }

    /// Whether the leading `rows` rows agree with the top-left block of a
    /// larger truncation.
    pub fn agrees_with_leading_block(&self, larger: &Self, rows: usize) -> bool {
        if larger.size < self.size {
            return false;
        }
        (0..rows.min(self.size))
            .all(|i| (0..self.size).all(|j| self.get(i, j) == larger.get(i, j)))
    }
}

impl fmt::Display for TruncatedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size {
            let row: Vec<String> = self.row(i).iter().map(crate::rational::format).collect();
            let mark = if i < self.valid_rows { ' ' } else { '*' };
            writeln!(f, "{mark}[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
