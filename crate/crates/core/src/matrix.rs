//! Dense matrices over the completed max-plus semiring.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::weight::{oplus, oplus_dual, otimes, Weight};
use crate::{Error, Result};

/// Row-major dense matrix of [`Weight`]s.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TropicalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Weight>,
}

impl TropicalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Weight>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "matrix construction",
                left: (rows, cols),
                right: (entries.len(), 1),
            });
        }
        Ok(TropicalMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows<R: AsRef<[Weight]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::ShapeMismatch {
                    op: "matrix rows",
                    left: (1, cols),
                    right: (1, r.len()),
                });
            }
            entries.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, entries)
    }

    /// The all-`ε` matrix `ℰ`.
    pub fn epsilon(rows: usize, cols: usize) -> Self {
        TropicalMatrix {
            rows,
            cols,
            entries: vec![Weight::EPSILON; rows * cols],
        }
    }

    /// `𝟙` on the diagonal, `ε` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::epsilon(n, n);
        for i in 0..n {
            m.set(i, i, Weight::ONE);
        }
        m
    }

    /// Column vector.
    pub fn column(values: &[Weight]) -> Self {
        TropicalMatrix {
            rows: values.len(),
            cols: 1,
            entries: values.to_vec(),
        }
    }

    /// Row vector.
    pub fn row(values: &[Weight]) -> Self {
        TropicalMatrix {
            rows: 1,
            cols: values.len(),
            entries: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Weight] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Weight {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Weight) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row_slice(&self, i: usize) -> &[Weight] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[Weight]> {
        (0..self.rows).map(move |i| self.row_slice(i))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::epsilon(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `[A ⊗ B]_ij = ⊕_k a_ik ⊗ b_kj`.
    pub fn otimes(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                op: "otimes",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Self::epsilon(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let v = (0..self.cols)
                    .map(|k| otimes(self.get(i, k), rhs.get(k, j)))
                    .fold(Weight::EPSILON, oplus);
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Entrywise `⊕`.
    pub fn oplus(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "oplus", oplus)
    }

    /// Entrywise `⊕′` (min).
    pub fn oplus_dual(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "oplus_dual", oplus_dual)
    }

    fn zip_with(
        &self,
        rhs: &Self,
        op: &'static str,
        f: impl Fn(Weight, Weight) -> Weight,
    ) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(TropicalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// `A^{⊗k}` for `k ≥ 1`.
    pub fn power(&self, k: usize) -> Result<Self> {
        if self.rows != self.cols || k == 0 {
            return Err(Error::InvalidPower {
                rows: self.rows,
                cols: self.cols,
                k,
            });
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.otimes(self)?;
        }
        Ok(acc)
    }

    /// `A ⊗ x` for a column vector `x`.
    pub fn apply(&self, x: &[Weight]) -> Result<Vec<Weight>> {
        if self.cols != x.len() {
            return Err(Error::ShapeMismatch {
                op: "matrix-vector product",
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        Ok(self
            .iter_rows()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .map(|(&a, &b)| otimes(a, b))
                    .fold(Weight::EPSILON, oplus)
            })
            .collect())
    }

    /// `xᵀ ⊗ A` for a row vector `x`.
    pub fn apply_left(&self, x: &[Weight]) -> Result<Vec<Weight>> {
        if self.rows != x.len() {
            return Err(Error::ShapeMismatch {
                op: "vector-matrix product",
                left: (1, x.len()),
                right: self.shape(),
            });
        }
        Ok((0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| otimes(x[i], self.get(i, j)))
                    .fold(Weight::EPSILON, oplus)
            })
            .collect())
    }

    /// Projection onto the max-plus Boolean semiring: `𝟙` where the entry is
    /// not `ε`, `ε` elsewhere.
    pub fn boolean_support(&self) -> Self {
        TropicalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|w| {
                    if w.is_epsilon() {
                        Weight::EPSILON
                    } else {
                        Weight::ONE
                    }
                })
                .collect(),
        }
    }

    pub fn is_all_epsilon(&self) -> bool {
        self.entries.iter().all(|w| w.is_epsilon())
    }

    pub fn has_top(&self) -> bool {
        self.entries.iter().any(|w| w.is_top())
    }
}

impl fmt::Debug for TropicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter_rows()).finish()
    }
}

/// `x ≤ y` in the `⊕`-order, i.e. `x ⊕ y = y`.
pub fn leq(x: &[Weight], y: &[Weight]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            op: "leq",
            left: (x.len(), 1),
            right: (y.len(), 1),
        });
    }
    Ok(x.iter().zip(y).all(|(a, b)| a <= b))
}

/// Entrywise `⊕` of two vectors.
pub fn vec_oplus(x: &[Weight], y: &[Weight]) -> Result<Vec<Weight>> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            op: "vector oplus",
            left: (x.len(), 1),
            right: (y.len(), 1),
        });
    }
    Ok(x.iter().zip(y).map(|(&a, &b)| oplus(a, b)).collect())
}

/// Entrywise `⊕′` of two vectors.
pub fn vec_oplus_dual(x: &[Weight], y: &[Weight]) -> Result<Vec<Weight>> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            op: "vector oplus_dual",
            left: (x.len(), 1),
            right: (y.len(), 1),
        });
    }
    Ok(x.iter().zip(y).map(|(&a, &b)| oplus_dual(a, b)).collect())
}

/// True if some entry is neither `ε` nor `⊤`.
pub fn has_finite_entry(x: &[Weight]) -> bool {
    x.iter().any(|w| w.is_finite())
}

pub fn is_all_epsilon(x: &[Weight]) -> bool {
    x.iter().all(|w| w.is_epsilon())
}
