//! Sparse tensors with 1-based coordinates and exact entries.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseTensor {
    dims: Vec<usize>,
    entries: BTreeMap<Vec<usize>, Q>,
}

impl SparseTensor {
    pub fn new(dims: Vec<usize>) -> Self {
        Self {
            dims,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_dense_2d(rows: &[Vec<Q>]) -> Self {
        let n2 = rows.first().map_or(0, Vec::len);
        let mut t = Self::new(vec![rows.len(), n2]);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t.set(&[i + 1, j + 1], v.clone()).expect("in range");
            }
        }
        t
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn cell_count(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, coord: &[usize]) -> Result<()> {
        if coord.len() != self.dims.len() {
            return Err(Error::Shape(format!(
                "coordinate has {} components, tensor has {} dimensions",
                coord.len(),
                self.dims.len()
            )));
        }
        for (p, (&c, &n)) in coord.iter().zip(&self.dims).enumerate() {
            if c == 0 || c > n {
                return Err(Error::Shape(format!(
                    "coordinate {c} outside 1..={n} in dimension {p}"
                )));
            }
        }
        Ok(())
    }

    /// Stores `value` at `coord`; zero removes the entry.
    pub fn set(&mut self, coord: &[usize], value: Q) -> Result<()> {
        self.check(coord)?;
        if value.is_zero() {
            self.entries.remove(coord);
        } else {
            self.entries.insert(coord.to_vec(), value);
        }
        Ok(())
    }

    pub fn add(&mut self, coord: &[usize], value: &Q) -> Result<()> {
        let sum = self.get(coord) + value;
        self.set(coord, sum)
    }

    pub fn get(&self, coord: &[usize]) -> Q {
        self.entries.get(coord).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &Q)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn total(&self) -> Q {
        self.entries.values().fold(Q::zero(), |acc, v| acc + v)
    }

    /// Sum of all entries whose coordinates are componentwise `<= m`.
    pub fn prefix_sum(&self, m: &[usize]) -> Q {
        self.entries
            .iter()
            .filter(|(c, _)| c.iter().zip(m).all(|(a, b)| a <= b))
            .fold(Q::zero(), |acc, (_, v)| acc + v)
    }

    /// Row-major list of every coordinate of the tensor.
    pub fn all_coords(&self) -> Vec<Vec<usize>> {
        all_coords(&self.dims)
    }
}

/// Every coordinate in the box `[1..=dims[0]] x ... x [1..=dims[d-1]]`, row-major.
pub fn all_coords(dims: &[usize]) -> Vec<Vec<usize>> {
    if dims.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(dims.iter().product());
    let mut cur = vec![1; dims.len()];
    loop {
        out.push(cur.clone());
        let mut p = dims.len();
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            if cur[p] < dims[p] {
                cur[p] += 1;
                break;
            }
            cur[p] = 1;
        }
    }
}
