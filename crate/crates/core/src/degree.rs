//! Degree sequences, their running sums, and consistency of tensors against them.

use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};
use crate::tensor::SparseTensor;

/// A non-increasing, non-negative frequency vector indexed by rank `1..=len`.
///
/// Entries past the stored prefix are implicit zeros up to `len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<Q>,
    len: usize,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<Q>) -> Result<Self> {
        for (r, d) in degrees.iter().enumerate() {
            if d.is_negative() {
                return Err(Error::InvalidSequence(format!(
                    "degree at rank {} is negative ({})",
                    r + 1,
                    fmt_q(d)
                )));
            }
            if r > 0 && degrees[r - 1] < *d {
                return Err(Error::InvalidSequence(format!(
                    "degree at rank {} ({}) exceeds the one before it ({})",
                    r + 1,
                    fmt_q(d),
                    fmt_q(&degrees[r - 1])
                )));
            }
        }
        let len = degrees.len();
        Ok(Self { degrees, len })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(crate::rational::qs(values))
    }

    /// Sorts arbitrary non-negative frequencies into a sequence.
    pub fn from_unsorted(mut degrees: Vec<Q>) -> Result<Self> {
        degrees.sort_by(|a, b| b.cmp(a));
        Self::new(degrees)
    }

    /// `n` ones.
    pub fn ones(n: usize) -> Self {
        Self {
            degrees: vec![Q::one(); n],
            len: n,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Degree at 1-based rank `r`; zero past the end.
    pub fn get(&self, r: usize) -> Q {
        assert!(r >= 1, "ranks are 1-based");
        self.degrees.get(r - 1).cloned().unwrap_or_else(Q::zero)
    }

    /// Largest degree, zero for an empty sequence.
    pub fn first(&self) -> Q {
        self.degrees.first().cloned().unwrap_or_else(Q::zero)
    }

    pub fn stored(&self) -> &[Q] {
        &self.degrees
    }

    pub fn to_vec(&self) -> Vec<Q> {
        (1..=self.len).map(|r| self.get(r)).collect()
    }

    pub fn total(&self) -> Q {
        self.degrees.iter().fold(Q::zero(), |acc, d| acc + d)
    }

    pub fn pad_to(&self, n: usize) -> Result<Self> {
        pad_to(self, n)
    }

    pub fn cdf(&self) -> Cdf {
        cdf(self)
    }

    /// Pointwise `self <= other` over the longer of the two extents.
    pub fn dominated_by(&self, other: &DegreeSequence) -> bool {
        let n = self.len.max(other.len);
        (1..=n).all(|r| self.get(r) <= other.get(r))
    }

    pub fn is_integral(&self) -> bool {
        self.degrees.iter().all(|d| d.is_integer())
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_vec().iter().map(fmt_q).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Running sums `F(0..=n)` with `F(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cdf {
    prefix: Vec<Q>,
}

impl Cdf {
    pub fn n(&self) -> usize {
        self.prefix.len() - 1
    }

    /// `F(r)`; saturates at the total past the end.
    pub fn at(&self, r: usize) -> Q {
        self.prefix[r.min(self.n())].clone()
    }

    pub fn total(&self) -> Q {
        self.prefix[self.n()].clone()
    }

    pub fn prefix(&self) -> &[Q] {
        &self.prefix
    }
}

/// Max tuple multiplicity of a bag relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MaxMultiplicity {
    Finite(Q),
    Infinite,
}

impl MaxMultiplicity {
    pub fn finite(b: Q) -> Result<Self> {
        if b < Q::one() {
            return Err(Error::InvalidSequence(format!(
                "max multiplicity must be at least 1, got {}",
                fmt_q(&b)
            )));
        }
        Ok(Self::Finite(b))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    pub fn value(&self) -> Option<&Q> {
        match self {
            Self::Finite(b) => Some(b),
            Self::Infinite => None,
        }
    }

    /// `v <= self`.
    pub fn admits(&self, v: &Q) -> bool {
        match self {
            Self::Finite(b) => v <= b,
            Self::Infinite => true,
        }
    }
}

impl fmt::Display for MaxMultiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(b) => f.write_str(&fmt_q(b)),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

pub fn pad_to(seq: &DegreeSequence, n: usize) -> Result<DegreeSequence> {
    if n < seq.len {
        return Err(Error::DomainShrink { len: seq.len, n });
    }
    Ok(DegreeSequence {
        degrees: seq.degrees.clone(),
        len: n,
    })
}

pub fn cdf(seq: &DegreeSequence) -> Cdf {
    Cdf {
        prefix: std::iter::once(Q::zero())
            .chain(discrete_integral(&seq.to_vec()))
            .collect(),
    }
}

/// `(Δv)_i = v_i - v_{i-1}` with `v_0 = 0`.
pub fn discrete_derivative(v: &[Q]) -> Vec<Q> {
    let mut prev = Q::zero();
    v.iter()
        .map(|x| {
            let d = x - &prev;
            prev = x.clone();
            d
        })
        .collect()
}

/// `(Σv)_i = v_1 + ... + v_i`.
pub fn discrete_integral(v: &[Q]) -> Vec<Q> {
    let mut acc = Q::zero();
    v.iter()
        .map(|x| {
            acc += x;
            acc.clone()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// Sum of the slice at this coordinate along `dim` exceeds the degree.
    Marginal {
        dim: usize,
        sum: Q,
        degree: Q,
    },
    Negative {
        value: Q,
    },
    AboveMultiplicity {
        value: Q,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub coord: Vec<usize>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyVerdict {
    /// Per dimension: every marginal is within the degree sequence.
    pub marginals_ok: Vec<bool>,
    /// Every entry lies in `[0, B]`.
    pub entries_ok: bool,
    pub first_violation: Option<Violation>,
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        self.entries_ok && self.marginals_ok.iter().all(|&ok| ok)
    }
}

pub fn check_consistent(
    tensor: &SparseTensor,
    seqs: &[DegreeSequence],
    b: &MaxMultiplicity,
) -> Result<ConsistencyVerdict> {
    if tensor.arity() != seqs.len() {
        return Err(Error::Shape(format!(
            "tensor has {} dimensions but {} sequences were given",
            tensor.arity(),
            seqs.len()
        )));
    }
    for (p, (n, s)) in tensor.dims().iter().zip(seqs).enumerate() {
        if *n != s.len() {
            return Err(Error::Shape(format!(
                "dimension {p} has extent {n} but its sequence has length {}",
                s.len()
            )));
        }
    }

    let mut first_violation = None;
    let mut entries_ok = true;
    for (coord, v) in tensor.iter() {
        let kind = if v.is_negative() {
            Some(ViolationKind::Negative { value: v.clone() })
        } else if !b.admits(v) {
            Some(ViolationKind::AboveMultiplicity { value: v.clone() })
        } else {
            None
        };
        if let Some(kind) = kind {
            entries_ok = false;
            first_violation.get_or_insert(Violation {
                coord: coord.to_vec(),
                kind,
            });
        }
    }

    let mut marginals_ok = Vec::with_capacity(seqs.len());
    for (p, seq) in seqs.iter().enumerate() {
        let mut sums = vec![Q::zero(); seq.len() + 1];
        for (coord, v) in tensor.iter() {
            sums[coord[p]] += v;
        }
        let mut ok = true;
        for (i, sum) in sums.iter().enumerate().skip(1) {
            let degree = seq.get(i);
            if *sum > degree {
                ok = false;
                if first_violation.is_none() {
                    let coord = tensor
                        .iter()
                        .find(|(c, _)| c[p] == i)
                        .map(|(c, _)| c.to_vec())
                        .unwrap_or_default();
                    first_violation = Some(Violation {
                        coord,
                        kind: ViolationKind::Marginal {
                            dim: p,
                            sum: sum.clone(),
                            degree,
                        },
                    });
                }
                break;
            }
        }
        marginals_ok.push(ok);
    }

    Ok(ConsistencyVerdict {
        marginals_ok,
        entries_ok,
        first_violation,
    })
}
