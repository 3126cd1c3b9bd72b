//! Value tensors and worst-case tensors.
//!
//! The value tensor `V` assigns to each prefix box the largest mass a tensor
//! consistent with the degree sequences (and max multiplicity) can put there.
//! The worst-case tensor `C` is its iterated discrete derivative.

use std::collections::HashMap;

use num::{Signed, Zero};

use crate::degree::{Cdf, DegreeSequence, MaxMultiplicity};
use crate::error::{Error, Result};
use crate::rational::{q_usize, Q};
use crate::simplex::{self, Constraint};
use crate::tensor::{all_coords, SparseTensor};

pub const DEFAULT_CELL_BUDGET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    GreedyInfiniteB,
    /// Single-attribute relation with finite `B`: `C_i = min(f_i, B)`.
    Capped1D,
    DualFormula2D,
    LpOracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstCaseTensor {
    pub tensor: SparseTensor,
    pub source_seqs: Vec<DegreeSequence>,
    pub b: MaxMultiplicity,
    pub construction: Construction,
}

/// `V_m = min_p F_p(m_p)`.
pub fn value_at_infinite_b(cdfs: &[Cdf], m: &[usize]) -> Result<Q> {
    if cdfs.len() != m.len() {
        return Err(Error::Shape(format!(
            "{} sequences but a {}-dimensional coordinate",
            cdfs.len(),
            m.len()
        )));
    }
    let mut best: Option<Q> = None;
    for (p, (c, &mp)) in cdfs.iter().zip(m).enumerate() {
        if mp > c.n() {
            return Err(Error::Shape(format!(
                "coordinate {mp} beyond extent {} in dimension {p}",
                c.n()
            )));
        }
        let v = c.at(mp);
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    best.ok_or_else(|| Error::Shape("empty coordinate".into()))
}

/// Greedy construction for `B = inf`: repeatedly match the smallest residual
/// degree across all dimensions at the current rank pointers.
pub fn build_greedy_infinite_b(seqs: &[DegreeSequence]) -> Result<WorstCaseTensor> {
    if seqs.is_empty() {
        return Err(Error::Shape("no degree sequences".into()));
    }
    let dims: Vec<usize> = seqs.iter().map(DegreeSequence::len).collect();
    let mut tensor = SparseTensor::new(dims.clone());
    let mut ptr = vec![1usize; seqs.len()];
    let mut residual: Vec<Q> = seqs
        .iter()
        .map(|s| if s.is_empty() { Q::zero() } else { s.get(1) })
        .collect();

    while ptr.iter().zip(&dims).all(|(s, n)| s <= n) {
        let mut argmin = 0;
        for p in 1..seqs.len() {
            if residual[p] < residual[argmin] {
                argmin = p;
            }
        }
        let delta = residual[argmin].clone();
        if !delta.is_zero() {
            tensor.add(&ptr, &delta)?;
            for r in residual.iter_mut() {
                *r -= &delta;
            }
        }
        ptr[argmin] += 1;
        if ptr[argmin] <= dims[argmin] {
            residual[argmin] = seqs[argmin].get(ptr[argmin]);
        }
    }

    Ok(WorstCaseTensor {
        tensor,
        source_seqs: seqs.to_vec(),
        b: MaxMultiplicity::Infinite,
        construction: Construction::GreedyInfiniteB,
    })
}

pub fn build_capped_1d(f: &DegreeSequence, b: &MaxMultiplicity) -> Result<WorstCaseTensor> {
    let Some(bv) = b.value() else {
        return Err(Error::UnsupportedConstruction(
            "use the greedy construction when B is infinite".into(),
        ));
    };
    let mut tensor = SparseTensor::new(vec![f.len()]);
    for i in 1..=f.len() {
        let v = f.get(i);
        tensor.set(&[i], if v < *bv { v } else { bv.clone() })?;
    }
    Ok(WorstCaseTensor {
        tensor,
        source_seqs: vec![f.clone()],
        b: b.clone(),
        construction: Construction::Capped1D,
    })
}

/// Two-dimensional construction for finite `B`.
///
/// `V_{p,q}` is the minimum over `s <= p`, `t <= q` of
/// `F_p - F_s + G_q - G_t + s·t·B`. Splitting on whether `s = p` gives
/// `V_{p,q} = min(V_{p-1,q} + f_p, min_t (G_q - G_t + p·t·B))`, and the inner
/// minimum is attained at `t = #{j <= q : g_j > p·B}` because the increments
/// `p·B - g_t` are non-decreasing in `t`.
pub fn build_finite_b_2d(
    f: &DegreeSequence,
    g: &DegreeSequence,
    b: &MaxMultiplicity,
) -> Result<WorstCaseTensor> {
    let Some(bv) = b.value() else {
        return Err(Error::UnsupportedConstruction(
            "use the greedy construction when B is infinite".into(),
        ));
    };
    let (n1, n2) = (f.len(), g.len());
    let gc = g.cdf();
    let mut tensor = SparseTensor::new(vec![n1, n2]);
    let mut prev = vec![Q::zero(); n2 + 1];
    let mut cur = vec![Q::zero(); n2 + 1];
    for p in 1..=n1 {
        let fp = f.get(p);
        let cap = q_usize(p) * bv;
        let heavy = (1..=n2).take_while(|&j| g.get(j) > cap).count();
        cur[0] = Q::zero();
        for qq in 1..=n2 {
            let t = heavy.min(qq);
            let all_rows = gc.at(qq) - gc.at(t) + q_usize(t) * &cap;
            let without_row = &prev[qq] + &fp;
            cur[qq] = if all_rows < without_row {
                all_rows
            } else {
                without_row
            };
            let c = &cur[qq] - &prev[qq] - &cur[qq - 1] + &prev[qq - 1];
            debug_assert!(!c.is_negative());
            tensor.set(&[p, qq], c)?;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(WorstCaseTensor {
        tensor,
        source_seqs: vec![f.clone(), g.clone()],
        b: b.clone(),
        construction: Construction::DualFormula2D,
    })
}

/// Exact optimum of the prefix-box LP: maximise the mass inside the box `m`
/// subject to the per-rank marginals and entry bound `B`.
pub fn lp_value(
    seqs: &[DegreeSequence],
    b: &MaxMultiplicity,
    m: &[usize],
    cell_budget: usize,
) -> Result<Q> {
    if seqs.len() != m.len() {
        return Err(Error::Shape(format!(
            "{} sequences but a {}-dimensional coordinate",
            seqs.len(),
            m.len()
        )));
    }
    for (p, (s, &mp)) in seqs.iter().zip(m).enumerate() {
        if mp > s.len() {
            return Err(Error::Shape(format!(
                "coordinate {mp} beyond extent {} in dimension {p}",
                s.len()
            )));
        }
    }
    let cells = all_coords(m);
    if cells.is_empty() {
        return Ok(Q::zero());
    }
    if cells.len() > cell_budget {
        return Err(Error::Budget(format!(
            "prefix box has {} cells, budget is {cell_budget}",
            cells.len()
        )));
    }
    let one = Q::from_integer(1.into());
    let mut constraints = Vec::new();
    for (p, s) in seqs.iter().enumerate() {
        for i in 1..=m[p] {
            let coeffs = cells
                .iter()
                .map(|c| if c[p] == i { one.clone() } else { Q::zero() })
                .collect();
            constraints.push(Constraint {
                coeffs,
                rhs: s.get(i),
            });
        }
    }
    if let Some(bv) = b.value() {
        for k in 0..cells.len() {
            let coeffs = (0..cells.len())
                .map(|j| if j == k { one.clone() } else { Q::zero() })
                .collect();
            constraints.push(Constraint {
                coeffs,
                rhs: bv.clone(),
            });
        }
    }
    let objective = vec![one; cells.len()];
    simplex::maximize(&objective, &constraints)
        .map(|s| s.value)
        .map_err(|e| Error::Shape(format!("prefix LP failed: {e:?}")))
}

/// `C = Δ_1 ⋯ Δ_d V` from a value tensor given on every coordinate of the box
/// (missing coordinates, i.e. any zero component, read as zero).
pub fn derivative_of_values(
    dims: &[usize],
    values: &HashMap<Vec<usize>, Q>,
) -> Result<SparseTensor> {
    let d = dims.len();
    let mut tensor = SparseTensor::new(dims.to_vec());
    for s in all_coords(dims) {
        let mut c = Q::zero();
        for mask in 0u32..(1 << d) {
            let shifted: Vec<usize> = s
                .iter()
                .enumerate()
                .map(|(p, &x)| if mask >> p & 1 == 1 { x - 1 } else { x })
                .collect();
            let Some(v) = values.get(&shifted) else {
                continue;
            };
            if mask.count_ones() % 2 == 0 {
                c += v;
            } else {
                c -= v;
            }
        }
        tensor.set(&s, c)?;
    }
    Ok(tensor)
}

/// Worst-case tensor obtained by solving the primal LP for every prefix box.
pub fn build_lp_oracle(
    seqs: &[DegreeSequence],
    b: &MaxMultiplicity,
    cell_budget: usize,
) -> Result<WorstCaseTensor> {
    if seqs.is_empty() {
        return Err(Error::Shape("no degree sequences".into()));
    }
    let dims: Vec<usize> = seqs.iter().map(DegreeSequence::len).collect();
    let cells: usize = dims.iter().product();
    if cells > cell_budget {
        return Err(Error::Budget(format!(
            "tensor has {cells} cells, budget is {cell_budget}"
        )));
    }
    let mut values = HashMap::new();
    for m in all_coords(&dims) {
        let v = lp_value(seqs, b, &m, cell_budget)?;
        values.insert(m, v);
    }
    Ok(WorstCaseTensor {
        tensor: derivative_of_values(&dims, &values)?,
        source_seqs: seqs.to_vec(),
        b: b.clone(),
        construction: Construction::LpOracle,
    })
}

/// Production dispatcher. Returns the tensor and the multiplicity bound it
/// actually honours: three or more attributes with finite `B` fall back to
/// `B = inf`.
pub fn build(
    seqs: &[DegreeSequence],
    b: &MaxMultiplicity,
) -> Result<(WorstCaseTensor, MaxMultiplicity)> {
    match (b, seqs.len()) {
        (MaxMultiplicity::Infinite, _) => {
            Ok((build_greedy_infinite_b(seqs)?, MaxMultiplicity::Infinite))
        }
        (_, 1) => Ok((build_capped_1d(&seqs[0], b)?, b.clone())),
        (_, 2) => Ok((build_finite_b_2d(&seqs[0], &seqs[1], b)?, b.clone())),
        _ => Ok((build_greedy_infinite_b(seqs)?, MaxMultiplicity::Infinite)),
    }
}

fn check_vector(dim: usize, v: &[Q], extent: usize) -> Result<()> {
    if v.len() != extent {
        return Err(Error::Shape(format!(
            "vector for dimension {dim} has length {}, extent is {extent}",
            v.len()
        )));
    }
    if v.iter().any(Signed::is_negative) || v.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Sort { dim });
    }
    Ok(())
}

/// Contracts every dimension except the one whose slot is `None`.
pub fn contract(t: &SparseTensor, vectors: &[Option<&[Q]>]) -> Result<Vec<Q>> {
    if vectors.len() != t.arity() {
        return Err(Error::Shape(format!(
            "{} vector slots for a {}-dimensional tensor",
            vectors.len(),
            t.arity()
        )));
    }
    let open: Vec<usize> = (0..vectors.len())
        .filter(|&p| vectors[p].is_none())
        .collect();
    let [target] = open[..] else {
        return Err(Error::Shape(format!(
            "exactly one dimension must stay open, found {}",
            open.len()
        )));
    };
    for (p, v) in vectors.iter().enumerate() {
        if let Some(v) = v {
            check_vector(p, v, t.dims()[p])?;
        }
    }
    let mut out = vec![Q::zero(); t.dims()[target]];
    for (coord, value) in t.iter() {
        let mut term = value.clone();
        for (p, v) in vectors.iter().enumerate() {
            if let Some(v) = v {
                term *= &v[coord[p] - 1];
            }
        }
        out[coord[target] - 1] += term;
    }
    Ok(out)
}

/// Contracts every dimension to a scalar.
pub fn contract_all(t: &SparseTensor, vectors: &[&[Q]]) -> Result<Q> {
    if vectors.len() != t.arity() {
        return Err(Error::Shape(format!(
            "{} vectors for a {}-dimensional tensor",
            vectors.len(),
            t.arity()
        )));
    }
    for (p, v) in vectors.iter().enumerate() {
        check_vector(p, v, t.dims()[p])?;
    }
    let mut total = Q::zero();
    for (coord, value) in t.iter() {
        let mut term = value.clone();
        for (p, v) in vectors.iter().enumerate() {
            term *= &v[coord[p] - 1];
        }
        total += term;
    }
    Ok(total)
}
