//! AGM bound over integral covers and the polymatroid bound for tree queries.

use num::One;

use crate::bind::{bind, BoundAtom};
use crate::bound::{BoundValue, Limits, Method};
use crate::cover::{min_cover, min_over_roots};
use crate::error::{Error, Result};
use crate::query::{is_cover, members, orient_at, QuerySpec};
use crate::rational::Q;
use crate::stats::StatsCatalog;

fn rooted_product(q: &QuerySpec, atoms: &[BoundAtom], root: usize) -> Result<Q> {
    let tree = orient_at(q, root)?;
    let mut v = atoms[root].cardinality.clone();
    for (i, a) in atoms.iter().enumerate() {
        if let Some(z) = tree.parent_var_of(i) {
            let p = a
                .vars
                .iter()
                .position(|x| x == z)
                .expect("parent variable in atom");
            v *= a.max_degree(p);
        }
    }
    Ok(v)
}

/// `N_root · Π_{R ≠ root} f_1^(R, Z_R)` with `Z_R` the parent variable of `R`.
pub fn pb_rooted(q: &QuerySpec, cat: &StatsCatalog, root: &str) -> Result<BoundValue> {
    let r = q
        .atom_index(root)
        .ok_or_else(|| Error::UnknownAtom(root.to_string()))?;
    let atoms = bind(q, cat)?;
    let mut b = BoundValue::new(Method::Pb, rooted_product(q, &atoms, r)?);
    b.root = Some(root.to_string());
    Ok(b)
}

/// Minimum over covers by disjoint connected parts of the product of each
/// part's best rooted polymatroid bound.
pub fn pb(q: &QuerySpec, cat: &StatsCatalog) -> Result<BoundValue> {
    pb_with(q, cat, &Limits::default())
}

pub fn pb_with(q: &QuerySpec, cat: &StatsCatalog, limits: &Limits) -> Result<BoundValue> {
    let atoms = bind(q, cat)?;
    let choice = min_cover(q, limits.max_atoms, |set| {
        let sub = q.subquery(set);
        let sub_atoms: Vec<BoundAtom> = members(set).map(|i| atoms[i].clone()).collect();
        let idx: Vec<usize> = members(set).collect();
        let part = min_over_roots(set, |r| {
            let local = idx.iter().position(|&i| i == r).expect("member");
            rooted_product(&sub, &sub_atoms, local)
        })?;
        Ok(part)
    })?;
    let mut b = BoundValue::new(Method::Pb, choice.value);
    if let [(set, root)] = choice.parts[..] {
        if set == q.full_set() {
            b.root = Some(q.atoms[root].alias.clone());
        }
    }
    Ok(b)
}

/// Minimum over covering atom sets of the product of their cardinalities.
pub fn agm_acyclic(q: &QuerySpec, cat: &StatsCatalog) -> Result<BoundValue> {
    agm_with(q, cat, &Limits::default())
}

pub fn agm_with(q: &QuerySpec, cat: &StatsCatalog, limits: &Limits) -> Result<BoundValue> {
    let atoms = bind(q, cat)?;
    let m = atoms.len();
    if m > limits.max_atoms {
        return Err(Error::Budget(format!(
            "{m} atoms exceed the cover search limit of {}",
            limits.max_atoms
        )));
    }
    let mut best: Option<Q> = None;
    for s in 1..(1u64 << m) {
        if !is_cover(q, s) {
            continue;
        }
        let v = members(s).fold(Q::one(), |acc, i| acc * &atoms[i].cardinality);
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(BoundValue::new(Method::Agm, best.unwrap_or_else(Q::one)))
}
