//! Staircase algebra and the functional degree sequence bound.
//!
//! All staircases here have integer segment ends, so every function involved
//! is constant on each `(k-1, k]` and can be evaluated at integer ranks.

pub mod staircase;

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::bind::{bind, stair_extents, BoundAtom};
use crate::bound::{BoundValue, Limits, Method};
use crate::cover::{min_cover, min_over_roots};
use crate::degree::MaxMultiplicity;
use crate::error::{Error, Result};
use crate::query::{members, orient_at, QuerySpec};
use crate::rational::{q_usize, Q};
use crate::stats::StatsCatalog;

pub use staircase::{
    compress, pwl_compose, staircase_multiply, PwlCdf, Segment, StaircaseFn, Strategy,
};

/// One non-parent term of an atom: its own staircase and the weight arriving
/// from below on that variable.
pub struct Incoming<'a> {
    pub stair: &'a StaircaseFn,
    pub weight: &'a StaircaseFn,
}

/// `u(k) = a(max(1, ⌈F_p⁻¹(F_1(k-1))⌉))`, zero once `F_1(k-1)` passes the
/// total of `F_p`.
fn factor(f1: &PwlCdf, fp: &PwlCdf, a: &StaircaseFn, k: &Q) -> Q {
    let v = f1.eval(&(k - Q::one()));
    if v > fp.total() {
        return Q::zero();
    }
    let z = fp.inverse_left(&v).expect("within range").ceil();
    a.eval(&z.max(Q::one()))
}

/// Weight staircase of an atom toward its parent variable:
/// `ŵ(k) = f̂_1(k) · Π_p u_p(k)`.
pub fn weight(f1: &StaircaseFn, incoming: &[Incoming<'_>]) -> StaircaseFn {
    let c1 = f1.cdf();
    let end = f1.end();
    let mut dividers: Vec<Q> = f1.segments().iter().map(|s| s.end.clone()).collect();
    let cdfs: Vec<PwlCdf> = incoming.iter().map(|i| i.stair.cdf()).collect();
    for (inc, cp) in incoming.iter().zip(&cdfs) {
        let thresholds = inc
            .weight
            .segments()
            .iter()
            .map(|s| cp.eval(&s.end))
            .chain(std::iter::once(cp.total()));
        for c in thresholds {
            if let Some(y) = c1.sup_at_most(&c) {
                let d = y.floor() + Q::one();
                if d < end {
                    dividers.push(d);
                }
            }
        }
    }
    dividers.sort();
    dividers.dedup();
    let segs = dividers.into_iter().map(|k| {
        let mut level = f1.eval(&k);
        for (inc, cp) in incoming.iter().zip(&cdfs) {
            if level.is_zero() {
                break;
            }
            level *= factor(&c1, cp, inc.weight, &k);
        }
        (k, level)
    });
    let w = StaircaseFn::new(segs.collect()).expect("levels are non-increasing");
    debug_assert!({
        let limit = f1.segment_count()
            + incoming
                .iter()
                .map(|i| i.stair.segment_count() + i.weight.segment_count())
                .sum::<usize>();
        w.segment_count() <= limit.max(1)
    });
    w
}

fn check_multiplicities(atoms: &[BoundAtom], limits: &Limits) -> Result<()> {
    if limits.relax_fdsb_multiplicity {
        return Ok(());
    }
    match atoms.iter().find(|a| !a.b.is_infinite()) {
        Some(a) => Err(Error::UnsupportedForFdsb(a.alias.clone())),
        None => Ok(()),
    }
}

fn rooted_value(q: &QuerySpec, atoms: &[BoundAtom], root: usize) -> Result<Q> {
    let tree = orient_at(q, root)?;
    let ext = stair_extents(atoms);
    let mut w: Vec<Option<StaircaseFn>> = vec![None; atoms.len()];
    for &a in &tree.bottom_up {
        let atom = &atoms[a];
        let mut incoming_weights: Vec<(usize, StaircaseFn)> = Vec::new();
        let mut parent_term = None;
        for (p, var) in atom.vars.iter().enumerate() {
            if tree.parent_var_of(a) == Some(var.as_str()) {
                parent_term = Some(p);
                continue;
            }
            let kids = &tree.children[a][p];
            let weight = if kids.is_empty() {
                let e = &ext[var];
                if e.is_positive() {
                    StaircaseFn::constant(e.clone(), Q::one())?
                } else {
                    StaircaseFn::default()
                }
            } else {
                let ws: Vec<StaircaseFn> = kids
                    .iter()
                    .map(|&c| w[c].clone().expect("children first"))
                    .collect();
                staircase_multiply(&ws)
            };
            incoming_weights.push((p, weight));
        }
        let incoming: Vec<Incoming<'_>> = incoming_weights
            .iter()
            .map(|(p, wt)| Incoming {
                stair: &atom.stairs[*p],
                weight: wt,
            })
            .collect();
        match parent_term {
            Some(p) => w[a] = Some(weight(&atom.stairs[p], &incoming)),
            None => {
                // The root sums over its tuples: a virtual parent with f̂ = 1 on (0, N].
                let n = atom.cardinality.ceil();
                if !n.is_positive() {
                    return Ok(Q::zero());
                }
                let unit = StaircaseFn::constant(n, Q::one())?;
                return Ok(weight(&unit, &incoming).total());
            }
        }
    }
    unreachable!("the root is visited last")
}

fn finish(q: &QuerySpec, atoms: &[BoundAtom], value: Q, root: Option<usize>) -> BoundValue {
    BoundValue {
        value,
        method: Method::Fdsb,
        root: root.map(|r| q.atoms[r].alias.clone()),
        b_effective: atoms
            .iter()
            .map(|a| (a.alias.clone(), MaxMultiplicity::Infinite))
            .collect::<BTreeMap<_, _>>(),
        sources: atoms
            .iter()
            .map(|a| (a.alias.clone(), a.sources.clone()))
            .collect(),
    }
}

/// Functional bound of a tree query evaluated at `root`.
pub fn fdsb_rooted(q: &QuerySpec, cat: &StatsCatalog, root: &str) -> Result<BoundValue> {
    fdsb_rooted_with(q, cat, root, &Limits::default())
}

pub fn fdsb_rooted_with(
    q: &QuerySpec,
    cat: &StatsCatalog,
    root: &str,
    limits: &Limits,
) -> Result<BoundValue> {
    let r = q
        .atom_index(root)
        .ok_or_else(|| Error::UnknownAtom(root.to_string()))?;
    let atoms = bind(q, cat)?;
    check_multiplicities(&atoms, limits)?;
    let v = rooted_value(q, &atoms, r)?;
    Ok(finish(q, &atoms, v, Some(r)))
}

/// Minimum over covers by disjoint connected parts of the product of each
/// part's best rooted functional bound.
pub fn fdsb(q: &QuerySpec, cat: &StatsCatalog) -> Result<BoundValue> {
    fdsb_with(q, cat, &Limits::default())
}

pub fn fdsb_with(q: &QuerySpec, cat: &StatsCatalog, limits: &Limits) -> Result<BoundValue> {
    let atoms = bind(q, cat)?;
    check_multiplicities(&atoms, limits)?;
    let choice = min_cover(q, limits.max_atoms, |set| {
        let sub = q.subquery(set);
        let idx: Vec<usize> = members(set).collect();
        let sub_atoms: Vec<BoundAtom> = idx.iter().map(|&i| atoms[i].clone()).collect();
        min_over_roots(set, |r| {
            let local = idx.iter().position(|&i| i == r).expect("member");
            rooted_value(&sub, &sub_atoms, local)
        })
    })?;
    let root = match choice.parts[..] {
        [(set, root)] if set == q.full_set() => Some(root),
        _ => None,
    };
    Ok(finish(q, &atoms, choice.value, root))
}

/// Integer-rank reference evaluation of the rooted functional bound: every
/// weight is tabulated rank by rank and the root sums tuple by tuple.
pub fn fdsb_rooted_naive(q: &QuerySpec, cat: &StatsCatalog, root: &str) -> Result<Q> {
    let r = q
        .atom_index(root)
        .ok_or_else(|| Error::UnknownAtom(root.to_string()))?;
    let atoms = bind(q, cat)?;
    let tree = orient_at(q, r)?;
    let ext = stair_extents(&atoms);
    let mut w: Vec<Option<Vec<Q>>> = vec![None; atoms.len()];
    let lookup = |v: &[Q], x: &Q| -> Q {
        let i = crate::rational::to_usize(x).expect("integer rank");
        if i == 0 {
            v.first().cloned().unwrap_or_else(Q::zero)
        } else {
            v.get(i - 1).cloned().unwrap_or_else(Q::zero)
        }
    };
    for &a in &tree.bottom_up {
        let atom = &atoms[a];
        let mut parent_term = None;
        let mut factors: Vec<(usize, Vec<Q>)> = Vec::new();
        for (p, var) in atom.vars.iter().enumerate() {
            if tree.parent_var_of(a) == Some(var.as_str()) {
                parent_term = Some(p);
                continue;
            }
            let n = crate::rational::to_usize(&ext[var]).expect("integer extent");
            let kids = &tree.children[a][p];
            let vec: Vec<Q> = (0..n)
                .map(|i| {
                    kids.iter().fold(Q::one(), |acc, &c| {
                        acc * w[c]
                            .as_ref()
                            .unwrap()
                            .get(i)
                            .cloned()
                            .unwrap_or_else(Q::zero)
                    })
                })
                .collect();
            factors.push((p, vec));
        }
        let (f1, count) = match parent_term {
            Some(p) => (
                atom.stairs[p].clone(),
                crate::rational::to_usize(&atom.stairs[p].end()).expect("integer end"),
            ),
            None => {
                let n = crate::rational::to_usize(&atom.cardinality).expect("integer cardinality");
                if n == 0 {
                    return Ok(Q::zero());
                }
                (StaircaseFn::constant(q_usize(n), Q::one())?, n)
            }
        };
        let c1 = f1.cdf();
        let vals: Vec<Q> = (1..=count)
            .map(|k| {
                let v = c1.eval(&q_usize(k - 1));
                let mut level = f1.at_rank(k);
                for (p, vec) in &factors {
                    let cp = atom.stairs[*p].cdf();
                    if v > cp.total() {
                        level = Q::zero();
                        continue;
                    }
                    let z = cp.inverse_left(&v).unwrap().ceil();
                    level *= lookup(vec, &z);
                }
                level
            })
            .collect();
        if parent_term.is_none() {
            return Ok(vals.iter().fold(Q::zero(), |acc, x| acc + x));
        }
        w[a] = Some(vals);
    }
    unreachable!("the root is visited last")
}
