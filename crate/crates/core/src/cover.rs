//! Subset dynamic program over atom sets: the cheapest cover of a query by
//! disjoint connected parts, each priced by a rooted evaluator.

use num::Zero;

use crate::error::{Error, Result};
use crate::query::{connected_components, is_cover, members, AtomSet, QuerySpec};
use crate::rational::Q;

/// Price of one connected part and the root that achieves it.
pub struct PartCost {
    pub value: Q,
    pub root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverChoice {
    pub value: Q,
    /// Parts of the winning cover with their roots (atom indices of the full query).
    pub parts: Vec<(AtomSet, usize)>,
}

#[derive(Clone)]
enum Step {
    Leaf(usize),
    Split(AtomSet),
}

/// Minimises `Π_i cost(Q_i)` over covers `{Q_1, …}` made of disjoint connected
/// atom sets. `cost(S)` is called once per connected subset `S`.
pub fn min_cover(
    q: &QuerySpec,
    max_atoms: usize,
    mut cost: impl FnMut(AtomSet) -> Result<PartCost>,
) -> Result<CoverChoice> {
    let m = q.atoms.len();
    if m > max_atoms {
        return Err(Error::Budget(format!(
            "{m} atoms exceed the cover search limit of {max_atoms}"
        )));
    }
    let size = 1usize << m;
    let mut best: Vec<Option<(Q, Step)>> = vec![None; size];
    for s in 1..size as AtomSet {
        let mut cand: Option<(Q, Step)> = None;
        if connected_components(q, s).len() == 1 {
            let c = cost(s)?;
            cand = Some((c.value, Step::Leaf(c.root)));
        }
        // Binary splits; the part holding the lowest atom is enumerated once.
        let low = s & s.wrapping_neg();
        let rest = s & !low;
        let mut sub = rest;
        loop {
            let s1 = sub | low;
            if s1 != s {
                let s2 = s & !s1;
                if let (Some((a, _)), Some((b, _))) = (&best[s1 as usize], &best[s2 as usize]) {
                    let v = a * b;
                    if cand.as_ref().is_none_or(|(c, _)| v < *c) {
                        cand = Some((v, Step::Split(s1)));
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[s as usize] = cand;
    }

    let mut answer: Option<(Q, AtomSet)> = None;
    for s in 1..size as AtomSet {
        if !is_cover(q, s) {
            continue;
        }
        let v = &best[s as usize]
            .as_ref()
            .expect("every non-empty set has a price")
            .0;
        if answer.as_ref().is_none_or(|(a, _)| v < a) {
            answer = Some((v.clone(), s));
        }
    }
    let Some((value, s)) = answer else {
        return Ok(CoverChoice {
            value: Q::zero(),
            parts: Vec::new(),
        });
    };
    let mut parts = Vec::new();
    let mut stack = vec![s];
    while let Some(s) = stack.pop() {
        match &best[s as usize].as_ref().expect("priced").1 {
            Step::Leaf(root) => parts.push((s, *root)),
            Step::Split(s1) => {
                stack.push(*s1);
                stack.push(s & !s1);
            }
        }
    }
    parts.sort();
    Ok(CoverChoice { value, parts })
}

/// Minimum of `cost` over every root of a connected part.
pub fn min_over_roots(
    set: AtomSet,
    mut rooted: impl FnMut(usize) -> Result<Q>,
) -> Result<PartCost> {
    let mut best: Option<PartCost> = None;
    for r in members(set) {
        let v = rooted(r)?;
        if best.as_ref().is_none_or(|b| v < b.value) {
            best = Some(PartCost { value: v, root: r });
        }
    }
    best.ok_or_else(|| Error::Shape("empty part".into()))
}
