//! Single entry point that evaluates any bound on any query shape.

use crate::bound::{BoundValue, Limits, Method};
use crate::classic::{agm_with, pb_with};
use crate::dsb::dsb;
use crate::error::{Error, Result};
use crate::fdsb::fdsb_with;
use crate::query::{check_berge_acyclic, spanning_trees, QuerySpec, Shape};
use crate::stats::StatsCatalog;

fn acyclic(
    q: &QuerySpec,
    cat: &StatsCatalog,
    method: Method,
    limits: &Limits,
) -> Result<BoundValue> {
    match method {
        Method::Agm => agm_with(q, cat, limits),
        Method::Pb => pb_with(q, cat, limits),
        Method::Dsb => dsb(q, cat),
        Method::Fdsb => fdsb_with(q, cat, limits),
    }
}

/// Evaluates `method` on `q`. Cyclic queries other than for AGM take the
/// minimum over their spanning-tree relaxations.
pub fn evaluate(
    q: &QuerySpec,
    cat: &StatsCatalog,
    method: Method,
    limits: &Limits,
) -> Result<BoundValue> {
    if method == Method::Agm {
        return agm_with(q, cat, limits);
    }
    match check_berge_acyclic(q) {
        Shape::Tree | Shape::Forest { .. } => acyclic(q, cat, method, limits),
        Shape::Cyclic { .. } => {
            let mut best: Option<BoundValue> = None;
            for t in spanning_trees(q, limits.spanning_tree_budget)? {
                let mut b = acyclic(&t, cat, method, limits)?;
                b.root = None;
                if best.as_ref().is_none_or(|x| b.value < x.value) {
                    best = Some(b);
                }
            }
            best.ok_or(Error::NotCyclic)
        }
    }
}
