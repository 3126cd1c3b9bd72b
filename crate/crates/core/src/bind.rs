//! Binds query atoms to catalog statistics.

use std::collections::HashMap;

use num::Zero;

use crate::degree::{DegreeSequence, MaxMultiplicity};
use crate::error::{Error, Result};
use crate::fdsb::StaircaseFn;
use crate::query::{QuerySpec, Slot};
use crate::rational::{fmt_q, to_usize, Q};
use crate::stats::StatsCatalog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatsSource {
    /// Full degree sequence.
    Degrees,
    /// Staircase read from the catalog.
    Staircase,
    /// Wildcard: all-distinct values.
    Wildcard,
}

/// An atom with the statistics of each of its terms, in term order.
#[derive(Debug, Clone)]
pub struct BoundAtom {
    pub alias: String,
    pub relation: String,
    pub vars: Vec<String>,
    pub cardinality: Q,
    /// Max multiplicity that may be assumed; infinite for reduced atoms.
    pub b: MaxMultiplicity,
    pub degrees: Vec<Option<DegreeSequence>>,
    pub stairs: Vec<StaircaseFn>,
    pub sources: Vec<StatsSource>,
}

impl BoundAtom {
    /// Largest degree of term `p`.
    pub fn max_degree(&self, p: usize) -> Q {
        match &self.degrees[p] {
            Some(d) => d.first(),
            None => self.stairs[p].first_level(),
        }
    }

    pub fn full_degrees(&self) -> Result<Vec<DegreeSequence>> {
        self.degrees
            .iter()
            .enumerate()
            .map(|(p, d)| {
                d.clone().ok_or_else(|| Error::MissingFullSequence {
                    relation: self.relation.clone(),
                    attribute: self.vars[p].clone(),
                })
            })
            .collect()
    }
}

pub fn bind(q: &QuerySpec, cat: &StatsCatalog) -> Result<Vec<BoundAtom>> {
    q.atoms
        .iter()
        .map(|atom| {
            let rel = cat.get(&atom.relation).ok_or_else(|| {
                Error::Catalog(format!("relation {} is not in the catalog", atom.relation))
            })?;
            let named = atom
                .terms
                .iter()
                .filter(|t| t.slot != Slot::Private)
                .count();
            if !atom.reduced && named != rel.attributes.len() {
                return Err(Error::Catalog(format!(
                    "atom {} names {named} attributes but relation {} has {}",
                    atom.alias,
                    rel.name,
                    rel.attributes.len()
                )));
            }
            let n = to_usize(&rel.cardinality).ok_or_else(|| {
                Error::Catalog(format!(
                    "relation {} has non-integral cardinality {}",
                    rel.name,
                    fmt_q(&rel.cardinality)
                ))
            })?;
            let mut out = BoundAtom {
                alias: atom.alias.clone(),
                relation: atom.relation.clone(),
                vars: atom.vars().map(str::to_string).collect(),
                cardinality: rel.cardinality.clone(),
                b: if atom.reduced {
                    MaxMultiplicity::Infinite
                } else {
                    rel.max_multiplicity.clone()
                },
                degrees: Vec::with_capacity(atom.terms.len()),
                stairs: Vec::with_capacity(atom.terms.len()),
                sources: Vec::with_capacity(atom.terms.len()),
            };
            for t in &atom.terms {
                match t.slot {
                    Slot::Private => {
                        out.degrees.push(Some(DegreeSequence::ones(n)));
                        out.stairs.push(if n == 0 {
                            StaircaseFn::default()
                        } else {
                            StaircaseFn::constant(
                                rel.cardinality.clone(),
                                Q::from_integer(1.into()),
                            )?
                        });
                        out.sources.push(StatsSource::Wildcard);
                    }
                    Slot::Attr(k) => {
                        let a = rel.attributes.get(k).ok_or_else(|| {
                            Error::Catalog(format!(
                                "atom {} uses attribute #{} of {} which has only {}",
                                atom.alias,
                                k + 1,
                                rel.name,
                                rel.attributes.len()
                            ))
                        })?;
                        out.degrees.push(a.degrees.clone());
                        match (&a.staircase, &a.degrees) {
                            (Some(s), _) => {
                                out.stairs.push(s.clone());
                                out.sources.push(StatsSource::Staircase);
                            }
                            (None, Some(d)) => {
                                out.stairs.push(StaircaseFn::from_degrees(d));
                                out.sources.push(StatsSource::Degrees);
                            }
                            (None, None) => unreachable!("validated catalog"),
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect()
}

/// Common extent of every variable: the longest full sequence over its atoms.
pub fn extents(atoms: &[BoundAtom]) -> Result<HashMap<String, usize>> {
    let mut out: HashMap<String, usize> = HashMap::new();
    for a in atoms {
        for (p, v) in a.vars.iter().enumerate() {
            let d = a.degrees[p]
                .as_ref()
                .ok_or_else(|| Error::MissingFullSequence {
                    relation: a.relation.clone(),
                    attribute: v.clone(),
                })?;
            let e = out.entry(v.clone()).or_default();
            *e = (*e).max(d.len());
        }
    }
    Ok(out)
}

/// Common staircase extent of every variable.
pub fn stair_extents(atoms: &[BoundAtom]) -> HashMap<String, Q> {
    let mut out: HashMap<String, Q> = HashMap::new();
    for a in atoms {
        for (p, v) in a.vars.iter().enumerate() {
            let e = out.entry(v.clone()).or_insert_with(Q::zero);
            let end = a.stairs[p].end();
            if end > *e {
                *e = end;
            }
        }
    }
    out
}
