//! Bound values and evaluation limits shared by every method.

use std::collections::BTreeMap;
use std::fmt;

use crate::bind::StatsSource;
use crate::degree::MaxMultiplicity;
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Agm,
    Pb,
    Dsb,
    Fdsb,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Agm, Method::Pb, Method::Dsb, Method::Fdsb];

    pub fn name(self) -> &'static str {
        match self {
            Method::Agm => "agm",
            Method::Pb => "pb",
            Method::Dsb => "dsb",
            Method::Fdsb => "fdsb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValue {
    pub value: Q,
    pub method: Method,
    /// Root atom when the value comes from a single rooted evaluation.
    pub root: Option<String>,
    /// Max multiplicity each atom's construction honoured.
    pub b_effective: BTreeMap<String, MaxMultiplicity>,
    /// Kind of statistics each atom contributed.
    pub sources: BTreeMap<String, Vec<StatsSource>>,
}

impl BoundValue {
    pub fn new(method: Method, value: Q) -> Self {
        Self {
            value,
            method,
            root: None,
            b_effective: BTreeMap::new(),
            sources: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest atom count for the cover dynamic program.
    pub max_atoms: usize,
    pub spanning_tree_budget: usize,
    /// Treat finite max multiplicities as infinite in the functional bound.
    pub relax_fdsb_multiplicity: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_atoms: 16,
            spanning_tree_budget: crate::query::DEFAULT_SPANNING_TREE_BUDGET,
            relax_fdsb_multiplicity: false,
        }
    }
}
