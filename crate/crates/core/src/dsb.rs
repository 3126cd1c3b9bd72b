//! Exact degree sequence bound: the query evaluated on worst-case tensors,
//! contracted bottom-up along a rooted incidence tree.

use std::collections::{BTreeMap, HashMap};

use num::{One, Signed, ToPrimitive, Zero};

use crate::bind::{bind, extents, BoundAtom};
use crate::bound::{BoundValue, Limits, Method};
use crate::degree::MaxMultiplicity;
use crate::error::{Error, Result};
use crate::oracle::{Bag, Database};
use crate::query::{
    check_berge_acyclic, connected_components, orient_at, spanning_trees, QuerySpec, Shape, Slot,
};
use crate::rational::Q;
use crate::stats::StatsCatalog;
use crate::tensor::SparseTensor;
use crate::worst_case;

struct Prepared {
    atoms: Vec<BoundAtom>,
    tensors: Vec<SparseTensor>,
    b_effective: BTreeMap<String, MaxMultiplicity>,
    extents: HashMap<String, usize>,
}

fn prepare(q: &QuerySpec, cat: &StatsCatalog) -> Result<Prepared> {
    let atoms = bind(q, cat)?;
    let extents = extents(&atoms)?;
    let mut tensors = Vec::with_capacity(atoms.len());
    let mut b_effective = BTreeMap::new();
    for a in &atoms {
        let seqs = a
            .full_degrees()?
            .iter()
            .zip(&a.vars)
            .map(|(d, v)| d.pad_to(extents[v]))
            .collect::<Result<Vec<_>>>()?;
        let (t, eff) = worst_case::build(&seqs, &a.b)?;
        tensors.push(t.tensor);
        b_effective.insert(a.alias.clone(), eff);
    }
    Ok(Prepared {
        atoms,
        tensors,
        b_effective,
        extents,
    })
}

fn elementwise_product(vectors: &[&Vec<Q>], n: usize) -> Vec<Q> {
    (0..n)
        .map(|i| {
            vectors.iter().fold(Q::one(), |acc, v| {
                acc * v.get(i).cloned().unwrap_or_else(Q::zero)
            })
        })
        .collect()
}

/// Bottom-up contraction of a tree query; the result does not depend on `root`.
fn evaluate(q: &QuerySpec, prep: &Prepared, root: usize) -> Result<Q> {
    let tree = orient_at(q, root)?;
    let mut w: Vec<Option<Vec<Q>>> = vec![None; q.atoms.len()];
    for &a in &tree.bottom_up {
        let atom = &prep.atoms[a];
        let mut child_vectors: Vec<Option<Vec<Q>>> = Vec::with_capacity(atom.vars.len());
        for (p, var) in atom.vars.iter().enumerate() {
            if tree.parent_var_of(a) == Some(var.as_str()) {
                child_vectors.push(None);
                continue;
            }
            let n = prep.extents[var];
            let kids: Vec<&Vec<Q>> = tree.children[a][p]
                .iter()
                .map(|&c| w[c].as_ref().expect("children come first"))
                .collect();
            let v = elementwise_product(&kids, n);
            debug_assert!(v.windows(2).all(|x| x[0] >= x[1]) && v.iter().all(|x| !x.is_negative()));
            child_vectors.push(Some(v));
        }
        if a == root {
            let refs: Vec<&[Q]> = child_vectors
                .iter()
                .map(|v| v.as_deref().expect("root has no parent"))
                .collect();
            return worst_case::contract_all(&prep.tensors[a], &refs);
        }
        let slots: Vec<Option<&[Q]>> = child_vectors.iter().map(|v| v.as_deref()).collect();
        w[a] = Some(worst_case::contract(&prep.tensors[a], &slots)?);
    }
    unreachable!("the root is visited last")
}

fn tree_bound(q: &QuerySpec, cat: &StatsCatalog, root: usize) -> Result<BoundValue> {
    let prep = prepare(q, cat)?;
    let value = evaluate(q, &prep, root)?;
    Ok(BoundValue {
        value,
        method: Method::Dsb,
        root: Some(q.atoms[root].alias.clone()),
        b_effective: prep.b_effective,
        sources: prep
            .atoms
            .iter()
            .map(|a| (a.alias.clone(), a.sources.clone()))
            .collect(),
    })
}

/// Degree sequence bound of a tree or forest query. Forest components are
/// bounded independently and multiplied.
pub fn dsb(q: &QuerySpec, cat: &StatsCatalog) -> Result<BoundValue> {
    match check_berge_acyclic(q) {
        Shape::Tree => {
            let mut b = tree_bound(q, cat, 0)?;
            b.root = None;
            Ok(b)
        }
        Shape::Forest { .. } => {
            let mut out = BoundValue::new(Method::Dsb, Q::one());
            for comp in connected_components(q, q.full_set()) {
                let part = tree_bound(&q.subquery(comp), cat, 0)?;
                out.value *= part.value;
                out.b_effective.extend(part.b_effective);
                out.sources.extend(part.sources);
            }
            Ok(out)
        }
        Shape::Cyclic { .. } => Err(Error::Cyclic),
    }
}

/// Same value as [`dsb`], evaluated with the given root atom.
pub fn dsb_rooted(q: &QuerySpec, cat: &StatsCatalog, root: &str) -> Result<BoundValue> {
    let r = q
        .atom_index(root)
        .ok_or_else(|| Error::UnknownAtom(root.to_string()))?;
    tree_bound(q, cat, r)
}

/// Minimum of [`dsb`] over the spanning-tree relaxations of a cyclic query.
pub fn dsb_cyclic(q: &QuerySpec, cat: &StatsCatalog, limits: &Limits) -> Result<BoundValue> {
    let mut best: Option<BoundValue> = None;
    for t in spanning_trees(q, limits.spanning_tree_budget)? {
        let b = dsb(&t, cat)?;
        if best.as_ref().is_none_or(|x| b.value < x.value) {
            best = Some(b);
        }
    }
    best.ok_or(Error::NotCyclic)
}

/// Worst-case database for a tree query with `B = inf` everywhere: each atom
/// becomes a bag whose tuples are rank coordinates and whose multiplicities
/// are the worst-case tensor entries. Wildcard columns are summed out.
pub fn materialize_worst_case(q: &QuerySpec, cat: &StatsCatalog) -> Result<Database> {
    if check_berge_acyclic(q) != Shape::Tree {
        return Err(Error::NotTree(
            "worst-case instances are built for tree queries".into(),
        ));
    }
    let atoms = bind(q, cat)?;
    if let Some(a) = atoms.iter().find(|a| !a.b.is_infinite()) {
        return Err(Error::UnsupportedMaterialization(a.alias.clone()));
    }
    let prep = prepare(q, cat)?;
    let mut db = Database::new();
    for (i, atom) in q.atoms.iter().enumerate() {
        let mut bag = Bag::default();
        for (coord, v) in prep.tensors[i].iter() {
            if !v.is_integer() {
                return Err(Error::UnsupportedMaterialization(format!(
                    "{} has fractional degrees",
                    atom.alias
                )));
            }
            let mult = v.to_integer().to_u64().ok_or_else(|| {
                Error::UnsupportedMaterialization(format!(
                    "{} has a negative or huge entry",
                    atom.alias
                ))
            })?;
            let mut named: Vec<(usize, String)> = atom
                .terms
                .iter()
                .zip(coord)
                .filter_map(|(t, c)| match t.slot {
                    Slot::Attr(k) => Some((k, c.to_string())),
                    Slot::Private => None,
                })
                .collect();
            named.sort();
            bag.add(named.into_iter().map(|(_, v)| v).collect(), mult);
        }
        db.insert(atom.alias.clone(), bag);
    }
    Ok(db)
}
