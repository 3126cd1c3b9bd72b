//! Brute-force verifiers and test-data generators.

use std::collections::{BTreeMap, HashMap};

use num::bigint::BigInt;
use num::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::degree::{DegreeSequence, MaxMultiplicity};
use crate::error::{Error, Result};
use crate::query::{Atom, QuerySpec, Slot, Term};
use crate::rational::{fmt_q, Q};
use crate::stats::{RelationStats, Table};
use crate::worst_case::{self, DEFAULT_CELL_BUDGET};

pub const DEFAULT_JOIN_BUDGET: u64 = 10_000_000;

/// Bag relation: tuple to multiplicity (always at least 1).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bag {
    pub tuples: BTreeMap<Vec<String>, u64>,
}

impl Bag {
    pub fn add(&mut self, tuple: Vec<String>, mult: u64) {
        if mult > 0 {
            *self.tuples.entry(tuple).or_default() += mult;
        }
    }

    pub fn from_table(t: &Table) -> Self {
        let mut bag = Self::default();
        for row in &t.rows {
            bag.add(row.clone(), 1);
        }
        bag
    }

    /// Rows with repetition, in tuple order.
    pub fn to_table(&self, name: &str, headers: Vec<String>) -> Table {
        Table {
            name: name.to_string(),
            headers,
            rows: self
                .tuples
                .iter()
                .flat_map(|(t, &m)| std::iter::repeat_n(t.clone(), m as usize))
                .collect(),
        }
    }

    pub fn total(&self) -> u64 {
        self.tuples.values().sum()
    }
}

/// Bags keyed by atom alias.
pub type Database = BTreeMap<String, Bag>;

/// Gives every atom the bag of its relation.
pub fn database_for(q: &QuerySpec, relations: &BTreeMap<String, Bag>) -> Result<Database> {
    q.atoms
        .iter()
        .map(|a| {
            relations
                .get(&a.relation)
                .map(|b| (a.alias.clone(), b.clone()))
                .ok_or_else(|| Error::Catalog(format!("no data for relation {}", a.relation)))
        })
        .collect()
}

struct JoinAtom {
    /// (column, variable slot) pairs already bound when this atom is reached.
    bound: Vec<(usize, usize)>,
    /// (column, variable slot) pairs this atom binds.
    fresh: Vec<(usize, usize)>,
    index: HashMap<Vec<String>, Vec<(Vec<String>, u64)>>,
}

/// Bag-semantics output size: the sum over all variable assignments of the
/// product of tuple multiplicities. Wildcard terms are ignored.
pub fn brute_force_join(q: &QuerySpec, db: &Database, budget: u64) -> Result<BigInt> {
    let mut var_slot: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    let mut remaining: Vec<usize> = (0..q.atoms.len()).collect();
    // Greedy order: next atom shares the most already-bound variables.
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .max_by_key(|(_, &i)| {
                let shared = named_terms(&q.atoms[i])
                    .filter(|(_, t)| var_slot.contains_key(t.var.as_str()))
                    .count();
                (shared, std::cmp::Reverse(i))
            })
            .expect("non-empty");
        let i = remaining.remove(pos);
        for (_, t) in named_terms(&q.atoms[i]) {
            let n = var_slot.len();
            var_slot.entry(t.var.as_str()).or_insert(n);
        }
        order.push(i);
    }

    let mut seen: Vec<bool> = vec![false; var_slot.len()];
    let mut plan = Vec::with_capacity(order.len());
    for &i in &order {
        let atom = &q.atoms[i];
        let bag = db
            .get(&atom.alias)
            .ok_or_else(|| Error::Catalog(format!("no data for atom {}", atom.alias)))?;
        let mut bound = Vec::new();
        let mut fresh = Vec::new();
        for (col, t) in named_terms(atom) {
            let s = var_slot[t.var.as_str()];
            if seen[s] {
                bound.push((col, s));
            } else {
                fresh.push((col, s));
            }
        }
        for &(_, s) in &fresh {
            seen[s] = true;
        }
        let mut index: HashMap<Vec<String>, Vec<(Vec<String>, u64)>> = HashMap::new();
        for (tuple, &m) in &bag.tuples {
            if let Some(&(col, _)) = bound.iter().chain(&fresh).find(|(c, _)| *c >= tuple.len()) {
                return Err(Error::Catalog(format!(
                    "atom {} reads column {} but its data has {} columns",
                    atom.alias,
                    col + 1,
                    tuple.len()
                )));
            }
            let key = bound.iter().map(|&(c, _)| tuple[c].clone()).collect();
            index.entry(key).or_default().push((tuple.clone(), m));
        }
        plan.push(JoinAtom {
            bound,
            fresh,
            index,
        });
    }

    let mut assignment = vec![String::new(); var_slot.len()];
    let mut work = 0u64;
    let mut total = BigInt::zero();
    descend(
        &plan,
        0,
        &mut assignment,
        &BigInt::from(1),
        &mut total,
        &mut work,
        budget,
    )?;
    Ok(total)
}

fn named_terms(a: &Atom) -> impl Iterator<Item = (usize, &Term)> {
    a.terms.iter().filter_map(|t| match t.slot {
        Slot::Attr(k) => Some((k, t)),
        Slot::Private => None,
    })
}

fn descend(
    plan: &[JoinAtom],
    depth: usize,
    assignment: &mut [String],
    weight: &BigInt,
    total: &mut BigInt,
    work: &mut u64,
    budget: u64,
) -> Result<()> {
    let Some(step) = plan.get(depth) else {
        *total += weight;
        return Ok(());
    };
    let key: Vec<String> = step
        .bound
        .iter()
        .map(|&(_, s)| assignment[s].clone())
        .collect();
    let Some(matches) = step.index.get(&key) else {
        return Ok(());
    };
    for (tuple, m) in matches {
        *work += 1;
        if *work > budget {
            return Err(Error::Budget(format!(
                "join enumeration exceeded {budget} steps"
            )));
        }
        for &(c, s) in &step.fresh {
            assignment[s] = tuple[c].clone();
        }
        descend(
            plan,
            depth + 1,
            assignment,
            &(weight * BigInt::from(*m)),
            total,
            work,
            budget,
        )?;
    }
    Ok(())
}

/// Exact optimum of the prefix-box LP for the box `m`.
pub fn lp_max_prefix(seqs: &[DegreeSequence], b: &MaxMultiplicity, m: &[usize]) -> Result<Q> {
    worst_case::lp_value(seqs, b, m, DEFAULT_CELL_BUDGET)
}

/// Degree sequences and a multiplicity cap for one relation.
#[derive(Debug, Clone)]
pub struct RelationSpec {
    pub name: String,
    pub seqs: Vec<DegreeSequence>,
    /// `None` for no cap.
    pub b: Option<Q>,
}

impl RelationSpec {
    pub fn from_stats(r: &RelationStats) -> Result<Self> {
        let seqs = r
            .attributes
            .iter()
            .map(|a| {
                a.degrees.clone().ok_or_else(|| Error::MissingFullSequence {
                    relation: r.name.clone(),
                    attribute: a.name.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: r.name.clone(),
            seqs,
            b: r.max_multiplicity.value().cloned(),
        })
    }
}

/// Random bag instance whose per-attribute degrees stay under the given
/// sequences (after sorting) and whose multiplicities stay under `b`.
///
/// Rank `r` of an attribute maps to a value through a random permutation of
/// `1..=len`, so attributes of different relations draw from the same value
/// space and can join.
pub fn generate_consistent_instance(
    rels: &[RelationSpec],
    seed: u64,
) -> Result<BTreeMap<String, Bag>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeMap::new();
    for rel in rels {
        let mut caps: Vec<Vec<u64>> = Vec::with_capacity(rel.seqs.len());
        for s in &rel.seqs {
            if !s.is_integral() {
                return Err(Error::Feasibility(format!(
                    "{} has fractional degrees",
                    rel.name
                )));
            }
            caps.push(
                s.to_vec()
                    .iter()
                    .map(|d| d.to_integer().to_u64().unwrap_or(u64::MAX))
                    .collect(),
            );
        }
        let mass: u64 = caps
            .iter()
            .map(|c| c.iter().sum::<u64>())
            .min()
            .unwrap_or(0);
        let cap_b: Option<u64> = match &rel.b {
            None => None,
            Some(b) => {
                let f = b.floor().to_integer().to_u64().unwrap_or(0);
                if f < 1 && mass > 0 {
                    return Err(Error::Feasibility(format!(
                        "{} needs multiplicity at most {} but has mass",
                        rel.name,
                        fmt_q(b)
                    )));
                }
                Some(f)
            }
        };
        let perms: Vec<Vec<usize>> = caps
            .iter()
            .map(|c| {
                let mut p: Vec<usize> = (1..=c.len()).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let mut live: Vec<Vec<usize>> = caps
            .iter()
            .map(|c| (0..c.len()).filter(|&r| c[r] > 0).collect())
            .collect();
        let mut bag = Bag::default();
        let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
        let mut failures = 0u64;
        let patience = 64 + 4 * mass;
        while !caps.is_empty() && live.iter().all(|l| !l.is_empty()) && failures < patience {
            let picks: Vec<usize> = live.iter().map(|l| rng.gen_range(0..l.len())).collect();
            let ranks: Vec<usize> = picks.iter().zip(&live).map(|(&i, l)| l[i]).collect();
            let used = counts.get(&ranks).copied().unwrap_or(0);
            let mut room = ranks
                .iter()
                .enumerate()
                .map(|(p, &r)| caps[p][r])
                .min()
                .expect("non-empty");
            if let Some(b) = cap_b {
                room = room.min(b.saturating_sub(used));
            }
            if room == 0 {
                failures += 1;
                continue;
            }
            let k = rng.gen_range(1..=room);
            for (p, &r) in ranks.iter().enumerate() {
                caps[p][r] -= k;
                if caps[p][r] == 0 {
                    let pos = picks[p];
                    live[p].swap_remove(pos);
                }
            }
            *counts.entry(ranks.clone()).or_default() += k;
            let tuple = ranks
                .iter()
                .zip(&perms)
                .map(|(&r, perm)| perm[r].to_string())
                .collect();
            bag.add(tuple, k);
        }
        out.insert(rel.name.clone(), bag);
    }
    Ok(out)
}

/// Shape parameters for random tree workloads.
#[derive(Debug, Clone)]
pub struct WorkloadParams {
    pub max_atoms: usize,
    pub max_arity: usize,
    pub max_domain: usize,
    pub max_rows: usize,
    /// Give every atom a variable no other atom uses.
    pub private_vars: bool,
}

impl Default for WorkloadParams {
    fn default() -> Self {
        Self {
            max_atoms: 4,
            max_arity: 3,
            max_domain: 6,
            max_rows: 10,
            private_vars: true,
        }
    }
}

/// Random Berge-acyclic (tree) query. Atom `i` reads relation `R{i}`; each
/// atom after the first shares exactly one variable with earlier atoms.
pub fn random_tree_query(rng: &mut impl Rng, p: &WorkloadParams) -> QuerySpec {
    let m = rng.gen_range(1..=p.max_atoms.max(1));
    let arity_cap = p.max_arity.max(2);
    let mut joinable: Vec<String> = Vec::new();
    let mut next_var = 0usize;
    let fresh = |next: &mut usize| {
        *next += 1;
        format!("V{next}")
    };
    let mut atoms = Vec::with_capacity(m);
    for i in 0..m {
        let mut vars: Vec<String> = Vec::new();
        if i > 0 {
            vars.push(joinable[rng.gen_range(0..joinable.len())].clone());
        }
        if p.private_vars {
            vars.push(fresh(&mut next_var).replace('V', "P"));
        }
        let budget = rng.gen_range(vars.len().max(1)..=arity_cap);
        while vars.len() < budget || vars.is_empty() {
            let v = fresh(&mut next_var);
            joinable.push(v.clone());
            vars.push(v);
        }
        if joinable.is_empty() {
            let v = fresh(&mut next_var);
            joinable.push(v.clone());
            vars.push(v);
        }
        vars.shuffle(rng);
        atoms.push(Atom {
            alias: format!("R{i}"),
            relation: format!("R{i}"),
            terms: vars
                .into_iter()
                .enumerate()
                .map(|(k, var)| Term {
                    var,
                    slot: Slot::Attr(k),
                })
                .collect(),
            reduced: false,
        });
    }
    QuerySpec::new(atoms).expect("generated queries are well formed")
}

/// Random rows for every relation of `q`, values drawn from `1..=domain`.
pub fn random_tables(
    rng: &mut impl Rng,
    q: &QuerySpec,
    p: &WorkloadParams,
) -> BTreeMap<String, Table> {
    let domain = rng.gen_range(1..=p.max_domain.max(1));
    let mut out = BTreeMap::new();
    for a in &q.atoms {
        let rows = rng.gen_range(1..=p.max_rows.max(1));
        let headers: Vec<String> = a.vars().map(str::to_string).collect();
        let data = (0..rows)
            .map(|_| {
                (0..headers.len())
                    .map(|_| rng.gen_range(1..=domain).to_string())
                    .collect()
            })
            .collect();
        out.insert(
            a.relation.clone(),
            Table {
                name: a.relation.clone(),
                headers,
                rows: data,
            },
        );
    }
    out
}
