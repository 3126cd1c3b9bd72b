//! Conjunctive queries, their incidence graphs, rooted orientations and covers.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Atom subsets are bitmasks over atom indices.
pub type AtomSet = u64;

pub const MAX_ATOMS: usize = 64;

/// Where a term's values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Position among the relation's catalog attributes.
    Attr(usize),
    /// A `_` wildcard: a fresh variable with all-distinct values.
    Private,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub var: String,
    pub slot: Slot,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub alias: String,
    pub relation: String,
    pub terms: Vec<Term>,
    /// Set when variable occurrences were dropped to break cycles.
    pub reduced: bool,
}

impl Atom {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|t| t.var.as_str())
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.var == var)
    }

    pub fn has_var(&self, var: &str) -> bool {
        self.position(var).is_some()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alias != self.relation {
            write!(f, "{}:", self.alias)?;
        }
        let vars: Vec<&str> = self
            .terms
            .iter()
            .map(|t| {
                if t.slot == Slot::Private {
                    "_"
                } else {
                    t.var.as_str()
                }
            })
            .collect();
        write!(f, "{}({})", self.relation, vars.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuerySpec {
    pub atoms: Vec<Atom>,
}

impl fmt::Display for QuerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        write!(f, "Q = {}", atoms.join(", "))
    }
}

impl QuerySpec {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: "a query needs at least one atom".into(),
            });
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::Budget(format!(
                "{} atoms, at most {MAX_ATOMS} are supported",
                atoms.len()
            )));
        }
        let mut aliases = BTreeSet::new();
        for a in &atoms {
            if !aliases.insert(a.alias.clone()) {
                return Err(Error::DuplicateAlias(a.alias.clone()));
            }
            let mut seen = BTreeSet::new();
            for t in &a.terms {
                if !seen.insert(t.var.as_str()) {
                    return Err(Error::DuplicateVariableInAtom {
                        atom: a.alias.clone(),
                        var: t.var.clone(),
                    });
                }
            }
            if a.terms.is_empty() {
                return Err(Error::Shape(format!("atom {} has no variables", a.alias)));
            }
        }
        Ok(Self { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn full_set(&self) -> AtomSet {
        if self.atoms.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms.len()) - 1
        }
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.atoms.iter().flat_map(Atom::vars) {
            if seen.insert(v) {
                out.push(v.to_string());
            }
        }
        out
    }

    pub fn atom_index(&self, alias: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.alias == alias)
    }

    /// Indices of atoms containing `var`.
    pub fn atoms_with(&self, var: &str) -> Vec<usize> {
        (0..self.atoms.len())
            .filter(|&i| self.atoms[i].has_var(var))
            .collect()
    }

    /// Whether atom `i` has a variable that no other atom uses.
    pub fn has_private_variable(&self, i: usize) -> bool {
        self.atoms[i].vars().any(|v| self.atoms_with(v).len() == 1)
    }

    pub fn all_atoms_have_private_variables(&self) -> bool {
        (0..self.atoms.len()).all(|i| self.has_private_variable(i))
    }

    /// The query restricted to the atoms in `set`, in their original order.
    pub fn subquery(&self, set: AtomSet) -> QuerySpec {
        QuerySpec {
            atoms: members(set)
                .filter(|&i| i < self.atoms.len())
                .map(|i| self.atoms[i].clone())
                .collect(),
        }
    }
}

pub fn members(set: AtomSet) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| set >> i & 1 == 1)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Parser {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: self.line,
            column: self.col,
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Option<char> {
        let c = *self.chars.get(self.pos)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.get(self.pos) {
            if c == '#' {
                while self.chars.get(self.pos).is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => self.err(format!("expected '{want}', found '{c}'")),
            None => self.err(format!("expected '{want}', found end of input")),
        }
    }

    /// An identifier, or `_` for a wildcard (returned as `None`).
    fn ident_or_wildcard(&mut self) -> Result<Option<String>> {
        match self.peek() {
            Some('_') => {
                self.bump();
                if self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    return self.err("identifiers must start with a letter");
                }
                Ok(None)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&c) = self.chars.get(self.pos) {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Ok(Some(s))
            }
            Some(c) => self.err(format!("expected an identifier, found '{c}'")),
            None => self.err("expected an identifier, found end of input"),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.ident_or_wildcard()? {
            Some(s) => Ok(s),
            None => self.err("'_' is only allowed as a variable"),
        }
    }
}

/// Parses `Q = alias:Rel(X,Y), Rel2(Y,_), ...`. The `Q =` head and the
/// `alias:` prefixes are optional; `#` starts a line comment.
pub fn parse_query(text: &str) -> Result<QuerySpec> {
    let mut p = Parser::new(text);
    let mut atoms = Vec::new();
    let mut wildcards = 0usize;

    // Optional head: an identifier followed by '='.
    let save = (p.pos, p.line, p.col);
    if p.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
        p.ident()?;
        if p.peek() == Some('=') {
            p.bump();
        } else {
            (p.pos, p.line, p.col) = save;
        }
    }

    loop {
        let (line, column) = {
            p.skip_ws();
            (p.line, p.col)
        };
        let first = p.ident()?;
        let (alias, relation) = if p.peek() == Some(':') {
            p.bump();
            (first, p.ident()?)
        } else {
            (first.clone(), first)
        };
        p.expect('(')?;
        let mut terms = Vec::new();
        let mut named = 0usize;
        loop {
            match p.ident_or_wildcard()? {
                Some(var) => {
                    if terms.iter().any(|t: &Term| t.var == var) {
                        return Err(Error::DuplicateVariableInAtom { atom: alias, var });
                    }
                    terms.push(Term {
                        var,
                        slot: Slot::Attr(named),
                    });
                    named += 1;
                }
                None => {
                    wildcards += 1;
                    terms.push(Term {
                        var: format!("_{wildcards}"),
                        slot: Slot::Private,
                    });
                }
            }
            match p.peek() {
                Some(',') => {
                    p.bump();
                }
                Some(')') => {
                    p.bump();
                    break;
                }
                Some(c) => return p.err(format!("expected ',' or ')', found '{c}'")),
                None => return p.err("unterminated atom"),
            }
        }
        if atoms.iter().any(|a: &Atom| a.alias == alias) {
            return Err(Error::Syntax {
                line,
                column,
                message: format!("alias {alias} is used by more than one atom"),
            });
        }
        atoms.push(Atom {
            alias,
            relation,
            terms,
            reduced: false,
        });
        match p.peek() {
            Some(',') => {
                p.bump();
            }
            Some('.') | Some(';') => {
                p.bump();
                if let Some(c) = p.peek() {
                    return p.err(format!("unexpected '{c}' after the end of the query"));
                }
                break;
            }
            None => break,
            Some(c) => return p.err(format!("expected ',' between atoms, found '{c}'")),
        }
    }
    QuerySpec::new(atoms)
}

/// Shape of the incidence graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Tree,
    Forest {
        components: usize,
    },
    /// Alternating atom/variable names, starting and ending at the same atom.
    Cyclic {
        witness: Vec<String>,
    },
}

/// Bipartite incidence graph: nodes `0..m` are atoms, `m..` are variables.
struct Incidence {
    names: Vec<String>,
    edges: Vec<(usize, usize)>,
    atoms: usize,
}

impl Incidence {
    fn new(q: &QuerySpec) -> Self {
        let vars = q.variables();
        let index: HashMap<&str, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let m = q.atoms.len();
        let mut edges = Vec::new();
        for (i, a) in q.atoms.iter().enumerate() {
            for v in a.vars() {
                edges.push((i, m + index[v]));
            }
        }
        let names = q
            .atoms
            .iter()
            .map(|a| a.alias.clone())
            .chain(vars)
            .collect();
        Self {
            names,
            edges,
            atoms: m,
        }
    }

    fn nodes(&self) -> usize {
        self.names.len()
    }

    fn components(&self, skip: &[bool]) -> usize {
        let mut uf = UnionFind::new(self.nodes());
        let mut comps = self.nodes();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if !skip[k] && uf.union(a, b) {
                comps -= 1;
            }
        }
        comps
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

pub fn check_berge_acyclic(q: &QuerySpec) -> Shape {
    let g = Incidence::new(q);
    let mut uf = UnionFind::new(g.nodes());
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.nodes()];
    let mut comps = g.nodes();
    for &(a, b) in &g.edges {
        if !uf.union(a, b) {
            // Path from the variable back to the atom inside the forest so far.
            let mut prev = vec![usize::MAX; g.nodes()];
            let mut queue = VecDeque::from([b]);
            prev[b] = b;
            while let Some(x) = queue.pop_front() {
                if x == a {
                    break;
                }
                for &y in &adj[x] {
                    if prev[y] == usize::MAX {
                        prev[y] = x;
                        queue.push_back(y);
                    }
                }
            }
            let mut path = vec![a];
            let mut cur = a;
            while cur != b {
                cur = prev[cur];
                path.push(cur);
            }
            path.push(a);
            return Shape::Cyclic {
                witness: path.into_iter().map(|n| g.names[n].clone()).collect(),
            };
        }
        comps -= 1;
        adj[a].push(b);
        adj[b].push(a);
    }
    if comps == 1 {
        Shape::Tree
    } else {
        Shape::Forest { components: comps }
    }
}

/// Whether `witness` is a Berge cycle of `q`: it alternates between distinct
/// atoms and distinct variables, each consecutive pair is incident, it has at
/// least two atoms, and it returns to its first atom.
pub fn is_berge_cycle(q: &QuerySpec, witness: &[String]) -> bool {
    if witness.len() < 5 || witness.len().is_multiple_of(2) || witness.first() != witness.last() {
        return false;
    }
    let body = &witness[..witness.len() - 1];
    let atoms: Vec<&String> = body.iter().step_by(2).collect();
    let vars: Vec<&String> = body.iter().skip(1).step_by(2).collect();
    let distinct = |xs: &[&String]| xs.iter().collect::<BTreeSet<_>>().len() == xs.len();
    if !distinct(&atoms) || !distinct(&vars) {
        return false;
    }
    for w in witness.windows(2) {
        let (atom, var) = if q.atom_index(&w[0]).is_some() && q.atom_index(&w[1]).is_none() {
            (&w[0], &w[1])
        } else {
            (&w[1], &w[0])
        };
        match q.atom_index(atom) {
            Some(i) if q.atoms[i].has_var(var) && q.atom_index(var).is_none() => {}
            _ => return false,
        }
    }
    true
}

/// A tree query oriented away from a root atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceTree {
    pub root: usize,
    /// Per atom, the variable linking it toward the root (`None` for the root).
    pub parent_var: Vec<Option<String>>,
    /// Per atom, per term position, the atoms hanging below that variable.
    pub children: Vec<Vec<Vec<usize>>>,
    /// Atoms in bottom-up order: every atom comes after all its descendants.
    pub bottom_up: Vec<usize>,
}

impl IncidenceTree {
    pub fn parent_var_of(&self, i: usize) -> Option<&str> {
        self.parent_var[i].as_deref()
    }
}

pub fn orient(q: &QuerySpec, root: &str) -> Result<IncidenceTree> {
    let r = q
        .atom_index(root)
        .ok_or_else(|| Error::UnknownAtom(root.to_string()))?;
    orient_at(q, r)
}

pub fn orient_at(q: &QuerySpec, root: usize) -> Result<IncidenceTree> {
    if root >= q.atoms.len() {
        return Err(Error::UnknownAtom(format!("#{root}")));
    }
    match check_berge_acyclic(q) {
        Shape::Tree => {}
        Shape::Forest { components } => {
            return Err(Error::NotTree(format!("{components} connected components")));
        }
        Shape::Cyclic { witness } => {
            return Err(Error::NotTree(format!("cycle {}", witness.join(" - "))));
        }
    }
    let m = q.atoms.len();
    let mut parent_var = vec![None; m];
    let mut children = vec![Vec::new(); m];
    let mut bottom_up = Vec::with_capacity(m);
    visit(
        q,
        root,
        None,
        &mut parent_var,
        &mut children,
        &mut bottom_up,
    );
    Ok(IncidenceTree {
        root,
        parent_var,
        children,
        bottom_up,
    })
}

fn visit(
    q: &QuerySpec,
    atom: usize,
    via: Option<&str>,
    parent_var: &mut [Option<String>],
    children: &mut [Vec<Vec<usize>>],
    order: &mut Vec<usize>,
) {
    parent_var[atom] = via.map(str::to_string);
    let mut per_term = Vec::with_capacity(q.atoms[atom].terms.len());
    for t in &q.atoms[atom].terms {
        if Some(t.var.as_str()) == via {
            per_term.push(Vec::new());
            continue;
        }
        let mut kids: Vec<usize> = q
            .atoms_with(&t.var)
            .into_iter()
            .filter(|&k| k != atom)
            .collect();
        kids.sort_by(|&a, &b| q.atoms[a].alias.cmp(&q.atoms[b].alias));
        per_term.push(kids);
    }
    let mut pending: Vec<(usize, String)> = Vec::new();
    for (t, kids) in q.atoms[atom].terms.iter().zip(&per_term) {
        for &k in kids {
            pending.push((k, t.var.clone()));
        }
    }
    pending.sort_by(|a, b| q.atoms[a.0].alias.cmp(&q.atoms[b.0].alias));
    children[atom] = per_term;
    for (k, var) in pending {
        visit(q, k, Some(&var), parent_var, children, order);
    }
    order.push(atom);
}

/// Maximal connected pieces of the incidence graph induced by `subset`.
pub fn connected_components(q: &QuerySpec, subset: AtomSet) -> Vec<AtomSet> {
    let mut remaining = subset & q.full_set();
    let mut out = Vec::new();
    while remaining != 0 {
        let start = remaining.trailing_zeros() as usize;
        let mut comp: AtomSet = 1 << start;
        let mut frontier = vec![start];
        while let Some(a) = frontier.pop() {
            for v in q.atoms[a].vars() {
                for b in q.atoms_with(v) {
                    if remaining >> b & 1 == 1 && comp >> b & 1 == 0 {
                        comp |= 1 << b;
                        frontier.push(b);
                    }
                }
            }
        }
        remaining &= !comp;
        out.push(comp);
    }
    out
}

pub fn is_connected(q: &QuerySpec, subset: AtomSet) -> bool {
    connected_components(q, subset).len() == 1
}

/// Every variable of `q` occurs in some atom of `subset`.
pub fn is_cover(q: &QuerySpec, subset: AtomSet) -> bool {
    let covered: BTreeSet<&str> = members(subset)
        .filter(|&i| i < q.atoms.len())
        .flat_map(|i| q.atoms[i].vars())
        .collect();
    q.atoms
        .iter()
        .flat_map(Atom::vars)
        .all(|v| covered.contains(v))
}

pub const DEFAULT_SPANNING_TREE_BUDGET: usize = 100_000;

/// Acyclic relaxations of a cyclic query, obtained by dropping variable
/// occurrences until the incidence graph is a spanning forest with the same
/// connected components. Atoms that lose an occurrence are marked `reduced`.
pub fn spanning_trees(q: &QuerySpec, budget: usize) -> Result<Vec<QuerySpec>> {
    if !matches!(check_berge_acyclic(q), Shape::Cyclic { .. }) {
        return Err(Error::NotCyclic);
    }
    let g = Incidence::new(q);
    let none = vec![false; g.edges.len()];
    let comps = g.components(&none);
    let drop = g.edges.len() + comps - g.nodes();

    // Edge index -> (atom, term position).
    let mut locate = Vec::with_capacity(g.edges.len());
    for (i, a) in q.atoms.iter().enumerate() {
        for k in 0..a.terms.len() {
            locate.push((i, k));
        }
    }

    let mut out = Vec::new();
    let mut examined = 0usize;
    let mut combo: Vec<usize> = (0..drop).collect();
    loop {
        examined += 1;
        if examined > budget {
            return Err(Error::Budget(format!(
                "more than {budget} edge subsets examined while enumerating spanning trees"
            )));
        }
        let mut skip = vec![false; g.edges.len()];
        for &e in &combo {
            skip[e] = true;
        }
        if g.components(&skip) == comps {
            let mut atoms = q.atoms.clone();
            let mut removed: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &e in &combo {
                let (i, k) = locate[e];
                removed.entry(i).or_default().push(k);
            }
            for (i, mut ks) in removed {
                ks.sort_unstable_by(|a, b| b.cmp(a));
                for k in ks {
                    atoms[i].terms.remove(k);
                }
                atoms[i].reduced = true;
            }
            out.push(QuerySpec { atoms });
        }
        if !next_combination(&mut combo, g.edges.len()) {
            break;
        }
    }
    debug_assert!(g.atoms == q.atoms.len());
    Ok(out)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(q: &QuerySpec, aliases: &[&str]) -> AtomSet {
        aliases
            .iter()
            .map(|a| 1u64 << q.atom_index(a).unwrap())
            .sum()
    }

    #[test]
    fn parses_example_shape() {
        let q = parse_query("Q = R(X,Y), S(Y,Z,U), T(U,V), K(Y,W)").unwrap();
        assert_eq!(q.atoms.len(), 4);
        assert_eq!(q.variables().len(), 6);
        let q = parse_query("Q = R(X)").unwrap();
        assert_eq!((q.atoms.len(), q.variables().len()), (1, 1));
    }

    #[test]
    fn parses_aliases_and_wildcards() {
        let q = parse_query("a:R(X,_), b:R(_, X)").unwrap();
        assert_eq!(q.atoms[0].relation, "R");
        assert_eq!(q.atoms[1].alias, "b");
        assert_eq!(q.atoms[0].terms[1].slot, Slot::Private);
        assert_eq!(q.atoms[1].terms[1].slot, Slot::Attr(0));
        assert_eq!(q.variables(), vec!["X", "_1", "_2"]);
        assert!(q.all_atoms_have_private_variables());
    }

    #[test]
    fn rejects_bad_queries() {
        assert!(matches!(
            parse_query("Q = R(X,X)"),
            Err(Error::DuplicateVariableInAtom { .. })
        ));
        assert!(matches!(
            parse_query("R(X), R(Y)"),
            Err(Error::Syntax { .. })
        ));
        match parse_query("Q = R(X,\n  Y") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_query("Q = R()").is_err());
        assert!(parse_query("Q = R(_x)").is_err());
        assert!(parse_query("Q = 1R(X)").is_err());
    }

    #[test]
    fn classification() {
        let q = parse_query("Q = R(X,Y), S(Y,Z,U), T(U,V), K(Y,W)").unwrap();
        assert_eq!(check_berge_acyclic(&q), Shape::Tree);
        let q = parse_query("Q = R(X), S(Y)").unwrap();
        assert_eq!(check_berge_acyclic(&q), Shape::Forest { components: 2 });
        let q = parse_query("Q = R(X,Y), S(Y,Z), T(Z,X)").unwrap();
        match check_berge_acyclic(&q) {
            Shape::Cyclic { witness } => assert!(is_berge_cycle(&q, &witness), "{witness:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn witness_predicate_rejects_non_cycles() {
        let q = parse_query("Q = R(X,Y), S(Y,Z), T(Z,X)").unwrap();
        let w = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert!(is_berge_cycle(&q, &w(&["R", "Y", "S", "Z", "T", "X", "R"])));
        assert!(!is_berge_cycle(&q, &w(&["R", "Y", "S", "Y", "R"])));
        assert!(!is_berge_cycle(&q, &w(&["R", "Z", "S", "Y", "R"])));
    }

    #[test]
    fn orientation() {
        let q = parse_query("Q = R(X,Y), S(Y,Z,U), T(U,V), K(Y,W)").unwrap();
        let t = orient(&q, "S").unwrap();
        assert_eq!(t.parent_var_of(0), Some("Y"));
        assert_eq!(t.parent_var_of(2), Some("U"));
        assert_eq!(t.parent_var_of(3), Some("Y"));
        assert_eq!(t.parent_var_of(1), None);
        assert_eq!(*t.bottom_up.last().unwrap(), 1);

        let q = parse_query("Q = R(X)").unwrap();
        let t = orient(&q, "R").unwrap();
        assert_eq!(t.parent_var, vec![None]);

        let q = parse_query("Q = R(X,Y), S(Y,Z), T(Z,U)").unwrap();
        let t = orient(&q, "T").unwrap();
        assert_eq!(t.parent_var_of(1), Some("Z"));
        assert_eq!(t.parent_var_of(0), Some("Y"));
        assert!(orient(&q, "Nope").is_err());
    }

    #[test]
    fn orientation_ignores_atom_order() {
        let a = parse_query("Q = R(X,Y), S(Y,Z), T(Y,U)").unwrap();
        let b = parse_query("Q = T(Y,U), S(Y,Z), R(X,Y)").unwrap();
        let ta = orient(&a, "S").unwrap();
        let tb = orient(&b, "S").unwrap();
        let names = |q: &QuerySpec, t: &IncidenceTree| -> Vec<String> {
            t.bottom_up
                .iter()
                .map(|&i| q.atoms[i].alias.clone())
                .collect()
        };
        assert_eq!(names(&a, &ta), names(&b, &tb));
    }

    #[test]
    fn components_and_covers() {
        let q = parse_query("Q = R(X,Y), S(Y,Z), T(Z,U)").unwrap();
        assert_eq!(connected_components(&q, set(&q, &["R", "T"])), vec![1, 4]);
        assert_eq!(connected_components(&q, q.full_set()).len(), 1);

        let q = parse_query("Q = R(X,Y), S(Y,Z), T(Z,U), K(U,V)").unwrap();
        assert!(is_cover(&q, set(&q, &["R", "T", "K"])));
        assert!(!is_cover(&q, set(&q, &["R"])));
        assert!(is_cover(&q, q.full_set()));
        assert_eq!(connected_components(&q, set(&q, &["T", "K"])).len(), 1);
    }

    #[test]
    fn spanning_trees_of_cycles() {
        let q = parse_query("Q = R(X,Y), S(Y,Z), T(Z,X)").unwrap();
        let trees = spanning_trees(&q, DEFAULT_SPANNING_TREE_BUDGET).unwrap();
        assert_eq!(trees.len(), 6);
        assert!(trees.iter().all(|t| check_berge_acyclic(t) == Shape::Tree));
        let want = parse_query("Q = R(X,Y), S(Y,Z), T(Z)").unwrap();
        assert!(trees.iter().any(|t| t.to_string() == want.to_string()));

        let sq = parse_query("Q = A(X,Y), B(Y,Z), C(Z,W), D(W,X)").unwrap();
        assert!(
            spanning_trees(&sq, DEFAULT_SPANNING_TREE_BUDGET)
                .unwrap()
                .len()
                >= 4
        );

        let tree = parse_query("Q = R(X,Y), S(Y)").unwrap();
        assert_eq!(spanning_trees(&tree, 10), Err(Error::NotCyclic));
    }
}
