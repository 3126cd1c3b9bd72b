//! Statistics catalog: per-relation cardinality, max tuple multiplicity and
//! per-attribute degree sequences or staircases, plus extraction from CSV.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::degree::{DegreeSequence, MaxMultiplicity};
use crate::error::{Error, Result};
use crate::fdsb::{compress, StaircaseFn, Strategy};
use crate::rational::{fmt_q, parse_q, q, q_usize, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeStats {
    pub name: String,
    pub degrees: Option<DegreeSequence>,
    pub staircase: Option<StaircaseFn>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationStats {
    pub name: String,
    pub cardinality: Q,
    pub max_multiplicity: MaxMultiplicity,
    pub attributes: Vec<AttributeStats>,
}

impl RelationStats {
    pub fn attribute(&self, name: &str) -> Option<&AttributeStats> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Adds a compressed staircase next to every full degree sequence.
    pub fn compress(&mut self, s: usize, strategy: Strategy) -> Result<()> {
        for a in &mut self.attributes {
            if let Some(d) = &a.degrees {
                a.staircase = Some(compress(d, s, strategy)?);
            }
        }
        Ok(())
    }

    /// Keeps only staircases, deriving exact ones where none exist.
    pub fn drop_degrees(&mut self) {
        for a in &mut self.attributes {
            if let Some(d) = a.degrees.take() {
                a.staircase
                    .get_or_insert_with(|| StaircaseFn::from_degrees(&d));
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let loc = format!("relation {}", self.name);
        let bad = |location: String, message: String| Error::CatalogFormat { location, message };
        if !self.cardinality.is_integer() || self.cardinality.is_negative() {
            return Err(bad(
                loc,
                "cardinality must be a non-negative integer".into(),
            ));
        }
        let mut names = BTreeSet::new();
        for a in &self.attributes {
            let aloc = format!("{loc}, attribute {}", a.name);
            if !names.insert(a.name.as_str()) {
                return Err(bad(aloc, "duplicate attribute name".into()));
            }
            if a.degrees.is_none() && a.staircase.is_none() {
                return Err(bad(aloc, "needs degrees or a staircase".into()));
            }
            if let Some(d) = &a.degrees {
                if d.total() != self.cardinality {
                    return Err(bad(
                        aloc,
                        format!(
                            "degrees sum to {} but the cardinality is {}",
                            fmt_q(&d.total()),
                            fmt_q(&self.cardinality)
                        ),
                    ));
                }
            }
            if let Some(s) = &a.staircase {
                if !s.has_integer_ends() {
                    return Err(bad(aloc, "staircase segment ends must be integers".into()));
                }
                if s.total() < self.cardinality {
                    return Err(bad(
                        aloc,
                        format!(
                            "staircase mass {} is below the cardinality {}",
                            fmt_q(&s.total()),
                            fmt_q(&self.cardinality)
                        ),
                    ));
                }
                if let Some(d) = &a.degrees {
                    if !s.dominates(d) {
                        return Err(bad(
                            aloc,
                            "staircase does not dominate the degree sequence".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StatsCatalog {
    pub relations: Vec<RelationStats>,
}

impl StatsCatalog {
    pub fn get(&self, name: &str) -> Option<&RelationStats> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut RelationStats> {
        self.relations.iter_mut().find(|r| r.name == name)
    }

    /// Inserts or replaces by name.
    pub fn insert(&mut self, rel: RelationStats) {
        match self.get_mut(&rel.name) {
            Some(slot) => *slot = rel,
            None => self.relations.push(rel),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for r in &self.relations {
            if !names.insert(r.name.as_str()) {
                return Err(Error::CatalogFormat {
                    location: format!("relation {}", r.name),
                    message: "duplicate relation name".into(),
                });
            }
            r.validate()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = CatalogDoc {
            relations: self.relations.iter().map(RelationDoc::from).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CatalogDoc = serde_json::from_str(text).map_err(|e| Error::CatalogFormat {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let mut relations = Vec::with_capacity(doc.relations.len());
        for (i, r) in doc.relations.into_iter().enumerate() {
            relations.push(r.into_stats(&format!("relations[{i}]"))?);
        }
        let cat = Self { relations };
        cat.validate()?;
        Ok(cat)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| io_err(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::CatalogFormat { location, message } => Error::CatalogFormat {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        })
    }
}

pub fn save_catalog(c: &StatsCatalog, path: &Path) -> Result<()> {
    c.save(path)
}

pub fn load_catalog(path: &Path) -> Result<StatsCatalog> {
    StatsCatalog::load(path)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    relations: Vec<RelationDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    name: String,
    cardinality: Num,
    max_multiplicity: Num,
    attributes: Vec<AttributeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degrees: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    staircase: Option<Vec<(Num, Num)>>,
}

/// Numbers travel as strings; plain JSON integers are accepted on input.
#[derive(Serialize, Deserialize, Clone)]
#[serde(untagged)]
enum Num {
    Text(String),
    Int(i64),
}

impl Num {
    fn of(v: &Q) -> Self {
        Num::Text(fmt_q(v))
    }

    fn parse(&self, loc: &str) -> Result<Q> {
        match self {
            Num::Int(i) => Ok(q(*i)),
            Num::Text(s) => parse_q(s).ok_or_else(|| Error::CatalogFormat {
                location: loc.to_string(),
                message: format!("not a number: {s:?}"),
            }),
        }
    }
}

impl From<&RelationStats> for RelationDoc {
    fn from(r: &RelationStats) -> Self {
        RelationDoc {
            name: r.name.clone(),
            cardinality: Num::of(&r.cardinality),
            max_multiplicity: Num::Text(r.max_multiplicity.to_string()),
            attributes: r
                .attributes
                .iter()
                .map(|a| AttributeDoc {
                    name: a.name.clone(),
                    degrees: a
                        .degrees
                        .as_ref()
                        .map(|d| d.to_vec().iter().map(Num::of).collect()),
                    staircase: a.staircase.as_ref().map(|s| {
                        s.segments()
                            .iter()
                            .map(|seg| (Num::of(&seg.end), Num::of(&seg.level)))
                            .collect()
                    }),
                })
                .collect(),
        }
    }
}

impl RelationDoc {
    fn into_stats(self, loc: &str) -> Result<RelationStats> {
        let bad = |location: String, message: String| Error::CatalogFormat { location, message };
        let cardinality = self.cardinality.parse(&format!("{loc}.cardinality"))?;
        let bloc = format!("{loc}.max_multiplicity");
        let max_multiplicity = match &self.max_multiplicity {
            Num::Text(s) if s.trim().eq_ignore_ascii_case("inf") => MaxMultiplicity::Infinite,
            n => MaxMultiplicity::finite(n.parse(&bloc)?).map_err(|e| bad(bloc, e.to_string()))?,
        };
        let mut attributes = Vec::with_capacity(self.attributes.len());
        for (j, a) in self.attributes.into_iter().enumerate() {
            let aloc = format!("{loc}.attributes[{j}]");
            let degrees = match a.degrees {
                None => None,
                Some(ds) => {
                    let vals = ds
                        .iter()
                        .enumerate()
                        .map(|(k, d)| d.parse(&format!("{aloc}.degrees[{k}]")))
                        .collect::<Result<Vec<_>>>()?;
                    Some(
                        DegreeSequence::new(vals)
                            .map_err(|e| bad(format!("{aloc}.degrees"), e.to_string()))?,
                    )
                }
            };
            let staircase = match a.staircase {
                None => None,
                Some(segs) => {
                    let vals = segs
                        .iter()
                        .enumerate()
                        .map(|(k, (e, l))| {
                            let sloc = format!("{aloc}.staircase[{k}]");
                            Ok((e.parse(&sloc)?, l.parse(&sloc)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Some(
                        StaircaseFn::new(vals)
                            .map_err(|e| bad(format!("{aloc}.staircase"), e.to_string()))?,
                    )
                }
            };
            attributes.push(AttributeStats {
                name: a.name,
                degrees,
                staircase,
            });
        }
        let rel = RelationStats {
            name: self.name,
            cardinality,
            max_multiplicity,
            attributes,
        };
        rel.validate().map_err(|e| match e {
            Error::CatalogFormat { location, message } => {
                bad(format!("{loc} ({location})"), message)
            }
            other => other,
        })?;
        Ok(rel)
    }
}

/// A relation's raw rows, compared as exact strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Reads a headed CSV file; the relation is named after the file stem.
pub fn read_csv(path: &Path) -> Result<Table> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    read_csv_from(&name, &path.display().to_string(), file)
}

pub fn read_csv_from(name: &str, source: &str, reader: impl Read) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let data_err = |line: u64, message: String| Error::Data {
        file: source.to_string(),
        line,
        message,
    };
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| data_err(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            data_err(line, e.to_string())
        })?;
        if rec.len() != headers.len() {
            let line = rec.position().map_or(0, |p| p.line());
            return Err(data_err(
                line,
                format!("expected {} fields, found {}", headers.len(), rec.len()),
            ));
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(Table {
        name: name.to_string(),
        headers,
        rows,
    })
}

/// Degree sequence per attribute, bag cardinality and max tuple multiplicity.
pub fn extract_stats(table: &Table) -> RelationStats {
    let mut attributes = Vec::with_capacity(table.headers.len());
    for (c, h) in table.headers.iter().enumerate() {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for row in &table.rows {
            *counts.entry(row[c].as_str()).or_default() += 1;
        }
        let degrees = DegreeSequence::from_unsorted(counts.into_values().map(q_usize).collect())
            .expect("counts are non-negative");
        attributes.push(AttributeStats {
            name: h.clone(),
            degrees: Some(degrees),
            staircase: None,
        });
    }
    let mut tuples: HashMap<&[String], usize> = HashMap::new();
    for row in &table.rows {
        *tuples.entry(row.as_slice()).or_default() += 1;
    }
    let b = tuples.values().copied().max().unwrap_or(1);
    RelationStats {
        name: table.name.clone(),
        cardinality: q_usize(table.rows.len()),
        max_multiplicity: MaxMultiplicity::finite(q_usize(b)).expect("at least one"),
        attributes,
    }
}

/// Per-attribute check that `observed` fits under `declared`: sequences are
/// dominated, cardinality and max multiplicity do not exceed the declared ones.
pub fn consistency_problems(declared: &RelationStats, observed: &RelationStats) -> Vec<String> {
    let mut out = Vec::new();
    if observed.cardinality > declared.cardinality {
        out.push(format!(
            "{}: data has {} rows, catalog declares {}",
            declared.name,
            fmt_q(&observed.cardinality),
            fmt_q(&declared.cardinality)
        ));
    }
    if let Some(b) = observed.max_multiplicity.value() {
        if !declared.max_multiplicity.admits(b) {
            out.push(format!(
                "{}: a tuple occurs {} times, catalog allows {}",
                declared.name,
                fmt_q(b),
                declared.max_multiplicity
            ));
        }
    }
    for (k, a) in declared.attributes.iter().enumerate() {
        let Some(obs) = observed.attributes.get(k).and_then(|o| o.degrees.as_ref()) else {
            out.push(format!(
                "{}.{}: missing from the data",
                declared.name, a.name
            ));
            continue;
        };
        let fits = match (&a.degrees, &a.staircase) {
            (Some(d), _) => obs.dominated_by(d),
            (None, Some(s)) => s.dominates(obs),
            (None, None) => true,
        };
        if !fits {
            out.push(format!(
                "{}.{}: observed degrees {} exceed the catalog",
                declared.name, a.name, obs
            ));
        }
    }
    out
}

impl StatsCatalog {
    /// Total number of tuples across relations; handy for summaries.
    pub fn total_cardinality(&self) -> Q {
        self.relations
            .iter()
            .fold(Q::zero(), |acc, r| acc + &r.cardinality)
    }
}
