//! `cardbound`: build statistics catalogs, bound join queries and check the
//! bounds against real or generated data.

mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cardbound_core::bound::{BoundValue, Limits, Method};
use cardbound_core::classic::pb_rooted;
use cardbound_core::dsb::{dsb_rooted, materialize_worst_case};
use cardbound_core::eval::evaluate;
use cardbound_core::fdsb::{fdsb_rooted_with, Strategy};
use cardbound_core::oracle::{
    brute_force_join, database_for, generate_consistent_instance, Bag, RelationSpec,
    DEFAULT_JOIN_BUDGET,
};
use cardbound_core::query::{check_berge_acyclic, parse_query, QuerySpec, Shape};
use cardbound_core::rational::{fmt_q, Q};
use cardbound_core::stats::{consistency_problems, extract_stats, read_csv, StatsCatalog};
use cardbound_core::Error;

use report::{Entry, Report};

#[derive(Parser)]
#[command(
    name = "cardbound",
    version,
    about = "Upper bounds on join query output sizes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a statistics catalog from CSV files (one relation per file).
    Stats {
        #[arg(long, num_args = 1.., required = true)]
        input: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Add a staircase with at most this many buckets per attribute.
        #[arg(long)]
        compress: Option<usize>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Geometric)]
        strategy: StrategyArg,
        /// Keep only the staircases.
        #[arg(long, requires = "compress")]
        drop_degrees: bool,
    },
    /// Bound a query from a catalog.
    Bound {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        /// Evaluate the rooted form at this atom.
        #[arg(long)]
        root: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Evaluate the functional bound with finite multiplicities ignored.
        #[arg(long)]
        relax_fdsb: bool,
    },
    /// Count the query on data and check every bound against the count.
    Verify {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Directory holding `<relation>.csv`; data is generated when absent.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generate the worst-case instance instead of a random one.
        #[arg(long, conflicts_with = "data_dir")]
        worst_case: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        relax_fdsb: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Geometric,
    Equidepth,
    Mindp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    All,
    Agm,
    Pb,
    Dsb,
    Fdsb,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::All => Method::ALL.to_vec(),
            MethodArg::Agm => vec![Method::Agm],
            MethodArg::Pb => vec![Method::Pb],
            MethodArg::Dsb => vec![Method::Dsb],
            MethodArg::Fdsb => vec![Method::Fdsb],
        }
    }
}

/// Process exit status paired with the message explaining it.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Syntax { .. }
            | Error::DuplicateVariableInAtom { .. }
            | Error::DuplicateAlias(_)
            | Error::CatalogFormat { .. }
            | Error::Data { .. } => 2,
            Error::Catalog(_)
            | Error::MissingFullSequence { .. }
            | Error::MissingStaircase { .. } => 3,
            Error::Budget(_) => 4,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stats {
            input,
            out,
            compress,
            strategy,
            drop_degrees,
        } => cmd_stats(&input, &out, compress, strategy, drop_degrees),
        Command::Bound {
            catalog,
            query,
            method,
            root,
            json,
            relax_fdsb,
        } => cmd_bound(
            &catalog,
            &query,
            method,
            root.as_deref(),
            json.as_deref(),
            relax_fdsb,
        ),
        Command::Verify {
            catalog,
            query,
            data_dir,
            seed,
            worst_case,
            method,
            json,
            relax_fdsb,
        } => cmd_verify(
            &catalog,
            &query,
            data_dir.as_deref(),
            seed,
            worst_case,
            method,
            json.as_deref(),
            relax_fdsb,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_stats(
    input: &[PathBuf],
    out: &Path,
    compress: Option<usize>,
    strategy: StrategyArg,
    drop_degrees: bool,
) -> Result<(), Failure> {
    let strategy = match strategy {
        StrategyArg::Geometric => Strategy::GeometricRanks,
        StrategyArg::Equidepth => Strategy::EquiDepth,
        StrategyArg::Mindp => Strategy::MinMassDp,
    };
    let mut cat = StatsCatalog::default();
    for path in input {
        let table = read_csv(path)?;
        if cat.get(&table.name).is_some() {
            return Err(fail(
                2,
                format!("{}: relation {} given twice", path.display(), table.name),
            ));
        }
        let mut rel = extract_stats(&table);
        if let Some(s) = compress {
            if s == 0 {
                return Err(fail(2, "--compress needs at least one bucket"));
            }
            rel.compress(s, strategy)?;
            if drop_degrees {
                rel.drop_degrees();
            }
        }
        cat.insert(rel);
    }
    cat.save(out)?;
    for rel in &cat.relations {
        println!(
            "{}  N={}  B={}",
            rel.name,
            fmt_q(&rel.cardinality),
            rel.max_multiplicity
        );
        for a in &rel.attributes {
            let top = match (&a.degrees, &a.staircase) {
                (Some(d), _) => d
                    .stored()
                    .iter()
                    .take(5)
                    .map(fmt_q)
                    .collect::<Vec<_>>()
                    .join(","),
                (None, Some(s)) => s.to_string(),
                (None, None) => String::new(),
            };
            let more = a.degrees.as_ref().is_some_and(|d| d.len() > 5);
            println!("  {}: {}{}", a.name, top, if more { ",..." } else { "" });
            if let Some(s) = a.staircase.as_ref().filter(|_| a.degrees.is_some()) {
                println!("    staircase {s}");
            }
        }
    }
    Ok(())
}

fn load_inputs(catalog: &Path, query: &Path) -> Result<(StatsCatalog, QuerySpec, String), Failure> {
    let cat = StatsCatalog::load(catalog)?;
    let text =
        fs::read_to_string(query).map_err(|e| fail(1, format!("{}: {e}", query.display())))?;
    let q = parse_query(&text).map_err(|e| fail(2, format!("{}: {e}", query.display())))?;
    for a in &q.atoms {
        if cat.get(&a.relation).is_none() {
            return Err(fail(
                3,
                format!("relation {} is not in {}", a.relation, catalog.display()),
            ));
        }
    }
    Ok((cat, q, text.trim().to_string()))
}

fn rooted(
    q: &QuerySpec,
    cat: &StatsCatalog,
    m: Method,
    root: &str,
    limits: &Limits,
) -> Result<BoundValue, Error> {
    match m {
        Method::Agm => evaluate(q, cat, m, limits),
        Method::Pb => pb_rooted(q, cat, root),
        Method::Dsb => dsb_rooted(q, cat, root),
        Method::Fdsb => fdsb_rooted_with(q, cat, root, limits),
    }
}

fn any_finite_b(q: &QuerySpec, cat: &StatsCatalog) -> bool {
    q.atoms
        .iter()
        .filter_map(|a| cat.get(&a.relation))
        .any(|r| !r.max_multiplicity.is_infinite())
}

/// Evaluates the requested methods, collecting warnings on stderr.
fn compute(
    q: &QuerySpec,
    cat: &StatsCatalog,
    method: MethodArg,
    root: Option<&str>,
    relax_fdsb: bool,
) -> Result<Report, Failure> {
    let limits = Limits {
        relax_fdsb_multiplicity: relax_fdsb,
        ..Limits::default()
    };
    let mut report = Report::default();
    let cyclic = matches!(check_berge_acyclic(q), Shape::Cyclic { .. });
    if let Shape::Cyclic { witness } = check_berge_acyclic(q) {
        report.warn(format!(
            "query is cyclic ({}); using the minimum over spanning-tree relaxations, \
             where each dropped occurrence removes that attribute from the atom's statistics",
            witness.join(" ")
        ));
        if root.is_some() {
            return Err(fail(1, "--root needs an acyclic query"));
        }
    }
    if let Some(r) = root {
        if q.atom_index(r).is_none() {
            return Err(fail(3, format!("no atom named {r}")));
        }
    }
    let finite = any_finite_b(q, cat);
    for m in method.methods() {
        if m == Method::Fdsb && finite {
            if relax_fdsb {
                report.warn("fdsb ignores finite max multiplicities (--relax-fdsb)".to_string());
            } else if method == MethodArg::All {
                report.warn(
                    "fdsb skipped: a relation has a finite max multiplicity (see --relax-fdsb)"
                        .to_string(),
                );
                continue;
            }
        }
        let start = Instant::now();
        let value = match root {
            Some(r) => rooted(q, cat, m, r, &limits),
            None => evaluate(q, cat, m, &limits),
        };
        let micros = start.elapsed().as_micros();
        let value = value.map_err(|e| {
            let f = Failure::from(e);
            fail(f.code, format!("{m}: {}", f.message))
        })?;
        for (alias, b) in &value.b_effective {
            let declared = q
                .atom_index(alias)
                .and_then(|i| cat.get(&q.atoms[i].relation))
                .map(|r| r.max_multiplicity.clone());
            if let Some(d) = declared.filter(|d| d != b && !cyclic) {
                report.warn(format!(
                    "{m}: atom {alias} declares B={d} but the construction used B={b}"
                ));
            }
        }
        report.entries.push(Entry {
            bound: value,
            micros,
        });
    }
    check_ordering(q, &mut report)?;
    Ok(report)
}

/// Internal consistency check on the bound chain.
fn check_ordering(q: &QuerySpec, report: &mut Report) -> Result<(), Failure> {
    if report.entries.len() < 2 {
        return Ok(());
    }
    let all_inf = report
        .entries
        .iter()
        .all(|e| e.bound.b_effective.values().all(|b| b.is_infinite()));
    if !all_inf {
        return Ok(());
    }
    if !q.all_atoms_have_private_variables() {
        report.warn(
            "ordering check skipped: the cover-based bounds assume set semantics unless every atom \
             has a private variable"
                .to_string(),
        );
        return Ok(());
    }
    let order = [Method::Dsb, Method::Fdsb, Method::Pb, Method::Agm];
    let values: Vec<(Method, &Q)> = order
        .iter()
        .filter_map(|m| report.get(*m).map(|e| (*m, &e.bound.value)))
        .collect();
    for w in values.windows(2) {
        if w[0].1 > w[1].1 {
            return Err(fail(
                5,
                format!(
                    "{} = {} exceeds {} = {}",
                    w[0].0,
                    fmt_q(w[0].1),
                    w[1].0,
                    fmt_q(w[1].1)
                ),
            ));
        }
    }
    Ok(())
}

fn cmd_bound(
    catalog: &Path,
    query: &Path,
    method: MethodArg,
    root: Option<&str>,
    json: Option<&Path>,
    relax_fdsb: bool,
) -> Result<(), Failure> {
    let (cat, q, text) = load_inputs(catalog, query)?;
    let report = compute(&q, &cat, method, root, relax_fdsb)?;
    report.print(None);
    if let Some(path) = json {
        report.write_json(path, &text, None)?;
    }
    Ok(())
}

fn load_data(
    dir: &Path,
    q: &QuerySpec,
    cat: &StatsCatalog,
) -> Result<BTreeMap<String, Bag>, Failure> {
    let mut out = BTreeMap::new();
    for a in &q.atoms {
        if out.contains_key(&a.relation) {
            continue;
        }
        let table = read_csv(&dir.join(format!("{}.csv", a.relation)))?;
        let declared = cat.get(&a.relation).expect("checked when loading");
        for p in consistency_problems(declared, &extract_stats(&table)) {
            warn(&format!("catalog does not cover the data: {p}"));
        }
        out.insert(a.relation.clone(), Bag::from_table(&table));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    catalog: &Path,
    query: &Path,
    data_dir: Option<&Path>,
    seed: u64,
    worst_case: bool,
    method: MethodArg,
    json: Option<&Path>,
    relax_fdsb: bool,
) -> Result<(), Failure> {
    let (cat, q, text) = load_inputs(catalog, query)?;
    let db = if worst_case {
        materialize_worst_case(&q, &cat)?
    } else {
        let relations = match data_dir {
            Some(dir) => load_data(dir, &q, &cat)?,
            None => {
                let mut names: Vec<&str> = q.atoms.iter().map(|a| a.relation.as_str()).collect();
                names.sort_unstable();
                names.dedup();
                let specs = names
                    .iter()
                    .map(|n| RelationSpec::from_stats(cat.get(n).expect("checked when loading")))
                    .collect::<Result<Vec<_>, _>>()?;
                generate_consistent_instance(&specs, seed)?
            }
        };
        database_for(&q, &relations)?
    };
    let count = brute_force_join(&q, &db, DEFAULT_JOIN_BUDGET)?;
    let report = compute(&q, &cat, method, None, relax_fdsb)?;
    let count_q = Q::from_integer(count.clone());
    report.print(Some(&count_q));
    if let Some(path) = json {
        report.write_json(path, &text, Some(&count_q))?;
    }
    let sound_under_bags = q.all_atoms_have_private_variables();
    for e in &report.entries {
        let m = e.bound.method;
        if count_q <= e.bound.value {
            continue;
        }
        if m == Method::Dsb || sound_under_bags {
            return Err(fail(
                5,
                format!("true count {count} exceeds {m} = {}", fmt_q(&e.bound.value)),
            ));
        }
        warn(&format!(
            "true count {count} exceeds {m} = {}; {m} assumes set semantics when an atom has no private variable",
            fmt_q(&e.bound.value)
        ));
    }
    Ok(())
}
