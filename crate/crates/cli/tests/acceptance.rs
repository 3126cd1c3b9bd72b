//! Acceptance checks. Each check prints one PASS/FAIL line; the process
//! fails if any check fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cardbound_core::bound::Method;
use cardbound_core::classic::{agm_acyclic, pb, pb_rooted};
use cardbound_core::degree::{DegreeSequence, MaxMultiplicity};
use cardbound_core::dsb::{dsb, materialize_worst_case};
use cardbound_core::fdsb::{fdsb, fdsb_rooted, Strategy};
use cardbound_core::oracle::{
    brute_force_join, database_for, lp_max_prefix, random_tables, random_tree_query, Bag,
    WorkloadParams, DEFAULT_JOIN_BUDGET,
};
use cardbound_core::query::{is_connected, is_cover, members, AtomSet, QuerySpec};
use cardbound_core::rational::{fmt_q, q, qs, Q};
use cardbound_core::stats::{extract_stats, StatsCatalog};
use cardbound_core::tensor::{all_coords, SparseTensor};
use cardbound_core::worst_case::{
    build_finite_b_2d, build_greedy_infinite_b, build_lp_oracle, contract, value_at_infinite_b,
    DEFAULT_CELL_BUDGET,
};

type Outcome = Result<String, String>;
type Check = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seq(v: &[i64]) -> DegreeSequence {
    DegreeSequence::from_ints(v).unwrap()
}

fn random_seq(rng: &mut impl Rng, max_len: usize, max_deg: i64) -> DegreeSequence {
    let n = rng.gen_range(1..=max_len);
    let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max_deg)).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    seq(&v)
}

/// Random tree query with data and a catalog extracted from that data,
/// every max multiplicity set to infinity.
fn random_instance(rng: &mut ChaCha8Rng) -> (QuerySpec, BTreeMap<String, Bag>, StatsCatalog) {
    random_instance_with(rng, &WorkloadParams::default())
}

fn random_instance_with(
    rng: &mut ChaCha8Rng,
    params: &WorkloadParams,
) -> (QuerySpec, BTreeMap<String, Bag>, StatsCatalog) {
    let qy = random_tree_query(rng, params);
    let tables = random_tables(rng, &qy, params);
    let mut cat = StatsCatalog::default();
    let mut bags = BTreeMap::new();
    for (name, t) in &tables {
        let mut rel = extract_stats(t);
        rel.max_multiplicity = MaxMultiplicity::Infinite;
        cat.insert(rel);
        bags.insert(name.clone(), Bag::from_table(t));
    }
    (qy, bags, cat)
}

fn true_count(qy: &QuerySpec, bags: &BTreeMap<String, Bag>) -> Q {
    let db = database_for(qy, bags).unwrap();
    Q::from_integer(brute_force_join(qy, &db, DEFAULT_JOIN_BUDGET).unwrap())
}

fn chain_golden() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let catalog = |b_s: &str| {
        format!(
            r#"{{"relations": [
            {{"name": "R", "cardinality": "7", "max_multiplicity": "inf",
              "attributes": [{{"name": "X", "degrees": ["3", "2", "2"]}}]}},
            {{"name": "S", "cardinality": "6", "max_multiplicity": "{b_s}",
              "attributes": [{{"name": "X", "degrees": ["5", "1"]}}, {{"name": "Y", "degrees": ["3", "2", "1"]}}]}},
            {{"name": "T", "cardinality": "5", "max_multiplicity": "inf",
              "attributes": [{{"name": "Y", "degrees": ["2", "1", "1", "1"]}}]}}]}}"#
        )
    };
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let run = |cat: &Path, query: &Path, method: &str| -> Result<serde_json::Value, String> {
        let out = dir.path().join("report.json");
        let status = Command::new(env!("CARGO_BIN_EXE_cardbound"))
            .args(["bound", "--method", method, "--catalog"])
            .arg(cat)
            .arg("--query")
            .arg(query)
            .arg("--json")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).map_err(|e| e.to_string())
    };
    let cat_inf = write("inf.json", &catalog("inf"));
    let cat_two = write("two.json", &catalog("2"));
    let private = write("private.txt", "Q = R(X, _), S(X, Y, _), T(Y, _)\n");
    let bag = write("bag.txt", "Q = R(X), S(X, Y), T(Y)\n");

    let report = run(&cat_inf, &private, "all")?;
    let value = |m: &str| {
        report["bounds"][m]["value"]
            .as_str()
            .unwrap_or("missing")
            .to_string()
    };
    let got = (value("agm"), value("pb"), value("dsb"));
    ensure(got == ("210".into(), "36".into(), "26".into()), || {
        format!("agm/pb/dsb = {got:?}")
    })?;
    let capped = run(&cat_two, &bag, "dsb")?;
    let d = capped["bounds"]["dsb"]["value"]
        .as_str()
        .unwrap_or("missing")
        .to_string();
    ensure(d == "25", || format!("capped dsb = {d}"))?;
    Ok(format!(
        "agm={} pb={} dsb={} capped dsb={d}",
        got.0, got.1, got.2
    ))
}

fn greedy_matrix_golden() -> Outcome {
    let t = build_greedy_infinite_b(&[seq(&[6, 3, 1]), seq(&[4, 3, 2, 1])])
        .map_err(|e| e.to_string())?;
    let c = SparseTensor::from_dense_2d(&[qs(&[4, 2, 0, 0]), qs(&[0, 1, 2, 0]), qs(&[0, 0, 0, 1])]);
    ensure(t.tensor == c, || "C differs".into())?;
    let v = [[4, 6, 6, 6], [4, 7, 9, 9], [4, 7, 9, 10]];
    for (i, row) in v.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            let got = t.tensor.prefix_sum(&[i + 1, j + 1]);
            ensure(got == q(want), || {
                format!("V[{}][{}] = {got}, want {want}", i + 1, j + 1)
            })?;
        }
    }
    Ok("C and all 12 prefix sums match".into())
}

fn inconsistent_golden() -> Outcome {
    let f = seq(&[10, 10, 6]);
    let b = MaxMultiplicity::Finite(q(5));
    let t = build_finite_b_2d(&f, &f, &b).map_err(|e| e.to_string())?;
    let c33 = t.tensor.get(&[3, 3]);
    ensure(c33 == q(6), || format!("C_33 = {c33}"))?;
    ensure(t.tensor.total() == q(26), || {
        format!("total = {}", t.tensor.total())
    })?;
    let lp =
        build_lp_oracle(&[f.clone(), f], &b, DEFAULT_CELL_BUDGET).map_err(|e| e.to_string())?;
    ensure(lp.tensor == t.tensor, || "LP oracle tensor differs".into())?;
    Ok("C_33=6 > B=5, total 26 = 5B+1, LP oracle agrees".into())
}

fn negative_entry_witness() -> Outcome {
    let b = MaxMultiplicity::Finite(q(3));
    let seqs = [seq(&[100, 100]), seq(&[100, 100]), seq(&[100, 6])];
    let t = build_lp_oracle(&seqs, &b, DEFAULT_CELL_BUDGET).map_err(|e| e.to_string())?;
    let c = t.tensor.get(&[2, 2, 2]);
    ensure(c == q(-3), || format!("C_222 = {c}"))?;
    Ok("C_222 = -3".into())
}

fn ordering_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let (qy, bags, cat) = random_instance(&mut rng);
        let n = true_count(&qy, &bags);
        let d = dsb(&qy, &cat).unwrap().value;
        let f = fdsb(&qy, &cat).unwrap().value;
        let p = pb(&qy, &cat).unwrap().value;
        let a = agm_acyclic(&qy, &cat).unwrap().value;
        ensure(n <= d && d <= f && f <= p && p <= a, || {
            format!(
                "case {case} {qy}: |Q|={} dsb={} fdsb={} pb={} agm={}",
                fmt_q(&n),
                fmt_q(&d),
                fmt_q(&f),
                fmt_q(&p),
                fmt_q(&a)
            )
        })?;
    }
    Ok("200 queries, no violations".into())
}

fn tightness_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..100 {
        let (qy, _, cat) = random_instance(&mut rng);
        let db = materialize_worst_case(&qy, &cat).unwrap();
        let n = Q::from_integer(brute_force_join(&qy, &db, DEFAULT_JOIN_BUDGET).unwrap());
        let d = dsb(&qy, &cat).unwrap().value;
        ensure(n == d, || format!("case {case} {qy}: join {n} vs dsb {d}"))?;
    }
    Ok("100 worst-case instances attain the bound".into())
}

fn lp_equivalence_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..100 {
        let f = random_seq(&mut rng, 3, 8);
        let g = random_seq(&mut rng, 4, 8);
        let b = MaxMultiplicity::Finite(q(rng.gen_range(1..=5)));
        let t = build_finite_b_2d(&f, &g, &b).unwrap();
        for m in all_coords(&[f.len(), g.len()]) {
            let want = lp_max_prefix(&[f.clone(), g.clone()], &b, &m).unwrap();
            let got = t.tensor.prefix_sum(&m);
            ensure(got == want, || {
                format!("finite case {case} f={f} g={g} B={b} m={m:?}: {got} vs {want}")
            })?;
        }
    }
    for case in 0..50 {
        let d = rng.gen_range(1..=3);
        let seqs: Vec<DegreeSequence> = (0..d).map(|_| random_seq(&mut rng, 4, 6)).collect();
        let cdfs: Vec<_> = seqs.iter().map(|s| s.cdf()).collect();
        let dims: Vec<usize> = seqs.iter().map(|s| s.len()).collect();
        for m in all_coords(&dims) {
            let want = lp_max_prefix(&seqs, &MaxMultiplicity::Infinite, &m).unwrap();
            let got = value_at_infinite_b(&cdfs, &m).unwrap();
            ensure(got == want, || {
                format!("infinite case {case} m={m:?}: {got} vs {want}")
            })?;
        }
    }
    Ok("100 finite-B and 50 infinite-B instances agree on every box".into())
}

fn compression_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..100 {
        let (qy, _, cat) = random_instance(&mut rng);
        let n_max = cat
            .relations
            .iter()
            .flat_map(|r| {
                r.attributes
                    .iter()
                    .filter_map(|a| a.degrees.as_ref().map(|d| d.len()))
            })
            .max()
            .unwrap_or(1);
        let d = dsb(&qy, &cat).unwrap().value;
        let mut prev: Option<Q> = None;
        for s in [1, 2, 4, n_max.max(1)] {
            let mut c = cat.clone();
            for r in &mut c.relations {
                r.compress(s, Strategy::GeometricRanks).unwrap();
            }
            let f = fdsb(&qy, &c).unwrap().value;
            ensure(f >= d, || {
                format!("case {case} {qy} s={s}: fdsb {f} < dsb {d}")
            })?;
            if let Some(p) = &prev {
                ensure(f <= *p, || {
                    format!("case {case} {qy} s={s}: fdsb {f} above {p}")
                })?;
            }
            if s == 1 {
                for a in &qy.atoms {
                    let fr = fdsb_rooted(&qy, &c, &a.alias).unwrap().value;
                    let pr = pb_rooted(&qy, &c, &a.alias).unwrap().value;
                    ensure(fr <= pr, || {
                        format!("case {case} {qy} root {}: fdsb {fr} > pb {pr}", a.alias)
                    })?;
                }
            }
            prev = Some(f);
        }
    }
    Ok("100 instances, s in {1,2,4,n}".into())
}

fn sorted_vector(rng: &mut impl Rng, n: usize) -> Vec<Q> {
    let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=9)).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    qs(&v)
}

fn contraction_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..500 {
        let t = if rng.gen_bool(0.5) {
            let d = rng.gen_range(1..=3);
            let seqs: Vec<_> = (0..d).map(|_| random_seq(&mut rng, 4, 8)).collect();
            build_greedy_infinite_b(&seqs).unwrap().tensor
        } else {
            let f = random_seq(&mut rng, 4, 8);
            let g = random_seq(&mut rng, 4, 8);
            build_finite_b_2d(&f, &g, &MaxMultiplicity::Finite(q(rng.gen_range(1..=5))))
                .unwrap()
                .tensor
        };
        let dims = t.dims().to_vec();
        let free = rng.gen_range(0..dims.len());
        let vecs: Vec<Vec<Q>> = dims.iter().map(|&n| sorted_vector(&mut rng, n)).collect();
        let args: Vec<Option<&[Q]>> = vecs
            .iter()
            .enumerate()
            .map(|(i, v)| (i != free).then_some(v.as_slice()))
            .collect();
        let out = contract(&t, &args).unwrap();
        let ok = out.iter().all(|x| *x >= q(0)) && out.windows(2).all(|w| w[0] >= w[1]);
        ensure(ok, || format!("case {case}: output {out:?}"))?;
    }
    Ok("500 contractions non-negative and non-increasing".into())
}

/// Every way to split `set` into connected non-empty parts.
fn partitions(qy: &QuerySpec, set: AtomSet) -> Vec<Vec<AtomSet>> {
    if set == 0 {
        return vec![vec![]];
    }
    let low = set & set.wrapping_neg();
    let rest = set & !low;
    let mut out = Vec::new();
    let mut sub = rest;
    loop {
        let part = sub | low;
        if is_connected(qy, part) {
            for mut p in partitions(qy, set & !part) {
                p.push(part);
                out.push(p);
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    out
}

fn exhaustive(qy: &QuerySpec, cat: &StatsCatalog, m: Method) -> Q {
    let mut cache: BTreeMap<AtomSet, Q> = BTreeMap::new();
    let mut part_cost = |part: AtomSet| -> Q {
        cache
            .entry(part)
            .or_insert_with(|| {
                let sub = qy.subquery(part);
                members(part)
                    .map(|i| {
                        let alias = &qy.atoms[i].alias;
                        match m {
                            Method::Pb => pb_rooted(&sub, cat, alias).unwrap().value,
                            _ => fdsb_rooted(&sub, cat, alias).unwrap().value,
                        }
                    })
                    .min()
                    .unwrap()
            })
            .clone()
    };
    let mut best: Option<Q> = None;
    for s in 1..(1u64 << qy.len()) {
        if !is_cover(qy, s) {
            continue;
        }
        for p in partitions(qy, s) {
            let v = p.iter().fold(q(1), |acc, &part| acc * part_cost(part));
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    best.unwrap()
}

fn cover_dp_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checked = 0;
    let mut split = 0;
    for case in 0..60 {
        // Odd cases drop private variables so that partial covers can win.
        let params = WorkloadParams {
            private_vars: case % 2 == 0,
            ..WorkloadParams::default()
        };
        let (qy, _, cat) = random_instance_with(&mut rng, &params);
        let p = pb(&qy, &cat).unwrap().value;
        let f = fdsb(&qy, &cat).unwrap().value;
        let pe = exhaustive(&qy, &cat, Method::Pb);
        let fe = exhaustive(&qy, &cat, Method::Fdsb);
        ensure(p == pe, || {
            format!("case {case} {qy}: pb dp {p} vs exhaustive {pe}")
        })?;
        ensure(f == fe, || {
            format!("case {case} {qy}: fdsb dp {f} vs exhaustive {fe}")
        })?;
        if pb(&qy, &cat).unwrap().root.is_none() {
            split += 1;
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} queries with up to 4 atoms, {split} won by a partial or split cover"
    ))
}

fn main() {
    let checks: [Check; 10] = [
        (
            "three-relation chain golden run",
            Duration::from_secs(1),
            chain_golden,
        ),
        (
            "greedy worst-case matrix",
            Duration::from_secs(1),
            greedy_matrix_golden,
        ),
        (
            "inconsistent worst-case matrix",
            Duration::from_secs(1),
            inconsistent_golden,
        ),
        (
            "negative entry witness",
            Duration::from_secs(5),
            negative_entry_witness,
        ),
        ("bound ordering", Duration::from_secs(60), ordering_suite),
        (
            "tightness at B=inf",
            Duration::from_secs(60),
            tightness_suite,
        ),
        (
            "LP oracle equivalence",
            Duration::from_secs(120),
            lp_equivalence_suite,
        ),
        (
            "compression monotonicity",
            Duration::from_secs(60),
            compression_suite,
        ),
        (
            "contraction shape",
            Duration::from_secs(30),
            contraction_suite,
        ),
        (
            "cover DP vs exhaustive",
            Duration::from_secs(30),
            cover_dp_suite,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:?}, limit {limit:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {status} {name} ({:.3}s): {detail}",
            i + 1,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
