use std::fs;

use cardbound_core::degree::MaxMultiplicity;
use cardbound_core::rational::q;
use cardbound_core::stats::{extract_stats, load_catalog, read_csv, save_catalog, StatsCatalog};
use cardbound_core::Error;

#[test]
fn csv_to_catalog_file_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("Orders.csv");
    fs::write(&csv, "cust,item\n1,a\n1,a\n1,b\n2,b\n").unwrap();
    let table = read_csv(&csv).unwrap();
    assert_eq!(table.name, "Orders");
    let rel = extract_stats(&table);
    assert_eq!(rel.max_multiplicity, MaxMultiplicity::Finite(q(2)));

    let mut cat = StatsCatalog::default();
    cat.insert(rel);
    let path = dir.path().join("catalog.json");
    save_catalog(&cat, &path).unwrap();
    assert_eq!(load_catalog(&path).unwrap(), cat);
}

#[test]
fn missing_and_malformed_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        read_csv(&dir.path().join("nope.csv")),
        Err(Error::Io { .. })
    ));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"relations": [{"name": "R", "cardinality": "x", "max_multiplicity": "1", "attributes": []}]}"#)
        .unwrap();
    assert!(matches!(
        load_catalog(&bad),
        Err(Error::CatalogFormat { .. })
    ));
}
