use isochron::catalog::{load_catalog, verify_entry, Verdict, VerifyConfig};

#[test]
fn every_entry_passes_its_plan() {
    let cat = load_catalog().unwrap();
    let cfg = VerifyConfig::default();
    let mut bad = Vec::new();
    for e in &cat {
        let t = std::time::Instant::now();
        let r = verify_entry(e, &cfg);
        eprintln!("{} ({:.1}s)", r, t.elapsed().as_secs_f64());
        if r.status != Verdict::Pass {
            bad.push(r.id.clone());
        }
    }
    assert!(bad.is_empty(), "{:?}", bad);
}

#[test]
fn every_equation_label_is_present() {
    let cat = load_catalog().unwrap();
    let labels: std::collections::BTreeSet<&str> = cat.iter().map(|e| e.label.as_str()).collect();
    let mut want = vec!["ST11", "ST13", "ST21", "ST22", "ST23", "ST24", "ST26", "CUB1", "CUB2", "CUB6"];
    let quarun = [1, 3, 4, 5, 6, 7, 9, 10, 12, 14, 15, 16, 18, 32, 39, 40, 41, 42, 51, 52, 53, 54, 55, 56, 57];
    let names: Vec<String> = quarun.iter().map(|k| format!("QUARUN{}", k)).collect();
    want.extend(names.iter().map(String::as_str));
    let missing: Vec<&&str> = want.iter().filter(|l| !labels.contains(*l)).collect();
    assert!(missing.is_empty(), "{:?}", missing);
    let ids: std::collections::BTreeSet<&str> = cat.iter().map(|e| e.id.as_str()).collect();
    assert_eq!(ids.len(), cat.len());
}
