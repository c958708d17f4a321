mod common;

use reticular::classify::Sign;
use reticular::jetalg::parse_poly;
use reticular::tangent::{codim_report_auto, is_inf_stable, Family, JetPolicy, MultiGerm};
use reticular::unfold::*;

/// Asserts that each component of `fam` equals the expression parsed in that component's spec.
fn assert_family(fam: &Family, expected: &[&str]) {
    assert_eq!(fam.m(), expected.len());
    for (c, e) in fam.comps().iter().zip(expected) {
        let want = parse_poly(e, c.spec()).unwrap();
        assert_eq!(c, &want, "got {c}, expected {e}");
    }
}

fn germ(text: &str) -> MultiGerm {
    MultiGerm::parse(text).unwrap()
}

#[test]
fn build_versal_examples() {
    assert_family(&build_versal(&germ("y^2; y^2"), 1).unwrap(), &["y^2 + q - z", "y^2 - z"]);
    assert_family(&build_versal(&germ("y^2; x^2"), 2).unwrap(), &["y^2 + q1 - z", "x^2 + q2*x - z"]);
    assert_family(&build_versal(&germ("y^2; y^2; y^2"), 2).unwrap(), &["y^2 + q1 - z", "y^2 + q2 - z", "y^2 - z"]);
}

#[test]
fn build_versal_rejects_over_budget() {
    assert!(matches!(build_versal(&germ("y^2; y^3"), 1), Err(UnfoldError::Budget { .. })));
}

#[test]
fn build_codim1_examples() {
    let p = [Sign::Plus];
    assert_family(&build_codim1(&germ("y^2; y^3"), 1, &p).unwrap(), &["y^2 + t + q - z", "y^3 + q*y - z"]);
    assert_family(&build_codim1(&germ("y^2; y^2"), 1, &p).unwrap(), &["y^2 + t + q^2 - z", "y^2 - z"]);
    assert_family(&build_codim1(&germ("x^2; x^2"), 2, &p).unwrap(), &["x^2 + (t + q1)*x + q2 - z", "x^2 + q1*x - z"]);
    assert_family(&build_codim1(&germ("y^2; y^2"), 1, &[Sign::Minus]).unwrap(), &["y^2 + t - q^2 - z", "y^2 - z"]);
}

#[test]
fn build_codim1_sign_length_checked() {
    let e = build_codim1(&germ("y^2; y^3"), 1, &[Sign::Plus, Sign::Plus]);
    assert!(matches!(e, Err(UnfoldError::Signs { got: 2, want: 1 })));
    assert!(matches!(build_codim1(&germ("y^3; y^3"), 1, &[]), Err(UnfoldError::Budget { .. })));
}

/// Every catalog base admits the construction matching its budget, with exactly n parameters.
/// Codimension-one bases need at least one stable sign vector.
#[test]
fn constructions_cover_catalog_bases() {
    for n in [1, 2] {
        for e in catalog(n).unwrap() {
            if e.signs.contains(&Sign::Minus) {
                continue;
            }
            let total: usize = e.mu.iter().sum();
            let fam = if total <= n + 1 {
                build_versal(&e.base, n).unwrap_or_else(|err| panic!("{} {err}", e.label))
            } else {
                let k = codim1_sign_count(&e.base, n).unwrap();
                let ok: Vec<Family> = sign_vectors(k).iter().filter_map(|s| build_codim1(&e.base, n, s).ok()).collect();
                assert!(!ok.is_empty(), "{}", e.label);
                ok.into_iter().next().unwrap()
            };
            let used: Vec<String> = fam
                .params()
                .into_iter()
                .filter(|p| p.starts_with('q') && fam.comps().iter().any(|c| c.involves(c.spec().index(p).unwrap())))
                .collect();
            assert_eq!(used.len(), if total <= n + 1 { total - 1 } else { n }, "{} {:?}", e.label, used);
            assert!(is_inf_stable(&fam, JetPolicy::for_n(n)).unwrap().holds, "{}", e.label);
        }
    }
}

/// Three sheets over a line: the `+` choice makes two fronts parallel, `-` gives a triple point.
#[test]
fn codim1_sign_can_break_stability() {
    let g = germ("y^2; y^2; y^2");
    assert!(matches!(build_codim1(&g, 1, &[Sign::Plus]), Err(UnfoldError::Verification { .. })));
    let f = build_codim1(&g, 1, &[Sign::Minus]).unwrap();
    assert_family(&f, &["y^2 + t - q - z", "y^2 + q - z", "y^2 - z"]);
    let d = build_generating(&g, 1, None).unwrap();
    assert_eq!(d.comps(), f.comps());
}

/// The listed versal unfoldings, transcribed.
#[test]
fn versal_lists_match_transcription() {
    let expected: Vec<Vec<&str>> = vec![
        vec!["y^2 + u11", "y^2 + u21"],
        vec!["y^2 + u11", "y^3 + u21*y + u22"],
        vec!["y^2 + u11", "x^2 + u21*x + u22"],
        vec!["y^2 + u11", "y^2 + u21", "y^2 + u31"],
        vec!["y^2 + u11", "y^2 + u21"],
        vec!["y^2 + u11", "y^3 + u21*y + u22"],
        vec!["y^2 + u11", "y^4 + u21*y^2 + u22*y + u23"],
        vec!["y^3 + u11*y + u12", "y^3 + u21*y + u22"],
        vec!["y^2 + u11", "x^2 + u21*x + u22"],
        vec!["y^2 + u11", "x^3 + u21*x^2 + u22*x + u23"],
        vec!["y^2 + u11", "x*y + y^3 + u21*y^2 + u22*y + u23"],
        vec!["y^2 + u11", "-x*y + y^3 + u21*y^2 + u22*y + u23"],
        vec!["x^2 + u11*x + u12", "x^2 + u21*x + u22"],
        vec!["y^2 + u11", "y^2 + u21", "y^2 + u31"],
        vec!["y^2 + u11", "y^2 + u21", "y^3 + u31*y + u32"],
        vec!["y^2 + u11", "y^2 + u21", "x^2 + u31*x + u32"],
        vec!["y^2 + u11", "y^2 + u21", "y^2 + u31", "y^2 + u41"],
    ];
    let mut got = versal_lists(1).unwrap();
    got.extend(versal_lists(2).unwrap());
    assert_eq!(got.len(), expected.len());
    for (fam, comps) in got.iter().zip(&expected) {
        assert_family(fam, comps);
    }
    // Parameter counts agree with the independent table.
    for (fam, (_, _, counts)) in got.iter().zip(common::versal_table()) {
        let per: Vec<usize> =
            fam.comps().iter().map(|c| c.used_in_role(reticular::jetalg::Role::Unfold).len()).collect();
        assert_eq!(per, counts);
    }
}

#[test]
fn catalog_sizes_and_members() {
    let c1 = catalog(1).unwrap();
    let c2 = catalog(2).unwrap();
    assert_eq!(catalog_label_count(1), 5);
    assert_eq!(catalog_label_count(2), 15);
    assert_eq!(c1.len(), 8);
    assert_eq!(c2.len(), 38);
    assert!(matches!(catalog(3), Err(UnfoldError::UnsupportedN(3))));

    let find = |c: &[CatalogEntry], label: &str, variant: &str| {
        c.iter().find(|e| e.label.ascii() == label && e.variant() == variant).cloned().unwrap()
    };
    let e = find(&c1, "1(0A1,0B2)", "-");
    assert_family(&e.family, &["y^2 + t - q - z", "x^2 + q*x - z"]);
    let e = find(&c2, "1(0A2,0A2)", "+");
    assert_family(&e.family, &["y^3 + (t + q1)*y + q2 - z", "y^3 + q1*y - z"]);
    assert_eq!(e.mu, vec![2, 2]);
    let e = find(&c2, "1(0A1,0A1,0A1,0A1)", "--");
    assert_eq!(e.label.m(), 4);
    let e = find(&c2, "1(0A1,0C3-)", "-");
    assert_family(&e.family, &["y^2 + t + q1 - z", "-x*y + y^3 + q1*y^2 + q2*y - z"]);

    // Catalog μ vectors agree with the exact codimension computation of the base.
    for e in c1.iter().chain(&c2) {
        let rep = codim_report_auto(&e.base, JetPolicy::for_n(e.label.n)).unwrap();
        let mu: Vec<usize> = rep.mu().into_iter().map(Option::unwrap).collect();
        assert_eq!(mu, e.mu, "{}", e.label);
    }
}

#[test]
fn verify_catalog_n1_all_pass() {
    let rep = verify_catalog(1).unwrap();
    assert_eq!(rep.labels, 5);
    assert_eq!(rep.labels_passed, 5, "{}", rep.to_text());
    assert!(rep.all_pass());
    for r in &rep.rows {
        assert!(r.stable.holds && r.probes.iter().all(|p| !p.still_versal));
    }
}

#[test]
fn tampered_entry_fails_with_witness() {
    let mut e = catalog(1).unwrap().into_iter().find(|e| e.label.ascii() == "1(0A1,0A2)").unwrap();
    e.family = e.family.with_zeroed("q1").unwrap();
    let row = verify_entry(&e).unwrap();
    assert!(!row.pass);
    assert!(!row.stable.holds);
    assert!(row.stable.witness.as_deref().is_some_and(|w| !w.is_empty()), "{:?}", row.stable);
}

#[test]
fn export_formats() {
    let c = catalog(1).unwrap();
    let text = export_text(&c);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), c.len());
    let fields: Vec<&str> = lines[0].split('\t').collect();
    assert_eq!(fields, vec!["0(0A1,0A1)", "0", "2", "1", "1,1", "y^2 + q - z ; y^2 - z"]);
    // Expressions re-parse to the same family.
    for (line, e) in lines.iter().zip(&c) {
        let fam_text = line.split('\t').nth(5).unwrap();
        let comps: Vec<&str> = fam_text.split(" ; ").collect();
        let back = Family::parse_generating(&comps, 1).unwrap();
        assert_eq!(back.comps(), e.family.comps());
    }
    let json: serde_json::Value = serde_json::from_str(&export_json(&c)).unwrap();
    let arr = json.as_array().unwrap();
    assert_eq!(arr.len(), c.len());
    assert_eq!(arr[3]["label_ascii"], "1(0A1,0A2)");
    assert_eq!(arr[3]["variant"], "+");
    assert_eq!(arr[3]["mu"], serde_json::json!([1, 2]));
}

#[test]
fn build_generating_dispatches_on_budget() {
    let f = build_generating(&germ("y^2; y^3"), 1, None).unwrap();
    assert!(f.has_time() && f.comps()[0].involves(f.comps()[0].spec().index("t").unwrap()));
    let f = build_generating(&germ("y^2; y^2"), 1, None).unwrap();
    assert!(!f.comps()[0].involves(f.comps()[0].spec().index("t").unwrap()));
    assert!(matches!(build_generating(&germ("y^3; y^3; y^2"), 2, None), Err(UnfoldError::Reject(_))));
}

/// Only the `+q1` variants of the three-sheet n=2 entry fail: there F1 - F2 = t ± q2^2 misses q1.
#[test]
fn verify_catalog_n2_known_outcome() {
    let rep = verify_catalog(2).unwrap();
    assert_eq!(rep.labels, 15);
    let failing: Vec<(String, String)> =
        rep.rows.iter().filter(|r| !r.pass).map(|r| (r.label_ascii.clone(), r.variant.clone())).collect();
    assert_eq!(
        failing,
        vec![("1(0A1,0A1,0A1)".to_string(), "++".to_string()), ("1(0A1,0A1,0A1)".to_string(), "+-".to_string())]
    );
    for r in rep.rows.iter().filter(|r| !r.pass) {
        assert!(r.nondegeneracy.is_empty() && r.symbols_match && !r.stable.holds);
    }
    assert_eq!(rep.labels_passed, 14);
}
