//! Acceptance criteria 1-8. Each test writes one `[PASS]`/`[FAIL]` line straight to stdout,
//! bypassing the test harness capture, then asserts the criterion.

mod common;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reticular::classify::{classify_component, classify_multigerm, Reject};
use reticular::front::{sweep, trace_component, Stratum, TraceOptions, TOL_CLOSED};
use reticular::jetalg::Poly;
use reticular::tangent::{codim_report_auto, is_rk_l_determined, Determinacy, Family, JetPolicy, MultiGerm};
use reticular::unfold::{catalog, verify_catalog, CatalogEntry};

fn report(id: u8, ok: bool, what: &str, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[{tag}] AC{id} {what}: {detail}");
    let _ = out.flush();
}

fn germ(text: &str) -> MultiGerm {
    MultiGerm::parse(text).unwrap()
}

fn entry(n: usize, label: &str, variant: &str) -> CatalogEntry {
    catalog(n).unwrap().into_iter().find(|e| e.label.ascii() == label && e.variant() == variant).unwrap()
}

// ---- AC1 ----

fn ac1_report() -> (bool, String) {
    let mut ok = true;
    let mut text = String::new();
    for (comps, n, counts) in common::versal_table() {
        let rep = codim_report_auto(&germ(&comps.join(";")), JetPolicy::for_n(n)).unwrap();
        let mu: Vec<Option<usize>> = rep.mu();
        let want: Vec<Option<usize>> = counts.iter().copied().map(Some).collect();
        ok &= mu == want;
        let _ = writeln!(text, "{comps:?} n={n} mu={mu:?} want={want:?}");
    }
    (ok, text)
}

#[test]
fn ac1_mu_table() {
    let start = Instant::now();
    let (ok, text) = ac1_report();
    let dt = start.elapsed();
    let pass = ok && dt < Duration::from_secs(5);
    report(1, pass, "mu table vs versal parameter counts", &format!("17 germs, {:.2?}", dt));
    assert!(ok, "{text}");
    assert!(dt < Duration::from_secs(5), "{dt:?}");
}

// ---- AC2 ----

fn ac2_report() -> (bool, String) {
    let mut ok = true;
    let mut text = String::new();
    for (n, comps, want) in common::germ_lists() {
        let got = classify_multigerm(&germ(&comps.join(";")), n).unwrap();
        let syms = got.as_ref().map(|l| l.symbols.iter().map(|s| s.ascii()).collect::<Vec<_>>());
        ok &= syms.as_ref().is_ok_and(|s| s == &want);
        let _ = writeln!(text, "n={n} {comps:?} -> {:?}", got.map(|l| l.ascii()));
    }
    for (n, comps) in common::over_budget() {
        let got = classify_multigerm(&germ(&comps.join(";")), n).unwrap();
        ok &= matches!(got, Err(Reject::Budget { .. }));
        let _ = writeln!(text, "n={n} {comps:?} -> {:?}", got.map(|l| l.ascii()));
    }
    (ok, text)
}

#[test]
fn ac2_budget_bound() {
    let (ok, text) = ac2_report();
    let accepted = common::germ_lists().len();
    report(2, ok, "budget bound", &format!("{accepted} listed tuples accepted, 10 over-budget probes rejected"));
    assert!(ok, "{text}");
}

// ---- AC3 ----

fn ac3_report() -> (bool, String, Vec<String>) {
    let mut ok = true;
    let mut text = String::new();
    let mut failing = Vec::new();
    for (n, labels) in [(1usize, 5usize), (2, 15)] {
        let rep = verify_catalog(n).unwrap();
        ok &= rep.labels == labels && rep.labels_passed == labels && rep.all_pass();
        for r in rep.rows.iter().filter(|r| !r.pass) {
            failing.push(format!("{} {}", r.label_ascii, r.variant));
        }
        text.push_str(&rep.to_text());
    }
    (ok, text, failing)
}

#[test]
fn ac3_catalog_verification() {
    let start = Instant::now();
    let (ok, text, failing) = ac3_report();
    let dt = start.elapsed();
    // The same check through the command line.
    let mut cli_ok = true;
    for n in ["1", "2"] {
        let argv: Vec<String> = ["retic", "catalog", "--n", n, "--verify"].iter().map(|s| s.to_string()).collect();
        let (mut o, mut e) = (Vec::new(), Vec::new());
        cli_ok &= reticular::cli::run_with(&argv, &mut o, &mut e) == 0;
    }
    let pass = ok && cli_ok && dt < Duration::from_secs(60);
    let detail = if failing.is_empty() {
        format!("all entries pass, {:.2?}", dt)
    } else {
        format!("failing variants: {}; {:.2?}", failing.join(", "), dt)
    };
    report(3, pass, "catalog verification (n=1,2)", &detail);
    assert!(ok && cli_ok, "{text}");
    assert!(dt < Duration::from_secs(60), "{dt:?}");
}

// ---- AC4 ----

fn ac4_report() -> (bool, String) {
    let mut ok = true;
    let mut text = String::new();
    let mut check = |t: &str, l: u32| {
        let f = germ(t).comps()[0].clone();
        let at = is_rk_l_determined(&f, l).unwrap();
        let below = is_rk_l_determined(&f, l - 1).unwrap();
        ok &= at.sufficient && !below.necessary_jet && below.verdict == Determinacy::NotDetermined;
        let _ = writeln!(
            text,
            "{t}: l={l} sufficient={} | l={} necessary={} verdict={}",
            at.sufficient,
            l - 1,
            below.necessary_jet,
            below.verdict
        );
    };
    for k in 1..=4u32 {
        check(&format!("y^{}", k + 1), k + 1);
    }
    for k in 2..=3u32 {
        check(&format!("x^{k}"), k);
    }
    check("x*y + y^3", 3);
    check("-x*y + y^3", 3);
    (ok, text)
}

#[test]
fn ac4_determinacy_orders() {
    let (ok, text) = ac4_report();
    report(4, ok, "determinacy orders", "y^2..y^5, x^2, x^3, ±xy+y^3");
    assert!(ok, "{text}");
}

// ---- AC5 ----

#[test]
fn ac5_front_geometry() {
    let mut ok = true;
    let mut worst = Duration::ZERO;
    let mut notes = Vec::new();

    // ⁰(⁰A₁⁰B₂), n=2: the second front is {z = 0} ∪ {z = -q²/4, q ≤ 0} with q = q2, constant in q1.
    let e = entry(2, "0(0A1,0B2)", "0");
    let opts = TraceOptions::for_family(&e.family, vec![]);
    let start = Instant::now();
    let fr = &sweep(&e.family, &[0.0], &opts).unwrap()[0];
    worst = worst.max(start.elapsed());
    let b2 = &fr.components[1];
    let (mut nb, mut ni) = (0, 0);
    for p in b2.points() {
        let q = p.q[1];
        let good = match p.stratum {
            Stratum::Boundary => {
                nb += 1;
                p.z.abs() <= TOL_CLOSED
            }
            Stratum::Interior => {
                ni += 1;
                q <= TOL_CLOSED && (p.z + q * q / 4.0).abs() <= TOL_CLOSED
            }
        };
        ok &= good && p.closed_form;
    }
    // Both pieces are covered: the full boundary line and the interior parabola over q ≤ 0.
    ok &= nb == opts.grid * opts.grid && ni >= opts.grid * (opts.grid / 2);
    for p in fr.components[0].points() {
        ok &= (p.z - p.q[0]).abs() <= TOL_CLOSED;
    }
    notes.push(format!("B2 front {nb} boundary + {ni} interior points"));

    // A₂ cusp from ¹(⁰A₁⁰A₂) by continuation.
    let e = entry(1, "1(0A1,0A2)", "+");
    let opts = TraceOptions { force_numeric: true, ..TraceOptions::for_family(&e.family, vec![]) };
    for t in [-0.5, 0.5] {
        let start = Instant::now();
        let tr = trace_component(&e.family.comps()[1], 1, t, &opts).unwrap();
        worst = worst.max(start.elapsed());
        let mut worst_res: f64 = 0.0;
        let mut count = 0;
        for p in tr.points() {
            ok &= !p.closed_form;
            worst_res = worst_res.max((4.0 * p.q[0].powi(3) + 27.0 * p.z * p.z).abs());
            count += 1;
        }
        ok &= count > 0 && worst_res <= 1e-6;
        notes.push(format!("cusp t={t}: {count} pts, max |4q^3+27z^2| = {worst_res:.1e}"));
    }
    let pass = ok && worst < Duration::from_secs(2);
    report(5, pass, "closed-form and continued fronts", &format!("{}; slowest frame {:.2?}", notes.join("; "), worst));
    assert!(ok, "{notes:?}");
    assert!(worst < Duration::from_secs(2), "{worst:?}");
}

// ---- AC6 ----

/// A front branch as a graph `z = g(s)` over an interval of the free axis.
struct Graph {
    lo: f64,
    hi: f64,
    g: Box<dyn Fn(f64) -> f64>,
}

/// Sign changes of `g_a - g_b` on a dense grid over the shared interval.
fn dense_roots(a: &Graph, b: &Graph) -> usize {
    let (lo, hi) = (a.lo.max(b.lo), a.hi.min(b.hi));
    if lo >= hi {
        return 0;
    }
    let n = 400_000;
    let h = |s: f64| (a.g)(s) - (b.g)(s);
    let mut count = 0;
    let mut prev = h(lo);
    for i in 1..=n {
        let cur = h(lo + (hi - lo) * i as f64 / n as f64);
        if prev.signum() != cur.signum() {
            count += 1;
        }
        prev = cur;
    }
    count
}

fn oracle(first: &[Graph], second: &[Graph]) -> usize {
    first.iter().flat_map(|a| second.iter().map(move |b| dense_roots(a, b))).sum()
}

const B: f64 = 1.5;

fn graph(lo: f64, hi: f64, g: impl Fn(f64) -> f64 + 'static) -> Graph {
    Graph { lo, hi, g: Box::new(g) }
}

/// ¹(⁰A₁⁰A₂)+: line z = t + q against the cusp (q, z) = (-3a², -2a³), parametrised by a.
/// Substituting the cusp into the line gives 2a³ - 3a² + t; count its roots with |q| ≤ B.
fn oracle_a1a2(t: f64) -> usize {
    let amax = (B / 3.0).sqrt();
    let line = graph(-amax, amax, move |a| -3.0 * a * a + t);
    let cusp = graph(-amax, amax, |a| -2.0 * a.powi(3));
    dense_roots(&line, &cusp)
}

/// ¹(⁰A₁⁰A₁)+: z = t + q² against z = 0.
fn oracle_a1a1(t: f64) -> usize {
    oracle(&[graph(-B, B, move |q| t + q * q)], &[graph(-B, B, |_| 0.0)])
}

/// ¹(⁰B₂⁰B₂)+ on the slice q₂ = c: each front is a boundary line plus an interior parabola.
fn oracle_b2b2(t: f64, c: f64) -> usize {
    let f1 = [graph(-B, B, move |_| c), graph(-B, (-t).min(B), move |q| c - (t + q) * (t + q) / 4.0)];
    let f2 = [graph(-B, B, |_| 0.0), graph(-B, 0.0, |q| -q * q / 4.0)];
    oracle(&f1, &f2)
}

fn counts(fam: &Family, fixed: Vec<(String, f64)>, grid: usize) -> Vec<usize> {
    let opts = TraceOptions { grid, ..TraceOptions::for_family(fam, fixed) };
    sweep(fam, &[-0.5, 0.5], &opts).unwrap().iter().map(|f| f.events[0].count).collect()
}

/// (label, n, sign variant, slice, oracle).
type Case = (&'static str, usize, &'static str, Vec<(String, f64)>, Box<dyn Fn(f64) -> usize>);

#[test]
fn ac6_event_counting() {
    let cases: Vec<Case> = vec![
        ("1(0A1,0A2)", 1, "+", vec![], Box::new(oracle_a1a2)),
        ("1(0A1,0A1)", 1, "+", vec![], Box::new(oracle_a1a1)),
        ("1(0B2,0B2)", 2, "+", vec![("q2".into(), 0.1)], Box::new(|t| oracle_b2b2(t, 0.1))),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (label, n, variant, fixed, orc) in cases {
        let e = entry(n, label, variant);
        let base = TraceOptions::for_family(&e.family, fixed.clone()).grid;
        let c1 = counts(&e.family, fixed.clone(), base);
        let c2 = counts(&e.family, fixed, 2 * base - 1);
        let want = [orc(-0.5), orc(0.5)];
        let good = c1 == want && c2 == want && c1[0] != c1[1];
        ok &= good;
        notes.push(format!("{label}{variant}: {c1:?} (oracle {want:?}, doubled grid {c2:?})"));
    }
    report(6, ok, "bifurcation event counts at t=-0.5, +0.5", &notes.join("; "));
    assert!(ok, "{notes:?}");
}

// ---- AC7 ----

/// Component germs of every catalog base, plus the single-germ lists.
fn catalog_germs() -> Vec<Poly> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let from_lists = common::germ_lists().into_iter().flat_map(|(_, c, _)| c).map(|t| germ(t).comps()[0].clone());
    let from_catalog = [1, 2].into_iter().flat_map(|n| catalog(n).unwrap()).flat_map(|e| e.base.comps().to_vec());
    for p in from_lists.chain(from_catalog) {
        let key = p.to_string();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

fn single(p: &Poly) -> MultiGerm {
    MultiGerm::new(vec![p.clone()]).unwrap()
}

#[test]
fn ac7_equivariance() {
    let policy = JetPolicy { start: 3, cap: 7 };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    let germs = catalog_germs();
    let (mut changes, mut perturbs) = (0, 0);
    for f in &germs {
        let want_label = classify_component(f).unwrap().unwrap();
        let want_mu = codim_report_auto(&single(f), policy).unwrap().total;
        for _ in 0..20 {
            let g = common::random_change(f, 7, &mut rng);
            changes += 1;
            let label = classify_component(&g).unwrap();
            let mu = codim_report_auto(&single(&g), policy).unwrap().total;
            if label.as_ref().ok() != Some(&want_label) || mu != want_mu {
                failures.push(format!("{f} -> {g}: {label:?} mu={mu:?}"));
            }
        }
        let l = (1..=6).find(|&l| is_rk_l_determined(f, l).unwrap().verdict == Determinacy::Determined).unwrap();
        let want = codim_report_auto(&single(f), policy).unwrap();
        for _ in 0..10 {
            let g = f.add(&common::random_high_order(f.spec(), l, &mut rng));
            perturbs += 1;
            let rep = codim_report_auto(&single(&g), policy).unwrap();
            if rep != want {
                failures.push(format!("{f} + h.o.t. -> {g}: {rep:?}"));
            }
        }
    }
    let ok = failures.is_empty();
    report(
        7,
        ok,
        "equivariance",
        &format!(
            "{} germs, {changes} contact changes, {perturbs} perturbations, {} failures",
            germs.len(),
            failures.len()
        ),
    );
    assert!(ok, "{failures:#?}");
}

// ---- AC8 ----

#[test]
fn ac8_exact_reruns() {
    let run = || {
        let (_, a) = ac1_report();
        let (_, b) = ac2_report();
        let (_, c, _) = ac3_report();
        let (_, d) = ac4_report();
        [a, b, c, d]
    };
    let first = run();
    let second = run();
    let same: Vec<bool> = first.iter().zip(&second).map(|(a, b)| a == b).collect();
    let ok = same.iter().all(|&s| s);
    report(8, ok, "bit-identical reruns of criteria 1-4", &format!("{same:?}"));
    assert!(ok);
}
