//! `retic` command line.
//!
//! Exit codes: 0 success, 1 rejection or failed verification, 2 usage or input error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{classify_component, classify_multigerm, CatalogLabel, Sign};
use crate::front::{self, FrontFrame, Stratum, TraceOptions};
use crate::jetalg::{JetError, Role};
use crate::tangent::{
    codim_report, codim_report_auto, is_inf_stable, is_rk_l_determined, parse_components, pc_nondegeneracy,
    split_components, Family, JetPolicy, MultiGerm, TangentError,
};
use crate::unfold::{
    self, build_codim1, build_generating, catalog, export_json, export_text, verify_catalog, UnfoldError,
};

const GRAMMAR_HINT: &str = "germ grammar: expr := term (('+'|'-') term)*; term := unary ('*' unary)*; \
unary := ('+'|'-') unary | atom ['^' INT]; atom := INT ['/' INT] | VAR | '(' expr ')'; \
VAR := x1..x9 y1..y9 t q1..q9 u11..u99 z (x, y, q, u alone mean index 1); components separated by ';'";

#[derive(Parser, Debug)]
#[command(
    name = "retic",
    version,
    about = "Reticular multi-germs: codimension, determinacy, classification, unfoldings and fronts"
)]
struct Cli {
    /// Machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report, artifacts and manifest.toml into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct GermArgs {
    /// Multi-germ, components separated by ';'.
    #[arg(long, conflicts_with = "germ_file")]
    germ: Option<String>,
    /// File with one component per line ('#' starts a comment).
    #[arg(long, value_name = "FILE")]
    germ_file: Option<PathBuf>,
    /// Number of corner variables x1..xr (default: inferred).
    #[arg(long)]
    r: Option<usize>,
    /// Number of fiber variables y1..yk (default: inferred).
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// mu vector and quotient bases phi.
    Codim {
        #[command(flatten)]
        germ: GermArgs,
        /// Fixed jet order (default: automatic up to the cap).
        #[arg(long)]
        order: Option<u32>,
        /// Parameter count; sets the jet cap n+5.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Determinacy verdicts per order up to the cap.
    Determine {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Catalog label or rejection reason.
    Classify {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(long)]
        n: usize,
    },
    /// Generating family for a multi-germ, with verification.
    Unfold {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(long)]
        n: usize,
        /// Signs of the codimension-one form, e.g. "+-" (default: all '+', then the first stable choice).
        #[arg(long)]
        signs: Option<String>,
    },
    /// Catalog table, optionally verified.
    Catalog {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Trace and render fronts over a t-sweep.
    Front {
        /// Catalog label, e.g. "1(0A1,0A2)" or "1_A1_A2".
        #[arg(long, conflicts_with = "expr")]
        family: Option<String>,
        /// Family expressions F_i(x, y, t, q, z), separated by ';'.
        #[arg(long)]
        expr: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Sign variant of a catalog family, e.g. "+-".
        #[arg(long)]
        signs: Option<String>,
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, default_value_t = 3)]
        frames: usize,
        /// Samples per free axis (default 801 for curves, 101 for surfaces).
        #[arg(long)]
        grid: Option<usize>,
        /// Half-width of the parameter box.
        #[arg(long = "box", default_value_t = front::DEFAULT_HALF_WIDTH)]
        half_width: f64,
        /// Fix a parameter, e.g. "q2=0.1".
        #[arg(long)]
        slice: Option<String>,
    },
}

/// Fully resolved configuration, echoed in every report and manifest.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub germ: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub germ_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Resolved (r, k) per component.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    pub jet_start: u32,
    pub jet_cap: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<String>,
    pub json: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    /// Command line reproducing this run with every default spelled out.
    pub fn argv(&self) -> Vec<String> {
        let mut a = vec!["retic".to_string(), self.subcommand.clone()];
        let mut push = |k: &str, v: String| {
            a.push(format!("--{k}"));
            a.push(v);
        };
        if let Some(g) = &self.germ_file {
            push("germ-file", g.clone());
        } else if let Some(g) = &self.germ {
            push("germ", g.join("; "));
        }
        if let Some(v) = self.r {
            push("r", v.to_string());
        }
        if let Some(v) = self.k {
            push("k", v.to_string());
        }
        if let Some(v) = &self.family {
            push("family", v.clone());
        }
        if let Some(v) = &self.expr {
            push("expr", v.join("; "));
        }
        if let Some(v) = self.n {
            push("n", v.to_string());
        }
        if let Some(v) = &self.order {
            if v != "auto" {
                push("order", v.clone());
            }
        }
        if let Some(v) = &self.signs {
            push("signs", v.clone());
        }
        if let Some(v) = &self.format {
            push("format", v.clone());
        }
        if let Some(v) = self.t_min {
            push("t-min", v.to_string());
        }
        if let Some(v) = self.t_max {
            push("t-max", v.to_string());
        }
        if let Some(v) = self.frames {
            push("frames", v.to_string());
        }
        if let Some(v) = self.grid {
            push("grid", v.to_string());
        }
        if let Some(v) = self.half_width {
            push("box", v.to_string());
        }
        if let Some(v) = &self.slice {
            push("slice", v.clone());
        }
        if let Some(v) = &self.out {
            push("out", v.clone());
        }
        if self.verify == Some(true) {
            a.push("--verify".into());
        }
        if self.json {
            a.push("--json".into());
        }
        a
    }

    fn header(&self) -> String {
        let quoted: Vec<String> = self
            .argv()
            .into_iter()
            .map(|s| if s.chars().any(|c| c.is_whitespace() || "*;()^".contains(c)) { format!("'{s}'") } else { s })
            .collect();
        let dims = match &self.dims {
            Some(d) => {
                format!("  [(r,k) = {}]", d.iter().map(|(r, k)| format!("({r},{k})")).collect::<Vec<_>>().join(" "))
            }
            None => String::new(),
        };
        format!("# {}  [jet orders {}..{}]{dims}\n", quoted.join(" "), self.jet_start, self.jet_cap)
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

impl From<TangentError> for CliError {
    fn from(e: TangentError) -> Self {
        match e {
            TangentError::Jet(j @ (JetError::Syntax { .. } | JetError::UnknownVar(_))) => {
                CliError::Usage(format!("{j}\n{GRAMMAR_HINT}"))
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<UnfoldError> for CliError {
    fn from(e: UnfoldError) -> Self {
        match e {
            UnfoldError::Tangent(t) => t.into(),
            UnfoldError::Signs { .. } | UnfoldError::UnsupportedN(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<front::FrontError> for CliError {
    fn from(e: front::FrontError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("i/o: {e}"))
    }
}

struct Outcome {
    text: String,
    result: Value,
    code: i32,
    /// Extra files written into `--out` (file name, contents).
    files: Vec<(String, String)>,
    /// Files already written by the command itself.
    written: Vec<String>,
    summary: Option<Value>,
}

impl Outcome {
    fn new(text: String, result: Value, code: i32) -> Self {
        Outcome { text, result, code, files: Vec::new(), written: Vec::new(), summary: None }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: Vec<String>,
    exit_code: i32,
    config: &'a RunConfig,
    outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<toml::Value>,
}

fn read_germ(g: &GermArgs) -> Result<Vec<String>, CliError> {
    let texts: Vec<String> = match (&g.germ, &g.germ_file) {
        (Some(s), _) => split_components(s).into_iter().map(str::to_string).collect(),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
            .filter(|l| !l.is_empty())
            .collect(),
        (None, None) => {
            return Err(CliError::Usage(format!("one of --germ or --germ-file is required\n{GRAMMAR_HINT}")))
        }
    };
    if texts.is_empty() {
        return Err(CliError::Usage(format!("empty multi-germ\n{GRAMMAR_HINT}")));
    }
    Ok(texts)
}

fn parse_germ(g: &GermArgs, texts: &[String]) -> Result<MultiGerm, CliError> {
    let rk = match (g.r, g.k) {
        (None, None) => None,
        (r, k) => {
            let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
            let inferred = crate::jetalg::infer_spec(&refs, &[]).map_err(TangentError::from)?;
            Some((r.unwrap_or(inferred.r()), k.unwrap_or(inferred.k())))
        }
    };
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    Ok(MultiGerm::new(parse_components(&refs, &[], rk)?)?)
}

fn germ_config(cfg: &mut RunConfig, g: &GermArgs, texts: &[String], germ: &MultiGerm) {
    cfg.germ = Some(texts.to_vec());
    cfg.germ_file = g.germ_file.as_ref().map(|p| p.display().to_string());
    cfg.r = g.r;
    cfg.k = g.k;
    cfg.dims = Some(germ.comps().iter().map(|c| (c.spec().r(), c.spec().k())).collect());
}

fn parse_signs(s: &str) -> Result<Vec<Sign>, CliError> {
    if s == "0" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| match c {
            '+' | 'p' => Ok(Sign::Plus),
            '-' | 'm' => Ok(Sign::Minus),
            _ => Err(CliError::Usage(format!("bad sign '{c}' in --signs (use '+' and '-')"))),
        })
        .collect()
}

fn signs_string(s: &[Sign]) -> String {
    if s.is_empty() {
        "0".into()
    } else {
        s.iter().map(|x| x.ascii()).collect()
    }
}

fn cmd_codim(cfg: &mut RunConfig, g: &GermArgs, order: Option<u32>, n: usize) -> Result<Outcome, CliError> {
    let texts = read_germ(g)?;
    let germ = parse_germ(g, &texts)?;
    germ_config(cfg, g, &texts, &germ);
    cfg.n = Some(n);
    cfg.order = Some(order.map_or("auto".into(), |l| l.to_string()));
    let rep = match order {
        Some(l) => codim_report(&germ, l)?,
        None => codim_report_auto(&germ, JetPolicy::for_n(n))?,
    };
    let mut text = String::new();
    for (i, c) in germ.comps().iter().enumerate() {
        let _ = writeln!(text, "f_{} = {c}", i + 1);
    }
    text.push_str(&rep.to_string());
    Ok(Outcome::new(text, serde_json::to_value(&rep).expect("plain data"), 0))
}

fn cmd_determine(cfg: &mut RunConfig, g: &GermArgs, n: usize) -> Result<Outcome, CliError> {
    let texts = read_germ(g)?;
    let germ = parse_germ(g, &texts)?;
    germ_config(cfg, g, &texts, &germ);
    cfg.n = Some(n);
    let policy = JetPolicy::for_n(n);
    let mut text = String::new();
    let mut comps = Vec::new();
    for (i, c) in germ.comps().iter().enumerate() {
        let _ = writeln!(text, "f_{} = {c}", i + 1);
        let mut rows = Vec::new();
        let mut first = None;
        for l in 1..=policy.cap {
            let r = is_rk_l_determined(c, l)?;
            let _ = writeln!(
                text,
                "  l={l}: sufficient={} necessary={} necessary(jet)={} determined={}",
                r.sufficient, r.necessary, r.necessary_jet, r.verdict
            );
            if first.is_none() && r.verdict == crate::tangent::Determinacy::Determined {
                first = Some(l);
            }
            rows.push(r);
        }
        match first {
            Some(l) => {
                let _ = writeln!(text, "  determinacy order: {l}");
            }
            None => {
                let _ = writeln!(text, "  determinacy order: not established up to {}", policy.cap);
            }
        }
        comps.push(json!({"component": i + 1, "germ": c.to_string(), "orders": rows, "determinacy_order": first}));
    }
    Ok(Outcome::new(text, Value::Array(comps), 0))
}

fn cmd_classify(cfg: &mut RunConfig, g: &GermArgs, n: usize) -> Result<Outcome, CliError> {
    let texts = read_germ(g)?;
    let germ = parse_germ(g, &texts)?;
    germ_config(cfg, g, &texts, &germ);
    cfg.n = Some(n);
    let mut per = Vec::new();
    for c in germ.comps() {
        per.push(match classify_component(c)? {
            Ok(s) => s.unicode(),
            Err(e) => format!("out of catalog ({e})"),
        });
    }
    Ok(match classify_multigerm(&germ, n)? {
        Ok(label) => {
            let text = format!("{label}\nascii: {}\ncomponents: {}\n", label.ascii(), per.join(", "));
            let v = json!({"accepted": true, "label": label.to_string(), "ascii": label.ascii(), "components": per});
            Outcome::new(text, v, 0)
        }
        Err(reject) => {
            let text = format!("Reject: {reject}\ncomponents: {}\n", per.join(", "));
            let v = json!({"accepted": false, "reject": reject.to_string(), "reason": reject, "components": per});
            Outcome::new(text, v, 1)
        }
    })
}

fn cmd_unfold(cfg: &mut RunConfig, g: &GermArgs, n: usize, signs: Option<&str>) -> Result<Outcome, CliError> {
    let texts = read_germ(g)?;
    let germ = parse_germ(g, &texts)?;
    germ_config(cfg, g, &texts, &germ);
    cfg.n = Some(n);
    let signs = signs.map(parse_signs).transpose()?;
    let label = match classify_multigerm(&germ, n)? {
        Ok(l) => l,
        Err(reject) => {
            let v = json!({"accepted": false, "reject": reject.to_string()});
            return Ok(Outcome::new(format!("Reject: {reject}\n"), v, 1));
        }
    };
    let fam = match build_generating(&germ, n, signs.as_deref()) {
        Ok(f) => f,
        Err(UnfoldError::Verification { order, witness }) => {
            let text = format!("{label}\nverification failed at order {order}; missing direction {witness}\n");
            let v = json!({"label": label.to_string(), "stable": false, "order": order, "witness": witness});
            return Ok(Outcome::new(text, v, 1));
        }
        Err(e) => return Err(e.into()),
    };
    let used_signs = if label.mu_total() == n + 2 || signs.as_ref().is_some_and(|s| !s.is_empty()) {
        let k = unfold::codim1_sign_count(&germ, n)?;
        unfold::sign_vectors(k).into_iter().find(|s| build_codim1(&germ, n, s).is_ok_and(|f| f == fam))
    } else {
        None
    };
    cfg.signs = used_signs.as_ref().map(|s| signs_string(s));
    let stable = is_inf_stable(&fam, JetPolicy::for_n(n))?;
    let nondeg = pc_nondegeneracy(&fam);
    let exprs: Vec<String> = fam.comps().iter().map(|c| c.to_string()).collect();
    let mut text = format!("{label}\nfamily: {}\n", exprs.join("; "));
    if let Some(s) = &used_signs {
        let _ = writeln!(text, "signs: {}", signs_string(s));
    }
    let _ = writeln!(text, "stable: {} (orders {:?})", stable.holds, stable.trail);
    let _ =
        writeln!(text, "P-C non-degenerate: {}", if nondeg.is_empty() { "yes".to_string() } else { nondeg.join("; ") });
    let ok = stable.holds && nondeg.is_empty();
    let v = json!({"label": label.to_string(), "ascii": label.ascii(), "family": exprs, "signs": cfg.signs, "stable": stable, "nondegeneracy": nondeg});
    Ok(Outcome::new(text, v, if ok { 0 } else { 1 }))
}

fn cmd_catalog(
    cfg: &mut RunConfig,
    n: usize,
    verify: bool,
    format: Format,
    json_out: bool,
) -> Result<Outcome, CliError> {
    cfg.n = Some(n);
    cfg.verify = Some(verify);
    let format = if json_out { Format::Json } else { format };
    cfg.format = Some(if format == Format::Json { "json" } else { "text" }.into());
    let entries = catalog(n)?;
    if verify {
        let rep = verify_catalog(n)?;
        let code = if rep.all_pass() { 0 } else { 1 };
        let mut o = Outcome::new(rep.to_text(), serde_json::to_value(&rep).expect("plain data"), code);
        o.files.push((format!("catalog_n{n}.tsv"), export_text(&entries)));
        return Ok(o);
    }
    let text = export_text(&entries);
    let value: Value = serde_json::from_str(&export_json(&entries)).expect("own output");
    let mut o = Outcome::new(text.clone(), value, 0);
    o.files.push((format!("catalog_n{n}.tsv"), text));
    o.files.push((format!("catalog_n{n}.json"), export_json(&entries)));
    Ok(o)
}

fn find_catalog_family(name: &str, n: Option<usize>, signs: Option<&str>) -> Result<unfold::CatalogEntry, CliError> {
    let ns: Vec<usize> = n.map_or(vec![1, 2], |v| vec![v]);
    let mut hits = Vec::new();
    for nn in ns {
        let wanted = CatalogLabel::parse(name, nn);
        for e in catalog(nn)? {
            let sym_match = wanted.as_ref().is_some_and(|w| w.prefix == e.label.prefix && w.symbols == e.label.symbols);
            let c3_loose = wanted.as_ref().is_some_and(|w| {
                w.prefix == e.label.prefix
                    && w.symbols.len() == e.label.symbols.len()
                    && w.symbols.iter().zip(&e.label.symbols).all(|(a, b)| {
                        a == b
                            || matches!((a, b), (crate::classify::Symbol::C(3, None), crate::classify::Symbol::C(3, _)))
                    })
            });
            if e.label.ascii() == name || e.label.slug() == name || sym_match || c3_loose {
                hits.push(e);
            }
        }
    }
    let labels: std::collections::BTreeSet<(usize, String)> =
        hits.iter().map(|e| (e.label.n, e.label.ascii())).collect();
    let ns_found: std::collections::BTreeSet<usize> = labels.iter().map(|(n, _)| *n).collect();
    if hits.is_empty() {
        return Err(CliError::Usage(format!("no catalog family named {name}")));
    }
    if ns_found.len() > 1 {
        return Err(CliError::Usage(format!("{name} exists for n = 1 and n = 2; pass --n")));
    }
    let wanted = match signs {
        Some(s) => signs_string(&parse_signs(s)?),
        None => {
            // All '+' (or the only variant).
            let e = &hits[0];
            signs_string(&vec![Sign::Plus; e.signs.len()])
        }
    };
    hits.into_iter()
        .find(|e| e.variant() == wanted)
        .ok_or_else(|| CliError::Usage(format!("{name} has no sign variant {wanted}")))
}

#[derive(Serialize)]
struct ComponentSummary {
    component: usize,
    interior_points: usize,
    boundary_points: usize,
    truncated: usize,
}

#[derive(Serialize)]
struct EventSummary {
    pair: String,
    count: usize,
    degenerate: bool,
    unreliable: bool,
}

#[derive(Serialize)]
struct FrameSummary {
    index: usize,
    t: f64,
    svg: String,
    csv: String,
    unreliable: bool,
    components: Vec<ComponentSummary>,
    events: Vec<EventSummary>,
}

fn frame_summary(k: usize, stem: &str, f: &FrontFrame) -> FrameSummary {
    FrameSummary {
        index: k,
        t: f.t,
        svg: format!("{stem}_t{k}.svg"),
        csv: format!("{stem}_t{k}.csv"),
        unreliable: f.unreliable,
        components: f
            .components
            .iter()
            .map(|c| ComponentSummary {
                component: c.component + 1,
                interior_points: c.stratum_count(Stratum::Interior),
                boundary_points: c.stratum_count(Stratum::Boundary),
                truncated: c.truncated,
            })
            .collect(),
        events: f
            .events
            .iter()
            .map(|e| EventSummary {
                pair: format!("{}-{}", e.i + 1, e.j + 1),
                count: e.count,
                degenerate: e.degenerate,
                unreliable: e.unreliable,
            })
            .collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_front(
    cfg: &mut RunConfig,
    family: Option<&str>,
    expr: Option<&str>,
    n: Option<usize>,
    signs: Option<&str>,
    t_min: f64,
    t_max: f64,
    frames: usize,
    grid: Option<usize>,
    half_width: f64,
    slice: Option<&str>,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let out = out.ok_or_else(|| CliError::Usage("front needs --out DIR".into()))?;
    if frames == 0 {
        return Err(CliError::Usage("--frames must be at least 1".into()));
    }
    if !half_width.is_finite() || half_width <= 0.0 {
        return Err(CliError::Usage("--box must be positive".into()));
    }
    let (fam, label, stem) = match (family, expr) {
        (Some(name), None) => {
            let e = find_catalog_family(name, n, signs)?;
            cfg.family = Some(e.label.ascii());
            cfg.signs = Some(e.variant());
            let stem = format!("{}_{}", e.label.slug(), e.variant_slug());
            (e.family.clone(), e.label.to_string(), stem)
        }
        (None, Some(text)) => {
            let comps: Vec<&str> = split_components(text);
            let inferred = crate::jetalg::infer_spec(&comps, &[]).map_err(TangentError::from)?;
            let nq = n.unwrap_or_else(|| inferred.count(Role::Param).max(1));
            let fam = Family::parse_generating(&comps, nq)?;
            cfg.expr = Some(fam.comps().iter().map(|c| c.to_string()).collect());
            (fam, "F".to_string(), "family".to_string())
        }
        _ => return Err(CliError::Usage("front needs exactly one of --family or --expr".into())),
    };
    cfg.n = Some(fam.n());
    let fixed = match slice {
        None => Vec::new(),
        Some(s) => {
            let (name, v) =
                s.split_once('=').ok_or_else(|| CliError::Usage(format!("--slice expects NAME=VALUE, got {s}")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("bad slice value in {s}")))?;
            vec![(name.trim().to_string(), v)]
        }
    };
    let mut opts = TraceOptions::for_family(&fam, fixed);
    if let Some(g) = grid {
        if g < 2 {
            return Err(CliError::Usage("--grid must be at least 2".into()));
        }
        opts.grid = g;
    }
    opts.half_width = half_width;
    cfg.t_min = Some(t_min);
    cfg.t_max = Some(t_max);
    cfg.frames = Some(frames);
    cfg.grid = Some(opts.grid);
    cfg.half_width = Some(half_width);
    cfg.slice = slice.map(str::to_string);
    let nondeg = pc_nondegeneracy(&fam);
    let ts = front::t_values(t_min, t_max, frames);
    let result = front::sweep(&fam, &ts, &opts)?;
    let written = front::render(&result, &stem, &label, out)?;
    let summaries: Vec<FrameSummary> = result.iter().enumerate().map(|(k, f)| frame_summary(k, &stem, f)).collect();
    let mut text =
        format!("{label}  family: {}\n", fam.comps().iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; "));
    if !nondeg.is_empty() {
        let _ = writeln!(text, "warning: P-C non-degeneracy: {}", nondeg.join("; "));
    }
    for s in &summaries {
        let pts: Vec<String> = s
            .components
            .iter()
            .map(|c| {
                format!("F{}: {}+{} pts ({} truncated)", c.component, c.interior_points, c.boundary_points, c.truncated)
            })
            .collect();
        let ev: Vec<String> = s
            .events
            .iter()
            .map(|e| {
                let note = if e.unreliable {
                    " (at bifurcation \u{2014} unreliable)"
                } else if e.degenerate {
                    " (degenerate)"
                } else {
                    ""
                };
                format!("{}: {}{note}", e.pair, e.count)
            })
            .collect();
        let _ = writeln!(
            text,
            "t[{}] = {}  {}  crossings {}",
            s.index,
            s.t,
            pts.join(", "),
            if ev.is_empty() { "-".into() } else { ev.join(", ") }
        );
    }
    let value = serde_json::to_value(&summaries).expect("plain data");
    let mut o = Outcome::new(text, json!({"label": label, "frames": value}), 0);
    o.written = written.iter().filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())).collect();
    o.summary = Some(json!({ "frames": serde_json::to_value(&summaries).expect("plain data") }));
    Ok(o)
}

fn json_to_toml(v: &Value) -> Option<toml::Value> {
    Some(match v {
        Value::Null => return None,
        Value::Bool(b) => toml::Value::Boolean(*b),
        Value::Number(n) => {
            n.as_i64().map(toml::Value::Integer).unwrap_or_else(|| toml::Value::Float(n.as_f64().unwrap_or(0.0)))
        }
        Value::String(s) => toml::Value::String(s.clone()),
        Value::Array(a) => toml::Value::Array(a.iter().filter_map(json_to_toml).collect()),
        Value::Object(o) => {
            toml::Value::Table(o.iter().filter_map(|(k, v)| json_to_toml(v).map(|t| (k.clone(), t))).collect())
        }
    })
}

fn execute(cli: &Cli, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    match &cli.cmd {
        Cmd::Codim { germ, order, n } => cmd_codim(cfg, germ, *order, *n),
        Cmd::Determine { germ, n } => cmd_determine(cfg, germ, *n),
        Cmd::Classify { germ, n } => cmd_classify(cfg, germ, *n),
        Cmd::Unfold { germ, n, signs } => cmd_unfold(cfg, germ, *n, signs.as_deref()),
        Cmd::Catalog { n, verify, format } => cmd_catalog(cfg, *n, *verify, *format, cli.json),
        Cmd::Front { family, expr, n, signs, t_min, t_max, frames, grid, half_width, slice } => cmd_front(
            cfg,
            family.as_deref(),
            expr.as_deref(),
            *n,
            signs.as_deref(),
            *t_min,
            *t_max,
            *frames,
            *grid,
            *half_width,
            slice.as_deref(),
            cli.out.as_deref(),
        ),
    }
}

fn subcommand_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Codim { .. } => "codim",
        Cmd::Determine { .. } => "determine",
        Cmd::Classify { .. } => "classify",
        Cmd::Unfold { .. } => "unfold",
        Cmd::Catalog { .. } => "catalog",
        Cmd::Front { .. } => "front",
    }
}

fn n_of(c: &Cmd) -> Option<usize> {
    match c {
        Cmd::Codim { n, .. }
        | Cmd::Determine { n, .. }
        | Cmd::Classify { n, .. }
        | Cmd::Unfold { n, .. }
        | Cmd::Catalog { n, .. } => Some(*n),
        Cmd::Front { n, .. } => *n,
    }
}

/// Runs with explicit output streams; returns the exit code.
pub fn run_with(argv: &[String], out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}\n{GRAMMAR_HINT}\n") };
            return code;
        }
    };
    let policy = JetPolicy::for_n(n_of(&cli.cmd).unwrap_or(2));
    let mut cfg = RunConfig {
        subcommand: subcommand_name(&cli.cmd).into(),
        jet_start: policy.start,
        jet_cap: policy.cap,
        json: cli.json,
        out: cli.out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    };
    let outcome = match execute(&cli, &mut cfg) {
        Ok(o) => o,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            return 2;
        }
        Err(CliError::Failed(m)) => {
            let _ = writeln!(err, "error: {m}");
            return 1;
        }
    };
    let report = if cli.json {
        let v = json!({"config": &cfg, "exit_code": outcome.code, "result": &outcome.result});
        serde_json::to_string_pretty(&v).expect("plain data") + "\n"
    } else {
        format!("{}{}", cfg.header(), outcome.text)
    };
    let _ = out.write_all(report.as_bytes());
    if let Some(dir) = &cli.out {
        if let Err(e) = write_outputs(dir, &cfg, &outcome, &report, cli.json) {
            let _ = writeln!(err, "error: i/o: {e}");
            return 1;
        }
    }
    outcome.code
}

fn write_outputs(dir: &Path, cfg: &RunConfig, o: &Outcome, report: &str, json_out: bool) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut outputs = o.written.clone();
    let report_name = if json_out { "report.json" } else { "report.txt" };
    std::fs::write(dir.join(report_name), report)?;
    outputs.push(report_name.into());
    for (name, body) in &o.files {
        std::fs::write(dir.join(name), body)?;
        outputs.push(name.clone());
    }
    let manifest = Manifest {
        tool: "retic",
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.argv(),
        exit_code: o.code,
        config: cfg,
        outputs,
        summary: o.summary.as_ref().and_then(json_to_toml),
    };
    let text = toml::to_string_pretty(&manifest).map_err(|e| std::io::Error::other(e.to_string()))?;
    std::fs::write(dir.join("manifest.toml"), text)
}

/// Entry point used by the `retic` binary.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(argv, &mut out, &mut err);
    let _ = out.flush();
    code
}
