//! Command-line surface. Every command prints one JSON document on stdout;
//! the exit code is 0 on success, 1 for a definitive negative answer
//! (infeasible, exhausted, inequivalent, false) and 2 for usage, parse or
//! precondition errors. Schemas live in `schemas/` next to this crate.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::contact::{mather_complement, verify_equivalence_witness, ContactElement, PolyMatrix};
use crate::derlog::{
    inseparability_certificate, log_derivation_system, solvable_directions, solve_log_derivation, split_smooth_factors,
    straighten_and_split, InfeasibilityProof, LogDerResult,
};
use crate::hs::{hs_search, hs_verify, HsDerivation, HsOutcome, SearchMode};
use crate::isoscan::{
    classify, default_beta, enumerate_points, equiv_check, parse_rational, Domain, Refutation, ScanReport, Tier,
    Verdict, DEFAULT_DOMAIN_CAP,
};
use crate::linalg::{Matrix, Subspace};
use crate::parse::{expanded_degree, identifiers, parse_poly, parse_scalar};
use crate::scalar::{Field, Scalar};
use crate::tangent::{fingerprint, orbit_tangent_space, quartic_j_invariant, quartic_roots, tangent_complement, tangent_cone};
use crate::trunc::{default_names, PolySystem, Ring, TruncPoly};

#[derive(Parser, Debug)]
#[command(name = "isosing", version, about = "Exact jet-level contact geometry of singularities")]
pub struct Cli {
    #[command(flatten)]
    pub ring: RingArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RingArgs {
    /// Q, Fp, Fq (e.g. F9) or Fp[modulus in g] (e.g. F2[g^3+g+1]).
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,
    /// Number of variables or a comma-separated list of names; inferred from
    /// the input when omitted.
    #[arg(long, global = true)]
    pub vars: Option<String>,
    /// Truncation order; defaults to twice the degree of the input system.
    #[arg(long, global = true)]
    pub beta: Option<usize>,
    /// Drop terms above beta instead of rejecting them.
    #[arg(long, global = true)]
    pub truncate: bool,
    /// Also write the JSON output to this file.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Recorded in the output for reproduction; no command draws random numbers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical form of an element with order, unit test and inverse.
    RingEval {
        expr: String,
        /// Substitute `x_j -> map_j` (comma-separated images, no constant terms).
        #[arg(long)]
        map: Option<String>,
        /// Differentiate with respect to this variable.
        #[arg(long)]
        diff: Option<String>,
        /// Taylor shift to this point.
        #[arg(long)]
        at: Option<String>,
    },
    /// Apply a contact element to a system.
    Act {
        system: Vec<String>,
        /// JSON {"M": [[..]], "phi": [..]} or @file.
        #[arg(long)]
        element: String,
    },
    /// Inverse of a contact element.
    Invert {
        #[arg(long)]
        element: String,
    },
    /// Mather's complement C and D = C(1-AB)+B for square A, B.
    Mather {
        /// Rows separated by `;`, entries by `,`.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Contact equivalence of two jets (or of one system at two points).
    EquivCheck {
        system: Vec<String>,
        /// Second system; defaults to the first.
        #[arg(long = "other", num_args = 1..)]
        other: Vec<String>,
        /// Base point of the first jet.
        #[arg(long)]
        from: Option<String>,
        /// Base point of the second jet.
        #[arg(long)]
        to: Option<String>,
        #[arg(long)]
        element: Option<String>,
    },
    /// Orbit tangent space dimension and a monomial complement.
    OrbitTangent {
        system: Vec<String>,
        #[arg(long)]
        at: Option<String>,
    },
    /// Contact fingerprint of the jet.
    Fingerprint {
        system: Vec<String>,
        #[arg(long)]
        at: Option<String>,
    },
    /// j-invariant of a binary quartic tangent cone.
    Jinv {
        expr: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Solve for a logarithmic derivation with prescribed value at 0.
    LogDer {
        system: Vec<String>,
        #[arg(long)]
        direction: String,
        #[arg(long)]
        beta_work: Option<usize>,
    },
    /// Subspace of directions admitting a logarithmic derivation.
    SolvableDirs {
        system: Vec<String>,
        #[arg(long)]
        beta_work: Option<usize>,
    },
    /// Witness plus infeasibility proof along the direction of a point.
    InsepCert {
        system: Vec<String>,
        #[arg(long)]
        at: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        beta_work: Option<usize>,
    },
    /// Straighten a regular derivation and split off smooth factors (char 0).
    Split {
        system: Vec<String>,
        /// Split along the derivation found for this direction only.
        #[arg(long)]
        direction: Option<String>,
        #[arg(long)]
        beta_work: Option<usize>,
    },
    /// Exhaustive search for a tangent Hasse-Schmidt derivation.
    HsSearch {
        system: Vec<String>,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        beta_work: Option<usize>,
        #[arg(long, value_enum, default_value = "regular")]
        mode: ModeArg,
    },
    /// Check a Hasse-Schmidt derivation given level by level.
    HsVerify {
        system: Vec<String>,
        /// Images d_i(x_1),..,d_i(x_N) of one level; repeat for each level.
        #[arg(long = "level", required = true)]
        levels: Vec<String>,
        #[arg(long)]
        beta_work: Option<usize>,
    },
    /// Enumerate and classify the points of V(f).
    IsoScan {
        system: Vec<String>,
        /// Rational box `lo..hi` (required over Q).
        #[arg(long = "box")]
        bounds: Option<String>,
        #[arg(long, default_value_t = 1)]
        max_den: u64,
        #[arg(long, default_value_t = DEFAULT_DOMAIN_CAP)]
        cap: u64,
    },
    /// Scripted worked examples.
    Demo { name: DemoName },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Any,
    Regular,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemoName {
    WhitneyCharP,
    CuspDeformation,
    CrossRatio,
}

/// JSON body plus exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub code: i32,
    pub body: Value,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report { code: 0, body }
    }

    fn negative_if(negative: bool, body: Value) -> Self {
        Report { code: if negative { 1 } else { 0 }, body }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and prints.
/// Returns the process exit code.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (code, text) = render(&cli);
    // a closed pipe downstream is not an error of the computation
    let _ = writeln!(std::io::stdout(), "{text}");
    if let Some(path) = &cli.ring.json {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("cannot write {}: {e}", path.display());
            return 2;
        }
    }
    code
}

/// Runs a parsed command and renders the pretty-printed JSON document.
pub fn render(cli: &Cli) -> (i32, String) {
    let (code, body) = match execute(cli) {
        Ok(report) => (report.code, report.body),
        Err(CliError(message)) => (2, json!({ "error": message })),
    };
    let mut doc = json!({ "command": command_name(&cli.command) });
    if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
        doc.extend(body);
        if let Some(seed) = cli.ring.seed {
            doc.insert("seed".into(), json!(seed));
        }
        doc.insert("exit_code".into(), json!(code));
    }
    (code, serde_json::to_string_pretty(&doc).expect("json values serialize"))
}

/// Convenience for tests and examples: parse and run without printing.
pub fn run<I, T>(args: I) -> (i32, Value)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => {
            let (code, text) = render(&cli);
            (code, serde_json::from_str(&text).expect("rendered json"))
        }
        Err(e) => (if e.use_stderr() { 2 } else { 0 }, json!({ "error": e.to_string() })),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::RingEval { .. } => "ring-eval",
        Command::Act { .. } => "act",
        Command::Invert { .. } => "invert",
        Command::Mather { .. } => "mather",
        Command::EquivCheck { .. } => "equiv-check",
        Command::OrbitTangent { .. } => "orbit-tangent",
        Command::Fingerprint { .. } => "fingerprint",
        Command::Jinv { .. } => "jinv",
        Command::LogDer { .. } => "log-der",
        Command::SolvableDirs { .. } => "solvable-dirs",
        Command::InsepCert { .. } => "insep-cert",
        Command::Split { .. } => "split",
        Command::HsSearch { .. } => "hs-search",
        Command::HsVerify { .. } => "hs-verify",
        Command::IsoScan { .. } => "iso-scan",
        Command::Demo { .. } => "demo",
    }
}

/// Reads `@path` arguments; anything else is returned as is.
fn resolve(text: &str) -> CliResult<String> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError(format!("cannot read {path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

/// Expression strings of a system; `@file` may hold a JSON string or array.
fn system_exprs(args: &[String]) -> CliResult<Vec<String>> {
    let mut out = Vec::new();
    for a in args {
        if a.starts_with('@') {
            match serde_json::from_str::<Value>(&resolve(a)?)? {
                Value::String(s) => out.push(s),
                Value::Array(items) => {
                    for item in items {
                        out.push(item.as_str().ok_or_else(|| CliError("system file entries must be strings".into()))?.to_string());
                    }
                }
                _ => return Err(CliError("system file must hold a string or an array of strings".into())),
            }
        } else {
            out.push(a.clone());
        }
    }
    if out.is_empty() {
        return Err(CliError("no polynomial given".into()));
    }
    Ok(out)
}

/// Comma-separated items with optional surrounding parentheses.
fn split_list(text: &str) -> Vec<String> {
    let t = text.trim();
    let t = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
    t.split(',').map(|s| s.trim().to_string()).collect()
}

struct Element {
    m: Vec<Vec<String>>,
    phi: Vec<String>,
}

fn element_exprs(text: &str) -> CliResult<Element> {
    let v: Value = serde_json::from_str(&resolve(text)?)?;
    let strings = |v: &Value| -> CliResult<Vec<String>> {
        v.as_array()
            .ok_or_else(|| CliError("expected an array".into()))?
            .iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| CliError("expected a string".into())))
            .collect()
    };
    let m = v.get("M").ok_or_else(|| CliError("element needs an \"M\" entry".into()))?;
    let m = m.as_array().ok_or_else(|| CliError("\"M\" must be an array of rows".into()))?.iter().map(strings).collect::<CliResult<_>>()?;
    let phi = strings(v.get("phi").ok_or_else(|| CliError("element needs a \"phi\" entry".into()))?)?;
    Ok(Element { m, phi })
}

fn element_strings(e: &Element) -> Vec<String> {
    e.m.iter().flatten().chain(&e.phi).cloned().collect()
}

/// Ring built from the flags, inferring variables and beta from `system`
/// (which fixes the default beta) and `extra` (which only contributes names).
fn build_ring(args: &RingArgs, system: &[String], extra: &[String]) -> CliResult<Ring> {
    let field = Field::parse(&args.field)?;
    let names = match &args.vars {
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) => default_names(n),
            Err(_) => split_list(v),
        },
        None => infer_names(system.iter().chain(extra), &field)?,
    };
    let beta = match args.beta {
        Some(b) => b,
        None => {
            let mut deg = 0;
            for s in system {
                deg = deg.max(expanded_degree(s, &names, &field)?);
            }
            default_beta(deg)
        }
    };
    Ok(Ring::with_names(names, beta, &field)?)
}

fn infer_names<'a>(exprs: impl Iterator<Item = &'a String>, field: &Field) -> CliResult<Vec<String>> {
    let standard = ["x", "y", "z", "w"];
    let mut count = 1;
    let mut indexed = 0;
    for e in exprs {
        for id in identifiers(e)? {
            if id == "g" && field.degree() > 1 {
                continue;
            }
            if let Some(p) = standard.iter().position(|s| *s == id) {
                count = count.max(p + 1);
            } else if let Some(i) = id.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()).filter(|&i| i > 0) {
                indexed = indexed.max(i);
            } else {
                return Err(CliError(format!("cannot infer variables from `{id}`; pass --vars")));
            }
        }
    }
    Ok(if indexed > 0 { default_names(indexed.max(count)) } else { default_names(count) })
}

fn poly(ring: &Ring, text: &str, truncate: bool) -> CliResult<TruncPoly> {
    Ok(parse_poly(text, ring, truncate)?)
}

fn system(ring: &Ring, exprs: &[String], truncate: bool) -> CliResult<PolySystem> {
    let polys = exprs.iter().map(|e| poly(ring, e, truncate)).collect::<CliResult<Vec<_>>>()?;
    Ok(PolySystem::new(ring, polys)?)
}

fn point(ring: &Ring, text: &str) -> CliResult<Vec<Scalar>> {
    let items = split_list(text);
    if items.len() != ring.nvars() {
        return Err(CliError(format!("point has {} coordinates for {} variables", items.len(), ring.nvars())));
    }
    items.iter().map(|s| Ok(parse_scalar(s, ring.field())?)).collect()
}

fn matrix(k: &Field, text: &str) -> CliResult<Matrix> {
    let rows: Vec<Vec<Scalar>> = text
        .split(';')
        .map(|row| split_list(row).iter().map(|s| Ok(parse_scalar(s, k)?)).collect::<CliResult<Vec<_>>>())
        .collect::<CliResult<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    Ok(Matrix::from_rows(k, cols, rows)?)
}

fn contact_element(ring: &Ring, e: &Element, truncate: bool) -> CliResult<ContactElement> {
    let rows = e.m.iter().map(|r| r.iter().map(|s| poly(ring, s, truncate)).collect::<CliResult<Vec<_>>>()).collect::<CliResult<Vec<_>>>()?;
    let phi = e.phi.iter().map(|s| poly(ring, s, truncate)).collect::<CliResult<Vec<_>>>()?;
    Ok(ContactElement::new(PolyMatrix::from_rows(ring, rows)?, phi)?)
}

fn origin(ring: &Ring) -> Vec<Scalar> {
    vec![ring.field().zero(); ring.nvars()]
}

/// The recentred system, or the system itself at the origin.
fn at_point(f: &PolySystem, at: &Option<String>) -> CliResult<PolySystem> {
    match at {
        None => Ok(f.clone()),
        Some(a) => {
            let a = point(f.ring(), a)?;
            if !f.vanishes_at(&a)? {
                return Err(CliError("point is not on the variety".into()));
            }
            Ok(f.taylor_shift(&a)?)
        }
    }
}

fn require_exact(f: &PolySystem) -> CliResult<()> {
    if !f.is_exact() {
        return Err(CliError(format!("beta = {} is below the degree of the system; raise --beta", f.ring().beta())));
    }
    Ok(())
}

fn scalar_json(k: &Field, c: &Scalar) -> Value {
    json!(k.format(c))
}

fn vector_json(k: &Field, v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|c| scalar_json(k, c)).collect())
}

fn polys_json(ps: &[TruncPoly]) -> Value {
    Value::Array(ps.iter().map(|p| json!(p.to_string())).collect())
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|r| vector_json(m.field(), m.row(r))).collect())
}

pub fn element_json(g: &ContactElement) -> Value {
    let m = g.matrix();
    let rows: Vec<Value> = (0..m.rows()).map(|i| polys_json(m.row_polys(i))).collect();
    json!({ "M": rows, "phi": polys_json(g.phi()) })
}

fn ring_json(ring: &Ring) -> Value {
    json!({ "field": ring.field().to_string(), "vars": ring.names(), "beta": ring.beta() })
}

fn subspace_json(s: &Subspace) -> Value {
    json!({ "dim": s.dim(), "ambient": s.ambient(), "basis": matrix_json(s.basis()) })
}

fn proof_json(k: &Field, proof: &InfeasibilityProof) -> Value {
    serde_json::to_value(proof.entries(k)).expect("entries serialize")
}

fn execute(cli: &Cli) -> CliResult<Report> {
    let args = &cli.ring;
    let tr = args.truncate;
    match &cli.command {
        Command::RingEval { expr, map, diff, at } => {
            let map_items = map.as_deref().map(split_list).unwrap_or_default();
            let ring = build_ring(args, std::slice::from_ref(expr), &map_items)?;
            let k = ring.field().clone();
            let mut p = poly(&ring, expr, tr)?;
            if let Some(a) = at {
                let a = point(&ring, a)?;
                p = PolySystem::single(p).taylor_shift(&a)?.into_polys().remove(0);
            }
            if !map_items.is_empty() {
                let phi = map_items.iter().map(|s| poly(&ring, s, tr)).collect::<CliResult<Vec<_>>>()?;
                p = p.compose(&phi)?;
            }
            if let Some(v) = diff {
                let j = ring.names().iter().position(|n| n == v).ok_or_else(|| CliError(format!("unknown variable `{v}`")))?;
                p = p.derivative(j)?;
            }
            let inverse = p.is_unit().then(|| p.inverse()).transpose()?;
            Ok(Report::ok(json!({
                "ring": ring_json(&ring),
                "result": p.to_string(),
                "exact": p.is_exact(),
                "order": p.order(),
                "degree": p.degree(),
                "unit": p.is_unit(),
                "inverse": inverse.map(|q| q.to_string()),
                "constant_term": scalar_json(&k, p.constant_term()),
            })))
        }
        Command::Act { system: sys, element } => {
            let exprs = system_exprs(sys)?;
            let el = element_exprs(element)?;
            let ring = build_ring(args, &exprs, &element_strings(&el))?;
            let f = system(&ring, &exprs, tr)?;
            let g = contact_element(&ring, &el, tr)?;
            let out = g.act(&f)?;
            Ok(Report::ok(json!({ "ring": ring_json(&ring), "result": polys_json(out.polys()) })))
        }
        Command::Invert { element } => {
            let el = element_exprs(element)?;
            let ring = build_ring(args, &el.phi, &element_strings(&el))?;
            let g = contact_element(&ring, &el, tr)?;
            let inv = g.invert()?;
            let check = inv.group_mul(&g)?.is_identity() && g.group_mul(&inv)?.is_identity();
            Ok(Report::ok(json!({ "ring": ring_json(&ring), "inverse": element_json(&inv), "verified": check })))
        }
        Command::Mather { a, b } => {
            let k = Field::parse(&args.field)?;
            let (a, b) = (matrix(&k, a)?, matrix(&k, b)?);
            let c = mather_complement(&a, &b)?;
            let one = Matrix::identity(&k, a.rows());
            let d = c.mul(&one.sub(&a.mul(&b)?))?.add(&b);
            let det = d.determinant()?;
            Ok(Report::ok(json!({
                "field": k.to_string(),
                "C": matrix_json(&c),
                "D": matrix_json(&d),
                "det": scalar_json(&k, &det),
            })))
        }
        Command::EquivCheck { system: sys, other, from, to, element } => {
            let exprs = system_exprs(sys)?;
            let other_exprs = if other.is_empty() { Vec::new() } else { system_exprs(other)? };
            let el = element.as_deref().map(element_exprs).transpose()?;
            let extra: Vec<String> = other_exprs.iter().cloned().chain(el.iter().flat_map(element_strings)).collect();
            let ring = build_ring(args, &exprs, &extra)?;
            let f = system(&ring, &exprs, tr)?;
            let g_sys = if other_exprs.is_empty() { f.clone() } else { system(&ring, &other_exprs, tr)? };
            let (source, target) = if from.is_some() || to.is_some() {
                require_exact(&f)?;
                require_exact(&g_sys)?;
                (at_point(&f, from)?, at_point(&g_sys, to)?)
            } else {
                (f.clone(), g_sys.clone())
            };
            let witness = el.as_ref().map(|e| contact_element(&ring, e, tr)).transpose()?;
            let report = equiv_check(&source, &target, witness.as_ref())?;
            let (equivalent, tier, refuted, w) = match &report.verdict {
                Verdict::Equivalent { tier, witness } => (true, Some(*tier), None, witness.clone()),
                Verdict::Inequivalent { by } => (false, None, Some(*by), None),
            };
            let tier_name = tier.map(|t| match t {
                Tier::Witnessed => "WITNESSED",
                Tier::Exhaustive => "EXHAUSTIVE",
                Tier::Candidate => "CANDIDATE",
            });
            let refuted_name = refuted.map(|r| match r {
                Refutation::Fingerprint => "fingerprint",
                Refutation::Exhaustive => "exhaustive",
            });
            Ok(Report::negative_if(!equivalent, json!({
                "ring": ring_json(&ring),
                "beta": ring.beta(),
                "equivalent": equivalent,
                "tier": tier_name,
                "refuted_by": refuted_name,
                "witness": w.as_ref().map(element_json),
                "supplied_witness_valid": report.supplied_witness_valid,
            })))
        }
        Command::OrbitTangent { system: sys, at } => {
            let exprs = system_exprs(sys)?;
            let ring = build_ring(args, &exprs, &[])?;
            let f = at_point(&system(&ring, &exprs, tr)?, at)?;
            let space = orbit_tangent_space(&f);
            let complement: Vec<Value> = tangent_complement(&f)
                .into_iter()
                .map(|(i, m)| json!({ "component": i, "monomial": ring.format_monomial(m) }))
                .collect();
            Ok(Report::ok(json!({
                "ring": ring_json(&ring),
                "dim": space.dim(),
                "codim": space.codim(),
                "complement": complement,
            })))
        }
        Command::Fingerprint { system: sys, at } => {
            let exprs = system_exprs(sys)?;
            let ring = build_ring(args, &exprs, &[])?;
            let f = at_point(&system(&ring, &exprs, tr)?, at)?;
            Ok(Report::ok(json!({ "ring": ring_json(&ring), "fingerprint": fingerprint(&f) })))
        }
        Command::Jinv { expr, at } => {
            let ring = build_ring(args, std::slice::from_ref(expr), &[])?;
            let k = ring.field().clone();
            let f = at_point(&PolySystem::single(poly(&ring, expr, tr)?), at)?;
            let cone = tangent_cone(f.get(0))?;
            let outcome = quartic_roots(&cone).and_then(|roots| Ok((roots, quartic_j_invariant(&cone)?)));
            Ok(match outcome {
                Ok(((used, roots), j)) => {
                    let roots: Vec<Value> = roots.iter().map(|(u, v)| json!([k.format(u), k.format(v)])).collect();
                    let vars: Vec<&String> = used.iter().map(|&i| &ring.names()[i]).collect();
                    Report::ok(json!({
                        "ring": ring_json(&ring),
                        "tangent_cone": cone.to_string(),
                        "variables": vars,
                        "roots": roots,
                        "j": scalar_json(&k, &j),
                    }))
                }
                Err(e) => Report::negative_if(true, json!({
                    "ring": ring_json(&ring),
                    "tangent_cone": cone.to_string(),
                    "j": Value::Null,
                    "reason": e.to_string(),
                })),
            })
        }
        Command::LogDer { system: sys, direction, beta_work } => {
            let exprs = system_exprs(sys)?;
            let ring = build_ring(args, &exprs, &[])?;
            let k = ring.field().clone();
            let f = system(&ring, &exprs, tr)?;
            let v = point(&ring, direction)?;
            let bw = beta_work.unwrap_or(ring.beta());
            Ok(match solve_log_derivation(&f, &v, bw)? {
                LogDerResult::Feasible { derivation, solution_dim } => {
                    let h = derivation.multiplier.clone();
                    let rows: Vec<Value> = (0..h.rows()).map(|i| polys_json(h.row_polys(i))).collect();
                    Report::ok(json!({
                        "ring": ring_json(&ring),
                        "beta_work": bw,
                        "direction": vector_json(&k, &v),
                        "result": "feasible",
                        "derivation": { "coeffs": polys_json(&derivation.coeffs), "H": rows },
                        "solution_dim": solution_dim,
                        "attached": derivation.is_attached(&f)?,
                    }))
                }
                LogDerResult::Infeasible { proof } => {
                    let verified = proof.verify(&log_derivation_system(&f, &v, bw)?);
                    Report::negative_if(true, json!({
                        "ring": ring_json(&ring),
                        "beta_work": bw,
                        "direction": vector_json(&k, &v),
                        "result": "infeasible",
                        "certificate": proof_json(&k, &proof),
                        "certificate_verified": verified,
                    }))
                }
            })
        }
        Command::SolvableDirs { system: sys, beta_work } => {
            let exprs = system_exprs(sys)?;
            let ring = build_ring(args, &exprs, &[])?;
            let f = system(&ring, &exprs, tr)?;
            let bw = beta_work.unwrap_or(ring.beta());
            let s = solvable_directions(&f, bw)?;
            Ok(Report::ok(json!({ "ring": ring_json(&ring), "beta_work": bw, "directions": subspace_json(&s) })))
        }
        Command::InsepCert { system: sys, at, element, beta_work } => {
            let exprs = system_exprs(sys)?;
            let el = element_exprs(element)?;
            let ring = build_ring(args, &exprs, &element_strings(&el))?;
            let k = ring.field().clone();
            let f = system(&ring, &exprs, tr)?;
            require_exact(&f)?;
            let a = point(&ring, at)?;
            let g = contact_element(&ring, &el, tr)?;
            let bw = beta_work.unwrap_or(ring.beta());
            match inseparability_certificate(&f, &a, &g, bw) {
                Ok(cert) => Ok(Report::ok(json!({
                    "ring": ring_json(&ring),
                    "beta_work": bw,
                    "result": "certified",
                    "point": vector_json(&k, &cert.point),
                    "witness": element_json(&cert.witness),
                    "direction": vector_json(&k, &cert.direction),
                    "certificate": proof_json(&k, &cert.proof),
                    "verified": cert.verify()?,
                }))),
                Err(crate::derlog::DerlogError::DerivationFeasible) => Ok(Report::negative_if(true, json!({
                    "ring": ring_json(&ring),
                    "beta_work": bw,
                    "result": "derivation-exists",
                    "point": vector_json(&k, &a),
                }))),
                Err(e) => Err(e.into()),
            }
        }
        Command::Split { system: sys, direction, beta_work } => {
            let exprs = system_exprs(sys)?;
            let ring = build_ring(args, &exprs, &[])?;
            let f = system(&ring, &exprs, tr)?;
            let bw = beta_work.unwrap_or(ring.beta());
            match direction {
                Some(dir) => {
                    let v = point(&ring, dir)?;
                    match solve_log_derivation(&f, &v, bw)? {
                        LogDerResult::Feasible { derivation, .. } => {
                            let s = straighten_and_split(&f, &derivation)?;
                            Ok(Report::ok(json!({
                                "ring": ring_json(&ring),
                                "beta_work": bw,
                                "result": "split",
                                "variables": [ring.names()[s.variable]],
                                "psi": polys_json(&s.psi),
                                "residual": polys_json(s.residual.polys()),
                                "precision": s.precision,
                            })))
                        }
                        LogDerResult::Infeasible { proof } => Ok(Report::negative_if(true, json!({
                            "ring": ring_json(&ring),
                            "beta_work": bw,
                            "result": "infeasible",
                            "certificate": proof_json(ring.field(), &proof),
                        }))),
                    }
                }
                None => {
                    let s = split_smooth_factors(&f, bw)?;
                    let vars: Vec<&String> = s.variables.iter().map(|&j| &ring.names()[j]).collect();
                    Ok(Report::negative_if(s.variables.is_empty(), json!({
                        "ring": ring_json(&ring),
                        "beta_work": bw,
                        "result": if s.variables.is_empty() { "no-smooth-factor" } else { "split" },
                        "variables": vars,
                        "psi": polys_json(&s.psi),
                        "residual": polys_json(s.residual.polys()),
                        "precision": s.precision,
                    })))
                }
            }
        }
        Command::HsSearch { system: sys, order, beta_work, mode } => {
            let exprs = system_exprs(sys)?;
            let ring = build_ring(args, &exprs, &[])?;
            let f = system(&ring, &exprs, tr)?;
            let bw = beta_work.unwrap_or(ring.beta());
            let mode = match mode {
                ModeArg::Any => SearchMode::Any,
                ModeArg::Regular => SearchMode::Regular,
            };
            let out = hs_search(&f, *order, bw, mode)?;
            let (found, witness) = match &out.outcome {
                HsOutcome::Found(d) => (true, Some(hs_json(d))),
                HsOutcome::Exhausted => (false, None),
            };
            Ok(Report::negative_if(!found, json!({
                "ring": ring_json(&ring),
                "field": ring.field().to_string(),
                "r": order,
                "beta": bw,
                "mode": if mode == SearchMode::Any { "any" } else { "regular" },
                "result": if found { "found" } else { "exhausted" },
                "witness": witness,
                "nodes": out.nodes,
                "parameters": out.parameters,
                "enumerated": out.enumerated,
            })))
        }
        Command::HsVerify { system: sys, levels, beta_work } => {
            let exprs = system_exprs(sys)?;
            let level_items: Vec<Vec<String>> = levels.iter().map(|l| split_list(l)).collect();
            let extra: Vec<String> = level_items.iter().flatten().cloned().collect();
            let ring = build_ring(args, &exprs, &extra)?;
            let f = system(&ring, &exprs, tr)?;
            let parsed = level_items
                .iter()
                .map(|l| l.iter().map(|s| poly(&ring, s, tr)).collect::<CliResult<Vec<_>>>())
                .collect::<CliResult<Vec<_>>>()?;
            let d = HsDerivation::new(&ring, parsed)?;
            let bw = beta_work.unwrap_or(ring.beta());
            let report = hs_verify(&f, &d, bw)?;
            let violation = report.violation.as_ref().map(|v| {
                json!({ "equation": v.equation, "t_order": v.t_order, "residue": v.residue.to_string() })
            });
            Ok(Report::negative_if(!report.passes, json!({
                "ring": ring_json(&ring),
                "beta_work": bw,
                "passes": report.passes,
                "violation": violation,
                "regular_levels": report.regular_levels,
            })))
        }
        Command::IsoScan { system: sys, bounds, max_den, cap } => {
            let exprs = system_exprs(sys)?;
            let ring = build_ring(args, &exprs, &[])?;
            let f = system(&ring, &exprs, tr)?;
            require_exact(&f)?;
            let domain = match bounds {
                None => Domain::AllPoints,
                Some(b) => {
                    let (lo, hi) = b.split_once("..").ok_or_else(|| CliError("box must look like lo..hi".into()))?;
                    let parse = |s: &str| parse_rational(s).ok_or_else(|| CliError(format!("bad bound `{s}`")));
                    Domain::RationalBox { lower: parse(lo)?, upper: parse(hi)?, max_denominator: *max_den }
                }
            };
            let report = classify(&f, &enumerate_points(&f, &domain, *cap)?)?;
            Ok(Report::ok(scan_json(&report)))
        }
        Command::Demo { name } => Ok(match name {
            DemoName::WhitneyCharP => demo_whitney()?,
            DemoName::CuspDeformation => demo_cusp()?,
            DemoName::CrossRatio => demo_cross_ratio()?,
        }),
    }
}

fn hs_json(d: &HsDerivation) -> Value {
    Value::Array(d.levels().iter().map(|l| polys_json(l)).collect())
}

pub fn scan_json(report: &ScanReport) -> Value {
    let f = &report.system;
    let ring = f.ring();
    let k = ring.field();
    let points: Vec<Value> = report
        .points
        .iter()
        .map(|p| {
            json!({
                "point": vector_json(k, &p.point),
                "class": p.class,
                "smooth": p.smooth,
                "fingerprint": p.fingerprint,
                "j": p.j_invariant.as_ref().map(|j| k.format(j)),
            })
        })
        .collect();
    let classes: Vec<Value> = report
        .classes
        .iter()
        .map(|c| {
            json!({
                "members": c.members,
                "fingerprint": c.fingerprint,
                "j_invariants": c.j_invariants.iter().map(|j| k.format(j)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "ring": ring_json(ring),
        "f": polys_json(f.polys()),
        "field_relative": report.field_relative(),
        "points": points,
        "classes": classes,
    })
}

fn demo_ring(field: &str, beta: usize) -> CliResult<Ring> {
    Ok(Ring::new(3, beta, &Field::parse(field)?)?)
}

fn demo_whitney() -> CliResult<Report> {
    let ring = demo_ring("F2", 3)?;
    let k = ring.field().clone();
    let f = PolySystem::single(poly(&ring, "x^2 + y^2*z", false)?);
    let a = vec![k.zero(), k.zero(), k.one()];
    let phi = vec![poly(&ring, "x+y", false)?, TruncPoly::var(&ring, 1), TruncPoly::var(&ring, 2)];
    let g = ContactElement::from_automorphism(&ring, 1, phi)?;
    let witnessed = verify_equivalence_witness(&f, &origin(&ring), &a, &g)?;
    let logder = solve_log_derivation(&f, &a, 3)?;
    let logder_json = match &logder {
        LogDerResult::Feasible { .. } => json!({ "result": "feasible" }),
        LogDerResult::Infeasible { proof } => json!({
            "result": "infeasible",
            "certificate": proof_json(&k, proof),
            "certificate_verified": proof.verify(&log_derivation_system(&f, &a, 3)?),
        }),
    };
    let hs = hs_search(&f, 2, 2, SearchMode::Regular)?;
    let exhausted = matches!(hs.outcome, HsOutcome::Exhausted);
    let mut candidates = Vec::new();
    for levels in [
        vec![vec!["0", "0", "1"]],
        vec![vec!["1", "0", "0"], vec!["0", "0", "0"]],
        vec![vec!["0", "0", "0"], vec!["0", "0", "1"]],
        vec![vec!["0", "1", "0"], vec!["0", "0", "0"]],
    ] {
        let parsed = levels
            .iter()
            .map(|l| l.iter().map(|s| poly(&ring, s, false)).collect::<CliResult<Vec<_>>>())
            .collect::<CliResult<Vec<_>>>()?;
        let d = HsDerivation::new(&ring, parsed)?;
        let report = hs_verify(&f, &d, 2)?;
        candidates.push(json!({
            "levels": hs_json(&d),
            "passes": report.passes,
            "violation": report.violation.map(|v| json!({ "t_order": v.t_order, "residue": v.residue.to_string() })),
        }));
    }
    let scan = classify(&f, &enumerate_points(&f, &Domain::AllPoints, DEFAULT_DOMAIN_CAP)?)?;
    let ok = witnessed && !logder.is_feasible() && exhausted && scan.classes.len() == 2;
    Ok(Report::negative_if(!ok, json!({
        "demo": "whitney-char-p",
        "f": f.get(0).to_string(),
        "ring": ring_json(&ring),
        "witness": { "from": vector_json(&k, &origin(&ring)), "to": vector_json(&k, &a), "element": element_json(&g), "verified": witnessed },
        "log_der": logder_json,
        "hs_search": { "r": 2, "beta_work": 2, "mode": "regular", "result": if exhausted { "exhausted" } else { "found" }, "nodes": hs.nodes },
        "hs_candidates": candidates,
        "scan": scan_json(&scan),
        "ok": ok,
    })))
}

fn demo_cusp() -> CliResult<Report> {
    let ring = demo_ring("F2", 5)?;
    let k = ring.field().clone();
    let f = PolySystem::single(poly(&ring, "x^2 + y^3 + z*y^2", false)?);
    let a = vec![k.zero(), k.zero(), k.one()];
    let phi = vec![poly(&ring, "x+y", false)?, TruncPoly::var(&ring, 1), TruncPoly::var(&ring, 2)];
    let g = ContactElement::from_automorphism(&ring, 1, phi)?;
    let mut certs = Vec::new();
    let mut ok = true;
    for bw in 3..=5 {
        let entry = match inseparability_certificate(&f, &a, &g, bw) {
            Ok(cert) => {
                let verified = cert.verify()?;
                ok &= verified;
                json!({ "beta_work": bw, "result": "certified", "certificate": proof_json(&k, &cert.proof), "verified": verified })
            }
            Err(e) => {
                ok = false;
                json!({ "beta_work": bw, "result": "failed", "reason": e.to_string() })
            }
        };
        certs.push(entry);
    }
    Ok(Report::negative_if(!ok, json!({
        "demo": "cusp-deformation",
        "f": f.get(0).to_string(),
        "ring": ring_json(&ring),
        "witness": element_json(&g),
        "point": vector_json(&k, &a),
        "certificates": certs,
        "ok": ok,
    })))
}

fn demo_cross_ratio() -> CliResult<Report> {
    let ring = demo_ring("Q", 5)?;
    let k = ring.field().clone();
    let f = PolySystem::single(poly(&ring, "x*y*(x+y)*(x+z*y)", false)?);
    let points: Vec<Vec<Scalar>> = [2, 3].iter().map(|&t| vec![k.zero(), k.zero(), k.from_int(t)]).collect();
    let scan = classify(&f, &points)?;
    let js: Vec<Option<Scalar>> = scan.points.iter().map(|p| p.j_invariant.clone()).collect();
    let distinct = js[0].is_some() && js[1].is_some() && js[0] != js[1];
    let cones: Vec<String> = points
        .iter()
        .map(|a| Ok(tangent_cone(f.taylor_shift(a)?.get(0))?.to_string()))
        .collect::<CliResult<_>>()?;
    Ok(Report::negative_if(!distinct, json!({
        "demo": "cross-ratio",
        "f": f.get(0).to_string(),
        "ring": ring_json(&ring),
        "points": points.iter().map(|p| vector_json(&k, p)).collect::<Vec<_>>(),
        "tangent_cones": cones,
        "j": js.iter().map(|j| j.as_ref().map(|j| k.format(j))).collect::<Vec<_>>(),
        "same_fingerprint": scan.classes.len() == 1,
        "distinct_j": distinct,
        "ok": distinct,
    })))
}
