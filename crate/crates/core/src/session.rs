//! Session documents (JSON), their resolution into live objects, and the command reports.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algsplit::{build_splitting, default_seed, realize, verify_splitting, SplitError, SubtreeSequence, Violation, ViolationClass};
use crate::amalgam::{NormalForm, Presentation, Side};
use crate::chain::ChainComplex;
use crate::cwsplit::{build_svk, cw_realize, injective_refine, plus_construction, validate_cw, Certificate, EquivariantCW, Incidence, KernelWords, VoltageComplex};
use crate::groupring::{RingElement, RingMatrix};
use crate::groups::{BaseGroup, Group, Homomorphism};
use crate::oracle::ConeVerdict;
use crate::tree::{edge_label, export_dot, hull, vertex_label, vertex_of, FiniteSubtree, TreeEdge, TreeItem};

/// Terms `(coefficient, word)` of a group ring element.
pub type TermsDecl = Vec<(i64, String)>;
/// Row-major matrix of ring elements.
pub type MatrixDecl = Vec<Vec<TermsDecl>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionDocument {
    pub groups: Vec<GroupDecl>,
    #[serde(default)]
    pub homomorphisms: Vec<HomDecl>,
    #[serde(default)]
    pub presentation: Option<PresentationDecl>,
    #[serde(default)]
    pub complexes: Vec<ComplexDecl>,
    #[serde(default)]
    pub cw_complexes: Vec<CwDecl>,
    #[serde(default)]
    pub voltage_complexes: Vec<VoltageDecl>,
    #[serde(default)]
    pub commands: BTreeMap<String, CommandArgs>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDecl {
    Trivial { name: String },
    Free { name: String, generators: Vec<String> },
    FreeAbelian { name: String, generators: Vec<String> },
    Cyclic { name: String, generator: String, order: usize },
    /// Multiplication table on `0..n` with 0 the identity; generators name table indices.
    Finite { name: String, table: Vec<Vec<usize>>, generators: Vec<(String, usize)> },
}

impl GroupDecl {
    pub fn name(&self) -> &str {
        match self {
            GroupDecl::Trivial { name }
            | GroupDecl::Free { name, .. }
            | GroupDecl::FreeAbelian { name, .. }
            | GroupDecl::Cyclic { name, .. }
            | GroupDecl::Finite { name, .. } => name,
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub images: Vec<String>,
    #[serde(default = "yes")]
    pub injective: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindDecl {
    Amalgam,
    Hnn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDecl {
    pub name: String,
    pub kind: KindDecl,
    pub i1: String,
    pub i2: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDecl {
    pub name: String,
    pub ranks: Vec<usize>,
    /// `differentials[r - 1]` is `d_r`, a `ranks[r] x ranks[r - 1]` matrix.
    pub differentials: Vec<MatrixDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDecl {
    pub cell: String,
    pub tail: String,
    #[serde(default)]
    pub tail_word: String,
    pub head: String,
    #[serde(default)]
    pub head_word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CwDecl {
    pub name: String,
    /// Cell names by dimension.
    pub cells: Vec<Vec<String>>,
    #[serde(default)]
    pub edges: Vec<EdgeDecl>,
    /// Boundaries of the cells of dimension 2 and up.
    #[serde(default)]
    pub higher: Vec<MatrixDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoltageDecl {
    pub name: String,
    pub group: String,
    pub cells: Vec<Vec<String>>,
    #[serde(default)]
    pub edges: Vec<EdgeDecl>,
    #[serde(default)]
    pub higher: Vec<MatrixDecl>,
}

/// Defaults for one command; command line flags override them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandArgs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub words: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernel_y: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernel_x1: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernel_x2: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{path}: {message}")]
pub struct SessionError {
    /// JSON path of the offending value, or `line:column` for syntax errors.
    pub path: String,
    pub message: String,
}

fn fail(path: impl Into<String>, message: impl ToString) -> SessionError {
    SessionError { path: path.into(), message: message.to_string() }
}

/// A resolved session: every name in the document bound to a live object.
#[derive(Clone, Debug)]
pub struct Session {
    pub doc: SessionDocument,
    pub groups: BTreeMap<String, Arc<BaseGroup>>,
    pub presentation: Option<Presentation>,
    pub complexes: BTreeMap<String, ChainComplex<NormalForm>>,
    pub cws: BTreeMap<String, EquivariantCW>,
    pub voltages: BTreeMap<String, VoltageComplex>,
}

pub fn print_session(doc: &SessionDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize") + "\n"
}

pub fn parse_session(text: &str) -> Result<Session, SessionError> {
    let doc: SessionDocument =
        serde_json::from_str(text).map_err(|e| fail(format!("{}:{}", e.line(), e.column()), e))?;
    resolve(doc)
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn build_group(d: &GroupDecl) -> Result<BaseGroup, String> {
    Ok(match d {
        GroupDecl::Trivial { name } => BaseGroup::trivial(name),
        GroupDecl::Free { name, generators } => BaseGroup::free(name, &strs(generators)),
        GroupDecl::FreeAbelian { name, generators } => BaseGroup::free_abelian(name, &strs(generators)),
        GroupDecl::Cyclic { name, generator, order } => BaseGroup::cyclic(name, generator, *order).map_err(|e| e.to_string())?,
        GroupDecl::Finite { name, table, generators } => {
            let gens: Vec<(&str, usize)> = generators.iter().map(|(s, i)| (s.as_str(), *i)).collect();
            BaseGroup::finite(name, table.clone(), &gens).map_err(|e| e.to_string())?
        }
    })
}

fn terms_of<E: Ord + Clone>(path: &str, t: &TermsDecl, parse: &dyn Fn(&str) -> Result<E, String>) -> Result<RingElement<E>, SessionError> {
    let mut x = RingElement::zero();
    for (k, (c, w)) in t.iter().enumerate() {
        x.add_term(parse(w).map_err(|e| fail(format!("{path}[{k}]"), e))?, BigInt::from(*c));
    }
    Ok(x)
}

fn matrix_of<E: Ord + Clone>(
    path: &str,
    tag: &Arc<str>,
    rows: usize,
    cols: usize,
    m: &MatrixDecl,
    parse: &dyn Fn(&str) -> Result<E, String>,
) -> Result<RingMatrix<E>, SessionError> {
    if m.len() != rows {
        return Err(fail(path, format!("expected {rows} rows, found {}", m.len())));
    }
    let mut out = RingMatrix::zeros(tag, rows, cols);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(fail(format!("{path}[{i}]"), format!("expected {cols} entries, found {}", row.len())));
        }
        for (j, t) in row.iter().enumerate() {
            out.set(i, j, terms_of(&format!("{path}[{i}][{j}]"), t, parse)?);
        }
    }
    Ok(out)
}

fn cell_index(path: &str, cells: &[Vec<String>], dim: usize, name: &str) -> Result<usize, SessionError> {
    cells
        .get(dim)
        .and_then(|c| c.iter().position(|n| n == name))
        .ok_or_else(|| fail(path, format!("unknown {dim}-cell `{name}`")))
}

fn incidences<E>(path: &str, cells: &[Vec<String>], edges: &[EdgeDecl], parse: &dyn Fn(&str) -> Result<E, String>) -> Result<Vec<Incidence<E>>, SessionError> {
    let ones = cells.get(1).map_or(0, Vec::len);
    let mut slots: Vec<Option<Incidence<E>>> = (0..ones).map(|_| None).collect();
    for (k, e) in edges.iter().enumerate() {
        let at = format!("{path}[{k}]");
        let i = cell_index(&format!("{at}.cell"), cells, 1, &e.cell)?;
        let word = |w: &str, field: &str| parse(if w.is_empty() { "e" } else { w }).map_err(|m| fail(format!("{at}.{field}"), m));
        slots[i] = Some(Incidence {
            tail: cell_index(&format!("{at}.tail"), cells, 0, &e.tail)?,
            tail_elem: word(&e.tail_word, "tail_word")?,
            head: cell_index(&format!("{at}.head"), cells, 0, &e.head)?,
            head_elem: word(&e.head_word, "head_word")?,
        });
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| fail(path, format!("1-cell `{}` has no incidence", cells[1][i]))))
        .collect()
}

fn resolve(doc: SessionDocument) -> Result<Session, SessionError> {
    let mut groups: BTreeMap<String, Arc<BaseGroup>> = BTreeMap::new();
    for (i, g) in doc.groups.iter().enumerate() {
        let path = format!("groups[{i}]");
        if groups.contains_key(g.name()) {
            return Err(fail(format!("{path}.name"), format!("duplicate group `{}`", g.name())));
        }
        groups.insert(g.name().to_string(), Arc::new(build_group(g).map_err(|e| fail(&path, e))?));
    }
    let group = |path: String, name: &str| groups.get(name).cloned().ok_or_else(|| fail(path, format!("unknown group `{name}`")));
    let mut homs: BTreeMap<String, Homomorphism> = BTreeMap::new();
    for (i, h) in doc.homomorphisms.iter().enumerate() {
        let path = format!("homomorphisms[{i}]");
        let src = group(format!("{path}.source"), &h.source)?;
        let tgt = group(format!("{path}.target"), &h.target)?;
        let images = h
            .images
            .iter()
            .enumerate()
            .map(|(k, w)| tgt.parse(w).map_err(|e| fail(format!("{path}.images[{k}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        let hom = Homomorphism::new(&h.name, src, tgt, images, h.injective).map_err(|e| fail(&path, e))?;
        homs.insert(h.name.clone(), hom);
    }
    let presentation = match &doc.presentation {
        None => None,
        Some(pd) => {
            let hom = |field: &str, name: &str| {
                homs.get(name).cloned().ok_or_else(|| fail(format!("presentation.{field}"), format!("unknown homomorphism `{name}`")))
            };
            let (i1, i2) = (hom("i1", &pd.i1)?, hom("i2", &pd.i2)?);
            let p = match pd.kind {
                KindDecl::Amalgam => Presentation::amalgam(&pd.name, i1, i2),
                KindDecl::Hnn => Presentation::hnn(&pd.name, i1, i2, pd.stable.as_deref().unwrap_or("t")),
            };
            Some(p.map_err(|e| fail("presentation", e))?)
        }
    };
    let need = |path: String| presentation.as_ref().ok_or_else(|| fail(path, "requires a presentation"));
    let mut complexes = BTreeMap::new();
    for (i, c) in doc.complexes.iter().enumerate() {
        let path = format!("complexes[{i}]");
        let p = need(path.clone())?;
        let parse = |w: &str| p.reduce(w).map_err(|e| e.to_string());
        if c.differentials.len() + 1 != c.ranks.len() {
            return Err(fail(format!("{path}.differentials"), "need one differential per positive degree"));
        }
        let diffs = c
            .differentials
            .iter()
            .enumerate()
            .map(|(k, m)| matrix_of(&format!("{path}.differentials[{k}]"), p.id(), c.ranks[k + 1], c.ranks[k], m, &parse))
            .collect::<Result<Vec<_>, _>>()?;
        let cx = ChainComplex::new(p.id(), c.ranks.clone(), diffs).map_err(|e| fail(&path, e))?;
        cx.validate(p).map_err(|e| fail(&path, e))?;
        complexes.insert(c.name.clone(), cx);
    }
    let mut cws = BTreeMap::new();
    for (i, w) in doc.cw_complexes.iter().enumerate() {
        let path = format!("cw_complexes[{i}]");
        let p = need(path.clone())?;
        let parse = |s: &str| p.reduce(s).map_err(|e| e.to_string());
        let edges = incidences(&format!("{path}.edges"), &w.cells, &w.edges, &parse)?;
        let higher = higher_of(&path, p.id(), &w.cells, &w.higher, &parse)?;
        let base = match &w.base {
            Some(b) => cell_index(&format!("{path}.base"), &w.cells, 0, b)?,
            None => 0,
        };
        let cw = EquivariantCW::new(p, &w.name, w.cells.clone(), edges, higher, base).map_err(|e| fail(&path, e))?;
        cws.insert(w.name.clone(), cw);
    }
    let mut voltages = BTreeMap::new();
    for (i, v) in doc.voltage_complexes.iter().enumerate() {
        let path = format!("voltage_complexes[{i}]");
        let g = group(format!("{path}.group"), &v.group)?;
        let parse = |s: &str| g.parse(s).map_err(|e| e.to_string());
        let edges = incidences(&format!("{path}.edges"), &v.cells, &v.edges, &parse)?;
        let higher = higher_of(&path, g.id(), &v.cells, &v.higher, &parse)?;
        let vc = VoltageComplex::new(g.clone(), v.cells.clone(), edges, higher).map_err(|e| fail(&path, e))?;
        vc.complex.validate(g.as_ref()).map_err(|e| fail(&path, e))?;
        voltages.insert(v.name.clone(), vc);
    }
    for (name, args) in &doc.commands {
        if let Some(c) = &args.complex {
            if !complexes.contains_key(c) && !cws.contains_key(c) && !voltages.contains_key(c) {
                return Err(fail(format!("commands.{name}.complex"), format!("unknown complex `{c}`")));
            }
        }
    }
    Ok(Session { doc, groups, presentation, complexes, cws, voltages })
}

fn higher_of<E: Ord + Clone>(
    path: &str,
    tag: &Arc<str>,
    cells: &[Vec<String>],
    higher: &[MatrixDecl],
    parse: &dyn Fn(&str) -> Result<E, String>,
) -> Result<Vec<RingMatrix<E>>, SessionError> {
    let dims = cells.len().saturating_sub(2);
    if higher.len() != dims {
        return Err(fail(format!("{path}.higher"), format!("expected {dims} boundary matrices, found {}", higher.len())));
    }
    higher
        .iter()
        .enumerate()
        .map(|(k, m)| matrix_of(&format!("{path}.higher[{k}]"), tag, cells[k + 2].len(), cells[k + 1].len(), m, parse))
        .collect()
}

/// Coefficients as JSON numbers when they fit, strings otherwise.
fn coeff_json(c: &BigInt) -> Value {
    c.to_i64().map_or_else(|| Value::String(c.to_string()), Value::from)
}

pub fn element_json<E: Ord + Clone>(x: &RingElement<E>, show: &dyn Fn(&E) -> String) -> Value {
    Value::Array(x.terms().map(|(g, c)| json!([coeff_json(c), show(g)])).collect())
}

pub fn matrix_json<E: Ord + Clone>(m: &RingMatrix<E>, show: &dyn Fn(&E) -> String) -> Value {
    Value::Array((0..m.rows).map(|i| Value::Array(m.row(i).iter().map(|x| element_json(x, show)).collect())).collect())
}

pub fn complex_json<E: Ord + Clone>(c: &ChainComplex<E>, show: &dyn Fn(&E) -> String) -> Value {
    json!({
        "ring": c.ring.to_string(),
        "ranks": c.ranks,
        "differentials": (1..=c.top()).map(|r| matrix_json(&c.d(r), show)).collect::<Vec<_>>(),
    })
}

pub fn verdict_json(v: &ConeVerdict, window: usize) -> Value {
    let mut out = serde_json::to_value(v).expect("verdicts serialize");
    out["requested_window"] = json!(window);
    out
}

pub fn sequence_json(p: &Presentation, u: &SubtreeSequence) -> Value {
    Value::Array(
        u.trees
            .iter()
            .enumerate()
            .map(|(r, t)| {
                json!({
                    "degree": r,
                    "vertices": t.vertices.iter().map(|v| vertex_label(p, v)).collect::<Vec<_>>(),
                    "edges": t.edges.iter().map(|e| edge_label(p, e)).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

/// Reads `G1·w`, `G2·w` or `H·w` (a colon also works as the separator).
pub fn parse_item(p: &Presentation, label: &str) -> Result<TreeItem, String> {
    let (kind, word) = label
        .split_once('·')
        .or_else(|| label.split_once(':'))
        .ok_or_else(|| format!("`{label}` is not of the form G1·word, G2·word or H·word"))?;
    let g = p.reduce(if word.trim().is_empty() { "e" } else { word.trim() }).map_err(|e| e.to_string())?;
    match kind.trim() {
        "G1" => Ok(TreeItem::Vertex(vertex_of(p, &g, Side::First))),
        "G2" => Ok(TreeItem::Vertex(vertex_of(p, &g, Side::Second))),
        "H" => Ok(TreeItem::Edge(TreeEdge { key: p.coset_key_unchecked(&g, crate::amalgam::CosetKind::H) })),
        other => Err(format!("unknown coset kind `{other}`")),
    }
}

/// Seed text: comma separated items, closed up to their convex hull.
pub fn parse_seed(p: &Presentation, text: &str) -> Result<FiniteSubtree, String> {
    let items = text.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_item(p, s.trim())).collect::<Result<Vec<_>, _>>()?;
    hull(p, &items).map_err(|e| e.to_string())
}

/// Rebuilds a sequence from its report form, without any repair.
pub fn sequence_from_json(p: &Presentation, v: &Value) -> Result<SubtreeSequence, String> {
    let degrees = v.as_array().ok_or("sequence must be a list")?;
    let mut trees = Vec::new();
    for d in degrees {
        let mut t = FiniteSubtree::default();
        let list = |key: &str| -> Result<Vec<String>, String> {
            d[key].as_array().ok_or(format!("missing `{key}`"))?.iter().map(|x| x.as_str().map(String::from).ok_or("labels are strings".into())).collect()
        };
        for l in list("vertices")? {
            match parse_item(p, &l)? {
                TreeItem::Vertex(v) => t.vertices.insert(v),
                TreeItem::Edge(_) => return Err(format!("`{l}` is an edge")),
            };
        }
        for l in list("edges")? {
            match parse_item(p, &l)? {
                TreeItem::Edge(e) => t.edges.insert(e),
                TreeItem::Vertex(_) => return Err(format!("`{l}` is a vertex")),
            };
        }
        trees.push(t);
    }
    Ok(SubtreeSequence { trees })
}

/// Command names accepted by `run`.
pub const COMMANDS: [&str; 8] = ["realize", "split", "verify", "cw-realize", "cw-split", "plus", "refine", "export-dot"];

/// Result of one command: a report body and the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

impl Outcome {
    fn report(pass: bool, v: Value) -> Self {
        Outcome { code: if pass { 0 } else { 1 }, body: serde_json::to_string_pretty(&v).expect("json") + "\n" }
    }

    fn usage(message: impl ToString) -> Self {
        Outcome { code: 2, body: serde_json::to_string_pretty(&json!({"error": message.to_string()})).expect("json") + "\n" }
    }
}

/// Extra inputs for `verify`: the report of an earlier `split`.
#[derive(Clone, Debug, Default)]
pub struct RunInputs {
    pub args: CommandArgs,
    pub splitting: Option<Value>,
}

fn merged(session: &Session, command: &str, flags: &CommandArgs) -> CommandArgs {
    let base = session.doc.commands.get(command).cloned().unwrap_or_default();
    let pick = |a: &Vec<String>, b: &Vec<String>| if a.is_empty() { b.clone() } else { a.clone() };
    CommandArgs {
        complex: flags.complex.clone().or(base.complex),
        seed: flags.seed.clone().or(base.seed),
        window: flags.window.or(base.window),
        degree: flags.degree.or(base.degree),
        words: pick(&flags.words, &base.words),
        kernel_y: pick(&flags.kernel_y, &base.kernel_y),
        kernel_x1: pick(&flags.kernel_x1, &base.kernel_x1),
        kernel_x2: pick(&flags.kernel_x2, &base.kernel_x2),
    }
}

fn violation_of(e: &SplitError) -> Violation {
    let (class, degree) = match e {
        SplitError::Realization { degree, .. } => (ViolationClass::Realization, Some(*degree)),
        SplitError::Subtree { degree, .. } => (ViolationClass::SubtreeValidity, Some(*degree)),
        SplitError::Length { .. } => (ViolationClass::SubtreeValidity, None),
        SplitError::Ring { .. } | SplitError::Chain(_) => (ViolationClass::ComplexInvalid, None),
    };
    Violation { class, degree, detail: e.to_string() }
}

fn certificate_json(c: &Certificate, g: &BaseGroup) -> Value {
    json!({
        "piece": c.piece,
        "nodes": c.nodes,
        "tree": c.tree,
        "holonomies": c.holonomies.iter().map(|h| g.show(h)).collect::<Vec<_>>(),
        "connected": c.connected,
        "generates": c.generates,
    })
}

fn voltage_json(v: &VoltageComplex) -> Value {
    let g = v.group.clone();
    json!({
        "group": g.name(),
        "cells": v.names,
        "complex": complex_json(&v.complex, &|x| g.show(x)),
    })
}

/// Runs one command against a resolved session.
pub fn run(session: &Session, command: &str, inputs: &RunInputs) -> Outcome {
    let args = merged(session, command, &inputs.args);
    let window = args.window.unwrap_or(2);
    let Some(p) = session.presentation.as_ref() else {
        if command == "plus" {
            return run_plus(session, &args, window);
        }
        return Outcome::usage("session has no presentation");
    };
    let seed = match &args.seed {
        Some(s) => match parse_seed(p, s) {
            Ok(t) => t,
            Err(e) => return Outcome::usage(format!("--seed: {e}")),
        },
        None => default_seed(p),
    };
    let show = |g: &NormalForm| p.show(g);
    match command {
        "realize" | "split" | "export-dot" => {
            let (name, c) = match select("complex", &session.complexes, args.complex.as_deref()) {
                Ok(x) => x,
                Err(o) => return o,
            };
            let u = realize(p, c, &seed);
            if command == "export-dot" {
                let r = args.degree.unwrap_or(0);
                let Some(t) = u.trees.get(r) else { return Outcome::usage(format!("degree {r} is above the top of `{name}`")) };
                return Outcome { code: 0, body: export_dot(p, t, &format!("{name}_U{r}")) };
            }
            let mut report = json!({
                "command": command,
                "presentation": p.name(),
                "complex": name,
                "sequence": sequence_json(p, &u),
            });
            if command == "realize" {
                return Outcome::report(true, report);
            }
            match build_splitting(p, c, &u) {
                Ok(s) => {
                    let verdict = verify_splitting(p, &s);
                    let (g1, g2, h) = (p.g1.clone(), p.factor(Side::Second).clone(), p.h.clone());
                    report["pieces"] = json!({
                        "d": complex_json(&s.d, &|x| h.show(x)),
                        "c1": complex_json(&s.c1, &|x| g1.show(x)),
                        "c2": s.c2.as_ref().map(|c2| complex_json(c2, &|x| g2.show(x))),
                    });
                    report["report"] = serde_json::to_value(&verdict).expect("json");
                    Outcome::report(verdict.pass, report)
                }
                Err(e) => {
                    report["report"] = json!({"pass": false, "violations": [violation_of(&e)], "degrees": []});
                    Outcome::report(false, report)
                }
            }
        }
        "verify" => {
            let Some(v) = &inputs.splitting else { return Outcome::usage("verify needs a splitting report") };
            let (name, c) = match select("complex", &session.complexes, v["complex"].as_str().or(args.complex.as_deref())) {
                Ok(x) => x,
                Err(o) => return o,
            };
            let u = match sequence_from_json(p, &v["sequence"]) {
                Ok(u) => u,
                Err(e) => return Outcome::usage(format!("splitting: {e}")),
            };
            let report = match build_splitting(p, c, &u) {
                Ok(s) => serde_json::to_value(verify_splitting(p, &s)).expect("json"),
                Err(e) => json!({"pass": false, "violations": [violation_of(&e)], "degrees": []}),
            };
            let pass = report["pass"].as_bool() == Some(true);
            Outcome::report(pass, json!({"command": "verify", "complex": name, "report": report}))
        }
        "cw-realize" | "cw-split" | "refine" => {
            let (name, w) = match select("cw complex", &session.cws, args.complex.as_deref()) {
                Ok(x) => x,
                Err(o) => return o,
            };
            let check = validate_cw(p, w);
            let mut report = json!({"command": command, "presentation": p.name(), "complex": name, "validation": check});
            if !check.pass {
                return Outcome::report(false, report);
            }
            let real = match cw_realize(p, w, &seed, 6) {
                Ok(r) => r,
                Err(e) => {
                    report["error"] = json!(e.to_string());
                    return Outcome::report(false, report);
                }
            };
            let cert_group = |piece: &str| match piece {
                "X1" => p.g1.clone(),
                "X2" => p.factor(Side::Second).clone(),
                _ => p.h.clone(),
            };
            report["sequence"] = sequence_json(p, &real.seq);
            report["rounds"] = json!(real.rounds);
            report["fundamental"] = json!(real.fundamental);
            report["counts_agree"] = json!(real.counts_agree);
            report["certificates"] = Value::Array(real.certificates.iter().map(|c| certificate_json(c, &cert_group(&c.piece))).collect());
            if command == "cw-realize" {
                return Outcome::report(true, report);
            }
            let svk = match build_svk(p, w, &real, window) {
                Ok(s) => s,
                Err(e) => {
                    report["error"] = json!(e.to_string());
                    return Outcome::report(false, report);
                }
            };
            report["x1"] = voltage_json(&svk.x1);
            report["x2"] = svk.x2.as_ref().map_or(Value::Null, voltage_json);
            report["y"] = voltage_json(&svk.y);
            report["cylinder_cells"] = json!(svk.cylinder_cells);
            report["total"] = complex_json(&svk.total, &show);
            report["verdict"] = verdict_json(&svk.verdict, window);
            if command == "cw-split" {
                return Outcome::report(svk.verdict.is_acyclic(), report);
            }
            let words = KernelWords { y: args.kernel_y.clone(), x1: args.kernel_x1.clone(), x2: args.kernel_x2.clone() };
            match injective_refine(p, &svk, &words, window) {
                Ok(r) => {
                    report["refined"] = json!({
                        "y": voltage_json(&r.y.output),
                        "x1": voltage_json(&r.x1.output),
                        "x2": r.x2.as_ref().map_or(Value::Null, |x| voltage_json(&x.output)),
                        "verdict": verdict_json(&r.verdict, window),
                    });
                    Outcome::report(r.verdict.is_acyclic(), report)
                }
                Err(e) => {
                    report["error"] = json!(e.to_string());
                    Outcome::report(false, report)
                }
            }
        }
        "plus" => run_plus(session, &args, window),
        other => Outcome::usage(format!("unknown command `{other}`; expected one of {}", COMMANDS.join(", "))),
    }
}

/// The named entry, or the only one when no name is given.
fn select<'a, T>(what: &str, map: &'a BTreeMap<String, T>, name: Option<&str>) -> Result<(String, &'a T), Outcome> {
    let name = match name {
        Some(n) => n.to_string(),
        None if map.len() == 1 => map.keys().next().unwrap().clone(),
        None => {
            let names: Vec<&str> = map.keys().map(String::as_str).collect();
            return Err(Outcome::usage(format!("no {what} given; pass --complex with one of [{}]", names.join(", "))));
        }
    };
    match map.get(&name) {
        Some(x) => Ok((name, x)),
        None => Err(Outcome::usage(format!("unknown {what} `{name}`"))),
    }
}

fn run_plus(session: &Session, args: &CommandArgs, window: usize) -> Outcome {
    let (name, k) = match select("voltage complex", &session.voltages, args.complex.as_deref()) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let g = k.group.clone();
    let mut report = json!({"command": "plus", "complex": name, "words": args.words});
    match plus_construction(k, &args.words, &[], window) {
        Ok(out) => {
            report["attaching"] = json!(out.attaching.iter().map(|z| z.iter().map(|x| element_json(x, &|e| g.show(e))).collect::<Vec<_>>()).collect::<Vec<_>>());
            report["fillings"] = json!(out.fillings.iter().map(|w| w.iter().map(|x| element_json(x, &|e| g.show(e))).collect::<Vec<_>>()).collect::<Vec<_>>());
            report["output"] = voltage_json(&out.output);
            report["relative"] = complex_json(&out.relative, &|e| g.show(e));
            report["verdict"] = verdict_json(&out.verdict, window);
            Outcome::report(out.verdict.is_acyclic(), report)
        }
        Err(e) => {
            report["error"] = json!(e.to_string());
            Outcome::report(false, report)
        }
    }
}

/// Session texts for the bundled presentations, each with a sample complex.
pub mod desk {
    /// Circle: `Z` as an HNN extension of the trivial group, with `C = Z[t] --(t - 1)--> Z[t]`.
    pub const CIRCLE: &str = r#"{
  "groups": [
    {"kind": "trivial", "name": "1"},
    {"kind": "trivial", "name": "G"}
  ],
  "homomorphisms": [
    {"name": "i1", "source": "1", "target": "G", "images": []},
    {"name": "i2", "source": "1", "target": "G", "images": []}
  ],
  "presentation": {"name": "circle", "kind": "hnn", "i1": "i1", "i2": "i2", "stable": "t"},
  "complexes": [
    {"name": "C", "ranks": [1, 1], "differentials": [[[[[1, "t"], [-1, "e"]]]]]}
  ],
  "cw_complexes": [
    {"name": "W", "cells": [["P"], ["e"]], "edges": [{"cell": "e", "tail": "P", "head": "P", "head_word": "t"}]}
  ],
  "commands": {
    "split": {"complex": "C"},
    "realize": {"complex": "C"},
    "export-dot": {"complex": "C", "degree": 0},
    "cw-split": {"complex": "W", "window": 2}
  }
}
"#;

    /// Trefoil group with the presentation complex of `x^2 = y^3`.
    pub const TREFOIL: &str = r#"{
  "groups": [
    {"kind": "free", "name": "Z", "generators": ["z"]},
    {"kind": "free", "name": "X", "generators": ["x"]},
    {"kind": "free", "name": "Y", "generators": ["y"]}
  ],
  "homomorphisms": [
    {"name": "i1", "source": "Z", "target": "X", "images": ["x^2"]},
    {"name": "i2", "source": "Z", "target": "Y", "images": ["y^3"]}
  ],
  "presentation": {"name": "trefoil", "kind": "amalgam", "i1": "i1", "i2": "i2"},
  "complexes": [
    {"name": "C", "ranks": [1, 2, 1], "differentials": [
      [[[[1, "x"], [-1, "e"]]], [[[1, "y"], [-1, "e"]]]],
      [[[[1, "e"], [1, "x"]], [[-1, "e"], [-1, "y"], [-1, "y^2"]]]]
    ]}
  ]
}
"#;

    /// Free group of rank two with the wedge of two circles.
    pub const WEDGE: &str = r#"{
  "groups": [
    {"kind": "trivial", "name": "1"},
    {"kind": "free", "name": "X", "generators": ["x"]},
    {"kind": "free", "name": "Y", "generators": ["y"]}
  ],
  "homomorphisms": [
    {"name": "i1", "source": "1", "target": "X", "images": []},
    {"name": "i2", "source": "1", "target": "Y", "images": []}
  ],
  "presentation": {"name": "f2", "kind": "amalgam", "i1": "i1", "i2": "i2"},
  "cw_complexes": [
    {"name": "W", "cells": [["P"], ["a", "b"]], "edges": [
      {"cell": "a", "tail": "P", "head": "P", "head_word": "x"},
      {"cell": "b", "tail": "P", "head": "P", "head_word": "y"}
    ]},
    {"name": "W3", "cells": [["P"], ["a", "b", "c"]], "edges": [
      {"cell": "a", "tail": "P", "head": "P", "head_word": "x"},
      {"cell": "b", "tail": "P", "head": "P", "head_word": "y"},
      {"cell": "c", "tail": "P", "head": "P"}
    ]}
  ],
  "commands": {
    "cw-split": {"complex": "W"},
    "refine": {"complex": "W3", "kernel_y": ["c_0"]}
  }
}
"#;

    /// Plus construction inputs over the trivial group and over `Z/2`.
    pub const PLUS: &str = r#"{
  "groups": [
    {"kind": "trivial", "name": "1"},
    {"kind": "cyclic", "name": "C2", "generator": "g", "order": 2}
  ],
  "voltage_complexes": [
    {"name": "disk", "group": "1", "cells": [["P"], ["a"], ["R"]],
     "edges": [{"cell": "a", "tail": "P", "head": "P"}], "higher": [[[[[1, "e"]]]]]},
    {"name": "rp2", "group": "C2", "cells": [["P"], ["a"], ["R"]],
     "edges": [{"cell": "a", "tail": "P", "head": "P", "head_word": "g"}], "higher": [[[[[1, "e"], [1, "g"]]]]]},
    {"name": "circle", "group": "1", "cells": [["P"], ["a"]],
     "edges": [{"cell": "a", "tail": "P", "head": "P"}]}
  ],
  "commands": {
    "plus": {"complex": "disk", "words": ["a"]}
  }
}
"#;

    pub fn all() -> Vec<(&'static str, &'static str)> {
        vec![("circle", CIRCLE), ("trefoil", TREFOIL), ("wedge", WEDGE), ("plus", PLUS)]
    }
}
