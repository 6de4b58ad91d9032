//! Algebraic transversality: finite subtree sequences realized by a complex over Z[G]
//! and the finite Mayer-Vietoris splittings they determine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::amalgam::{CosetKind, NormalForm, PresKind, Presentation, Side};
use crate::chain::{ChainComplex, ChainError, ChainMap};
use crate::groupring::{restrict_component, support_cosets, RingElement, RingMatrix};
use crate::groups::BaseElement;
use crate::oracle::{integer_homology, tree_exactness, IntegerMatrix, TreeExactness};
use crate::tree::{
    base_edge, base_vertex, edge_label, endpoints, hull, validate_subtree, vertex_label, FiniteSubtree, TreeEdge,
    TreeItem, TreeVertex,
};

/// `trees[r]` is the subtree `U_r` attached to degree `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeSequence {
    pub trees: Vec<FiniteSubtree>,
}

impl SubtreeSequence {
    pub fn top(&self) -> usize {
        self.trees.len() - 1
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("degree {degree}: {cell} maps into {coset}, which is missing from the next subtree")]
    Realization { degree: usize, cell: String, coset: String },
    #[error("degree {degree}: {reason}")]
    Subtree { degree: usize, reason: String },
    #[error("sequence has {found} subtrees, complex needs {expected}")]
    Length { expected: usize, found: usize },
    #[error("complex is over `{found}`, presentation is `{expected}`")]
    Ring { expected: String, found: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

fn side_kind(side: Side) -> CosetKind {
    match side {
        Side::First => CosetKind::G1,
        Side::Second => CosetKind::G2,
    }
}

/// Vertices whose cosets receive `g_v * s` for `s` in the support of any entry of `d_r`.
pub fn diff_support(p: &Presentation, c: &ChainComplex<NormalForm>, r: usize, v: &TreeVertex) -> BTreeSet<TreeVertex> {
    let d = c.d(r);
    let mut out = BTreeSet::new();
    for (_, _, x) in d.entries() {
        for key in support_cosets(p, &x.left_shift(p, &v.key), side_kind(v.side)) {
            out.insert(TreeVertex { side: v.side, key });
        }
    }
    out
}

/// Default seed: the base edge for an amalgam, the base vertex for an HNN extension.
pub fn default_seed(p: &Presentation) -> FiniteSubtree {
    match p.kind {
        PresKind::Amalgam => hull(p, &[TreeItem::Edge(base_edge(p))]).expect("nonempty"),
        PresKind::Hnn => FiniteSubtree::single(base_vertex(p)),
    }
}

fn items_of(s: &FiniteSubtree) -> Vec<TreeItem> {
    s.items()
}

/// Downward sweep: `U_{r-1} = hull(U_r, supports of U_r, extra_{r-1})`.
fn sweep(p: &Presentation, c: &ChainComplex<NormalForm>, top: FiniteSubtree, extra: &[Vec<TreeItem>]) -> SubtreeSequence {
    let n = c.top();
    let mut trees = vec![FiniteSubtree::default(); n + 1];
    trees[n] = top;
    for r in (1..=n).rev() {
        let mut items = items_of(&trees[r]);
        for v in &trees[r].vertices {
            items.extend(diff_support(p, c, r, v).into_iter().map(TreeItem::Vertex));
        }
        if let Some(more) = extra.get(r - 1) {
            items.extend(more.iter().cloned());
        }
        trees[r - 1] = hull(p, &items).expect("nonempty");
    }
    SubtreeSequence { trees }
}

pub fn realize(p: &Presentation, c: &ChainComplex<NormalForm>, seed: &FiniteSubtree) -> SubtreeSequence {
    sweep(p, c, seed.clone(), &[])
}

/// Grows a realized sequence to contain `targets[r]` in degree `r`, then re-sweeps downward.
pub fn extend_sequence(
    p: &Presentation,
    c: &ChainComplex<NormalForm>,
    u: &SubtreeSequence,
    targets: &[Vec<TreeItem>],
) -> SubtreeSequence {
    let n = c.top();
    let mut extra: Vec<Vec<TreeItem>> = (0..=n)
        .map(|r| {
            let mut items = u.trees.get(r).map(items_of).unwrap_or_default();
            items.extend(targets.get(r).cloned().unwrap_or_default());
            items
        })
        .collect();
    let top = hull(p, &extra[n]).expect("nonempty");
    extra.truncate(n);
    sweep(p, c, top, &extra)
}

/// First failure of `d(C_r(U_r)_i) in C_{r-1}(U_{r-1})_i`.
pub fn check_realization(p: &Presentation, c: &ChainComplex<NormalForm>, u: &SubtreeSequence) -> Result<(), SplitError> {
    if u.trees.len() != c.top() + 1 {
        return Err(SplitError::Length { expected: c.top() + 1, found: u.trees.len() });
    }
    for r in 1..=c.top() {
        for v in &u.trees[r].vertices {
            for w in diff_support(p, c, r, v) {
                if !u.trees[r - 1].vertices.contains(&w) {
                    return Err(SplitError::Realization {
                        degree: r,
                        cell: vertex_label(p, v),
                        coset: vertex_label(p, &w),
                    });
                }
            }
        }
    }
    Ok(())
}

/// The Mayer-Vietoris splitting attached to a realized sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MVSplitting {
    pub kind: PresKind,
    pub complex: ChainComplex<NormalForm>,
    pub seq: SubtreeSequence,
    /// Bases `(edge, j)` of D and `(vertex, j)` of C1, C2 per degree.
    pub d_basis: Vec<Vec<(TreeEdge, usize)>>,
    pub c1_basis: Vec<Vec<(TreeVertex, usize)>>,
    pub c2_basis: Vec<Vec<(TreeVertex, usize)>>,
    /// Over Z[H].
    pub d: ChainComplex<BaseElement>,
    /// Over Z[G1].
    pub c1: ChainComplex<BaseElement>,
    /// Over Z[G2]; empty for HNN extensions.
    pub c2: Option<ChainComplex<BaseElement>>,
    /// D extended along i1, into C1.
    pub e1: ChainMap<BaseElement>,
    /// D extended along i2, into C2 (amalgam) or into C1 twisted by the stable letter (HNN).
    pub e2: ChainMap<BaseElement>,
    /// Induced C1 into C over Z[G].
    pub f1: ChainMap<NormalForm>,
    pub f2: Option<ChainMap<NormalForm>>,
}

fn vertex_basis(u: &FiniteSubtree, side: Side, c: usize) -> Vec<(TreeVertex, usize)> {
    u.vertices.iter().filter(|v| v.side == side).flat_map(|v| (0..c).map(move |j| (v.clone(), j))).collect()
}

fn edge_basis(u: &FiniteSubtree, c: usize) -> Vec<(TreeEdge, usize)> {
    u.edges.iter().flat_map(|e| (0..c).map(move |j| (e.clone(), j))).collect()
}

fn positions<K: Ord + Clone>(basis: &[K]) -> BTreeMap<K, usize> {
    basis.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect()
}

/// Restricted differential on the `side` vertices of the sequence.
fn factor_complex(
    p: &Presentation,
    c: &ChainComplex<NormalForm>,
    bases: &[Vec<(TreeVertex, usize)>],
    side: Side,
) -> Result<ChainComplex<BaseElement>, SplitError> {
    let tag = p.factor(side).id().clone();
    let mut diffs = Vec::new();
    for r in 1..=c.top() {
        let below = positions(&bases[r - 1]);
        let d = c.d(r);
        let mut m = RingMatrix::zeros(&tag, bases[r].len(), bases[r - 1].len());
        for (row, (v, j)) in bases[r].iter().enumerate() {
            for k in 0..d.cols {
                let x = d.get(*j, k).left_shift(p, &v.key);
                for key in support_cosets(p, &x, side_kind(side)) {
                    let w = TreeVertex { side, key };
                    let col = *below.get(&(w.clone(), k)).ok_or_else(|| SplitError::Realization {
                        degree: r,
                        cell: vertex_label(p, v),
                        coset: vertex_label(p, &w),
                    })?;
                    *m.entry_mut(row, col) = restrict_component(p, &x, side_kind(side), &w.key);
                }
            }
        }
        diffs.push(m);
    }
    Ok(ChainComplex::new(&tag, bases.iter().map(Vec::len).collect(), diffs)?)
}

fn edge_complex(
    p: &Presentation,
    c: &ChainComplex<NormalForm>,
    bases: &[Vec<(TreeEdge, usize)>],
) -> Result<ChainComplex<BaseElement>, SplitError> {
    let tag = p.h.id().clone();
    let mut diffs = Vec::new();
    for r in 1..=c.top() {
        let below = positions(&bases[r - 1]);
        let d = c.d(r);
        let mut m = RingMatrix::zeros(&tag, bases[r].len(), bases[r - 1].len());
        for (row, (e, j)) in bases[r].iter().enumerate() {
            for k in 0..d.cols {
                let x = d.get(*j, k).left_shift(p, &e.key);
                for key in support_cosets(p, &x, CosetKind::H) {
                    let f = TreeEdge { key };
                    let col = *below.get(&(f.clone(), k)).ok_or_else(|| SplitError::Realization {
                        degree: r,
                        cell: edge_label(p, e),
                        coset: edge_label(p, &f),
                    })?;
                    *m.entry_mut(row, col) = restrict_component(p, &x, CosetKind::H, &f.key);
                }
            }
        }
        diffs.push(m);
    }
    Ok(ChainComplex::new(&tag, bases.iter().map(Vec::len).collect(), diffs)?)
}

/// `g * key^-1` as an element of the factor on `side`.
fn factor_ratio(p: &Presentation, g: &NormalForm, key: &NormalForm, side: Side) -> BaseElement {
    p.to_factor(&p.nf_multiply(g, &p.nf_invert(key)), side).expect("element and coset key share a coset")
}

pub fn build_splitting(p: &Presentation, c: &ChainComplex<NormalForm>, u: &SubtreeSequence) -> Result<MVSplitting, SplitError> {
    if *c.ring != **p.id() {
        return Err(SplitError::Ring { expected: p.id().to_string(), found: c.ring.to_string() });
    }
    if u.trees.len() != c.top() + 1 {
        return Err(SplitError::Length { expected: c.top() + 1, found: u.trees.len() });
    }
    for (r, t) in u.trees.iter().enumerate() {
        validate_subtree(p, t).map_err(|v| SplitError::Subtree { degree: r, reason: v.detail })?;
    }
    check_realization(p, c, u)?;
    let amalgam = p.kind == PresKind::Amalgam;
    let d_basis: Vec<_> = u.trees.iter().enumerate().map(|(r, t)| edge_basis(t, c.rank(r))).collect();
    let c1_basis: Vec<_> = u.trees.iter().enumerate().map(|(r, t)| vertex_basis(t, Side::First, c.rank(r))).collect();
    let c2_basis: Vec<_> = if amalgam {
        u.trees.iter().enumerate().map(|(r, t)| vertex_basis(t, Side::Second, c.rank(r))).collect()
    } else {
        vec![Vec::new(); u.trees.len()]
    };
    let d = edge_complex(p, c, &d_basis)?;
    let c1 = factor_complex(p, c, &c1_basis, Side::First)?;
    let c2 = if amalgam { Some(factor_complex(p, c, &c2_basis, Side::Second)?) } else { None };

    let g1_tag = p.g1.id().clone();
    let second_side = if amalgam { Side::Second } else { Side::First };
    let g2_tag = p.factor(second_side).id().clone();
    let d_up1 = d.map_ring(&g1_tag, |h| p.i1.apply_unchecked(h));
    let d_up2 = d.map_ring(&g2_tag, |h| p.i2.apply_unchecked(h));
    let c2_target = c2.clone().unwrap_or_else(|| c1.clone());
    let t_inv = if amalgam { p.identity_nf() } else { p.stable_nf(false) };
    let mut e1_maps = Vec::new();
    let mut e2_maps = Vec::new();
    for r in 0..=c.top() {
        let pos1 = positions(&c1_basis[r]);
        let pos2 = positions(if amalgam { &c2_basis[r] } else { &c1_basis[r] });
        let mut m1 = RingMatrix::zeros(&g1_tag, d_basis[r].len(), c1_basis[r].len());
        let mut m2 = RingMatrix::zeros(&g2_tag, d_basis[r].len(), c2_target.rank(r));
        for (row, (e, j)) in d_basis[r].iter().enumerate() {
            let (v1, v2) = endpoints(p, e);
            let gamma = factor_ratio(p, &e.key, &v1.key, Side::First);
            m1.set(row, pos1[&(v1, *j)], RingElement::unit(gamma));
            let moved = if amalgam { e.key.clone() } else { p.nf_multiply(&t_inv, &e.key) };
            let gamma2 = factor_ratio(p, &moved, &v2.key, second_side);
            m2.set(row, pos2[&(v2, *j)], RingElement::unit(gamma2));
        }
        e1_maps.push(m1);
        e2_maps.push(m2);
    }
    let e1 = ChainMap::new(d_up1, c1.clone(), e1_maps)?;
    let e2 = ChainMap::new(d_up2, c2_target, e2_maps)?;

    let f_of = |cx: &ChainComplex<BaseElement>, basis: &[Vec<(TreeVertex, usize)>], side: Side| {
        let src = cx.map_ring(p.id(), |g| p.from_factor(side, g));
        let maps = (0..=c.top())
            .map(|r| {
                let mut m = RingMatrix::zeros(p.id(), basis[r].len(), c.rank(r));
                for (row, (v, j)) in basis[r].iter().enumerate() {
                    m.set(row, *j, RingElement::unit(v.key.clone()));
                }
                m
            })
            .collect();
        ChainMap::new(src, c.clone(), maps)
    };
    let f1 = f_of(&c1, &c1_basis, Side::First)?;
    let f2 = match &c2 {
        Some(c2) => Some(f_of(c2, &c2_basis, Side::Second)?),
        None => None,
    };
    Ok(MVSplitting {
        kind: p.kind,
        complex: c.clone(),
        seq: u.clone(),
        d_basis,
        c1_basis,
        c2_basis,
        d,
        c1,
        c2,
        e1,
        e2,
        f1,
        f2,
    })
}

/// The short exact sequence of complexes over Z[G]: `e : D -> middle`, `f : middle -> C`.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub d: ChainComplex<NormalForm>,
    pub middle: ChainComplex<NormalForm>,
    pub e: ChainMap<NormalForm>,
    pub f: ChainMap<NormalForm>,
}

/// Induces everything up to Z[G] and forms `e = (e1, e2)` or `e1 - t e2`, and `f = f1 - f2`.
pub fn assemble(p: &Presentation, s: &MVSplitting) -> Result<Assembled, ChainError> {
    let tag = p.id();
    let d = s.d.map_ring(tag, |h| p.from_h(h));
    let up1 = |g: &BaseElement| p.from_factor(Side::First, g);
    let mut middle = s.c1.map_ring(tag, up1);
    if let Some(c2) = &s.c2 {
        middle = middle.direct_sum(&c2.map_ring(tag, |g| p.from_factor(Side::Second, g)))?;
    }
    let top = s.complex.top();
    let t = match s.kind {
        PresKind::Hnn => RingElement::unit(p.stable_nf(true)),
        PresKind::Amalgam => RingElement::zero(),
    };
    let mut e_maps = Vec::new();
    let mut f_maps = Vec::new();
    for r in 0..=top {
        let e1 = s.e1.at(r).map(tag, up1);
        let mut m = RingMatrix::zeros(tag, d.rank(r), middle.rank(r));
        m.place(0, 0, &e1);
        match s.kind {
            PresKind::Amalgam => {
                let e2 = s.e2.at(r).map(tag, |g| p.from_factor(Side::Second, g));
                m.place(0, e1.cols, &e2);
            }
            PresKind::Hnn => {
                let e2 = s.e2.at(r).map(tag, up1);
                for (i, j, x) in e2.entries() {
                    if !x.is_zero() {
                        let twisted = t.mul(p, x);
                        let cur = m.get(i, j).sub(&twisted);
                        m.set(i, j, cur);
                    }
                }
            }
        }
        e_maps.push(m);
        let f1 = s.f1.at(r);
        let mut fm = RingMatrix::zeros(tag, middle.rank(r), s.complex.rank(r));
        fm.place(0, 0, &f1);
        if let Some(f2) = &s.f2 {
            fm.place(f1.rows, 0, &f2.at(r).neg());
        }
        f_maps.push(fm);
    }
    let e = ChainMap::new(d.clone(), middle.clone(), e_maps)?;
    let f = ChainMap::new(middle.clone(), s.complex.clone(), f_maps)?;
    Ok(Assembled { d, middle, e, f })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationClass {
    SubtreeValidity,
    Realization,
    RankMismatch,
    ComplexInvalid,
    ChainMapSquare,
    CompositionNonzero,
    Shape,
    Exactness,
}

impl fmt::Display for ViolationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub class: ViolationClass,
    pub degree: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub degree: usize,
    /// Ranks of D, C1 (+ C2), C over their own rings.
    pub d: usize,
    pub c1: usize,
    pub c2: Option<usize>,
    pub c: usize,
    pub vertices: usize,
    pub edges: usize,
    pub exactness: Option<TreeExactness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
    pub degrees: Vec<DegreeReport>,
}

impl SplitReport {
    pub fn first_class(&self) -> Option<ViolationClass> {
        self.violations.first().map(|v| v.class)
    }
}

fn chain_degree(e: &ChainError) -> Option<usize> {
    match e {
        ChainError::Degree { degree, .. } => Some(*degree),
        ChainError::Ring(_) => None,
    }
}

/// Checks a monomial `+-g` and returns `(sign, g)`.
fn unit_monomial(x: &RingElement<NormalForm>) -> Option<(i32, &NormalForm)> {
    let (g, c) = x.as_monomial()?;
    if *c == BigInt::from(1) {
        Some((1, g))
    } else if *c == BigInt::from(-1) {
        Some((-1, g))
    } else {
        None
    }
}

/// Independent structural verification; stops at the first failing class.
pub fn verify_splitting(p: &Presentation, s: &MVSplitting) -> SplitReport {
    let mut violations = Vec::new();
    let c = &s.complex;
    let top = c.top();
    let degrees: Vec<DegreeReport> = (0..=top)
        .map(|r| {
            let t = s.seq.trees.get(r);
            DegreeReport {
                degree: r,
                d: s.d.rank(r),
                c1: s.c1.rank(r),
                c2: s.c2.as_ref().map(|c2| c2.rank(r)),
                c: c.rank(r),
                vertices: t.map_or(0, |t| t.vertices.len()),
                edges: t.map_or(0, |t| t.edges.len()),
                exactness: None,
            }
        })
        .collect();
    let mut report = SplitReport { pass: false, violations: Vec::new(), degrees };
    let fail = |class, degree, detail: String| Violation { class, degree, detail };

    // subtree validity
    if s.seq.trees.len() != top + 1 {
        violations.push(fail(ViolationClass::SubtreeValidity, None, format!("{} subtrees for top degree {top}", s.seq.trees.len())));
    }
    for (r, t) in s.seq.trees.iter().enumerate() {
        if let Err(v) = validate_subtree(p, t) {
            violations.push(fail(ViolationClass::SubtreeValidity, Some(r), format!("{:?}: {}", v.fault, v.detail)));
        }
    }
    if !violations.is_empty() {
        report.violations = violations;
        return report;
    }

    // realization
    if let Err(e) = check_realization(p, c, &s.seq) {
        let degree = match &e {
            SplitError::Realization { degree, .. } => Some(*degree),
            _ => None,
        };
        report.violations = vec![fail(ViolationClass::Realization, degree, e.to_string())];
        return report;
    }

    // rank accounting against the subtrees
    let amalgam = p.kind == PresKind::Amalgam;
    for r in 0..=top {
        let u = &s.seq.trees[r];
        let cr = c.rank(r);
        let n1 = u.vertices.iter().filter(|v| v.side == Side::First).count();
        let n2 = u.vertices.len() - n1;
        let mut bad = Vec::new();
        if s.d.rank(r) != cr * u.edges.len() || s.d_basis.get(r) != Some(&edge_basis(u, cr)) {
            bad.push(format!("D has rank {}, expected {}", s.d.rank(r), cr * u.edges.len()));
        }
        if s.c1.rank(r) != cr * n1 || s.c1_basis.get(r) != Some(&vertex_basis(u, Side::First, cr)) {
            bad.push(format!("C1 has rank {}, expected {}", s.c1.rank(r), cr * n1));
        }
        match (&s.c2, amalgam) {
            (Some(c2), true) => {
                if c2.rank(r) != cr * n2 || s.c2_basis.get(r) != Some(&vertex_basis(u, Side::Second, cr)) {
                    bad.push(format!("C2 has rank {}, expected {}", c2.rank(r), cr * n2));
                }
            }
            (None, false) => {}
            _ => bad.push("second factor complex present for the wrong kind of presentation".into()),
        }
        if s.f1.source.rank(r) != s.c1.rank(r)
            || s.e1.source.rank(r) != s.d.rank(r)
            || s.e2.source.rank(r) != s.d.rank(r)
            || s.e1.target.rank(r) != s.c1.rank(r)
        {
            bad.push("structure maps disagree with module ranks".into());
        }
        for b in bad {
            violations.push(fail(ViolationClass::RankMismatch, Some(r), b));
        }
    }
    if !violations.is_empty() {
        report.violations = violations;
        return report;
    }

    // complexes
    let g2 = p.factor(Side::Second);
    let checks: Vec<(&str, Result<(), ChainError>)> = vec![
        ("C", c.validate(p)),
        ("D", s.d.validate(p.h.as_ref())),
        ("C1", s.c1.validate(p.g1.as_ref())),
        ("C2", s.c2.as_ref().map_or(Ok(()), |c2| c2.validate(g2.as_ref()))),
    ];
    for (name, res) in checks {
        if let Err(e) = res {
            violations.push(fail(ViolationClass::ComplexInvalid, chain_degree(&e), format!("{name}: {e}")));
        }
    }
    if !violations.is_empty() {
        report.violations = violations;
        return report;
    }

    // chain map squares
    let e2_ring = if amalgam { g2.as_ref() } else { p.g1.as_ref() };
    let checks: Vec<(&str, Result<(), ChainError>)> = vec![
        ("e1", s.e1.check_squares(p.g1.as_ref())),
        ("e2", s.e2.check_squares(e2_ring)),
        ("f1", s.f1.check_squares(p)),
        ("f2", s.f2.as_ref().map_or(Ok(()), |f2| f2.check_squares(p))),
    ];
    for (name, res) in checks {
        if let Err(e) = res {
            violations.push(fail(ViolationClass::ChainMapSquare, chain_degree(&e), format!("{name}: {e}")));
        }
    }
    let asm = match assemble(p, s) {
        Ok(a) => a,
        Err(e) => {
            violations.push(fail(ViolationClass::ChainMapSquare, chain_degree(&e), format!("assembly: {e}")));
            report.violations = violations;
            return report;
        }
    };
    if violations.is_empty() {
        for (name, res) in [("e", asm.e.check_squares(p)), ("f", asm.f.check_squares(p))] {
            if let Err(e) = res {
                violations.push(fail(ViolationClass::ChainMapSquare, chain_degree(&e), format!("{name}: {e}")));
            }
        }
    }
    if !violations.is_empty() {
        report.violations = violations;
        return report;
    }

    // f e = 0
    for r in 0..=top {
        match asm.e.at(r).mul(p, &asm.f.at(r)) {
            Ok(m) if m.is_zero() => {}
            _ => violations.push(fail(ViolationClass::CompositionNonzero, Some(r), "f after e is not zero".into())),
        }
    }
    if !violations.is_empty() {
        report.violations = violations;
        return report;
    }

    // monomial shape: e rows hit exactly the endpoints, f rows are single units
    for r in 0..=top {
        let mut cols: BTreeMap<(TreeVertex, usize), usize> = positions(&s.c1_basis[r]);
        let off = s.c1_basis[r].len();
        for (i, k) in s.c2_basis[r].iter().enumerate() {
            cols.insert(k.clone(), off + i);
        }
        let e = asm.e.at(r);
        for (row, (edge, j)) in s.d_basis[r].iter().enumerate() {
            let (a, b) = endpoints(p, edge);
            let want: BTreeSet<usize> = [cols.get(&(a, *j)), cols.get(&(b, *j))].into_iter().flatten().copied().collect();
            let have: BTreeSet<usize> = (0..e.cols).filter(|&k| !e.get(row, k).is_zero()).collect();
            let units = have.iter().all(|&k| unit_monomial(e.get(row, k)).is_some());
            if want.len() != 2 || have != want || !units {
                violations.push(fail(ViolationClass::Shape, Some(r), format!("row of {} in e", edge_label(p, edge))));
            }
        }
        let f = asm.f.at(r);
        for (row, (v, j)) in s.c1_basis[r].iter().chain(&s.c2_basis[r]).enumerate() {
            let have: Vec<usize> = (0..f.cols).filter(|&k| !f.get(row, k).is_zero()).collect();
            if have != [*j] || unit_monomial(f.get(row, *j)).is_none() {
                violations.push(fail(ViolationClass::Shape, Some(r), format!("row of {} in f", vertex_label(p, v))));
            }
        }
    }
    if !violations.is_empty() {
        report.violations = violations;
        return report;
    }

    // exactness: tree check plus the augmented integer sequence
    for r in 0..=top {
        let verdict = tree_exactness(p, &s.seq.trees[r], c.rank(r));
        let flat_e = IntegerMatrix::augment(&asm.e.at(r));
        let flat_f = IntegerMatrix::augment(&asm.f.at(r));
        let h = integer_homology(&[c.rank(r), asm.middle.rank(r), asm.d.rank(r)], &[flat_f, flat_e]);
        let augmented = h.iter().all(|g| g.is_zero());
        if !verdict.exact || !augmented {
            violations.push(fail(
                ViolationClass::Exactness,
                Some(r),
                format!("tree check {}, augmented sequence {}", verdict.exact, augmented),
            ));
        }
        report.degrees[r].exactness = Some(verdict);
    }
    report.pass = violations.is_empty();
    report.violations = violations;
    report
}

/// Whether `a` sits inside `b` as a subcomplex of every piece, basis element by basis element.
pub fn embeds(a: &MVSplitting, b: &MVSplitting) -> bool {
    fn sub<K: Ord + Clone, E: Ord + Clone>(
        small: &ChainComplex<E>,
        sb: &[Vec<K>],
        big: &ChainComplex<E>,
        bb: &[Vec<K>],
    ) -> bool {
        let top = small.top();
        if big.top() != top {
            return false;
        }
        let pos: Vec<BTreeMap<K, usize>> = bb.iter().map(|x| positions(x)).collect();
        for r in 1..=top {
            let (ds, db) = (small.d(r), big.d(r));
            let inner: BTreeSet<usize> = match sb[r - 1].iter().map(|k| pos[r - 1].get(k).copied()).collect::<Option<_>>() {
                Some(s) => s,
                None => return false,
            };
            for (i, k) in sb[r].iter().enumerate() {
                let Some(&bi) = pos[r].get(k) else { return false };
                for (j, kk) in sb[r - 1].iter().enumerate() {
                    if ds.get(i, j) != db.get(bi, pos[r - 1][kk]) {
                        return false;
                    }
                }
                if (0..db.cols).any(|col| !inner.contains(&col) && !db.get(bi, col).is_zero()) {
                    return false;
                }
            }
        }
        true
    }
    a.seq.trees.iter().zip(&b.seq.trees).all(|(x, y)| x.is_subset(y))
        && sub(&a.d, &a.d_basis, &b.d, &b.d_basis)
        && sub(&a.c1, &a.c1_basis, &b.c1, &b.c1_basis)
        && match (&a.c2, &b.c2) {
            (Some(x), Some(y)) => sub(x, &a.c2_basis, y, &b.c2_basis),
            (None, None) => true,
            _ => false,
        }
}
