//! Combinatorial transversality on equivariant cell complexes: domains cut out by
//! subtree sequences, Seifert-van Kampen splittings, and the chain-level plus construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algsplit::{assemble, build_splitting, default_seed, extend_sequence, realize, MVSplitting, SplitError, SubtreeSequence};
use crate::amalgam::{CosetKind, NormalForm, PresKind, Presentation, Side};
use crate::chain::{double_mapping_cylinder, mapping_cone, ChainComplex, ChainError, ChainMap};
use crate::groupring::{restrict_component, RingElement, RingMatrix};
use crate::groups::{tokenize, BaseElement, BaseGroup, Group};
use crate::oracle::{acyclic_cone, smith, ConeVerdict, IntegerMatrix};
use crate::tree::{incident_edges, vertex_kind, FiniteSubtree, TreeItem, TreeVertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CwError {
    #[error("invalid cell complex: {0}")]
    Invalid(String),
    #[error("certificate not found for {piece} after {rounds} repair rounds")]
    CertificateNotFound { piece: String, rounds: usize },
    #[error("certificate for {0} does not re-verify")]
    Certificate(String),
    #[error("{piece} disagrees with the algebraic splitting in degree {degree}")]
    Mismatch { piece: String, degree: usize },
    #[error("word `{word}`: {reason}")]
    Word { word: String, reason: String },
    #[error("loop `{word}` does not bound in the source complex")]
    DoesNotBound { word: String },
    #[error("{piece} is missing the image `{image}` of a loop of Y")]
    Containment { piece: String, image: String },
    #[error("the voltage map does not reach every element of {0}")]
    NotSurjective(String),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// A 1-cell running from `tail_elem * D_tail` to `head_elem * D_head`; its boundary row is
/// `head_elem * D_head - tail_elem * D_tail`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Incidence<E> {
    pub tail: usize,
    pub tail_elem: E,
    pub head: usize,
    pub head_elem: E,
}

/// Cellular chains of the cover of a finite complex, one lift chosen per cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantCW {
    pub name: String,
    pub cells: Vec<Vec<String>>,
    pub edges: Vec<Incidence<NormalForm>>,
    pub complex: ChainComplex<NormalForm>,
    pub base: usize,
}

fn edge_row<E: Ord + Clone>(zero_cells: usize, inc: &Incidence<E>) -> Vec<RingElement<E>> {
    let mut row = vec![RingElement::zero(); zero_cells];
    row[inc.head].add_term(inc.head_elem.clone(), BigInt::one());
    row[inc.tail].add_term(inc.tail_elem.clone(), -BigInt::one());
    row
}

impl EquivariantCW {
    /// `higher[k]` is the boundary of the `(k+2)`-cells.
    pub fn new(
        p: &Presentation,
        name: &str,
        cells: Vec<Vec<String>>,
        edges: Vec<Incidence<NormalForm>>,
        higher: Vec<RingMatrix<NormalForm>>,
        base: usize,
    ) -> Result<Self, CwError> {
        let tag = p.id();
        if cells.is_empty() || cells[0].is_empty() {
            return Err(CwError::Invalid("no 0-cells".into()));
        }
        let zero = cells[0].len();
        let mut diffs = Vec::new();
        if cells.len() > 1 {
            if edges.len() != cells[1].len() {
                return Err(CwError::Invalid(format!("{} incidences for {} 1-cells", edges.len(), cells[1].len())));
            }
            if edges.iter().any(|e| e.tail >= zero || e.head >= zero) {
                return Err(CwError::Invalid("1-cell attached to an unknown 0-cell".into()));
            }
            let rows = edges.iter().map(|e| edge_row(zero, e)).collect();
            diffs.push(RingMatrix::from_rows(tag, zero, rows).map_err(|e| CwError::Invalid(e.to_string()))?);
        }
        diffs.extend(higher);
        let ranks = cells.iter().map(Vec::len).collect();
        let complex = ChainComplex::new(tag, ranks, diffs)?;
        Ok(EquivariantCW { name: name.to_string(), cells, edges, complex, base })
    }

    pub fn top(&self) -> usize {
        self.complex.top()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CwReport {
    pub pass: bool,
    pub violations: Vec<String>,
}

fn union_find_components(n: usize, links: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut comps = n;
    for (a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps
}

pub fn validate_cw(p: &Presentation, w: &EquivariantCW) -> CwReport {
    let mut violations = Vec::new();
    if let Err(e) = w.complex.validate(p) {
        violations.push(format!("complex: {e}"));
    }
    if w.cells.iter().map(Vec::len).collect::<Vec<_>>() != w.complex.ranks {
        violations.push("cell names do not match the ranks".into());
    }
    let zero = w.complex.rank(0);
    if w.base >= zero {
        violations.push(format!("base 0-cell {} out of range", w.base));
    }
    if w.complex.top() >= 1 {
        let d1 = w.complex.d(1);
        for (i, inc) in w.edges.iter().enumerate() {
            let name = w.cells[1].get(i).cloned().unwrap_or_default();
            let row: Vec<RingElement<NormalForm>> = d1.row(i).to_vec();
            let aug: BigInt = row.iter().map(RingElement::augmentation).sum();
            if !aug.is_zero() {
                violations.push(format!("1-cell {name}: boundary has augmentation {aug}"));
                continue;
            }
            if inc.tail >= zero || inc.head >= zero || row != edge_row(zero, inc) {
                violations.push(format!("1-cell {name}: boundary is not the difference of its two ends"));
            }
        }
    }
    if zero > 0 && union_find_components(zero, w.edges.iter().map(|e| (e.tail, e.head))) != 1 {
        violations.push("the 1-skeleton of the quotient is disconnected".into());
    }
    CwReport { pass: violations.is_empty(), violations }
}

/// Quotient of a domain piece: a finite complex over a base group ring with voltages on its 1-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoltageComplex {
    pub group: Arc<BaseGroup>,
    pub names: Vec<Vec<String>>,
    pub edges: Vec<Incidence<BaseElement>>,
    pub complex: ChainComplex<BaseElement>,
    pub base: usize,
}

impl VoltageComplex {
    pub fn new(
        group: Arc<BaseGroup>,
        names: Vec<Vec<String>>,
        edges: Vec<Incidence<BaseElement>>,
        higher: Vec<RingMatrix<BaseElement>>,
    ) -> Result<Self, CwError> {
        let tag = group.id().clone();
        let zero = names.first().map_or(0, Vec::len);
        let mut diffs = Vec::new();
        if names.len() > 1 {
            let rows = edges.iter().map(|e| edge_row(zero, e)).collect();
            diffs.push(RingMatrix::from_rows(&tag, zero, rows).map_err(|e| CwError::Invalid(e.to_string()))?);
        }
        diffs.extend(higher);
        let ranks = names.iter().map(Vec::len).collect();
        let complex = ChainComplex::new(&tag, ranks, diffs)?;
        Ok(VoltageComplex { group, names, edges, complex, base: 0 })
    }

    /// Voltage picked up walking an edge forward: `tail_elem^-1 head_elem`.
    pub fn voltage(&self, i: usize) -> BaseElement {
        let e = &self.edges[i];
        self.group.mul(&self.group.inv(&e.tail_elem), &e.head_elem)
    }

    pub fn cell_index(&self, dim: usize, name: &str) -> Option<usize> {
        self.names.get(dim)?.iter().position(|n| n == name)
    }
}

/// Spanning tree with potentials and the holonomies of the remaining edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub piece: String,
    pub nodes: usize,
    pub tree: Vec<usize>,
    pub potentials: Vec<Option<BaseElement>>,
    pub holonomies: Vec<BaseElement>,
    pub connected: bool,
    pub generates: bool,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.connected && self.generates
    }
}

pub fn certify(piece: &str, vc: &VoltageComplex) -> Certificate {
    let g = &vc.group;
    let n = vc.names.first().map_or(0, Vec::len);
    let mut potentials: Vec<Option<BaseElement>> = vec![None; n];
    let mut tree = Vec::new();
    let mut in_tree = vec![false; vc.edges.len()];
    if n > 0 {
        let root = vc.base.min(n - 1);
        potentials[root] = Some(g.identity());
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in vc.edges.iter().enumerate() {
            incident[e.tail].push(i);
            if e.head != e.tail {
                incident[e.head].push(i);
            }
        }
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let px = potentials[x].clone().unwrap();
            for &i in &incident[x] {
                let e = &vc.edges[i];
                let a = vc.voltage(i);
                let step = if e.tail == x && potentials[e.head].is_none() {
                    Some((e.head, g.mul(&px, &a)))
                } else if e.head == x && potentials[e.tail].is_none() {
                    Some((e.tail, g.mul(&px, &g.inv(&a))))
                } else {
                    None
                };
                if let Some((y, py)) = step {
                    potentials[y] = Some(py);
                    in_tree[i] = true;
                    tree.push(i);
                    queue.push_back(y);
                }
            }
        }
    }
    let connected = n > 0 && potentials.iter().all(Option::is_some);
    let holonomies: Vec<BaseElement> = if connected {
        (0..vc.edges.len())
            .filter(|i| !in_tree[*i])
            .map(|i| {
                let e = &vc.edges[i];
                let (pt, ph) = (potentials[e.tail].clone().unwrap(), potentials[e.head].clone().unwrap());
                g.mul(&g.mul(&pt, &vc.voltage(i)), &g.inv(&ph))
            })
            .collect()
    } else {
        Vec::new()
    };
    let generates = connected && g.generated_by(&holonomies);
    Certificate { piece: piece.to_string(), nodes: n, tree, potentials, holonomies, connected, generates }
}

/// Re-derives everything a certificate claims from the complex alone.
pub fn recheck(vc: &VoltageComplex, cert: &Certificate) -> bool {
    let g = &vc.group;
    let n = vc.names.first().map_or(0, Vec::len);
    if cert.nodes != n || n == 0 || cert.tree.len() + 1 != n || cert.potentials.len() != n {
        return false;
    }
    let Some(pots) = cert.potentials.iter().cloned().collect::<Option<Vec<_>>>() else { return false };
    if !pots.iter().all(|x| g.contains(x)) {
        return false;
    }
    if union_find_components(n, cert.tree.iter().filter_map(|&i| vc.edges.get(i)).map(|e| (e.tail, e.head))) != 1 {
        return false;
    }
    for &i in &cert.tree {
        let Some(e) = vc.edges.get(i) else { return false };
        if pots[e.head] != g.mul(&pots[e.tail], &vc.voltage(i)) {
            return false;
        }
    }
    let tree: BTreeSet<usize> = cert.tree.iter().copied().collect();
    let hol: Vec<BaseElement> = (0..vc.edges.len())
        .filter(|i| !tree.contains(i))
        .map(|i| {
            let e = &vc.edges[i];
            g.mul(&g.mul(&pots[e.tail], &vc.voltage(i)), &g.inv(&pots[e.head]))
        })
        .collect();
    hol == cert.holonomies && cert.connected && cert.generates == g.generated_by(&hol)
}

/// Which piece of the domain a quotient describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    X1,
    X2,
    Y,
}

impl Piece {
    pub fn label(self) -> &'static str {
        match self {
            Piece::X1 => "X1",
            Piece::X2 => "X2",
            Piece::Y => "Y",
        }
    }
}

/// Cosets of the piece in degree `r`, sorted, as normal form keys.
fn piece_keys(u: &FiniteSubtree, piece: Piece) -> Vec<NormalForm> {
    match piece {
        Piece::X1 => u.vertices.iter().filter(|v| v.side == Side::First).map(|v| v.key.clone()).collect(),
        Piece::X2 => u.vertices.iter().filter(|v| v.side == Side::Second).map(|v| v.key.clone()).collect(),
        Piece::Y => u.edges.iter().map(|e| e.key.clone()).collect(),
    }
}

fn piece_kind(piece: Piece) -> CosetKind {
    match piece {
        Piece::X1 => CosetKind::G1,
        Piece::X2 => CosetKind::G2,
        Piece::Y => CosetKind::H,
    }
}

fn piece_group(p: &Presentation, piece: Piece) -> Arc<BaseGroup> {
    match piece {
        Piece::X1 => p.g1.clone(),
        Piece::X2 => p.factor(Side::Second).clone(),
        Piece::Y => p.h.clone(),
    }
}

fn ratio(p: &Presentation, g: &NormalForm, key: &NormalForm, piece: Piece) -> Option<BaseElement> {
    let q = p.nf_multiply(g, &p.nf_invert(key));
    match piece {
        Piece::X1 => p.to_factor(&q, Side::First),
        Piece::X2 => p.to_factor(&q, Side::Second),
        Piece::Y => p.to_h(&q),
    }
}

pub fn quotient_cell_name(cell: &str, index: usize) -> String {
    format!("{cell}_{index}")
}

/// Translated cells `(coset, cell)` of the piece, degree by degree.
pub fn domain_cells(w: &EquivariantCW, u: &SubtreeSequence, piece: Piece) -> Vec<Vec<(NormalForm, usize)>> {
    (0..=w.top())
        .map(|r| {
            let keys = piece_keys(&u.trees[r], piece);
            keys.into_iter().flat_map(|k| (0..w.complex.rank(r)).map(move |j| (k.clone(), j))).collect()
        })
        .collect()
}

/// Quotient of a domain piece by its stabilizer, computed cell by cell from the cover.
pub fn quotient(p: &Presentation, w: &EquivariantCW, u: &SubtreeSequence, piece: Piece) -> Result<VoltageComplex, CwError> {
    let group = piece_group(p, piece);
    let tag = group.id().clone();
    let kind = piece_kind(piece);
    let cells = domain_cells(w, u, piece);
    let index: Vec<BTreeMap<(NormalForm, usize), usize>> =
        cells.iter().map(|c| c.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect()).collect();
    let key_index: Vec<BTreeMap<NormalForm, usize>> = (0..=w.top())
        .map(|r| piece_keys(&u.trees[r], piece).into_iter().enumerate().map(|(i, k)| (k, i)).collect())
        .collect();
    let names: Vec<Vec<String>> = cells
        .iter()
        .enumerate()
        .map(|(r, cs)| cs.iter().map(|(k, j)| quotient_cell_name(&w.cells[r][*j], key_index[r][k])).collect())
        .collect();
    let missing = |degree: usize| CwError::Mismatch { piece: piece.label().into(), degree };
    let mut edges = Vec::new();
    if w.top() >= 1 {
        for (key, j) in &cells[1] {
            let inc = &w.edges[*j];
            let end = |cell: usize, elem: &NormalForm| -> Result<(usize, BaseElement), CwError> {
                let g = p.nf_multiply(key, elem);
                let c = p.coset_key_unchecked(&g, kind);
                let pos = *index[0].get(&(c.clone(), cell)).ok_or_else(|| missing(1))?;
                Ok((pos, ratio(p, &g, &c, piece).ok_or_else(|| missing(1))?))
            };
            let (tail, tail_elem) = end(inc.tail, &inc.tail_elem)?;
            let (head, head_elem) = end(inc.head, &inc.head_elem)?;
            edges.push(Incidence { tail, tail_elem, head, head_elem });
        }
    }
    let mut higher = Vec::new();
    for r in 2..=w.top() {
        let d = w.complex.d(r);
        let mut m = RingMatrix::zeros(&tag, cells[r].len(), cells[r - 1].len());
        for (row, (key, j)) in cells[r].iter().enumerate() {
            for k in 0..d.cols {
                let x = d.get(*j, k).left_shift(p, key);
                for g in x.support() {
                    let c = p.coset_key_unchecked(g, kind);
                    let col = *index[r - 1].get(&(c.clone(), k)).ok_or_else(|| missing(r))?;
                    if m.get(row, col).is_zero() {
                        m.set(row, col, restrict_component(p, &x, kind, &c));
                    }
                }
            }
        }
        higher.push(m);
    }
    let mut vc = VoltageComplex::new(group, names, edges, higher)?;
    vc.base = cells[0].iter().position(|(_, j)| *j == w.base).unwrap_or(0);
    Ok(vc)
}

fn pieces(p: &Presentation) -> Vec<Piece> {
    match p.kind {
        PresKind::Amalgam => vec![Piece::X1, Piece::X2, Piece::Y],
        PresKind::Hnn => vec![Piece::X1, Piece::Y],
    }
}

/// Realized sequence whose domain pieces are connected, with their certificates.
#[derive(Clone, Debug)]
pub struct CwRealization {
    pub seq: SubtreeSequence,
    pub certificates: Vec<Certificate>,
    pub rounds: usize,
    pub fundamental: bool,
    /// Cell count identity of a fundamental domain, when the flag is set.
    pub counts_agree: Option<bool>,
}

fn is_fundamental(u: &SubtreeSequence) -> bool {
    u.trees.iter().all(|t| (t.vertices.len() == 1 && t.edges.is_empty()) || (t.vertices.len() == 2 && t.edges.len() == 1))
}

fn cell_counts_agree(p: &Presentation, w: &EquivariantCW, u: &SubtreeSequence) -> bool {
    (0..=w.top()).all(|r| {
        let t = &u.trees[r];
        let c = w.complex.rank(r) as isize;
        let n1 = t.vertices.iter().filter(|v| v.side == Side::First).count() as isize;
        let n2 = t.vertices.len() as isize - n1;
        let ne = t.edges.len() as isize;
        match p.kind {
            PresKind::Amalgam => c * (n1 + n2 - ne) == c,
            PresKind::Hnn => c * (n1 - ne) == c,
        }
    })
}

/// A 1-cell whose ends coincide has a zero boundary row, so the chain-level
/// realization never asks for its endpoint; the pieces still need it.
fn close_faces(p: &Presentation, w: &EquivariantCW, u: SubtreeSequence) -> SubtreeSequence {
    if w.top() == 0 {
        return u;
    }
    let mut targets = vec![Vec::new(); w.top() + 1];
    for v in &u.trees[1].vertices {
        for inc in w.edges.iter().filter(|e| e.tail == e.head && e.tail_elem == e.head_elem) {
            let g = p.nf_multiply(&v.key, &inc.tail_elem);
            let end = TreeVertex { side: v.side, key: p.coset_key_unchecked(&g, vertex_kind(v.side)) };
            if !u.trees[0].vertices.contains(&end) {
                targets[0].push(TreeItem::Vertex(end));
            }
        }
    }
    if targets[0].is_empty() {
        u
    } else {
        extend_sequence(p, &w.complex, &u, &targets)
    }
}

/// Repair stops once the subtrees hold this many vertices and edges in total;
/// each round can multiply their size by the valence of the tree.
pub const REPAIR_BUDGET: usize = 4000;

pub fn cw_realize(p: &Presentation, w: &EquivariantCW, seed: &FiniteSubtree, max_rounds: usize) -> Result<CwRealization, CwError> {
    let report = validate_cw(p, w);
    if !report.pass {
        return Err(CwError::Invalid(report.violations.join("; ")));
    }
    let mut u = close_faces(p, w, realize(p, &w.complex, seed));
    for round in 0..=max_rounds {
        let mut certificates = Vec::new();
        for piece in pieces(p) {
            certificates.push(certify(piece.label(), &quotient(p, w, &u, piece)?));
        }
        if let Some(bad) = certificates.iter().find(|c| !c.holds()) {
            if round == max_rounds {
                return Err(CwError::CertificateNotFound { piece: bad.piece.clone(), rounds: max_rounds });
            }
            // grow the low-dimensional subtrees by one layer of edges
            let low = w.top().min(1);
            let mut targets = vec![Vec::new(); w.top() + 1];
            for v in &u.trees[0].vertices {
                for e in incident_edges(p, v, 1) {
                    targets[low].push(TreeItem::Edge(e));
                }
            }
            u = close_faces(p, w, extend_sequence(p, &w.complex, &u, &targets));
            let size: usize = u.trees.iter().map(|t| t.vertices.len() + t.edges.len()).sum();
            if size > REPAIR_BUDGET {
                return Err(CwError::CertificateNotFound { piece: bad.piece.clone(), rounds: round + 1 });
            }
            continue;
        }
        let fundamental = is_fundamental(&u);
        let counts_agree = fundamental.then(|| cell_counts_agree(p, w, &u));
        return Ok(CwRealization { seq: u, certificates, rounds: round, fundamental, counts_agree });
    }
    unreachable!("loop returns on the last round")
}

pub fn cw_realize_default(p: &Presentation, w: &EquivariantCW) -> Result<CwRealization, CwError> {
    cw_realize(p, w, &default_seed(p), 6)
}

#[derive(Clone, Debug)]
pub struct SvKSplitting {
    pub x1: VoltageComplex,
    pub x2: Option<VoltageComplex>,
    pub y: VoltageComplex,
    /// One cell of dimension `r + 1` per `r`-cell of Y.
    pub cylinder_cells: Vec<Vec<String>>,
    pub splitting: MVSplitting,
    /// Cellular chains of the cover of X(U) over Z[G].
    pub total: ChainComplex<NormalForm>,
    /// Induced projection onto the chains of the cover of W.
    pub projection: ChainMap<NormalForm>,
    pub verdict: ConeVerdict,
    pub fundamental: bool,
}

/// Block chain map from the glued total complex onto C, given the blocks of each degree.
fn glued_projection(
    p: &Presentation,
    total: &ChainComplex<NormalForm>,
    c: &ChainComplex<NormalForm>,
    blocks: impl Fn(usize) -> Vec<(usize, RingMatrix<NormalForm>)>,
) -> Result<ChainMap<NormalForm>, ChainError> {
    let maps = (0..=total.top())
        .map(|r| {
            let mut m = RingMatrix::zeros(p.id(), total.rank(r), c.rank(r));
            for (off, b) in blocks(r) {
                m.place(off, 0, &b);
            }
            m
        })
        .collect();
    ChainMap::new(total.clone(), c.clone(), maps)
}

/// Total complex of the cover of X(U) and its projection onto C.
fn glue(p: &Presentation, s: &MVSplitting) -> Result<(ChainComplex<NormalForm>, ChainMap<NormalForm>), ChainError> {
    let asm = assemble(p, s)?;
    let c = &s.complex;
    match p.kind {
        PresKind::Amalgam => {
            let n1 = s.c1.ranks.clone();
            let split = |r: usize| n1.get(r).copied().unwrap_or(0);
            let (c1g, c2g) = {
                let c1g = s.c1.map_ring(p.id(), |g| p.from_factor(Side::First, g));
                let c2g = s.c2.as_ref().unwrap().map_ring(p.id(), |g| p.from_factor(Side::Second, g));
                (c1g, c2g)
            };
            let e1 = ChainMap::new(
                asm.d.clone(),
                c1g,
                (0..=c.top()).map(|r| asm.e.at(r).block(0..asm.d.rank(r), 0..split(r))).collect(),
            )?;
            let e2 = ChainMap::new(
                asm.d.clone(),
                c2g,
                (0..=c.top()).map(|r| asm.e.at(r).block(0..asm.d.rank(r), split(r)..asm.middle.rank(r))).collect(),
            )?;
            let dc = double_mapping_cylinder(p, &e1, &e2)?;
            let f = asm.f.clone();
            let offsets = dc.offsets.clone();
            let proj = glued_projection(p, &dc.complex, c, |r| {
                let f_r = f.at(r);
                let k = split(r);
                let mut out = vec![(0, f_r.block(0..k, 0..f_r.cols))];
                if r < offsets.len() {
                    out.push((offsets[r].1, f_r.block(k..f_r.rows, 0..f_r.cols)));
                }
                out
            })?;
            Ok((dc.complex, proj))
        }
        PresKind::Hnn => {
            let cone = mapping_cone(p, &asm.e)?;
            let f = asm.f.clone();
            let proj = glued_projection(p, &cone, c, |r| vec![(0, f.at(r))])?;
            Ok((cone, proj))
        }
    }
}

pub fn build_svk(p: &Presentation, w: &EquivariantCW, real: &CwRealization, window: usize) -> Result<SvKSplitting, CwError> {
    let u = &real.seq;
    let mut quotients = BTreeMap::new();
    for piece in pieces(p) {
        let vc = quotient(p, w, u, piece)?;
        let cert = real
            .certificates
            .iter()
            .find(|c| c.piece == piece.label())
            .ok_or_else(|| CwError::Certificate(piece.label().into()))?;
        if !recheck(&vc, cert) {
            return Err(CwError::Certificate(piece.label().into()));
        }
        quotients.insert(piece.label(), vc);
    }
    let splitting = build_splitting(p, &w.complex, u)?;
    let agree = |piece: &str, mine: &ChainComplex<BaseElement>, theirs: &ChainComplex<BaseElement>| {
        for r in 0..=mine.top().max(theirs.top()) {
            if mine.rank(r) != theirs.rank(r) || mine.d(r) != theirs.d(r) {
                return Err(CwError::Mismatch { piece: piece.into(), degree: r });
            }
        }
        Ok(())
    };
    agree("X1", &quotients["X1"].complex, &splitting.c1)?;
    if let Some(c2) = &splitting.c2 {
        agree("X2", &quotients["X2"].complex, c2)?;
    }
    agree("Y", &quotients["Y"].complex, &splitting.d)?;
    let (total, projection) = glue(p, &splitting)?;
    total.validate(p)?;
    projection.check_squares(p)?;
    let verdict = acyclic_cone(p, &projection, window);
    let y = quotients.remove("Y").unwrap();
    let cylinder_cells = std::iter::once(Vec::new())
        .chain(y.names.iter().map(|cs| cs.iter().map(|c| format!("{c}*I")).collect()))
        .collect();
    Ok(SvKSplitting {
        x1: quotients.remove("X1").unwrap(),
        x2: quotients.remove("X2"),
        y,
        cylinder_cells,
        splitting,
        total,
        projection,
        verdict,
        fundamental: real.fundamental,
    })
}

/// Edge path read from a word in 1-cell names: `(edge, forward)` steps.
pub fn parse_path(k: &VoltageComplex, word: &str) -> Result<Vec<(usize, bool)>, CwError> {
    let bad = |reason: String| CwError::Word { word: word.to_string(), reason };
    let mut out = Vec::new();
    for (sym, pow) in tokenize(word).map_err(|e| bad(e.to_string()))? {
        let i = k.cell_index(1, &sym).ok_or_else(|| bad(format!("unknown 1-cell `{sym}`")))?;
        out.extend(std::iter::repeat((i, pow > 0)).take(pow.unsigned_abs() as usize));
    }
    Ok(out)
}

/// 1-chain of the lift of a closed edge path starting at the identity translate.
pub fn loop_chain(k: &VoltageComplex, word: &str) -> Result<Vec<RingElement<BaseElement>>, CwError> {
    let g = &k.group;
    let bad = |reason: &str| CwError::Word { word: word.to_string(), reason: reason.to_string() };
    let path = parse_path(k, word)?;
    let mut chain = vec![RingElement::zero(); k.edges.len()];
    let Some(&(first, fwd)) = path.first() else { return Ok(chain) };
    let origin = if fwd { k.edges[first].tail } else { k.edges[first].head };
    let (mut node, mut at) = (origin, g.identity());
    for (i, forward) in path {
        let e = &k.edges[i];
        let (from, from_elem, to, to_elem) = if forward {
            (e.tail, &e.tail_elem, e.head, &e.head_elem)
        } else {
            (e.head, &e.head_elem, e.tail, &e.tail_elem)
        };
        if from != node {
            return Err(bad("consecutive 1-cells do not meet"));
        }
        let delta = g.mul(&at, &g.inv(from_elem));
        chain[i].add_term(delta.clone(), if forward { BigInt::one() } else { -BigInt::one() });
        at = g.mul(&delta, to_elem);
        node = to;
    }
    if node != origin {
        return Err(bad("path is not closed"));
    }
    if at != g.identity() {
        return Err(bad("holonomy is not trivial, so the loop is not in the kernel"));
    }
    Ok(chain)
}

fn row_matrix(tag: &Arc<str>, row: &[RingElement<BaseElement>]) -> RingMatrix<BaseElement> {
    RingMatrix::from_rows(tag, row.len(), vec![row.to_vec()]).expect("one row")
}

/// Integer solution of `w d = z` over a finite group, expanded over all elements.
fn solve_finite(g: &BaseGroup, d: &RingMatrix<BaseElement>, z: &[RingElement<BaseElement>]) -> Option<Vec<RingElement<BaseElement>>> {
    let elems = g.elements()?;
    let pos: BTreeMap<&BaseElement, usize> = elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let n = elems.len();
    let mut target = vec![BigInt::zero(); d.cols * n];
    for (j, x) in z.iter().enumerate() {
        for (s, c) in x.terms() {
            target[j * n + pos[s]] += c;
        }
    }
    if d.rows == 0 {
        return target.iter().all(Zero::is_zero).then(Vec::new);
    }
    let mut m = IntegerMatrix::zeros(d.rows * n, d.cols * n);
    for (i, j, x) in d.entries() {
        for (a, ga) in elems.iter().enumerate() {
            for (s, c) in x.terms() {
                m.data[i * n + a][j * n + pos[&g.mul(ga, s)]] += c;
            }
        }
    }
    let y = smith(&m).solve_row(&m, &target)?;
    Some(
        (0..d.rows)
            .map(|i| RingElement::from_terms((0..n).map(|a| (elems[a].clone(), y[i * n + a].clone()))))
            .collect(),
    )
}

#[derive(Clone, Debug)]
pub struct PlusConstructionData {
    pub source: VoltageComplex,
    pub words: Vec<String>,
    pub attaching: Vec<Vec<RingElement<BaseElement>>>,
    pub fillings: Vec<Vec<RingElement<BaseElement>>>,
    pub output: VoltageComplex,
    /// `K'/K`: rank n in degrees 2 and 3, identity differential.
    pub relative: ChainComplex<BaseElement>,
    pub inclusion: ChainMap<BaseElement>,
    pub verdict: ConeVerdict,
}

/// Attaches a 2-cell along each kernel loop and a 3-cell killing it against a filling.
///
/// A filling `w` with `w d_2` equal to the attaching chain is taken from `fillings`,
/// is zero when the attaching chain vanishes, or is solved for over a finite group.
pub fn plus_construction(
    k: &VoltageComplex,
    words: &[String],
    fillings: &[Option<Vec<RingElement<BaseElement>>>],
    window: usize,
) -> Result<PlusConstructionData, CwError> {
    let g = k.group.clone();
    let tag = g.id().clone();
    k.complex.validate(g.as_ref())?;
    if !certify("K", k).holds() {
        return Err(CwError::NotSurjective(g.name().to_string()));
    }
    let n = words.len();
    let one = g.identity();
    let d2 = k.complex.d(2);
    let mut attaching = Vec::new();
    let mut fills = Vec::new();
    for (i, word) in words.iter().enumerate() {
        let z = loop_chain(k, word)?;
        let w = match fillings.get(i).cloned().flatten() {
            Some(w) => {
                let fits = w.len() == d2.rows
                    && row_matrix(&tag, &w).mul(g.as_ref(), &d2).map_err(ChainError::from)?.row(0) == z.as_slice();
                if !fits {
                    return Err(CwError::Word { word: word.clone(), reason: "supplied filling has the wrong boundary".into() });
                }
                w
            }
            None if z.iter().all(RingElement::is_zero) => vec![RingElement::zero(); d2.rows],
            None => solve_finite(&g, &d2, &z).ok_or_else(|| CwError::DoesNotBound { word: word.clone() })?,
        };
        attaching.push(z);
        fills.push(w);
    }
    let top = if n == 0 { k.complex.top() } else { k.complex.top().max(3) };
    let base = k.complex.padded(top);
    let mut names = k.names.clone();
    names.resize(top + 1, Vec::new());
    let mut ranks = base.ranks.clone();
    if n > 0 {
        ranks[2] += n;
        ranks[3] += n;
        names[2].extend((0..n).map(|i| format!("plus2_{i}")));
        names[3].extend((0..n).map(|i| format!("plus3_{i}")));
    }
    let mut higher = Vec::new();
    for r in 2..=top {
        let mut m = RingMatrix::zeros(&tag, ranks[r], ranks[r - 1]);
        m.place(0, 0, &base.d(r));
        if n > 0 && r == 2 {
            for (i, z) in attaching.iter().enumerate() {
                m.place(base.rank(2) + i, 0, &row_matrix(&tag, z));
            }
        }
        if n > 0 && r == 3 {
            for (i, w) in fills.iter().enumerate() {
                let neg: Vec<_> = w.iter().map(RingElement::neg).collect();
                m.place(base.rank(3) + i, 0, &row_matrix(&tag, &neg));
                m.set(base.rank(3) + i, base.rank(2) + i, RingElement::unit(one.clone()));
            }
        }
        higher.push(m);
    }
    let mut output = VoltageComplex::new(g.clone(), names, k.edges.clone(), higher)?;
    output.base = k.base;
    output.complex.validate(g.as_ref())?;
    let rel_ranks: Vec<usize> = (0..=top).map(|r| ranks[r] - base.rank(r)).collect();
    let rel_diffs = (1..=top)
        .map(|r| output.complex.d(r).block(base.rank(r)..ranks[r], base.rank(r - 1)..ranks[r - 1]))
        .collect();
    let relative = ChainComplex::new(&tag, rel_ranks, rel_diffs)?;
    let maps = (0..=top)
        .map(|r| {
            let mut m = RingMatrix::zeros(&tag, base.rank(r), ranks[r]);
            m.place(0, 0, &RingMatrix::identity(&tag, base.rank(r), &one));
            m
        })
        .collect();
    let inclusion = ChainMap::new(base, output.complex.clone(), maps)?;
    inclusion.check_squares(g.as_ref())?;
    let verdict = acyclic_cone(g.as_ref(), &inclusion, window);
    Ok(PlusConstructionData { source: k.clone(), words: words.to_vec(), attaching, fillings: fills, output, relative, inclusion, verdict })
}

/// Kernel words for each piece of a splitting, in quotient 1-cell names.
#[derive(Clone, Debug, Default)]
pub struct KernelWords {
    pub y: Vec<String>,
    pub x1: Vec<String>,
    pub x2: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RefinedSplitting {
    pub y: PlusConstructionData,
    pub x1: PlusConstructionData,
    pub x2: Option<PlusConstructionData>,
    pub e1: ChainMap<BaseElement>,
    pub e2: ChainMap<BaseElement>,
    /// Inclusion of the glued complex over Z[G] into the refined one.
    pub inclusion: ChainMap<NormalForm>,
    pub verdict: ConeVerdict,
}

/// A structure map from Y into an X piece together with the homomorphism from H it uses.
struct Structure<'a> {
    map: &'a ChainMap<BaseElement>,
    hom: &'a dyn Fn(&BaseElement) -> BaseElement,
}

/// Name of the image of a Y path under a structure map.
fn image_word(y: &VoltageComplex, x: &VoltageComplex, map: &ChainMap<BaseElement>, word: &str) -> Result<String, CwError> {
    let m = map.at(1);
    let mut parts = Vec::new();
    for (i, fwd) in parse_path(y, word)? {
        let col = (0..m.cols)
            .find(|&c| !m.get(i, c).is_zero())
            .ok_or_else(|| CwError::Word { word: word.into(), reason: "1-cell has no image".into() })?;
        let name = &x.names[1][col];
        parts.push(if fwd { name.clone() } else { format!("{name}^-1") });
    }
    Ok(parts.join(" "))
}

/// Plus construction on one X piece, compatible with every structure map into it.
fn refine_piece(
    piece: &str,
    yq: &VoltageComplex,
    y_words: &[String],
    y_plus: &PlusConstructionData,
    xq: &VoltageComplex,
    x_words: &[String],
    structures: &[Structure],
    window: usize,
) -> Result<(PlusConstructionData, Vec<ChainMap<BaseElement>>), CwError> {
    let xg = xq.group.clone();
    let xtag = xg.id().clone();
    let x_paths: Vec<_> = x_words.iter().map(|w| parse_path(xq, w)).collect::<Result<_, _>>()?;
    let mut fillings: Vec<Option<Vec<RingElement<BaseElement>>>> = vec![None; x_words.len()];
    let mut links = vec![Vec::new(); structures.len()];
    for (s, st) in structures.iter().enumerate() {
        for (i, yw) in y_words.iter().enumerate() {
            let img = image_word(yq, xq, st.map, yw)?;
            let path = parse_path(xq, &img)?;
            let j = x_paths
                .iter()
                .position(|q| *q == path)
                .ok_or_else(|| CwError::Containment { piece: piece.into(), image: img.clone() })?;
            // the image lift starts at the translate the degree-0 map assigns to the first node
            let gamma = match parse_path(yq, yw)?.first() {
                Some(&(e, fwd)) => {
                    let node = if fwd { yq.edges[e].tail } else { yq.edges[e].head };
                    let m0 = st.map.at(0);
                    (0..m0.cols).find_map(|c| m0.get(node, c).as_monomial().map(|(g, _)| g.clone())).unwrap_or_else(|| xg.identity())
                }
                None => xg.identity(),
            };
            let w: Vec<_> = y_plus.fillings[i].iter().map(|x| x.map(|h| (st.hom)(h))).collect();
            let image = row_matrix(&xtag, &w).mul(xg.as_ref(), &st.map.at(2)).map_err(ChainError::from)?;
            let ginv = RingElement::unit(xg.inv(&gamma));
            let fill: Vec<_> = image.row(0).iter().map(|x| ginv.mul(xg.as_ref(), x)).collect();
            match &fillings[j] {
                Some(prev) if *prev != fill => {
                    return Err(CwError::Word { word: x_words[j].clone(), reason: "two loops of Y force different fillings".into() })
                }
                _ => fillings[j] = Some(fill),
            }
            links[s].push((i, j, gamma));
        }
    }
    let plus = plus_construction(xq, x_words, &fillings, window)?;
    let top = plus.output.complex.top().max(y_plus.output.complex.top());
    let tgt = plus.output.complex.padded(top);
    let mut refined = Vec::new();
    for (st, links) in structures.iter().zip(&links) {
        let src = y_plus.output.complex.map_ring(&xtag, |h| (st.hom)(h)).padded(top);
        let maps = (0..=top)
            .map(|r| {
                let mut m = RingMatrix::zeros(&xtag, src.rank(r), tgt.rank(r));
                m.place(0, 0, &st.map.at(r));
                if r == 2 || r == 3 {
                    let (yb, xb) = (y_plus.source.complex.rank(r), plus.source.complex.rank(r));
                    for (i, j, gamma) in links {
                        m.set(yb + i, xb + j, RingElement::unit(gamma.clone()));
                    }
                }
                m
            })
            .collect();
        let map = ChainMap::new(src, tgt.clone(), maps)?;
        map.check_squares(xg.as_ref())?;
        refined.push(map);
    }
    Ok((plus, refined))
}

/// Induces a structure map to Z[G] with the source chains of Y lifted through H.
fn induce_map(p: &Presentation, src: &ChainComplex<NormalForm>, m: &ChainMap<BaseElement>, side: Side) -> Result<ChainMap<NormalForm>, ChainError> {
    let lift = |g: &BaseElement| p.from_factor(side, g);
    let maps = (0..=m.top()).map(|r| m.at(r).map(p.id(), lift)).collect();
    ChainMap::new(src.clone(), m.target.map_ring(p.id(), lift), maps)
}

/// Plus constructions on Y and each X piece, kept compatible along the structure maps.
pub fn injective_refine(p: &Presentation, svk: &SvKSplitting, words: &KernelWords, window: usize) -> Result<RefinedSplitting, CwError> {
    let s = &svk.splitting;
    let yq = &svk.y;
    let y_plus = plus_construction(yq, &words.y, &[], window)?;
    let i1 = |h: &BaseElement| p.i1.apply_unchecked(h);
    let i2 = |h: &BaseElement| p.i2.apply_unchecked(h);
    let st1 = Structure { map: &s.e1, hom: &i1 };
    let st2 = Structure { map: &s.e2, hom: &i2 };
    let y_src = y_plus.output.complex.map_ring(p.id(), |h| p.from_h(h));
    let (x1_plus, x2_plus, e1, e2, new_total) = match p.kind {
        PresKind::Amalgam => {
            let x2q = svk.x2.as_ref().ok_or_else(|| CwError::Invalid("amalgam splitting without X2".into()))?;
            let (x1_plus, mut m1) = refine_piece("X1", yq, &words.y, &y_plus, &svk.x1, &words.x1, &[st1], window)?;
            let (x2_plus, mut m2) = refine_piece("X2", yq, &words.y, &y_plus, x2q, &words.x2, &[st2], window)?;
            let (e1, e2) = (m1.remove(0), m2.remove(0));
            let a = induce_map(p, &y_src, &e1, Side::First)?;
            let b = induce_map(p, &y_src, &e2, Side::Second)?;
            let total = double_mapping_cylinder(p, &a, &b)?.complex;
            (x1_plus, Some(x2_plus), e1, e2, total)
        }
        PresKind::Hnn => {
            let (x1_plus, mut m) = refine_piece("X1", yq, &words.y, &y_plus, &svk.x1, &words.x1, &[st1, st2], window)?;
            let (e1, e2) = (m.remove(0), m.remove(0));
            let a = induce_map(p, &y_src, &e1, Side::First)?;
            let b = induce_map(p, &y_src, &e2, Side::First)?;
            let t = RingElement::unit(p.stable_nf(true));
            let maps = (0..=a.top())
                .map(|r| {
                    let mut m = a.at(r);
                    for (i, j, x) in b.at(r).entries() {
                        let cur = m.get(i, j).sub(&t.mul(p, x));
                        m.set(i, j, cur);
                    }
                    m
                })
                .collect();
            let total = mapping_cone(p, &ChainMap::new(a.source.clone(), a.target.clone(), maps)?)?;
            (x1_plus, None, e1, e2, total)
        }
    };
    let inclusion = block_inclusion(p, &svk.total, &new_total, s, &x1_plus, &y_plus)?;
    inclusion.check_squares(p)?;
    let verdict = acyclic_cone(p, &inclusion, window);
    Ok(RefinedSplitting { y: y_plus, x1: x1_plus, x2: x2_plus, e1, e2, inclusion, verdict })
}

/// Inclusion of the glued complex into its refinement, block by block.
fn block_inclusion(
    p: &Presentation,
    old: &ChainComplex<NormalForm>,
    new: &ChainComplex<NormalForm>,
    s: &MVSplitting,
    x1: &PlusConstructionData,
    y: &PlusConstructionData,
) -> Result<ChainMap<NormalForm>, ChainError> {
    let top = new.top().max(old.top());
    let one = p.identity_nf();
    let old = old.padded(top);
    let new = new.padded(top);
    let r1 = |r: usize| s.c1.rank(r);
    let r2 = |r: usize| s.c2.as_ref().map_or(0, |c| c.rank(r));
    let rd = |r: usize| if r == 0 { 0 } else { s.d.rank(r - 1) };
    let n1 = |r: usize| x1.output.complex.rank(r);
    let nd = |r: usize| if r == 0 { 0 } else { y.output.complex.rank(r - 1) };
    let maps = (0..=top)
        .map(|r| {
            let mut m = RingMatrix::zeros(p.id(), old.rank(r), new.rank(r));
            for (ro, co, k) in [(0, 0, r1(r)), (r1(r), n1(r), rd(r)), (r1(r) + rd(r), n1(r) + nd(r), r2(r))] {
                m.place(ro, co, &RingMatrix::identity(p.id(), k, &one));
            }
            m
        })
        .collect();
    ChainMap::new(old, new, maps)
}

/// Small complexes used throughout the tests and the command line.
pub mod examples {
    use super::*;
    use crate::groups::Homomorphism;

    fn edge(p: &Presentation, tail: usize, from: &str, head: usize, to: &str) -> Incidence<NormalForm> {
        Incidence { tail, tail_elem: p.reduce(from).expect("word"), head, head_elem: p.reduce(to).expect("word") }
    }

    fn names(cells: &[&[&str]]) -> Vec<Vec<String>> {
        cells.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect()
    }

    /// `1 *_1 1`, the trivial group split as an amalgam.
    pub fn trivial_amalgam() -> Presentation {
        let one = Arc::new(BaseGroup::trivial("1"));
        let a = Arc::new(BaseGroup::trivial("A"));
        let b = Arc::new(BaseGroup::trivial("B"));
        let i1 = Homomorphism::new("i1", one.clone(), a, vec![], true).unwrap();
        let i2 = Homomorphism::new("i2", one, b, vec![], true).unwrap();
        Presentation::amalgam("trivial", i1, i2).unwrap()
    }

    pub fn point(p: &Presentation) -> EquivariantCW {
        EquivariantCW::new(p, "point", names(&[&["P"]]), vec![], vec![], 0).unwrap()
    }

    /// One vertex and one edge from `P` to `t P`, for the circle presentation.
    pub fn circle(p: &Presentation) -> EquivariantCW {
        EquivariantCW::new(p, "circle", names(&[&["P"], &["e"]]), vec![edge(p, 0, "", 0, "t")], vec![], 0).unwrap()
    }

    /// Wedge of two circles with loops labelled x and y, for the free product.
    pub fn wedge(p: &Presentation) -> EquivariantCW {
        let edges = vec![edge(p, 0, "", 0, "x"), edge(p, 0, "", 0, "y")];
        EquivariantCW::new(p, "wedge", names(&[&["P"], &["a", "b"]]), edges, vec![], 0).unwrap()
    }

    /// The wedge with a third loop `c` carrying the trivial label.
    pub fn wedge_with_null_loop(p: &Presentation) -> EquivariantCW {
        let edges = vec![edge(p, 0, "", 0, "x"), edge(p, 0, "", 0, "y"), edge(p, 0, "", 0, "")];
        EquivariantCW::new(p, "wedge3", names(&[&["P"], &["a", "b", "c"]]), edges, vec![], 0).unwrap()
    }

    fn loop_complex(group: Arc<BaseGroup>, label: &str, two: Option<RingElement<BaseElement>>) -> VoltageComplex {
        let one = group.identity();
        let head = group.parse(label).expect("label");
        let tag = group.id().clone();
        let mut cells = names(&[&["P"], &["a"]]);
        let mut higher = Vec::new();
        if let Some(x) = two {
            cells.push(vec!["R".into()]);
            higher.push(RingMatrix::from_rows(&tag, 1, vec![vec![x]]).unwrap());
        }
        VoltageComplex::new(group, cells, vec![Incidence { tail: 0, tail_elem: one, head: 0, head_elem: head }], higher).unwrap()
    }

    /// Disk: a loop `a` with a 2-cell glued along it, over the trivial group.
    pub fn disk() -> VoltageComplex {
        let g = Arc::new(BaseGroup::trivial("1"));
        let one = RingElement::unit(g.identity());
        loop_complex(g, "", Some(one))
    }

    /// A bare loop over the trivial group.
    pub fn bare_circle() -> VoltageComplex {
        loop_complex(Arc::new(BaseGroup::trivial("1")), "", None)
    }

    /// Projective plane over its fundamental group `Z/2`: the 2-cell runs along `a a`.
    pub fn projective_plane() -> VoltageComplex {
        let g = Arc::new(BaseGroup::cyclic("C2", "g", 2).unwrap());
        let x = RingElement::unit(g.identity()).add(&RingElement::unit(g.parse("g").unwrap()));
        loop_complex(g, "g", Some(x))
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::amalgam::desk;

    fn words(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn circle_domain_is_an_interval() {
        let p = desk::circle();
        let w = circle(&p);
        assert!(validate_cw(&p, &w).pass);
        let real = cw_realize_default(&p, &w).unwrap();
        assert_eq!(real.rounds, 0);
        let x1 = quotient(&p, &w, &real.seq, Piece::X1).unwrap();
        let y = quotient(&p, &w, &real.seq, Piece::Y).unwrap();
        assert_eq!(x1.complex.ranks, vec![2, 1]);
        assert_eq!(y.complex.ranks, vec![1, 0]);
        assert!(real.fundamental);
        assert_eq!(real.counts_agree, Some(true));
        assert!(real.certificates.iter().all(Certificate::holds));
    }

    #[test]
    fn wedge_pieces_are_connected_and_generate() {
        let p = desk::free_rank_two();
        let w = wedge(&p);
        let real = cw_realize_default(&p, &w).unwrap();
        let y = quotient(&p, &w, &real.seq, Piece::Y).unwrap();
        // three points joined by two edges, a tree
        assert_eq!(y.complex.ranks, vec![3, 2]);
        for piece in [Piece::X1, Piece::X2, Piece::Y] {
            let vc = quotient(&p, &w, &real.seq, piece).unwrap();
            let cert = certify(piece.label(), &vc);
            assert!(cert.holds(), "{}", piece.label());
            assert!(recheck(&vc, &cert));
        }
    }

    #[test]
    fn tampered_certificate_fails_recheck() {
        let p = desk::free_rank_two();
        let w = wedge(&p);
        let real = cw_realize_default(&p, &w).unwrap();
        let vc = quotient(&p, &w, &real.seq, Piece::X1).unwrap();
        let mut cert = certify("X1", &vc);
        cert.holonomies.clear();
        assert!(!recheck(&vc, &cert));
    }

    #[test]
    fn broken_boundary_is_rejected() {
        let p = desk::circle();
        let mut w = circle(&p);
        let mut d1 = w.complex.d(1);
        d1.set(0, 0, RingElement::unit(p.reduce("t").unwrap()));
        w.complex = ChainComplex::new(p.id(), w.complex.ranks.clone(), vec![d1]).unwrap();
        let report = validate_cw(&p, &w);
        assert!(!report.pass);
        assert!(report.violations[0].contains("augmentation"));
        assert!(matches!(cw_realize_default(&p, &w), Err(CwError::Invalid(_))));
    }

    #[test]
    fn point_over_the_trivial_group() {
        let p = trivial_amalgam();
        let w = point(&p);
        let real = cw_realize_default(&p, &w).unwrap();
        assert!(real.fundamental);
        let svk = build_svk(&p, &w, &real, 1).unwrap();
        assert!(svk.verdict.is_acyclic());
    }

    #[test]
    fn svk_agrees_with_the_algebraic_splitting() {
        for (p, w) in [(desk::circle(), circle(&desk::circle())), (desk::free_rank_two(), wedge(&desk::free_rank_two()))] {
            let real = cw_realize_default(&p, &w).unwrap();
            let svk = build_svk(&p, &w, &real, 2).unwrap();
            assert!(svk.verdict.is_acyclic(), "{}: {:?}", w.name, svk.verdict);
            assert_eq!(svk.splitting.c1, svk.x1.complex);
        }
    }

    #[test]
    fn plus_construction_on_the_disk() {
        let k = disk();
        for ws in [words(&[]), words(&["a"]), words(&["a", "a^2", "a a^-1"])] {
            let out = plus_construction(&k, &ws, &[], 1).unwrap();
            let n = ws.len();
            assert_eq!(out.relative.rank(2), n);
            assert_eq!(out.relative.rank(3), n);
            if n > 0 {
                assert_eq!(out.relative.d(3), RingMatrix::identity(&k.complex.ring, n, &k.group.identity()));
            }
            assert_eq!(out.verdict, ConeVerdict::Acyclic);
        }
    }

    #[test]
    fn plus_construction_on_the_projective_plane() {
        let k = projective_plane();
        let out = plus_construction(&k, &words(&["a^2"]), &[], 1).unwrap();
        assert_eq!(out.verdict, ConeVerdict::Acyclic);
        // a single a is not in the kernel
        assert!(matches!(plus_construction(&k, &words(&["a"]), &[], 1), Err(CwError::Word { .. })));
    }

    #[test]
    fn essential_loop_has_no_filling() {
        let k = bare_circle();
        assert_eq!(plus_construction(&k, &words(&["a"]), &[], 1).unwrap_err(), CwError::DoesNotBound { word: "a".into() });
    }

    #[test]
    fn refine_with_trivial_kernels_is_the_identity() {
        let p = desk::free_rank_two();
        let w = wedge(&p);
        let real = cw_realize_default(&p, &w).unwrap();
        let svk = build_svk(&p, &w, &real, 2).unwrap();
        let refined = injective_refine(&p, &svk, &KernelWords::default(), 2).unwrap();
        assert_eq!(refined.inclusion.source, refined.inclusion.target);
        assert!(refined.verdict.is_acyclic());
    }

    #[test]
    fn refine_with_a_null_homotopic_loop() {
        let p = desk::free_rank_two();
        let w = wedge(&p);
        let real = cw_realize_default(&p, &w).unwrap();
        let svk = build_svk(&p, &w, &real, 2).unwrap();
        let a = svk.x1.names[1][0].clone();
        let kw = KernelWords { x1: vec![format!("{a} {a}^-1")], ..Default::default() };
        let refined = injective_refine(&p, &svk, &kw, 2).unwrap();
        assert_eq!(refined.x1.relative.rank(2), 1);
        assert!(refined.verdict.is_acyclic(), "{:?}", refined.verdict);
    }

    #[test]
    fn essential_loop_of_y_blocks_refinement() {
        let p = desk::free_rank_two();
        let w = wedge_with_null_loop(&p);
        let real = cw_realize_default(&p, &w).unwrap();
        let svk = build_svk(&p, &w, &real, 2).unwrap();
        let c = svk.y.names[1].iter().find(|n| n.starts_with("c_")).unwrap().clone();
        let kw = KernelWords { y: vec![c], ..Default::default() };
        // the loop c is essential in Y, so it cannot be killed
        assert!(matches!(injective_refine(&p, &svk, &kw, 2), Err(CwError::DoesNotBound { .. })));
    }

    #[test]
    fn loops_with_equal_ends_still_get_their_endpoints() {
        let p = desk::circle();
        let at = |t: &str, h: &str| Incidence { tail: 0, tail_elem: p.reduce(t).unwrap(), head: 0, head_elem: p.reduce(h).unwrap() };
        let cells = vec![words(&["P"]), words(&["e", "z"])];
        // a null loop at the base lift splits
        let w = EquivariantCW::new(&p, "w", cells.clone(), vec![at("", "t"), at("", "")], vec![], 0).unwrap();
        let real = cw_realize_default(&p, &w).unwrap();
        assert!(build_svk(&p, &w, &real, 2).unwrap().verdict.is_acyclic());
        // lifted one step away, its far copy is never joined to the rest
        let w = EquivariantCW::new(&p, "w", cells, vec![at("", "t"), at("t^-1", "t^-1")], vec![], 0).unwrap();
        assert!(matches!(cw_realize_default(&p, &w), Err(CwError::CertificateNotFound { piece, .. }) if piece == "X1"));
    }

    #[test]
    fn missing_image_is_reported() {
        let p = desk::free_rank_two();
        let w = wedge_with_null_loop(&p);
        let real = cw_realize_default(&p, &w).unwrap();
        let svk = build_svk(&p, &w, &real, 2).unwrap();
        let c = svk.y.names[1].iter().find(|n| n.starts_with("c_")).unwrap().clone();
        let kw = KernelWords { y: vec![format!("{c} {c}^-1")], ..Default::default() };
        let err = injective_refine(&p, &svk, &kw, 2).unwrap_err();
        assert!(matches!(err, CwError::Containment { ref piece, .. } if piece == "X1"), "{err}");
        let img1 = image_word(&svk.y, &svk.x1, &svk.splitting.e1, &kw.y[0]).unwrap();
        let img2 = image_word(&svk.y, svk.x2.as_ref().unwrap(), &svk.splitting.e2, &kw.y[0]).unwrap();
        let kw = KernelWords { x1: vec![img1], x2: vec![img2], ..kw };
        let refined = injective_refine(&p, &svk, &kw, 2).unwrap();
        assert!(refined.verdict.is_acyclic(), "{:?}", refined.verdict);
    }
}
