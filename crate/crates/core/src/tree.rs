//! The Bass-Serre tree: vertices are right cosets of the vertex groups, edges right cosets of H.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::groups::Group;
use crate::amalgam::{CosetKind, NormalForm, PresKind, Presentation, Side, Syllable};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    pub side: Side,
    pub key: NormalForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeEdge {
    pub key: NormalForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeItem {
    Vertex(TreeVertex),
    Edge(TreeEdge),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FiniteSubtree {
    pub vertices: BTreeSet<TreeVertex>,
    pub edges: BTreeSet<TreeEdge>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("hull of an empty set of items")]
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubtreeFault {
    Empty,
    NonCanonical,
    MissingEndpoint,
    Disconnected,
    NotAcyclic,
    MissingEdge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeViolation {
    pub fault: SubtreeFault,
    pub detail: String,
}

pub fn vertex_kind(side: Side) -> CosetKind {
    match side {
        Side::First => CosetKind::G1,
        Side::Second => CosetKind::G2,
    }
}

pub fn vertex_of(p: &Presentation, g: &NormalForm, side: Side) -> TreeVertex {
    TreeVertex { side, key: p.coset_key_unchecked(g, vertex_kind(side)) }
}

pub fn edge_of(p: &Presentation, g: &NormalForm) -> TreeEdge {
    TreeEdge { key: p.coset_key_unchecked(g, CosetKind::H) }
}

pub fn base_vertex(p: &Presentation) -> TreeVertex {
    TreeVertex { side: Side::First, key: p.identity_nf() }
}

pub fn base_edge(p: &Presentation) -> TreeEdge {
    TreeEdge { key: p.identity_nf() }
}

/// Amalgam: `H g` joins `G1 g` and `G2 g`. HNN: `H g` joins `G1 g` and `G1 t^-1 g`.
pub fn endpoints(p: &Presentation, e: &TreeEdge) -> (TreeVertex, TreeVertex) {
    match p.kind {
        PresKind::Amalgam => (vertex_of(p, &e.key, Side::First), vertex_of(p, &e.key, Side::Second)),
        PresKind::Hnn => {
            let moved = p.nf_multiply(&p.stable_nf(false), &e.key);
            (vertex_of(p, &e.key, Side::First), vertex_of(p, &moved, Side::First))
        }
    }
}

pub fn act_vertex(p: &Presentation, v: &TreeVertex, g: &NormalForm) -> TreeVertex {
    vertex_of(p, &p.nf_multiply(&v.key, g), v.side)
}

pub fn act_edge(p: &Presentation, e: &TreeEdge, g: &NormalForm) -> TreeEdge {
    edge_of(p, &p.nf_multiply(&e.key, g))
}

pub fn act(p: &Presentation, x: &TreeItem, g: &NormalForm) -> TreeItem {
    match x {
        TreeItem::Vertex(v) => TreeItem::Vertex(act_vertex(p, v, g)),
        TreeItem::Edge(e) => TreeItem::Edge(act_edge(p, e, g)),
    }
}

fn tail(nf: &NormalForm, head: crate::groups::BaseElement) -> NormalForm {
    NormalForm { head, syllables: nf.syllables[1..].to_vec() }
}

/// Reduced path from `v` to the base vertex `G1 e`, read off the key's syllables.
pub fn path_to_base(p: &Presentation, v: &TreeVertex) -> Vec<TreeItem> {
    let mut out = vec![TreeItem::Vertex(v.clone())];
    let mut cur = v.clone();
    match p.kind {
        PresKind::Amalgam => loop {
            if cur.key.syllables.is_empty() {
                if cur.side == Side::Second {
                    out.push(TreeItem::Edge(base_edge(p)));
                    out.push(TreeItem::Vertex(base_vertex(p)));
                }
                break;
            }
            out.push(TreeItem::Edge(TreeEdge { key: cur.key.clone() }));
            let other = if cur.side == Side::First { Side::Second } else { Side::First };
            cur = TreeVertex { side: other, key: tail(&cur.key, cur.key.head.clone()) };
            out.push(TreeItem::Vertex(cur.clone()));
        },
        PresKind::Hnn => {
            while let Some(first) = cur.key.syllables.first().cloned() {
                let edge = match first {
                    Syllable::Down(g) => tail(&cur.key, g),
                    _ => cur.key.clone(),
                };
                out.push(TreeItem::Edge(TreeEdge { key: edge }));
                cur = TreeVertex { side: Side::First, key: tail(&cur.key, p.g1.identity()) };
                out.push(TreeItem::Vertex(cur.clone()));
            }
        }
    }
    out
}

/// The unique reduced path from `u` to `v`, alternating vertices and edges.
pub fn geodesic(p: &Presentation, u: &TreeVertex, v: &TreeVertex) -> Vec<TreeItem> {
    let mut pu = path_to_base(p, u);
    let mut pv = path_to_base(p, v);
    while pu.len() >= 2 && pv.len() >= 2 && pu[pu.len() - 2] == pv[pv.len() - 2] {
        pu.pop();
        pv.pop();
    }
    pv.pop();
    pu.extend(pv.into_iter().rev());
    pu
}

pub fn distance(p: &Presentation, u: &TreeVertex, v: &TreeVertex) -> usize {
    geodesic(p, u, v).len() / 2
}

impl FiniteSubtree {
    pub fn single(v: TreeVertex) -> Self {
        FiniteSubtree { vertices: BTreeSet::from([v]), edges: BTreeSet::new() }
    }

    pub fn contains_item(&self, x: &TreeItem) -> bool {
        match x {
            TreeItem::Vertex(v) => self.vertices.contains(v),
            TreeItem::Edge(e) => self.edges.contains(e),
        }
    }

    pub fn items(&self) -> Vec<TreeItem> {
        self.vertices
            .iter()
            .map(|v| TreeItem::Vertex(v.clone()))
            .chain(self.edges.iter().map(|e| TreeItem::Edge(e.clone())))
            .collect()
    }

    pub fn is_subset(&self, other: &FiniteSubtree) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }

    pub fn side_vertices(&self, side: Side) -> Vec<TreeVertex> {
        self.vertices.iter().filter(|v| v.side == side).cloned().collect()
    }
}

/// Smallest subtree containing all items: union of geodesics from one item vertex.
pub fn hull<'a>(p: &Presentation, items: impl IntoIterator<Item = &'a TreeItem>) -> Result<FiniteSubtree, TreeError> {
    let mut anchors: BTreeSet<TreeVertex> = BTreeSet::new();
    let mut out = FiniteSubtree::default();
    for x in items {
        match x {
            TreeItem::Vertex(v) => {
                anchors.insert(v.clone());
            }
            TreeItem::Edge(e) => {
                let (a, b) = endpoints(p, e);
                anchors.insert(a);
                anchors.insert(b);
                out.edges.insert(e.clone());
            }
        }
    }
    let base = anchors.iter().next().cloned().ok_or(TreeError::Empty)?;
    for a in &anchors {
        for item in geodesic(p, &base, a) {
            match item {
                TreeItem::Vertex(v) => {
                    out.vertices.insert(v);
                }
                TreeItem::Edge(e) => {
                    out.edges.insert(e);
                }
            }
        }
    }
    Ok(out)
}

/// Hull computed with geodesics from a chosen basepoint instead of an item vertex.
pub fn hull_from<'a>(
    p: &Presentation,
    base: &TreeVertex,
    items: impl IntoIterator<Item = &'a TreeItem>,
) -> Result<FiniteSubtree, TreeError> {
    let items: Vec<&TreeItem> = items.into_iter().collect();
    if items.is_empty() {
        return Err(TreeError::Empty);
    }
    let mut paths: Vec<Vec<TreeItem>> = Vec::new();
    for x in &items {
        match x {
            TreeItem::Vertex(v) => paths.push(geodesic(p, base, v)),
            TreeItem::Edge(e) => {
                let (a, b) = endpoints(p, e);
                paths.push(geodesic(p, base, &a));
                paths.push(geodesic(p, base, &b));
            }
        }
    }
    // keep only the part of each path beyond the first item-connected point
    let mut out = FiniteSubtree::default();
    let full: BTreeSet<TreeItem> = paths.iter().flatten().cloned().collect();
    let mut degree: BTreeMap<TreeVertex, usize> = BTreeMap::new();
    for x in &full {
        if let TreeItem::Edge(e) = x {
            let (a, b) = endpoints(p, e);
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
    }
    let wanted: BTreeSet<TreeVertex> = items
        .iter()
        .flat_map(|x| match x {
            TreeItem::Vertex(v) => vec![v.clone()],
            TreeItem::Edge(e) => {
                let (a, b) = endpoints(p, e);
                vec![a, b]
            }
        })
        .collect();
    let mut vertices: BTreeSet<TreeVertex> = full
        .iter()
        .filter_map(|x| if let TreeItem::Vertex(v) = x { Some(v.clone()) } else { None })
        .collect();
    let mut edges: BTreeSet<TreeEdge> =
        full.iter().filter_map(|x| if let TreeItem::Edge(e) = x { Some(e.clone()) } else { None }).collect();
    // prune leaves that are not required
    loop {
        let leaf = vertices.iter().find(|v| !wanted.contains(*v) && degree.get(*v).copied().unwrap_or(0) <= 1).cloned();
        let Some(leaf) = leaf else { break };
        vertices.remove(&leaf);
        if let Some(e) = edges.iter().find(|e| {
            let (a, b) = endpoints(p, e);
            a == leaf || b == leaf
        }) {
            let e = e.clone();
            let (a, b) = endpoints(p, &e);
            let other = if a == leaf { b } else { a };
            *degree.get_mut(&other).unwrap() -= 1;
            edges.remove(&e);
        }
    }
    out.vertices = vertices;
    out.edges = edges;
    Ok(out)
}

/// Checks canonical keys, endpoint closure, connectivity and `|V| = |E| + 1`.
pub fn validate_subtree(p: &Presentation, s: &FiniteSubtree) -> Result<(), SubtreeViolation> {
    let fail = |fault, detail: String| Err(SubtreeViolation { fault, detail });
    if s.vertices.is_empty() {
        return fail(SubtreeFault::Empty, "no vertices".into());
    }
    for v in &s.vertices {
        if vertex_of(p, &v.key, v.side) != *v || (p.kind == PresKind::Hnn && v.side == Side::Second) {
            return fail(SubtreeFault::NonCanonical, format!("vertex {}", vertex_label(p, v)));
        }
    }
    let mut adj: BTreeMap<&TreeVertex, Vec<TreeVertex>> = s.vertices.iter().map(|v| (v, Vec::new())).collect();
    for e in &s.edges {
        if edge_of(p, &e.key) != *e {
            return fail(SubtreeFault::NonCanonical, format!("edge {}", edge_label(p, e)));
        }
        let (a, b) = endpoints(p, e);
        for x in [&a, &b] {
            if !s.vertices.contains(x) {
                return fail(SubtreeFault::MissingEndpoint, format!("edge {} misses {}", edge_label(p, e), vertex_label(p, x)));
            }
        }
        adj.get_mut(&a).unwrap().push(b.clone());
        adj.get_mut(&b).unwrap().push(a);
    }
    let start = s.vertices.iter().next().unwrap();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(v) = queue.pop_front() {
        for w in &adj[&v] {
            if seen.insert(w.clone()) {
                queue.push_back(w.clone());
            }
        }
    }
    if seen.len() != s.vertices.len() {
        let lost = s.vertices.iter().find(|v| !seen.contains(*v)).unwrap();
        return fail(SubtreeFault::Disconnected, format!("{} unreachable", vertex_label(p, lost)));
    }
    if s.vertices.len() != s.edges.len() + 1 {
        return fail(SubtreeFault::NotAcyclic, format!("{} vertices, {} edges", s.vertices.len(), s.edges.len()));
    }
    Ok(())
}

/// Every tree edge with both endpoints in `s` belongs to `s`.
pub fn check_edge_closure(p: &Presentation, s: &FiniteSubtree) -> Result<(), SubtreeViolation> {
    let vs: Vec<&TreeVertex> = s.vertices.iter().collect();
    for (i, u) in vs.iter().enumerate() {
        for v in &vs[i + 1..] {
            let g = geodesic(p, u, v);
            if g.len() == 3 {
                if let TreeItem::Edge(e) = &g[1] {
                    if !s.edges.contains(e) {
                        return Err(SubtreeViolation {
                            fault: SubtreeFault::MissingEdge,
                            detail: format!("edge {}", edge_label(p, e)),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Edges at `v` built from coset representatives meeting the ball of radius `bound`.
pub fn incident_edges(p: &Presentation, v: &TreeVertex, bound: usize) -> Vec<TreeEdge> {
    let mut out = BTreeSet::new();
    match p.kind {
        PresKind::Amalgam => {
            let t = if v.side == Side::First { &p.t1 } else { &p.t2 };
            for r in t.sample_reps(bound) {
                out.insert(edge_of(p, &p.nf_multiply(&p.from_factor(v.side, &r), &v.key)));
            }
        }
        PresKind::Hnn => {
            for r in p.t1.sample_reps(bound) {
                out.insert(edge_of(p, &p.nf_multiply(&p.from_factor(Side::First, &r), &v.key)));
            }
            let t = p.stable_nf(true);
            for r in p.t2.sample_reps(bound) {
                let x = p.nf_multiply(&t, &p.nf_multiply(&p.from_factor(Side::First, &r), &v.key));
                out.insert(edge_of(p, &x));
            }
        }
    }
    out.into_iter().collect()
}

/// Breadth-first ball around the base vertex; infinite valences are truncated to `bound`.
pub fn ball(p: &Presentation, radius: usize, bound: usize) -> (BTreeSet<TreeVertex>, BTreeSet<TreeEdge>) {
    let mut vs = BTreeSet::from([base_vertex(p)]);
    let mut es = BTreeSet::new();
    let mut frontier = vec![base_vertex(p)];
    for _ in 0..radius {
        let mut next = Vec::new();
        for v in &frontier {
            for e in incident_edges(p, v, bound) {
                if es.insert(e.clone()) {
                    let (a, b) = endpoints(p, &e);
                    for w in [a, b] {
                        if vs.insert(w.clone()) {
                            next.push(w);
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    (vs, es)
}

/// Translate of an item back to its orbit representative at the base.
pub fn orbit_rep(p: &Presentation, x: &TreeItem) -> TreeItem {
    let key = match x {
        TreeItem::Vertex(v) => &v.key,
        TreeItem::Edge(e) => &e.key,
    };
    act(p, x, &p.nf_invert(key))
}

pub fn vertex_label(p: &Presentation, v: &TreeVertex) -> String {
    let side = match v.side {
        Side::First => "G1",
        Side::Second => "G2",
    };
    format!("{side}·{}", p.show(&v.key))
}

pub fn edge_label(p: &Presentation, e: &TreeEdge) -> String {
    format!("H·{}", p.show(&e.key))
}

pub fn item_label(p: &Presentation, x: &TreeItem) -> String {
    match x {
        TreeItem::Vertex(v) => vertex_label(p, v),
        TreeItem::Edge(e) => edge_label(p, e),
    }
}

/// DOT rendering with nodes in key order.
pub fn export_dot(p: &Presentation, s: &FiniteSubtree, name: &str) -> String {
    let mut out = String::new();
    let ids: BTreeMap<&TreeVertex, usize> = s.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    writeln!(out, "graph \"{name}\" {{").unwrap();
    for (v, i) in &ids {
        let color = if v.side == Side::First { "steelblue" } else { "darkorange" };
        writeln!(out, "  n{i} [label=\"{}\", color={color}];", vertex_label(p, v)).unwrap();
    }
    for e in &s.edges {
        let (a, b) = endpoints(p, e);
        match (ids.get(&a), ids.get(&b)) {
            (Some(i), Some(j)) => writeln!(out, "  n{i} -- n{j} [label=\"{}\"];", edge_label(p, e)).unwrap(),
            _ => writeln!(out, "  // dangling {}", edge_label(p, e)).unwrap(),
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::desk::*;

    fn v1(p: &Presentation, w: &str) -> TreeVertex {
        vertex_of(p, &p.reduce(w).unwrap(), Side::First)
    }

    fn v2(p: &Presentation, w: &str) -> TreeVertex {
        vertex_of(p, &p.reduce(w).unwrap(), Side::Second)
    }

    /// Breadth-first distance inside a ball, independent of syllable reading.
    fn bfs_distance(p: &Presentation, u: &TreeVertex, v: &TreeVertex, radius: usize) -> Option<usize> {
        let (_, es) = ball(p, radius, 2);
        let mut adj: BTreeMap<TreeVertex, Vec<TreeVertex>> = BTreeMap::new();
        for e in &es {
            let (a, b) = endpoints(p, e);
            adj.entry(a.clone()).or_default().push(b.clone());
            adj.entry(b).or_default().push(a);
        }
        let mut dist = BTreeMap::from([(u.clone(), 0usize)]);
        let mut q = VecDeque::from([u.clone()]);
        while let Some(x) = q.pop_front() {
            let d = dist[&x];
            for y in adj.get(&x).cloned().unwrap_or_default() {
                if !dist.contains_key(&y) {
                    dist.insert(y.clone(), d + 1);
                    q.push_back(y);
                }
            }
        }
        dist.get(v).copied()
    }

    #[test]
    fn endpoint_examples() {
        let p = infinite_dihedral();
        let (a, b) = endpoints(&p, &base_edge(&p));
        assert_eq!((a, b), (base_vertex(&p), v2(&p, "")));
        let ea = edge_of(&p, &p.reduce("a").unwrap());
        let (a, b) = endpoints(&p, &ea);
        assert_eq!(a, base_vertex(&p));
        assert_eq!(b, v2(&p, "a"));
        let c = circle();
        let (a, b) = endpoints(&c, &base_edge(&c));
        assert_eq!(a, base_vertex(&c));
        assert_eq!(b, v1(&c, "t^-1"));
        assert_ne!(a, b);
    }

    #[test]
    fn action_examples() {
        let p = infinite_dihedral();
        let b = p.reduce("b").unwrap();
        assert_eq!(act_vertex(&p, &base_vertex(&p), &b), v1(&p, "b"));
        assert_eq!(act_vertex(&p, &v2(&p, "b"), &b), v2(&p, ""));
        let x = TreeItem::Vertex(v1(&p, "a b"));
        assert_eq!(act(&p, &x, &p.identity_nf()), x);
    }

    #[test]
    fn geodesic_examples() {
        let p = infinite_dihedral();
        let g = geodesic(&p, &v2(&p, "a"), &v2(&p, ""));
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], TreeItem::Vertex(v2(&p, "a")));
        assert_eq!(g[1], TreeItem::Edge(edge_of(&p, &p.reduce("a").unwrap())));
        assert_eq!(g[2], TreeItem::Vertex(base_vertex(&p)));
        assert_eq!(g[3], TreeItem::Edge(base_edge(&p)));
        assert_eq!(g[4], TreeItem::Vertex(v2(&p, "")));
        assert_eq!(bfs_distance(&p, &v2(&p, "a"), &v2(&p, ""), 3), Some(2));
        let c = circle();
        assert_eq!(distance(&c, &base_vertex(&c), &v1(&c, "t^-2")), 2);
        assert_eq!(bfs_distance(&c, &base_vertex(&c), &v1(&c, "t^-2"), 3), Some(2));
        let v = v1(&c, "t^3");
        assert_eq!(geodesic(&c, &v, &v), vec![TreeItem::Vertex(v)]);
    }

    #[test]
    fn geodesics_match_bfs() {
        for p in all() {
            let (vs, _) = ball(&p, 3, 1);
            let vs: Vec<_> = vs.into_iter().collect();
            for u in vs.iter().take(6) {
                for v in vs.iter().take(12) {
                    let bfs = bfs_distance(&p, u, v, 4).unwrap();
                    assert_eq!(distance(&p, u, v), bfs, "{}", p.name);
                }
            }
        }
    }

    #[test]
    fn hull_examples() {
        let p = infinite_dihedral();
        let v = TreeItem::Vertex(v2(&p, "a"));
        let h = hull(&p, [&v]).unwrap();
        assert_eq!(h.vertices.len(), 1);
        assert!(h.edges.is_empty());
        let (a, b) = endpoints(&p, &base_edge(&p));
        let h = hull(&p, &[TreeItem::Vertex(a), TreeItem::Vertex(b)]).unwrap();
        assert!(h.edges.contains(&base_edge(&p)));
        let h = hull(&p, &[v.clone(), TreeItem::Vertex(v2(&p, ""))]).unwrap();
        assert_eq!((h.vertices.len(), h.edges.len()), (3, 2));
        assert!(validate_subtree(&p, &h).is_ok());
        assert_eq!(hull(&p, &[]), Err(TreeError::Empty));
    }

    #[test]
    fn hull_is_basepoint_independent() {
        for p in all() {
            let (vs, _) = ball(&p, 3, 1);
            let items: Vec<TreeItem> = vs.iter().rev().take(4).map(|v| TreeItem::Vertex(v.clone())).collect();
            let h = hull(&p, &items).unwrap();
            assert_eq!(hull_from(&p, &base_vertex(&p), &items).unwrap(), h, "{}", p.name);
            assert!(validate_subtree(&p, &h).is_ok());
            assert!(check_edge_closure(&p, &h).is_ok());
        }
    }

    #[test]
    fn validation_examples() {
        let p = infinite_dihedral();
        assert!(validate_subtree(&p, &FiniteSubtree::single(base_vertex(&p))).is_ok());
        let two = FiniteSubtree {
            vertices: BTreeSet::from([base_vertex(&p), v1(&p, "b")]),
            edges: BTreeSet::new(),
        };
        assert_eq!(validate_subtree(&p, &two).unwrap_err().fault, SubtreeFault::Disconnected);
    }

    #[test]
    fn dot_export_is_sorted() {
        let c = circle();
        let h = hull(&c, &[TreeItem::Vertex(base_vertex(&c)), TreeItem::Vertex(v1(&c, "t"))]).unwrap();
        let dot = export_dot(&c, &h, "u0");
        assert_eq!(dot.matches("label=").count(), 3);
        assert_eq!(dot.matches(" -- ").count(), 1);
        assert_eq!(dot, export_dot(&c, &h.clone(), "u0"));
    }
}
